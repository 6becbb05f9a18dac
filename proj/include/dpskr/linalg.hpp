#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "dpskr/errors.hpp"

namespace dpskr {

// Symmetric tri-diagonal matrix. off[i] couples rows i and i+1 (0-based),
// so off has size dim()-1 and is empty for a 1x1 matrix.
struct Tridiag {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t dim() const { return diag.size(); }
};

// Number of eigenvalues strictly below x, by the Sturm sequence count.
int count_eigenvalues_below(const Tridiag& t, double x);

// Largest / smallest eigenvalue via Sturm bisection inside the Gershgorin
// bracket. The result is within +-tol of the exact eigenvalue. Tolerances
// are absolute; every matrix in this project has O(1) norm.
double max_eigenvalue_tridiag(const Tridiag& t, double tol = 1e-12);
double min_eigenvalue_tridiag(const Tridiag& t, double tol = 1e-12);

struct Eigenpair {
    double value = 0.0;
    std::vector<double> vector;
};

// Largest eigenvalue together with a unit eigenvector (shifted inverse
// iteration seeded by the bisection value). The sign is fixed by making the
// largest-magnitude component positive, earliest index on ties. Throws
// solver_error when the residual ||T v - value v||_2 exceeds
// 10 * tol * ||T||_inf after the retry schedule.
Eigenpair max_eigenpair_tridiag(const Tridiag& t, double tol = 1e-12);

// Dense symmetric matrix, row-major storage.
class DenseSym {
  public:
    DenseSym() = default;
    explicit DenseSym(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    std::size_t dim() const { return n_; }
    double& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    // Throws std::invalid_argument when some |a_ij - a_ji| exceeds tol.
    void require_symmetric(double tol = 1e-12) const;

  private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

// All eigenvalues in ascending order, by cyclic Jacobi sweeps. Stops once
// the off-diagonal Frobenius norm drops below tol; throws solver_error
// after max_sweeps sweeps without convergence and std::invalid_argument on
// non-symmetric input.
std::vector<double> jacobi_eigenvalues(DenseSym a, double tol = 1e-12, int max_sweeps = 100);

double max_eigenvalue_dense(const DenseSym& a, double tol = 1e-12);

struct PointXY {
    double x = 0.0;
    double y = 0.0;
};

// Least concave majorant of the point set on [min x, max x]. Duplicate x
// keep the larger y; consecutive segments whose slopes agree within
// slope_tol merge into one. Breakpoints come out with strictly increasing x
// and (beyond slope_tol) strictly decreasing slopes.
std::vector<PointXY> upper_concave_envelope(std::vector<PointXY> pts, double slope_tol = 1e-12);

// Piecewise-linear interpolation through envelope breakpoints; clamps to
// the end values outside [front.x, back.x].
double eval_piecewise(const std::vector<PointXY>& pts, double x);

// Golden-section minimizer for a unimodal f on [lo, hi]; returns the argmin
// once the bracket width shrinks below tol.
double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-8);

}  // namespace dpskr
