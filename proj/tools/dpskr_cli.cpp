// Command-line front end: sweeps over the bound curves, exclusion regions,
// key rates, and asymptotic coefficients, written as CSV with the resolved
// configuration echoed in '#' header lines; plus a self-contained verify
// command that cross-checks the reduced eigenvalue route against the dense
// reference route.
//
// Exit codes: 0 success, 1 verify found a violation, 2 invalid
// configuration, 3 solver failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dpskr/asymptotics.hpp"
#include "dpskr/errors.hpp"
#include "dpskr/keyrate.hpp"
#include "dpskr/omega.hpp"
#include "dpskr/operators.hpp"
#include "dpskr/oracle.hpp"
#include "dpskr/sweep.hpp"

namespace {

using dpskr::sweep::format_field;
using dpskr::sweep::join_row;
using dpskr::sweep::parse_grid;

struct MeanPolicy {
    enum class Kind { fixed, linear, sqrt_eta, optimize };
    Kind kind = Kind::optimize;
    double value = 0.0;  // block mean coefficient, unused for optimize
};

MeanPolicy parse_policy(const std::string& spec) {
    MeanPolicy p;
    if (spec == "optimize") {
        p.kind = MeanPolicy::Kind::optimize;
        return p;
    }
    std::size_t colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument(
            "policy: expected optimize, fixed:<m>, linear:<c>, or sqrt:<c>, got '" + spec + "'");
    std::string head = spec.substr(0, colon);
    std::string tail = spec.substr(colon + 1);
    if (head == "fixed")
        p.kind = MeanPolicy::Kind::fixed;
    else if (head == "linear")
        p.kind = MeanPolicy::Kind::linear;
    else if (head == "sqrt")
        p.kind = MeanPolicy::Kind::sqrt_eta;
    else
        throw std::invalid_argument("policy: unknown kind '" + head + "'");
    std::vector<double> v = parse_grid(tail);  // reuses the scalar parser
    if (v.size() != 1 || !(v[0] > 0.0))
        throw std::invalid_argument("policy: coefficient must be a positive number, got '" +
                                    tail + "'");
    p.value = v[0];
    return p;
}

// Block mean photon number n * alpha_sq prescribed by a non-optimizing policy.
double policy_block_mean(const MeanPolicy& p, double eta) {
    switch (p.kind) {
        case MeanPolicy::Kind::fixed: return p.value;
        case MeanPolicy::Kind::linear: return p.value * eta;
        case MeanPolicy::Kind::sqrt_eta: return p.value * std::sqrt(eta);
        case MeanPolicy::Kind::optimize: break;
    }
    throw std::logic_error("policy_block_mean: optimize has no closed form");
}

// Everything that determines a sweep's output. Grids stay in their textual
// form so the header echo reproduces exactly what was resolved; workers is
// deliberately not echoed because output bytes must not depend on it.
struct SweepConfig {
    std::string command;
    int n = 0;
    int nu = 1;
    std::vector<int> nu_bar;
    std::string lambda_spec;
    std::string eta_spec;
    std::string e_spec;
    std::string policy_spec = "optimize";
    std::string output;
    double eig_tol = 1e-12;
    double shape_tol = 1e-9;
    int workers = 0;
    bool mutate = false;
};

// Flat key=value config support, spliced into argv before CLI11 parses.
// Each key names a long flag of the chosen subcommand without its dashes;
// keys already present on the command line are skipped, so explicit flags
// always win. Values with spaces fan out into repeated flags (vector
// options accumulate). Unknown keys surface as ordinary CLI11 parse errors.
std::vector<std::string> splice_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw std::invalid_argument("--config needs a file path");
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");

    auto trim = [](std::string s) {
        std::size_t b = s.find_first_not_of(" \t\r");
        std::size_t e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    auto given_on_command_line = [&](const std::string& key) {
        std::string full = "--" + key;
        for (const std::string& a : args)
            if (a == full || a.rfind(full + "=", 0) == 0) return true;
        return false;
    };

    // Last occurrence of a repeated key wins, like rereading the file would.
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config " + path + ":" + std::to_string(line_no) +
                                        ": expected key=value, got '" + s + "'");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config " + path + ":" + std::to_string(line_no) +
                                        ": expected key=value, got '" + s + "'");
        if (key == "config")
            throw std::invalid_argument("config " + path + ": files cannot chain via a config "
                                        "key");
        bool replaced = false;
        for (auto& p : pairs)
            if (p.first == key) {
                p.second = value;
                replaced = true;
            }
        if (!replaced) pairs.emplace_back(key, value);
    }

    for (const auto& [key, value] : pairs) {
        if (given_on_command_line(key)) continue;
        std::size_t start = 0;
        while (start < value.size()) {
            std::size_t stop = value.find(' ', start);
            if (stop == std::string::npos) stop = value.size();
            if (stop > start) args.push_back("--" + key + "=" + value.substr(start, stop - start));
            start = stop + 1;
        }
    }
    return args;
}

std::vector<std::string> echo_common(const SweepConfig& cfg, const std::string& path) {
    std::vector<std::string> lines;
    lines.push_back("command = " + cfg.command);
    lines.push_back("n = " + std::to_string(cfg.n));
    lines.push_back("eig-tol = " + format_field(cfg.eig_tol));
    lines.push_back("output = " + path);
    return lines;
}

const char* branch_name(dpskr::Branch b) { return b == dpskr::Branch::minus ? "minus" : "plus"; }

dpskr::CurveOptions curve_options(const SweepConfig& cfg) {
    dpskr::CurveOptions copts;
    copts.omega.eig_tol = cfg.eig_tol;
    copts.shape_tol = cfg.shape_tol;
    return copts;
}

void report_written(const std::string& path, std::size_t rows) {
    std::printf("wrote %s (%zu data rows)\n", path.c_str(), rows);
}

int cmd_omega(const SweepConfig& cfg) {
    std::vector<double> grid = parse_grid(cfg.lambda_spec);
    dpskr::OmegaOptions opts;
    opts.eig_tol = cfg.eig_tol;

    auto results = dpskr::sweep::parallel_map(
        grid.size(), cfg.workers,
        [&](std::size_t i) { return dpskr::omega(cfg.n, cfg.nu, grid[i], opts); });

    // Shape diagnostics over the sweep itself: secant slopes must not
    // decrease (convexity) and values must not increase.
    bool convex = true, nonincreasing = true;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (results[i + 1].value > results[i].value + 1e-12) nonincreasing = false;
        if (i + 2 <= grid.size() - 1) {
            double s0 = (results[i + 1].value - results[i].value) / (grid[i + 1] - grid[i]);
            double s1 =
                (results[i + 2].value - results[i + 1].value) / (grid[i + 2] - grid[i + 1]);
            if (s1 < s0 - cfg.shape_tol) convex = false;
        }
    }

    std::string path = dpskr::sweep::resolve_output_path(cfg.output, "omega.csv");
    std::vector<std::string> comments = echo_common(cfg, path);
    comments.push_back("nu = " + std::to_string(cfg.nu));
    comments.push_back("lambda = " + cfg.lambda_spec);
    comments.push_back("shape-tol = " + format_field(cfg.shape_tol));
    comments.push_back(std::string("convex = ") + (convex ? "1" : "0"));
    comments.push_back(std::string("nonincreasing = ") + (nonincreasing ? "1" : "0"));

    std::vector<std::string> rows(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const dpskr::OmegaResult& r = results[i];
        rows[i] = join_row({format_field(grid[i]), format_field(r.value),
                            r.pattern.to_string(), std::to_string(r.first_slot),
                            branch_name(r.branch)});
    }
    dpskr::sweep::write_file(
        path, dpskr::sweep::assemble_csv(
                  comments, {"lambda", "omega", "argmax_pattern", "first_slot", "branch"}, rows));
    report_written(path, rows.size());
    return 0;
}

int cmd_region(const SweepConfig& cfg) {
    if (cfg.nu < 1 || cfg.nu > 3)
        throw std::invalid_argument("region: nu must be 1, 2, or 3 (the bound at nu = 0 has no "
                                    "exclusion boundary)");
    std::vector<double> grid = parse_grid(cfg.lambda_spec);
    dpskr::OmegaCurve curve = dpskr::omega_curve(cfg.n, cfg.nu, grid, curve_options(cfg));
    dpskr::RegionBoundary boundary = dpskr::region_boundary(curve);

    std::string path = dpskr::sweep::resolve_output_path(cfg.output, "region.csv");
    std::vector<std::string> comments = echo_common(cfg, path);
    comments.push_back("nu = " + std::to_string(cfg.nu));
    comments.push_back("lambda = " + cfg.lambda_spec);
    comments.push_back("shape-tol = " + format_field(cfg.shape_tol));
    comments.push_back(std::string("all-achievable = ") + (boundary.all_achievable ? "1" : "0"));

    std::vector<std::string> rows;
    if (boundary.all_achievable) {
        // Sentinel row: the boundary excludes nothing, i.e. e_ph reaches 1
        // already at zero bit error.
        rows.push_back(join_row({format_field(0.0), format_field(1.0), format_field(0.0)}));
    } else {
        rows.reserve(boundary.points.size());
        for (const dpskr::RegionPoint& p : boundary.points)
            rows.push_back(join_row(
                {format_field(p.e), format_field(p.e_ph), format_field(p.lambda)}));
    }
    dpskr::sweep::write_file(
        path, dpskr::sweep::assemble_csv(comments, {"e", "e_ph", "lambda"}, rows));
    report_written(path, rows.size());
    return 0;
}

int cmd_keyrate(const SweepConfig& cfg) {
    std::vector<int> nubars = cfg.nu_bar;
    if (nubars.empty()) nubars = {1, 2, 3};
    std::sort(nubars.begin(), nubars.end());
    nubars.erase(std::unique(nubars.begin(), nubars.end()), nubars.end());
    for (int v : nubars)
        if (v < 1 || v > 3)
            throw std::invalid_argument("keyrate: nubar must lie in {1, 2, 3}");

    std::vector<double> e_vals = parse_grid(cfg.e_spec);
    if (e_vals.size() != 1)
        throw std::invalid_argument("keyrate: --e takes a single bit error rate");
    double e = e_vals[0];

    std::vector<double> etas = parse_grid(cfg.eta_spec);
    MeanPolicy policy = parse_policy(cfg.policy_spec);

    dpskr::CurveSet curves;
    std::vector<double> lgrid = parse_grid(cfg.lambda_spec);
    for (int nu = 2; nu <= nubars.back(); ++nu)
        curves[nu] = dpskr::omega_curve(cfg.n, nu, lgrid, curve_options(cfg));

    auto row_points = dpskr::sweep::parallel_map(
        etas.size(), cfg.workers, [&](std::size_t i) {
            std::vector<dpskr::KeyRatePoint> pts;
            pts.reserve(nubars.size());
            for (int nubar : nubars) {
                if (policy.kind == MeanPolicy::Kind::optimize) {
                    dpskr::MeanPhotonOptimum opt =
                        dpskr::optimize_mean_photon(cfg.n, e, etas[i], nubar, curves);
                    // Re-evaluate at the reported optimum so every column in
                    // the row comes from one consistent evaluation.
                    pts.push_back(
                        dpskr::key_rate(cfg.n, e, etas[i], opt.alpha_sq, nubar, curves));
                } else {
                    double alpha_sq = policy_block_mean(policy, etas[i]) / cfg.n;
                    pts.push_back(dpskr::key_rate(cfg.n, e, etas[i], alpha_sq, nubar, curves));
                }
            }
            return pts;
        });

    std::string path = dpskr::sweep::resolve_output_path(cfg.output, "keyrate.csv");
    std::vector<std::string> comments = echo_common(cfg, path);
    {
        std::string list;
        for (int v : nubars) list += (list.empty() ? "" : ",") + std::to_string(v);
        comments.push_back("nubar = " + list);
    }
    comments.push_back("e = " + cfg.e_spec);
    comments.push_back("eta = " + cfg.eta_spec);
    comments.push_back("lambda = " + cfg.lambda_spec);
    comments.push_back("policy = " + cfg.policy_spec);
    comments.push_back("shape-tol = " + format_field(cfg.shape_tol));
    comments.push_back("alpha_sq columns are per-pulse means; policies prescribe the block mean "
                       "n*alpha_sq");

    std::vector<std::string> columns = {"eta"};
    for (int v : nubars) {
        std::string tag = "_nubar" + std::to_string(v);
        columns.push_back("alpha_sq" + tag);
        columns.push_back("Q" + tag);
        columns.push_back("h_ph" + tag);
        columns.push_back("G" + tag);
    }

    std::vector<std::string> rows(etas.size());
    for (std::size_t i = 0; i < etas.size(); ++i) {
        std::vector<std::string> fields = {format_field(etas[i])};
        for (const dpskr::KeyRatePoint& p : row_points[i]) {
            fields.push_back(format_field(p.alpha_sq));
            fields.push_back(format_field(p.Q));
            fields.push_back(format_field(p.h_ph));
            fields.push_back(format_field(p.G));
        }
        rows[i] = join_row(fields);
    }
    dpskr::sweep::write_file(path, dpskr::sweep::assemble_csv(comments, columns, rows));
    report_written(path, rows.size());
    return 0;
}

int cmd_asymptotic(const SweepConfig& cfg) {
    std::vector<double> e_grid = parse_grid(cfg.e_spec);
    std::vector<double> lgrid = parse_grid(cfg.lambda_spec);
    dpskr::OmegaCurve curve2 = dpskr::omega_curve(cfg.n, 2, lgrid, curve_options(cfg));

    double t_single = dpskr::e_max_single();
    dpskr::ThresholdResult t_two = dpskr::e_max_two(cfg.n, curve2);
    double t_min = dpskr::e_min_two(cfg.n, curve2);

    struct Coeffs {
        double d2s, d2t, d32;
    };
    auto coeffs = dpskr::sweep::parallel_map(e_grid.size(), cfg.workers, [&](std::size_t i) {
        Coeffs c;
        c.d2s = dpskr::d2_single(cfg.n, e_grid[i]).value;
        c.d2t = dpskr::d2_two(cfg.n, e_grid[i], curve2).value;
        c.d32 = dpskr::d32_two(cfg.n, e_grid[i], curve2).value;
        return c;
    });

    std::string path = dpskr::sweep::resolve_output_path(cfg.output, "asymptotic.csv");
    std::vector<std::string> comments = echo_common(cfg, path);
    comments.push_back("e = " + cfg.e_spec);
    comments.push_back("lambda = " + cfg.lambda_spec);
    comments.push_back("shape-tol = " + format_field(cfg.shape_tol));
    comments.push_back("e-max-single = " + format_field(t_single));
    comments.push_back("e-max-two = " + (t_two.found ? format_field(t_two.e) : "none"));
    comments.push_back("e-min-two = " + format_field(t_min));
    comments.push_back(
        "thresholds column: rows 1..3 hold e_max_single, e_max_two, e_min_two in that order");

    std::vector<std::string> rows(e_grid.size());
    for (std::size_t i = 0; i < e_grid.size(); ++i) {
        std::string threshold_field;
        if (i == 0) threshold_field = format_field(t_single);
        if (i == 1) threshold_field = t_two.found ? format_field(t_two.e) : "";
        if (i == 2) threshold_field = format_field(t_min);
        rows[i] = join_row({format_field(e_grid[i]), format_field(coeffs[i].d2s),
                            format_field(coeffs[i].d2t), format_field(coeffs[i].d32),
                            threshold_field});
    }
    dpskr::sweep::write_file(
        path, dpskr::sweep::assemble_csv(
                  comments, {"e", "d2_single", "d2_two", "d32_two", "thresholds"}, rows));
    report_written(path, rows.size());
    return 0;
}

// --- verify: dual-route consistency checks, printed as one line per check ---

dpskr::DenseSym multiply(const dpskr::DenseSym& a, const dpskr::DenseSym& b) {
    std::size_t d = a.dim();
    dpskr::DenseSym c(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < d; ++j) c.at(i, j) += aik * b.at(k, j);
        }
    return c;
}

struct CheckOutcome {
    bool ok = true;
    int failures = 0;

    void record(bool pass, const char* name, const std::string& detail) {
        std::printf("%s %s: %s\n", pass ? "ok" : "FAIL", name, detail.c_str());
        if (!pass) {
            ok = false;
            ++failures;
        }
    }
};

std::string fmt_dev(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

int cmd_verify(const SweepConfig& cfg) {
    if (cfg.n < 3 || cfg.n > 8)
        throw std::invalid_argument("verify: dense reference route needs 3 <= n <= 8");
    std::vector<double> lambdas =
        cfg.lambda_spec.empty() ? std::vector<double>{0.0, 0.5, 1.0, 2.0, 6.0, 12.0}
                                : parse_grid(cfg.lambda_spec);
    std::printf("verify n=%d, %zu lambda values%s\n", cfg.n, lambdas.size(),
                cfg.mutate ? ", mutation injected" : "");

    CheckOutcome out;
    dpskr::OmegaOptions opts;
    opts.eig_tol = cfg.eig_tol;

    {
        // Reduced tridiagonal route against dense diagonalization on the
        // admissible joint support. --mutate shifts the reduced value to
        // prove the comparison has teeth.
        double worst = 0.0;
        int cases = 0;
        for (int nu = 0; nu <= 3; ++nu)
            for (double lam : lambdas) {
                double dense = dpskr::oracle::brute_force_omega(cfg.n, nu, lam);
                double reduced = dpskr::omega(cfg.n, nu, lam, opts).value;
                if (cfg.mutate) reduced += 1e-6;
                worst = std::max(worst, std::abs(dense - reduced));
                ++cases;
            }
        out.record(worst <= 1e-9, "equivalence",
                   "max |dense - reduced| = " + fmt_dev(worst) + " over " +
                       std::to_string(cases) + " cases (tol 1e-9)");
    }

    {
        // Structural identities of the basis change: involution, and the
        // conjugated observables splitting into pattern blocks. Dense joint
        // matrices at n = 8 would need gigabytes, so the block-length
        // independent identity is checked at a capped size.
        int nc = std::min(cfg.n, 7);
        std::size_t d = dpskr::oracle::joint_dim(nc);
        dpskr::DenseSym u = dpskr::oracle::build_u(nc);
        dpskr::oracle::JointOperators ops = dpskr::oracle::build_error_operators(nc);
        dpskr::Tridiag pi = dpskr::build_pi(nc);

        dpskr::DenseSym uu = multiply(u, u);
        double invol = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                invol = std::max(std::abs(uu.at(i, j) - (i == j ? 1.0 : 0.0)), invol);

        dpskr::DenseSym bit = multiply(multiply(u, ops.e), u);
        double bit_dev = 0.0;
        std::size_t un = static_cast<std::size_t>(nc);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                double want = 0.0;
                if (i / un == j / un) {
                    std::size_t si = i % un, sj = j % un;
                    if (si == sj)
                        want = pi.diag[si];
                    else if (si + 1 == sj || sj + 1 == si)
                        want = pi.off[std::min(si, sj)];
                }
                bit_dev = std::max(std::abs(bit.at(i, j) - want), bit_dev);
            }

        dpskr::DenseSym ph = multiply(multiply(u, ops.e_ph), u);
        double cross = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                if (i / un != j / un) cross = std::max(std::abs(ph.at(i, j)), cross);

        double worst = std::max({invol, bit_dev, cross});
        out.record(worst <= 1e-12, "conjugation",
                   "n = " + std::to_string(nc) + ": involution " + fmt_dev(invol) +
                       ", bit block-tridiagonal " + fmt_dev(bit_dev) +
                       ", phase block-diagonal " + fmt_dev(cross) + " (tol 1e-12)");
    }

    {
        std::vector<double> chain_grid =
            cfg.lambda_spec.empty() ? parse_grid("0:12:121") : lambdas;
        dpskr::ChainReport rep = dpskr::verify_chain(cfg.n, 3, chain_grid, opts);
        bool pass = rep.ok && rep.min_step_margin >= -1e-10 && rep.min_cap_margin >= -1e-10;
        out.record(pass, "chain",
                   "min step margin " + fmt_dev(rep.min_step_margin) + ", min cap margin " +
                       fmt_dev(rep.min_cap_margin) + ", " +
                       std::to_string(rep.violations.size()) + " violations (tol -1e-10)");
    }

    {
        // Winning eigenvectors embedded as register states must sit on the
        // supporting line: e_ph - lambda e equals the bound value.
        dpskr::OmegaOptions vec_opts = opts;
        vec_opts.want_eigenvector = true;
        double worst = 0.0;
        int cases = 0;
        for (int nu = 1; nu <= 3; ++nu)
            for (double lam : lambdas) {
                dpskr::OmegaResult best = dpskr::omega(cfg.n, nu, lam, vec_opts);
                dpskr::oracle::AttackState state =
                    dpskr::oracle::attack_state_from_omega(cfg.n, best);
                dpskr::oracle::AttackErrors err = dpskr::oracle::attack_state_errors(state);
                worst = std::max(worst,
                                 std::abs((err.phase - lam * err.bit) - best.value));
                ++cases;
            }
        out.record(worst <= 1e-9, "saturation",
                   "max |(e_ph - lambda e) - omega| = " + fmt_dev(worst) + " over " +
                       std::to_string(cases) + " states (tol 1e-9)");
    }

    if (out.ok) {
        std::printf("verify: all checks passed\n");
        return 0;
    }
    std::printf("verify: %d check(s) failed\n", out.failures);
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sweeps and consistency checks for differential-phase-shift key rate bounds"};
    app.require_subcommand(1);

    SweepConfig cfg;
    cfg.n = 5;  // verify default; sweep commands require an explicit --n

    std::string config_path;  // consumed by splice_config; bound here for --help
    auto add_common = [&](CLI::App* sub, bool with_workers) {
        sub->add_option("--config", config_path,
                        "flat key=value file mirroring the flags; command line overrides");
        sub->add_option("--n", cfg.n, "block length (pulses per block)")->required();
        sub->add_option("--output", cfg.output,
                        "output CSV path (default <command>.csv in $DPSKR_OUTPUT_DIR or the "
                        "working directory)");
        sub->add_option("--eig-tol", cfg.eig_tol, "eigenvalue bisection tolerance")
            ->capture_default_str();
        if (with_workers)
            sub->add_option("--workers", cfg.workers,
                            "worker threads for grid sweeps (0 = hardware concurrency); output "
                            "bytes do not depend on it");
    };

    CLI::App* omega = app.add_subcommand(
        "omega", "worst-case phase-error bound vs lambda for one photon number");
    add_common(omega, true);
    omega->add_option("--nu", cfg.nu, "photon number (0..3)")->capture_default_str();
    omega->add_option("--lambda", cfg.lambda_spec, "lambda grid (default 0:12:2401)");
    omega->add_option("--shape-tol", cfg.shape_tol, "slope slack for the convexity flag")
        ->capture_default_str();

    CLI::App* region = app.add_subcommand(
        "region", "boundary of the achievable (e, e_ph) region for one photon number");
    add_common(region, false);
    region->add_option("--nu", cfg.nu, "photon number (1..3)")->capture_default_str();
    region->add_option("--lambda", cfg.lambda_spec, "lambda grid (default 0:12:2401)");
    region->add_option("--shape-tol", cfg.shape_tol, "curve convexity slack")
        ->capture_default_str();

    CLI::App* keyrate =
        app.add_subcommand("keyrate", "secure key rate G vs channel transmission eta");
    add_common(keyrate, true);
    keyrate->add_option("--nubar", cfg.nu_bar,
                        "photon-number truncations, repeatable (default 1 2 3)");
    keyrate->add_option("--e", cfg.e_spec, "bit error rate (default 0.03)");
    keyrate->add_option("--eta", cfg.eta_spec, "eta grid (default log:0.0001:0.1:31)");
    keyrate->add_option("--lambda", cfg.lambda_spec,
                        "lambda grid for the bound curves (default 0:40:8001)");
    keyrate->add_option("--policy", cfg.policy_spec,
                        "mean photon policy: optimize | fixed:<m> | linear:<c> | sqrt:<c>, "
                        "prescribing the block mean n*alpha_sq as m, c*eta, or c*sqrt(eta)")
        ->capture_default_str();
    keyrate->add_option("--shape-tol", cfg.shape_tol, "curve convexity slack")
        ->capture_default_str();

    CLI::App* asym = app.add_subcommand(
        "asymptotic", "low-transmission scaling coefficients and threshold error rates");
    add_common(asym, true);
    asym->add_option("--e", cfg.e_spec, "bit error grid (default 0:0.045:91)");
    asym->add_option("--lambda", cfg.lambda_spec,
                     "lambda grid for the two-photon curve (default 0:40:8001); the split "
                     "pinning threshold for n >= 11 needs the tail, e.g. 0:240:4801");
    asym->add_option("--shape-tol", cfg.shape_tol, "curve convexity slack")
        ->capture_default_str();

    CLI::App* verify = app.add_subcommand(
        "verify", "cross-check the reduced route against dense reference computations");
    verify->add_option("--config", config_path,
                       "flat key=value file mirroring the flags; command line overrides");
    verify->add_option("--n", cfg.n, "block length, 3..8")->capture_default_str();
    verify->add_option("--lambda", cfg.lambda_spec,
                       "lambda grid (default: the list 0, 0.5, 1, 2, 6, 12)");
    verify->add_option("--eig-tol", cfg.eig_tol, "eigenvalue bisection tolerance")
        ->capture_default_str();
    verify->add_flag("--mutate", cfg.mutate,
                     "inject a 1e-6 perturbation into the reduced route; verify must fail");

    try {
        try {
            std::vector<std::string> args = splice_config(argc, argv);
            std::reverse(args.begin(), args.end());
            app.parse(std::move(args));
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::CallForAllHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return 2;
        }

        auto defaulted = [](std::string& slot, const char* value) {
            if (slot.empty()) slot = value;
        };
        if (app.got_subcommand(omega)) {
            cfg.command = "omega";
            defaulted(cfg.lambda_spec, "0:12:2401");
            return cmd_omega(cfg);
        }
        if (app.got_subcommand(region)) {
            cfg.command = "region";
            defaulted(cfg.lambda_spec, "0:12:2401");
            return cmd_region(cfg);
        }
        if (app.got_subcommand(keyrate)) {
            cfg.command = "keyrate";
            defaulted(cfg.lambda_spec, "0:40:8001");
            defaulted(cfg.eta_spec, "log:0.0001:0.1:31");
            defaulted(cfg.e_spec, "0.03");
            return cmd_keyrate(cfg);
        }
        if (app.got_subcommand(asym)) {
            cfg.command = "asymptotic";
            defaulted(cfg.lambda_spec, "0:40:8001");
            defaulted(cfg.e_spec, "0:0.045:91");
            return cmd_asymptotic(cfg);
        }
        if (app.got_subcommand(verify)) {
            cfg.command = "verify";
            return cmd_verify(cfg);
        }
        std::fprintf(stderr, "error: no subcommand selected\n");
        return 2;
    } catch (const std::invalid_argument& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 2;
    } catch (const dpskr::solver_error& ex) {
        std::fprintf(stderr, "solver error: %s\n", ex.what());
        return 3;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "internal error: %s\n", ex.what());
        return 3;
    }
}
