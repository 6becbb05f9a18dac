#pragma once

#include <stdexcept>

namespace dpskr {

// An iterative routine failed its contract (bracketing, sweep limit,
// residual check). The CLI maps this to exit code 3. Precondition
// violations throw std::invalid_argument instead (exit code 2).
class solver_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace dpskr
