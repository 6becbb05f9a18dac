#pragma once

namespace dpskr {

// Binary entropy h(x) = -x log2 x - (1-x) log2(1-x). Exact 0 at the
// endpoints; throws std::invalid_argument outside [0, 1].
double binary_entropy(double x);

// h'(x) = log2((1-x)/x), defined on (0, 1).
double binary_entropy_prime(double x);

}  // namespace dpskr
