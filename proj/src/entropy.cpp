#include "dpskr/entropy.hpp"

#include <cmath>
#include <stdexcept>

namespace dpskr {

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::invalid_argument("binary entropy argument outside [0,1]");
    }
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double binary_entropy_prime(double x) {
    if (!(x > 0.0 && x < 1.0)) {
        throw std::invalid_argument("binary entropy derivative argument outside (0,1)");
    }
    return std::log2((1.0 - x) / x);
}

}  // namespace dpskr
