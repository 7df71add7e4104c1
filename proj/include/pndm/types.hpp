#ifndef PNDM_TYPES_HPP
#define PNDM_TYPES_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pndm {

// A flattened sample point x_t. All solvers operate on these.
using StateVec = std::vector<double>;

// Thrown where a schedule time makes a formula divide by zero
// (alpha_bar at 0 or 1, depending on the operation).
struct SingularTimeError : std::domain_error {
    using std::domain_error::domain_error;
};

// Invalid run configuration: bad sampler spec, malformed config file,
// missing multistep history, grid violations.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline double norm2(const StateVec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline void check_same_dim(const StateVec& a, const StateVec& b, const char* what) {
    if (a.size() != b.size())
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

}  // namespace pndm

#endif  // PNDM_TYPES_HPP
