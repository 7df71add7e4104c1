#include "pndm/predictor.hpp"

#include <cmath>
#include <stdexcept>

namespace pndm {

StateVec AnalyticToyPredictor::eval(const StateVec& x, double /*t*/) const {
    if (x.size() != 2)
        throw std::invalid_argument("analytic-toy predictor needs dimension 2");
    return {std::sin(x[0]), std::cos(x[1])};
}

StateVec ExactOraclePredictor::eval(const StateVec& x, double t) const {
    return exact_noise(x, t, x0_, *schedule_);
}

StateVec forward_diffuse(const StateVec& x0, const StateVec& eps, const Schedule& schedule,
                         double t) {
    check_same_dim(x0, eps, "forward_diffuse");
    const double ab = schedule.alpha_bar(t);
    const double signal = std::sqrt(ab);
    const double noise = std::sqrt(1.0 - ab);
    StateVec out(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) out[i] = signal * x0[i] + noise * eps[i];
    return out;
}

StateVec exact_noise(const StateVec& x, double t, const StateVec& x0, const Schedule& schedule) {
    check_same_dim(x, x0, "exact_noise");
    const double ab = schedule.alpha_bar(t);
    if (ab == 1.0)
        throw SingularTimeError("exact noise undefined where alpha_bar(t) = 1");
    const double signal = std::sqrt(ab);
    const double noise = std::sqrt(1.0 - ab);
    StateVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - signal * x0[i]) / noise;
    return out;
}

}  // namespace pndm
