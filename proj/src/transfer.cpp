#include "pndm/transfer.hpp"

#include <cmath>

namespace pndm {

StateVec phi(const StateVec& x, const StateVec& eps, double t, double t_next,
             const Schedule& schedule) {
    check_same_dim(x, eps, "phi");
    if (t_next == t) return x;

    const double ab = schedule.alpha_bar(t);
    const double ab_next = schedule.alpha_bar(t_next);
    if (ab == 0.0)
        throw SingularTimeError("transfer undefined where alpha_bar(t) = 0");
    if (ab == 1.0 && ab_next != ab)
        throw SingularTimeError("transfer rejected where alpha_bar(t) = 1");

    const double x_coeff = std::sqrt(ab_next / ab);
    const double denom =
        std::sqrt(ab) * (std::sqrt((1.0 - ab_next) * ab) + std::sqrt((1.0 - ab) * ab_next));
    const double eps_coeff = (ab_next - ab) / denom;

    StateVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x_coeff * x[i] - eps_coeff * eps[i];
    return out;
}

StateVec ddim_step(const StateVec& x, double t, double t_next, const NoisePredictor& predictor,
                   const Schedule& schedule) {
    return phi(x, predictor.eval(x, t), t, t_next, schedule);
}

}  // namespace pndm
