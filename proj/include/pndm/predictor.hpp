#ifndef PNDM_PREDICTOR_HPP
#define PNDM_PREDICTOR_HPP

#include <memory>

#include "pndm/schedule.hpp"
#include "pndm/types.hpp"

namespace pndm {

// The gradient-part function eps(x, t). Implementations are stateless and
// deterministic; concurrent evaluation is fine.
class NoisePredictor {
public:
    virtual ~NoisePredictor() = default;
    virtual StateVec eval(const StateVec& x, double t) const = 0;
};

// eps(x) = (sin x[0], cos x[1]); dimension 2, independent of t.
class AnalyticToyPredictor final : public NoisePredictor {
public:
    StateVec eval(const StateVec& x, double t) const override;
};

// Recovers the exact noise given the clean point x0:
//   eps = (x - sqrt(alpha_bar) x0) / sqrt(1 - alpha_bar).
// Undefined where alpha_bar(t) = 1.
class ExactOraclePredictor final : public NoisePredictor {
public:
    ExactOraclePredictor(StateVec x0, const Schedule& schedule)
        : x0_(std::move(x0)), schedule_(&schedule) {}

    StateVec eval(const StateVec& x, double t) const override;

    const StateVec& x0() const { return x0_; }

private:
    StateVec x0_;
    const Schedule* schedule_;
};

// eps(x, t) = eps0 for all inputs.
class ConstantPredictor final : public NoisePredictor {
public:
    explicit ConstantPredictor(StateVec eps0) : eps0_(std::move(eps0)) {}

    StateVec eval(const StateVec&, double) const override { return eps0_; }

private:
    StateVec eps0_;
};

// x_t = sqrt(alpha_bar(t)) x0 + sqrt(1 - alpha_bar(t)) eps.
StateVec forward_diffuse(const StateVec& x0, const StateVec& eps, const Schedule& schedule,
                         double t);

// Free-function form of the oracle inversion (see ExactOraclePredictor).
StateVec exact_noise(const StateVec& x, double t, const StateVec& x0, const Schedule& schedule);

}  // namespace pndm

#endif  // PNDM_PREDICTOR_HPP
