#ifndef PNDM_SOLVERS_HPP
#define PNDM_SOLVERS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pndm/predictor.hpp"
#include "pndm/schedule.hpp"
#include "pndm/transfer.hpp"
#include "pndm/types.hpp"

namespace pndm {

enum class Method { Ddim, FonEuler, FonRk4, FonAb4, SPndm, FPndm };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

// Smallest admissible step count (warmup needs).
int method_min_steps(Method m);

// Classical fourth-order-style methods integrating the derived ODE directly.
bool method_is_fon(Method m);

// Methods whose gradient part blends several history entries; these require a
// uniform time grid.
bool method_is_multistep(Method m);

// Fully determines a deterministic run.
struct SamplerSpec {
    Method method{Method::Ddim};
    int steps{0};
    TimeGrid grid;
    std::uint64_t seed{0};
    const Schedule* schedule{nullptr};
    const NoisePredictor* predictor{nullptr};
    // Classical methods stop above this time by default because the ODE blows
    // up toward t = 0 on most schedules; set <= 0 to disable.
    double fon_t_end_clamp{1e-3};
};

// Ordered record of a run: every landed state plus every predictor evaluation.
struct Trajectory {
    std::vector<double> times;
    std::vector<StateVec> states;
    std::vector<std::size_t> eval_counts;  // cumulative, aligned with states
    std::vector<std::pair<double, StateVec>> eps_log;
    std::size_t predictor_eval_count{0};

    std::size_t step_count() const { return states.empty() ? 0 : states.size() - 1; }
    const StateVec& final_state() const { return states.back(); }
    double final_time() const { return times.back(); }
};

// Right-hand side of the derived sampling ODE, in forward-normalized time
// (alpha_bar decreasing, so alpha_bar' < 0):
//   dx/dt = alpha_bar'(t) (x / (2 ab) - eps(x, t) / (2 ab sqrt(1 - ab))).
// Equivalently (1/2) (2at + b) (x - eps / sqrt(1 - ab)) on exp(at^2 + bt)
// schedules. Requires 0 < alpha_bar(t) < 1.
StateVec ode_rhs(const StateVec& x, double t, const NoisePredictor& predictor,
                 const Schedule& schedule);

// Classical updates on ode_rhs. All step routines take the signed increment
// delta = t_target - t_current, so the same code serves the sampling direction
// (delta < 0) and the re-noising direction.
StateVec euler_step(const StateVec& x, double t, double delta, const NoisePredictor& predictor,
                    const Schedule& schedule);

// slope_at_t, when given, receives the rhs evaluated at (x, t) so callers can
// seed multistep history without a second evaluation.
StateVec rk4_step(const StateVec& x, double t, double delta, const NoisePredictor& predictor,
                  const Schedule& schedule, StateVec* slope_at_t = nullptr);

// rhs_history holds the three prior slopes, most recent first, at spacing delta.
StateVec ab4_step(const StateVec& x, double t, double delta,
                  std::span<const StateVec> rhs_history, const NoisePredictor& predictor,
                  const Schedule& schedule, StateVec* slope_at_t = nullptr);

// Pseudo steps return the new state plus the noise value that feeds subsequent
// linear-multistep blends (the evaluation at the step's own time).
struct StepResult {
    StateVec x;
    StateVec eps;
};

// Four staged evaluations blended with weights (1, 2, 2, 1)/6, every stage
// transferred through phi.
StepResult prk_step(const StateVec& x, double t, double delta, const NoisePredictor& predictor,
                    const Schedule& schedule);

// Two staged evaluations blended with weights (1, 1)/2.
StepResult pie_step(const StateVec& x, double t, double delta, const NoisePredictor& predictor,
                    const Schedule& schedule);

// Four-step linear-multistep blend (55, -59, 37, -9)/24; eps_history holds the
// three prior noise values, most recent first, at spacing delta.
StepResult plms_step(const StateVec& x, double t, double delta,
                     std::span<const StateVec> eps_history, const NoisePredictor& predictor,
                     const Schedule& schedule);

// Two-step blend (3, -1)/2 with one prior noise value.
StepResult plms2_step(const StateVec& x, double t, double delta, const StateVec& eps_prev,
                      const NoisePredictor& predictor, const Schedule& schedule);

// Runs the full sampling loop for the spec's method, including warmup
// (F-PNDM: three prk steps, S-PNDM: one pie step, FON-AB4: three rk4 steps).
Trajectory sample(const SamplerSpec& spec, const StateVec& x_init);

}  // namespace pndm

#endif  // PNDM_SOLVERS_HPP
