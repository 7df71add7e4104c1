#ifndef PNDM_ANALYSIS_HPP
#define PNDM_ANALYSIS_HPP

#include <array>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pndm/solvers.hpp"

namespace pndm {

// A fixed integration setup shared by a set of runs being compared.
struct OrderProblem {
    const Schedule* schedule{nullptr};
    const NoisePredictor* predictor{nullptr};
    double t_start{0.9};
    double t_end{0.1};
    StateVec x_init;
};

struct OrderPoint {
    double delta;
    double error;
};

struct OrderReport {
    std::string method;
    std::vector<OrderPoint> points;  // points that entered the fit
    int excluded_below_floor{0};     // errors under the fp floor, dropped
    double slope{0.0};
    std::string reference;
};

// Accepted global-error slope per method on the smooth toy study.
struct OrderWindow {
    double lo;
    double hi;  // infinity when only a lower bound applies
};
OrderWindow expected_order_window(Method m);

enum class ReferenceKind { Auto, ClassicalRk4, PseudoFPndm };

// High-resolution reference run at 100x the given resolution. Auto picks the
// classical reference on interior intervals and the pseudo one for runs
// touching t ~ 0, where the ODE is irregular.
Trajectory reference_trajectory(const OrderProblem& problem, double finest_delta,
                                ReferenceKind kind = ReferenceKind::Auto);

// Euclidean distance between the method's final state at the given step count
// and the reference final state.
double global_error(Method m, int steps, const OrderProblem& problem,
                    const Trajectory& reference);

// Ordinary least squares on log10-log10 points.
double fit_loglog_slope(const std::vector<std::array<double, 2>>& points);

// Runs the method over the delta list and fits the global-error slope. Errors
// below 1e-13 are excluded; fewer than 4 surviving points is an error.
OrderReport estimate_order(Method m, const std::vector<double>& deltas,
                           const OrderProblem& problem,
                           ReferenceKind reference = ReferenceKind::Auto);

// Delta set used by the default toy study: exact halvings spanning > 1 decade,
// small enough that every method sits in its asymptotic regime.
std::vector<double> default_order_deltas();

// Start point pinned for the default toy study.
StateVec default_toy_x_init();

struct ProbePoint {
    double t;
    double magnitude;
};

// Magnitude of the noise coefficient of the sampling ODE,
// |alpha_bar'(t)| / (2 alpha_bar(t) sqrt(1 - alpha_bar(t))), per listed time.
std::vector<ProbePoint> singularity_probe(const Schedule& schedule,
                                          const std::vector<double>& t_list);

struct NormBandPoint {
    double t;
    double q05;
    double q50;
    double q95;
};

using X0Sampler = std::function<StateVec(std::mt19937_64&)>;

// Per-time 5/50/95% quantiles of ||forward_diffuse(x0, eps, t)|| over seeded
// draws of (x0, eps). Needs n_samples >= 100.
std::vector<NormBandPoint> norm_band(const Schedule& schedule, const X0Sampler& x0_sampler,
                                     std::size_t dim, const std::vector<double>& t_grid,
                                     int n_samples, std::uint64_t seed);

// Ordered (x_t[i], x_t[j]) pairs over the trajectory.
std::vector<std::array<double, 2>> pixel_pair_curve(const Trajectory& traj, std::size_t i,
                                                    std::size_t j);

// Trajectory statistics bundle: per-step norms, the forward-process reference
// band on the same times, and one pixel-pair polyline.
struct TrajStats {
    std::vector<double> step_norms;
    std::vector<NormBandPoint> band;
    std::vector<std::array<double, 2>> pixel_pair;
};

TrajStats traj_stats(const Trajectory& traj, const Schedule& schedule,
                     const X0Sampler& x0_sampler, int n_samples, std::uint64_t seed,
                     std::size_t pixel_i, std::size_t pixel_j);

}  // namespace pndm

#endif  // PNDM_ANALYSIS_HPP
