#include "pndm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pndm {

namespace {

constexpr double kErrorFloor = 1e-13;

Trajectory run_method(Method m, int steps, const OrderProblem& p) {
    SamplerSpec spec;
    spec.method = m;
    spec.steps = steps;
    spec.grid = make_time_grid(*p.schedule, steps, p.t_start, p.t_end);
    spec.schedule = p.schedule;
    spec.predictor = p.predictor;
    return sample(spec, p.x_init);
}

int steps_for_delta(const OrderProblem& p, double delta) {
    const double range = p.t_start - p.t_end;
    if (!(delta > 0.0) || delta > range)
        throw std::invalid_argument("delta must lie in (0, t_start - t_end]");
    return static_cast<int>(std::llround(range / delta));
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return std::lerp(sorted[lo], sorted[hi], frac);
}

}  // namespace

OrderWindow expected_order_window(Method m) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (m) {
        case Method::Ddim:
        case Method::FonEuler: return {0.8, 1.3};
        case Method::SPndm:
        case Method::FPndm: return {1.7, 2.6};
        case Method::FonRk4:
        case Method::FonAb4: return {3.5, inf};
    }
    return {0.0, inf};
}

Trajectory reference_trajectory(const OrderProblem& problem, double finest_delta,
                                ReferenceKind kind) {
    if (kind == ReferenceKind::Auto)
        kind = problem.t_end >= 0.05 ? ReferenceKind::ClassicalRk4 : ReferenceKind::PseudoFPndm;
    const int steps = steps_for_delta(problem, finest_delta / 100.0);
    return run_method(kind == ReferenceKind::ClassicalRk4 ? Method::FonRk4 : Method::FPndm,
                      steps, problem);
}

double global_error(Method m, int steps, const OrderProblem& problem,
                    const Trajectory& reference) {
    if (std::abs(reference.times.front() - problem.t_start) > 1e-12 ||
        std::abs(reference.final_time() - problem.t_end) > 1e-12)
        throw std::invalid_argument("reference trajectory covers a different time range");
    if (reference.final_state().size() != problem.x_init.size())
        throw std::invalid_argument("reference trajectory has a different dimension");

    const Trajectory traj = run_method(m, steps, problem);
    const StateVec& a = traj.final_state();
    const StateVec& b = reference.final_state();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double fit_loglog_slope(const std::vector<std::array<double, 2>>& points) {
    if (points.size() < 2)
        throw std::invalid_argument("slope fit needs at least 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : points) {
        const double lx = std::log10(x);
        const double ly = std::log10(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const auto n = static_cast<double>(points.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

OrderReport estimate_order(Method m, const std::vector<double>& deltas,
                           const OrderProblem& problem, ReferenceKind reference) {
    if (deltas.empty()) throw std::invalid_argument("empty delta list");
    const double finest = *std::min_element(deltas.begin(), deltas.end());
    const Trajectory ref = reference_trajectory(problem, finest, reference);

    OrderReport report;
    report.method = method_name(m);
    report.reference =
        (reference == ReferenceKind::PseudoFPndm ||
         (reference == ReferenceKind::Auto && problem.t_end < 0.05))
            ? "F-PNDM at 100x finest resolution"
            : "FON-RK4 at 100x finest resolution";

    std::vector<std::array<double, 2>> fit_points;
    for (double delta : deltas) {
        const double err = global_error(m, steps_for_delta(problem, delta), problem, ref);
        if (err < kErrorFloor) {
            ++report.excluded_below_floor;
            continue;
        }
        report.points.push_back({delta, err});
        fit_points.push_back({delta, err});
    }
    if (fit_points.size() < 4)
        throw std::runtime_error("insufficient data: only " +
                                 std::to_string(fit_points.size()) +
                                 " usable error points above the fp floor");
    double dmin = fit_points.front()[0], dmax = dmin;
    for (const auto& p : fit_points) {
        dmin = std::min(dmin, p[0]);
        dmax = std::max(dmax, p[0]);
    }
    if (dmax / dmin < 10.0)
        throw std::runtime_error("insufficient data: surviving deltas span less than a decade");
    report.slope = fit_loglog_slope(fit_points);
    return report;
}

std::vector<double> default_order_deltas() { return {0.02, 0.01, 0.005, 0.0025, 0.00125}; }

StateVec default_toy_x_init() { return {0.42, 0.25}; }

std::vector<ProbePoint> singularity_probe(const Schedule& schedule,
                                          const std::vector<double>& t_list) {
    std::vector<ProbePoint> out;
    out.reserve(t_list.size());
    for (double t : t_list) {
        if (t == 0.0)
            throw SingularTimeError("singularity probe undefined at t = 0 exactly");
        const double ab = schedule.alpha_bar(t);
        const double dab = schedule.alpha_bar_derivative(t);
        out.push_back({t, std::abs(dab) / (2.0 * ab * std::sqrt(1.0 - ab))});
    }
    return out;
}

std::vector<NormBandPoint> norm_band(const Schedule& schedule, const X0Sampler& x0_sampler,
                                     std::size_t dim, const std::vector<double>& t_grid,
                                     int n_samples, std::uint64_t seed) {
    if (n_samples < 100)
        throw std::invalid_argument("norm band needs n_samples >= 100");
    if (dim == 0) throw std::invalid_argument("norm band needs dim >= 1");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    // One forward trajectory per sampled (x0, eps) pair.
    std::vector<std::vector<double>> norms(t_grid.size());
    for (auto& v : norms) v.reserve(static_cast<std::size_t>(n_samples));
    for (int s = 0; s < n_samples; ++s) {
        const StateVec x0 = x0_sampler(rng);
        if (x0.size() != dim)
            throw std::invalid_argument("x0 sampler returned wrong dimension");
        StateVec eps(dim);
        for (auto& e : eps) e = normal(rng);
        for (std::size_t k = 0; k < t_grid.size(); ++k)
            norms[k].push_back(norm2(forward_diffuse(x0, eps, schedule, t_grid[k])));
    }

    std::vector<NormBandPoint> band(t_grid.size());
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        std::sort(norms[k].begin(), norms[k].end());
        band[k] = {t_grid[k], quantile_sorted(norms[k], 0.05), quantile_sorted(norms[k], 0.50),
                   quantile_sorted(norms[k], 0.95)};
    }
    return band;
}

std::vector<std::array<double, 2>> pixel_pair_curve(const Trajectory& traj, std::size_t i,
                                                    std::size_t j) {
    if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
    const std::size_t dim = traj.states.front().size();
    if (i >= dim || j >= dim)
        throw std::out_of_range("pixel index out of range for dimension " + std::to_string(dim));
    std::vector<std::array<double, 2>> out;
    out.reserve(traj.states.size());
    for (const auto& x : traj.states) out.push_back({x[i], x[j]});
    return out;
}

TrajStats traj_stats(const Trajectory& traj, const Schedule& schedule,
                     const X0Sampler& x0_sampler, int n_samples, std::uint64_t seed,
                     std::size_t pixel_i, std::size_t pixel_j) {
    TrajStats stats;
    stats.step_norms.reserve(traj.states.size());
    for (const auto& x : traj.states) stats.step_norms.push_back(norm2(x));
    stats.band = norm_band(schedule, x0_sampler, traj.states.front().size(), traj.times,
                           n_samples, seed);
    stats.pixel_pair = pixel_pair_curve(traj, pixel_i, pixel_j);
    return stats;
}

}  // namespace pndm
