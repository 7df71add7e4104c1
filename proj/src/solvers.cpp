#include "pndm/solvers.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pndm {

namespace {

// Blend weights are applied as offsets from the newest value so that equal
// history entries collapse to that value bitwise.
StateVec blend_lms4(const StateVec& e0, std::span<const StateVec> hist) {
    StateVec out(e0.size());
    for (std::size_t i = 0; i < e0.size(); ++i)
        out[i] = e0[i] + (-59.0 * (hist[0][i] - e0[i]) + 37.0 * (hist[1][i] - e0[i]) -
                          9.0 * (hist[2][i] - e0[i])) /
                             24.0;
    return out;
}

StateVec blend_rk4(const StateVec& e1, const StateVec& e2, const StateVec& e3,
                   const StateVec& e4) {
    StateVec out(e1.size());
    for (std::size_t i = 0; i < e1.size(); ++i)
        out[i] = e1[i] +
                 (2.0 * (e2[i] - e1[i]) + 2.0 * (e3[i] - e1[i]) + (e4[i] - e1[i])) / 6.0;
    return out;
}

StateVec blend_mean2(const StateVec& e1, const StateVec& e2) {
    StateVec out(e1.size());
    for (std::size_t i = 0; i < e1.size(); ++i) out[i] = e1[i] + (e2[i] - e1[i]) / 2.0;
    return out;
}

StateVec blend_lms2(const StateVec& e0, const StateVec& e_prev) {
    StateVec out(e0.size());
    for (std::size_t i = 0; i < e0.size(); ++i) out[i] = e0[i] + (e0[i] - e_prev[i]) / 2.0;
    return out;
}

StateVec axpy(const StateVec& x, double a, const StateVec& y) {
    StateVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * y[i];
    return out;
}

// Forwards evaluations to the wrapped predictor while recording each one on
// the trajectory.
class EvalRecorder final : public NoisePredictor {
public:
    EvalRecorder(const NoisePredictor& inner, Trajectory& traj) : inner_(&inner), traj_(&traj) {}

    StateVec eval(const StateVec& x, double t) const override {
        StateVec e = inner_->eval(x, t);
        traj_->eps_log.emplace_back(t, e);
        ++traj_->predictor_eval_count;
        return e;
    }

private:
    const NoisePredictor* inner_;
    Trajectory* traj_;
};

}  // namespace

const char* method_name(Method m) {
    switch (m) {
        case Method::Ddim: return "DDIM";
        case Method::FonEuler: return "FON-EULER";
        case Method::FonRk4: return "FON-RK4";
        case Method::FonAb4: return "FON-AB4";
        case Method::SPndm: return "S-PNDM";
        case Method::FPndm: return "F-PNDM";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "DDIM") return Method::Ddim;
    if (name == "FON-EULER") return Method::FonEuler;
    if (name == "FON-RK4") return Method::FonRk4;
    if (name == "FON-AB4") return Method::FonAb4;
    if (name == "S-PNDM") return Method::SPndm;
    if (name == "F-PNDM") return Method::FPndm;
    throw ConfigError("unknown method '" + name + "'");
}

int method_min_steps(Method m) {
    switch (m) {
        case Method::FPndm:
        case Method::FonAb4: return 4;
        case Method::SPndm: return 2;
        default: return 1;
    }
}

bool method_is_fon(Method m) {
    return m == Method::FonEuler || m == Method::FonRk4 || m == Method::FonAb4;
}

bool method_is_multistep(Method m) {
    return m == Method::FPndm || m == Method::SPndm || m == Method::FonAb4;
}

StateVec ode_rhs(const StateVec& x, double t, const NoisePredictor& predictor,
                 const Schedule& schedule) {
    const double ab = schedule.alpha_bar(t);
    if (ab == 0.0 || ab == 1.0)
        throw SingularTimeError("ode rhs undefined where alpha_bar(t) is 0 or 1");
    const double dab = schedule.alpha_bar_derivative(t);
    const StateVec e = predictor.eval(x, t);
    const double noise = std::sqrt(1.0 - ab);
    StateVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = dab * (x[i] / (2.0 * ab) - e[i] / (2.0 * ab * noise));
    return out;
}

StateVec euler_step(const StateVec& x, double t, double delta, const NoisePredictor& predictor,
                    const Schedule& schedule) {
    return axpy(x, delta, ode_rhs(x, t, predictor, schedule));
}

StateVec rk4_step(const StateVec& x, double t, double delta, const NoisePredictor& predictor,
                  const Schedule& schedule, StateVec* slope_at_t) {
    const double half = 0.5 * delta;
    const StateVec k1 = ode_rhs(x, t, predictor, schedule);
    const StateVec k2 = ode_rhs(axpy(x, half, k1), t + half, predictor, schedule);
    const StateVec k3 = ode_rhs(axpy(x, half, k2), t + half, predictor, schedule);
    const StateVec k4 = ode_rhs(axpy(x, delta, k3), t + delta, predictor, schedule);
    StateVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = x[i] + delta / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (slope_at_t) *slope_at_t = k1;
    return out;
}

StateVec ab4_step(const StateVec& x, double t, double delta,
                  std::span<const StateVec> rhs_history, const NoisePredictor& predictor,
                  const Schedule& schedule, StateVec* slope_at_t) {
    if (rhs_history.size() != 3)
        throw std::invalid_argument("ab4 warmup: need exactly 3 prior rhs values, got " +
                                    std::to_string(rhs_history.size()));
    const StateVec ft = ode_rhs(x, t, predictor, schedule);
    const StateVec fbar = blend_lms4(ft, rhs_history);
    if (slope_at_t) *slope_at_t = ft;
    return axpy(x, delta, fbar);
}

StepResult prk_step(const StateVec& x, double t, double delta, const NoisePredictor& predictor,
                    const Schedule& schedule) {
    const double t_mid = t + 0.5 * delta;
    const double t_end = t + delta;
    StateVec e1 = predictor.eval(x, t);
    const StateVec x1 = phi(x, e1, t, t_mid, schedule);
    const StateVec e2 = predictor.eval(x1, t_mid);
    const StateVec x2 = phi(x, e2, t, t_mid, schedule);
    const StateVec e3 = predictor.eval(x2, t_mid);
    const StateVec x3 = phi(x, e3, t, t_end, schedule);
    const StateVec e4 = predictor.eval(x3, t_end);
    const StateVec blended = blend_rk4(e1, e2, e3, e4);
    return {phi(x, blended, t, t_end, schedule), std::move(e1)};
}

StepResult pie_step(const StateVec& x, double t, double delta, const NoisePredictor& predictor,
                    const Schedule& schedule) {
    const double t_end = t + delta;
    StateVec e1 = predictor.eval(x, t);
    const StateVec x1 = phi(x, e1, t, t_end, schedule);
    const StateVec e2 = predictor.eval(x1, t_end);
    const StateVec blended = blend_mean2(e1, e2);
    return {phi(x, blended, t, t_end, schedule), std::move(e1)};
}

StepResult plms_step(const StateVec& x, double t, double delta,
                     std::span<const StateVec> eps_history, const NoisePredictor& predictor,
                     const Schedule& schedule) {
    if (eps_history.size() != 3)
        throw std::invalid_argument("plms warmup: need exactly 3 prior noise values, got " +
                                    std::to_string(eps_history.size()));
    StateVec et = predictor.eval(x, t);
    const StateVec blended = blend_lms4(et, eps_history);
    return {phi(x, blended, t, t + delta, schedule), std::move(et)};
}

StepResult plms2_step(const StateVec& x, double t, double delta, const StateVec& eps_prev,
                      const NoisePredictor& predictor, const Schedule& schedule) {
    StateVec et = predictor.eval(x, t);
    const StateVec blended = blend_lms2(et, eps_prev);
    return {phi(x, blended, t, t + delta, schedule), std::move(et)};
}

namespace {

TimeGrid validated_grid(const SamplerSpec& spec) {
    if (!spec.schedule || !spec.predictor)
        throw ConfigError("sampler spec needs a schedule and a predictor");
    if (spec.steps < method_min_steps(spec.method))
        throw ConfigError(std::string(method_name(spec.method)) + " needs at least " +
                          std::to_string(method_min_steps(spec.method)) + " steps, got " +
                          std::to_string(spec.steps));
    const auto& v = spec.grid.values;
    if (v.size() != static_cast<std::size_t>(spec.steps) + 1)
        throw ConfigError("grid has " + std::to_string(v.size()) + " times, expected steps+1 = " +
                          std::to_string(spec.steps + 1));
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) throw ConfigError("grid times must be strictly decreasing");
    if (!(v.back() >= 0.0 && v.front() <= 1.0))
        throw ConfigError("grid times must lie in [0, 1]");
    if (method_is_multistep(spec.method) && !spec.grid.is_uniform())
        throw ConfigError(std::string(method_name(spec.method)) +
                          " needs a uniform grid (multistep history spacing)");

    TimeGrid grid = spec.grid;
    if (method_is_fon(spec.method) && spec.fon_t_end_clamp > 0.0 &&
        grid.values.back() < spec.fon_t_end_clamp) {
        std::fprintf(stderr,
                     "warning: %s grid end %.6g clamped to %.6g (ode unbounded toward t = 0)\n",
                     method_name(spec.method), grid.values.back(), spec.fon_t_end_clamp);
        grid = make_time_grid(*spec.schedule, spec.steps, grid.values.front(),
                              spec.fon_t_end_clamp);
    }
    return grid;
}

}  // namespace

Trajectory sample(const SamplerSpec& spec, const StateVec& x_init) {
    if (x_init.empty()) throw ConfigError("initial state is empty");
    for (double v : x_init)
        if (!std::isfinite(v)) throw ConfigError("initial state has non-finite entries");

    const TimeGrid grid = validated_grid(spec);
    const Schedule& sched = *spec.schedule;
    const auto& g = grid.values;
    const auto steps = static_cast<std::size_t>(spec.steps);

    Trajectory traj;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.eval_counts.reserve(steps + 1);
    const EvalRecorder rec(*spec.predictor, traj);

    StateVec x = x_init;
    traj.times.push_back(g[0]);
    traj.states.push_back(x);
    traj.eval_counts.push_back(0);

    std::vector<StateVec> history;  // most recent first (eps for pseudo, rhs for ab4)
    auto push_history = [&history](StateVec v) {
        history.insert(history.begin(), std::move(v));
        if (history.size() > 3) history.pop_back();
    };

    for (std::size_t k = 0; k < steps; ++k) {
        const double t = g[k];
        const double delta = g[k + 1] - t;
        switch (spec.method) {
            case Method::Ddim:
                x = ddim_step(x, t, g[k + 1], rec, sched);
                break;
            case Method::FonEuler:
                x = euler_step(x, t, delta, rec, sched);
                break;
            case Method::FonRk4:
                x = rk4_step(x, t, delta, rec, sched);
                break;
            case Method::FonAb4: {
                StateVec slope;
                x = k < 3 ? rk4_step(x, t, delta, rec, sched, &slope)
                          : ab4_step(x, t, delta, {history.data(), 3}, rec, sched, &slope);
                push_history(std::move(slope));
                break;
            }
            case Method::SPndm: {
                StepResult r = k == 0 ? pie_step(x, t, delta, rec, sched)
                                      : plms2_step(x, t, delta, history[0], rec, sched);
                x = std::move(r.x);
                push_history(std::move(r.eps));
                break;
            }
            case Method::FPndm: {
                StepResult r = k < 3 ? prk_step(x, t, delta, rec, sched)
                                     : plms_step(x, t, delta, {history.data(), 3}, rec, sched);
                x = std::move(r.x);
                push_history(std::move(r.eps));
                break;
            }
        }
        traj.times.push_back(g[k + 1]);
        traj.states.push_back(x);
        traj.eval_counts.push_back(traj.predictor_eval_count);
    }
    return traj;
}

}  // namespace pndm
