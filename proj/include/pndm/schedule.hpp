#ifndef PNDM_SCHEDULE_HPP
#define PNDM_SCHEDULE_HPP

#include <vector>

#include "pndm/types.hpp"

namespace pndm {

enum class ScheduleKind { LinearBeta, Cosine, ToyLinear, Exponential };

// Variance schedule alpha_bar(t) on normalized time t in [0, 1].
//
// Kinds:
//   linear-beta  — discrete running product prod_{i<=k}(1 - beta_i) with a
//                  linearly spaced beta grid; continuous values come from
//                  log-linear interpolation between grid knots (exact at knots).
//   cosine       — alpha_bar(t) = cos^2(((t+s)/(1+s)) pi/2) / cos^2((s/(1+s)) pi/2).
//   toy-linear   — alpha_bar(t) = 1 - t.
//   exponential  — alpha_bar(t) = exp(a t^2 + b t); requires a decreasing choice
//                  of (a, b).
//
// Instances are immutable after construction and safe to share across threads.
class Schedule {
public:
    static Schedule linear_beta(double beta_start, double beta_end, int n_train);
    static Schedule cosine(double s = 0.008, int n_train = 1000);
    static Schedule toy_linear();
    static Schedule exponential(double a, double b, int n_train = 1000);

    ScheduleKind kind() const { return kind_; }
    int n_train() const { return n_train_; }

    // alpha_bar(t), t in [0, 1]. Throws std::domain_error outside the domain.
    double alpha_bar(double t) const;

    // Discrete-grid value at step index i in [0, n_train]. For linear-beta this
    // is the exact running product; continuous kinds evaluate at t = i/n_train.
    double alpha_bar_at_step(int i) const;

    // d(alpha_bar)/dt. Analytic for toy-linear and exponential; central finite
    // difference with step fd_step() for linear-beta and cosine, which therefore
    // reject t within fd_step() of the domain boundary.
    double alpha_bar_derivative(double t) const;

    bool has_analytic_derivative() const {
        return kind_ == ScheduleKind::ToyLinear || kind_ == ScheduleKind::Exponential;
    }

    static constexpr double fd_step() { return 1e-5; }

    // Exponential coefficients (only meaningful for that kind).
    double exp_a() const { return a_; }
    double exp_b() const { return b_; }

private:
    Schedule() = default;

    ScheduleKind kind_{ScheduleKind::ToyLinear};
    int n_train_{1000};
    double a_{0.0}, b_{0.0};  // exponential
    double s_{0.008};         // cosine offset
    double beta_start_{0.0}, beta_end_{0.0};
    std::vector<double> alpha_table_;      // linear-beta: alpha_bar at step i
    std::vector<double> log_alpha_table_;  // log of the above
};

// Strictly decreasing sampling times t_0 > t_1 > ... > t_S >= 0.
struct TimeGrid {
    std::vector<double> values;

    std::size_t step_count() const { return values.empty() ? 0 : values.size() - 1; }
    bool is_uniform(double rel_tol = 1e-9) const;
};

// S+1 uniformly spaced times from t_start down to t_end.
TimeGrid make_time_grid(const Schedule& schedule, int steps, double t_start, double t_end);

}  // namespace pndm

#endif  // PNDM_SCHEDULE_HPP
