#include "pndm/schedule.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pndm {

namespace {

void check_domain(double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw std::domain_error("schedule time " + std::to_string(t) + " outside [0, 1]");
}

double cosine_raw(double t, double s) {
    const double arg = ((t + s) / (1.0 + s)) * std::numbers::pi / 2.0;
    const double c = std::cos(arg);
    return c * c;
}

}  // namespace

Schedule Schedule::linear_beta(double beta_start, double beta_end, int n_train) {
    if (n_train < 1)
        throw std::invalid_argument("linear-beta: n_train must be >= 1");
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0))
        throw std::invalid_argument("linear-beta: need 0 < beta_start <= beta_end < 1");

    Schedule s;
    s.kind_ = ScheduleKind::LinearBeta;
    s.n_train_ = n_train;
    s.beta_start_ = beta_start;
    s.beta_end_ = beta_end;

    s.alpha_table_.resize(static_cast<std::size_t>(n_train) + 1);
    s.log_alpha_table_.resize(s.alpha_table_.size());
    s.alpha_table_[0] = 1.0;  // before any noising
    s.log_alpha_table_[0] = 0.0;
    double prod = 1.0;
    for (int i = 1; i <= n_train; ++i) {
        const double beta =
            n_train == 1 ? beta_start
                         : beta_start + (beta_end - beta_start) * (i - 1) / (n_train - 1);
        prod *= 1.0 - beta;
        s.alpha_table_[static_cast<std::size_t>(i)] = prod;
        s.log_alpha_table_[static_cast<std::size_t>(i)] = std::log(prod);
    }
    return s;
}

Schedule Schedule::cosine(double s_offset, int n_train) {
    if (!(s_offset > 0.0))
        throw std::invalid_argument("cosine: offset s must be > 0");
    if (n_train < 1)
        throw std::invalid_argument("cosine: n_train must be >= 1");
    Schedule s;
    s.kind_ = ScheduleKind::Cosine;
    s.n_train_ = n_train;
    s.s_ = s_offset;
    return s;
}

Schedule Schedule::toy_linear() {
    Schedule s;
    s.kind_ = ScheduleKind::ToyLinear;
    s.n_train_ = 1000;
    return s;
}

Schedule Schedule::exponential(double a, double b, int n_train) {
    // alpha_bar'(t) = (2at + b) alpha_bar(t); strict decrease on (0, 1] needs
    // 2at + b <= 0 at both endpoints and the coefficients not both zero.
    if (!(b <= 0.0 && 2.0 * a + b <= 0.0) || (a == 0.0 && b == 0.0))
        throw std::invalid_argument("exponential: (a, b) must give a decreasing alpha_bar");
    if (n_train < 1)
        throw std::invalid_argument("exponential: n_train must be >= 1");
    Schedule s;
    s.kind_ = ScheduleKind::Exponential;
    s.n_train_ = n_train;
    s.a_ = a;
    s.b_ = b;
    return s;
}

double Schedule::alpha_bar(double t) const {
    check_domain(t);
    switch (kind_) {
        case ScheduleKind::ToyLinear:
            return 1.0 - t;
        case ScheduleKind::Exponential:
            return std::exp((a_ * t + b_) * t);
        case ScheduleKind::Cosine:
            return cosine_raw(t, s_) / cosine_raw(0.0, s_);
        case ScheduleKind::LinearBeta: {
            const double u = t * n_train_;
            const auto lo = static_cast<std::size_t>(u);
            // Snap to the table at grid knots so discrete queries are exact.
            const double nearest = std::round(u);
            if (std::abs(u - nearest) < 1e-9)
                return alpha_table_[static_cast<std::size_t>(nearest)];
            const double frac = u - static_cast<double>(lo);
            return std::exp(std::lerp(log_alpha_table_[lo], log_alpha_table_[lo + 1], frac));
        }
    }
    throw std::logic_error("unreachable schedule kind");
}

double Schedule::alpha_bar_at_step(int i) const {
    if (i < 0 || i > n_train_)
        throw std::domain_error("step index " + std::to_string(i) + " outside [0, n_train]");
    if (kind_ == ScheduleKind::LinearBeta)
        return alpha_table_[static_cast<std::size_t>(i)];
    return alpha_bar(static_cast<double>(i) / n_train_);
}

double Schedule::alpha_bar_derivative(double t) const {
    check_domain(t);
    switch (kind_) {
        case ScheduleKind::ToyLinear:
            return -1.0;
        case ScheduleKind::Exponential:
            return (2.0 * a_ * t + b_) * std::exp((a_ * t + b_) * t);
        case ScheduleKind::Cosine:
        case ScheduleKind::LinearBeta: {
            const double h = fd_step();
            if (t - h < 0.0 || t + h > 1.0)
                throw std::domain_error("finite-difference derivative needs t in [h, 1-h]");
            return (alpha_bar(t + h) - alpha_bar(t - h)) / (2.0 * h);
        }
    }
    throw std::logic_error("unreachable schedule kind");
}

bool TimeGrid::is_uniform(double rel_tol) const {
    if (values.size() < 3) return true;
    const double d0 = values[1] - values[0];
    for (std::size_t i = 2; i < values.size(); ++i) {
        const double d = values[i] - values[i - 1];
        if (std::abs(d - d0) > rel_tol * std::max(1.0, std::abs(d0))) return false;
    }
    return true;
}

TimeGrid make_time_grid(const Schedule&, int steps, double t_start, double t_end) {
    if (steps < 1)
        throw std::invalid_argument("time grid needs at least one step");
    if (!(t_start > t_end))
        throw std::invalid_argument("time grid needs t_start > t_end");
    if (!(t_end >= 0.0))
        throw std::invalid_argument("time grid needs t_end >= 0");
    check_domain(t_start);

    TimeGrid grid;
    grid.values.resize(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i)
        grid.values[static_cast<std::size_t>(i)] =
            t_start + (t_end - t_start) * (static_cast<double>(i) / steps);
    grid.values.front() = t_start;
    grid.values.back() = t_end;
    return grid;
}

}  // namespace pndm
