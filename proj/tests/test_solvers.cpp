#include <cmath>
#include <random>

#include <doctest.h>

#include "pndm/solvers.hpp"

using namespace pndm;

namespace {

double rel_dist(const StateVec& a, const StateVec& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

// Transfer update written out directly, independent of the library path.
StateVec naive_phi(const StateVec& x, const StateVec& e, double ab, double ab_next) {
    StateVec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = std::sqrt(ab_next / ab) * x[i] -
                 (ab_next - ab) /
                     (std::sqrt(ab) *
                      (std::sqrt((1.0 - ab_next) * ab) + std::sqrt((1.0 - ab) * ab_next))) *
                     e[i];
    return out;
}

StateVec toy_eps(const StateVec& x) { return {std::sin(x[0]), std::cos(x[1])}; }

SamplerSpec toy_spec(Method m, int steps, const Schedule& s, const NoisePredictor& p,
                     double t_start = 0.9, double t_end = 0.1) {
    SamplerSpec spec;
    spec.method = m;
    spec.steps = steps;
    spec.grid = make_time_grid(s, steps, t_start, t_end);
    spec.schedule = &s;
    spec.predictor = &p;
    return spec;
}

}  // namespace

TEST_CASE("ode_rhs") {
    const Schedule s = Schedule::toy_linear();
    SUBCASE("toy-linear structure at t = 0.75") {
        // alpha_bar = 0.25, derivative -1: rhs = -(x/0.5 - eps/(0.5 sqrt(0.75))),
        // the toy slope form from the direct difference-quotient limit.
        const ConstantPredictor p(StateVec{1.0, 0.0});
        const StateVec rhs = ode_rhs({1.0, 1.0}, 0.75, p, s);
        CHECK(rhs[0] ==
              doctest::Approx(-(1.0 / 0.5 - 1.0 / (0.5 * std::sqrt(0.75)))).epsilon(1e-14));
        CHECK(rhs[1] == doctest::Approx(-(1.0 / 0.5)).epsilon(1e-14));
    }
    SUBCASE("constant-zero predictor leaves a linear field") {
        const ConstantPredictor zero(StateVec{0.0});
        const StateVec rhs = ode_rhs({3.0}, 0.5, zero, s);
        // alpha_bar' x / (2 alpha_bar) = -3.0 / (2 * 0.5)
        CHECK(rhs[0] == doctest::Approx(-3.0).epsilon(1e-14));
    }
    SUBCASE("exponential a = 0 collapses to (b/2)(x - eps/sqrt(1-ab))") {
        const double b = -1.3;
        const Schedule e = Schedule::exponential(0.0, b);
        const ConstantPredictor p(StateVec{0.4});
        const double t = 0.6;
        const double ab = e.alpha_bar(t);
        const StateVec rhs = ode_rhs({1.7}, t, p, e);
        CHECK(rhs[0] ==
              doctest::Approx((b / 2.0) * (1.7 - 0.4 / std::sqrt(1.0 - ab))).epsilon(1e-12));
    }
    SUBCASE("singular at alpha_bar in {0, 1}") {
        const ConstantPredictor p(StateVec{0.0});
        CHECK_THROWS_AS(ode_rhs({1.0}, 0.0, p, s), SingularTimeError);
        CHECK_THROWS_AS(ode_rhs({1.0}, 1.0, p, s), SingularTimeError);
    }
}

TEST_CASE("classical steps") {
    SUBCASE("zero field is a fixed point") {
        const Schedule s = Schedule::toy_linear();
        const ConstantPredictor zero(StateVec{0.0, 0.0});
        const StateVec x{0.0, 0.0};
        CHECK(euler_step(x, 0.5, -0.1, zero, s) == x);
        CHECK(rk4_step(x, 0.5, -0.1, zero, s) == x);
        const std::vector<StateVec> hist(3, StateVec{0.0, 0.0});
        CHECK(ab4_step(x, 0.5, -0.1, {hist.data(), 3}, zero, s) == x);
    }
    SUBCASE("rk4 reproduces the degree-4 Taylor polynomial on a linear field") {
        // exponential(a=0, b): rhs = (b/2) x with a zero predictor.
        const double b = -0.8;
        const Schedule s = Schedule::exponential(0.0, b);
        const ConstantPredictor zero(StateVec{0.0});
        const double lambda = b / 2.0;
        const double delta = -0.2;
        const double z = lambda * delta;
        const StateVec got = rk4_step({1.5}, 0.7, delta, zero, s);
        const double taylor =
            1.5 * (1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0);
        CHECK(got[0] == doctest::Approx(taylor).epsilon(1e-14));
    }
    SUBCASE("ab4 with equal history collapses to an euler step") {
        const Schedule s = Schedule::exponential(0.0, -1.0);
        const ConstantPredictor zero(StateVec{0.0});
        const double t = 0.4, delta = -0.05;
        // Arrange history equal to the rhs at (x, t) so the blend is exact.
        const StateVec x{2.0};
        const StateVec fstar = ode_rhs(x, t, zero, s);
        const std::vector<StateVec> hist(3, fstar);
        const StateVec got = ab4_step(x, t, delta, {hist.data(), 3}, zero, s);
        CHECK(got[0] == x[0] + delta * fstar[0]);
    }
    SUBCASE("ab4 needs exactly three history values") {
        const Schedule s = Schedule::toy_linear();
        const ConstantPredictor zero(StateVec{0.0});
        const std::vector<StateVec> hist(2, StateVec{0.0});
        CHECK_THROWS_AS(ab4_step({1.0}, 0.5, -0.1, {hist.data(), hist.size()}, zero, s),
                        std::invalid_argument);
    }
    SUBCASE("plms needs exactly three noise values") {
        const Schedule s = Schedule::toy_linear();
        const ConstantPredictor zero(StateVec{0.0});
        const std::vector<StateVec> hist(4, StateVec{0.0});
        CHECK_THROWS_AS(plms_step({1.0}, 0.5, -0.1, {hist.data(), hist.size()}, zero, s),
                        std::invalid_argument);
    }
}

TEST_CASE("pseudo steps against direct re-implementations") {
    const Schedule s = Schedule::toy_linear();
    const AnalyticToyPredictor predictor;
    const StateVec x{0.4, 0.7};
    const double t = 0.6, delta = -0.1;
    const double ab = 1.0 - t;

    SUBCASE("prk") {
        const auto [got, eps_first] = prk_step(x, t, delta, predictor, s);
        // Staged evaluations written out longhand.
        const double tm = t + delta / 2.0, te = t + delta;
        const StateVec e1 = toy_eps(x);
        const StateVec x1 = naive_phi(x, e1, ab, 1.0 - tm);
        const StateVec e2 = toy_eps(x1);
        const StateVec x2 = naive_phi(x, e2, ab, 1.0 - tm);
        const StateVec e3 = toy_eps(x2);
        const StateVec x3 = naive_phi(x, e3, ab, 1.0 - te);
        const StateVec e4 = toy_eps(x3);
        StateVec blend(2);
        for (std::size_t i = 0; i < 2; ++i)
            blend[i] = (e1[i] + 2.0 * e2[i] + 2.0 * e3[i] + e4[i]) / 6.0;
        const StateVec want = naive_phi(x, blend, ab, 1.0 - te);
        CHECK(rel_dist(got, want) <= 1e-14);
        CHECK(eps_first == e1);
    }
    SUBCASE("pie") {
        const auto [got, eps_first] = pie_step(x, t, delta, predictor, s);
        const double te = t + delta;
        const StateVec e1 = toy_eps(x);
        const StateVec x1 = naive_phi(x, e1, ab, 1.0 - te);
        const StateVec e2 = toy_eps(x1);
        StateVec blend(2);
        for (std::size_t i = 0; i < 2; ++i) blend[i] = (e1[i] + e2[i]) / 2.0;
        CHECK(rel_dist(got, naive_phi(x, blend, ab, 1.0 - te)) <= 1e-14);
        CHECK(eps_first == e1);
    }
    SUBCASE("plms") {
        const StateVec h1{0.11, -0.2}, h2{0.05, 0.3}, h3{-0.4, 0.9};
        const std::vector<StateVec> hist{h1, h2, h3};
        const auto [got, eps_t] = plms_step(x, t, delta, {hist.data(), 3}, predictor, s);
        const StateVec et = toy_eps(x);
        StateVec blend(2);
        for (std::size_t i = 0; i < 2; ++i)
            blend[i] = (55.0 * et[i] - 59.0 * h1[i] + 37.0 * h2[i] - 9.0 * h3[i]) / 24.0;
        CHECK(rel_dist(got, naive_phi(x, blend, ab, 1.0 - (t + delta))) <= 1e-14);
        CHECK(eps_t == et);
    }
    SUBCASE("plms2") {
        const StateVec prev{0.2, -0.6};
        const auto [got, eps_t] = plms2_step(x, t, delta, prev, predictor, s);
        const StateVec et = toy_eps(x);
        StateVec blend(2);
        for (std::size_t i = 0; i < 2; ++i) blend[i] = (3.0 * et[i] - prev[i]) / 2.0;
        CHECK(rel_dist(got, naive_phi(x, blend, ab, 1.0 - (t + delta))) <= 1e-14);
        CHECK(eps_t == et);
    }
}

TEST_CASE("plms blend arithmetic on scaled history") {
    // History (4e, 2e, e, e) blends to (130/24) e.
    const Schedule s = Schedule::toy_linear();
    const StateVec e{1.0, -2.0};
    StateVec e4(2), e2(2);
    for (std::size_t i = 0; i < 2; ++i) {
        e4[i] = 4.0 * e[i];
        e2[i] = 2.0 * e[i];
    }
    const ConstantPredictor predictor(e4);  // current evaluation returns 4e
    const std::vector<StateVec> hist{e2, e, e};
    const auto [got, eps_t] = plms_step({0.5, 0.5}, 0.6, -0.1, {hist.data(), 3}, predictor, s);
    StateVec blend(2);
    for (std::size_t i = 0; i < 2; ++i) blend[i] = 130.0 / 24.0 * e[i];
    const StateVec want = naive_phi({0.5, 0.5}, blend, 0.4, 0.5);
    CHECK(rel_dist(got, want) <= 1e-13);
    CHECK(eps_t == e4);
}

TEST_CASE("constant predictor collapses every pseudo step to ddim, bitwise") {
    const Schedule s = Schedule::cosine();
    const ConstantPredictor eps0(StateVec{0.371, -1.777});
    const StateVec x{1.03, 0.21};
    const double t = 0.55, delta = -0.07;
    const StateVec want = ddim_step(x, t, t + delta, eps0, s);
    const std::vector<StateVec> hist(3, eps0.eval(x, t));
    CHECK(prk_step(x, t, delta, eps0, s).x == want);
    CHECK(pie_step(x, t, delta, eps0, s).x == want);
    CHECK(plms_step(x, t, delta, {hist.data(), 3}, eps0, s).x == want);
    CHECK(plms2_step(x, t, delta, hist[0], eps0, s).x == want);
}

TEST_CASE("sample: reduction to ddim under a constant predictor, bitwise") {
    const Schedule s = Schedule::toy_linear();
    const ConstantPredictor eps0(StateVec{0.25, -0.5});
    const StateVec x_init{1.2, -0.4};
    const Trajectory ddim = sample(toy_spec(Method::Ddim, 8, s, eps0), x_init);
    const Trajectory spndm = sample(toy_spec(Method::SPndm, 8, s, eps0), x_init);
    const Trajectory fpndm = sample(toy_spec(Method::FPndm, 8, s, eps0), x_init);
    CHECK(ddim.states == spndm.states);
    CHECK(ddim.states == fpndm.states);
}

TEST_CASE("sample: exact oracle keeps every pseudo method on the manifold") {
    const Schedule s = Schedule::cosine();
    std::mt19937_64 rng(29);
    std::normal_distribution<double> normal(0.0, 1.0);
    StateVec x0(5);
    for (auto& v : x0) v = normal(rng);
    const ExactOraclePredictor oracle(x0, s);

    for (Method m : {Method::Ddim, Method::SPndm, Method::FPndm}) {
        const SamplerSpec spec = toy_spec(m, 12, s, oracle, 0.85, 0.0);
        StateVec eps(5);
        for (auto& v : eps) v = normal(rng);
        const StateVec x_init = forward_diffuse(x0, eps, s, 0.85);
        const Trajectory traj = sample(spec, x_init);
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            const StateVec want = forward_diffuse(x0, eps, s, traj.times[k]);
            CHECK(rel_dist(traj.states[k], want) <= 1e-10);
        }
        // Classical methods do not stay on the manifold (checked for rk4 below).
    }

    // The failure is clearest on toy-linear with the grid running toward the
    // irregular region near t = 0.
    const Schedule toy = Schedule::toy_linear();
    const ExactOraclePredictor toy_oracle(x0, toy);
    const SamplerSpec fon = toy_spec(Method::FonRk4, 12, toy, toy_oracle, 0.85, 1e-3);
    StateVec eps(5);
    for (auto& v : eps) v = normal(rng);
    const StateVec x_init = forward_diffuse(x0, eps, toy, 0.85);
    const Trajectory traj = sample(fon, x_init);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.states.size(); ++k)
        worst = std::max(worst,
                         rel_dist(traj.states[k], forward_diffuse(x0, eps, toy, traj.times[k])));
    CHECK(worst > 1e-10);
}

TEST_CASE("sample: predictor evaluation counts") {
    const Schedule s = Schedule::toy_linear();
    const AnalyticToyPredictor p;
    const StateVec x_init{0.3, 0.8};
    const int steps = 20;
    CHECK(sample(toy_spec(Method::Ddim, steps, s, p), x_init).predictor_eval_count == 20);
    CHECK(sample(toy_spec(Method::SPndm, steps, s, p), x_init).predictor_eval_count == 21);
    CHECK(sample(toy_spec(Method::FPndm, steps, s, p), x_init).predictor_eval_count == 29);
    CHECK(sample(toy_spec(Method::FonRk4, steps, s, p), x_init).predictor_eval_count == 80);
    CHECK(sample(toy_spec(Method::FonEuler, steps, s, p), x_init).predictor_eval_count == 20);
    CHECK(sample(toy_spec(Method::FonAb4, steps, s, p), x_init).predictor_eval_count == 29);
}

TEST_CASE("sample: trajectory bookkeeping") {
    const Schedule s = Schedule::toy_linear();
    const AnalyticToyPredictor p;
    const Trajectory traj = sample(toy_spec(Method::FPndm, 6, s, p), {0.3, 0.8});
    REQUIRE(traj.states.size() == 7);
    for (std::size_t k = 1; k < traj.times.size(); ++k) CHECK(traj.times[k] < traj.times[k - 1]);
    CHECK(traj.eval_counts.front() == 0);
    CHECK(traj.eval_counts.back() == traj.predictor_eval_count);
    CHECK(traj.eps_log.size() == traj.predictor_eval_count);
    // PRK phase logs 4 evaluations per step, the PLMS phase one.
    CHECK(traj.eval_counts[1] == 4);
    CHECK(traj.eval_counts[3] == 12);
    CHECK(traj.eval_counts[4] == 13);

    // The PIE warmup step costs 2, every later step 1.
    const Trajectory spndm = sample(toy_spec(Method::SPndm, 6, s, p), {0.3, 0.8});
    CHECK(spndm.eval_counts[1] == 2);
    CHECK(spndm.eval_counts[2] == 3);
}

TEST_CASE("sample: determinism") {
    const Schedule s = Schedule::cosine();
    const AnalyticToyPredictor p;
    const SamplerSpec spec = toy_spec(Method::FPndm, 15, s, p, 0.95, 0.0);
    const Trajectory a = sample(spec, {0.3, 0.8});
    const Trajectory b = sample(spec, {0.3, 0.8});
    CHECK(a.states == b.states);
    CHECK(a.eps_log == b.eps_log);
}

TEST_CASE("sample: spec validation") {
    const Schedule s = Schedule::toy_linear();
    const AnalyticToyPredictor p;
    SUBCASE("below the method minimum") {
        CHECK_THROWS_AS(sample(toy_spec(Method::FPndm, 3, s, p), {0.3, 0.8}), ConfigError);
        CHECK_THROWS_AS(sample(toy_spec(Method::SPndm, 1, s, p), {0.3, 0.8}), ConfigError);
        CHECK_THROWS_AS(sample(toy_spec(Method::FonAb4, 3, s, p), {0.3, 0.8}), ConfigError);
    }
    SUBCASE("grid size mismatch") {
        SamplerSpec spec = toy_spec(Method::Ddim, 5, s, p);
        spec.steps = 6;
        CHECK_THROWS_AS(sample(spec, {0.3, 0.8}), ConfigError);
    }
    SUBCASE("non-uniform grid rejected for multistep methods") {
        SamplerSpec spec = toy_spec(Method::FPndm, 4, s, p);
        spec.grid.values = {0.9, 0.7, 0.6, 0.3, 0.1};
        CHECK_THROWS_AS(sample(spec, {0.3, 0.8}), ConfigError);
        spec.method = Method::Ddim;  // single-step methods take any decreasing grid
        spec.steps = 4;
        CHECK_NOTHROW(sample(spec, {0.3, 0.8}));
    }
    SUBCASE("non-decreasing grid rejected") {
        SamplerSpec spec = toy_spec(Method::Ddim, 2, s, p);
        spec.grid.values = {0.9, 0.9, 0.1};
        CHECK_THROWS_AS(sample(spec, {0.3, 0.8}), ConfigError);
    }
}

TEST_CASE("sample: classical runs clamp the grid end away from t = 0") {
    const Schedule s = Schedule::toy_linear();
    const AnalyticToyPredictor p;
    SamplerSpec spec = toy_spec(Method::FonRk4, 10, s, p, 0.9, 0.0);
    const Trajectory traj = sample(spec, {0.3, 0.8});
    CHECK(traj.final_time() == 1e-3);
    REQUIRE(traj.states.size() == 11);

    // Pseudo methods run to t = 0 unclamped.
    const Trajectory ddim = sample(toy_spec(Method::Ddim, 10, s, p, 0.9, 0.0), {0.3, 0.8});
    CHECK(ddim.final_time() == 0.0);

    // The clamp is configurable and can be disabled.
    spec.fon_t_end_clamp = 0.0;
    spec.grid = make_time_grid(s, 10, 0.9, 0.01);
    const Trajectory free_run = sample(spec, {0.3, 0.8});
    CHECK(free_run.final_time() == 0.01);
}
