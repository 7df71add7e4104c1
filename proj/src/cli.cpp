#include "pndm/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include <CLI11.hpp>

#include "pndm/analysis.hpp"
#include "pndm/csv.hpp"
#include "pndm/solvers.hpp"

namespace pndm {

namespace {

namespace fs = std::filesystem;

std::uint64_t resolve_seed(const RunConfig& config) {
    if (const char* env = std::getenv("PNDM_SEED")) {
        RunConfig override;
        override.set("sampler.seed", env);
        return override.get_u64("sampler.seed");
    }
    return config.get_u64("sampler.seed");
}

StateVec initial_noise(std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    StateVec x(dim);
    for (auto& v : x) v = normal(rng);
    return x;
}

std::ofstream open_output(const std::string& dir, const std::string& name,
                          const RunConfig& config) {
    fs::create_directories(dir);
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);  // '\n' line endings everywhere
    if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
    out << "# pndm " << kToolVersion << "\n";
    for (const auto& [k, v] : config.entries()) out << "# " << k << " = " << v << "\n";
    return out;
}

SamplerSpec build_sampler_spec(const RunConfig& config, const Schedule& schedule,
                               const NoisePredictor& predictor) {
    SamplerSpec spec;
    spec.method = method_from_name(config.get_string("sampler.method"));
    spec.steps = config.get_int("sampler.steps");
    spec.seed = resolve_seed(config);
    spec.fon_t_end_clamp = config.get_double_or("sampler.fon_t_end_clamp", 1e-3);
    spec.schedule = &schedule;
    spec.predictor = &predictor;
    if (spec.steps < 1) throw ConfigError("sampler.steps must be >= 1");
    spec.grid = make_time_grid(schedule, spec.steps, config.get_double("grid.t_start"),
                               config.get_double("grid.t_end"));
    return spec;
}

X0Sampler x0_sampler_from_config(const RunConfig& config, std::size_t dim) {
    if (config.has("predictor.x0")) {
        const StateVec x0 = config.get_vector("predictor.x0");
        return [x0](std::mt19937_64&) { return x0; };
    }
    return [dim](std::mt19937_64& rng) {
        std::normal_distribution<double> normal(0.0, 1.0);
        StateVec x0(dim);
        for (auto& v : x0) v = normal(rng);
        return x0;
    };
}

}  // namespace

int cmd_sample(const RunConfig& config, const std::string& out_dir, bool emit_eps) {
    const Schedule schedule = schedule_from_config(config);
    const auto predictor = predictor_from_config(config, schedule);
    const SamplerSpec spec = build_sampler_spec(config, schedule, *predictor);
    const StateVec x_init = initial_noise(predictor_dim_from_config(config), spec.seed);

    const auto start = std::chrono::steady_clock::now();
    const Trajectory traj = sample(spec, x_init);
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;

    const std::size_t dim = x_init.size();
    {
        auto out = open_output(out_dir, "trajectory.csv", config);
        out << "step,t,eval_count";
        for (std::size_t d = 0; d < dim; ++d) out << ",x_" << d;
        out << "\n";
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            out << k << "," << format_double(traj.times[k]) << "," << traj.eval_counts[k];
            for (double v : traj.states[k]) out << "," << format_double(v);
            out << "\n";
        }
    }
    if (emit_eps) {
        auto out = open_output(out_dir, "eps.csv", config);
        out << "eval_index,t";
        for (std::size_t d = 0; d < dim; ++d) out << ",e_" << d;
        out << "\n";
        for (std::size_t k = 0; k < traj.eps_log.size(); ++k) {
            out << k << "," << format_double(traj.eps_log[k].first);
            for (double v : traj.eps_log[k].second) out << "," << format_double(v);
            out << "\n";
        }
    }
    {
        auto out = open_output(out_dir, "run_manifest.txt", config);
        out << "method = " << method_name(spec.method) << "\n";
        out << "states = " << traj.states.size() << "\n";
        out << "predictor_evals = " << traj.predictor_eval_count << "\n";
        out << "wall_time_s = " << format_double(wall.count()) << "\n";
    }
    return 0;
}

int cmd_converge(const RunConfig& config, const std::string& out_dir) {
    // Fixed toy study: smooth interior interval where every method is regular.
    const Schedule schedule = Schedule::toy_linear();
    const AnalyticToyPredictor predictor;
    const OrderProblem problem{&schedule, &predictor, 0.9, 0.1, default_toy_x_init()};
    const std::vector<double> deltas = default_order_deltas();
    const Method methods[] = {Method::Ddim, Method::SPndm, Method::FPndm, Method::FonRk4};

    auto out = open_output(out_dir, "order_report.csv", config);
    out << "method,delta,error,slope\n";
    std::string reference;
    for (Method m : methods) {
        const OrderReport report = estimate_order(m, deltas, problem);
        reference = report.reference;
        for (const auto& p : report.points)
            out << report.method << "," << format_double(p.delta) << ","
                << format_double(p.error) << "," << format_double(report.slope) << "\n";
        const OrderWindow window = expected_order_window(m);
        const bool pass = report.slope >= window.lo && report.slope <= window.hi;
        std::printf("%-9s slope=%.3f window=[%.1f, %.1f] excluded=%d %s\n", report.method.c_str(),
                    report.slope, window.lo, window.hi, report.excluded_below_floor,
                    pass ? "PASS" : "FAIL");
    }
    std::printf("reference: %s\n", reference.c_str());
    // A FAIL row is a reported finding, not a run error; the command still
    // completed, so the exit status stays 0.
    return 0;
}

int cmd_probe(const RunConfig& config, const std::string& out_dir) {
    const Schedule schedule = schedule_from_config(config);
    if (schedule.kind() != ScheduleKind::Exponential &&
        schedule.kind() != ScheduleKind::LinearBeta)
        throw ConfigError("probe needs an exponential or linear-beta schedule");

    // Log-spaced times, descending toward 0. The linear-beta derivative is a
    // finite difference, so its range stays clear of the boundary stencil.
    const double t_max = 1e-2;
    const double t_min = schedule.kind() == ScheduleKind::Exponential ? 1e-6 : 1e-4;
    const int n_points = 25;
    std::vector<double> t_list(n_points);
    for (int k = 0; k < n_points; ++k)
        t_list[static_cast<std::size_t>(k)] =
            std::pow(10.0, std::log10(t_max) +
                               (std::log10(t_min) - std::log10(t_max)) * k / (n_points - 1));

    const auto points = singularity_probe(schedule, t_list);
    auto out = open_output(out_dir, "singularity.csv", config);
    out << "t,magnitude\n";
    std::vector<std::array<double, 2>> fit;
    for (const auto& p : points) {
        out << format_double(p.t) << "," << format_double(p.magnitude) << "\n";
        fit.push_back({p.t, p.magnitude});
    }
    const double slope = fit_loglog_slope(fit);
    const bool bounded = std::isfinite(points.back().magnitude) &&
                         points.back().magnitude <= 10.0 * points.front().magnitude;
    std::printf("slope=%.4f bounded=%s points=%d\n", slope, bounded ? "yes" : "no", n_points);
    return 0;
}

int cmd_stats(const RunConfig& config, const std::string& out_dir) {
    const Schedule schedule = schedule_from_config(config);
    const auto predictor = predictor_from_config(config, schedule);
    const SamplerSpec spec = build_sampler_spec(config, schedule, *predictor);
    const std::size_t dim = predictor_dim_from_config(config);
    const StateVec x_init = initial_noise(dim, spec.seed);
    const Trajectory traj = sample(spec, x_init);

    const int n_samples = config.get_int_or("stats.samples", 200);
    const auto pixel_i = static_cast<std::size_t>(config.get_int_or("stats.pixel_i", 0));
    const auto pixel_j = static_cast<std::size_t>(config.get_int_or("stats.pixel_j", 1));
    const TrajStats stats = traj_stats(traj, schedule, x0_sampler_from_config(config, dim),
                                       n_samples, spec.seed, pixel_i, pixel_j);

    {
        auto out = open_output(out_dir, "norm_band.csv", config);
        out << "t,q05,q50,q95,sample_norm\n";
        for (std::size_t k = 0; k < stats.band.size(); ++k)
            out << format_double(stats.band[k].t) << "," << format_double(stats.band[k].q05)
                << "," << format_double(stats.band[k].q50) << ","
                << format_double(stats.band[k].q95) << "," << format_double(stats.step_norms[k])
                << "\n";
    }
    {
        auto out = open_output(out_dir, "pixel_pair.csv", config);
        out << "step,yi,yj\n";
        for (std::size_t k = 0; k < stats.pixel_pair.size(); ++k)
            out << k << "," << format_double(stats.pixel_pair[k][0]) << ","
                << format_double(stats.pixel_pair[k][1]) << "\n";
    }
    return 0;
}

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"pseudo numerical methods toolkit for diffusion ODEs"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_flag;
    bool emit_eps = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file (key=value lines)")
            ->required();
        sub->add_option("--out", out_flag, "output directory (overrides output.dir)");
    };
    CLI::App* sub_sample = app.add_subcommand("sample", "run a sampler, write the trajectory");
    add_common(sub_sample);
    sub_sample->add_flag("--emit-eps", emit_eps, "also write every predictor evaluation");
    CLI::App* sub_converge =
        app.add_subcommand("converge", "fit global-error slopes on the toy study");
    add_common(sub_converge);
    CLI::App* sub_probe =
        app.add_subcommand("probe", "tabulate the ODE noise coefficient toward t = 0");
    add_common(sub_probe);
    CLI::App* sub_stats =
        app.add_subcommand("stats", "norm band and pixel-pair curve for one run");
    add_common(sub_stats);

    std::vector<const char*> argv;
    argv.push_back("pndm");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const RunConfig config = RunConfig::parse_file(config_path);
        std::string out_dir = out_flag;
        if (out_dir.empty()) out_dir = config.get_string_or("output.dir", "");
        if (out_dir.empty())
            throw ConfigError("no output directory: pass --out or set output.dir");

        if (sub_sample->parsed()) return cmd_sample(config, out_dir, emit_eps);
        if (sub_converge->parsed()) return cmd_converge(config, out_dir);
        if (sub_probe->parsed()) return cmd_probe(config, out_dir);
        return cmd_stats(config, out_dir);
    } catch (const SingularTimeError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

}  // namespace pndm
