#include "pndm/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace pndm {

namespace {

constexpr std::array kKnownKeys = {
    "schedule.kind",        "schedule.params.beta_start", "schedule.params.beta_end",
    "schedule.params.n",    "schedule.params.s",          "schedule.params.a",
    "schedule.params.b",    "predictor.kind",             "predictor.x0",
    "predictor.eps0",       "sampler.method",             "sampler.steps",
    "sampler.seed",         "sampler.fon_t_end_clamp",    "grid.t_start",
    "grid.t_end",           "output.dir",                 "stats.samples",
    "stats.pixel_i",        "stats.pixel_j",
};

bool key_known(const std::string& key) {
    for (const char* k : kKnownKeys)
        if (key == k) return true;
    return false;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    double out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
    return out;
}

}  // namespace

RunConfig RunConfig::parse_string(const std::string& text) {
    RunConfig config;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key_known(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        if (config.values_.count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" +
                              key + "'");
        config.values_[key] = value;
    }
    return config;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

std::string RunConfig::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required config key '" + key + "'");
    return it->second;
}

double RunConfig::get_double(const std::string& key) const {
    return parse_double(key, get_string(key));
}

int RunConfig::get_int(const std::string& key) const {
    const double v = get_double(key);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("config key '" + key + "' must be an integer");
    return i;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
    const std::string v = trim(get_string(key));
    std::uint64_t out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError("config key '" + key + "': '" + v + "' is not a non-negative integer");
    return out;
}

StateVec RunConfig::get_vector(const std::string& key) const {
    const std::string raw = get_string(key);
    StateVec out;
    std::size_t start = 0;
    while (start <= raw.size()) {
        auto comma = raw.find(',', start);
        if (comma == std::string::npos) comma = raw.size();
        out.push_back(parse_double(key, raw.substr(start, comma - start)));
        start = comma + 1;
    }
    if (out.empty()) throw ConfigError("config key '" + key + "' is an empty vector");
    return out;
}

std::string RunConfig::get_string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double RunConfig::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int RunConfig::get_int_or(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (!key_known(key)) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
}

Schedule schedule_from_config(const RunConfig& config) {
    const std::string kind = config.get_string("schedule.kind");
    if (kind == "toy-linear") return Schedule::toy_linear();
    if (kind == "linear-beta")
        return Schedule::linear_beta(config.get_double_or("schedule.params.beta_start", 1e-4),
                                     config.get_double_or("schedule.params.beta_end", 0.02),
                                     config.get_int_or("schedule.params.n", 1000));
    if (kind == "cosine")
        return Schedule::cosine(config.get_double_or("schedule.params.s", 0.008),
                                config.get_int_or("schedule.params.n", 1000));
    if (kind == "exponential")
        return Schedule::exponential(config.get_double("schedule.params.a"),
                                     config.get_double("schedule.params.b"),
                                     config.get_int_or("schedule.params.n", 1000));
    throw ConfigError("unknown schedule.kind '" + kind + "'");
}

std::unique_ptr<NoisePredictor> predictor_from_config(const RunConfig& config,
                                                      const Schedule& schedule) {
    const std::string kind = config.get_string("predictor.kind");
    if (kind == "analytic-toy") return std::make_unique<AnalyticToyPredictor>();
    if (kind == "exact-oracle")
        return std::make_unique<ExactOraclePredictor>(config.get_vector("predictor.x0"),
                                                      schedule);
    if (kind == "constant")
        return std::make_unique<ConstantPredictor>(config.get_vector("predictor.eps0"));
    throw ConfigError("unknown predictor.kind '" + kind + "'");
}

std::size_t predictor_dim_from_config(const RunConfig& config) {
    const std::string kind = config.get_string("predictor.kind");
    if (kind == "analytic-toy") return 2;
    if (kind == "exact-oracle") return config.get_vector("predictor.x0").size();
    if (kind == "constant") return config.get_vector("predictor.eps0").size();
    throw ConfigError("unknown predictor.kind '" + kind + "'");
}

}  // namespace pndm
