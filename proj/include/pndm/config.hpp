#ifndef PNDM_CONFIG_HPP
#define PNDM_CONFIG_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "pndm/predictor.hpp"
#include "pndm/schedule.hpp"
#include "pndm/types.hpp"

namespace pndm {

// Line-oriented key=value run configuration. '#' starts a comment, blank
// lines are skipped, keys must come from the known vocabulary and appear at
// most once. All violations raise ConfigError.
class RunConfig {
public:
    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    StateVec get_vector(const std::string& key) const;  // comma-separated reals

    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double_or(const std::string& key, double fallback) const;
    int get_int_or(const std::string& key, int fallback) const;

    void set(const std::string& key, const std::string& value);

    // Sorted view for config echoes in output headers.
    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

Schedule schedule_from_config(const RunConfig& config);
std::unique_ptr<NoisePredictor> predictor_from_config(const RunConfig& config,
                                                      const Schedule& schedule);

// Dimension of the state implied by the predictor configuration.
std::size_t predictor_dim_from_config(const RunConfig& config);

}  // namespace pndm

#endif  // PNDM_CONFIG_HPP
