#ifndef PNDM_CLI_HPP
#define PNDM_CLI_HPP

#include <string>
#include <vector>

#include "pndm/config.hpp"

namespace pndm {

inline constexpr const char* kToolVersion = "0.1.0";

// Command entry points. Each writes its output files under out_dir and
// returns 0; failures surface as exceptions (ConfigError and friends for
// configuration problems, SingularTimeError for numerical singularities).
int cmd_sample(const RunConfig& config, const std::string& out_dir, bool emit_eps);
int cmd_converge(const RunConfig& config, const std::string& out_dir);
int cmd_probe(const RunConfig& config, const std::string& out_dir);
int cmd_stats(const RunConfig& config, const std::string& out_dir);

// Full argument-vector entry point (everything after the program name).
// Exit codes: 0 success, 2 configuration error, 3 numerical singularity.
int run_cli(const std::vector<std::string>& args);

}  // namespace pndm

#endif  // PNDM_CLI_HPP
