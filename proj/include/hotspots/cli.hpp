#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hotspots/io.hpp"

namespace hotspots {

enum class Command { solve, hotspots, simulate, feynman_kac, heat_kernel, verify, sweep };

std::string to_string(Command c);
Command command_from_string(const std::string& name);

inline constexpr int kExitPass = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNonConvergence = 3;

/// Unset optionals take per-command defaults (listed in the README).
struct RunConfig {
    Command command = Command::solve;
    std::optional<LemmaId> lemma;
    Json domain;  ///< domain spec object, null when absent
    Json family;  ///< family spec object, null when absent
    std::optional<double> h, dt, t, delta, band_epsilon, c_max, offset, t_budget;
    std::optional<std::size_t> n_paths;
    std::optional<int> eigen_max_iterations;
    std::optional<Vec2> start, target;
    std::vector<Vec2> sources;
    std::vector<double> times;
    bool normalize = false;
    std::uint64_t seed = 1;
    std::string output = "hotspots_out";
    Backend backend = Backend::openmp;
    bool dump_mesh = false;
    bool dump_eigenfunction = false;
    bool dump_endpoints = false;
};

/// Every key accepted in a config file.
const std::vector<std::string>& config_keys();

/// Validates ranges and shapes; throws ConfigError naming the field.
RunConfig parse_run_config(const Json& config);
/// Canonical form (all keys, sorted) used for the manifest hash.
Json to_json(const RunConfig& config);

/// Runs the command, writes artifacts and returns the exit status.
/// Input errors propagate as exceptions; nothing is written in that case.
int run(const RunConfig& config, std::ostream& log);

/// Command-line front end: flags override the --config file. Maps
/// exceptions to exit codes 2 (input) and 3 (non-convergence).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hotspots
