#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace homctl::cli {

// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_verification_failed = 1;
inline constexpr int exit_infeasible = 2;
inline constexpr int exit_input_error = 3;

struct Options {
  std::string config_path;
  std::string artifact_path;
  std::string out_dir;  // empty: use the config's out_dir
  std::optional<double> mu_override;
  std::optional<int> samples_override;
  std::optional<std::uint64_t> seed_override;
  bool list_only = false;
};

int cmd_synth(const Options& opt);
int cmd_verify(const Options& opt);
int cmd_simulate(const Options& opt);
int cmd_reproduce_paper(const Options& opt);

/// Full argument parsing + dispatch (the binary's main defers here).
int run(int argc, const char* const* argv);

}  // namespace homctl::cli
