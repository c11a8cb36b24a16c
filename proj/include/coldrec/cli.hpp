#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace coldrec::cli {

/// Fully resolved experiment configuration. Every default is materialised
/// in `json` so the echoed copy reproduces a run on its own.
struct ExperimentConfig {
  nlohmann::json json;

  std::filesystem::path out() const;
  std::uint64_t seed() const;
};

/// Built-in defaults for every section.
nlohmann::json default_config();

/// defaults <- config file <- command-line overrides; validates section names.
ExperimentConfig resolve_config(const std::optional<std::filesystem::path>& file,
                                const std::optional<std::uint64_t>& seed,
                                const std::optional<std::string>& out,
                                const std::optional<int>& threads);

/// Thread count from --threads, then COLDREC_THREADS, then the config.
int resolve_threads(const std::optional<int>& flag, const ExperimentConfig& config);

void cmd_synth(const ExperimentConfig& config);
void cmd_split(const ExperimentConfig& config);
void cmd_aggregate(const ExperimentConfig& config);
void cmd_fuse(const ExperimentConfig& config);
void cmd_train(const ExperimentConfig& config, bool use_tuned_scaling = false);
void cmd_tune(const ExperimentConfig& config);
void cmd_evaluate(const ExperimentConfig& config, const std::string& scenario, bool markdown);
/// Returns the rendered comparison in `format` (json, csv or markdown).
std::string cmd_report(const std::vector<std::filesystem::path>& runs, const std::string& format);

/// Entry point used by the `coldrec` binary; returns the process exit code.
int run(int argc, char** argv);

}  // namespace coldrec::cli
