#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairpath/cfur.hpp"
#include "fairpath/dataset.hpp"
#include "fairpath/discovery.hpp"
#include "fairpath/fairness.hpp"
#include "fairpath/metrics.hpp"
#include "fairpath/sfm.hpp"

namespace fairpath {

struct PipelineConfig {
    std::filesystem::path data;
    std::filesystem::path truth;
    std::string protected_attribute;
    std::string outcome;
    double x0 = 0.0;
    double x1 = 1.0;
    std::vector<Algorithm> algorithms;
    std::uint64_t seed = 0;
    std::size_t compare_bootstrap = 30;
    std::size_t decomp_bootstrap = 200;
    std::size_t cfur_bootstrap = 200;
    std::size_t mc_draws = 100;
    DiscoveryConfig discovery;
    CompareMode compare_mode = CompareMode::Adjacency;
    /// Unset: strict for fully directed graphs, possible otherwise.
    std::optional<SfmMode> sfm_mode;
    OutcomeModel outcome_model = OutcomeModel::Auto;
    std::map<std::string, VariableKind> kinds;
    bool dump_replicates = false;

    void validate() const;
};

/// Reads a JSON config. Relative paths are resolved against `base_dir`.
PipelineConfig parse_pipeline_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Canonical JSON of the config (sorted keys, paths as given), used for hashing.
std::string canonical_config(const PipelineConfig& cfg);

/// 16 hex digits of FNV-1a over the canonical config.
std::string config_hash(const PipelineConfig& cfg);

struct PipelineRow {
    std::string name;  // "ground_truth" or the algorithm name
    std::optional<MixedGraph> graph;
    std::optional<StructScore> adjacency;
    std::optional<StructScore> orientation;
    std::optional<BootstrapStructScore> structure_bootstrap;
    std::optional<SfmAssignment> sfm;
    std::optional<DecompResult> fairness;
    std::optional<CfurResult> cfur;
    /// Set when a stage failed; later stages are skipped for this row.
    std::string failed_stage;
    std::string error;
};

struct PipelineReport {
    std::string version;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::size_t n = 0;
    std::vector<std::string> names;
    std::vector<VariableKind> kinds;
    std::size_t dropped_rows = 0;
    std::string protected_attribute;
    std::string outcome;
    double x0 = 0.0;
    double x1 = 1.0;
    CompareMode compare_mode = CompareMode::Adjacency;
    std::vector<PipelineRow> rows;
    std::vector<std::string> warnings;
};

/// Ground truth first, then each algorithm: discover, compare, derive the SFM,
/// decompose and compute CFUR. A failing stage is recorded on its row and the
/// other rows continue.
PipelineReport run_pipeline(const PipelineConfig& cfg);

/// Same, with data and truth supplied directly (cfg.data and cfg.truth unused).
PipelineReport run_pipeline(const PipelineConfig& cfg, const Dataset& data, const Dag& truth,
                            std::size_t dropped_rows = 0, std::vector<std::string> warnings = {});

}  // namespace fairpath
