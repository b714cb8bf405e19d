#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fairpath/dataset.hpp"
#include "fairpath/graph.hpp"

namespace fairpath {

struct ScmNode {
    std::string name;
    VariableKind kind = VariableKind::Continuous;
    double noise_std = 1.0;
    double intercept = 0.0;
};

struct ScmEdge {
    std::string parent;
    std::string child;
    double weight = 0.0;
};

struct LatentLoading {
    std::string child;
    double weight = 0.0;
};

struct ScmLatent {
    std::string name;
    std::vector<LatentLoading> loadings;
};

/// Linear structural causal model. Continuous nodes:
///   x = intercept + sum(weight * parent) + sum(loading * latent) + N(0, noise_std^2)
/// Binary nodes: x ~ Bernoulli(sigmoid(same linear predictor without the Gaussian term)).
/// Latents are independent N(0, 1) and are not emitted as columns.
struct ScmSpec {
    std::vector<ScmNode> nodes;
    std::vector<ScmEdge> edges;
    std::vector<ScmLatent> latents;
    std::uint64_t seed = 0;
};

/// Human-readable violations; empty iff the spec is usable.
std::vector<std::string> validate(const ScmSpec& spec);

/// Graph over the observed nodes (in spec order) with the spec's edges.
/// Requires validate(spec) to be empty.
Dag observed_dag(const ScmSpec& spec);

/// Draw n rows. Each node and latent has its own random stream keyed by its
/// name, so adding a node leaves the draws of existing nodes unchanged.
Dataset sample(const ScmSpec& spec, std::size_t n);
Dataset sample(const ScmSpec& spec, std::size_t n, std::uint64_t seed);

ScmSpec parse_scm_spec(std::string_view json_text);
std::string format_scm_spec(const ScmSpec& spec);
ScmSpec load_scm_spec(const std::filesystem::path& path);

/// Directory of shipped data files ($FAIRPATH_DATA_DIR overrides the build-time path).
std::filesystem::path data_directory();

/// The shipped nine-variable Alzheimer's-style spec (data/ad_spec.json).
ScmSpec ad_default_spec();

}  // namespace fairpath
