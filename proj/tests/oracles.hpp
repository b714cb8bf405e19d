#pragma once

// Independent reference implementations used to check the library.
// They deliberately avoid the library's graph algorithms and solvers.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fairpath/dataset.hpp"
#include "fairpath/graph.hpp"
#include "fairpath/rng.hpp"
#include "fairpath/scm.hpp"

namespace oracle {

using fairpath::Dag;
using fairpath::MixedGraph;
using fairpath::VariableId;

std::vector<std::string> node_names(std::size_t d);

/// reach(i, j) iff a non-empty chain of tail-arrow edges leads from i to j.
std::vector<std::vector<bool>> reach(const MixedGraph& g);

bool acyclic(const MixedGraph& g);

/// Every DAG over d labelled nodes (25 for d = 3, 543 for d = 4).
std::vector<Dag> all_dags(std::size_t d);

/// Same skeleton and same unshielded colliders.
bool markov_equivalent(const Dag& a, const Dag& b);

/// CPDAG by enumerating every acyclic orientation of the skeleton.
MixedGraph brute_cpdag(const Dag& g);

/// Gaussian BIC through the normal equations.
double bic(const fairpath::Dataset& data, const Dag& dag);

/// Best BIC over all DAGs (d <= 4).
double best_bic(const fairpath::Dataset& data);

struct Counts {
    double tp = 0, fp = 0, fn = 0, tn = 0, shd = 0;
};

/// Pair-by-pair tally; mode 0 = adjacency, 1 = orientation (undirected/circle costs `cost`).
Counts pair_counts(const Dag& truth, const MixedGraph& learned, int mode, double cost = 0.5);

Dag random_dag(std::size_t d, double p, fairpath::Rng& rng);

/// Random marks on a random skeleton.
MixedGraph random_mixed(std::size_t d, double p, fairpath::Rng& rng);

/// Linear-Gaussian spec over a random DAG whose |weights| lie in [lo, hi].
fairpath::ScmSpec random_linear_spec(std::size_t d, double p, double lo, double hi, fairpath::Rng& rng);

/// Covariance implied by an all-continuous, latent-free spec.
Eigen::MatrixXd population_cov(const fairpath::ScmSpec& spec);

}  // namespace oracle
