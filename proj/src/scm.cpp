#include "fairpath/scm.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fairpath/rng.hpp"
#include "fairpath/stats.hpp"

namespace fairpath {

using nlohmann::json;

std::vector<std::string> validate(const ScmSpec& spec) {
    std::vector<std::string> problems;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const auto& node = spec.nodes[i];
        const auto key = normalize_name(node.name);
        if (key.empty()) problems.push_back("node " + std::to_string(i) + " has an empty name");
        if (!index.emplace(key, i).second) problems.push_back("duplicate node name '" + node.name + "'");
        if (!(node.noise_std >= 0.0)) problems.push_back("node '" + node.name + "' has negative noise_std");
    }
    auto known = [&](const std::string& name) { return index.contains(normalize_name(name)); };

    std::set<std::pair<std::size_t, std::size_t>> seen_edges;
    bool edges_ok = true;
    for (const auto& e : spec.edges) {
        if (!known(e.parent) || !known(e.child)) {
            problems.push_back("edge " + e.parent + " -> " + e.child + " names an unknown node");
            edges_ok = false;
            continue;
        }
        const auto p = index.at(normalize_name(e.parent));
        const auto c = index.at(normalize_name(e.child));
        if (p == c) {
            problems.push_back("self-loop on '" + e.parent + "'");
            edges_ok = false;
        } else if (!seen_edges.insert({p, c}).second) {
            problems.push_back("duplicate edge " + e.parent + " -> " + e.child);
        }
    }
    if (edges_ok) {
        // The edge matrix cannot hold both directions of a pair, so check cycles on an explicit adjacency list.
        const std::size_t d = spec.nodes.size();
        std::vector<std::vector<std::size_t>> out(d);
        for (const auto& [p, c] : seen_edges) out[p].push_back(c);
        std::vector<int> color(d, 0);
        bool cyclic = false;
        std::string where;
        auto visit = [&](auto&& self, std::size_t u) -> void {
            color[u] = 1;
            for (auto w : out[u]) {
                if (cyclic) return;
                if (color[w] == 1) {
                    cyclic = true;
                    where = spec.nodes[u].name + " -> " + spec.nodes[w].name;
                    return;
                }
                if (color[w] == 0) self(self, w);
            }
            color[u] = 2;
        };
        for (std::size_t v = 0; v < d && !cyclic; ++v)
            if (color[v] == 0) visit(visit, v);
        if (cyclic) problems.push_back("observed edges contain a directed cycle (through " + where + ")");
    }

    std::set<std::string> latent_names;
    for (const auto& lat : spec.latents) {
        if (known(lat.name)) problems.push_back("latent '" + lat.name + "' shadows an observed node");
        if (!latent_names.insert(normalize_name(lat.name)).second)
            problems.push_back("duplicate latent name '" + lat.name + "'");
        std::set<std::string> children;
        for (const auto& l : lat.loadings) {
            if (!known(l.child)) problems.push_back("latent '" + lat.name + "' loads on unknown node '" + l.child + "'");
            children.insert(normalize_name(l.child));
        }
        if (children.size() < 2)
            problems.push_back("latent '" + lat.name + "' must have at least two children (has " +
                               std::to_string(children.size()) + ")");
    }
    return problems;
}

namespace {

void require_valid(const ScmSpec& spec) {
    const auto problems = validate(spec);
    if (problems.empty()) return;
    std::string msg = "invalid SCM spec:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw std::invalid_argument(msg);
}

std::vector<std::string> node_names(const ScmSpec& spec) {
    std::vector<std::string> names;
    for (const auto& n : spec.nodes) names.push_back(n.name);
    return names;
}

}  // namespace

Dag observed_dag(const ScmSpec& spec) {
    require_valid(spec);
    Dag g(node_names(spec));
    for (const auto& e : spec.edges) g.add_directed(g.index_of(e.parent), g.index_of(e.child));
    return g;
}

Dataset sample(const ScmSpec& spec, std::size_t n) { return sample(spec, n, spec.seed); }

Dataset sample(const ScmSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample size must be at least 1");
    const Dag g = observed_dag(spec);
    const auto rows = static_cast<Eigen::Index>(n);
    const auto d = static_cast<Eigen::Index>(spec.nodes.size());

    // Linear predictor contributions from latents, accumulated per observed node.
    Eigen::MatrixXd latent_part = Eigen::MatrixXd::Zero(rows, d);
    for (const auto& lat : spec.latents) {
        Rng rng(derive_seed(seed, "latent:" + normalize_name(lat.name)));
        Eigen::VectorXd draws(rows);
        for (Eigen::Index i = 0; i < rows; ++i) draws(i) = rng.normal();
        for (const auto& l : lat.loadings) latent_part.col(static_cast<Eigen::Index>(g.index_of(l.child))) += l.weight * draws;
    }

    Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(d, d);
    for (const auto& e : spec.edges)
        weights(static_cast<Eigen::Index>(g.index_of(e.parent)), static_cast<Eigen::Index>(g.index_of(e.child))) = e.weight;

    Dataset out;
    out.values = Eigen::MatrixXd::Zero(rows, d);
    out.names = node_names(spec);
    for (const auto& node : spec.nodes) out.kinds.push_back(node.kind);

    for (VariableId v : topological_order(g)) {
        const auto col = static_cast<Eigen::Index>(v);
        const auto& node = spec.nodes[v];
        Eigen::VectorXd linear = out.values * weights.col(col) + latent_part.col(col);
        linear.array() += node.intercept;
        Rng rng(derive_seed(seed, "node:" + normalize_name(node.name)));
        if (node.kind == VariableKind::Binary) {
            for (Eigen::Index i = 0; i < rows; ++i) out.values(i, col) = rng.bernoulli(sigmoid(linear(i))) ? 1.0 : 0.0;
        } else {
            for (Eigen::Index i = 0; i < rows; ++i) {
                const double noise = rng.normal();
                out.values(i, col) = linear(i) + (node.noise_std > 0.0 ? node.noise_std * noise : 0.0);
            }
        }
    }
    return out;
}

ScmSpec parse_scm_spec(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("SCM spec is not valid JSON: ") + e.what());
    }
    ScmSpec spec;
    try {
        for (const auto& n : doc.at("nodes")) {
            ScmNode node;
            node.name = n.at("name").get<std::string>();
            node.kind = parse_kind(n.value("kind", std::string("continuous")));
            node.noise_std = n.value("noise_std", 1.0);
            node.intercept = n.value("intercept", 0.0);
            spec.nodes.push_back(std::move(node));
        }
        for (const auto& e : doc.value("edges", json::array()))
            spec.edges.push_back({e.at("parent").get<std::string>(), e.at("child").get<std::string>(),
                                  e.at("weight").get<double>()});
        for (const auto& l : doc.value("latents", json::array())) {
            ScmLatent lat{l.at("name").get<std::string>(), {}};
            for (const auto& x : l.at("loadings"))
                lat.loadings.push_back({x.at("child").get<std::string>(), x.at("weight").get<double>()});
            spec.latents.push_back(std::move(lat));
        }
        spec.seed = doc.value("seed", std::uint64_t{0});
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed SCM spec: ") + e.what());
    }
    return spec;
}

std::string format_scm_spec(const ScmSpec& spec) {
    json doc;
    doc["nodes"] = json::array();
    for (const auto& n : spec.nodes)
        doc["nodes"].push_back({{"name", n.name},
                                {"kind", std::string(to_string(n.kind))},
                                {"noise_std", n.noise_std},
                                {"intercept", n.intercept}});
    doc["edges"] = json::array();
    for (const auto& e : spec.edges) doc["edges"].push_back({{"parent", e.parent}, {"child", e.child}, {"weight", e.weight}});
    doc["latents"] = json::array();
    for (const auto& l : spec.latents) {
        json loads = json::array();
        for (const auto& x : l.loadings) loads.push_back({{"child", x.child}, {"weight", x.weight}});
        doc["latents"].push_back({{"name", l.name}, {"loadings", loads}});
    }
    doc["seed"] = spec.seed;
    return doc.dump(2) + "\n";
}

ScmSpec load_scm_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open SCM spec " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scm_spec(buf.str());
}

std::filesystem::path data_directory() {
    if (const char* env = std::getenv("FAIRPATH_DATA_DIR"); env && *env) return env;
    return FAIRPATH_DATA_DIR;
}

ScmSpec ad_default_spec() { return load_scm_spec(data_directory() / "ad_spec.json"); }

}  // namespace fairpath
