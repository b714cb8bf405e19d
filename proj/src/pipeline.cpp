#include "fairpath/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fairpath/graph_io.hpp"
#include "fairpath/rng.hpp"
#include "fairpath/version.hpp"

namespace fairpath {

using nlohmann::json;

void PipelineConfig::validate() const {
    if (protected_attribute.empty()) throw std::invalid_argument("config: 'protected' is required");
    if (outcome.empty()) throw std::invalid_argument("config: 'outcome' is required");
    if (compare_bootstrap == 1) throw std::invalid_argument("config: compare_bootstrap must be 0 or >= 2");
    discovery.validate();
    DecompConfig{x0, x1, mc_draws, decomp_bootstrap, seed, outcome_model}.validate();
}

namespace {

const std::set<std::string> kConfigKeys{
    "data",        "truth",           "protected",      "outcome",        "x0",
    "x1",          "algorithms",      "seed",           "compare_bootstrap", "decomp_bootstrap",
    "cfur_bootstrap", "mc_draws",     "alpha",          "max_cond_set",   "standardize",
    "notears",     "compare_mode",    "sfm_mode",       "outcome_model",  "kinds",
    "dump_replicates"};

const std::set<std::string> kNotearsKeys{"lambda", "threshold", "max_dual_iters", "h_tol", "rho_max",
                                         "max_inner_iters"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw std::invalid_argument(where + ": unknown key '" + key + "'");
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base.empty()) path = base / path;
    return path;
}

}  // namespace

PipelineConfig parse_pipeline_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
    reject_unknown(doc, kConfigKeys, "config");

    PipelineConfig cfg;
    try {
        if (doc.contains("data")) cfg.data = resolve(doc["data"].get<std::string>(), base_dir);
        if (doc.contains("truth")) cfg.truth = resolve(doc["truth"].get<std::string>(), base_dir);
        cfg.protected_attribute = doc.value("protected", std::string{});
        cfg.outcome = doc.value("outcome", std::string{});
        cfg.x0 = doc.value("x0", cfg.x0);
        cfg.x1 = doc.value("x1", cfg.x1);
        for (const auto& a : doc.value("algorithms", json::array())) cfg.algorithms.push_back(parse_algorithm(a.get<std::string>()));
        cfg.seed = doc.value("seed", cfg.seed);
        cfg.compare_bootstrap = doc.value("compare_bootstrap", cfg.compare_bootstrap);
        cfg.decomp_bootstrap = doc.value("decomp_bootstrap", cfg.decomp_bootstrap);
        cfg.cfur_bootstrap = doc.value("cfur_bootstrap", cfg.cfur_bootstrap);
        cfg.mc_draws = doc.value("mc_draws", cfg.mc_draws);
        cfg.discovery.alpha = doc.value("alpha", cfg.discovery.alpha);
        if (doc.contains("max_cond_set") && !doc["max_cond_set"].is_null())
            cfg.discovery.max_cond_set = doc["max_cond_set"].get<std::size_t>();
        cfg.discovery.standardize = doc.value("standardize", cfg.discovery.standardize);
        if (doc.contains("notears")) {
            const auto& nt = doc["notears"];
            reject_unknown(nt, kNotearsKeys, "config.notears");
            auto& n = cfg.discovery.notears;
            n.lambda = nt.value("lambda", n.lambda);
            n.threshold = nt.value("threshold", n.threshold);
            n.max_dual_iters = nt.value("max_dual_iters", n.max_dual_iters);
            n.h_tol = nt.value("h_tol", n.h_tol);
            n.rho_max = nt.value("rho_max", n.rho_max);
            n.max_inner_iters = nt.value("max_inner_iters", n.max_inner_iters);
        }
        if (doc.contains("compare_mode")) cfg.compare_mode = parse_compare_mode(doc["compare_mode"].get<std::string>());
        if (doc.contains("sfm_mode")) {
            const auto m = doc["sfm_mode"].get<std::string>();
            if (normalize_name(m) != "auto") cfg.sfm_mode = parse_sfm_mode(m);
        }
        if (doc.contains("outcome_model"))
            cfg.outcome_model = parse_outcome_model(doc["outcome_model"].get<std::string>());
        const json kinds = doc.value("kinds", json::object());
        for (const auto& [name, kind] : kinds.items())
            cfg.kinds[name] = parse_kind(kind.get<std::string>());
        cfg.dump_replicates = doc.value("dump_replicates", false);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_pipeline_config(ss.str(), path.parent_path());
}

std::string canonical_config(const PipelineConfig& cfg) {
    json j;
    j["data"] = cfg.data.generic_string();
    j["truth"] = cfg.truth.generic_string();
    j["protected"] = cfg.protected_attribute;
    j["outcome"] = cfg.outcome;
    j["x0"] = cfg.x0;
    j["x1"] = cfg.x1;
    j["algorithms"] = json::array();
    for (auto a : cfg.algorithms) j["algorithms"].push_back(std::string(to_string(a)));
    j["seed"] = cfg.seed;
    j["compare_bootstrap"] = cfg.compare_bootstrap;
    j["decomp_bootstrap"] = cfg.decomp_bootstrap;
    j["cfur_bootstrap"] = cfg.cfur_bootstrap;
    j["mc_draws"] = cfg.mc_draws;
    j["alpha"] = cfg.discovery.alpha;
    j["max_cond_set"] = cfg.discovery.max_cond_set ? json(*cfg.discovery.max_cond_set) : json(nullptr);
    j["standardize"] = cfg.discovery.standardize;
    const auto& n = cfg.discovery.notears;
    j["notears"] = {{"lambda", n.lambda},   {"threshold", n.threshold}, {"max_dual_iters", n.max_dual_iters},
                    {"h_tol", n.h_tol},     {"rho_max", n.rho_max},     {"max_inner_iters", n.max_inner_iters}};
    j["compare_mode"] = std::string(to_string(cfg.compare_mode));
    j["sfm_mode"] = cfg.sfm_mode ? std::string(to_string(*cfg.sfm_mode)) : std::string("auto");
    j["outcome_model"] = std::string(to_string(cfg.outcome_model));
    j["kinds"] = json::object();
    for (const auto& [name, kind] : cfg.kinds) j["kinds"][name] = std::string(to_string(kind));
    j["dump_replicates"] = cfg.dump_replicates;
    return j.dump();
}

std::string config_hash(const PipelineConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_name(canonical_config(cfg))));
    return buf;
}

namespace {

void run_row(PipelineRow& row, const PipelineConfig& cfg, const Dataset& data, const Dag& truth,
             std::optional<Algorithm> algo) {
    const char* stage = "discover";
    try {
        if (algo) {
            row.graph = discover(data, *algo, cfg.discovery);
            stage = "evaluate";
            row.adjacency = compare(truth, *row.graph, CompareMode::Adjacency);
            row.orientation = compare(truth, *row.graph, CompareMode::Orientation);
            if (cfg.compare_bootstrap >= 2)
                row.structure_bootstrap =
                    bootstrap_compare(truth, data, *algo, cfg.discovery, cfg.compare_bootstrap,
                                      derive_seed(cfg.seed, "compare:" + row.name), cfg.compare_mode);
        } else {
            row.graph = truth;
            stage = "evaluate";
            row.adjacency = compare(truth, truth, CompareMode::Adjacency);
            row.orientation = compare(truth, truth, CompareMode::Orientation);
        }
        stage = "sfm";
        const auto mode = cfg.sfm_mode.value_or(default_sfm_mode(*row.graph));
        row.sfm = derive_sfm(*row.graph, data.index_of(cfg.protected_attribute), data.index_of(cfg.outcome), mode);
        stage = "fairness";
        // One seed for every row so that rows differ only through their graphs.
        DecompConfig dc{cfg.x0, cfg.x1, cfg.mc_draws, cfg.decomp_bootstrap, derive_seed(cfg.seed, "fairness"),
                        cfg.outcome_model};
        row.fairness = decompose(data, *row.sfm, dc);
        stage = "cfur";
        dc.bootstrap_B = cfg.cfur_bootstrap;
        dc.seed = derive_seed(cfg.seed, "cfur");
        row.cfur = cfur(data, *row.sfm, dc);
    } catch (const std::exception& e) {
        row.failed_stage = stage;
        row.error = e.what();
    }
}

}  // namespace

PipelineReport run_pipeline(const PipelineConfig& cfg, const Dataset& data, const Dag& truth_in,
                            std::size_t dropped_rows, std::vector<std::string> warnings) {
    cfg.validate();
    data.validate();
    const Dag truth = truth_in.reindexed(data.names);
    require_dag(truth, "ground-truth graph");
    data.index_of(cfg.protected_attribute);
    data.index_of(cfg.outcome);

    PipelineReport rep;
    rep.version = kVersion;
    rep.seed = cfg.seed;
    rep.config_hash = config_hash(cfg);
    rep.n = static_cast<std::size_t>(data.rows());
    rep.names = data.names;
    rep.kinds = data.kinds;
    rep.dropped_rows = dropped_rows;
    rep.protected_attribute = data.names[data.index_of(cfg.protected_attribute)];
    rep.outcome = data.names[data.index_of(cfg.outcome)];
    rep.x0 = cfg.x0;
    rep.x1 = cfg.x1;
    rep.compare_mode = cfg.compare_mode;
    rep.warnings = std::move(warnings);

    rep.rows.emplace_back().name = "ground_truth";
    run_row(rep.rows.back(), cfg, data, truth, std::nullopt);
    for (auto a : cfg.algorithms) {
        rep.rows.emplace_back().name = to_string(a);
        run_row(rep.rows.back(), cfg, data, truth, a);
    }
    return rep;
}

PipelineReport run_pipeline(const PipelineConfig& cfg) {
    if (cfg.data.empty()) throw std::invalid_argument("config: 'data' is required");
    if (cfg.truth.empty()) throw std::invalid_argument("config: 'truth' is required");
    auto csv = load_csv(cfg.data, cfg.kinds);
    const auto truth = load_graph(cfg.truth);
    return run_pipeline(cfg, csv.data, truth, csv.dropped_rows, std::move(csv.warnings));
}

}  // namespace fairpath
