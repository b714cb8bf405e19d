#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairpath/cfur.hpp"
#include "fairpath/dataset.hpp"
#include "fairpath/discovery.hpp"
#include "fairpath/fairness.hpp"
#include "fairpath/graph_io.hpp"
#include "fairpath/metrics.hpp"
#include "fairpath/pipeline.hpp"
#include "fairpath/report.hpp"
#include "fairpath/scm.hpp"
#include "fairpath/sfm.hpp"
#include "fairpath/version.hpp"

using namespace fairpath;
using nlohmann::json;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::optional<std::uint64_t> seed;
    bool json = false;
    bool quiet = false;
};

struct DataArgs {
    std::string path;
    std::vector<std::string> kinds;
};

std::map<std::string, VariableKind> parse_kinds(const std::vector<std::string>& items) {
    std::map<std::string, VariableKind> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("--kinds expects name=kind, got '" + item + "'");
        try {
            out[item.substr(0, eq)] = parse_kind(item.substr(eq + 1));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    return out;
}

Dataset read_data(const DataArgs& args, const Globals& g) {
    auto csv = load_csv(args.path, parse_kinds(args.kinds));
    if (!g.quiet)
        for (const auto& w : csv.warnings) std::cerr << "warning: " << w << "\n";
    return std::move(csv.data);
}

void emit(const Globals& g, const json& j, const std::string& text) {
    if (g.json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text;
}

void warn(const Globals& g, const std::vector<std::string>& warnings) {
    if (g.quiet) return;
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

const std::vector<std::string> kAlgorithms{"pc", "ges", "fci", "notears"};

struct DiscoveryArgs {
    double alpha = 0.05;
    std::optional<std::size_t> max_cond;
    bool no_standardize = false;
    double lambda = 0.1;
    double threshold = 0.3;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--alpha", alpha, "significance level for PC/FCI")->capture_default_str();
        cmd->add_option("--max-cond-set", max_cond, "largest conditioning set for PC/FCI");
        cmd->add_flag("--no-standardize", no_standardize, "skip standardizing continuous columns");
        cmd->add_option("--lambda", lambda, "NOTEARS l1 penalty")->capture_default_str();
        cmd->add_option("--threshold", threshold, "NOTEARS weight threshold")->capture_default_str();
    }

    DiscoveryConfig config() const {
        DiscoveryConfig cfg;
        cfg.alpha = alpha;
        cfg.max_cond_set = max_cond;
        cfg.standardize = !no_standardize;
        cfg.notears.lambda = lambda;
        cfg.notears.threshold = threshold;
        return cfg;
    }
};

struct FairArgs {
    DataArgs data;
    std::string graph;
    std::string protected_attr;
    std::string outcome;
    double x0 = 0.0;
    double x1 = 1.0;
    std::size_t bootstrap = 200;
    std::size_t mc_draws = 100;
    std::string model = "auto";
    std::string mode = "auto";

    void add_to(CLI::App* cmd) {
        cmd->add_option("--data", data.path, "CSV data file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--kinds", data.kinds, "column kind overrides, name=binary|continuous")->delimiter(',');
        cmd->add_option("--graph", graph, "graph file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--protected", protected_attr, "binary protected attribute")->required();
        cmd->add_option("--outcome", outcome, "outcome variable")->required();
        cmd->add_option("--x0", x0, "baseline level of the protected attribute")->capture_default_str();
        cmd->add_option("--x1", x1, "comparison level of the protected attribute")->capture_default_str();
        cmd->add_option("--bootstrap", bootstrap, "bootstrap replicates")->capture_default_str();
        cmd->add_option("--mc-draws", mc_draws, "Monte-Carlo draws for mediator counterfactuals")->capture_default_str();
        cmd->add_option("--outcome-model", model, "auto, linear or logistic")
            ->check(CLI::IsMember({"auto", "linear", "logistic"}, CLI::ignore_case))
            ->capture_default_str();
        cmd->add_option("--mode", mode, "SFM mode: auto, strict or possible")
            ->check(CLI::IsMember({"auto", "strict", "possible"}, CLI::ignore_case))
            ->capture_default_str();
    }

    DecompConfig config(const Globals& g) const {
        return {x0, x1, mc_draws, bootstrap, g.seed.value_or(0), parse_outcome_model(model)};
    }

    std::pair<Dataset, SfmAssignment> load(const Globals& g) const {
        Dataset d = read_data(data, g);
        const MixedGraph graph = load_graph(this->graph).reindexed(d.names);
        const auto m = mode == "auto" ? default_sfm_mode(graph) : parse_sfm_mode(mode);
        auto sfm = derive_sfm(graph, d.index_of(protected_attr), d.index_of(outcome), m);
        return {std::move(d), std::move(sfm)};
    }
};

std::string sfm_text(const json& j) {
    auto list = [](const json& a) {
        std::string s;
        for (const auto& v : a) s += (s.empty() ? "" : ", ") + v.get<std::string>();
        return s.empty() ? std::string("-") : s;
    };
    return "mode:        " + j["mode"].get<std::string>() + "\nprotected:   " + j["protected"].get<std::string>() +
           "\noutcome:     " + j["outcome"].get<std::string>() + "\nmediators:   " + list(j["mediators"]) +
           "\nconfounders: " + list(j["confounders"]) + "\ndropped:     " + list(j["dropped"]) + "\n";
}

std::string score_text(const StructScore& s) {
    return std::string(to_string(s.mode)) + ": F1 " + fmt(s.f1) + "  SHD " + fmt(s.shd) + "  FDR " + fmt(s.fdr) +
           "  TPR " + fmt(s.tpr) + "  FPR " + fmt(s.fpr) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal discovery and path-specific fairness evaluation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "random seed");
    app.add_flag("--json", g.json, "print JSON to stdout");
    app.add_flag("--quiet", g.quiet, "suppress warnings on stderr");

    // simulate
    auto* sim = app.add_subcommand("simulate", "sample a dataset from a linear SCM spec");
    std::string spec_path, sim_out, sim_truth;
    std::size_t sim_n = 1000;
    sim->add_option("--spec", spec_path, "SCM spec JSON (default: shipped AD spec)")->check(CLI::ExistingFile);
    sim->add_option("--n", sim_n, "number of samples")->capture_default_str();
    sim->add_option("--out", sim_out, "CSV output path (default: stdout)");
    sim->add_option("--truth-out", sim_truth, "write the observed DAG to this graph file");

    // discover
    auto* disc = app.add_subcommand("discover", "learn a graph from data");
    DataArgs disc_data;
    std::string disc_algo;
    std::string disc_out;
    DiscoveryArgs disc_args;
    disc->add_option("--data", disc_data.path, "CSV data file")->required()->check(CLI::ExistingFile);
    disc->add_option("--kinds", disc_data.kinds, "column kind overrides, name=binary|continuous")->delimiter(',');
    disc->add_option("--algorithm,--algo", disc_algo, "pc, ges, fci or notears")
        ->required()
        ->check(CLI::IsMember(kAlgorithms, CLI::ignore_case));
    disc->add_option("--out", disc_out, "graph output path");
    disc_args.add_to(disc);

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "score a graph against a ground-truth DAG");
    std::string eval_truth, eval_graph;
    DataArgs eval_data;
    std::string eval_algo;
    std::size_t eval_boot = 0;
    std::string eval_mode = "adjacency";
    double eval_cost = 0.5;
    DiscoveryArgs eval_args;
    eval->add_option("--truth", eval_truth, "ground-truth DAG file")->required()->check(CLI::ExistingFile);
    eval->add_option("--graph,--learned", eval_graph, "learned graph file")->check(CLI::ExistingFile);
    eval->add_option("--data", eval_data.path, "CSV data, with --algorithm")->check(CLI::ExistingFile);
    eval->add_option("--kinds", eval_data.kinds, "column kind overrides")->delimiter(',');
    eval->add_option("--algorithm,--algo", eval_algo, "discover on --data instead of reading --graph")
        ->check(CLI::IsMember(kAlgorithms, CLI::ignore_case));
    eval->add_option("--bootstrap", eval_boot, "bootstrap replicates (needs --data and --algorithm)");
    eval->add_option("--mode", eval_mode, "adjacency or orientation")
        ->check(CLI::IsMember({"adjacency", "orientation"}, CLI::ignore_case))
        ->capture_default_str();
    eval->add_option("--misorientation-cost", eval_cost, "SHD cost of an undirected edge in orientation mode")
        ->capture_default_str();
    eval_args.add_to(eval);

    // sfm
    auto* sfm_cmd = app.add_subcommand("sfm", "derive Standard Fairness Model roles from a graph");
    std::string sfm_graph, sfm_x, sfm_y, sfm_mode = "auto";
    sfm_cmd->add_option("--graph", sfm_graph, "graph file")->required()->check(CLI::ExistingFile);
    sfm_cmd->add_option("--protected", sfm_x, "protected attribute")->required();
    sfm_cmd->add_option("--outcome", sfm_y, "outcome")->required();
    sfm_cmd->add_option("--mode", sfm_mode, "auto, strict or possible")
        ->check(CLI::IsMember({"auto", "strict", "possible"}, CLI::ignore_case))
        ->capture_default_str();

    // fairness
    auto* fair = app.add_subcommand("fairness", "TV and counterfactual DE/IE/SE decomposition");
    FairArgs fair_args;
    fair_args.add_to(fair);

    // cfur
    auto* cf = app.add_subcommand("cfur", "fairness-utility ratio per blocked path");
    FairArgs cfur_args;
    cfur_args.add_to(cf);

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "discover, evaluate and decompose for several algorithms");
    std::string pipe_config, pipe_out, pipe_tables;
    std::vector<std::string> pipe_algos;
    bool pipe_dump = false;
    pipe->add_option("--config", pipe_config, "pipeline JSON config")->required()->check(CLI::ExistingFile);
    pipe->add_option("--out", pipe_out, "write the JSON report here");
    pipe->add_option("--tables", pipe_tables, "write the text tables here");
    pipe->add_option("--algorithms", pipe_algos, "override the config's algorithm list")->delimiter(',');
    pipe->add_flag("--dump-replicates", pipe_dump, "include raw bootstrap replicate values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (*sim) {
            ScmSpec spec = spec_path.empty() ? ad_default_spec() : load_scm_spec(spec_path);
            if (g.seed) spec.seed = *g.seed;
            const Dataset d = sample(spec, sim_n);
            if (!sim_truth.empty()) save_graph(observed_dag(spec), sim_truth);
            if (sim_out.empty()) {
                std::cout << format_csv(d);
            } else {
                save_csv(d, sim_out);
                if (!g.quiet) std::cerr << "wrote " << d.rows() << " rows to " << sim_out << "\n";
            }
        } else if (*disc) {
            const Dataset d = read_data(disc_data, g);
            const auto algo = parse_algorithm(disc_algo);
            const auto graph = discover(d, algo, disc_args.config());
            const auto text = format_graph(graph);
            if (!disc_out.empty()) save_graph(graph, disc_out);
            emit(g, {{"algorithm", std::string(to_string(algo))}, {"graph", text}}, disc_out.empty() ? text : "");
        } else if (*eval) {
            const Dag truth = load_graph(eval_truth);
            json j;
            std::string text;
            if (eval_graph.empty() == eval_algo.empty())
                throw UsageError("evaluate needs exactly one of --graph or --algorithm");
            MixedGraph learned;
            Dataset d;
            const auto mode = parse_compare_mode(eval_mode);
            if (!eval_algo.empty()) {
                if (eval_data.path.empty()) throw UsageError("--algorithm needs --data");
                d = read_data(eval_data, g);
                learned = discover(d, parse_algorithm(eval_algo), eval_args.config());
            } else {
                learned = load_graph(eval_graph);
            }
            const auto score = compare(truth, learned, mode, eval_cost);
            j["score"] = to_json(score);
            text = score_text(score);
            if (eval_boot > 0) {
                if (eval_algo.empty()) throw UsageError("--bootstrap needs --data and --algorithm");
                const auto boot = bootstrap_compare(truth.reindexed(d.names), d, parse_algorithm(eval_algo),
                                                    eval_args.config(), eval_boot, g.seed.value_or(0), mode);
                j["bootstrap"] = to_json(boot);
                text += "bootstrap (" + std::to_string(boot.replicates) + "): F1 " + fmt(boot.f1.mean) + " ± " +
                        fmt(boot.f1.sd) + "  SHD " + fmt(boot.shd.mean) + " ± " + fmt(boot.shd.sd) + "\n";
            }
            emit(g, j, text);
        } else if (*sfm_cmd) {
            const MixedGraph graph = load_graph(sfm_graph);
            const auto m = sfm_mode == "auto" ? default_sfm_mode(graph) : parse_sfm_mode(sfm_mode);
            const auto sfm = derive_sfm(graph, graph.index_of(sfm_x), graph.index_of(sfm_y), m);
            const auto j = to_json(sfm, graph.names());
            emit(g, j, sfm_text(j));
        } else if (*fair) {
            const auto [d, sfm] = fair_args.load(g);
            const auto r = decompose(d, sfm, fair_args.config(g));
            warn(g, r.warnings);
            json j = to_json(r);
            j["sfm"] = to_json(sfm, d.names);
            std::string text = "units: " + r.units + " (outcome model: " + r.model + ")\n";
            auto line = [&](const char* name, double v, const Summary& s) {
                text += std::string(name) + fmt(v);
                if (r.replicates > 0)
                    text += "   bootstrap " + fmt(s.mean) + " ± " + fmt(s.sd) + "  [" + fmt(s.ci_low) + ", " +
                            fmt(s.ci_high) + "]";
                text += "\n";
            };
            line("TV      ", r.point.tv, r.tv);
            line("Ctf-DE  ", r.point.ctf_de, r.ctf_de);
            line("Ctf-IE  ", r.point.ctf_ie, r.ctf_ie);
            line("Ctf-SE  ", r.point.ctf_se, r.ctf_se);
            for (const auto& c : r.contributions)
                text += std::string(to_string(c.effect)) + " contribution " + c.variable + ": " + fmt(c.value) + "\n";
            emit(g, j, text);
        } else if (*cf) {
            const auto [d, sfm] = cfur_args.load(g);
            const auto r = cfur(d, sfm, cfur_args.config(g));
            warn(g, r.warnings);
            std::string text = "loss: " + r.loss + "\n";
            for (const auto& p : r.paths) {
                text += std::string(to_string(p.path)) + ": gain " + fmt(p.fairness_gain) + "  cost " +
                        fmt(p.utility_cost) + "  ratio " + fmt(p.ratio) + (p.unstable ? " (unstable)" : "");
                if (r.replicates > 0) text += "   bootstrap " + fmt(p.ratio_bootstrap.mean) + " ± " + fmt(p.ratio_bootstrap.sd);
                text += "\n";
            }
            emit(g, to_json(r), text);
        } else if (*pipe) {
            auto cfg = load_pipeline_config(pipe_config);
            if (g.seed) cfg.seed = *g.seed;
            if (pipe_dump) cfg.dump_replicates = true;
            if (!pipe->get_option("--algorithms")->empty()) {
                cfg.algorithms.clear();
                for (const auto& a : pipe_algos) {
                    try {
                        cfg.algorithms.push_back(parse_algorithm(a));
                    } catch (const std::invalid_argument& e) {
                        throw UsageError(e.what());
                    }
                }
            }
            const auto rep = run_pipeline(cfg);
            const auto j = to_json(rep, cfg.dump_replicates);
            const auto dumped = j.dump(2) + "\n";
            const auto tables = render_tables(j);
            if (!pipe_out.empty()) write_file(pipe_out, dumped);
            if (!pipe_tables.empty()) write_file(pipe_tables, tables);
            warn(g, rep.warnings);
            for (const auto& row : rep.rows)
                if (!row.error.empty() && !g.quiet)
                    std::cerr << "warning: " << row.name << " failed at " << row.failed_stage << ": " << row.error << "\n";
            if (g.json)
                std::cout << dumped;
            else
                std::cout << tables;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    }
    return 0;
}
