#include "fairpath/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "fairpath/graph_io.hpp"

namespace fairpath {

using nlohmann::json;

json to_json(const Summary& s) {
    return {{"mean", s.mean}, {"sd", s.sd}, {"ci95", {s.ci_low, s.ci_high}}, {"count", s.count}};
}

json to_json(const StructScore& s) {
    return {{"mode", std::string(to_string(s.mode))},
            {"f1", s.f1},
            {"shd", s.shd},
            {"fdr", s.fdr},
            {"tpr", s.tpr},
            {"fpr", s.fpr},
            {"tp", s.counts.tp},
            {"fp", s.counts.fp},
            {"fn", s.counts.fn},
            {"tn", s.counts.tn}};
}

json to_json(const BootstrapStructScore& s, bool dump_replicates) {
    json j = {{"replicates", s.replicates}, {"skipped", s.skipped}, {"f1", to_json(s.f1)},  {"shd", to_json(s.shd)},
              {"fdr", to_json(s.fdr)},      {"tpr", to_json(s.tpr)},  {"fpr", to_json(s.fpr)}};
    if (dump_replicates) {
        j["replicate_values"] = json::array();
        for (const auto& r : s.replicate_scores) j["replicate_values"].push_back(to_json(r));
    }
    return j;
}

json to_json(const SfmAssignment& sfm, const std::vector<std::string>& names) {
    auto list = [&](const std::vector<VariableId>& ids) {
        json a = json::array();
        for (auto v : ids) a.push_back(names.at(v));
        return a;
    };
    return {{"protected", names.at(sfm.x)},
            {"outcome", names.at(sfm.y)},
            {"mediators", list(sfm.w)},
            {"confounders", list(sfm.z)},
            {"dropped", list(sfm.dropped)},
            {"mode", std::string(to_string(sfm.mode))}};
}

json to_json(const DecompResult& r, bool dump_replicates) {
    json contributions = json::array();
    for (const auto& c : r.contributions)
        contributions.push_back({{"effect", std::string(to_string(c.effect))}, {"variable", c.variable}, {"value", c.value}});
    json j = {{"units", r.units},
              {"model", r.model},
              {"tv", r.point.tv},
              {"ctf_de", r.point.ctf_de},
              {"ctf_ie", r.point.ctf_ie},
              {"ctf_se", r.point.ctf_se},
              {"bootstrap",
               {{"replicates", r.replicates},
                {"failed", r.failed_replicates},
                {"tv", to_json(r.tv)},
                {"ctf_de", to_json(r.ctf_de)},
                {"ctf_ie", to_json(r.ctf_ie)},
                {"ctf_se", to_json(r.ctf_se)}}},
              {"contributions", contributions},
              {"warnings", r.warnings}};
    if (dump_replicates) {
        json reps = json::array();
        for (const auto& e : r.replicate_effects) reps.push_back({e.tv, e.ctf_de, e.ctf_ie, e.ctf_se});
        j["bootstrap"]["replicate_values"] = reps;
    }
    return j;
}

json to_json(const CfurResult& r, bool dump_replicates) {
    json paths = json::array();
    for (const auto& p : r.paths) {
        json pj = {{"path", std::string(to_string(p.path))},
                   {"component_full", p.component_full},
                   {"component_blocked", p.component_blocked},
                   {"loss_full", p.loss_full},
                   {"loss_blocked", p.loss_blocked},
                   {"fairness_gain", p.fairness_gain},
                   {"utility_cost", p.utility_cost},
                   {"ratio", p.ratio},
                   {"unstable", p.unstable},
                   {"bootstrap",
                    {{"fairness_gain", to_json(p.gain_bootstrap)},
                     {"utility_cost", to_json(p.cost_bootstrap)},
                     {"ratio", to_json(p.ratio_bootstrap)},
                     {"unstable_replicates", p.unstable_replicates}}}};
        if (dump_replicates) {
            pj["bootstrap"]["replicate_values"] = {
                {"fairness_gain", p.replicate_gains}, {"utility_cost", p.replicate_costs}, {"ratio", p.replicate_ratios}};
        }
        paths.push_back(std::move(pj));
    }
    return {{"loss", r.loss},
            {"replicates", r.replicates},
            {"failed", r.failed_replicates},
            {"paths", paths},
            {"warnings", r.warnings}};
}

json to_json(const PipelineReport& rep, bool dump_replicates) {
    json vars = json::array();
    for (std::size_t i = 0; i < rep.names.size(); ++i)
        vars.push_back({{"name", rep.names[i]}, {"kind", std::string(to_string(rep.kinds[i]))}});
    json rows = json::array();
    for (const auto& row : rep.rows) {
        json r = {{"graph", row.name}, {"status", row.error.empty() ? "ok" : "error"}};
        if (!row.error.empty()) {
            r["failed_stage"] = row.failed_stage;
            r["error"] = row.error;
        }
        if (row.graph) r["edges"] = format_graph(*row.graph);
        if (row.adjacency || row.orientation) {
            json s = json::object();
            if (row.adjacency) s["adjacency"] = to_json(*row.adjacency);
            if (row.orientation) s["orientation"] = to_json(*row.orientation);
            if (row.structure_bootstrap) s["bootstrap"] = to_json(*row.structure_bootstrap, dump_replicates);
            r["structure"] = s;
        }
        if (row.sfm) r["sfm"] = to_json(*row.sfm, rep.names);
        if (row.fairness) r["fairness"] = to_json(*row.fairness, dump_replicates);
        if (row.cfur) r["cfur"] = to_json(*row.cfur, dump_replicates);
        rows.push_back(std::move(r));
    }
    return {{"tool", "fairpath"},
            {"provenance", {{"version", rep.version}, {"seed", rep.seed}, {"config_hash", rep.config_hash}}},
            {"dataset", {{"n", rep.n}, {"d", rep.names.size()}, {"dropped_rows", rep.dropped_rows}, {"variables", vars}}},
            {"protected", rep.protected_attribute},
            {"outcome", rep.outcome},
            {"x0", rep.x0},
            {"x1", rep.x1},
            {"compare_mode", std::string(to_string(rep.compare_mode))},
            {"rows", rows},
            {"warnings", rep.warnings}};
}

namespace {

std::string fixed(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s = buf;
    // "-0.000" reads as a sign claim that the number does not make.
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::string mean_sd(const json& summary, int digits = 3) {
    return fixed(summary.at("mean").get<double>(), digits) + " ± " + fixed(summary.at("sd").get<double>(), digits);
}

// Display width: "±" is two bytes in UTF-8 but one column.
std::size_t width(const std::string& s) {
    std::size_t w = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++w;
    return w;
}

class Table {
public:
    explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
    bool empty() const { return rows_.size() == 1; }

    std::string render() const {
        std::vector<std::size_t> w(rows_[0].size(), 0);
        for (const auto& r : rows_)
            for (std::size_t c = 0; c < r.size(); ++c) w[c] = std::max(w[c], width(r[c]));
        std::string out;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            std::string line;
            for (std::size_t c = 0; c < rows_[i].size(); ++c) {
                line += rows_[i][c];
                if (c + 1 < rows_[i].size()) line += std::string(w[c] - width(rows_[i][c]) + 2, ' ');
            }
            out += line + "\n";
            if (i == 0) {
                std::size_t total = 0;
                for (std::size_t c = 0; c < w.size(); ++c) total += w[c] + (c + 1 < w.size() ? 2 : 0);
                out += std::string(total, '-') + "\n";
            }
        }
        return out;
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

std::string join(const json& names) {
    std::string s;
    for (const auto& n : names) s += (s.empty() ? "" : ", ") + n.get<std::string>();
    return s.empty() ? "-" : s;
}

}  // namespace

std::string render_tables(const json& report) {
    std::ostringstream out;
    const auto& rows = report.at("rows");
    const auto& ds = report.at("dataset");
    out << "Dataset: n = " << ds.at("n").get<std::size_t>() << ", d = " << ds.at("d").get<std::size_t>()
        << "; protected = " << report.at("protected").get<std::string>()
        << ", outcome = " << report.at("outcome").get<std::string>() << "\n\n";

    for (const char* mode : {"adjacency", "orientation"}) {
        Table t({"graph", "F1", "SHD", "FDR", "TPR", "FPR"});
        for (const auto& r : rows) {
            if (!r.contains("structure") || !r["structure"].contains(mode)) continue;
            const auto& s = r["structure"][mode];
            t.add({r["graph"], fixed(s["f1"]), fixed(s["shd"], 1), fixed(s["fdr"]), fixed(s["tpr"]), fixed(s["fpr"])});
        }
        if (!t.empty()) out << "Structural metrics (" << mode << ")\n" << t.render() << "\n";
    }
    {
        Table t({"graph", "F1", "SHD", "FDR", "TPR", "FPR"});
        for (const auto& r : rows) {
            if (!r.contains("structure") || !r["structure"].contains("bootstrap")) continue;
            const auto& b = r["structure"]["bootstrap"];
            t.add({r["graph"], mean_sd(b["f1"]), mean_sd(b["shd"], 1), mean_sd(b["fdr"]), mean_sd(b["tpr"]),
                   mean_sd(b["fpr"])});
        }
        if (!t.empty())
            out << "Structural metrics, bootstrap mean ± SD (" << report.at("compare_mode").get<std::string>() << ")\n"
                << t.render() << "\n";
    }
    {
        Table t({"graph", "mode", "mediators (W)", "confounders (Z)"});
        for (const auto& r : rows)
            if (r.contains("sfm"))
                t.add({r["graph"], r["sfm"]["mode"], join(r["sfm"]["mediators"]), join(r["sfm"]["confounders"])});
        if (!t.empty()) out << "Standard Fairness Model roles\n" << t.render() << "\n";
    }
    std::string units;
    {
        Table t({"graph", "TV", "Ctf-DE", "Ctf-IE", "Ctf-SE"});
        Table b({"graph", "TV", "Ctf-DE", "Ctf-IE", "Ctf-SE"});
        for (const auto& r : rows) {
            if (!r.contains("fairness")) continue;
            const auto& f = r["fairness"];
            units = f["units"];
            t.add({r["graph"], fixed(f["tv"]), fixed(f["ctf_de"]), fixed(f["ctf_ie"]), fixed(f["ctf_se"])});
            const auto& bs = f["bootstrap"];
            if (bs["replicates"].get<std::size_t>() > 0)
                b.add({r["graph"], mean_sd(bs["tv"]), mean_sd(bs["ctf_de"]), mean_sd(bs["ctf_ie"]), mean_sd(bs["ctf_se"])});
        }
        if (!t.empty()) out << "TV and decomposition by graph (" << units << ")\n" << t.render() << "\n";
        if (!b.empty()) out << "Decomposition, bootstrap mean ± SD (" << units << ")\n" << b.render() << "\n";
    }
    {
        Table t({"graph", "effect", "variable", "contribution"});
        for (const auto& r : rows) {
            if (!r.contains("fairness")) continue;
            for (const auto& c : r["fairness"]["contributions"])
                t.add({r["graph"], c["effect"], c["variable"], fixed(c["value"])});
        }
        if (!t.empty()) out << "Individual contributions (" << units << ")\n" << t.render() << "\n";
    }
    {
        Table t({"graph", "DE", "IE", "SE"});
        bool any_unstable = false;
        for (const auto& r : rows) {
            if (!r.contains("cfur")) continue;
            std::vector<std::string> cells{r["graph"]};
            for (const auto& p : r["cfur"]["paths"]) {
                const bool boot = r["cfur"]["replicates"].get<std::size_t>() > 0;
                std::string cell = boot ? mean_sd(p["bootstrap"]["ratio"], 2) : fixed(p["ratio"], 2);
                if (p["unstable"].get<bool>()) {
                    cell += " *";
                    any_unstable = true;
                }
                cells.push_back(cell);
            }
            t.add(cells);
        }
        if (!t.empty()) {
            out << "CFUR by path (bootstrap mean ± SD when resampled)\n" << t.render();
            if (any_unstable) out << "* utility cost below 1e-9; ratio computed with the cost floored at 1e-9\n";
            out << "\n";
        }
    }
    bool header = false;
    for (const auto& r : rows) {
        if (r["status"] == "ok") continue;
        if (!header) out << "Failed rows\n";
        header = true;
        out << r["graph"].get<std::string>() << ": " << r["failed_stage"].get<std::string>() << ": "
            << r["error"].get<std::string>() << "\n";
    }
    for (const auto& w : report.at("warnings")) out << "warning: " << w.get<std::string>() << "\n";
    return out.str();
}

}  // namespace fairpath
