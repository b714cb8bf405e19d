#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fairpath/pipeline.hpp"
#include "fairpath/report.hpp"
#include "fairpath/scm.hpp"

using namespace fairpath;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScmSpec small_spec() {
    ScmSpec s;
    s.nodes = {{"age"}, {"sex", VariableKind::Binary}, {"score"}, {"outcome", VariableKind::Binary}};
    s.edges = {{"age", "score", 0.6}, {"sex", "score", 0.8}, {"score", "outcome", 1.0},
               {"sex", "outcome", -0.7}, {"age", "outcome", 0.5}};
    return s;
}

PipelineConfig small_config() {
    PipelineConfig cfg;
    cfg.protected_attribute = "sex";
    cfg.outcome = "outcome";
    cfg.algorithms = {Algorithm::Pc, Algorithm::Ges};
    cfg.seed = 5;
    cfg.compare_bootstrap = 4;
    cfg.decomp_bootstrap = 6;
    cfg.cfur_bootstrap = 5;
    cfg.mc_draws = 5;
    return cfg;
}

}  // namespace

TEST_CASE("pipeline config parsing") {
    const auto cfg = parse_pipeline_config(R"({"data": "d.csv", "truth": "/abs/t.txt", "protected": "sex",
        "outcome": "y", "algorithms": ["pc", "FCI"], "seed": 3, "notears": {"threshold": 0.2},
        "sfm_mode": "possible", "kinds": {"sex": "binary"}})",
                                           "/base");
    CHECK(cfg.data == std::filesystem::path("/base/d.csv"));
    CHECK(cfg.truth == std::filesystem::path("/abs/t.txt"));
    CHECK(cfg.algorithms == std::vector<Algorithm>{Algorithm::Pc, Algorithm::Fci});
    CHECK(cfg.discovery.notears.threshold == 0.2);
    CHECK(cfg.sfm_mode == SfmMode::Possible);
    CHECK(cfg.kinds.at("sex") == VariableKind::Binary);
    CHECK(cfg.compare_bootstrap == 30);
    CHECK(cfg.decomp_bootstrap == 200);

    CHECK_THROWS(parse_pipeline_config(R"({"protected": "a", "outcome": "b", "bogus": 1})"));
    CHECK_THROWS(parse_pipeline_config(R"({"protected": "a", "outcome": "b", "alpha": 2})"));
    CHECK_THROWS(parse_pipeline_config(R"({"protected": "a", "outcome": "b", "algorithms": ["lingam"]})"));
    CHECK_THROWS(parse_pipeline_config(R"({"outcome": "b"})"));
    CHECK_THROWS(parse_pipeline_config("not json"));

    auto other = cfg;
    CHECK(config_hash(other) == config_hash(cfg));
    other.seed = 4;
    CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("pipeline rows, determinism and failure isolation") {
    const auto spec = small_spec();
    const auto data = sample(spec, 400, 2);
    const auto truth = observed_dag(spec);
    auto cfg = small_config();

    const auto rep = run_pipeline(cfg, data, truth);
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.rows[0].name == "ground_truth");
    for (const auto& r : rep.rows) {
        CHECK(r.error.empty());
        REQUIRE(r.fairness);
        CHECK(r.fairness->point.tv == rep.rows[0].fairness->point.tv);
        CHECK(r.fairness->units == "percentage_points");
    }
    CHECK(rep.rows[0].adjacency->f1 == 1.0);
    CHECK(rep.rows[1].structure_bootstrap->replicates == 4);

    const auto a = to_json(rep).dump(2);
    const auto b = to_json(run_pipeline(cfg, data, truth)).dump(2);
    CHECK(a == b);
    CHECK(a.find("timestamp") == std::string::npos);

    cfg.algorithms.clear();
    CHECK(run_pipeline(cfg, data, truth).rows.size() == 1);

    cfg.algorithms = {Algorithm::Notears, Algorithm::Pc};
    cfg.discovery.notears.max_dual_iters = 1;
    cfg.discovery.notears.h_tol = 1e-30;
    const auto failed = run_pipeline(cfg, data, truth);
    REQUIRE(failed.rows.size() == 3);
    CHECK(failed.rows[1].failed_stage == "discover");
    CHECK_FALSE(failed.rows[1].error.empty());
    CHECK(failed.rows[2].error.empty());
    const auto j = to_json(failed);
    CHECK(j["rows"][1]["status"] == "error");
}

TEST_CASE("table renderer matches the golden file") {
    const auto dir = std::filesystem::path(FAIRPATH_TEST_DATA_DIR);
    const auto report = nlohmann::json::parse(slurp(dir / "report_fixture.json"));
    const auto rendered = render_tables(report);
    const auto golden = slurp(dir / "tables_golden.txt");
    CHECK(rendered == golden);
}
