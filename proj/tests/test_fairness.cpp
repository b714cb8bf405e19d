#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fairpath/cfur.hpp"
#include "fairpath/fairness.hpp"
#include "fairpath/graph_io.hpp"
#include "fairpath/scm.hpp"
#include "fairpath/sfm.hpp"
#include "oracles.hpp"

using namespace fairpath;
using doctest::Approx;

namespace {

using V = std::vector<VariableId>;

bool subset(const V& a, const V& b) {
    V sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return std::includes(sb.begin(), sb.end(), sa.begin(), sa.end());
}

// x binary; m = b x + e; y = a x + c m + e; optional confounder z -> x, z -> y.
ScmSpec mediation_spec(double a, double b, double c, double conf = 0.0) {
    ScmSpec s;
    s.nodes = {{"z"}, {"x", VariableKind::Binary}, {"m"}, {"y"}};
    s.edges = {{"x", "m", b}, {"x", "y", a}, {"m", "y", c}};
    if (conf != 0.0) {
        s.edges.push_back({"z", "x", conf});
        s.edges.push_back({"z", "y", conf});
    }
    return s;
}

SfmAssignment sfm_for(const ScmSpec& spec, const Dataset& d, std::string_view x = "x", std::string_view y = "y") {
    return derive_sfm(observed_dag(spec).reindexed(d.names), d.index_of(x), d.index_of(y), SfmMode::Strict);
}

SfmAssignment bare_sfm(const Dataset& d, VariableId x, VariableId y) {
    SfmAssignment s;
    s.x = x;
    s.y = y;
    for (VariableId v = 0; v < d.cols(); ++v)
        if (v != x && v != y) s.dropped.push_back(v);
    return s;
}

DecompConfig quick(std::uint64_t seed = 1) {
    DecompConfig c;
    c.bootstrap_B = 0;
    c.mc_draws = 20;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("sfm on a chain with a confounder of the outcome") {
    const auto g = parse_graph("x -> m\nm -> y\nc -> y\ny -> after\n");
    const auto s = derive_sfm(g, g.index_of("x"), g.index_of("y"), SfmMode::Strict);
    CHECK(s.w == V{g.index_of("m")});
    CHECK(s.z == V{g.index_of("c")});
    CHECK(s.dropped == V{g.index_of("after")});
    CHECK_THROWS(derive_sfm(g, 0, 0, SfmMode::Strict));
    CHECK(default_sfm_mode(g) == SfmMode::Strict);
}

TEST_CASE("sfm possible mode") {
    SUBCASE("undirected edges count as possibly directed") {
        const auto g = parse_graph("x -- m\nm -> y\n");
        CHECK(derive_sfm(g, g.index_of("x"), g.index_of("y"), SfmMode::Strict).w.empty());
        CHECK(derive_sfm(g, g.index_of("x"), g.index_of("y"), SfmMode::Possible).w == V{g.index_of("m")});
        CHECK(default_sfm_mode(g) == SfmMode::Possible);
    }
    SUBCASE("bidirected edges never carry direction") {
        const auto g = parse_graph("x <-> m\nm <-> y\nx -> y\n");
        const auto s = derive_sfm(g, g.index_of("x"), g.index_of("y"), SfmMode::Possible);
        CHECK(s.w.empty());
        CHECK(s.z.empty());
    }
    SUBCASE("circle-arrow is traversed forwards only") {
        const auto g = parse_graph("x o-> m\nm o-> y\n");
        const auto s = derive_sfm(g, g.index_of("x"), g.index_of("y"), SfmMode::Possible);
        CHECK(s.w == V{g.index_of("m")});
        const auto back = parse_graph("y o-> m\nm o-> x\n");
        CHECK(derive_sfm(back, back.index_of("x"), back.index_of("y"), SfmMode::Possible).w.empty());
    }
    SUBCASE("mediators are ordered along directed edges") {
        const auto g = parse_graph("x -> b\nx -> a\nb -> a\na -> y\nb -> y\n");
        const auto s = derive_sfm(g, g.index_of("x"), g.index_of("y"), SfmMode::Strict);
        CHECK(s.w == V{g.index_of("b"), g.index_of("a")});
    }
}

TEST_CASE("sfm properties over random graphs") {
    Rng rng(123);
    for (int rep = 0; rep < 200; ++rep) {
        const auto d = 3 + rng.index(7);
        const Dag g = oracle::random_dag(d, 0.4, rng);
        const VariableId x = rng.index(d);
        VariableId y = rng.index(d - 1);
        if (y >= x) ++y;
        const auto strict = derive_sfm(g, x, y, SfmMode::Strict);
        CHECK_NOTHROW(strict.validate(d));
        // A graph with some marks weakened to circles or tails.
        MixedGraph weak = g;
        for (const auto& e : g.edges()) {
            const double u = rng.uniform();
            if (u < 0.2) weak.add_undirected(e.a, e.b);
            else if (u < 0.4) weak.set_edge(e.a, e.b, EndpointMark::Circle, EndpointMark::Circle);
        }
        const auto ws = derive_sfm(weak, x, y, SfmMode::Strict);
        const auto wp = derive_sfm(weak, x, y, SfmMode::Possible);
        CHECK_NOTHROW(wp.validate(d));
        CHECK(subset(ws.w, wp.w));
        // Removing an edge never adds a strict mediator.
        const auto edges = g.edges();
        if (!edges.empty()) {
            Dag smaller = g;
            const auto& e = edges[rng.index(edges.size())];
            smaller.remove_edge(e.a, e.b);
            CHECK(subset(derive_sfm(smaller, x, y, SfmMode::Strict).w, strict.w));
        }
    }
}

TEST_CASE("sfm roles on the shipped AD spec") {
    const auto g = observed_dag(ad_default_spec());
    const auto s = derive_sfm(g, g.index_of("sex"), g.index_of("ventricular_volume"), SfmMode::Strict);
    CHECK(subset(V{g.index_of("moca"), g.index_of("brain_volume")}, s.w));
    CHECK(subset(V{g.index_of("education"), g.index_of("age"), g.index_of("apoe4"), g.index_of("av45"), g.index_of("tau")},
                 s.z));
}

TEST_CASE("tv is a difference of group means") {
    Dataset d;
    d.names = {"x", "y"};
    d.kinds = {VariableKind::Binary, VariableKind::Continuous};
    d.values.resize(4, 2);
    d.values << 0, 0.2, 0, 0.4, 1, 0.5, 1, 0.5;
    const auto s = bare_sfm(d, 0, 1);
    CHECK(tv(d, s, quick()) == Approx(0.2));
    d.values.col(1).setConstant(3.0);
    CHECK(tv(d, s, quick()) == 0.0);
    d.kinds[1] = VariableKind::Binary;
    d.values.col(1) << 0, 1, 1, 1;
    CHECK(tv(d, s, quick()) == Approx(50.0));  // percentage points
    DecompConfig flipped = quick();
    std::swap(flipped.x0, flipped.x1);
    CHECK(tv(d, s, flipped) == Approx(-50.0));
}

TEST_CASE("decomposition errors") {
    Dataset d;
    d.names = {"x", "y"};
    d.kinds = {VariableKind::Binary, VariableKind::Continuous};
    d.values.resize(3, 2);
    d.values << 0, 1, 0, 2, 0, 3;
    CHECK_THROWS(tv(d, bare_sfm(d, 0, 1), quick()));  // level 1 absent
    d.kinds[0] = VariableKind::Continuous;
    CHECK_THROWS(tv(d, bare_sfm(d, 0, 1), quick()));  // not binary
    DecompConfig bad = quick();
    bad.x1 = 0.0;
    CHECK_THROWS(bad.validate());
    bad = quick();
    bad.mc_draws = 0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("collapse case gives a pure direct effect") {
    const auto spec = mediation_spec(0.7, 0.5, 0.4, 0.6);
    for (bool binary : {false, true}) {
        auto data = sample(spec, 800, 3);
        if (binary) {
            for (Eigen::Index i = 0; i < data.rows(); ++i) data.values(i, 3) = data.values(i, 3) > 0.3 ? 1.0 : 0.0;
            data.kinds[3] = VariableKind::Binary;
        }
        const auto r = estimate_effects(data, bare_sfm(data, 1, 3), quick());
        CHECK(r.effects.ctf_ie == 0.0);
        CHECK(r.effects.ctf_se == 0.0);
        CHECK(std::abs(r.effects.ctf_de - r.effects.tv) < 1e-6);
        CHECK(r.model == "saturated");
    }
}

TEST_CASE("identity holds on random simulated data") {
    Rng rng(8);
    for (int rep = 0; rep < 20; ++rep) {
        auto spec = oracle::random_linear_spec(5, 0.5, 0.3, 1.0, rng);
        spec.nodes[0].kind = VariableKind::Binary;
        const bool binary_y = rep % 2 == 1;
        if (binary_y) spec.nodes[4].kind = VariableKind::Binary;
        const auto data = sample(spec, 400, rep);
        const auto g = observed_dag(spec);
        const auto s = derive_sfm(g, 0, 4, SfmMode::Strict);
        const auto e = estimate_effects(data, s, quick(rep)).effects;
        CHECK(std::abs(e.tv - (e.ctf_de - e.ctf_ie - e.ctf_se)) < 1e-9);
        if (s.w.empty()) CHECK(e.ctf_ie == 0.0);
        // TV does not depend on the graph.
        CHECK(e.tv == tv(data, bare_sfm(data, 0, 4), quick()));
    }
}

TEST_CASE("closed-form mediation") {
    const double a = 0.8, b = 1.0, c = 0.5;
    const auto spec = mediation_spec(a, b, c);
    const auto data = sample(spec, 20000, 11);
    const auto e = estimate_effects(data, sfm_for(spec, data), quick()).effects;
    CHECK(e.ctf_de == Approx(a).epsilon(0.05));
    CHECK(e.ctf_ie == Approx(-b * c).epsilon(0.05));
    CHECK(std::abs(e.ctf_se) < 0.05);
}

TEST_CASE("purely spurious association") {
    ScmSpec spec;
    spec.nodes = {{"z"}, {"x", VariableKind::Binary}, {"y"}};
    spec.edges = {{"z", "x", 1.5}, {"z", "y", 1.0}};
    const auto data = sample(spec, 20000, 4);
    const auto s = sfm_for(spec, data);
    CHECK(s.z == V{data.index_of("z")});
    const auto e = estimate_effects(data, s, quick()).effects;
    CHECK(std::abs(e.ctf_de) < 0.05);
    CHECK(e.ctf_ie == 0.0);
    // With se = (C - D) + (E0 - B) the spurious part carries the sign of -tv.
    CHECK(e.ctf_se == Approx(-e.tv).epsilon(0.05));
}

TEST_CASE("contributions") {
    const auto spec = mediation_spec(0.5, 1.0, 0.7, 0.8);
    const auto data = sample(spec, 3000, 5);
    const auto s = sfm_for(spec, data);
    const auto cfg = quick();
    const auto e = estimate_effects(data, s, cfg).effects;
    const auto ie = contributions(data, s, cfg, EffectKind::Indirect);
    REQUIRE(ie.size() == 1);
    CHECK(ie[0].variable == "m");
    CHECK(ie[0].value == Approx(e.ctf_ie).epsilon(1e-12));
    const auto se = contributions(data, s, cfg, EffectKind::Spurious);
    REQUIRE(se.size() == 1);
    CHECK(se[0].value * e.ctf_se > 0.0);
    CHECK(contribution(data, s, cfg, EffectKind::Indirect, "m").value == ie[0].value);
    CHECK_THROWS(contribution(data, s, cfg, EffectKind::Indirect, "z"));
    CHECK_THROWS(contributions(data, bare_sfm(data, 1, 3), cfg, EffectKind::Indirect));

    SUBCASE("mediator without an outcome coefficient contributes nothing") {
        ScmSpec s2;
        s2.nodes = {{"x", VariableKind::Binary}, {"m1"}, {"m2"}, {"y"}};
        s2.edges = {{"x", "m1", 1.0}, {"x", "m2", 1.0}, {"m1", "y", 1.0}, {"x", "y", 0.5}};
        const auto d2 = sample(s2, 5000, 2);
        auto sf = derive_sfm(observed_dag(s2), 0, 3, SfmMode::Strict);
        // Declare m2 a mediator even though y does not depend on it.
        sf.w.push_back(2);
        sf.dropped.clear();
        const auto cs = contributions(d2, sf, cfg, EffectKind::Indirect);
        CHECK(std::abs(cs[1].value) < 0.05);
        CHECK(std::abs(cs[0].value + 1.0) < 0.1);
    }
}

TEST_CASE("logistic separation falls back to a linear model") {
    Dataset d;
    d.names = {"x", "z", "y"};
    d.kinds = {VariableKind::Binary, VariableKind::Continuous, VariableKind::Binary};
    d.values.resize(40, 3);
    for (Eigen::Index i = 0; i < 40; ++i) {
        d.values(i, 0) = i % 2;
        d.values(i, 1) = static_cast<double>(i) - 19.5;
        d.values(i, 2) = i >= 20 ? 1.0 : 0.0;
    }
    SfmAssignment s;
    s.x = 0;
    s.y = 2;
    s.z = {1};
    const auto r = estimate_effects(d, s, quick());
    CHECK(r.model == "linear");
    REQUIRE_FALSE(r.warnings.empty());
    CHECK(r.warnings[0].find("linear probability") != std::string::npos);
}

TEST_CASE("decompose is deterministic and its bootstrap SD shrinks with n") {
    const auto spec = mediation_spec(0.5, 0.8, 0.6, 0.5);
    DecompConfig cfg;
    cfg.bootstrap_B = 40;
    cfg.mc_draws = 10;
    cfg.seed = 99;
    const auto small = sample(spec, 500, 1);
    const auto r1 = decompose(small, sfm_for(spec, small), cfg);
    const auto r2 = decompose(small, sfm_for(spec, small), cfg);
    CHECK(r1.ctf_de.sd == r2.ctf_de.sd);
    CHECK(r1.point.ctf_ie == r2.point.ctf_ie);
    CHECK(r1.replicate_effects.size() == 40);
    const auto mid = sample(spec, 2000, 1);
    const auto big = sample(spec, 8000, 1);
    const auto r3 = decompose(mid, sfm_for(spec, mid), cfg);
    const auto r4 = decompose(big, sfm_for(spec, big), cfg);
    for (auto pick : {&DecompResult::tv, &DecompResult::ctf_de, &DecompResult::ctf_ie, &DecompResult::ctf_se}) {
        CHECK((r1.*pick).sd > (r3.*pick).sd);
        CHECK((r3.*pick).sd > (r4.*pick).sd);
    }
}

TEST_CASE("predictors for blocked paths") {
    const auto spec = mediation_spec(0.8, 0.6, 0.5, 0.7);
    const auto data = sample(spec, 1000, 6);
    const auto s = sfm_for(spec, data);
    const auto p = train_predictors(data, s, quick());
    CHECK(p.full.inputs.size() == 3);
    CHECK(p.de_blocked.inputs == V{s.z[0], s.w[0]});
    CHECK(p.ie_blocked.inputs == V{s.x, s.z[0]});
    CHECK(p.se_blocked.inputs == V{s.x, s.w[0]});

    SUBCASE("nothing to block leaves the predictor unchanged") {
        const auto bare = bare_sfm(data, 1, 3);
        const auto q = train_predictors(data, bare, quick());
        CHECK(q.ie_blocked.coefficients == q.full.coefficients);
        CHECK(q.se_blocked.coefficients == q.full.coefficients);
        CHECK(q.de_blocked.inputs.empty());
        CHECK(q.de_blocked.intercept == Approx(data.values.col(3).mean()));
    }
}

TEST_CASE("ratio rules") {
    CHECK(cfur_ratio(2.0, 4.0) == std::pair{0.5, false});
    CHECK(cfur_ratio(1.0, -2.0) == std::pair{-0.5, false});
    const auto [r, unstable] = cfur_ratio(0.0, 0.0);
    CHECK(r == 0.0);
    CHECK(unstable);
    CHECK(cfur_ratio(1e-6, 1e-12) == std::pair{1e-6 / kCfurEpsilon, true});
}

TEST_CASE("cfur") {
    SUBCASE("nested losses and the identity on predictor outputs") {
        const auto spec = mediation_spec(0.8, 0.6, 0.5, 0.7);
        const auto data = sample(spec, 1500, 2);
        const auto s = sfm_for(spec, data);
        const auto cfg = quick();
        const auto r = cfur(data, s, cfg);
        for (const auto& p : r.paths) CHECK(p.loss_full <= p.loss_blocked + 1e-9);
        const auto preds = train_predictors(data, s, cfg);
        Dataset d = data;
        d.values.col(3) = preds.full.predict(data);
        DecompConfig lin = cfg;
        lin.outcome_model = OutcomeModel::Linear;
        const auto e = estimate_effects(d, s, lin).effects;
        CHECK(r.at(FairnessPath::Direct).component_full == Approx(e.ctf_de));
        CHECK(e.tv == Approx(r.at(FairnessPath::Direct).component_full - r.at(FairnessPath::Indirect).component_full -
                             r.at(FairnessPath::Spurious).component_full));
    }
    SUBCASE("pure direct effect") {
        ScmSpec spec;
        spec.nodes = {{"x", VariableKind::Binary}, {"y"}};
        spec.edges = {{"x", "y", 1.0}};
        const auto data = sample(spec, 2000, 7);
        auto cfg = quick();
        cfg.bootstrap_B = 20;
        const auto r = cfur(data, sfm_for(spec, data), cfg);
        const auto& de = r.at(FairnessPath::Direct);
        CHECK(de.ratio > 0.0);
        CHECK_FALSE(de.unstable);
        for (auto p : {FairnessPath::Indirect, FairnessPath::Spurious}) {
            CHECK(r.at(p).fairness_gain == 0.0);
            CHECK(r.at(p).utility_cost == 0.0);
            CHECK(r.at(p).ratio == 0.0);
            CHECK(r.at(p).unstable);
            CHECK(r.at(p).unstable_replicates == 20);
        }
        CHECK(de.ratio_bootstrap.count == 20);
        CHECK(de.ratio_bootstrap.sd >= 0.0);
    }
    SUBCASE("binary outcome uses log-loss") {
        auto spec = mediation_spec(1.0, 0.5, 0.5, 0.3);
        spec.nodes[3].kind = VariableKind::Binary;
        const auto data = sample(spec, 1500, 3);
        const auto r = cfur(data, sfm_for(spec, data), quick());
        CHECK(r.loss == "log_loss");
        for (const auto& p : r.paths) CHECK(p.loss_full <= p.loss_blocked + 1e-9);
    }
}
