#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "fairpath/bootstrap.hpp"
#include "fairpath/dataset.hpp"
#include "fairpath/rng.hpp"
#include "fairpath/scm.hpp"
#include "fairpath/stats.hpp"
#include "oracles.hpp"

using namespace fairpath;
using doctest::Approx;

TEST_CASE("rng streams are reproducible and distinct") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 10; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        CHECK(x != c.next());
    }
    CHECK(derive_seed(1, "node:a") != derive_seed(1, "node:b"));
    CHECK(derive_seed(1, std::uint64_t{1}) != derive_seed(2, std::uint64_t{1}));

    Rng r(7);
    const int n = 200000;
    double s = 0, ss = 0, su = 0;
    std::vector<int> bins(5, 0);
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s += z;
        ss += z * z;
        su += r.uniform();
        ++bins[r.index(5)];
    }
    CHECK(s / n == Approx(0.0).epsilon(0.01).scale(1));
    CHECK(ss / n == Approx(1.0).epsilon(0.02));
    CHECK(su / n == Approx(0.5).epsilon(0.01));
    for (int b : bins) CHECK(std::abs(b - n / 5) < 1000);
}

TEST_CASE("summary statistics") {
    const auto s = summarize({1, 2, 3, 4, 5});
    CHECK(s.mean == Approx(3.0));
    CHECK(s.sd == Approx(std::sqrt(2.5)));
    CHECK(s.ci_low == Approx(1.1));
    CHECK(s.ci_high == Approx(4.9));
    CHECK(summarize({}).count == 0);
    CHECK(summarize({2.0}).sd == 0.0);
}

TEST_CASE("replicates are stored by index regardless of worker count") {
    const std::function<std::optional<double>(std::size_t)> fn = [](std::size_t b) -> std::optional<double> {
        if (b == 3) throw std::runtime_error("boom");
        Rng r(replicate_seed(9, b));
        return r.uniform();
    };
    const auto one = run_replicates(20, fn);
    CHECK_FALSE(one[3].has_value());
    for (std::size_t b = 0; b < 20; ++b)
        if (b != 3) CHECK(*one[b] == Rng(replicate_seed(9, b)).uniform());
    CHECK_NOTHROW(check_failure_rate(4, 20, "x"));
    CHECK_THROWS(check_failure_rate(5, 20, "x"));
}

TEST_CASE("csv loading") {
    SUBCASE("kinds and order") {
        const auto r = parse_csv("sex,age,y\n1,50.5,0\n0,61,1\n1,44,1\n");
        CHECK(r.data.names == std::vector<std::string>{"sex", "age", "y"});
        CHECK(r.data.is_binary(0));
        CHECK_FALSE(r.data.is_binary(1));
        CHECK(r.data.is_binary(2));
        CHECK(r.data.rows() == 3);
    }
    SUBCASE("hints override detection") {
        const auto r = parse_csv("a,b\n1,0\n0,1\n", {{"a", VariableKind::Continuous}});
        CHECK_FALSE(r.data.is_binary(0));
        CHECK_THROWS(parse_csv("a\n2\n3\n", {{"a", VariableKind::Binary}}));
    }
    SUBCASE("missing cells drop the row") {
        const auto r = parse_csv("a,b\n1,2\n3,NA\n5,6\n,7\n");
        CHECK(r.data.rows() == 2);
        CHECK(r.dropped_rows == 2);
        CHECK_FALSE(r.warnings.empty());
    }
    SUBCASE("errors") {
        CHECK_THROWS(parse_csv(""));
        CHECK_THROWS(parse_csv("a,b\n"));
        try {
            parse_csv("a,b\n1,2\n3,x\n");
            FAIL("expected error");
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            CHECK(msg.find("line 3") != std::string::npos);
            CHECK(msg.find("b") != std::string::npos);
        }
    }
    SUBCASE("format round trip") {
        Dataset d;
        d.names = {"x", "flag"};
        d.kinds = {VariableKind::Continuous, VariableKind::Binary};
        d.values.resize(3, 2);
        d.values << 0.1, 1, -2.5e-7, 0, 1e10 / 3.0, 1;
        const auto back = parse_csv(format_csv(d)).data;
        CHECK(back.values == d.values);
        CHECK(back.kinds == d.kinds);
    }
}

TEST_CASE("standardize leaves binary columns alone") {
    const auto d = parse_csv("a,b\n1,2\n0,4\n1,9\n0,1\n").data;
    const auto s = standardize(d);
    CHECK(s.values.col(0) == d.values.col(0));
    CHECK(s.values.col(1).mean() == Approx(0.0).scale(1));
    const double var = (s.values.col(1).array() - s.values.col(1).mean()).square().sum() / 3.0;
    CHECK(var == Approx(1.0));
}

TEST_CASE("fisher z hand values") {
    Eigen::MatrixXd corr(2, 2);
    corr << 1, 0.5, 0.5, 1;
    const auto r = fisher_z_test(corr, 103, 0, 1, {}, 0.05);
    CHECK(r.statistic == Approx(std::atanh(0.5) * 10.0));
    CHECK(r.statistic == Approx(5.493).epsilon(1e-3));
    CHECK(r.p_value == Approx(std::erfc(r.statistic / std::sqrt(2.0))));
    CHECK_FALSE(r.independent);
    corr << 1, 0.01, 0.01, 1;
    CHECK(fisher_z_test(corr, 103, 0, 1, {}, 0.05).independent);
}

TEST_CASE("partial correlation equals residual correlation") {
    Rng rng(3);
    const auto spec = oracle::random_linear_spec(5, 0.6, 0.5, 1.5, rng);
    const auto d = sample(spec, 500, 4);
    const auto corr = correlation_matrix(d);
    const std::vector<VariableId> given{2, 3};
    const auto z = gather_columns(d, given);
    auto resid = [&](VariableId v) {
        Eigen::MatrixXd x(d.rows(), 3);
        x << Eigen::VectorXd::Ones(d.rows()), z;
        const Eigen::VectorXd y = d.values.col(v);
        return Eigen::VectorXd(y - x * (x.transpose() * x).ldlt().solve(x.transpose() * y));
    };
    const Eigen::VectorXd r0 = resid(0), r1 = resid(1);
    const Eigen::VectorXd c0 = r0.array() - r0.mean(), c1 = r1.array() - r1.mean();
    CHECK(partial_correlation(corr, 0, 1, given) == Approx(c0.dot(c1) / (c0.norm() * c1.norm())));
}

TEST_CASE("collinear conditioning set is a domain error") {
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(4, 4);
    corr(2, 3) = corr(3, 2) = 1.0;
    const std::vector<VariableId> s{2, 3};
    CHECK_THROWS_AS(partial_correlation(corr, 0, 1, s), std::domain_error);
}

TEST_CASE("ols against normal equations and rank checks") {
    Rng rng(12);
    Eigen::MatrixXd x(200, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    Eigen::VectorXd y = 1.5 + (x * Eigen::Vector3d(0.5, -2.0, 1.0)).array();
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += 0.1 * rng.normal();
    const auto fit = ols_fit(x, y);
    Eigen::MatrixXd design(200, 4);
    design << Eigen::VectorXd::Ones(200), x;
    const Eigen::VectorXd beta = (design.transpose() * design).ldlt().solve(design.transpose() * y);
    CHECK(fit.intercept == Approx(beta(0)));
    for (int k = 0; k < 3; ++k) CHECK(fit.coefficients(k) == Approx(beta(k + 1)));

    Eigen::MatrixXd dup(200, 2);
    dup << x.col(0), 2.0 * x.col(0);
    try {
        ols_fit(dup, y, {"a", "b"});
        FAIL("expected rank error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("dependent") != std::string::npos);
    }
    const auto empty = ols_fit(Eigen::MatrixXd(200, 0), y);
    CHECK(empty.intercept == Approx(y.mean()));
}

TEST_CASE("logistic regression") {
    Rng rng(2);
    const Eigen::Index n = 3000;
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = rng.normal();
        y(i) = rng.bernoulli(sigmoid(-0.5 + 1.2 * x(i, 0) - 0.7 * x(i, 1))) ? 1.0 : 0.0;
    }
    const auto fit = logistic_fit(x, y);
    CHECK(fit.converged);
    CHECK(fit.coefficients(0) == Approx(1.2).epsilon(0.15));

    SUBCASE("gradient of the log-likelihood vanishes at the estimate (finite differences)") {
        const double h = 1e-6;
        auto ll = [&](double b0, Eigen::VectorXd b) { return mean_log_likelihood(x, y, b0, b); };
        const double g0 = (ll(fit.intercept + h, fit.coefficients) - ll(fit.intercept - h, fit.coefficients)) / (2 * h);
        CHECK(std::abs(g0) < 1e-6);
        for (int k = 0; k < 2; ++k) {
            Eigen::VectorXd up = fit.coefficients, dn = fit.coefficients;
            up(k) += h;
            dn(k) -= h;
            CHECK(std::abs((ll(fit.intercept, up) - ll(fit.intercept, dn)) / (2 * h)) < 1e-6);
        }
    }
    SUBCASE("link derivative matches finite differences") {
        Rng r(99);
        for (int k = 0; k < 10; ++k) {
            const double t = 6.0 * (r.uniform() - 0.5);
            const double h = 1e-5;
            const double fd = (sigmoid(t + h) - sigmoid(t - h)) / (2 * h);
            CHECK(std::abs(fd - sigmoid(t) * (1 - sigmoid(t))) < 1e-6);
        }
    }
    SUBCASE("separation is flagged") {
        Eigen::MatrixXd xs(6, 1);
        xs << -3, -2, -1, 1, 2, 3;
        Eigen::VectorXd ys(6);
        ys << 0, 0, 0, 1, 1, 1;
        const auto sep = logistic_fit(xs, ys);
        CHECK(sep.separation);
        CHECK_FALSE(sep.converged);
    }
}

TEST_CASE("bic local score") {
    Rng rng(4);
    const auto spec = oracle::random_linear_spec(3, 1.0, 0.5, 1.0, rng);
    const auto d = sample(spec, 400, 1);
    const std::vector<VariableId> pa{0, 1};
    Eigen::MatrixXd x(d.rows(), 3);
    x << Eigen::VectorXd::Ones(d.rows()), d.values.col(0), d.values.col(1);
    const Eigen::VectorXd y = d.values.col(2);
    const double rss = (y - x * (x.transpose() * x).ldlt().solve(x.transpose() * y)).squaredNorm();
    const double n = static_cast<double>(d.rows());
    CHECK(bic_local_score(d, 2, pa).score == Approx(-n * std::log(rss / n) - 2 * std::log(n)));
}

TEST_CASE("scm validation") {
    ScmSpec s;
    s.nodes = {{"a"}, {"b"}, {"a"}};
    s.edges = {{"a", "b", 1.0}, {"b", "a", 1.0}, {"a", "c", 1.0}, {"b", "b", 1.0}};
    s.latents = {{"u", {{"a", 1.0}}}};
    const auto problems = validate(s);
    auto has = [&](const std::string& needle) {
        return std::any_of(problems.begin(), problems.end(), [&](const auto& p) { return p.find(needle) != std::string::npos; });
    };
    CHECK(has("duplicate node"));
    CHECK(has("unknown node"));
    CHECK(has("self-loop"));
    CHECK(has("at least two children"));
    ScmSpec cyc;
    cyc.nodes = {{"a"}, {"b"}};
    cyc.edges = {{"a", "b", 1.0}, {"b", "a", 1.0}};
    CHECK_FALSE(validate(cyc).empty());
    CHECK_THROWS(sample(cyc, 10));
}

TEST_CASE("scm samples match the population covariance") {
    Rng rng(17);
    const auto spec = oracle::random_linear_spec(4, 0.7, 0.5, 1.2, rng);
    const auto d = sample(spec, 40000, 5);
    const Eigen::MatrixXd c = d.values.rowwise() - d.values.colwise().mean();
    const Eigen::MatrixXd emp = c.transpose() * c / static_cast<double>(d.rows() - 1);
    const auto pop = oracle::population_cov(spec);
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j)
            CHECK(std::abs(emp(i, j) - pop(i, j)) < 0.05 * std::sqrt(pop(i, i) * pop(j, j)) + 0.02);
}

TEST_CASE("scm streams, binaries and latents") {
    const auto ad = ad_default_spec();
    CHECK(validate(ad).empty());
    const auto a = sample(ad, 500);
    const auto b = sample(ad, 500);
    CHECK(a.values == b.values);
    CHECK(a.is_binary(a.index_of("sex")));
    CHECK_NOTHROW(a.validate());

    // Adding a node leaves the existing columns untouched.
    auto bigger = ad;
    bigger.nodes.push_back({"extra"});
    bigger.edges.push_back({"age", "extra", 1.0});
    const auto c = sample(bigger, 500);
    CHECK(c.values.leftCols(ad.nodes.size()) == a.values);

    // The latent correlates its children without being emitted.
    const auto big = sample(ad, 20000, 3);
    CHECK(big.cols() == ad.nodes.size());
    const auto corr = correlation_matrix(big);
    CHECK(std::abs(corr(big.index_of("age"), big.index_of("education"))) > 0.1);

    const auto text = format_scm_spec(ad);
    const auto back = parse_scm_spec(text);
    CHECK(sample(back, 50).values == sample(ad, 50).values);
}
