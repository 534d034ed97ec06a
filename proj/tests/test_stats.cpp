#include <gtest/gtest.h>

#include <cmath>

#include "causaforge/distributions.hpp"
#include "causaforge/errors.hpp"
#include "causaforge/evalstats.hpp"
#include "causaforge/rng.hpp"
#include "support/oracles.hpp"

using namespace causaforge;
using namespace causaforge::evalstats;

namespace {

// One reviewer per column, a single group split in two.
RatingMatrix matrix(const std::vector<std::vector<double>>& novelty) {
    std::string csv = "hypothesis_id,group,reviewer,dimension,rating\n";
    for (std::size_t h = 0; h < novelty.size(); ++h)
        for (std::size_t r = 0; r < novelty[h].size(); ++r) {
            const std::string row = "H" + std::to_string(h) + "," + (h % 2 ? "g1" : "g0") + ",R" + std::to_string(r);
            csv += row + ",novelty," + std::to_string(novelty[h][r]) + "\n";
            csv += row + ",usefulness," + std::to_string(novelty[h][r] * (r + 1) + h) + "\n";
        }
    return parse_ratings_csv(csv, {"g0", "g1"});
}

std::vector<std::vector<double>> random_groups(Rng& rng, std::size_t g, std::size_t n) {
    std::vector<std::vector<double>> out(g);
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t k = 0; k < n + rng.below(4); ++k) out[i].push_back(static_cast<double>(i) * 0.3 + rng.normal());
    return out;
}

}  // namespace

TEST(Standardize, Example) {
    const auto z = standardize_ratings(matrix({{1}, {2}, {3}, {5}}));
    // mean 2.75, sample sd sqrt(2.9166...)
    const double sd = std::sqrt((1.75 * 1.75 + 0.75 * 0.75 + 0.25 * 0.25 + 2.25 * 2.25) / 3);
    EXPECT_NEAR(z.at(Dimension::novelty, 0, 0), -1.75 / sd, 1e-12);
    const auto z3 = standardize_ratings(matrix({{1}, {2}, {3}, {2}}));
    EXPECT_NEAR(z3.at(Dimension::novelty, 2, 0), 1 / std::sqrt(2.0 / 3.0), 1e-12);
}

TEST(Standardize, ColumnsCenteredAndScaled) {
    std::string csv = "hypothesis_id,group,reviewer,dimension,rating\n";
    const double v[] = {1, 2, 3};
    const char* grp[] = {"a", "a", "b"};
    for (int h = 0; h < 3; ++h) {
        csv += "H" + std::to_string(h) + "," + grp[h] + ",R,novelty," + std::to_string(v[h]) + "\n";
        csv += "H" + std::to_string(h) + "," + grp[h] + ",R,usefulness," + std::to_string(v[2 - h]) + "\n";
    }
    csv += "H3,b,R,novelty,2\nH3,b,R,usefulness,2\n";
    const auto z = standardize_ratings(parse_ratings_csv(csv, {"a", "b"}));
    double sum = 0;
    for (std::size_t h = 0; h < 4; ++h) sum += z.at(Dimension::novelty, h, 0);
    EXPECT_NEAR(sum, 0.0, 1e-12);

    const auto m = load_ratings(std::filesystem::path(CAUSAFORGE_SOURCE_DIR) / "data/ratings.csv");
    const auto zz = standardize_ratings(m);
    for (const auto d : kDimensions)
        for (std::size_t r = 0; r < m.reviewers.size(); ++r) {
            double s = 0, ss = 0;
            for (std::size_t h = 0; h < m.hypotheses.size(); ++h) {
                s += zz.at(d, h, r);
                ss += zz.at(d, h, r) * zz.at(d, h, r);
            }
            EXPECT_NEAR(s, 0.0, 1e-12);
            EXPECT_NEAR(ss / static_cast<double>(m.hypotheses.size() - 1), 1.0, 1e-12);
        }
}

TEST(Standardize, ThreeValueExample) {
    std::string csv = "hypothesis_id,group,reviewer,dimension,rating\n";
    for (int h = 0; h < 3; ++h)
        for (const char* d : {"novelty", "usefulness"})
            csv += "H" + std::to_string(h) + ",g,R," + d + "," + std::to_string(h + 1) + "\n";
    const auto z = standardize_ratings(parse_ratings_csv(csv, {"g"}));
    EXPECT_DOUBLE_EQ(z.at(Dimension::novelty, 0, 0), -1.0);
    EXPECT_DOUBLE_EQ(z.at(Dimension::novelty, 1, 0), 0.0);
    EXPECT_DOUBLE_EQ(z.at(Dimension::novelty, 2, 0), 1.0);
}

TEST(Standardize, ConstantReviewerRejected) {
    EXPECT_THROW(standardize_ratings(matrix({{1, 4}, {2, 4}, {3, 4}, {4, 4}})), ZeroVariance);
}

TEST(Aggregate, Modes) {
    const auto m = matrix({{-1, 0, 1}, {-1, 1, 5}, {2, 2, 2}, {3, 0, 0}});
    EXPECT_EQ(aggregate_scores(m, Dimension::novelty, AggregateMode::mean), (std::vector<double>{0, 5.0 / 3, 2, 1}));
    EXPECT_EQ(aggregate_scores(m, Dimension::novelty, AggregateMode::median), (std::vector<double>{0, 1, 2, 0}));
    EXPECT_EQ(aggregate_scores(m, Dimension::novelty, AggregateMode::max), (std::vector<double>{1, 5, 2, 3}));
    const auto even = matrix({{-1, 1}, {2, 4}, {0, 0}, {1, 1}});
    EXPECT_EQ(aggregate_scores(even, Dimension::novelty, AggregateMode::median), (std::vector<double>{0, 3, 0, 1}));
    const auto single = matrix({{0.5}, {2}, {3}, {4}});
    for (const auto mode : kAggregateModes)
        EXPECT_EQ(aggregate_scores(single, Dimension::novelty, mode), (std::vector<double>{0.5, 2, 3, 4}));
}

TEST(Ratings, MalformedInputs) {
    const std::string head = "hypothesis_id,group,reviewer,dimension,rating\n";
    EXPECT_THROW(parse_ratings_csv("a,b,c\n", {"g"}), CorruptRecord);
    EXPECT_THROW(parse_ratings_csv(head + "H1,g,R,novelty,abc\n", {"g"}), CorruptRecord);
    EXPECT_THROW(parse_ratings_csv(head + "H1,g,R,clarity,3\n", {"g"}), CorruptRecord);
    // Missing usefulness cells.
    EXPECT_THROW(parse_ratings_csv(head + "H1,g,R,novelty,3\nH2,g,R,novelty,4\n", {"g"}), InvariantViolation);
    // Undeclared group.
    EXPECT_THROW(parse_ratings_csv(head + "H1,x,R,novelty,3\nH1,x,R,usefulness,3\n", {"g"}), InvariantViolation);
    try {
        parse_ratings_csv(head + "H1,g,R,novelty,3\nH1,g,R,novelty\n", {"g"});
        FAIL();
    } catch (const CorruptRecord& e) {
        EXPECT_EQ(e.line_number(), 3u);
    }
}

TEST(Ratings, BundledFixtureShape) {
    const auto m = load_ratings(std::filesystem::path(CAUSAFORGE_SOURCE_DIR) / "data/ratings.csv");
    EXPECT_EQ(m.hypotheses.size(), 120u);
    EXPECT_EQ(m.reviewers, (std::vector<std::string>{"R1", "R2", "R3"}));
    const auto groups = group_scores(m, aggregate_scores(m, Dimension::novelty, AggregateMode::mean));
    ASSERT_EQ(groups.size(), 4u);
    for (const auto& g : groups) EXPECT_EQ(g.values.size(), 30u);
}

TEST(Anova, SumsOfSquaresExample) {
    const auto a = one_way_anova(std::vector<std::vector<double>>{{1, 2, 3}, {2, 3, 4}, {3, 4, 5}});
    EXPECT_NEAR(a.ss_between, 6.0, 1e-12);
    EXPECT_NEAR(a.ss_within, 6.0, 1e-12);
    EXPECT_NEAR(a.f, 3.0, 1e-9);
    EXPECT_EQ(a.df_between, 2u);
    EXPECT_EQ(a.df_within, 6u);
    EXPECT_NEAR(a.r_squared, 0.5, 1e-9);
    EXPECT_NEAR(a.p, oracle::f_tail_quadrature(3.0, 2, 6), 1e-8);
}

TEST(Anova, IdenticalGroupsAndErrors) {
    const auto a = one_way_anova(std::vector<std::vector<double>>{{1, 2, 3}, {1, 2, 3}});
    EXPECT_EQ(a.f, 0.0);
    EXPECT_EQ(a.r_squared, 0.0);
    EXPECT_NEAR(a.p, 1.0, 1e-12);
    EXPECT_THROW(one_way_anova(std::vector<std::vector<double>>{{1, 2, 3}}), InsufficientData);
    EXPECT_THROW(one_way_anova(std::vector<std::vector<double>>{{1, 2}, {3}}), InsufficientData);
}

TEST(Anova, ReportedNoveltyEffectIsInternallyConsistent) {
    // F(3, 116) = 6.92 with R-squared 15.19% and p = 0.0002.
    const double f = 6.92, d1 = 3, d2 = 116;
    EXPECT_NEAR(f * d1 / (f * d1 + d2), 0.1519, 5e-4);
    EXPECT_NEAR(stats::f_upper_tail(f, d1, d2), 0.0002, 1e-4);
}

TEST(Anova, Properties) {
    Rng rng(8);
    for (int t = 0; t < 50; ++t) {
        auto groups = random_groups(rng, 2 + rng.below(4), 3);
        const auto a = one_way_anova(groups);
        EXPECT_GE(a.f, 0.0);
        EXPECT_GE(a.p, 0.0);
        EXPECT_LE(a.p, 1.0);
        EXPECT_NEAR(a.r_squared + a.ss_within / a.ss_total, 1.0, 1e-12);
        EXPECT_NEAR(a.r_squared, a.f * a.df_between / (a.f * a.df_between + a.df_within), 1e-12);
        EXPECT_NEAR(a.p, oracle::f_tail_quadrature(a.f, a.df_between, a.df_within), 1e-8);

        auto shifted = groups;
        for (auto& g : shifted)
            for (double& x : g) x += 17.5;
        EXPECT_NEAR(one_way_anova(shifted).f, a.f, 1e-9 * std::max(1.0, a.f));

        auto affine = groups;
        for (auto& g : affine)
            for (double& x : g) x = -2.5 * x + 4;
        EXPECT_NEAR(one_way_anova(affine).r_squared, a.r_squared, 1e-12);
    }
}

TEST(Pairwise, FEqualsTSquared) {
    Rng rng(9);
    for (int t = 0; t < 50; ++t) {
        const auto gs = random_groups(rng, 2, 2);
        const Group a{"a", gs[0]}, b{"b", gs[1]};
        const auto an = one_way_anova(std::vector<Group>{a, b});
        const auto tt = pooled_t_test(a, b);
        EXPECT_NEAR(an.f, tt.t * tt.t, 1e-9 * std::max(1.0, an.f));
        EXPECT_NEAR(an.p, tt.p, 1e-9);
        EXPECT_NEAR(tt.p, oracle::t_two_sided_quadrature(tt.t, static_cast<double>(tt.df)), 1e-8);
        EXPECT_EQ(tt.df, gs[0].size() + gs[1].size() - 2);
        EXPECT_TRUE(std::signbit(tt.cohen_d) == std::signbit(tt.contrast));
    }
}

TEST(Pairwise, Examples) {
    const Group same1{"x", {1, 2, 3}}, same2{"y", {3, 2, 1}};
    const auto eq = pooled_t_test(same1, same2, 6);
    EXPECT_EQ(eq.t, 0.0);
    EXPECT_EQ(eq.cohen_d, 0.0);
    EXPECT_EQ(eq.p_adjusted, 1.0);

    // Both samples have mean shifted by 1 and sample sd exactly 1.
    std::vector<double> base(30);
    for (int i = 0; i < 30; ++i) base[i] = (i % 2 ? 1.0 : -1.0) * std::sqrt(29.0 / 30.0);
    std::vector<double> shifted = base;
    for (double& x : shifted) x += 1.0;
    const auto r = pooled_t_test({"a", base}, {"b", shifted});
    EXPECT_NEAR(r.cohen_d, -1.0, 1e-12);
    EXPECT_NEAR(r.contrast, -1.0, 1e-12);
    EXPECT_EQ(r.df, 58u);
}

TEST(Pairwise, FamilyAndTable) {
    std::vector<Group> groups{{"A", {1, 2, 3, 4}}, {"B", {2, 3, 4, 6}}, {"C", {5, 6, 7, 9}}, {"D", {-5, -4.9, -5.1, -5}}};
    const auto rows = pairwise_bonferroni(groups);
    ASSERT_EQ(rows.size(), 6u);
    for (const auto& r : rows) {
        EXPECT_NEAR(r.p_adjusted, std::min(1.0, 6 * r.p), 1e-15);
        EXPECT_GE(r.p_adjusted, 0.0);
        EXPECT_LE(r.p_adjusted, 1.0);
    }
    EXPECT_EQ(rows[0].group_a, "A");
    EXPECT_EQ(rows[0].group_b, "B");
    EXPECT_EQ(rows[5].group_a, "C");
    const auto three = pairwise_bonferroni(groups, 3);
    EXPECT_NEAR(three[0].p_adjusted, std::min(1.0, 3 * three[0].p), 1e-15);
    EXPECT_THROW(pairwise_bonferroni(groups, 0), InvalidArgument);

    const auto table = format_pairwise_table(rows);
    EXPECT_EQ(table.substr(0, table.find('\n')), "Comparison\tContrast\tCohen's d\tt value\tp value");
    EXPECT_NE(table.find("\nA vs. B\t"), std::string::npos);
    EXPECT_NE(table.find("<0.001"), std::string::npos);
}

TEST(Spearman, MonotoneAndTies) {
    const std::vector<double> x{1, 2, 3, 4, 5};
    EXPECT_EQ(spearman_rho(x, {1, 4, 9, 16, 25}).rho, 1.0);
    EXPECT_EQ(spearman_rho(x, {5, 4, 3, 2, 1}).rho, -1.0);
    EXPECT_EQ(spearman_rho(x, {5, 4, 3, 2, 1}).p, 0.0);
    const std::vector<double> tx{1, 2, 2, 3}, ty{1, 2, 3, 4};
    EXPECT_NEAR(spearman_rho(tx, ty).rho, oracle::spearman(tx, ty), 1e-12);
    EXPECT_EQ(average_ranks(tx), (std::vector<double>{1, 2.5, 2.5, 4}));
    EXPECT_THROW(spearman_rho({1, 2}, {1, 2}), InsufficientData);
    EXPECT_THROW(spearman_rho({1, 2, 3}, {1, 2}), LengthMismatch);
    EXPECT_THROW(spearman_rho({1, 1, 1}, {1, 2, 3}), DegenerateRanks);
}

TEST(Spearman, OracleAndMonotoneInvariance) {
    Rng rng(10);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 3 + rng.below(30);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng.below(6));
            y[i] = x[i] + static_cast<double>(rng.below(4));
        }
        if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) x[0] += 1;
        if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) y[0] += 1;
        const auto r = spearman_rho(x, y);
        EXPECT_NEAR(r.rho, oracle::spearman(x, y), 1e-12);
        auto fx = x;
        for (double& v : fx) v = std::exp(v) - 3;
        EXPECT_NEAR(spearman_rho(fx, y).rho, r.rho, 1e-12);
        if (std::fabs(r.rho) < 1) {
            const double tv = r.rho * std::sqrt((n - 2.0) / (1 - r.rho * r.rho));
            EXPECT_NEAR(r.p, oracle::t_two_sided_quadrature(tv, n - 2.0), 1e-8);
        }
    }
}

TEST(Distributions, TailsMatchQuadrature) {
    for (double d1 : {1.0, 2.0, 4.0, 9.0})
        for (double d2 : {1.0, 3.0, 12.0, 116.0, 400.0})
            for (double f : {0.01, 0.4, 1.0, 2.5, 7.0, 25.0})
                EXPECT_NEAR(stats::f_upper_tail(f, d1, d2), oracle::f_tail_quadrature(f, d1, d2), 1e-8)
                    << f << " " << d1 << " " << d2;
    for (double df : {1.0, 3.0, 10.0, 58.0, 238.0})
        for (double t : {-5.0, -1.5, 0.0, 0.2, 1.0, 2.7, 6.0})
            EXPECT_NEAR(stats::t_two_sided(t, df), oracle::t_two_sided_quadrature(t, df), 1e-8) << t << " " << df;
    EXPECT_EQ(stats::incomplete_beta(0, 2, 3), 0.0);
    EXPECT_EQ(stats::incomplete_beta(1, 2, 3), 1.0);
    EXPECT_NEAR(stats::incomplete_beta(0.3, 1, 1), 0.3, 1e-14);
}

TEST(SemanticDistance, CountsAndClusters) {
    std::map<std::string, std::vector<double>> vecs;
    std::vector<std::string> members, same, spread, tight;
    Rng rng(11);
    for (int i = 0; i < 30; ++i) {
        const std::string id = "h" + std::to_string(i);
        vecs[id] = {rng.normal(), rng.normal(), rng.normal()};
        members.push_back(id);
        vecs["s" + std::to_string(i)] = {1, 2, 3};
        same.push_back("s" + std::to_string(i));
        vecs["w" + std::to_string(i)] = {(i % 2 ? 10.0 : -10.0) + 0.01 * rng.normal(), 0.01 * rng.normal(), 0};
        spread.push_back("w" + std::to_string(i));
        vecs["t" + std::to_string(i)] = {0.01 * rng.normal(), 0.01 * rng.normal(), 0};
        tight.push_back("t" + std::to_string(i));
    }
    const auto d = semantic_distance_samples(vecs, {{"g", members}, {"same", same}, {"two", spread}, {"one", tight}});
    EXPECT_EQ(d.at("g").size(), 435u);
    for (double x : d.at("same")) EXPECT_EQ(x, 0.0);
    auto mean = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    EXPECT_GT(mean(d.at("two")), mean(d.at("one")));
    // First sample is the (0, 1) pair.
    const auto& a = vecs["h0"];
    const auto& b = vecs["h1"];
    EXPECT_NEAR(d.at("g")[0], std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]), 1e-12);

    EXPECT_THROW(semantic_distance_samples(vecs, {{"g", {"h0"}}}), InsufficientData);
    vecs["bad"] = {1, 2};
    EXPECT_THROW(semantic_distance_samples(vecs, {{"g", {"h0", "bad"}}}), DimensionMismatch);
}

TEST(Curves, MovingAverage) {
    EXPECT_EQ(moving_average_curve({4, 3, 2, 1}), (std::vector<double>{3.5, 2.5, 1.5}));
    EXPECT_EQ(moving_average_curve({1, 4, 2, 3}, 1), (std::vector<double>{4, 3, 2, 1}));
    EXPECT_EQ(moving_average_curve({1, 4, 2, 3}, 4), (std::vector<double>{2.5}));
    EXPECT_THROW(moving_average_curve({1, 2}, 3), WindowTooLarge);
    EXPECT_THROW(moving_average_curve({1, 2}, 0), InvalidArgument);
}
