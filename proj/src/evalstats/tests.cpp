#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "causaforge/distributions.hpp"
#include "causaforge/errors.hpp"
#include "causaforge/evalstats.hpp"

namespace causaforge::evalstats {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sum_sq_dev(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s;
}

}  // namespace

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw InsufficientData("ANOVA needs at least two groups");
    std::size_t total_n = 0;
    double grand = 0.0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw InsufficientData("ANOVA needs at least two samples per group");
        total_n += g.size();
        for (double x : g) grand += x;
    }
    grand /= static_cast<double>(total_n);

    AnovaResult r;
    for (const auto& g : groups) {
        const double m = mean_of(g);
        r.ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        r.ss_within += sum_sq_dev(g, m);
    }
    r.ss_total = r.ss_between + r.ss_within;
    r.df_between = groups.size() - 1;
    r.df_within = total_n - groups.size();
    if (r.ss_within == 0.0) {
        r.f = r.ss_between == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
        r.f = (r.ss_between / static_cast<double>(r.df_between)) / (r.ss_within / static_cast<double>(r.df_within));
    }
    r.r_squared = r.ss_total == 0.0 ? 0.0 : r.ss_between / r.ss_total;
    r.p = stats::f_upper_tail(r.f, static_cast<double>(r.df_between), static_cast<double>(r.df_within));
    return r;
}

AnovaResult one_way_anova(const std::vector<Group>& groups) {
    std::vector<std::vector<double>> samples;
    samples.reserve(groups.size());
    for (const auto& g : groups) samples.push_back(g.values);
    return one_way_anova(samples);
}

PairwiseResult pooled_t_test(const Group& a, const Group& b, std::size_t family_size) {
    if (a.values.size() < 2 || b.values.size() < 2) throw InsufficientData("t test needs two samples per group");
    PairwiseResult r;
    r.group_a = a.label;
    r.group_b = b.label;
    const double na = static_cast<double>(a.values.size());
    const double nb = static_cast<double>(b.values.size());
    const double ma = mean_of(a.values);
    const double mb = mean_of(b.values);
    r.df = a.values.size() + b.values.size() - 2;
    const double pooled_var =
        (sum_sq_dev(a.values, ma) + sum_sq_dev(b.values, mb)) / static_cast<double>(r.df);
    const double sp = std::sqrt(pooled_var);
    r.contrast = ma - mb;
    if (sp == 0.0) {
        const double inf = std::numeric_limits<double>::infinity();
        r.cohen_d = r.contrast == 0.0 ? 0.0 : std::copysign(inf, r.contrast);
        r.t = r.cohen_d;
    } else {
        r.cohen_d = r.contrast / sp;
        r.t = r.contrast / (sp * std::sqrt(1.0 / na + 1.0 / nb));
    }
    r.p = stats::t_two_sided(r.t, static_cast<double>(r.df));
    r.p_adjusted = std::min(1.0, static_cast<double>(family_size) * r.p);
    return r;
}

std::vector<PairwiseResult> pairwise_bonferroni(const std::vector<Group>& groups, std::optional<std::size_t> family_size) {
    const std::size_t g = groups.size();
    const std::size_t family = family_size.value_or(g * (g - 1) / 2);
    if (family == 0) throw InvalidArgument("Bonferroni family size must be positive");
    std::vector<PairwiseResult> out;
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = i + 1; j < g; ++j) out.push_back(pooled_t_test(groups[i], groups[j], family));
    return out;
}

std::string format_pairwise_table(const std::vector<PairwiseResult>& rows) {
    std::string out = "Comparison\tContrast\tCohen's d\tt value\tp value\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "\t%.4f\t%.4f\t%.2f\t", r.contrast, r.cohen_d, r.t);
        out += r.group_a + " vs. " + r.group_b + buf;
        if (r.p_adjusted < 0.001)
            out += "<0.001";
        else {
            std::snprintf(buf, sizeof(buf), "%.3f", r.p_adjusted);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

std::vector<double> average_ranks(const std::vector<double>& x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
    std::vector<double> ranks(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

SpearmanResult spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw LengthMismatch("Spearman needs equal-length samples");
    if (x.size() < 3) throw InsufficientData("Spearman needs at least three pairs");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double mx = mean_of(rx);
    const double my = mean_of(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateRanks("every value tied in one variable");
    SpearmanResult r;
    r.n = x.size();
    r.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double df = static_cast<double>(r.n - 2);
    if (std::fabs(r.rho) == 1.0) {
        r.p = 0.0;
    } else {
        const double t = r.rho * std::sqrt(df / (1.0 - r.rho * r.rho));
        r.p = stats::t_two_sided(t, df);
    }
    return r;
}

std::map<std::string, std::vector<double>> semantic_distance_samples(
    const std::map<std::string, std::vector<double>>& vectors,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& groups) {
    std::optional<std::size_t> dims;
    for (const auto& [id, v] : vectors) {
        if (dims && v.size() != *dims) throw DimensionMismatch("vectors of different dimensions");
        dims = v.size();
    }
    std::map<std::string, std::vector<double>> out;
    for (const auto& [label, members] : groups) {
        if (members.size() < 2) throw InsufficientData("group '" + label + "' needs at least two members");
        std::vector<const std::vector<double>*> vs;
        for (const auto& id : members) {
            auto it = vectors.find(id);
            if (it == vectors.end()) throw InvalidArgument("no vector for hypothesis '" + id + "'");
            vs.push_back(&it->second);
        }
        auto& samples = out[label];
        samples.reserve(vs.size() * (vs.size() - 1) / 2);
        for (std::size_t i = 0; i < vs.size(); ++i)
            for (std::size_t j = i + 1; j < vs.size(); ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < vs[i]->size(); ++k) {
                    const double diff = (*vs[i])[k] - (*vs[j])[k];
                    s += diff * diff;
                }
                samples.push_back(std::sqrt(s));
            }
    }
    return out;
}

std::vector<double> moving_average_curve(std::vector<double> scores, std::size_t window) {
    if (window < 1) throw InvalidArgument("window must be >= 1");
    if (window > scores.size()) throw WindowTooLarge("window larger than the score list");
    std::sort(scores.begin(), scores.end(), std::greater<>());
    std::vector<double> out;
    out.reserve(scores.size() - window + 1);
    for (std::size_t i = 0; i + window <= scores.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = i; k < i + window; ++k) s += scores[k];
        out.push_back(s / static_cast<double>(window));
    }
    return out;
}

}  // namespace causaforge::evalstats
