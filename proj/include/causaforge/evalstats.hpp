#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace causaforge::evalstats {

enum class Dimension { novelty = 0, usefulness = 1 };
inline constexpr std::array<Dimension, 2> kDimensions{Dimension::novelty, Dimension::usefulness};
std::string_view to_string(Dimension d);

enum class AggregateMode { mean, median, max };
inline constexpr std::array<AggregateMode, 3> kAggregateModes{AggregateMode::mean, AggregateMode::median,
                                                              AggregateMode::max};
std::string_view to_string(AggregateMode m);

inline const std::vector<std::string> kDefaultGroups{"control_human", "control_claude", "llmcg_random",
                                                     "llmcg_expert"};

// Complete hypothesis x reviewer x dimension table.
struct RatingMatrix {
    struct Row {
        std::string hypothesis_id;
        std::string group;
    };
    std::vector<Row> hypotheses;         // file order of first appearance
    std::vector<std::string> reviewers;  // file order of first appearance
    std::vector<std::string> groups;     // declared labels
    // cells[dimension][hypothesis][reviewer]
    std::array<std::vector<std::vector<double>>, 2> cells;

    double at(Dimension d, std::size_t h, std::size_t r) const {
        return cells[static_cast<std::size_t>(d)][h][r];
    }
    void validate() const;
};

// CSV with header hypothesis_id,group,reviewer,dimension,rating.
RatingMatrix parse_ratings_csv(const std::string& csv, const std::vector<std::string>& declared_groups = kDefaultGroups);
RatingMatrix load_ratings(const std::filesystem::path& path,
                          const std::vector<std::string>& declared_groups = kDefaultGroups);

// Per reviewer and dimension: (x - mean) / sample sd. Throws ZeroVariance.
RatingMatrix standardize_ratings(const RatingMatrix& m);

// Per hypothesis: mean, median (midpoint for even counts) or max across reviewers.
std::vector<double> aggregate_scores(const RatingMatrix& m, Dimension d, AggregateMode mode);

struct Group {
    std::string label;
    std::vector<double> values;
};

// Splits per-hypothesis scores into groups in declared order, skipping
// declared groups with no hypotheses.
std::vector<Group> group_scores(const RatingMatrix& m, const std::vector<double>& scores);

struct AnovaResult {
    double f = 0.0;
    std::size_t df_between = 0;
    std::size_t df_within = 0;
    double p = 1.0;
    double r_squared = 0.0;
    double ss_between = 0.0;
    double ss_within = 0.0;
    double ss_total = 0.0;
};

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups);
AnovaResult one_way_anova(const std::vector<Group>& groups);

struct PairwiseResult {
    std::string group_a;
    std::string group_b;
    double contrast = 0.0;  // mean_a - mean_b
    double cohen_d = 0.0;
    double t = 0.0;
    std::size_t df = 0;
    double p = 1.0;           // two-sided, unadjusted
    double p_adjusted = 1.0;  // min(1, family_size * p)
};

PairwiseResult pooled_t_test(const Group& a, const Group& b, std::size_t family_size = 1);

// All unordered pairs (i < j in input order). family_size defaults to C(G, 2).
std::vector<PairwiseResult> pairwise_bonferroni(const std::vector<Group>& groups,
                                                std::optional<std::size_t> family_size = std::nullopt);

// Contrast / Cohen's d / t value / p value table.
std::string format_pairwise_table(const std::vector<PairwiseResult>& rows);

struct SpearmanResult {
    double rho = 0.0;
    double p = 1.0;
    std::size_t n = 0;
};

std::vector<double> average_ranks(const std::vector<double>& x);
SpearmanResult spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

// Within-group Euclidean distances over all unordered pairs, in member order.
std::map<std::string, std::vector<double>> semantic_distance_samples(
    const std::map<std::string, std::vector<double>>& vectors,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& groups);

// Sorts descending, then averages each run of `window` consecutive values.
std::vector<double> moving_average_curve(std::vector<double> scores, std::size_t window = 2);

}  // namespace causaforge::evalstats
