#include "causaforge/report.hpp"

#include <json.hpp>

#include "causaforge/errors.hpp"
#include "causaforge/io.hpp"

namespace causaforge::evalstats {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json anova_json(const AnovaResult& a) {
    return {{"f", a.f},           {"df_between", a.df_between}, {"df_within", a.df_within},
            {"p", a.p},           {"r_squared", a.r_squared},   {"ss_between", a.ss_between},
            {"ss_within", a.ss_within}, {"ss_total", a.ss_total}};
}

ordered_json pairwise_json(const PairwiseResult& r) {
    return {{"group_a", r.group_a}, {"group_b", r.group_b}, {"contrast", r.contrast}, {"cohen_d", r.cohen_d},
            {"t", r.t},             {"df", r.df},           {"p", r.p},               {"p_adjusted", r.p_adjusted}};
}

ordered_json group_stats(const std::vector<Group>& groups, const std::optional<std::size_t>& family) {
    ordered_json out;
    out["anova"] = anova_json(one_way_anova(groups));
    ordered_json rows = ordered_json::array();
    for (const auto& r : pairwise_bonferroni(groups, family)) rows.push_back(pairwise_json(r));
    out["pairwise"] = rows;
    return out;
}

const Group* find_group(const std::vector<Group>& groups, const std::string& label) {
    for (const auto& g : groups)
        if (g.label == label) return &g;
    return nullptr;
}

}  // namespace

EvaluationArtifacts evaluate(const RatingMatrix& ratings, const std::map<std::string, std::vector<double>>& vectors,
                             const EvaluationSettings& settings) {
    ratings.validate();
    const RatingMatrix z = standardize_ratings(ratings);
    EvaluationArtifacts out;

    ordered_json report;
    report["hypotheses"] = ratings.hypotheses.size();
    report["reviewers"] = ratings.reviewers;

    std::map<Dimension, std::vector<double>> mean_scores;
    ordered_json dims;
    for (Dimension d : kDimensions) {
        ordered_json per_mode;
        for (AggregateMode mode : kAggregateModes) {
            const auto scores = aggregate_scores(z, d, mode);
            if (mode == AggregateMode::mean) mean_scores[d] = scores;
            per_mode[std::string(to_string(mode))] = group_stats(group_scores(z, scores), settings.bonferroni_family);
        }
        dims[std::string(to_string(d))] = per_mode;
    }
    report["scores"] = dims;

    const auto groups_novelty = group_scores(z, mean_scores[Dimension::novelty]);
    ordered_json group_sizes = ordered_json::array();
    for (const auto& g : groups_novelty) group_sizes.push_back({{"label", g.label}, {"n", g.values.size()}});
    report["groups"] = group_sizes;

    // Reviewer agreement on raw ratings; ranks make z-scoring irrelevant.
    ordered_json agreement;
    const std::size_t nh = ratings.hypotheses.size();
    for (Dimension d : kDimensions) {
        ordered_json rows = ordered_json::array();
        for (std::size_t a = 0; a < ratings.reviewers.size(); ++a)
            for (std::size_t b = a + 1; b < ratings.reviewers.size(); ++b) {
                std::vector<double> x(nh), y(nh);
                for (std::size_t h = 0; h < nh; ++h) {
                    x[h] = ratings.at(d, h, a);
                    y[h] = ratings.at(d, h, b);
                }
                ordered_json row = {{"reviewer_a", ratings.reviewers[a]}, {"reviewer_b", ratings.reviewers[b]}};
                try {
                    const auto s = spearman_rho(x, y);
                    row["rho"] = s.rho;
                    row["p"] = s.p;
                    row["n"] = s.n;
                } catch (const DegenerateRanks& e) {
                    row["error"] = e.code();
                }
                rows.push_back(row);
            }
        agreement[std::string(to_string(d))] = rows;
    }
    report["spearman"] = agreement;

    if (settings.ablation) {
        ordered_json ab;
        ab["group_a"] = settings.ablation->first;
        ab["group_b"] = settings.ablation->second;
        for (Dimension d : kDimensions) {
            const auto groups = group_scores(z, mean_scores[d]);
            const Group* a = find_group(groups, settings.ablation->first);
            const Group* b = find_group(groups, settings.ablation->second);
            if (!a || !b) throw InvalidArgument("ablation groups must both appear in the ratings");
            ab[std::string(to_string(d))] = pairwise_json(pooled_t_test(*a, *b, 1));
        }
        report["ablation"] = ab;
    }

    // Descending-score curves per group.
    out.curves_csv = "group,dimension,rank,value\n";
    ordered_json curves;
    for (Dimension d : kDimensions) {
        ordered_json per_group;
        for (const auto& g : group_scores(z, mean_scores[d])) {
            const auto curve = moving_average_curve(g.values, settings.curve_window);
            per_group[g.label] = curve;
            for (std::size_t i = 0; i < curve.size(); ++i)
                out.curves_csv += g.label + "," + std::string(to_string(d)) + "," + std::to_string(i + 1) + "," +
                                  io::format_double(curve[i]) + "\n";
        }
        curves[std::string(to_string(d))] = per_group;
    }
    report["curves"] = {{"window", settings.curve_window}, {"values", curves}};

    // Semantic layout.
    std::vector<std::vector<double>> x;
    x.reserve(nh);
    for (const auto& row : ratings.hypotheses) {
        auto it = vectors.find(row.hypothesis_id);
        if (it == vectors.end()) throw MissingEmbedding("no vector for hypothesis '" + row.hypothesis_id + "'");
        x.push_back(it->second);
    }

    std::vector<std::pair<std::string, std::vector<std::string>>> members;
    for (const auto& label : ratings.groups) {
        std::vector<std::string> ids;
        for (const auto& row : ratings.hypotheses)
            if (row.group == label) ids.push_back(row.hypothesis_id);
        if (!ids.empty()) members.emplace_back(label, std::move(ids));
    }
    const auto distances = semantic_distance_samples(vectors, members);
    std::vector<Group> distance_groups;
    out.distances_csv = "group,distance\n";
    ordered_json distance_means;
    for (const auto& [label, ids] : members) {
        const auto& samples = distances.at(label);
        double sum = 0.0;
        for (double v : samples) {
            sum += v;
            out.distances_csv += label + "," + io::format_double(v) + "\n";
        }
        distance_means[label] = {{"n", samples.size()}, {"mean", sum / static_cast<double>(samples.size())}};
        distance_groups.push_back({label, samples});
    }
    ordered_json sem = group_stats(distance_groups, settings.bonferroni_family);
    sem["groups"] = distance_means;
    report["semantic_distance"] = sem;

    const auto projection = tsne::tsne_project(x, settings.tsne);
    double max_perp_err = 0.0;
    for (double p : projection.affinities.perplexities)
        max_perp_err = std::max(max_perp_err, std::fabs(p - settings.tsne.perplexity));
    report["tsne"] = {{"perplexity", settings.tsne.perplexity},
                      {"iterations", settings.tsne.iterations},
                      {"learning_rate", settings.tsne.learning_rate},
                      {"seed", settings.tsne.seed},
                      {"initial_kl", projection.initial_kl},
                      {"final_kl", projection.final_kl},
                      {"max_perplexity_error", max_perp_err}};
    out.tsne_csv = "hypothesis_id,group,x,y,novelty,usefulness\n";
    for (std::size_t h = 0; h < nh; ++h) {
        const auto& row = ratings.hypotheses[h];
        out.tsne_csv += row.hypothesis_id + "," + row.group + "," + io::format_double(projection.coords[h][0]) + "," +
                        io::format_double(projection.coords[h][1]) + "," +
                        io::format_double(mean_scores[Dimension::novelty][h]) + "," +
                        io::format_double(mean_scores[Dimension::usefulness][h]) + "\n";
    }

    out.report_json = report.dump(2) + "\n";
    return out;
}

void write_artifacts(const EvaluationArtifacts& artifacts, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoFailure("cannot create " + dir.string() + ": " + ec.message());
    io::write_atomic(dir / "report.json", artifacts.report_json);
    io::write_atomic(dir / "curves.csv", artifacts.curves_csv);
    io::write_atomic(dir / "tsne.csv", artifacts.tsne_csv);
    io::write_atomic(dir / "distances.csv", artifacts.distances_csv);
}

}  // namespace causaforge::evalstats
