#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causaforge/evalstats.hpp"
#include "causaforge/tsne.hpp"

namespace causaforge::evalstats {

struct EvaluationSettings {
    std::optional<std::size_t> bonferroni_family;  // unset: C(G, 2)
    tsne::TsneConfig tsne;
    std::size_t curve_window = 2;
    // Two group labels compared by a single pooled t test on mean z-scores.
    std::optional<std::pair<std::string, std::string>> ablation;
};

// Report JSON plus one CSV per plot. All strings are deterministic for
// fixed inputs and settings.
struct EvaluationArtifacts {
    std::string report_json;
    std::string curves_csv;     // group,dimension,rank,value
    std::string tsne_csv;       // hypothesis_id,group,x,y,novelty,usefulness
    std::string distances_csv;  // group,distance
};

// `vectors` must cover every hypothesis in `ratings` (MissingEmbedding).
EvaluationArtifacts evaluate(const RatingMatrix& ratings, const std::map<std::string, std::vector<double>>& vectors,
                             const EvaluationSettings& settings = {});

// report.json, curves.csv, tsne.csv and distances.csv under `dir`.
void write_artifacts(const EvaluationArtifacts& artifacts, const std::filesystem::path& dir);

}  // namespace causaforge::evalstats
