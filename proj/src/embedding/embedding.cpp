#include "causaforge/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "causaforge/errors.hpp"
#include "causaforge/io.hpp"
#include "causaforge/rng.hpp"

namespace causaforge::embedding {

namespace {

double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

// -log(sigmoid(x)), stable for large |x|.
double neg_log_sigmoid(double x) { return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

double sgns_pair_gradient(std::span<const double> center, std::span<const double> context,
                          std::span<const std::span<const double>> negatives, std::span<double> grad_center,
                          std::span<double> grad_context, std::span<const std::span<double>> grad_negatives) {
    const std::size_t d = center.size();
    const double x_pos = dot(context, center);
    const double g_pos = sigmoid(x_pos) - 1.0;
    double loss = neg_log_sigmoid(x_pos);
    for (std::size_t i = 0; i < d; ++i) {
        grad_center[i] = g_pos * context[i];
        grad_context[i] = g_pos * center[i];
    }
    for (std::size_t n = 0; n < negatives.size(); ++n) {
        const auto u = negatives[n];
        const double x_neg = dot(u, center);
        const double g_neg = sigmoid(x_neg);
        loss += neg_log_sigmoid(-x_neg);
        for (std::size_t i = 0; i < d; ++i) {
            grad_center[i] += g_neg * u[i];
            grad_negatives[n][i] = g_neg * center[i];
        }
    }
    return loss;
}

double sgns_pair_loss(std::span<const double> center, std::span<const double> context,
                      std::span<const std::span<const double>> negatives) {
    double loss = neg_log_sigmoid(dot(context, center));
    for (const auto u : negatives) loss += neg_log_sigmoid(-dot(u, center));
    return loss;
}

const std::vector<double>& EmbeddingTable::at(const ConceptId& id) const {
    auto it = vectors.find(id);
    if (it == vectors.end()) throw MissingEmbedding("no embedding for concept '" + id + "'");
    return it->second;
}

TrainingResult train_embeddings(const WalkSet& walks, const EmbeddingConfig& config) {
    config.validate();
    if (walks.walks.empty()) throw InvalidArgument("no walks to train on");
    const std::size_t vocab = walks.vocab.size();
    const std::size_t dims = config.dims;
    const auto window = static_cast<std::ptrdiff_t>(config.window);

    std::vector<double> counts(vocab, 0.0);
    std::size_t pairs_per_epoch = 0;
    for (const auto& w : walks.walks) {
        const auto len = static_cast<std::ptrdiff_t>(w.size());
        for (std::ptrdiff_t i = 0; i < len; ++i) {
            counts[w[i]] += 1.0;
            pairs_per_epoch += static_cast<std::size_t>(std::min(len - 1, i + window) - std::max<std::ptrdiff_t>(0, i - window));
        }
    }
    if (pairs_per_epoch == 0) throw DegenerateCorpus("walks contain no (center, context) pairs");

    // Unigram^0.75 sampling table as a cumulative distribution.
    std::vector<double> cdf(vocab);
    double acc = 0.0;
    for (std::size_t i = 0; i < vocab; ++i) {
        acc += std::pow(counts[i], 0.75);
        cdf[i] = acc;
    }

    Rng rng(config.seed);
    std::vector<double> in(vocab * dims);
    std::vector<double> out(vocab * dims, 0.0);
    for (double& x : in) x = (rng.uniform() - 0.5) / static_cast<double>(dims);

    const auto row = [&](std::vector<double>& m, std::size_t i) { return std::span<double>(m.data() + i * dims, dims); };

    const std::size_t k = config.negatives_per_positive;
    std::vector<double> grad_center(dims), grad_context(dims), grad_neg_storage(k * dims);
    std::vector<std::size_t> neg_ids;
    std::vector<std::span<const double>> neg_rows;
    std::vector<std::span<double>> grad_negs;
    neg_ids.reserve(k);

    TrainingResult result;
    const double total_work = static_cast<double>(pairs_per_epoch) * static_cast<double>(config.epochs);
    double processed = 0.0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        double epoch_loss = 0.0;
        for (const auto& w : walks.walks) {
            const auto len = static_cast<std::ptrdiff_t>(w.size());
            for (std::ptrdiff_t i = 0; i < len; ++i) {
                const std::size_t c = w[i];
                const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
                const std::ptrdiff_t hi = std::min(len - 1, i + window);
                for (std::ptrdiff_t j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    const std::size_t o = w[j];
                    const double lr = config.initial_learning_rate * (1.0 - (processed / total_work) * (1.0 - 1e-4));
                    processed += 1.0;

                    neg_ids.clear();
                    for (std::size_t n = 0; n < k; ++n) {
                        const double r = rng.uniform() * acc;
                        std::size_t id = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
                        if (id >= vocab) id = vocab - 1;
                        if (id != o) neg_ids.push_back(id);
                    }
                    neg_rows.clear();
                    grad_negs.clear();
                    for (std::size_t n = 0; n < neg_ids.size(); ++n) {
                        neg_rows.push_back(row(out, neg_ids[n]));
                        grad_negs.emplace_back(grad_neg_storage.data() + n * dims, dims);
                    }
                    auto vc = row(in, c);
                    auto uo = row(out, o);
                    epoch_loss += sgns_pair_gradient(vc, uo, neg_rows, grad_center, grad_context, grad_negs);
                    for (std::size_t d = 0; d < dims; ++d) {
                        vc[d] -= lr * grad_center[d];
                        uo[d] -= lr * grad_context[d];
                    }
                    for (std::size_t n = 0; n < neg_ids.size(); ++n) {
                        auto un = row(out, neg_ids[n]);
                        for (std::size_t d = 0; d < dims; ++d) un[d] -= lr * grad_negs[n][d];
                    }
                }
            }
        }
        result.epoch_mean_loss.push_back(epoch_loss / static_cast<double>(pairs_per_epoch));
    }

    result.table.dims = dims;
    for (std::size_t i = 0; i < vocab; ++i) {
        auto r = row(in, i);
        result.table.vectors.emplace(walks.vocab[i], std::vector<double>(r.begin(), r.end()));
    }
    return result;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw DimensionMismatch("cosine of vectors with different dimensions");
    double uv = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uv += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) throw ZeroVector("cosine similarity of a zero vector");
    return std::clamp(uv / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

std::string serialize_table(const EmbeddingTable& table) {
    std::string out = std::string(kEmbeddingFormat) + "\t" + std::to_string(table.dims) + "\t" +
                      std::to_string(table.vectors.size()) + "\n";
    for (const auto& [id, vec] : table.vectors) {
        out += id;
        out += '\t';
        for (std::size_t i = 0; i < vec.size(); ++i) {
            if (i) out += ' ';
            out += io::format_double(vec[i]);
        }
        out += '\n';
    }
    return out;
}

EmbeddingTable parse_table(const std::vector<std::string>& lines) {
    if (lines.empty()) throw CorruptRecord(1, "missing embedding header");
    EmbeddingTable table;
    std::size_t count = 0;
    {
        std::istringstream header(lines[0]);
        std::string name;
        std::getline(header, name, '\t');
        if (name != kEmbeddingFormat || !(header >> table.dims >> count)) throw CorruptRecord(1, "bad embedding header");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) throw CorruptRecord(i + 1, "expected 'id<TAB>values'");
        std::vector<double> vec;
        vec.reserve(table.dims);
        const char* p = line.data() + tab + 1;
        const char* end = line.data() + line.size();
        while (p < end) {
            while (p < end && *p == ' ') ++p;
            if (p == end) break;
            double v = 0;
            auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc() || !std::isfinite(v)) throw CorruptRecord(i + 1, "bad vector component");
            vec.push_back(v);
            p = next;
        }
        if (vec.size() != table.dims) throw CorruptRecord(i + 1, "vector length differs from header dims");
        if (!table.vectors.emplace(line.substr(0, tab), std::move(vec)).second)
            throw CorruptRecord(i + 1, "duplicate id");
    }
    if (table.vectors.size() != count) throw CorruptRecord(lines.size(), "vector count differs from header");
    return table;
}

void save_table(const EmbeddingTable& table, const std::filesystem::path& path) {
    io::write_atomic(path, serialize_table(table));
}

EmbeddingTable load_table(const std::filesystem::path& path) { return parse_table(io::read_lines(path)); }

}  // namespace causaforge::embedding
