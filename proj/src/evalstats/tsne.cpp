#include "causaforge/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "causaforge/errors.hpp"
#include "causaforge/rng.hpp"

namespace causaforge::tsne {

namespace {

constexpr double kEntropyTolerance = 1e-10;
constexpr int kMaxBisections = 200;

std::vector<double> squared_distances(const std::vector<std::vector<double>>& x, std::size_t i) {
    std::vector<double> d(x.size(), 0.0);
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (j == i) continue;
        double s = 0.0;
        for (std::size_t k = 0; k < x[i].size(); ++k) {
            const double diff = x[i][k] - x[j][k];
            s += diff * diff;
        }
        d[j] = s;
    }
    return d;
}

// Fills row with the normalized conditional distribution and returns its
// entropy (nats). Distances are shifted by their minimum so exp() stays finite.
double conditional_row(const std::vector<double>& d, std::size_t i, double beta, std::vector<double>& row) {
    double min_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < d.size(); ++j)
        if (j != i) min_d = std::min(min_d, d[j]);
    double sum = 0.0;
    double weighted = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (j == i) {
            row[j] = 0.0;
            continue;
        }
        const double shifted = d[j] - min_d;
        row[j] = std::exp(-beta * shifted);
        sum += row[j];
        weighted += shifted * row[j];
    }
    for (double& v : row) v /= sum;
    return std::log(sum) + beta * weighted / sum;
}

double row_entropy(const std::vector<double>& row) {
    double h = 0.0;
    for (double v : row)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

}  // namespace

void TsneConfig::validate(std::size_t n) const {
    if (n < 4) throw InsufficientData("t-SNE needs at least 4 points");
    if (!(perplexity > 0.0)) throw InvalidArgument("perplexity must be positive");
    if (perplexity >= static_cast<double>(n - 1) / 3.0)
        throw PerplexityTooLarge("perplexity must be below (n - 1) / 3");
    if (iterations < 1) throw InvalidArgument("iterations must be >= 1");
    if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
    if (exaggeration < 1.0) throw InvalidArgument("exaggeration must be >= 1");
}

double conditional_perplexity(const std::vector<std::vector<double>>& x, std::size_t i, double beta) {
    std::vector<double> row(x.size());
    conditional_row(squared_distances(x, i), i, beta, row);
    return std::exp(row_entropy(row));
}

Affinities joint_affinities(const std::vector<std::vector<double>>& x, double perplexity) {
    const std::size_t n = x.size();
    for (const auto& v : x)
        if (v.size() != x.front().size()) throw DimensionMismatch("t-SNE input vectors differ in length");
    const double target = std::log(perplexity);

    Affinities a;
    a.betas.assign(n, 1.0);
    a.perplexities.assign(n, 0.0);
    std::vector<double> cond(n * n, 0.0);
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto d = squared_distances(x, i);
        double beta = 1.0;
        double lo = 0.0;
        double hi = std::numeric_limits<double>::infinity();
        for (int it = 0; it < kMaxBisections; ++it) {
            const double h = conditional_row(d, i, beta, row);
            if (std::fabs(h - target) < kEntropyTolerance) break;
            if (h > target) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
            } else {
                hi = beta;
                beta = (beta + lo) / 2.0;
            }
        }
        conditional_row(d, i, beta, row);
        a.betas[i] = beta;
        a.perplexities[i] = std::exp(row_entropy(row));
        std::copy(row.begin(), row.end(), cond.begin() + static_cast<std::ptrdiff_t>(i * n));
    }

    a.p.assign(n * n, 0.0);
    const double denom = 2.0 * static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = (cond[i * n + j] + cond[j * n + i]) / denom;
            a.p[i * n + j] = v;
            a.p[j * n + i] = v;
        }
    return a;
}

double tsne_kl(const std::vector<double>& p, const std::vector<double>& y) {
    const std::size_t n = y.size() / 2;
    std::vector<double> w(n * n, 0.0);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double dx = y[2 * i] - y[2 * j];
            const double dy = y[2 * i + 1] - y[2 * j + 1];
            w[i * n + j] = 1.0 / (1.0 + dx * dx + dy * dy);
            z += w[i * n + j];
        }
    double kl = 0.0;
    for (std::size_t k = 0; k < n * n; ++k)
        if (p[k] > 0.0) kl += p[k] * std::log(p[k] / (w[k] / z));
    return kl;
}

std::vector<double> tsne_gradient(const std::vector<double>& p, const std::vector<double>& y, double exaggeration) {
    const std::size_t n = y.size() / 2;
    std::vector<double> w(n * n, 0.0);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double dx = y[2 * i] - y[2 * j];
            const double dy = y[2 * i + 1] - y[2 * j + 1];
            w[i * n + j] = 1.0 / (1.0 + dx * dx + dy * dy);
            z += w[i * n + j];
        }
    std::vector<double> grad(2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double k = w[i * n + j];
            const double m = 4.0 * (exaggeration * p[i * n + j] - k / z) * k;
            grad[2 * i] += m * (y[2 * i] - y[2 * j]);
            grad[2 * i + 1] += m * (y[2 * i + 1] - y[2 * j + 1]);
        }
    return grad;
}

TsneResult tsne_project(const std::vector<std::vector<double>>& x, const TsneConfig& config) {
    const std::size_t n = x.size();
    config.validate(n);

    TsneResult result;
    result.affinities = joint_affinities(x, config.perplexity);
    const auto& p = result.affinities.p;

    Rng rng(config.seed);
    std::vector<double> y(2 * n);
    for (double& v : y) v = 1e-4 * rng.normal();
    result.initial_kl = tsne_kl(p, y);

    std::vector<double> velocity(2 * n, 0.0);
    std::vector<double> gains(2 * n, 1.0);
    for (std::size_t it = 0; it < config.iterations; ++it) {
        const double exaggeration = it < config.exaggeration_iterations ? config.exaggeration : 1.0;
        const double momentum = it < config.momentum_switch ? config.initial_momentum : config.final_momentum;
        const auto grad = tsne_gradient(p, y, exaggeration);
        for (std::size_t k = 0; k < 2 * n; ++k) {
            // Delta-bar-delta gains: grow where the step keeps its sign.
            gains[k] = (grad[k] > 0.0) != (velocity[k] > 0.0) ? gains[k] + 0.2 : gains[k] * 0.8;
            gains[k] = std::max(gains[k], 0.01);
            velocity[k] = momentum * velocity[k] - config.learning_rate * gains[k] * grad[k];
            y[k] += velocity[k];
        }
        double cx = 0.0, cy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cx += y[2 * i];
            cy += y[2 * i + 1];
        }
        cx /= static_cast<double>(n);
        cy /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[2 * i] -= cx;
            y[2 * i + 1] -= cy;
        }
    }
    result.final_kl = tsne_kl(p, y);
    result.coords.resize(n);
    for (std::size_t i = 0; i < n; ++i) result.coords[i] = {y[2 * i], y[2 * i + 1]};
    return result;
}

}  // namespace causaforge::tsne
