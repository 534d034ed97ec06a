#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace causaforge::tsne {

struct TsneConfig {
    double perplexity = 10.0;
    std::size_t iterations = 1000;
    double learning_rate = 100.0;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    std::size_t momentum_switch = 250;
    double exaggeration = 12.0;
    std::size_t exaggeration_iterations = 250;
    std::uint64_t seed = 0;

    void validate(std::size_t n) const;
};

struct Affinities {
    std::vector<double> p;             // n*n joint, row-major, symmetric
    std::vector<double> betas;         // per-point precision 1/(2 sigma^2)
    std::vector<double> perplexities;  // achieved per-point perplexity
};

// Conditional Gaussian rows tuned by bisection, then symmetrized and
// normalized over all n*n entries.
Affinities joint_affinities(const std::vector<std::vector<double>>& x, double perplexity);

// Perplexity of row i's conditional distribution for precision `beta`.
double conditional_perplexity(const std::vector<std::vector<double>>& x, std::size_t i, double beta);

// KL(P || Q) for 2-D layout y (2n values, interleaved).
double tsne_kl(const std::vector<double>& p, const std::vector<double>& y);

// d KL / d y, with P scaled by `exaggeration`.
std::vector<double> tsne_gradient(const std::vector<double>& p, const std::vector<double>& y,
                                  double exaggeration = 1.0);

struct TsneResult {
    std::vector<std::array<double, 2>> coords;
    Affinities affinities;
    double initial_kl = 0.0;
    double final_kl = 0.0;
};

TsneResult tsne_project(const std::vector<std::vector<double>>& x, const TsneConfig& config = {});

}  // namespace causaforge::tsne
