#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "emglrt/common.hpp"

namespace emglrt {

struct PointMass {
    cplx value;
};

struct Discrete {
    std::vector<cplx> atoms;
    std::vector<double> weights; // nonnegative, sums to one
};

struct GaussianPrior {
    cplx mean;
    double variance = 1.0;
};

using SymbolPrior = std::variant<PointMass, Discrete, GaussianPrior>;

/// Independent per-symbol prior p(s) = prod_l p_l(s_l).
struct SignalPrior {
    std::vector<SymbolPrior> symbols;

    std::size_t size() const noexcept { return symbols.size(); }
};

struct PosteriorSummary {
    cplx mean;
    double second_moment = 0.0;
    std::optional<std::vector<double>> weights; // Discrete only
};

struct SignalPosterior {
    CVector s_hat;
    double E = 0.0;
};

/// Equal-weight Discrete prior over `alphabet`.
Discrete uniform_discrete(const std::vector<cplx>& alphabet);

/// Throws InvalidInput if the prior violates its invariants.
void validate(const SymbolPrior& prior);

/// Posterior of s from r = s + CN(0, 1/xi).
PosteriorSummary posterior_stats(const SymbolPrior& prior, cplx r, double xi);

SignalPosterior signal_posterior(const SignalPrior& prior, const CVector& r, double xi);

/// Maximum-likelihood symbol decision. Discrete: nearest atom among those with
/// positive weight, ties to the lowest index. Gaussian: posterior mode.
cplx hard_decision(const SymbolPrior& prior, cplx r, double xi);

/// Hard decisions for every symbol, returned together with E = ||s_ml||^2.
SignalPosterior signal_hard_decision(const SignalPrior& prior, const CVector& r, double xi);

struct DiscreteData {};
struct GaussianData {
    double variance = 1.0;
};
using DataModel = std::variant<DiscreteData, GaussianData>;

/// Known training symbols followed by L-Q unknown data symbols.
SignalPrior training_data_prior(const std::vector<cplx>& s_train, const std::vector<cplx>& alphabet,
                                std::size_t L, const DataModel& data_model);

/// Number of leading PointMass entries and their values.
std::vector<cplx> leading_training(const SignalPrior& prior);

/// Prior mean and total second moment, used when no training is available.
SignalPosterior prior_moments(const SignalPrior& prior);

std::vector<cplx> qpsk_alphabet();
std::vector<cplx> bpsk_alphabet();
std::vector<cplx> psk8_alphabet();

} // namespace emglrt
