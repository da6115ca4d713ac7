#include "emglrt/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace emglrt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void check_precision(double xi) {
    if (!(xi > 0.0) || !std::isfinite(xi))
        throw Error(ErrorKind::InvalidPrecision, "posterior precision must be positive and finite");
}

PosteriorSummary discrete_posterior(const Discrete& p, cplx r, double xi) {
    const std::size_t K = p.atoms.size();
    std::vector<double> logw(K, -std::numeric_limits<double>::infinity());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
        if (p.weights[k] <= 0.0) continue;
        logw[k] = std::log(p.weights[k]) - xi * std::norm(r - p.atoms[k]);
        best = std::max(best, logw[k]);
    }
    std::vector<double> w(K, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        if (!std::isfinite(logw[k])) continue;
        w[k] = std::exp(logw[k] - best);
        total += w[k];
    }
    PosteriorSummary out{cplx{}, 0.0, std::vector<double>(K, 0.0)};
    for (std::size_t k = 0; k < K; ++k) {
        const double wk = w[k] / total;
        (*out.weights)[k] = wk;
        out.mean += wk * p.atoms[k];
        out.second_moment += wk * std::norm(p.atoms[k]);
    }
    return out;
}

} // namespace

Discrete uniform_discrete(const std::vector<cplx>& alphabet) {
    if (alphabet.empty()) throw Error(ErrorKind::InvalidInput, "empty alphabet");
    return Discrete{alphabet, std::vector<double>(alphabet.size(), 1.0 / static_cast<double>(alphabet.size()))};
}

void validate(const SymbolPrior& prior) {
    std::visit(overloaded{
                   [](const PointMass&) {},
                   [](const Discrete& p) {
                       if (p.atoms.empty() || p.atoms.size() != p.weights.size())
                           throw Error(ErrorKind::InvalidInput, "discrete prior: atoms/weights mismatch");
                       double sum = 0.0;
                       for (double w : p.weights) {
                           if (!(w >= 0.0)) throw Error(ErrorKind::InvalidInput, "discrete prior: negative weight");
                           sum += w;
                       }
                       if (std::abs(sum - 1.0) > 1e-12)
                           throw Error(ErrorKind::InvalidInput, "discrete prior: weights must sum to one");
                   },
                   [](const GaussianPrior& p) {
                       if (!(p.variance > 0.0))
                           throw Error(ErrorKind::InvalidInput, "gaussian prior: variance must be positive");
                   },
               },
               prior);
}

PosteriorSummary posterior_stats(const SymbolPrior& prior, cplx r, double xi) {
    check_precision(xi);
    return std::visit(overloaded{
                          [](const PointMass& p) { return PosteriorSummary{p.value, std::norm(p.value), {}}; },
                          [&](const Discrete& p) { return discrete_posterior(p, r, xi); },
                          [&](const GaussianPrior& p) {
                              const double gain = p.variance / (p.variance + 1.0 / xi);
                              const cplx mean = p.mean + gain * (r - p.mean);
                              const double var = 1.0 / (xi + 1.0 / p.variance);
                              return PosteriorSummary{mean, std::norm(mean) + var, {}};
                          },
                      },
                      prior);
}

SignalPosterior signal_posterior(const SignalPrior& prior, const CVector& r, double xi) {
    if (static_cast<Eigen::Index>(prior.size()) != r.size())
        throw Error(ErrorKind::InvalidInput, "signal_posterior: length mismatch");
    SignalPosterior out{CVector(r.size()), 0.0};
    for (Eigen::Index l = 0; l < r.size(); ++l) {
        const auto post = posterior_stats(prior.symbols[static_cast<std::size_t>(l)], r[l], xi);
        out.s_hat[l] = post.mean;
        out.E += post.second_moment;
    }
    return out;
}

cplx hard_decision(const SymbolPrior& prior, cplx r, double xi) {
    return std::visit(overloaded{
                          [](const PointMass& p) { return p.value; },
                          [&](const Discrete& p) {
                              std::size_t best = p.atoms.size();
                              double best_d = std::numeric_limits<double>::infinity();
                              for (std::size_t k = 0; k < p.atoms.size(); ++k) {
                                  if (p.weights[k] <= 0.0) continue;
                                  const double dist = std::norm(r - p.atoms[k]);
                                  if (dist < best_d) {
                                      best_d = dist;
                                      best = k;
                                  }
                              }
                              return p.atoms[best];
                          },
                          [&](const GaussianPrior& p) {
                              check_precision(xi);
                              return p.mean + p.variance / (p.variance + 1.0 / xi) * (r - p.mean);
                          },
                      },
                      prior);
}

SignalPosterior signal_hard_decision(const SignalPrior& prior, const CVector& r, double xi) {
    if (static_cast<Eigen::Index>(prior.size()) != r.size())
        throw Error(ErrorKind::InvalidInput, "signal_hard_decision: length mismatch");
    SignalPosterior out{CVector(r.size()), 0.0};
    for (Eigen::Index l = 0; l < r.size(); ++l) {
        out.s_hat[l] = hard_decision(prior.symbols[static_cast<std::size_t>(l)], r[l], xi);
        out.E += std::norm(out.s_hat[l]);
    }
    return out;
}

SignalPrior training_data_prior(const std::vector<cplx>& s_train, const std::vector<cplx>& alphabet,
                                std::size_t L, const DataModel& data_model) {
    if (s_train.size() > L) throw Error(ErrorKind::InvalidInput, "training longer than the signal");
    if (L == 0) throw Error(ErrorKind::InvalidInput, "signal length must be positive");
    SignalPrior prior;
    prior.symbols.reserve(L);
    for (const auto& s : s_train) prior.symbols.emplace_back(PointMass{s});
    const bool discrete = std::holds_alternative<DiscreteData>(data_model);
    if (discrete && s_train.size() < L && alphabet.empty())
        throw Error(ErrorKind::InvalidInput, "discrete data model needs an alphabet");
    for (std::size_t l = s_train.size(); l < L; ++l) {
        if (discrete) {
            prior.symbols.emplace_back(uniform_discrete(alphabet));
        } else {
            const double v = std::get<GaussianData>(data_model).variance;
            if (!(v > 0.0)) throw Error(ErrorKind::InvalidInput, "gaussian data variance must be positive");
            prior.symbols.emplace_back(GaussianPrior{cplx{}, v});
        }
    }
    return prior;
}

std::vector<cplx> leading_training(const SignalPrior& prior) {
    std::vector<cplx> out;
    for (const auto& p : prior.symbols) {
        const auto* pm = std::get_if<PointMass>(&p);
        if (pm == nullptr) break;
        out.push_back(pm->value);
    }
    return out;
}

SignalPosterior prior_moments(const SignalPrior& prior) {
    SignalPosterior out{CVector(static_cast<Eigen::Index>(prior.size())), 0.0};
    for (std::size_t l = 0; l < prior.size(); ++l) {
        std::visit(overloaded{
                       [&](const PointMass& p) {
                           out.s_hat[static_cast<Eigen::Index>(l)] = p.value;
                           out.E += std::norm(p.value);
                       },
                       [&](const Discrete& p) {
                           cplx m{};
                           double e = 0.0;
                           for (std::size_t k = 0; k < p.atoms.size(); ++k) {
                               m += p.weights[k] * p.atoms[k];
                               e += p.weights[k] * std::norm(p.atoms[k]);
                           }
                           out.s_hat[static_cast<Eigen::Index>(l)] = m;
                           out.E += e;
                       },
                       [&](const GaussianPrior& p) {
                           out.s_hat[static_cast<Eigen::Index>(l)] = p.mean;
                           out.E += std::norm(p.mean) + p.variance;
                       },
                   },
                   prior.symbols[l]);
    }
    return out;
}

std::vector<cplx> qpsk_alphabet() {
    const double a = 1.0 / std::numbers::sqrt2;
    return {{a, a}, {-a, a}, {-a, -a}, {a, -a}};
}

std::vector<cplx> bpsk_alphabet() { return {{1.0, 0.0}, {-1.0, 0.0}}; }

std::vector<cplx> psk8_alphabet() {
    std::vector<cplx> out;
    for (int k = 0; k < 8; ++k) out.push_back(std::polar(1.0, std::numbers::pi * k / 4.0));
    return out;
}

} // namespace emglrt
