#include "emglrt/rank_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "emglrt/spectral.hpp"

namespace emglrt {

double penalty_value(const RankCriterion& criterion, double D, double T) {
    switch (criterion.penalty) {
    case Penalty::AIC:
        return D;
    case Penalty::AICc:
        if (D >= T - 1.0) throw Error(ErrorKind::InvalidInput, "AICc needs D < T - 1");
        return T * D / (T - D - 1.0);
    case Penalty::BIC:
        return 0.5 * D * std::log(T);
    case Penalty::GIC:
        if (!(criterion.gain > 0.0)) throw Error(ErrorKind::InvalidInput, "GIC gain must be positive");
        return criterion.gain * D;
    }
    return 0.0;
}

long long dof(InterferenceModel model, Eigen::Index N, Eigen::Index M, Eigen::Index L) {
    const long long n = N, m = M, l = L;
    if (model == InterferenceModel::Gauss) return (2 * m - n) * n + 2 * m + 1;
    return 2 * (m + l - n) * n + 2 * m + 1;
}

Eigen::Index default_n_max(Eigen::Index M, Eigen::Index L) {
    return std::max<Eigen::Index>(0, std::min(std::min(M, L) - 1, M / 2));
}

double rank_loglik(const RVector& lams, InterferenceModel model, Eigen::Index N, Eigen::Index L) {
    const Eigen::Index M = lams.size();
    const double m = static_cast<double>(M);
    const double l = static_cast<double>(L);
    const double tail = lams.tail(M - N).sum();
    if (!(tail > psd_floor(lams.maxCoeff()))) return -std::numeric_limits<double>::infinity();
    if (model == InterferenceModel::Gauss) {
        // sum of log smoothed eigenvalues
        double logdet = static_cast<double>(M - N) * std::log(tail / static_cast<double>(M - N));
        for (Eigen::Index k = 0; k < N; ++k) logdet += std::log(lams[k]);
        return -l * (m + logdet + m * std::log(std::numbers::pi));
    }
    return -m * l * (1.0 + std::log(std::numbers::pi)) - m * l * std::log(tail / m);
}

RankEstimate estimate_rank(const RVector& lams, InterferenceModel model, const RankCriterion& criterion,
                           Eigen::Index M, Eigen::Index L) {
    if (lams.size() != M) throw Error(ErrorKind::InvalidInput, "estimate_rank: spectrum length differs from M");
    if (!lams.allFinite()) throw Error(ErrorKind::InvalidInput, "estimate_rank: non-finite spectrum");
    if (!(lams.maxCoeff() > 0.0)) throw Error(ErrorKind::DegenerateSpectrum, "all-zero spectrum");
    Eigen::Index n_max = criterion.n_max < 0 ? default_n_max(M, L) : criterion.n_max;
    const Eigen::Index limit = model == InterferenceModel::Gauss ? M - 1 : std::min(M, L) - 1;
    n_max = std::min(n_max, limit);

    RankEstimate out;
    const double T = 2.0 * static_cast<double>(M) * static_cast<double>(L);
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index N = 0; N <= n_max; ++N) {
        const double ll = rank_loglik(lams, model, N, L);
        const double score = ll - penalty_value(criterion, static_cast<double>(dof(model, N, M, L)), T);
        out.scores.push_back(score);
        if (score > best) {
            best = score;
            out.N_hat = N;
        }
    }
    return out;
}

} // namespace emglrt
