#pragma once

#include <vector>

#include "emglrt/common.hpp"

namespace emglrt {

enum class Penalty { AIC, AICc, BIC, GIC };
enum class InterferenceModel { Gauss, Det };

struct RankCriterion {
    Penalty penalty = Penalty::GIC;
    double gain = 1.0; // GIC only
    Eigen::Index n_max = -1; // negative: default_n_max(M, L)
};

struct RankEstimate {
    Eigen::Index N_hat = 0;
    std::vector<double> scores; // loglik(N) - J(D(N)), N = 0..n_max
};

double penalty_value(const RankCriterion& criterion, double D, double T);

long long dof(InterferenceModel model, Eigen::Index N, Eigen::Index M, Eigen::Index L);

/// min(min(M, L) - 1, floor(M / 2))
Eigen::Index default_n_max(Eigen::Index M, Eigen::Index L);

/// Profile log-likelihood of a rank-N fit to the descending spectrum `lams`
/// of a sample covariance built from L snapshots.
double rank_loglik(const RVector& lams, InterferenceModel model, Eigen::Index N, Eigen::Index L);

/// argmax over N of rank_loglik - penalty, ties to the smallest N. Candidates
/// whose trailing eigenvalues are all zero are skipped.
RankEstimate estimate_rank(const RVector& lams, InterferenceModel model, const RankCriterion& criterion,
                           Eigen::Index M, Eigen::Index L);

} // namespace emglrt
