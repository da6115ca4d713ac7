#pragma once

#include <vector>

#include "emglrt/common.hpp"
#include "emglrt/rank_select.hpp"

namespace emglrt {

enum class DecisionMode { Soft, Hard };

/// Either a fixed interference rank or an information-criterion estimate
/// refreshed every EM iteration (or only on the first, if frozen).
struct RankMode {
    bool estimate = false;
    Eigen::Index fixed_N = 0;
    RankCriterion criterion;
    bool freeze_after_first = false;
};

struct EmConfig {
    int max_iters = 50;
    double rel_tol = 0.01;
    DecisionMode decision = DecisionMode::Soft;
    RankMode rank;
    bool fast_eig = true;
    std::vector<double> alpha_grid = {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0};
};

/// Throws InvalidInput if the iteration controls are out of range.
void validate(const EmConfig& config);

struct DetectorReport {
    double log_statistic = 0.0;
    Eigen::Index N_hat = 0;
    int iters = 0;
    bool converged = false;
    bool closed_form_fallback = false;
    RVector lams0;
    RVector lams1;
    double nu0 = 0.0;
    double nu1 = 0.0;
    std::vector<double> loglik; // numerator log-likelihood per iteration
};

/// ||s_new - s_old|| / ||s_new|| < tol, with a zero-norm estimate counted as converged.
bool estimate_converged(const CVector& s_new, const CVector& s_old, double tol);

} // namespace emglrt
