#pragma once

#include <vector>

#include "emglrt/common.hpp"
#include "emglrt/priors.hpp"
#include "emglrt/spectral.hpp"

namespace emglrt {

inline constexpr double kXiCap = 1e12;

struct TrainEstimates {
    CVector h_train;
    CMatrix Sigma_train; // (1/Q) Y_t P_s^perp Y_t^H
    EigenSystem eig_train;
};

struct LoocvResult {
    cplx beta_hat;
    double xi_hat = 0.0;
    CVector r_alpha; // leave-one-out WMF outputs on the training columns
};

struct AlphaSelection {
    double alpha_star = 1.0;
    double xi_star = 0.0;
    cplx beta_star{1.0, 0.0};
};

struct InitProduct {
    CVector s0;
    double E0 = 0.0;
    double alpha_star = 1.0;
    cplx beta_hat{1.0, 0.0};
    double xi_hat = kXiCap;
    CVector h_train;
};

TrainEstimates train_estimates(const CMatrix& Y_train, const CVector& s_train);

/// Shrinkage target level tr(Sigma_t)/M, floored for noiseless training.
double shrinkage_level(const TrainEstimates& train, const CMatrix& Y_train);

/// Leave-one-out WMF outputs via the rank-one inverse update, the unbiasing
/// gain and the post-unbiasing precision (capped at kXiCap).
LoocvResult loocv_precision(const CMatrix& Y_train, const CVector& s_train, double alpha);
LoocvResult loocv_precision(const TrainEstimates& train, const CMatrix& Y_train, const CVector& s_train,
                            double alpha);

/// Largest LOOCV precision over the grid; ties go to the larger alpha.
AlphaSelection select_alpha(const CMatrix& Y_train, const CVector& s_train, const std::vector<double>& grid);

/// Regularized-covariance initialization of (s_hat, E) for the EM detectors.
/// The first Q = s_train.size() columns of Y are the training columns.
InitProduct initialize(const CMatrix& Y, const CVector& s_train, const SignalPrior& prior,
                       const std::vector<double>& grid);

/// Initialization through the rank-N training covariance. The unbiasing gain
/// and precision are estimated in-sample on the training columns.
InitProduct initialize_rank_n(const CMatrix& Y, const CVector& s_train, const SignalPrior& prior, Eigen::Index N);

/// Pulls the leading PointMass symbols out of `prior` as training and calls
/// initialize. A fully known signal is returned as is.
InitProduct initial_estimate(const CMatrix& Y, const SignalPrior& prior, const std::vector<double>& grid);

} // namespace emglrt
