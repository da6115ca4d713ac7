#pragma once

#include <vector>

#include "emglrt/em_common.hpp"
#include "emglrt/em_init.hpp"
#include "emglrt/priors.hpp"
#include "emglrt/spectral.hpp"

namespace emglrt {

inline constexpr double kZetaRelTol = 1e-10;

struct EmDetState {
    CVector s_hat;
    double E = 0.0;
    double zeta = 1.0;
    CVector h_hat;
    TruncatedSvd svd1; // principal part of Y_bar; empty when N = 0
    RVector lams1;     // eigenvalues of (1/L) Y_bar Y_bar^H
    double nu1 = 0.0;
    double xi = 0.0;
    Eigen::Index N_hat = 0;
    int iter = 0;
    double loglik1 = 0.0; // -ML(1 + ln pi) - ML ln nu1
};

EmDetState det_state(const CVector& s0, double E0);

/// (1/M) times the sum of the trailing M-N eigenvalues of (1/L) Y Y^H.
double nu0_det(const CMatrix& Y, Eigen::Index N);
double nu0_from_spectrum(const RVector& lams0, Eigen::Index N);

/// One pass of the deterministic-interference EM update. In soft mode an
/// (s_hat, E) pair with E - ||s_hat||^2 < kZetaRelTol * E raises
/// DegenerateZeta; in hard mode zeta is then taken as zero and the
/// zeta-free form of the update is used.
EmDetState em_det_step(const EmDetState& state, const CMatrix& Y, const SignalPrior& prior, const EmConfig& config,
                       const EigenSystem& eig0);
EmDetState em_det_step(const EmDetState& state, const CMatrix& Y, const SignalPrior& prior, const EmConfig& config);

/// ML ln(nu0 / nu1). A soft run that reaches a degenerate zeta finishes with
/// the known-signal McWhorter statistic at the current s_hat.
DetectorReport glrt_det(const CMatrix& Y, const SignalPrior& prior, const EmConfig& config);

} // namespace emglrt
