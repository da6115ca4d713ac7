#pragma once

#include <vector>

#include "emglrt/em_common.hpp"
#include "emglrt/em_init.hpp"
#include "emglrt/priors.hpp"
#include "emglrt/spectral.hpp"

namespace emglrt {

struct EmGaussState {
    CVector s_hat;
    double E = 0.0;
    CVector h_hat;
    EigenSystem eig1; // of (1/L) Y P~^perp Y^H for the (s_hat, E) that produced h_hat
    double nu1 = 0.0;
    double xi = 0.0;
    Eigen::Index N_hat = 0;
    int iter = 0;
    double loglik1 = 0.0; // -L (M + sum ln lam1_hat + M ln pi)
};

/// Eigensystem of (1/L) Y Y^H - (E/L) h h^H from the eigensystem of
/// (1/L) Y Y^H, updating only its range.
EigenSystem fast_sigma1_eig(const EigenSystem& eig0, const CVector& h_hat, double E, Eigen::Index L);

/// Initial state from an (s_hat, E) pair.
EmGaussState gauss_state(const CVector& s0, double E0);

EmGaussState em_gauss_step(const EmGaussState& state, const CMatrix& Y, const SignalPrior& prior,
                           const EmConfig& config, const EigenSystem& eig0);
EmGaussState em_gauss_step(const EmGaussState& state, const CMatrix& Y, const SignalPrior& prior,
                           const EmConfig& config);

struct EmGaussRun {
    EmGaussState state;
    std::vector<double> loglik;
    bool converged = false;
};

EmGaussRun em_gauss_run(const CMatrix& Y, const SignalPrior& prior, const EmConfig& config,
                        const EmGaussState& init, const EigenSystem& eig0);
EmGaussRun em_gauss_run(const CMatrix& Y, const SignalPrior& prior, const EmConfig& config);

/// Log-domain GLRT with the final rank shared by numerator and denominator.
DetectorReport glrt_gauss(const CMatrix& Y, const SignalPrior& prior, const EmConfig& config);

} // namespace emglrt
