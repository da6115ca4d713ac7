#include "emglrt/em_det.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "emglrt/closed_form.hpp"
#include "emglrt/em_gauss.hpp"

namespace emglrt {

namespace {

Eigen::Index choose_rank(const EmDetState& state, const RVector& lams, const EmConfig& config, Eigen::Index M,
                         Eigen::Index L) {
    const auto& rank = config.rank;
    const Eigen::Index limit = std::min(M, L);
    if (!rank.estimate) {
        if (rank.fixed_N < 0 || rank.fixed_N >= limit)
            throw Error(ErrorKind::InvalidRank, "fixed rank must lie in [0, min(M, L))");
        return rank.fixed_N;
    }
    if (rank.freeze_after_first && state.iter > 0) return state.N_hat;
    return estimate_rank(lams, InterferenceModel::Det, rank.criterion, M, L).N_hat;
}

double det_loglik(double nu1, Eigen::Index M, Eigen::Index L) {
    const double ml = static_cast<double>(M) * static_cast<double>(L);
    return -ml * (1.0 + std::log(std::numbers::pi)) - ml * std::log(nu1);
}

// Eigenvalues of (1/L) Y Y^H - (1/(E L)) (Y s)(Y s)^H.
RVector residual_spectrum(const CMatrix& Y, const CVector& Ys, double E, const EigenSystem& eig0, bool fast) {
    const Eigen::Index L = Y.cols();
    if (Ys.squaredNorm() == 0.0) return eig0.values;
    if (fast) return fast_sigma1_eig(eig0, Ys / E, E, L).values;
    return hermitian_eig(sample_covariance(Y) - Ys * Ys.adjoint() / (E * static_cast<double>(L))).values;
}

} // namespace

EmDetState det_state(const CVector& s0, double E0) {
    EmDetState st;
    st.s_hat = s0;
    st.E = E0;
    return st;
}

double nu0_from_spectrum(const RVector& lams0, Eigen::Index N) {
    const Eigen::Index M = lams0.size();
    if (N < 0 || N >= M) throw Error(ErrorKind::InvalidRank, "nu0_det needs 0 <= N < M");
    return lams0.tail(M - N).sum() / static_cast<double>(M);
}

double nu0_det(const CMatrix& Y, Eigen::Index N) {
    if (N < 0 || N >= std::min(Y.rows(), Y.cols())) throw Error(ErrorKind::InvalidRank, "nu0_det needs N < min(M, L)");
    return nu0_from_spectrum(hermitian_eig(sample_covariance(Y)).values, N);
}

EmDetState em_det_step(const EmDetState& state, const CMatrix& Y, const SignalPrior& prior, const EmConfig& config,
                       const EigenSystem& eig0) {
    const Eigen::Index M = Y.rows();
    const Eigen::Index L = Y.cols();
    if (state.s_hat.size() != L || static_cast<Eigen::Index>(prior.size()) != L)
        throw Error(ErrorKind::InvalidInput, "em_det_step: length mismatch");
    if (!(state.E > 0.0)) throw Error(ErrorKind::ZeroSignal, "signal energy estimate is zero");

    const CVector& s = state.s_hat;
    const double s2 = s.squaredNorm();
    const double gap = state.E - s2;
    EmDetState next;
    if (gap < kZetaRelTol * state.E) {
        if (config.decision == DecisionMode::Soft)
            throw Error(ErrorKind::DegenerateZeta, "posterior carries no symbol uncertainty");
        next.zeta = 0.0;
    } else {
        next.zeta = std::sqrt(gap / state.E);
    }
    const double zeta = next.zeta;

    const CVector Ys = Y * s;
    const CVector g = s2 > 0.0 ? CVector(Ys / s2) : CVector(CVector::Zero(M));
    const CMatrix Ybar = Y + (zeta - 1.0) * g * s.adjoint();
    next.lams1 = residual_spectrum(Y, Ys, zeta > 0.0 ? state.E : s2, eig0, config.fast_eig);

    const Eigen::Index N = choose_rank(state, next.lams1, config, M, L);
    next.N_hat = N;
    double top_energy = 0.0;
    if (N > 0) {
        next.svd1 = principal_svd(Ybar, N);
        top_energy = next.svd1.singulars.squaredNorm();
    }
    const double ml = static_cast<double>(M) * static_cast<double>(L);
    const double total = Ybar.squaredNorm();
    next.nu1 = (total - top_energy) / ml;
    if (!(next.nu1 > kPsdRelTol * total / ml) || !(total > 0.0))
        throw Error(ErrorKind::DegenerateNoise, "no residual noise after rank removal");
    next.loglik1 = det_loglik(next.nu1, M, L);

    const auto& Vb = next.svd1.left;
    const auto& Db = next.svd1.singulars;
    const auto& Ub = next.svd1.right;
    if (zeta > 0.0) {
        next.h_hat = s2 * g;
        if (N > 0) next.h_hat -= (1.0 / zeta) * (Vb * (Db.cast<cplx>().asDiagonal() * (Ub.adjoint() * s)));
        next.h_hat /= state.E;
    } else {
        CVector proj = g;
        if (N > 0) proj -= Vb * (Vb.adjoint() * g);
        next.h_hat = (s2 / state.E) * proj;
    }
    const double hh = next.h_hat.squaredNorm();
    next.xi = hh / next.nu1;
    if (!(hh > 0.0) || !std::isfinite(next.xi))
        throw Error(ErrorKind::NonPositivePrecision, "signal response estimate vanishes");

    CVector resid = Ybar.adjoint() * next.h_hat;
    if (N > 0) resid -= Ub * (Db.cast<cplx>().asDiagonal() * (Vb.adjoint() * next.h_hat));
    const CVector r = resid / hh + s / (1.0 + zeta);

    const auto post = config.decision == DecisionMode::Soft ? signal_posterior(prior, r, next.xi)
                                                            : signal_hard_decision(prior, r, next.xi);
    next.s_hat = post.s_hat;
    next.E = post.E;
    next.iter = state.iter + 1;
    return next;
}

EmDetState em_det_step(const EmDetState& state, const CMatrix& Y, const SignalPrior& prior, const EmConfig& config) {
    return em_det_step(state, Y, prior, config, hermitian_eig(sample_covariance(Y)));
}

DetectorReport glrt_det(const CMatrix& Y, const SignalPrior& prior, const EmConfig& config) {
    validate(config);
    const Eigen::Index M = Y.rows();
    const Eigen::Index L = Y.cols();
    const auto eig0 = hermitian_eig(sample_covariance(Y));
    const auto init = initial_estimate(Y, prior, config.alpha_grid);

    DetectorReport rep;
    rep.lams0 = eig0.values;
    EmDetState st = det_state(init.s0, init.E0);
    try {
        for (int i = 1; i <= config.max_iters; ++i) {
            auto next = em_det_step(st, Y, prior, config, eig0);
            rep.loglik.push_back(next.loglik1);
            const bool done = i > 1 && estimate_converged(next.s_hat, st.s_hat, config.rel_tol);
            st = std::move(next);
            if (done) {
                rep.converged = true;
                break;
            }
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateZeta) throw;
        // Known-signal limit: Y_bar = Y P_s^perp.
        const CVector& s = st.s_hat;
        Eigen::Index N = config.rank.fixed_N;
        if (config.rank.estimate) {
            if (config.rank.freeze_after_first && st.iter > 0) {
                N = st.N_hat;
            } else {
                const RVector lams = known_signal_spectra(Y, s).lams1;
                N = estimate_rank(lams, InterferenceModel::Det, config.rank.criterion, M, L).N_hat;
            }
        }
        const auto cf = mcwhorter_statistic(Y, s, N);
        rep.log_statistic = cf.log_statistic;
        rep.lams1 = cf.lams1;
        rep.nu0 = cf.nu0 / static_cast<double>(M);
        rep.nu1 = cf.nu1 / static_cast<double>(M);
        rep.N_hat = N;
        rep.iters = st.iter;
        rep.converged = true;
        rep.closed_form_fallback = true;
        return rep;
    }

    rep.N_hat = st.N_hat;
    rep.iters = st.iter;
    rep.lams1 = st.lams1;
    rep.nu1 = st.nu1;
    rep.nu0 = nu0_from_spectrum(eig0.values, st.N_hat);
    rep.log_statistic = static_cast<double>(M) * static_cast<double>(L) * std::log(rep.nu0 / rep.nu1);
    return rep;
}

} // namespace emglrt
