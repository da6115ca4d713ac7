#include "emglrt/em_gauss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace emglrt {

namespace {

Eigen::Index numerical_rank(const RVector& values) {
    if (values.size() == 0) return 0;
    const double eps = psd_floor(values[0]);
    Eigen::Index r = 0;
    while (r < values.size() && values[r] > eps) ++r;
    return r;
}

double log_det_smoothed(const RVector& lams, Eigen::Index N, double nu) {
    const Eigen::Index M = lams.size();
    double out = static_cast<double>(M - N) * std::log(nu);
    for (Eigen::Index m = 0; m < N; ++m) out += std::log(lams[m]);
    return out;
}

Eigen::Index choose_rank(const EmGaussState& state, const RVector& lams, const EmConfig& config, Eigen::Index M,
                         Eigen::Index L) {
    const auto& rank = config.rank;
    if (!rank.estimate) {
        if (rank.fixed_N < 0 || rank.fixed_N > M) throw Error(ErrorKind::InvalidRank, "fixed rank must lie in [0, M]");
        return rank.fixed_N;
    }
    if (rank.freeze_after_first && state.iter > 0) return state.N_hat;
    return estimate_rank(lams, InterferenceModel::Gauss, rank.criterion, M, L).N_hat;
}

} // namespace

EigenSystem fast_sigma1_eig(const EigenSystem& eig0, const CVector& h_hat, double E, Eigen::Index L) {
    if (!(E > 0.0)) throw Error(ErrorKind::ZeroSignal, "fast_sigma1_eig needs E > 0");
    const Eigen::Index M = eig0.values.size();
    if (h_hat.size() != M) throw Error(ErrorKind::InvalidInput, "fast_sigma1_eig: size mismatch");
    const Eigen::Index R = numerical_rank(eig0.values);
    const auto V0 = eig0.vectors.leftCols(R);
    const CVector h_tilde = std::sqrt(E / static_cast<double>(L)) * (V0.adjoint() * h_hat);
    const auto upd = diag_minus_rank_one_eig(eig0.values.head(R), h_tilde);

    RVector values(M);
    CMatrix vectors(M, M);
    values.head(R) = upd.values;
    vectors.leftCols(R) = V0 * upd.vectors;
    values.tail(M - R).setZero();
    vectors.rightCols(M - R) = eig0.vectors.rightCols(M - R);
    clamp_psd(values);
    return {values, vectors};
}

EmGaussState gauss_state(const CVector& s0, double E0) {
    EmGaussState st;
    st.s_hat = s0;
    st.E = E0;
    return st;
}

EmGaussState em_gauss_step(const EmGaussState& state, const CMatrix& Y, const SignalPrior& prior,
                           const EmConfig& config, const EigenSystem& eig0) {
    const Eigen::Index M = Y.rows();
    const Eigen::Index L = Y.cols();
    if (state.s_hat.size() != L || static_cast<Eigen::Index>(prior.size()) != L)
        throw Error(ErrorKind::InvalidInput, "em_gauss_step: length mismatch");
    if (!(state.E > 0.0)) throw Error(ErrorKind::ZeroSignal, "signal energy estimate is zero");

    EmGaussState next;
    next.h_hat = Y * state.s_hat / state.E;
    if (config.fast_eig) {
        next.eig1 = fast_sigma1_eig(eig0, next.h_hat, state.E, L);
    } else {
        const CMatrix S1 = sample_covariance(Y) - (state.E / static_cast<double>(L)) * next.h_hat * next.h_hat.adjoint();
        next.eig1 = hermitian_eig(S1);
    }
    const RVector& lams = next.eig1.values;
    const CMatrix& V = next.eig1.vectors;
    const double tr1 = lams.sum();
    if (!(tr1 > psd_floor(eig0.values.size() ? eig0.values[0] : tr1)))
        throw Error(ErrorKind::SingularCovariance, "signal-removed covariance vanishes");

    const Eigen::Index N = choose_rank(state, lams, config, M, L);
    next.N_hat = N;
    const double nu_floor = 1e-12 * (tr1 / static_cast<double>(M) + std::numeric_limits<double>::min());
    CVector g;
    if (N == M) {
        if (!(lams[M - 1] > psd_floor(lams[0])))
            throw Error(ErrorKind::SingularCovariance, "full-rank covariance is singular");
        g = V * ((V.adjoint() * next.h_hat).array() / lams.array().cast<cplx>()).matrix();
        next.nu1 = lams[M - 1];
        next.loglik1 = -static_cast<double>(L) * (static_cast<double>(M) + lams.array().log().sum() +
                                                   static_cast<double>(M) * std::log(std::numbers::pi));
    } else {
        next.nu1 = std::max((tr1 - lams.head(N).sum()) / static_cast<double>(M - N), nu_floor);
        g = next.h_hat / next.nu1;
        if (N > 0) {
            const auto Vb = V.leftCols(N);
            const RVector scale = lams.head(N).cwiseInverse().array() - 1.0 / next.nu1;
            g += Vb * (scale.cast<cplx>().asDiagonal() * (Vb.adjoint() * next.h_hat));
        }
        next.loglik1 = -static_cast<double>(L) * (static_cast<double>(M) + log_det_smoothed(lams, N, next.nu1) +
                                                   static_cast<double>(M) * std::log(std::numbers::pi));
    }

    next.xi = next.h_hat.dot(g).real();
    if (!(next.xi > 0.0) || !std::isfinite(next.xi))
        throw Error(ErrorKind::NonPositivePrecision, "whitened matched-filter gain is not positive");
    const CVector r = Y.adjoint() * g / next.xi;
    const auto post = config.decision == DecisionMode::Soft ? signal_posterior(prior, r, next.xi)
                                                            : signal_hard_decision(prior, r, next.xi);
    next.s_hat = post.s_hat;
    next.E = post.E;
    next.iter = state.iter + 1;
    return next;
}

EmGaussState em_gauss_step(const EmGaussState& state, const CMatrix& Y, const SignalPrior& prior,
                           const EmConfig& config) {
    return em_gauss_step(state, Y, prior, config, hermitian_eig(sample_covariance(Y)));
}

EmGaussRun em_gauss_run(const CMatrix& Y, const SignalPrior& prior, const EmConfig& config,
                        const EmGaussState& init, const EigenSystem& eig0) {
    validate(config);
    EmGaussRun run;
    run.state = init;
    for (int i = 1; i <= config.max_iters; ++i) {
        auto next = em_gauss_step(run.state, Y, prior, config, eig0);
        run.loglik.push_back(next.loglik1);
        const bool done = i > 1 && estimate_converged(next.s_hat, run.state.s_hat, config.rel_tol);
        run.state = std::move(next);
        if (done) {
            run.converged = true;
            break;
        }
    }
    return run;
}

EmGaussRun em_gauss_run(const CMatrix& Y, const SignalPrior& prior, const EmConfig& config) {
    validate(config);
    const auto init = initial_estimate(Y, prior, config.alpha_grid);
    return em_gauss_run(Y, prior, config, gauss_state(init.s0, init.E0), hermitian_eig(sample_covariance(Y)));
}

DetectorReport glrt_gauss(const CMatrix& Y, const SignalPrior& prior, const EmConfig& config) {
    validate(config);
    const Eigen::Index M = Y.rows();
    const auto eig0 = hermitian_eig(sample_covariance(Y));
    const auto init = initial_estimate(Y, prior, config.alpha_grid);
    const auto run = em_gauss_run(Y, prior, config, gauss_state(init.s0, init.E0), eig0);
    const auto& st = run.state;

    DetectorReport rep;
    rep.N_hat = st.N_hat;
    rep.iters = st.iter;
    rep.converged = run.converged;
    rep.loglik = run.loglik;
    rep.lams0 = eig0.values;
    rep.lams1 = st.eig1.values;
    const Eigen::Index N = st.N_hat;
    if (N == M) {
        if (!(eig0.values[M - 1] > psd_floor(eig0.values[0])))
            throw Error(ErrorKind::SingularCovariance, "sample covariance is singular");
        for (Eigen::Index m = 0; m < M; ++m) rep.log_statistic += std::log(eig0.values[m] / st.eig1.values[m]);
        rep.nu0 = eig0.values[M - 1];
        rep.nu1 = st.nu1;
        return rep;
    }
    rep.nu0 = smooth_eigenvalues(eig0.values, N).nu_hat;
    rep.nu1 = st.nu1;
    for (Eigen::Index m = 0; m < N; ++m) rep.log_statistic += std::log(eig0.values[m] / st.eig1.values[m]);
    rep.log_statistic += static_cast<double>(M - N) * std::log(rep.nu0 / rep.nu1);
    return rep;
}

} // namespace emglrt
