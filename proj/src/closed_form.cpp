#include "emglrt/closed_form.hpp"

#include <algorithm>
#include <cmath>

#include "emglrt/spectral.hpp"

namespace emglrt {

KnownSignalSpectra known_signal_spectra(const CMatrix& Y, const CVector& s) {
    if (s.size() != Y.cols()) throw Error(ErrorKind::InvalidInput, "signal length does not match Y");
    const double s2 = s.squaredNorm();
    if (!(s2 > 0.0)) throw Error(ErrorKind::ZeroSignal, "known signal has zero norm");
    const double L = static_cast<double>(Y.cols());
    const CMatrix S0 = sample_covariance(Y);
    const CVector Ys = Y * s;
    const CMatrix S1 = S0 - Ys * Ys.adjoint() / (L * s2);
    return {hermitian_eig(S0).values, hermitian_eig(S1).values};
}

ClosedFormReport kelly_statistic(const CMatrix& Y, const CVector& s) {
    const Eigen::Index M = Y.rows();
    if (Y.cols() < M + 1) throw Error(ErrorKind::KellyUndefined, "Kelly's test needs L >= M + 1");
    auto [l0, l1] = known_signal_spectra(Y, s);
    const double eps = psd_floor(l0[0]);
    if (l1.minCoeff() <= eps) throw Error(ErrorKind::KellyUndefined, "singular signal-removed covariance");
    ClosedFormReport out;
    for (Eigen::Index m = 0; m < M; ++m) out.log_statistic += std::log(l0[m] / l1[m]);
    out.lams0 = std::move(l0);
    out.lams1 = std::move(l1);
    out.rank_used = M;
    return out;
}

ClosedFormReport gerlach_steiner_statistic(const CMatrix& Y, const CVector& s, double nu) {
    if (!(nu > 0.0)) throw Error(ErrorKind::InvalidInput, "noise level must be positive");
    auto [l0, l1] = known_signal_spectra(Y, s);
    ClosedFormReport out;
    Eigen::Index above = 0;
    for (Eigen::Index m = 0; m < l0.size(); ++m) {
        out.log_statistic += std::log(std::max(l0[m], nu) / std::max(l1[m], nu));
        if (l0[m] > nu) ++above;
    }
    out.lams0 = std::move(l0);
    out.lams1 = std::move(l1);
    out.nu0 = nu;
    out.nu1 = nu;
    out.rank_used = above;
    return out;
}

ClosedFormReport kmr_statistic(const CMatrix& Y, const CVector& s, Eigen::Index N) {
    const Eigen::Index M = Y.rows();
    if (N < 0 || N >= M || N > Y.cols()) throw Error(ErrorKind::InvalidRank, "KMR needs 0 <= N < M and N <= L");
    auto [l0, l1] = known_signal_spectra(Y, s);
    const auto h0 = smooth_eigenvalues(l0, N);
    const auto h1 = smooth_eigenvalues(l1, N);
    const double eps = psd_floor(l0[0]);
    if (h1.smoothed.minCoeff() <= eps)
        throw Error(ErrorKind::DegenerateNoise, "signal-removed spectrum vanishes at the chosen rank");
    ClosedFormReport out;
    for (Eigen::Index m = 0; m < M; ++m) out.log_statistic += std::log(h0.smoothed[m] / h1.smoothed[m]);
    out.lams0 = std::move(l0);
    out.lams1 = std::move(l1);
    out.nu0 = h0.nu_hat;
    out.nu1 = h1.nu_hat;
    out.rank_used = N;
    return out;
}

ClosedFormReport mcwhorter_statistic(const CMatrix& Y, const CVector& s, Eigen::Index N) {
    const Eigen::Index M = Y.rows();
    if (N < 0 || N >= std::min(M, Y.cols())) throw Error(ErrorKind::InvalidRank, "McWhorter needs 0 <= N < min(M, L)");
    auto [l0, l1] = known_signal_spectra(Y, s);
    ClosedFormReport out;
    out.nu0 = l0.tail(M - N).sum();
    out.nu1 = l1.tail(M - N).sum();
    if (out.nu1 <= psd_floor(l0[0])) throw Error(ErrorKind::DegenerateNoise, "no residual noise after rank removal");
    out.log_statistic = static_cast<double>(M) * static_cast<double>(Y.cols()) * std::log(out.nu0 / out.nu1);
    out.lams0 = std::move(l0);
    out.lams1 = std::move(l1);
    out.rank_used = N;
    return out;
}

} // namespace emglrt
