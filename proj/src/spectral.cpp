#include "emglrt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/SVD>

namespace emglrt {

namespace {

constexpr double kDeflateRel = 1e-12;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Sorts eigenpairs descending by value.
EigenSystem sorted_descending(const RVector& values, const CMatrix& vectors) {
    const auto n = values.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values[a] > values[b]; });
    EigenSystem out{RVector(n), CMatrix(vectors.rows(), n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values[k] = values[order[static_cast<std::size_t>(k)]];
        out.vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

// One root of 1 - sum_i w_i^2 / (delta_i - mu) = 0, with delta = d - d[origin],
// bracketed in the open interval (lo, hi).
double solve_secular_root(const std::vector<double>& delta, const std::vector<double>& w2,
                          double lo, double hi) {
    auto eval = [&](double mu, double& deriv) {
        double f = 1.0;
        deriv = 0.0;
        for (std::size_t i = 0; i < delta.size(); ++i) {
            const double t = 1.0 / (delta[i] - mu);
            f -= w2[i] * t;
            deriv += w2[i] * t * t;
        }
        return f;
    };

    double mu = 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
        double slope = 0.0;
        const double f = eval(mu, slope);
        if (f == 0.0) return mu;
        // f is decreasing in mu
        if (f > 0.0) lo = mu;
        else hi = mu;
        if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;

        double next = mu + f / slope;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (next == mu) break;
        mu = next;
    }
    return mu;
}

} // namespace

void clamp_psd(RVector& values) {
    if (values.size() == 0) return;
    const double eps = psd_floor(values.cwiseAbs().maxCoeff());
    for (auto& v : values)
        if (v < 0.0 && v >= -eps) v = 0.0;
}

EigenSystem hermitian_eig(const CMatrix& A) {
    if (A.rows() != A.cols()) throw Error(ErrorKind::InvalidInput, "hermitian_eig: matrix not square");
    if (!all_finite(A)) throw Error(ErrorKind::InvalidInput, "hermitian_eig: non-finite entries");
    const CMatrix H = (A + A.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(H);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::InvalidInput, "hermitian_eig: eigensolver failed");
    // Eigen returns ascending order
    EigenSystem out{solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
    clamp_psd(out.values);
    return out;
}

EigenSystem diag_minus_rank_one_eig(const RVector& d, const CVector& z) {
    const Eigen::Index R = d.size();
    if (z.size() != R) throw Error(ErrorKind::InvalidInput, "diag_minus_rank_one_eig: size mismatch");
    if (!d.allFinite() || !all_finite(z))
        throw Error(ErrorKind::InvalidInput, "diag_minus_rank_one_eig: non-finite entries");
    for (Eigen::Index i = 0; i + 1 < R; ++i)
        if (d[i] < d[i + 1]) throw Error(ErrorKind::InvalidInput, "diag_minus_rank_one_eig: d not descending");
    if (R == 0) return {};

    const double znorm = z.norm();
    if (znorm == 0.0) return {d, CMatrix::Identity(R, R)};

    // Diag(d) - z z^H = Phase (Diag(d) - w w^T) Phase^H with w = |z|.
    CVector phase(R);
    std::vector<double> w(static_cast<std::size_t>(R));
    for (Eigen::Index i = 0; i < R; ++i) {
        const double a = std::abs(z[i]);
        w[static_cast<std::size_t>(i)] = a;
        phase[i] = a > 0.0 ? z[i] / a : cplx{1.0, 0.0};
    }

    const double tol_z = kDeflateRel * znorm;
    const double tol_d = kDeflateRel * std::max(std::abs(d[0]), std::abs(d[R - 1]));

    // Columns of `basis` are the working basis vectors in the original coordinates.
    RMatrix basis = RMatrix::Identity(R, R);
    std::vector<bool> active(static_cast<std::size_t>(R), false);
    Eigen::Index prev = -1;
    for (Eigen::Index i = 0; i < R; ++i) {
        auto& wi = w[static_cast<std::size_t>(i)];
        if (wi < tol_z) {
            wi = 0.0;
            continue;
        }
        if (prev >= 0 && d[prev] - d[i] < tol_d) {
            // Rotate the pair so the earlier component vanishes.
            auto& wp = w[static_cast<std::size_t>(prev)];
            const double r = std::hypot(wp, wi);
            const double c = wi / r;
            const double s = wp / r;
            const RVector col_p = basis.col(prev);
            const RVector col_i = basis.col(i);
            basis.col(prev) = c * col_p - s * col_i;
            basis.col(i) = s * col_p + c * col_i;
            wp = 0.0;
            wi = r;
            active[static_cast<std::size_t>(prev)] = false;
        }
        active[static_cast<std::size_t>(i)] = true;
        prev = i;
    }

    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < R; ++i)
        if (active[static_cast<std::size_t>(i)]) idx.push_back(i);
    const std::size_t K = idx.size();

    std::vector<double> dk(K), w2(K);
    double w2sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        dk[k] = d[idx[k]];
        w2[k] = w[static_cast<std::size_t>(idx[k])] * w[static_cast<std::size_t>(idx[k])];
        w2sum += w2[k];
    }

    // Root k lies in (dk[k+1], dk[k]); the last one in (dk[K-1] - |w|^2, dk[K-1]).
    std::vector<std::size_t> origin(K);
    std::vector<double> mu(K);
    std::vector<double> delta(K);
    for (std::size_t k = 0; k < K; ++k) {
        double lo = 0.0;
        double hi = 0.0;
        std::size_t o = k;
        if (k + 1 < K) {
            const double mid = 0.5 * (dk[k] + dk[k + 1]);
            double fmid = 1.0;
            for (std::size_t i = 0; i < K; ++i) fmid -= w2[i] / (dk[i] - mid);
            if (fmid >= 0.0) {
                o = k;
                lo = mid - dk[k];
                hi = 0.0;
            } else {
                o = k + 1;
                lo = 0.0;
                hi = mid - dk[k + 1];
            }
        } else {
            o = k;
            lo = -w2sum;
            hi = 0.0;
        }
        for (std::size_t i = 0; i < K; ++i) delta[i] = dk[i] - dk[o];
        origin[k] = o;
        mu[k] = (K == 1) ? -w2[0] : solve_secular_root(delta, w2, lo, hi);
    }

    // lambda_j - d_i evaluated without cancellation
    auto lam_minus_d = [&](std::size_t j, std::size_t i) { return (dk[origin[j]] - dk[i]) + mu[j]; };

    // Recomputed update vector (Gu-Eisenstat) so that the computed roots are
    // exact eigenvalues of a nearby problem.
    std::vector<double> zhat(K);
    for (std::size_t i = 0; i < K; ++i) {
        double prod = -lam_minus_d(i, i);
        for (std::size_t j = 0; j < K; ++j) {
            if (j == i) continue;
            prod *= lam_minus_d(j, i) / (dk[j] - dk[i]);
        }
        zhat[i] = std::sqrt(std::abs(prod));
    }

    RVector values(R);
    RMatrix vec_rot = RMatrix::Zero(R, R);
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < K; ++j) {
        RVector u = RVector::Zero(R);
        for (std::size_t i = 0; i < K; ++i) u[idx[i]] = zhat[i] / (-lam_minus_d(j, i));
        u.normalize();
        vec_rot.col(col) = u;
        values[col] = dk[origin[j]] + mu[j];
        ++col;
    }
    for (Eigen::Index i = 0; i < R; ++i) {
        if (active[static_cast<std::size_t>(i)]) continue;
        vec_rot(i, col) = 1.0;
        values[col] = d[i];
        ++col;
    }

    const RMatrix real_vecs = basis * vec_rot;
    CMatrix vecs = phase.asDiagonal() * real_vecs.cast<cplx>();
    EigenSystem out = sorted_descending(values, vecs);
    clamp_psd(out.values);
    return out;
}

TruncatedSvd principal_svd(const CMatrix& Y, Eigen::Index N) {
    const Eigen::Index kmax = std::min(Y.rows(), Y.cols());
    if (N <= 0 || N > kmax) throw Error(ErrorKind::InvalidInput, "principal_svd: N out of range");
    if (!all_finite(Y)) throw Error(ErrorKind::InvalidInput, "principal_svd: non-finite entries");
    Eigen::BDCSVD<CMatrix> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    TruncatedSvd out;
    out.left = svd.matrixU().leftCols(N);
    out.singulars = svd.singularValues().head(N);
    out.right = svd.matrixV().leftCols(N);
    for (auto& s : out.singulars) s = std::max(s, 0.0);
    return out;
}

SmoothedSpectrum smooth_eigenvalues(const RVector& lams, Eigen::Index N) {
    const Eigen::Index M = lams.size();
    if (N < 0 || N >= M) throw Error(ErrorKind::InvalidInput, "smooth_eigenvalues: need 0 <= N < M");
    SmoothedSpectrum out;
    out.nu_hat = lams.tail(M - N).mean();
    out.smoothed = lams;
    out.smoothed.tail(M - N).setConstant(out.nu_hat);
    return out;
}

} // namespace emglrt
