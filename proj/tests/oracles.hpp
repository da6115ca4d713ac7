#pragma once

// Dense, literal reference implementations used only by the tests. They share
// no code with the library beyond the matrix type aliases.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline CMatrix randn(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double var = 1.0) {
    std::normal_distribution<double> n(0.0, std::sqrt(var / 2.0));
    CMatrix A(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) A(i, j) = cplx(n(rng), n(rng));
    return A;
}

inline CVector qpsk(std::mt19937_64& rng, Eigen::Index n) {
    const double a = 1.0 / std::sqrt(2.0);
    std::uniform_int_distribution<int> pick(0, 3);
    const cplx atoms[4] = {{a, a}, {-a, a}, {-a, -a}, {a, -a}};
    CVector s(n);
    for (auto& v : s) v = atoms[pick(rng)];
    return s;
}

inline RVector eigvals_desc(const CMatrix& A) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es((A + A.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    RVector v = es.eigenvalues();
    std::sort(v.data(), v.data() + v.size(), std::greater<>());
    return v;
}

inline CMatrix proj_perp(const CVector& s) {
    const Eigen::Index L = s.size();
    return CMatrix::Identity(L, L) - s * s.adjoint() / s.squaredNorm();
}

// (1/L) Y Y^H and (1/L) Y P_s^perp Y^H eigenvalues
inline std::pair<RVector, RVector> spectra(const CMatrix& Y, const CVector& s) {
    const double L = static_cast<double>(Y.cols());
    return {eigvals_desc(Y * Y.adjoint() / L), eigvals_desc(Y * proj_perp(s) * Y.adjoint() / L)};
}

inline double kelly(const CMatrix& Y, const CVector& s) {
    auto [l0, l1] = spectra(Y, s);
    double t = 0.0;
    for (Eigen::Index m = 0; m < l0.size(); ++m) t += std::log(l0[m] / l1[m]);
    return t;
}

inline RVector smooth(const RVector& l, Eigen::Index N) {
    RVector out = l;
    double tail = 0.0;
    for (Eigen::Index m = N; m < l.size(); ++m) tail += l[m];
    for (Eigen::Index m = N; m < l.size(); ++m) out[m] = tail / static_cast<double>(l.size() - N);
    return out;
}

inline double kmr(const CMatrix& Y, const CVector& s, Eigen::Index N) {
    auto [l0, l1] = spectra(Y, s);
    const RVector a = smooth(l0, N), b = smooth(l1, N);
    double t = 0.0;
    for (Eigen::Index m = 0; m < a.size(); ++m) t += std::log(a[m] / b[m]);
    return t;
}

inline double mcwhorter(const CMatrix& Y, const CVector& s, Eigen::Index N) {
    auto [l0, l1] = spectra(Y, s);
    double a = 0.0, b = 0.0;
    for (Eigen::Index m = N; m < l0.size(); ++m) {
        a += l0[m];
        b += l1[m];
    }
    return static_cast<double>(Y.rows() * Y.cols()) * std::log(a / b);
}

// Posterior mean / second moment for an equal-weight alphabet.
inline std::pair<cplx, double> discrete_post(const std::vector<cplx>& atoms, cplx r, double xi) {
    std::vector<double> lw;
    for (auto d : atoms) lw.push_back(-xi * std::norm(r - d));
    const double mx = *std::max_element(lw.begin(), lw.end());
    double z = 0.0;
    for (auto& v : lw) z += (v = std::exp(v - mx));
    cplx m{};
    double e = 0.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        m += lw[k] / z * atoms[k];
        e += lw[k] / z * std::norm(atoms[k]);
    }
    return {m, e};
}

inline std::vector<cplx> qpsk_atoms() {
    const double a = 1.0 / std::sqrt(2.0);
    return {{a, a}, {-a, a}, {-a, -a}, {a, -a}};
}

// ln p(Y; h, Sigma) with pilots known for l < Q and equal-weight QPSK elsewhere.
inline double marginal_loglik(const CMatrix& Y, const CVector& h, const CMatrix& Sigma, const CVector& s_train,
                              Eigen::Index Q) {
    const Eigen::Index M = Y.rows();
    Eigen::LLT<CMatrix> llt(Sigma);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < M; ++i) logdet += 2.0 * std::log(std::real(llt.matrixL()(i, i)));
    const auto atoms = qpsk_atoms();
    double total = 0.0;
    for (Eigen::Index l = 0; l < Y.cols(); ++l) {
        auto quad = [&](cplx a) {
            const CVector e = Y.col(l) - h * std::conj(a);
            return -std::real(e.dot(llt.solve(e)));
        };
        if (l < Q) {
            total += quad(s_train[l]);
        } else {
            double v[4], mx = -INFINITY, z = 0.0;
            for (int k = 0; k < 4; ++k) mx = std::max(mx, v[k] = quad(atoms[k]));
            for (double x : v) z += std::exp(x - mx);
            total += mx + std::log(z / 4.0);
        }
        total -= logdet + double(M) * std::log(M_PI);
    }
    return total;
}

// Literal Alg. 1 lines 3-19 with a fixed rank N, training symbols known and
// the rest equal-weight QPSK.
struct Alg1Out {
    CVector s;
    double E;
    double xi;
    CVector h;
};

inline Alg1Out alg1_step(const CMatrix& Y, const CVector& s, double E, Eigen::Index N, Eigen::Index Q,
                         const CVector& s_train, bool hard = false) {
    const Eigen::Index M = Y.rows(), L = Y.cols();
    const CVector h = Y * s / E;
    const CMatrix S1 = Y * Y.adjoint() / double(L) - (E / double(L)) * h * h.adjoint();
    CVector g;
    if (N == 0) {
        g = h / (S1.trace().real() / double(M));
    } else if (N == M) {
        g = S1.ldlt().solve(h);
    } else {
        Eigen::SelfAdjointEigenSolver<CMatrix> es((S1 + S1.adjoint()) / 2.0);
        // ascending order: principal eigenpairs are the last N
        const CMatrix Vb = es.eigenvectors().rightCols(N);
        const RVector lb = es.eigenvalues().tail(N);
        const double nu = (S1.trace().real() - lb.sum()) / double(M - N);
        CMatrix D = CMatrix::Zero(N, N);
        for (Eigen::Index k = 0; k < N; ++k) D(k, k) = 1.0 / lb[k] - 1.0 / nu;
        g = h / nu + Vb * D * Vb.adjoint() * h;
    }
    const double xi = h.dot(g).real();
    const CVector r = Y.adjoint() * g / xi;
    Alg1Out out{CVector(L), 0.0, xi, h};
    const auto atoms = qpsk_atoms();
    for (Eigen::Index l = 0; l < L; ++l) {
        if (l < Q) {
            out.s[l] = s_train[l];
            out.E += std::norm(s_train[l]);
        } else if (hard) {
            std::size_t best = 0;
            for (std::size_t k = 1; k < atoms.size(); ++k)
                if (std::norm(r[l] - atoms[k]) < std::norm(r[l] - atoms[best])) best = k;
            out.s[l] = atoms[best];
            out.E += std::norm(atoms[best]);
        } else {
            auto [m, e] = discrete_post(atoms, r[l], xi);
            out.s[l] = m;
            out.E += e;
        }
    }
    return out;
}

// Literal Alg. 2 lines 3-12 (soft) with fixed rank 0 < N.
struct Alg2Out {
    CVector s;
    double E;
    double xi;
    double nu1;
    CVector h;
};

inline Alg2Out alg2_step(const CMatrix& Y, const CVector& s, double E, Eigen::Index N, Eigen::Index Q,
                         const CVector& s_train) {
    const Eigen::Index M = Y.rows(), L = Y.cols();
    const double s2 = s.squaredNorm();
    const double zeta = std::sqrt(1.0 - s2 / E);
    const CVector g = Y * s / s2;
    const CMatrix Yb = Y + (zeta - 1.0) * g * s.adjoint();
    Eigen::JacobiSVD<CMatrix> svd(Yb, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const CMatrix V = svd.matrixU().leftCols(N);
    const CMatrix U = svd.matrixV().leftCols(N);
    CMatrix D = CMatrix::Zero(N, N);
    double top = 0.0;
    for (Eigen::Index k = 0; k < N; ++k) {
        D(k, k) = svd.singularValues()[k];
        top += std::pow(svd.singularValues()[k], 2);
    }
    const double nu1 = (Yb.squaredNorm() - top) / double(M * L);
    const CVector h = (s2 * g - (1.0 / zeta) * V * D * U.adjoint() * s) / E;
    const double xi = h.squaredNorm() / nu1;
    const CVector r = (Yb.adjoint() * h - U * D * V.adjoint() * h) / h.squaredNorm() + s / (1.0 + zeta);
    Alg2Out out{CVector(L), 0.0, xi, nu1, h};
    const auto atoms = qpsk_atoms();
    for (Eigen::Index l = 0; l < L; ++l) {
        if (l < Q) {
            out.s[l] = s_train[l];
            out.E += std::norm(s_train[l]);
        } else {
            auto [m, e] = discrete_post(atoms, r[l], xi);
            out.s[l] = m;
            out.E += e;
        }
    }
    return out;
}

// Forsythe's LS-beamformer iteration.
inline CVector forsythe_w(const CMatrix& Y, const CVector& s) {
    const CMatrix G = Y * Y.adjoint();
    const CVector a = G.ldlt().solve(Y * s);
    const double proj = (Y * s).dot(a).real(); // ||P_{Y^H} s||^2
    return a * (s.squaredNorm() / proj);
}

// Leave-one-out WMF outputs computed by brute force.
inline CVector loocv_naive(const CMatrix& Yt, const CVector& st, double alpha) {
    const Eigen::Index M = Yt.rows(), Q = Yt.cols();
    const CVector ht = Yt * st / st.squaredNorm();
    const CMatrix Nt = Yt - ht * st.adjoint();
    const double c = (Nt * Nt.adjoint()).trace().real() / double(Q) / double(M);
    CVector r(Q);
    for (Eigen::Index l = 0; l < Q; ++l) {
        CMatrix Yl(M, Q - 1);
        CVector sl(Q - 1);
        for (Eigen::Index j = 0, k = 0; j < Q; ++j) {
            if (j == l) continue;
            Yl.col(k) = Yt.col(j);
            sl[k++] = st[j];
        }
        const CVector hl = Yl * sl / sl.squaredNorm();
        const CMatrix S = (1.0 - alpha) / double(Q - 1) * Yl * proj_perp(sl) * Yl.adjoint() +
                          alpha * c * CMatrix::Identity(M, M);
        r[l] = Yt.col(l).dot(S.inverse() * hl);
    }
    return r;
}

} // namespace oracle
