#pragma once

#include "emglrt/common.hpp"

namespace emglrt {

/// Eigenpairs of a Hermitian matrix, values in descending order.
struct EigenSystem {
    RVector values;
    CMatrix vectors; // column k pairs with values[k]
};

/// Top-N singular triplets: Y ~= left * diag(singulars) * right^H.
struct TruncatedSvd {
    CMatrix left;
    RVector singulars;
    CMatrix right;
};

/// Dense eigendecomposition. The input is symmetrized as (A + A^H)/2 first;
/// eigenvalues in [-eps_psd, 0) are clamped to zero.
EigenSystem hermitian_eig(const CMatrix& A);

/// Eigendecomposition of Diag(d) - z z^H by a deflated secular-equation solve.
///
/// `d` must be sorted descending. Components with |z_r| < 1e-12 ||z|| are
/// deflated to the unperturbed pair, and pairs of diagonal entries closer
/// than 1e-12 * |d[0]| are merged by a Givens rotation so that only one of
/// them interacts with the update. Each remaining root is bracketed between
/// adjacent poles and located with safeguarded Newton steps in coordinates
/// relative to the nearest pole; eigenvectors use the Gu-Eisenstat
/// recomputed update vector so they stay orthogonal for clustered roots.
EigenSystem diag_minus_rank_one_eig(const RVector& d, const CVector& z);

/// Leading N singular triplets of Y (0 < N <= min(M, L)).
TruncatedSvd principal_svd(const CMatrix& Y, Eigen::Index N);

struct SmoothedSpectrum {
    RVector smoothed;
    double nu_hat = 0.0;
};

/// Replaces the trailing M-N eigenvalues with their mean. Requires N < M.
SmoothedSpectrum smooth_eigenvalues(const RVector& lams, Eigen::Index N);

/// Sets eigenvalues in [-eps_psd, 0) to zero, eps_psd relative to the largest.
void clamp_psd(RVector& values);

} // namespace emglrt
