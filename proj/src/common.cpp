#include "emglrt/common.hpp"

namespace emglrt {

std::string_view error_tag(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::InvalidPrecision: return "InvalidPrecision";
    case ErrorKind::KellyUndefined: return "KellyUndefined";
    case ErrorKind::ZeroSignal: return "ZeroSignal";
    case ErrorKind::InvalidRank: return "InvalidRank";
    case ErrorKind::DegenerateNoise: return "DegenerateNoise";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::NonPositivePrecision: return "NonPositivePrecision";
    case ErrorKind::DegenerateZeta: return "DegenerateZeta";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::DegenerateTraining: return "DegenerateTraining";
    case ErrorKind::InsufficientSidelobes: return "InsufficientSidelobes";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Config: return "ConfigError";
    }
    return "Unknown";
}

CMatrix sample_covariance(const CMatrix& Y) {
    CMatrix S = Y * Y.adjoint() / static_cast<double>(Y.cols());
    // exact Hermitian symmetry for downstream eigen solvers
    return (S + S.adjoint()) * 0.5;
}

bool all_finite(const CMatrix& A) {
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            if (!std::isfinite(A(i, j).real()) || !std::isfinite(A(i, j).imag())) return false;
    return true;
}

} // namespace emglrt
