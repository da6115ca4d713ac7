#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace emglrt {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Failure categories surfaced by the library. Each maps to a stable tag
/// string that the harness writes into trial records.
enum class ErrorKind {
    InvalidInput,
    InvalidPrecision,
    KellyUndefined,
    ZeroSignal,
    InvalidRank,
    DegenerateNoise,
    SingularCovariance,
    NonPositivePrecision,
    DegenerateZeta,
    DegenerateSpectrum,
    DegenerateTraining,
    InsufficientSidelobes,
    Io,
    Config,
};

std::string_view error_tag(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_tag(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Relative floor below which a Gram-matrix eigenvalue is treated as zero.
inline constexpr double kPsdRelTol = 1e-10;

inline double psd_floor(double largest) noexcept { return kPsdRelTol * std::abs(largest); }

/// (1/L) * Y * Y^H
CMatrix sample_covariance(const CMatrix& Y);

bool all_finite(const CMatrix& A);

} // namespace emglrt
