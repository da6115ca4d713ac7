#pragma once

#include "emglrt/common.hpp"

namespace emglrt {

/// Known-signal GLRT statistic with its eigenvalue diagnostics.
///
/// `lams0` and `lams1` are the raw descending eigenvalues of (1/L) Y Y^H and
/// (1/L) Y P_s^perp Y^H. The noise fields hold whatever the detector uses as
/// its noise level: the trailing mean for KMR, the trailing sum for
/// McWhorter, the clamp level for Gerlach-Steiner, and zero for Kelly.
struct ClosedFormReport {
    double log_statistic = 0.0;
    RVector lams0;
    RVector lams1;
    double nu0 = 0.0;
    double nu1 = 0.0;
    Eigen::Index rank_used = 0;
};

/// Eigenvalues of (1/L) Y Y^H and (1/L) Y P_s^perp Y^H.
struct KnownSignalSpectra {
    RVector lams0;
    RVector lams1;
};

KnownSignalSpectra known_signal_spectra(const CMatrix& Y, const CVector& s);

ClosedFormReport kelly_statistic(const CMatrix& Y, const CVector& s);
ClosedFormReport gerlach_steiner_statistic(const CMatrix& Y, const CVector& s, double nu);
ClosedFormReport kmr_statistic(const CMatrix& Y, const CVector& s, Eigen::Index N);
ClosedFormReport mcwhorter_statistic(const CMatrix& Y, const CVector& s, Eigen::Index N);

} // namespace emglrt
