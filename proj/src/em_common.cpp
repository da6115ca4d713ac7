#include "emglrt/em_common.hpp"

namespace emglrt {

void validate(const EmConfig& config) {
    if (config.max_iters < 1) throw Error(ErrorKind::InvalidInput, "max_iters must be at least 1");
    if (!(config.rel_tol > 0.0 && config.rel_tol < 1.0))
        throw Error(ErrorKind::InvalidInput, "rel_tol must lie in (0, 1)");
    if (!config.rank.estimate && config.rank.fixed_N < 0)
        throw Error(ErrorKind::InvalidRank, "fixed rank must be nonnegative");
    for (double a : config.alpha_grid)
        if (!(a > 0.0 && a <= 1.0)) throw Error(ErrorKind::InvalidInput, "alpha grid values must lie in (0, 1]");
}

bool estimate_converged(const CVector& s_new, const CVector& s_old, double tol) {
    const double denom = s_new.norm();
    if (denom == 0.0) return true;
    return (s_new - s_old).norm() / denom < tol;
}

} // namespace emglrt
