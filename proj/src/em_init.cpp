#include "emglrt/em_init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace emglrt {

namespace {

void check_training(const CMatrix& Y_train, const CVector& s_train) {
    if (Y_train.cols() != s_train.size()) throw Error(ErrorKind::InvalidInput, "training length does not match Y_t");
}

// beta = Q' / sum r_l / s_l over nonzero pilots, xi = 1 / mean |beta r_l - s_l|^2.
void unbias(const CVector& r, const CVector& s, cplx& beta, double& xi) {
    cplx ratio_sum{};
    double count = 0.0;
    for (Eigen::Index l = 0; l < s.size(); ++l) {
        if (s[l] == cplx{}) continue;
        ratio_sum += r[l] / s[l];
        count += 1.0;
    }
    if (count == 0.0 || std::abs(ratio_sum) <= 1e-300 || !std::isfinite(std::abs(ratio_sum)))
        throw Error(ErrorKind::DegenerateTraining, "unbiasing gain undefined");
    beta = count / ratio_sum;
    const double mse = (beta * r - s).squaredNorm() / static_cast<double>(s.size());
    xi = mse > 1.0 / kXiCap ? 1.0 / mse : kXiCap;
}

InitProduct finish(const CMatrix& Y, const CVector& s_train, const SignalPrior& prior, const CVector& r_data,
                   cplx beta, double xi) {
    const Eigen::Index Q = s_train.size();
    const Eigen::Index L = Y.cols();
    InitProduct out;
    out.s0 = CVector(L);
    out.s0.head(Q) = s_train;
    out.E0 = s_train.squaredNorm();
    out.beta_hat = beta;
    out.xi_hat = xi;
    for (Eigen::Index l = Q; l < L; ++l) {
        const auto post = posterior_stats(prior.symbols[static_cast<std::size_t>(l)], beta * r_data[l - Q], xi);
        out.s0[l] = post.mean;
        out.E0 += post.second_moment;
    }
    return out;
}

void check_prior(const CMatrix& Y, const CVector& s_train, const SignalPrior& prior) {
    if (static_cast<Eigen::Index>(prior.size()) != Y.cols())
        throw Error(ErrorKind::InvalidInput, "prior length does not match Y");
    if (s_train.size() > Y.cols()) throw Error(ErrorKind::InvalidInput, "training longer than the signal");
}

} // namespace

TrainEstimates train_estimates(const CMatrix& Y_train, const CVector& s_train) {
    check_training(Y_train, s_train);
    if (Y_train.cols() < 2) throw Error(ErrorKind::DegenerateTraining, "need at least two training columns");
    const double s2 = s_train.squaredNorm();
    if (!(s2 > 0.0)) throw Error(ErrorKind::ZeroSignal, "training symbols are all zero");
    TrainEstimates out;
    out.h_train = Y_train * s_train / s2;
    const CMatrix Nt = Y_train - out.h_train * s_train.adjoint();
    out.Sigma_train = Nt * Nt.adjoint() / static_cast<double>(Y_train.cols());
    out.Sigma_train = (out.Sigma_train + out.Sigma_train.adjoint()).eval() * 0.5;
    out.eig_train = hermitian_eig(out.Sigma_train);
    return out;
}

double shrinkage_level(const TrainEstimates& train, const CMatrix& Y_train) {
    const double M = static_cast<double>(Y_train.rows());
    const double c = train.Sigma_train.trace().real() / M;
    const double floor = 1e-12 * Y_train.squaredNorm() / (M * static_cast<double>(Y_train.cols()));
    const double level = std::max(c, floor);
    if (!(level > 0.0)) throw Error(ErrorKind::DegenerateTraining, "training data are identically zero");
    return level;
}

LoocvResult loocv_precision(const CMatrix& Y_train, const CVector& s_train, double alpha) {
    return loocv_precision(train_estimates(Y_train, s_train), Y_train, s_train, alpha);
}

LoocvResult loocv_precision(const TrainEstimates& train, const CMatrix& Y_train, const CVector& s_train,
                            double alpha) {
    check_training(Y_train, s_train);
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidInput, "alpha must lie in (0, 1]");
    const Eigen::Index Q = Y_train.cols();
    if (Q < 3) throw Error(ErrorKind::DegenerateTraining, "leave-one-out needs Q >= 3");
    const double q = static_cast<double>(Q);
    const double s2 = s_train.squaredNorm();
    const double c = shrinkage_level(train, Y_train);

    const RVector gamma = ((1.0 - alpha) * q / (q - 1.0)) * train.eig_train.values.array() + alpha * c;
    const CMatrix& V = train.eig_train.vectors;
    const CMatrix Nt = Y_train - train.h_train * s_train.adjoint();
    const CMatrix YV = Y_train.adjoint() * V; // row l: y_l^H V
    const CMatrix NV = Nt.adjoint() * V;
    const CVector Vh = V.adjoint() * train.h_train;
    const CVector w = Vh.array() / gamma.array().cast<cplx>();

    const CVector a = YV * w;  // y_l^H Sa^-1 h
    const CVector d = NV * w;  // n_l^H Sa^-1 h
    const RVector inv_gamma = gamma.cwiseInverse();
    const CVector b = (YV.array() * NV.conjugate().array()).matrix() * inv_gamma.cast<cplx>(); // y_l^H Sa^-1 n_l
    const RVector cn = NV.cwiseAbs2() * inv_gamma;                                         // n_l^H Sa^-1 n_l

    LoocvResult out;
    out.r_alpha = CVector(Q);
    for (Eigen::Index l = 0; l < Q; ++l) {
        const double sl2 = std::norm(s_train[l]);
        const double rest = s2 - sl2;
        if (!(rest > 1e-14 * s2)) throw Error(ErrorKind::DegenerateTraining, "leave-one-out training is all zero");
        const double g = (1.0 - alpha) / (q - 1.0) * (1.0 + sl2 / rest);
        const double denom = 1.0 - g * cn[l];
        out.r_alpha[l] = a[l] + b[l] / denom * (g * d[l] - s_train[l] / rest);
    }
    unbias(out.r_alpha, s_train, out.beta_hat, out.xi_hat);
    return out;
}

AlphaSelection select_alpha(const CMatrix& Y_train, const CVector& s_train, const std::vector<double>& grid) {
    if (grid.empty()) throw Error(ErrorKind::InvalidInput, "empty alpha grid");
    const auto train = train_estimates(Y_train, s_train);
    AlphaSelection best;
    best.xi_star = -std::numeric_limits<double>::infinity();
    best.alpha_star = -1.0;
    for (double alpha : grid) {
        const auto res = loocv_precision(train, Y_train, s_train, alpha);
        if (res.xi_hat > best.xi_star || (res.xi_hat == best.xi_star && alpha > best.alpha_star)) {
            best.alpha_star = alpha;
            best.xi_star = res.xi_hat;
            best.beta_star = res.beta_hat;
        }
    }
    return best;
}

InitProduct initialize(const CMatrix& Y, const CVector& s_train, const SignalPrior& prior,
                       const std::vector<double>& grid) {
    check_prior(Y, s_train, prior);
    const Eigen::Index Q = s_train.size();
    const Eigen::Index L = Y.cols();
    const CMatrix Yt = Y.leftCols(Q);
    if (Q == L) {
        InitProduct out;
        out.s0 = s_train;
        out.E0 = s_train.squaredNorm();
        if (out.E0 > 0.0) out.h_train = Yt * s_train / out.E0;
        return out;
    }
    const auto train = train_estimates(Yt, s_train);
    const auto sel = select_alpha(Yt, s_train, grid);
    const double c = shrinkage_level(train, Yt);
    const RVector gamma = (1.0 - sel.alpha_star) * train.eig_train.values.array() + sel.alpha_star * c;
    const CMatrix& V = train.eig_train.vectors;
    const CVector w = V * ((V.adjoint() * train.h_train).array() / gamma.array().cast<cplx>()).matrix();
    const CVector r_data = Y.rightCols(L - Q).adjoint() * w;
    auto out = finish(Y, s_train, prior, r_data, sel.beta_star, sel.xi_star);
    out.alpha_star = sel.alpha_star;
    out.h_train = train.h_train;
    return out;
}

InitProduct initialize_rank_n(const CMatrix& Y, const CVector& s_train, const SignalPrior& prior, Eigen::Index N) {
    check_prior(Y, s_train, prior);
    const Eigen::Index Q = s_train.size();
    const Eigen::Index L = Y.cols();
    const CMatrix Yt = Y.leftCols(Q);
    const auto train = train_estimates(Yt, s_train);
    const auto sm = smooth_eigenvalues(train.eig_train.values, N);
    if (!(sm.nu_hat > psd_floor(train.eig_train.values[0])) || !(sm.nu_hat > 0.0))
        throw Error(ErrorKind::DegenerateTraining, "rank-N training covariance is singular");
    const CMatrix& V = train.eig_train.vectors;
    const CVector w = V * ((V.adjoint() * train.h_train).array() / sm.smoothed.array().cast<cplx>()).matrix();
    cplx beta;
    double xi = 0.0;
    unbias(Yt.adjoint() * w, s_train, beta, xi);
    const CVector r_data = Y.rightCols(L - Q).adjoint() * w;
    auto out = finish(Y, s_train, prior, r_data, beta, xi);
    out.alpha_star = 0.0;
    out.h_train = train.h_train;
    return out;
}

InitProduct initial_estimate(const CMatrix& Y, const SignalPrior& prior, const std::vector<double>& grid) {
    const auto training = leading_training(prior);
    CVector s_train(static_cast<Eigen::Index>(training.size()));
    for (std::size_t k = 0; k < training.size(); ++k) s_train[static_cast<Eigen::Index>(k)] = training[k];
    return initialize(Y, s_train, prior, grid);
}

} // namespace emglrt
