#include "emglrt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace emglrt {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

// Wraps a direction-cosine difference into [-1, 1).
double wrap2(double d) {
    d = std::fmod(d + 1.0, 2.0);
    if (d < 0.0) d += 2.0;
    return d - 1.0;
}

Eigen::Index grid_side(Eigen::Index M) {
    const auto K = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(M))));
    if (K * K != M || M <= 0) throw Error(ErrorKind::InvalidInput, "UPA needs a square number of elements");
    return K;
}

// Row vector x^T G_delta without forming G.
Eigen::RowVectorXcd apply_pulse(const Eigen::RowVectorXcd& x, double delta, double rolloff) {
    const Eigen::Index L = x.size();
    std::vector<double> tab(static_cast<std::size_t>(2 * L - 1));
    for (Eigen::Index k = -(L - 1); k <= L - 1; ++k)
        tab[static_cast<std::size_t>(k + L - 1)] = rc_pulse(static_cast<double>(k) - delta, rolloff);
    Eigen::RowVectorXcd out = Eigen::RowVectorXcd::Zero(L);
    for (Eigen::Index l = 0; l < L; ++l) {
        cplx acc{};
        for (Eigen::Index q = 0; q < L; ++q) acc += x[q] * tab[static_cast<std::size_t>(l - q + L - 1)];
        out[l] = acc;
    }
    return out;
}

} // namespace

std::string_view to_string(InterferenceKind kind) noexcept {
    switch (kind) {
    case InterferenceKind::Gauss: return "gauss";
    case InterferenceKind::QpskUnsync: return "qpsk_unsync";
    case InterferenceKind::Sinusoid: return "sinusoid";
    case InterferenceKind::Spike: return "spike";
    }
    return "gauss";
}

InterferenceKind parse_interference(std::string_view name) {
    if (name == "gauss") return InterferenceKind::Gauss;
    if (name == "qpsk_unsync") return InterferenceKind::QpskUnsync;
    if (name == "sinusoid") return InterferenceKind::Sinusoid;
    if (name == "spike") return InterferenceKind::Spike;
    throw Error(ErrorKind::Config, "unknown interference kind '" + std::string(name) + "'");
}

void validate(const ScenarioConfig& c) {
    if (c.M < 1 || c.L < 1) throw Error(ErrorKind::InvalidInput, "M and L must be positive");
    grid_side(c.M);
    if (c.Q < 0 || c.Q > c.L) throw Error(ErrorKind::InvalidInput, "need 0 <= Q <= L");
    if (c.N_true < 0 || (c.N_true > 0 && c.N_true >= std::min(c.M, c.L)))
        throw Error(ErrorKind::InvalidInput, "need N < min(M, L)");
    if (!(c.nu >= 0.0)) throw Error(ErrorKind::InvalidInput, "noise variance must be nonnegative");
    if (!(c.sigma_i2 >= 0.0)) throw Error(ErrorKind::InvalidInput, "interference power must be nonnegative");
    if (c.alphabet.empty()) throw Error(ErrorKind::InvalidInput, "empty alphabet");
    if (c.oversample < 1) throw Error(ErrorKind::InvalidInput, "oversample must be positive");
    if (!(c.rolloff >= 0.0 && c.rolloff <= 1.0)) throw Error(ErrorKind::InvalidInput, "rolloff must lie in [0, 1]");
    if (!(c.fo_min <= c.fo_max)) throw Error(ErrorKind::InvalidInput, "empty frequency-offset range");
    if (c.grid_az < 3 || c.grid_el < 3) throw Error(ErrorKind::InvalidInput, "sidelobe grid too coarse");
}

double rc_pulse(double x, double a) {
    if (x == 0.0) return 1.0;
    if (x == std::round(x)) return 0.0;
    const double q = 2.0 * a * x;
    if (a > 0.0 && std::abs(1.0 - q * q) < 1e-9) return 0.25 * kPi * sinc(1.0 / (2.0 * a));
    return std::cos(kPi * a * x) / (1.0 - q * q) * sinc(x);
}

RMatrix pulse_matrix(double delta, Eigen::Index L, double rolloff) {
    // entry depends on l - q only; tabulate the 2L - 1 offsets
    std::vector<double> tab(static_cast<std::size_t>(2 * L - 1));
    for (Eigen::Index k = -(L - 1); k <= L - 1; ++k)
        tab[static_cast<std::size_t>(k + L - 1)] = rc_pulse(static_cast<double>(k) - delta, rolloff);
    RMatrix G(L, L);
    for (Eigen::Index l = 0; l < L; ++l)
        for (Eigen::Index q = 0; q < L; ++q) G(q, l) = tab[static_cast<std::size_t>(l - q + L - 1)];
    return G;
}

Eigen::DiagonalMatrix<cplx, Eigen::Dynamic> freq_matrix(double omega, Eigen::Index L) {
    CVector d(L);
    for (Eigen::Index l = 0; l < L; ++l) d[l] = std::polar(1.0, 2.0 * kPi * omega * static_cast<double>(l + 1));
    return Eigen::DiagonalMatrix<cplx, Eigen::Dynamic>(d);
}

std::pair<double, double> direction_cosines(double az, double el) {
    return {std::cos(el) * std::sin(az), std::sin(el)};
}

CVector upa_response(double az, double el, Eigen::Index M) {
    const Eigen::Index K = grid_side(M);
    const auto [u, v] = direction_cosines(az, el);
    CVector a(M);
    for (Eigen::Index p = 0; p < K; ++p)
        for (Eigen::Index q = 0; q < K; ++q)
            a[p * K + q] = std::polar(1.0, kPi * (static_cast<double>(q) * u + static_cast<double>(p) * v));
    return a;
}

std::vector<Sidelobe> find_sidelobes(const CVector& h, int grid_az, int grid_el) {
    const Eigen::Index M = h.size();
    const double K = static_cast<double>(grid_side(M));
    const auto az_at = [&](int i) { return (-90.0 + 180.0 * i / (grid_az - 1)) * kPi / 180.0; };
    const auto el_at = [&](int j) { return (-90.0 + 180.0 * j / (grid_el - 1)) * kPi / 180.0; };

    RMatrix pattern(grid_az, grid_el);
    for (int i = 0; i < grid_az; ++i)
        for (int j = 0; j < grid_el; ++j) pattern(i, j) = std::norm(h.dot(upa_response(az_at(i), el_at(j), M)));

    // mainlobe centre: the strongest grid point
    Eigen::Index mi = 0, mj = 0;
    pattern.maxCoeff(&mi, &mj);
    const auto [u0, v0] = direction_cosines(az_at(static_cast<int>(mi)), el_at(static_cast<int>(mj)));

    std::vector<Sidelobe> peaks;
    for (int i = 0; i < grid_az; ++i) {
        for (int j = 0; j < grid_el; ++j) {
            const double p = pattern(i, j);
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    const int a = i + di, b = j + dj;
                    if ((di == 0 && dj == 0) || a < 0 || b < 0 || a >= grid_az || b >= grid_el) continue;
                    if (pattern(a, b) > p) {
                        is_max = false;
                        break;
                    }
                }
            if (!is_max) continue;
            const auto [u, v] = direction_cosines(az_at(i), el_at(j));
            if (std::abs(wrap2(u - u0)) < 2.0 / K && std::abs(wrap2(v - v0)) < 2.0 / K) continue;
            peaks.push_back({az_at(i), el_at(j), p});
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const Sidelobe& a, const Sidelobe& b) { return a.gain > b.gain; });
    std::vector<Sidelobe> out;
    for (const auto& pk : peaks) {
        const auto [u, v] = direction_cosines(pk.az, pk.el);
        bool dup = false;
        for (const auto& kept : out) {
            const auto [ku, kv] = direction_cosines(kept.az, kept.el);
            if (std::hypot(wrap2(u - ku), wrap2(v - kv)) < 0.5 / K) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(pk);
    }
    return out;
}

CMatrix interferer_responses(const CVector& h, Eigen::Index N, int grid_az, int grid_el) {
    if (N < 1) throw Error(ErrorKind::InvalidInput, "need at least one interferer");
    const auto lobes = find_sidelobes(h, grid_az, grid_el);
    if (static_cast<Eigen::Index>(lobes.size()) < N)
        throw Error(ErrorKind::InsufficientSidelobes, "beampattern has fewer sidelobes than interferers");
    CMatrix B(h.size(), N);
    for (Eigen::Index n = 0; n < N; ++n)
        B.col(n) = upa_response(lobes[static_cast<std::size_t>(n)].az, lobes[static_cast<std::size_t>(n)].el, h.size());
    return B;
}

CMatrix gen_interference(InterferenceKind kind, Eigen::Index N, Eigen::Index L, double sigma_i2, double rolloff,
                         double fo_min, double fo_max, Rng& rng) {
    CMatrix Phi = CMatrix::Zero(L, N);
    if (N == 0) return Phi;
    const double p = sigma_i2 / static_cast<double>(N);
    const auto qpsk = qpsk_alphabet();
    for (Eigen::Index n = 0; n < N; ++n) {
        switch (kind) {
        case InterferenceKind::Gauss:
            for (Eigen::Index l = 0; l < L; ++l) Phi(l, n) = rng.complex_normal(p);
            break;
        case InterferenceKind::QpskUnsync: {
            const double theta = rng.uniform(0.0, 2.0 * kPi);
            const double tau = rng.uniform(-0.5, 0.5);
            const double fo = rng.uniform(fo_min, fo_max);
            CVector sn(L);
            for (Eigen::Index l = 0; l < L; ++l) sn[l] = qpsk[rng.index(4)];
            // phi^H = e^{j theta} s^H G J
            const Eigen::RowVectorXcd row = apply_pulse(sn.adjoint(), tau, rolloff);
            const auto J = freq_matrix(fo, L);
            for (Eigen::Index l = 0; l < L; ++l)
                Phi(l, n) = std::sqrt(p) * std::conj(std::polar(1.0, theta) * row[l] * J.diagonal()[l]);
            break;
        }
        case InterferenceKind::Sinusoid: {
            const double theta = rng.uniform(0.0, 2.0 * kPi);
            const double omega = rng.uniform(-kPi, kPi);
            for (Eigen::Index l = 0; l < L; ++l)
                Phi(l, n) = std::polar(std::sqrt(p), omega * static_cast<double>(l + 1) + theta);
            break;
        }
        case InterferenceKind::Spike: {
            const double theta = rng.uniform(0.0, 2.0 * kPi);
            const double tau = rng.uniform(0.0, static_cast<double>(L));
            const double amp = std::sqrt(p * static_cast<double>(L));
            for (Eigen::Index l = 0; l < L; ++l)
                Phi(l, n) = std::polar(amp * rc_pulse(static_cast<double>(l + 1) - tau, rolloff), theta);
            break;
        }
        }
    }
    return Phi;
}

Scenario synthesize(const ScenarioConfig& c, std::uint64_t trial_index, Hypothesis hypothesis) {
    validate(c);
    Rng sig(c.seed, trial_index, 0);
    Rng intf(c.seed, trial_index, 1);
    Rng noise(c.seed, trial_index, 2);

    Scenario sc;
    sc.hypothesis = hypothesis;
    sc.s = CVector(c.L);
    for (Eigen::Index l = 0; l < c.L; ++l) sc.s[l] = c.alphabet[static_cast<std::size_t>(sig.index(c.alphabet.size()))];
    const double az = sig.uniform(0.0, 2.0 * kPi);
    const double el = sig.uniform(0.0, 2.0 * kPi);
    const double theta = sig.uniform(0.0, 2.0 * kPi);
    sc.h = std::polar(1.0, theta) * upa_response(az, el, c.M);
    const double half = 0.5 / static_cast<double>(c.oversample);
    const double tau_draw = sig.uniform(-half, half);
    sc.tau_resid = c.tau_fixed ? *c.tau_fixed : tau_draw;
    sc.fo_T = sig.uniform(c.fo_min, c.fo_max);

    if (c.N_true > 0) {
        sc.B = interferer_responses(sc.h, c.N_true, c.grid_az, c.grid_el);
        sc.Phi = gen_interference(c.interference, c.N_true, c.L, c.sigma_i2, c.rolloff, c.fo_min, c.fo_max, intf);
    } else {
        sc.B = CMatrix::Zero(c.M, 0);
        sc.Phi = CMatrix::Zero(c.L, 0);
    }

    sc.Y = CMatrix(c.M, c.L);
    for (Eigen::Index l = 0; l < c.L; ++l)
        for (Eigen::Index m = 0; m < c.M; ++m) sc.Y(m, l) = noise.complex_normal(c.nu);
    if (c.N_true > 0) sc.Y += sc.B * sc.Phi.adjoint();
    if (hypothesis == Hypothesis::H1) {
        Eigen::RowVectorXcd row = sc.s.adjoint();
        if (sc.tau_resid != 0.0) row = apply_pulse(row, sc.tau_resid, c.rolloff);
        if (sc.fo_T != 0.0) row = row * freq_matrix(sc.fo_T, c.L);
        sc.Y += sc.h * row;
    }
    return sc;
}

SignalPrior scenario_prior(const ScenarioConfig& c, const CVector& s) {
    std::vector<cplx> pilots(s.data(), s.data() + c.Q);
    return training_data_prior(pilots, c.alphabet, static_cast<std::size_t>(c.L), c.data_model);
}

} // namespace emglrt
