#include <doctest.h>

#include <cmath>
#include <numbers>

#include "emglrt/scenario.hpp"

using namespace emglrt;

namespace {

constexpr double kPi = std::numbers::pi;

// textbook raised cosine with the squared denominator
double rc_literal(double x, double a) {
    const double s = x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x);
    return s * std::cos(kPi * a * x) / (1.0 - 4.0 * a * a * x * x);
}

ScenarioConfig small_config() {
    ScenarioConfig c;
    c.M = 16;
    c.L = 64;
    c.Q = 8;
    c.N_true = 3;
    c.grid_az = 61;
    c.grid_el = 31;
    return c;
}

} // namespace

TEST_CASE("raised cosine pulse") {
    CHECK(rc_pulse(0.0, 0.35) == 1.0);
    for (int k : {-3, -1, 1, 2, 7}) CHECK(rc_pulse(k, 0.35) == 0.0);
    for (double a : {0.25, 0.35, 0.5, 1.0}) {
        const double x = 1.0 / (2.0 * a);
        if (x == std::round(x)) continue;
        const double lim = 0.5 * (rc_literal(x - 1e-6, a) + rc_literal(x + 1e-6, a));
        CHECK(rc_pulse(x, a) == doctest::Approx(lim).epsilon(1e-6));
        CHECK(rc_pulse(-x, a) == doctest::Approx(lim).epsilon(1e-6));
    }
    for (double x : {0.3, -0.7, 1.25, 2.6}) CHECK(rc_pulse(x, 0.35) == doctest::Approx(rc_literal(x, 0.35)));
}

TEST_CASE("pulse and frequency matrices") {
    const RMatrix G0 = pulse_matrix(0.0, 12, 0.35);
    CHECK(G0 == RMatrix::Identity(12, 12));
    const RMatrix G1 = pulse_matrix(1.0, 6, 0.35);
    for (Eigen::Index q = 0; q < 6; ++q)
        for (Eigen::Index l = 0; l < 6; ++l) CHECK(G1(q, l) == (l - q == 1 ? 1.0 : 0.0));
    const RMatrix G = pulse_matrix(0.25, 9, 0.35);
    for (Eigen::Index q = 0; q < 9; ++q)
        for (Eigen::Index l = 0; l < 9; ++l)
            CHECK(G(q, l) == doctest::Approx(rc_literal(static_cast<double>(l - q) - 0.25, 0.35)).epsilon(1e-14));

    const auto J0 = freq_matrix(0.0, 8);
    for (Eigen::Index l = 0; l < 8; ++l) CHECK(J0.diagonal()[l] == cplx(1.0, 0.0));
    const auto J = freq_matrix(0.5, 8);
    for (Eigen::Index l = 0; l < 8; ++l) {
        CHECK(J.diagonal()[l].real() == doctest::Approx(l % 2 == 0 ? -1.0 : 1.0));
        CHECK(std::abs(J.diagonal()[l].imag()) < 1e-12);
    }
}

TEST_CASE("UPA steering vectors") {
    const CVector broadside = upa_response(0.0, 0.0, 16);
    CHECK((broadside - CVector::Ones(16)).norm() < 1e-15);
    const CVector a = upa_response(kPi / 2, 0.0, 4); // u = 1, v = 0
    const double expect[4] = {1, -1, 1, -1};
    for (int m = 0; m < 4; ++m) CHECK(std::abs(a[m] - cplx(expect[m], 0.0)) < 1e-12);
    const CVector r = upa_response(1.1, 4.3, 64);
    for (Eigen::Index m = 0; m < 64; ++m) CHECK(std::abs(r[m]) == doctest::Approx(1.0));
    CHECK_THROWS_AS(upa_response(0.0, 0.0, 15), Error);
}

TEST_CASE("sidelobe selection matches a brute-force grid search") {
    const Eigen::Index M = 16;
    const double K = 4.0;
    const CVector h = upa_response(0.4, 0.2, M);
    const int na = 61, ne = 31;
    const auto lobes = find_sidelobes(h, na, ne);
    REQUIRE(!lobes.empty());

    // oracle: strongest strict-or-equal local maximum outside the mainlobe box
    const auto ang = [](int i, int n) { return (-90.0 + 180.0 * i / (n - 1)) * kPi / 180.0; };
    Eigen::MatrixXd P(na, ne);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < ne; ++j) P(i, j) = std::norm(h.dot(upa_response(ang(i, na), ang(j, ne), M)));
    Eigen::Index pi = 0, pj = 0;
    P.maxCoeff(&pi, &pj);
    const double u0 = std::cos(ang(pj, ne)) * std::sin(ang(pi, na)), v0 = std::sin(ang(pj, ne));
    double best = -1.0;
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < ne; ++j) {
            bool mx = true;
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    const int a = i + di, b = j + dj;
                    if (a >= 0 && b >= 0 && a < na && b < ne && P(a, b) > P(i, j)) mx = false;
                }
            const double u = std::cos(ang(j, ne)) * std::sin(ang(i, na)), v = std::sin(ang(j, ne));
            auto wrap = [](double d) { return d - 2.0 * std::floor((d + 1.0) / 2.0); };
            if (std::abs(wrap(u - u0)) < 2.0 / K && std::abs(wrap(v - v0)) < 2.0 / K) continue;
            if (mx) best = std::max(best, P(i, j));
        }
    CHECK(lobes.front().gain == doctest::Approx(best));

    const CMatrix B = interferer_responses(h, 3, na, ne);
    CHECK(B.cols() == 3);
    for (Eigen::Index n = 0; n < 3; ++n) {
        CHECK(std::abs(h.dot(B.col(n))) / M < 1.0 - 1e-6);
        for (Eigen::Index m = 0; m < M; ++m) CHECK(std::abs(B(m, n)) == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(interferer_responses(h, 10000, na, ne), Error);
}

TEST_CASE("interference waveforms") {
    Rng rng(3, 0, 1);
    CHECK(gen_interference(InterferenceKind::Gauss, 2, 16, 0.0, 0.35, -1e-4, 1e-4, rng).norm() == 0.0);
    const CMatrix sin = gen_interference(InterferenceKind::Sinusoid, 4, 50, 2.0, 0.35, -1e-4, 1e-4, rng);
    for (Eigen::Index i = 0; i < sin.size(); ++i) CHECK(std::abs(sin(i)) == doctest::Approx(std::sqrt(0.5)));
    const CMatrix g = gen_interference(InterferenceKind::Gauss, 2, 4096, 3.0, 0.35, -1e-4, 1e-4, rng);
    for (Eigen::Index n = 0; n < 2; ++n) CHECK(g.col(n).squaredNorm() / 4096 == doctest::Approx(1.5).epsilon(0.05));
    const CMatrix q = gen_interference(InterferenceKind::QpskUnsync, 2, 512, 2.0, 0.35, -1e-4, 1e-4, rng);
    for (Eigen::Index n = 0; n < 2; ++n) CHECK(q.col(n).squaredNorm() / 512 == doctest::Approx(1.0).epsilon(0.15));
    const CMatrix sp = gen_interference(InterferenceKind::Spike, 1, 256, 1.0, 0.35, -1e-4, 1e-4, rng);
    CHECK(sp.allFinite());
    CHECK(sp.cwiseAbs().maxCoeff() <= std::sqrt(256.0) + 1e-9);
}

TEST_CASE("synthesis contracts") {
    auto c = small_config();
    c.nu = 0.0;
    c.N_true = 0;
    c.tau_fixed = 0.0;
    c.fo_min = c.fo_max = 0.0;
    const auto sc = synthesize(c, 4, Hypothesis::H1);
    CHECK((sc.Y - sc.h * sc.s.adjoint()).norm() == 0.0);

    const auto c2 = small_config();
    const auto a1 = synthesize(c2, 7, Hypothesis::H1);
    const auto a0 = synthesize(c2, 7, Hypothesis::H0);
    const auto b1 = synthesize(c2, 7, Hypothesis::H1);
    CHECK(a1.Y == b1.Y);
    CHECK(a1.s == a0.s);
    CHECK(a1.B == a0.B);
    CHECK(a1.tau_resid >= -0.25);
    CHECK(a1.tau_resid < 0.25);
    // H0 carries exactly the H1 data minus the signal term
    Eigen::RowVectorXcd row = a1.s.adjoint() * pulse_matrix(a1.tau_resid, c2.L, c2.rolloff).cast<cplx>();
    row = row * freq_matrix(a1.fo_T, c2.L);
    CHECK((a1.Y - a1.h * row - a0.Y).norm() < 1e-10);

    auto c3 = c2;
    c3.seed = 99;
    CHECK(synthesize(c3, 7, Hypothesis::H0).Y != a0.Y);

    const auto prior = scenario_prior(c2, a1.s);
    REQUIRE(prior.size() == static_cast<std::size_t>(c2.L));
    for (Eigen::Index l = 0; l < c2.Q; ++l)
        CHECK(std::get<PointMass>(prior.symbols[static_cast<std::size_t>(l)]).value == a1.s[l]);
    CHECK(std::holds_alternative<Discrete>(prior.symbols[static_cast<std::size_t>(c2.Q)]));
}

TEST_CASE("unit signal power") {
    auto c = small_config();
    c.L = 10000;
    c.Q = 0;
    c.N_true = 0;
    const auto sc = synthesize(c, 0, Hypothesis::H1);
    CHECK(sc.s.squaredNorm() / 10000.0 == doctest::Approx(1.0).epsilon(0.02));
}
