#include <doctest.h>

#include <random>

#include "emglrt/closed_form.hpp"
#include "oracles.hpp"

using namespace emglrt;

TEST_CASE("kelly scalar example") {
    CMatrix Y(1, 2);
    Y << 1.0, 1.0;
    CVector s(2);
    s << 1.0, 0.0;
    const auto r = kelly_statistic(Y, s);
    CHECK(r.lams0[0] == doctest::Approx(1.0));
    CHECK(r.lams1[0] == doctest::Approx(0.5));
    CHECK(r.log_statistic == doctest::Approx(std::log(2.0)));
}

TEST_CASE("closed-form statistics match dense oracles") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> Md(2, 8);
    for (int t = 0; t < 100; ++t) {
        const int M = Md(rng);
        const int L = M + 1 + static_cast<int>(rng() % 24);
        const CMatrix Y = oracle::randn(rng, M, L);
        const CVector s = oracle::qpsk(rng, L);
        CHECK(kelly_statistic(Y, s).log_statistic == doctest::Approx(oracle::kelly(Y, s)).epsilon(1e-8));
        for (int N = 0; N < M; ++N) {
            CHECK(kmr_statistic(Y, s, N).log_statistic == doctest::Approx(oracle::kmr(Y, s, N)).epsilon(1e-8));
            CHECK(mcwhorter_statistic(Y, s, N).log_statistic ==
                  doctest::Approx(oracle::mcwhorter(Y, s, N)).epsilon(1e-8));
        }
        // scale invariance and s -> c s invariance
        const cplx c(0.3, -2.0);
        CHECK(kelly_statistic(7.0 * Y, c * s).log_statistic == doctest::Approx(oracle::kelly(Y, s)).epsilon(1e-8));
        CHECK(kmr_statistic(7.0 * Y, s, M - 1).log_statistic == doctest::Approx(oracle::kmr(Y, s, M - 1)).epsilon(1e-8));
        CHECK(kelly_statistic(Y, s).log_statistic >= -1e-9);
        CHECK(mcwhorter_statistic(Y, c * s, M / 2).log_statistic >= -1e-9);
    }
}

TEST_CASE("gerlach-steiner clamps") {
    std::mt19937_64 rng(5);
    const CMatrix Y = oracle::randn(rng, 4, 12);
    const CVector s = oracle::qpsk(rng, 12);
    const auto kel = kelly_statistic(Y, s);
    CHECK(gerlach_steiner_statistic(Y, s, 1e-14).log_statistic == doctest::Approx(kel.log_statistic));
    CHECK(gerlach_steiner_statistic(Y, s, kel.lams0[0] * 1.01).log_statistic == doctest::Approx(0.0));
    const double nu = kel.lams0[2];
    auto [l0, l1] = oracle::spectra(Y, s);
    double ref = 0.0;
    for (int m = 0; m < 4; ++m) ref += std::log(std::max(l0[m], nu) / std::max(l1[m], nu));
    CHECK(gerlach_steiner_statistic(Y, s, nu).log_statistic == doctest::Approx(ref));
    CHECK_THROWS_AS(gerlach_steiner_statistic(Y, s, 0.0), Error);
}

TEST_CASE("closed-form errors and special cases") {
    std::mt19937_64 rng(8);
    const CMatrix Y = oracle::randn(rng, 4, 8);
    const CVector s = oracle::qpsk(rng, 8);
    // N = 0 reduces to trace ratios
    const double tr0 = (Y * Y.adjoint()).trace().real();
    const double tr1 = (Y * oracle::proj_perp(s) * Y.adjoint()).trace().real();
    CHECK(mcwhorter_statistic(Y, s, 0).log_statistic == doctest::Approx(32.0 * std::log(tr0 / tr1)));
    CHECK(kmr_statistic(Y, s, 0).log_statistic == doctest::Approx(4.0 * std::log(tr0 / tr1)));

    const auto k = kmr_statistic(Y, s, 2);
    CHECK(k.lams0.sum() == doctest::Approx(2.0 * k.lams0.head(2).sum() / 2.0 + 2.0 * k.nu0));

    try {
        kelly_statistic(oracle::randn(rng, 4, 4), oracle::qpsk(rng, 4));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::KellyUndefined);
    }
    try {
        kelly_statistic(Y, CVector::Zero(8));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroSignal);
    }
    CHECK_THROWS_AS(kmr_statistic(Y, s, 4), Error);
    CHECK_THROWS_AS(mcwhorter_statistic(Y, s, 4), Error);

    const CVector h = oracle::randn(rng, 4, 1);
    try {
        mcwhorter_statistic(h * s.adjoint(), s, 0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateNoise);
    }
}
