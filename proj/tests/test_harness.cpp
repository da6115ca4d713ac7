#include <doctest.h>

#include <cmath>
#include <numeric>

#include "emglrt/closed_form.hpp"
#include "emglrt/harness.hpp"

using namespace emglrt;

namespace {

ScenarioConfig tiny() {
    ScenarioConfig c;
    c.M = 9;
    c.L = 48;
    c.Q = 12;
    c.N_true = 2;
    c.nu = 2.0;
    c.sigma_i2 = 4.0;
    c.grid_az = 61;
    c.grid_el = 31;
    return c;
}

std::vector<DetectorSpec> specs(std::initializer_list<DetectorKind> kinds, DetectorSettings s = {}) {
    std::vector<DetectorSpec> out;
    for (auto k : kinds) out.push_back(make_detector(k, s));
    return out;
}

} // namespace

TEST_CASE("detector names round-trip") {
    for (auto k : all_detectors()) CHECK(parse_detector(to_string(k)) == k);
    CHECK(all_detectors().size() == 9);
    CHECK_THROWS_AS(parse_detector("kelly"), Error);
    CHECK(make_detector(DetectorKind::Forsythe).em.decision == DecisionMode::Hard);
    CHECK_FALSE(make_detector(DetectorKind::KelEm).em.rank.estimate);
    CHECK(make_detector(DetectorKind::McwEm).criterion.gain == 1.7);
    DetectorSettings s;
    s.gain["kmr-em"] = 3.0;
    CHECK(make_detector(DetectorKind::KmrEm, s).em.rank.criterion.gain == 3.0);
}

TEST_CASE("pd_at_pfa quantile convention") {
    std::vector<double> h0(100);
    std::iota(h0.begin(), h0.end(), 1.0);
    std::vector<double> h1 = {94.5, 95.5, 96.5, 200.0};
    const auto cal = calibrate_threshold(h0, h1, Metric{MetricKind::PdAtPfa, 0.05});
    CHECK(cal.eta == 95.0);
    CHECK(cal.achieved == 0.75);
    // exact multiple: ceil must not round 0.99 * 100 up to 100 through float error
    CHECK(calibrate_threshold(h0, h1, Metric{MetricKind::PdAtPfa, 0.01}).eta == 99.0);
}

TEST_CASE("min_error calibration") {
    const std::vector<double> h0 = {0.1, 0.2, 0.3}, h1 = {1.0, 2.0, 3.0};
    const auto sep = calibrate_threshold(h0, h1, Metric{MetricKind::MinError, 0.0});
    CHECK(sep.achieved == 0.0);
    CHECK(sep.eta == 0.3);
    const std::vector<double> same = {1.0, 2.0, 3.0, 4.0};
    CHECK(calibrate_threshold(same, same, Metric{MetricKind::MinError, 0.0}).achieved == 0.5);
    // flipped: the best rule is "always decide H1" or "always H0"
    CHECK(calibrate_threshold(h1, h0, Metric{MetricKind::MinError, 0.0}).achieved == 0.5);
}

TEST_CASE("run_point record layout and determinism") {
    const auto c = tiny();
    const auto one = run_point(c, specs({DetectorKind::KmrTr}), 1);
    REQUIRE(one.size() == 2);
    CHECK(one[0].hypothesis == Hypothesis::H1);
    CHECK(one[1].hypothesis == Hypothesis::H0);

    const auto ds = specs({DetectorKind::KmrTr, DetectorKind::KmrEm, DetectorKind::McwEm});
    const auto a = run_point(c, ds, 4, 1);
    const auto b = run_point(c, ds, 4, 3);
    REQUIRE(a.size() == 24);
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].trial == b[i].trial);
        CHECK(a[i].detector == b[i].detector);
        CHECK(a[i].error == b[i].error);
        if (a[i].ok()) CHECK(a[i].statistic == b[i].statistic);
    }
    CHECK(a[0].trial == 0);
    CHECK(a.back().trial == 3);
}

TEST_CASE("kel-tr surfaces KellyUndefined without aborting") {
    auto c = tiny();
    c.Q = 6; // < M + 1
    const auto recs = run_point(c, specs({DetectorKind::KelTr, DetectorKind::KmrEm}), 3);
    for (const auto& r : recs) {
        if (r.detector == "kel-tr") CHECK(r.error == "KellyUndefined");
        else CHECK(r.ok());
    }
    const auto rows = summarize(recs, {"kel-tr"}, Metric{}, "", 0.0);
    CHECK(rows[0].failures_H1 == 3);
    CHECK(rows[0].failures_H0 == 3);
    CHECK(rows[0].metric_value == 0.0);
}

TEST_CASE("fully trained EM detectors reduce to their training-only versions") {
    auto c = tiny();
    c.Q = c.L;
    DetectorSettings s;
    s.gain["kmr-em"] = 1.1; // same criterion as kmr-tr
    const auto recs = run_point(c, specs({DetectorKind::KmrTr, DetectorKind::KmrEm, DetectorKind::KelTr,
                                          DetectorKind::KelEm}, s), 3);
    for (std::size_t i = 0; i < recs.size(); i += 4) {
        REQUIRE(recs[i].ok());
        REQUIRE(recs[i + 2].ok());
        CHECK(recs[i + 1].statistic == doctest::Approx(recs[i].statistic).epsilon(1e-6));
        CHECK(recs[i + 1].N_hat == recs[i].N_hat);
        CHECK(recs[i + 3].statistic == doctest::Approx(recs[i + 2].statistic).epsilon(1e-6));
    }
}

TEST_CASE("sweep axes map onto the scenario") {
    const auto base = tiny();
    SweepSpec sw;
    sw.axis = SweepAxis::Q;
    sw.tie_power = true;
    auto c = apply_axis(base, sw, 16);
    CHECK(c.Q == 16);
    CHECK(c.nu == 16.0);
    CHECK(c.sigma_i2 == 16.0);
    sw.axis = SweepAxis::N;
    c = apply_axis(base, sw, 3);
    CHECK(c.N_true == 3);
    CHECK(c.sigma_i2 == base.nu * 3);
    sw.axis = SweepAxis::Sir;
    CHECK(apply_axis(base, sw, 50).sigma_i2 == 50.0);
    sw.axis = SweepAxis::Tau;
    CHECK(*apply_axis(base, sw, 0.25).tau_fixed == 0.25);
    sw.axis = SweepAxis::Q;
    sw.values = {2.5};
    CHECK_THROWS_AS(validate(sw), Error);
    sw.values = {4};
    sw.trials = 1;
    CHECK_THROWS_AS(validate(sw), Error);
}

TEST_CASE("single-value sweep equals run_point plus calibration") {
    const auto base = tiny();
    SweepSpec sw;
    sw.axis = SweepAxis::Snr;
    sw.values = {3.0};
    sw.trials = 4;
    sw.metric = Metric{MetricKind::MinError, 0.0};
    const auto ds = specs({DetectorKind::KmrEm, DetectorKind::McwTr});
    const auto res = run_sweep(sw, base, ds);
    const auto recs = run_point(apply_axis(base, sw, 3.0), ds, 4);
    const auto rows = summarize(recs, {"kmr-em", "mcw-tr"}, sw.metric, "snr", 3.0);
    REQUIRE(res.rows.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(res.rows[i].metric_value == rows[i].metric_value);
        CHECK(res.rows[i].eta == rows[i].eta);
        CHECK(res.rows[i].mean_N_hat_H1 == rows[i].mean_N_hat_H1);
    }
    CHECK(res.records.front().axis == "snr");
    CHECK(res.timing.size() == 2);
}
