#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emglrt/common.hpp"
#include "emglrt/priors.hpp"
#include "emglrt/rng.hpp"

namespace emglrt {

enum class InterferenceKind { Gauss, QpskUnsync, Sinusoid, Spike };
enum class Hypothesis { H0, H1 };

std::string_view to_string(InterferenceKind kind) noexcept;
InterferenceKind parse_interference(std::string_view name);

struct ScenarioConfig {
    Eigen::Index M = 64;
    Eigen::Index L = 1024;
    Eigen::Index Q = 32;
    Eigen::Index N_true = 5;
    double nu = 1.0;
    double sigma_i2 = 1.0;
    std::vector<cplx> alphabet = qpsk_alphabet();
    DataModel data_model = DiscreteData{};
    InterferenceKind interference = InterferenceKind::Gauss;
    int oversample = 2;
    double rolloff = 0.35;
    double fo_min = -1e-4;
    double fo_max = 1e-4;
    std::optional<double> tau_fixed;
    std::uint64_t seed = 1;
    int grid_az = 181;
    int grid_el = 91;
};

/// Throws InvalidInput when the configuration violates its invariants.
void validate(const ScenarioConfig& config);

struct Scenario {
    CMatrix Y;
    Hypothesis hypothesis = Hypothesis::H1;
    CVector s;
    CVector h;
    CMatrix B;
    CMatrix Phi;
    double tau_resid = 0.0;
    double fo_T = 0.0;
};

/// Raised-cosine pulse g(t) at t/T with the given roll-off, with removable
/// singularities replaced by their limits.
double rc_pulse(double t_over_T, double rolloff);

/// [G]_{ql} = g(l - q - delta).
RMatrix pulse_matrix(double delta, Eigen::Index L, double rolloff);

/// Diag(exp(j 2 pi omega l)), l = 1..L.
Eigen::DiagonalMatrix<cplx, Eigen::Dynamic> freq_matrix(double omega, Eigen::Index L);

/// Direction cosines (u, v) = (cos el sin az, sin el).
std::pair<double, double> direction_cosines(double az, double el);

/// Steering vector of a sqrt(M) x sqrt(M) half-wavelength UPA; element
/// m = p * K + q has phase pi * (q * u + p * v).
CVector upa_response(double az, double el, Eigen::Index M);

struct Sidelobe {
    double az = 0.0;
    double el = 0.0;
    double gain = 0.0; // |h^H a|^2
};

/// Local maxima of |h^H a(az, el)|^2 on an az x el grid over [-90, 90] degrees,
/// outside the mainlobe box |u - u0|, |v - v0| < 2/K (wrapped), deduplicated
/// within 0.5/K, strongest first.
std::vector<Sidelobe> find_sidelobes(const CVector& h, int grid_az = 181, int grid_el = 91);

/// Steering vectors of the N strongest sidelobes of h.
CMatrix interferer_responses(const CVector& h, Eigen::Index N, int grid_az = 181, int grid_el = 91);

/// L x N interference waveforms, column power sigma_i2 / N.
CMatrix gen_interference(InterferenceKind kind, Eigen::Index N, Eigen::Index L, double sigma_i2, double rolloff,
                         double fo_min, double fo_max, Rng& rng);

/// Paired draw: both hypotheses of a trial share h, s, B, Phi and W.
Scenario synthesize(const ScenarioConfig& config, std::uint64_t trial_index, Hypothesis hypothesis);

/// Known training followed by data symbols over the configured alphabet.
SignalPrior scenario_prior(const ScenarioConfig& config, const CVector& s);

} // namespace emglrt
