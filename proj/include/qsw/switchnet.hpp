#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "qsw/elements.hpp"

namespace qsw::switchnet {

using elements::ResonatorSpec;
using netcore::SMatrix;

// Full device: two hybrids in a Mach-Zehnder arrangement with one tunable
// resonator in each arm. Port order: 0 and 1 on the input hybrid, 2 and 3 on
// the output hybrid; port 3 carries a matched termination in the experiment.
struct SwitchSpec {
  elements::HybridSpec hybrid;
  ResonatorSpec resonator_a;
  ResonatorSpec resonator_b;
  elements::TransmissionLineSpec interconnect;  // zero length by default
  bool terminate_port4 = true;
};

enum class SwitchState { resonant, off_resonant };

// Flux pair with the power branching ratio |S12/S13|^2 at the hybrid center
// frequency; the resonant point minimizes it, the off-resonant one maximizes.
struct OperatingPoint {
  double phi_a = 0.0;
  double phi_b = 0.0;
  SwitchState state = SwitchState::resonant;
  double merit = 0.0;
};

struct LorentzianFit {
  double f0_hz = 0.0;
  double fwhm_hz = 0.0;
  double amplitude = 0.0;
  double residual_norm = 0.0;
};

// Positive dB values: how strongly each output is suppressed between states.
// ideal_limited_* marks values clipped by the 1e-12 amplitude floor.
struct OnOffRatios {
  double s12_db = 0.0;
  double s13_db = 0.0;
  bool ideal_limited_12 = false;
  bool ideal_limited_13 = false;
};

// Four-port response at probe frequency f for the given arm fluxes.
SMatrix switch_smatrix(const SwitchSpec& spec, double phi_a, double phi_b,
                       double f_hz);
SMatrix switch_smatrix_at_ej(const SwitchSpec& spec, double ej_a_hz,
                             double ej_b_hz, double f_hz);

// Location of the arm resonator's transmission maximum, to 10 kHz.
// Throws BracketError when no interior maximum lies inside the window.
double resonance_frequency(const ResonatorSpec& spec, double phi,
                           double f_lo_hz = 4.4e9, double f_hi_hz = 8.7e9);
double resonance_frequency_at_ej(const ResonatorSpec& spec, double ej_hz,
                                 double f_lo_hz = 4.4e9, double f_hi_hz = 8.7e9);

// Coarse 21x21 scan over one flux period refined by simplex descent to
// 1e-4 flux quanta. Deterministic for a given spec.
std::pair<OperatingPoint, OperatingPoint> find_operating_points(
    const SwitchSpec& spec);

OnOffRatios on_off_ratios(const SwitchSpec& spec, const OperatingPoint& on,
                          const OperatingPoint& off, double f_hz);

// Least-squares fit of a / (1 + 4 (f - f0)^2 / w^2) to (f, power) samples.
LorentzianFit bandwidth_fit(std::span<const std::array<double, 2>> points);

// (f, |S11|^2 in dB) at the given operating point.
std::vector<std::array<double, 2>> reflection_spectrum(
    const SwitchSpec& spec, const OperatingPoint& point, double f_lo_hz,
    double f_hi_hz, int n_points);

}  // namespace qsw::switchnet
