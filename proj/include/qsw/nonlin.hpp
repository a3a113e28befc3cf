#pragma once

#include <vector>

#include "qsw/elements.hpp"

namespace qsw::nonlin {

// Lumped equivalent of one tunable arm at its series mode, plus the
// per-photon frequency shift it implies.
struct KerrEstimate {
  double kerr_over_2pi_hz = 0.0;  // negative: softening nonlinearity
  double participation = 0.0;     // L_array / L_total
  double phi_zp_rad = 0.0;        // zero-point phase across one loop
  double l_total_h = 0.0;         // series-mode inductance, geometric + array
  double c_eff_f = 0.0;           // pi / (2 w_bare z0), end-equivalent value
  double f_mode_hz = 0.0;         // series-mode frequency at this flux
};

// Fourth-order expansion of the array energy with the loop current taken
// from the series lumped mode: the line contributes 1/2 dX/dw - L_array of
// geometric inductance at the array plane.
KerrEstimate kerr_from_network(const elements::ResonatorSpec& spec,
                               double phi);

// Classical single-mode Duffing drive parameters, all rates in rad/s.
struct DuffingParams {
  double omega_r_rad = 0.0;
  double kappa_rad = 0.0;
  double kappa_in_rad = 0.0;  // defaults to kappa/2 when <= 0
  double kerr_rad = 0.0;      // signed Kerr coefficient K
  double omega_drive_rad = 0.0;
  double alpha_in_sq = 0.0;  // input photon flux, photons/s
};

struct DuffingResponse {
  double n_photons = 0.0;        // intracavity photon number, low branch
  double transmitted_flux = 0.0; // (kappa/2) n, photons/s
  double transmission = 0.0;     // transmitted / input flux
};

// All real positive roots of n [(delta - K n)^2 + (kappa/2)^2] = k_in A,
// ascending. One or three roots (two when tangent).
std::vector<double> duffing_photon_roots(const DuffingParams& params);

// Smallest-root branch: the state reached by an adiabatic power ramp.
DuffingResponse duffing_response(const DuffingParams& params);

// Device-level input power (dBm) at which on-resonance transmission has
// dropped 1 dB. The input hybrid halves the power into each arm, so the
// device value sits `input_branches` times above the one-arm flux.
double compression_point_dbm(const DuffingParams& params, double f_hz,
                             int input_branches = 2);

// P = h f flux. Flux in photons/s.
double photon_flux_from_power(double p_watt, double f_hz);
double power_from_photon_flux(double flux_per_s, double f_hz);
double dbm_to_watt(double dbm);
double watt_to_dbm(double p_watt);

}  // namespace qsw::nonlin
