#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qsw/switchnet.hpp"

namespace qsw::dynamics {

// Square flux pulse through a Gaussian low-pass of bandwidth B (|H(B)|^2 =
// 1/2). Closed form: base + amp/2 [erf((t-t_on)/sqrt2 s) - erf((t-t_off)/
// sqrt2 s)], s = 0.13251/B. DC gain is exactly one and each edge has a
// 10-90 time of 0.3396/B.
struct FluxPulse {
  double base_phi0 = 0.0;
  double amplitude_phi0 = 0.0;
  double t_on_s = 0.0;
  double t_off_s = 0.0;
  double bandwidth_hz = 5e8;
};

double pulse_flux(const FluxPulse& pulse, double t_s);

struct ProbeSpec {
  double f_hz = 7.2e9;
  int input_port = 1;  // 1..4
};

// Baseband envelopes at all four ports, normalized to the probe amplitude.
struct WaveformRecord {
  double t0_s = 0.0;
  double dt_s = 0.0;
  std::vector<std::complex<double>> p1, p2, p3, p4;
  int input_port = 1;
  double probe_f_hz = 0.0;

  size_t size() const { return p1.size(); }
  double time_at(size_t i) const { return t0_s + dt_s * static_cast<double>(i); }
  const std::vector<std::complex<double>>& port(int p) const;
};

// Steady-state bound |amp| <= 1 + 1e-6. Holds for CW drive and resonant
// capture edges; a detuning edge that releases stored energy interferes
// with the direct path and can exceed it transiently, so this is a check
// for the caller, not an internal assertion.
void validate_waveform(const WaveformRecord& record);

// Columns t_s,re_p2,im_p2,re_p3,im_p3.
void write_waveform_csv(const WaveformRecord& record, const std::string& path,
                        const std::vector<std::string>& comments = {});

WaveformRecord slice(const WaveformRecord& record, double t_lo_s,
                     double t_hi_s);

// Gaussian low-pass applied to each port envelope; models the finite
// detection chain bandwidth. Same bandwidth convention as FluxPulse.
WaveformRecord filter_record(const WaveformRecord& record,
                             double bandwidth_hz);

// Single-mode reduction of each arm: linewidth from a Lorentzian fit of
// |S13|^2 at the resonant point, resonance-vs-flux interpolation tables.
struct SwitchDynamicsModel {
  double kappa_rad = 0.0;
  double f_fit_center_hz = 0.0;
  switchnet::OperatingPoint on, off;
  std::vector<double> phi_grid;  // [0, 0.5]
  std::vector<double> omega_a_rad, omega_b_rad;

  double omega_r_a(double phi) const;
  double omega_r_b(double phi) const;
};

SwitchDynamicsModel build_dynamics_model(const switchnet::SwitchSpec& spec,
                                         const switchnet::OperatingPoint& on,
                                         const switchnet::OperatingPoint& off);

// Largest dt simulate_switching accepts for this configuration: the
// sampling bound 1/(20 max(k/2pi, B)) or the explicit-step stability limit
// at the largest detuning on the pulse trajectory, whichever is smaller.
double stable_time_step(const SwitchDynamicsModel& model,
                        const FluxPulse& pulse_a, const FluxPulse& pulse_b,
                        double probe_f_hz);

// Fixed-step 4th-order integration of the two driven arm modes,
// da_j/dt = (i d_j(t) - k/2) a_j + sqrt(k/2) (u_j + w_j),
// with outputs composed through the ideal hybrid rows. Throws a step-size
// instability error when dt exceeds stable_time_step.
WaveformRecord simulate_switching(const SwitchDynamicsModel& model,
                                  const FluxPulse& pulse_a,
                                  const FluxPulse& pulse_b,
                                  const ProbeSpec& probe, double dt_s,
                                  double t_start_s, double t_end_s);

struct StepFit {
  double t0_s = 0.0;
  double w_s = 0.0;
  double level_start = 0.0;
  double level_end = 0.0;
  double t_10_90_s = 0.0;  // ln(9) w
  bool rising = false;
};

// Least-squares tanh step on the power waveform of one port. The record
// must contain exactly one 25/75-hysteresis transition and not be flat.
StepFit tanh_step_fit(const WaveformRecord& record, int port);

// Probe at device ports 2 and 3, output monitored at port 1, both pulse
// edges fitted after detection filtering.
struct RiseFallReport {
  StepFit probe2_on, probe2_off, probe3_on, probe3_off;
};

RiseFallReport rise_fall_report(const SwitchDynamicsModel& model,
                                const FluxPulse& pulse_a,
                                const FluxPulse& pulse_b,
                                double detection_bandwidth_hz = 7.5e7);

}  // namespace qsw::dynamics
