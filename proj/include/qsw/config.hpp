#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsw/switchnet.hpp"

namespace qsw::config {

// All physical quantities carry their unit in the key name. Unknown keys
// are rejected at parse time; missing keys fall back to the defaults below,
// which describe the reference device.
struct DeviceConfig {
  double hybrid_f_center_hz = 7.2e9;
  std::string hybrid_kind = "branchline";  // "ideal" or "branchline"
  double z0_ohm = 50.0;
  double v_m_per_s = 1.3e8;
  int n_loops = 5;
  double ej1_over_h_hz = 1.06e12;
  double ej2_over_h_hz = 1.54e12;
  double cal_peak_f_hz = 8.30e9;  // bonded test device calibration targets
  double cal_fwhm_hz = 3.05e8;
};

struct SweepConfig {
  double f_lo_hz = 7.05e9;
  double f_hi_hz = 7.35e9;
  int n_points = 151;
};

struct FluxmapConfig {
  double v1_lo_volt = -1.0;
  double v1_hi_volt = 1.0;
  int n_v1 = 81;
  double v2_volt = 0.15;
  double f_lo_hz = 5.2e9;
  double f_hi_hz = 7.8e9;
  int n_f = 261;
  double m00_phi0_per_volt = 0.9;
  double m10_phi0_per_volt = 0.25;
  double m01_phi0_per_volt = 0.2;
  double m11_phi0_per_volt = 0.8;
  double offset_a_phi0 = 0.03;
  double offset_b_phi0 = -0.05;
  double inhomogeneity_g = 0.02;
  double noise_rel = 0.0;
};

struct NonlinConfig {
  double f_hz = 7.2e9;
  double kerr_over_2pi_hz = -2.8e4;
  double kappa_over_2pi_hz = 1.49e8;
  double p_lo_dbm = -110.0;
  double p_hi_dbm = -70.0;
  int n_points = 81;
  int input_branches = 2;
};

struct DynamicsConfig {
  double pulse_bandwidth_hz = 5e8;
  double t_on_s = 3e-8;
  double t_off_s = 9e-8;
  double detection_bandwidth_hz = 7.5e7;
};

struct QuantumConfig {
  std::vector<double> theta_rad;  // defaults to an 8-point sweep incl. pi
  std::size_t records = 100000;
  double n_h = 2.0;
  double eta = 0.98;
  double dephasing_d = 0.86;
  double tau_s = 9e-8;
  int cutoff = 5;
  double wigner_extent = 2.5;
  int wigner_n = 21;
};

struct RunConfig {
  DeviceConfig device;
  SweepConfig sweep;
  FluxmapConfig fluxmap;
  NonlinConfig nonlin;
  DynamicsConfig dynamics;
  QuantumConfig quantum;
  std::string output_dir = "out";
  std::string format = "csv";  // "csv" or "json" summaries
  std::uint64_t seed = 1;
};

RunConfig default_config();

// Parse from JSON text / file. Throws SchemaError naming any unknown key
// and ValidationError for out-of-range values.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Canonical serialization (every key emitted, fixed order) and its FNV-1a
// hash, stamped into every output file for provenance.
std::string to_json(const RunConfig& config);
std::string config_hash_hex(const RunConfig& config);

// Device section realized as a calibrated switch description.
switchnet::SwitchSpec build_switch_spec(const DeviceConfig& device);

}  // namespace qsw::config
