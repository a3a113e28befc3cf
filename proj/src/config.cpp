#include "qsw/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qsw/constants.hpp"
#include "qsw/elements.hpp"
#include "qsw/errors.hpp"

namespace qsw::config {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& section) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const auto& a : allowed) {
      if (a == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw SchemaError("unknown key '" + key + "' in section '" + section +
                        "'");
    }
  }
}

double get_num(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    throw SchemaError("key '" + key + "' must be a number");
  }
  return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) {
    throw SchemaError("key '" + key + "' must be an integer");
  }
  return obj[key].get<int>();
}

std::string get_str(const json& obj, const std::string& key,
                    const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) {
    throw SchemaError("key '" + key + "' must be a string");
  }
  return obj[key].get<std::string>();
}

}  // namespace

RunConfig default_config() {
  RunConfig c;
  c.quantum.theta_rad.resize(8);
  for (int k = 0; k < 8; ++k) {
    c.quantum.theta_rad[static_cast<size_t>(k)] = 2.0 * kPi * k / 8.0;
  }
  return c;
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw SchemaError("config root must be a JSON object");
  }
  check_keys(root,
             {"device", "sweep", "fluxmap", "nonlin", "dynamics", "quantum",
              "output_dir", "format", "seed"},
             "root");

  RunConfig c = default_config();

  if (root.contains("device")) {
    const json& d = root["device"];
    check_keys(d,
               {"hybrid_f_center_hz", "hybrid_kind", "z0_ohm", "v_m_per_s",
                "n_loops", "ej1_over_h_hz", "ej2_over_h_hz", "cal_peak_f_hz",
                "cal_fwhm_hz"},
               "device");
    c.device.hybrid_f_center_hz =
        get_num(d, "hybrid_f_center_hz", c.device.hybrid_f_center_hz);
    c.device.hybrid_kind = get_str(d, "hybrid_kind", c.device.hybrid_kind);
    c.device.z0_ohm = get_num(d, "z0_ohm", c.device.z0_ohm);
    c.device.v_m_per_s = get_num(d, "v_m_per_s", c.device.v_m_per_s);
    c.device.n_loops = get_int(d, "n_loops", c.device.n_loops);
    c.device.ej1_over_h_hz =
        get_num(d, "ej1_over_h_hz", c.device.ej1_over_h_hz);
    c.device.ej2_over_h_hz =
        get_num(d, "ej2_over_h_hz", c.device.ej2_over_h_hz);
    c.device.cal_peak_f_hz = get_num(d, "cal_peak_f_hz", c.device.cal_peak_f_hz);
    c.device.cal_fwhm_hz = get_num(d, "cal_fwhm_hz", c.device.cal_fwhm_hz);
  }
  if (root.contains("sweep")) {
    const json& s = root["sweep"];
    check_keys(s, {"f_lo_hz", "f_hi_hz", "n_points"}, "sweep");
    c.sweep.f_lo_hz = get_num(s, "f_lo_hz", c.sweep.f_lo_hz);
    c.sweep.f_hi_hz = get_num(s, "f_hi_hz", c.sweep.f_hi_hz);
    c.sweep.n_points = get_int(s, "n_points", c.sweep.n_points);
  }
  if (root.contains("fluxmap")) {
    const json& f = root["fluxmap"];
    check_keys(f,
               {"v1_lo_volt", "v1_hi_volt", "n_v1", "v2_volt", "f_lo_hz",
                "f_hi_hz", "n_f", "m00_phi0_per_volt", "m10_phi0_per_volt",
                "m01_phi0_per_volt", "m11_phi0_per_volt", "offset_a_phi0",
                "offset_b_phi0", "inhomogeneity_g", "noise_rel"},
               "fluxmap");
    c.fluxmap.v1_lo_volt = get_num(f, "v1_lo_volt", c.fluxmap.v1_lo_volt);
    c.fluxmap.v1_hi_volt = get_num(f, "v1_hi_volt", c.fluxmap.v1_hi_volt);
    c.fluxmap.n_v1 = get_int(f, "n_v1", c.fluxmap.n_v1);
    c.fluxmap.v2_volt = get_num(f, "v2_volt", c.fluxmap.v2_volt);
    c.fluxmap.f_lo_hz = get_num(f, "f_lo_hz", c.fluxmap.f_lo_hz);
    c.fluxmap.f_hi_hz = get_num(f, "f_hi_hz", c.fluxmap.f_hi_hz);
    c.fluxmap.n_f = get_int(f, "n_f", c.fluxmap.n_f);
    c.fluxmap.m00_phi0_per_volt =
        get_num(f, "m00_phi0_per_volt", c.fluxmap.m00_phi0_per_volt);
    c.fluxmap.m10_phi0_per_volt =
        get_num(f, "m10_phi0_per_volt", c.fluxmap.m10_phi0_per_volt);
    c.fluxmap.m01_phi0_per_volt =
        get_num(f, "m01_phi0_per_volt", c.fluxmap.m01_phi0_per_volt);
    c.fluxmap.m11_phi0_per_volt =
        get_num(f, "m11_phi0_per_volt", c.fluxmap.m11_phi0_per_volt);
    c.fluxmap.offset_a_phi0 = get_num(f, "offset_a_phi0", c.fluxmap.offset_a_phi0);
    c.fluxmap.offset_b_phi0 = get_num(f, "offset_b_phi0", c.fluxmap.offset_b_phi0);
    c.fluxmap.inhomogeneity_g =
        get_num(f, "inhomogeneity_g", c.fluxmap.inhomogeneity_g);
    c.fluxmap.noise_rel = get_num(f, "noise_rel", c.fluxmap.noise_rel);
  }
  if (root.contains("nonlin")) {
    const json& n = root["nonlin"];
    check_keys(n,
               {"f_hz", "kerr_over_2pi_hz", "kappa_over_2pi_hz", "p_lo_dbm",
                "p_hi_dbm", "n_points", "input_branches"},
               "nonlin");
    c.nonlin.f_hz = get_num(n, "f_hz", c.nonlin.f_hz);
    c.nonlin.kerr_over_2pi_hz =
        get_num(n, "kerr_over_2pi_hz", c.nonlin.kerr_over_2pi_hz);
    c.nonlin.kappa_over_2pi_hz =
        get_num(n, "kappa_over_2pi_hz", c.nonlin.kappa_over_2pi_hz);
    c.nonlin.p_lo_dbm = get_num(n, "p_lo_dbm", c.nonlin.p_lo_dbm);
    c.nonlin.p_hi_dbm = get_num(n, "p_hi_dbm", c.nonlin.p_hi_dbm);
    c.nonlin.n_points = get_int(n, "n_points", c.nonlin.n_points);
    c.nonlin.input_branches = get_int(n, "input_branches", c.nonlin.input_branches);
  }
  if (root.contains("dynamics")) {
    const json& d = root["dynamics"];
    check_keys(d,
               {"pulse_bandwidth_hz", "t_on_s", "t_off_s",
                "detection_bandwidth_hz"},
               "dynamics");
    c.dynamics.pulse_bandwidth_hz =
        get_num(d, "pulse_bandwidth_hz", c.dynamics.pulse_bandwidth_hz);
    c.dynamics.t_on_s = get_num(d, "t_on_s", c.dynamics.t_on_s);
    c.dynamics.t_off_s = get_num(d, "t_off_s", c.dynamics.t_off_s);
    c.dynamics.detection_bandwidth_hz = get_num(
        d, "detection_bandwidth_hz", c.dynamics.detection_bandwidth_hz);
  }
  if (root.contains("quantum")) {
    const json& q = root["quantum"];
    check_keys(q,
               {"theta_rad", "records", "n_h", "eta", "dephasing_d", "tau_s",
                "cutoff", "wigner_extent", "wigner_n"},
               "quantum");
    if (q.contains("theta_rad")) {
      if (!q["theta_rad"].is_array()) {
        throw SchemaError("key 'theta_rad' must be an array of numbers");
      }
      c.quantum.theta_rad.clear();
      for (const auto& v : q["theta_rad"]) {
        if (!v.is_number()) {
          throw SchemaError("key 'theta_rad' must be an array of numbers");
        }
        c.quantum.theta_rad.push_back(v.get<double>());
      }
    }
    if (q.contains("records")) {
      if (!q["records"].is_number_integer() || q["records"].get<long long>() < 1) {
        throw SchemaError("key 'records' must be a positive integer");
      }
      c.quantum.records = q["records"].get<std::size_t>();
    }
    c.quantum.n_h = get_num(q, "n_h", c.quantum.n_h);
    c.quantum.eta = get_num(q, "eta", c.quantum.eta);
    c.quantum.dephasing_d = get_num(q, "dephasing_d", c.quantum.dephasing_d);
    c.quantum.tau_s = get_num(q, "tau_s", c.quantum.tau_s);
    c.quantum.cutoff = get_int(q, "cutoff", c.quantum.cutoff);
    c.quantum.wigner_extent = get_num(q, "wigner_extent", c.quantum.wigner_extent);
    c.quantum.wigner_n = get_int(q, "wigner_n", c.quantum.wigner_n);
  }
  c.output_dir = get_str(root, "output_dir", c.output_dir);
  c.format = get_str(root, "format", c.format);
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer() || root["seed"].get<long long>() < 0) {
      throw SchemaError("key 'seed' must be a non-negative integer");
    }
    c.seed = root["seed"].get<std::uint64_t>();
  }

  if (c.format != "csv" && c.format != "json") {
    throw ValidationError("format must be 'csv' or 'json'");
  }
  if (c.device.hybrid_kind != "ideal" && c.device.hybrid_kind != "branchline") {
    throw ValidationError("hybrid_kind must be 'ideal' or 'branchline'");
  }
  if (!(c.device.z0_ohm > 0.0) || !(c.device.v_m_per_s > 0.0) ||
      c.device.n_loops < 1 || !(c.device.ej1_over_h_hz > 0.0) ||
      !(c.device.ej2_over_h_hz > 0.0) || !(c.device.cal_peak_f_hz > 0.0) ||
      !(c.device.cal_fwhm_hz > 0.0)) {
    throw ValidationError("device section has non-physical values");
  }
  if (c.quantum.cutoff < 3) {
    throw ValidationError("quantum cutoff must be at least 3");
  }
  for (double theta : c.quantum.theta_rad) {
    if (!(theta >= 0.0) || !(theta < 2.0 * kPi)) {
      throw ValidationError("theta values must lie in [0, 2 pi)");
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_json(const RunConfig& c) {
  ordered_json j;
  j["device"] = {{"hybrid_f_center_hz", c.device.hybrid_f_center_hz},
                 {"hybrid_kind", c.device.hybrid_kind},
                 {"z0_ohm", c.device.z0_ohm},
                 {"v_m_per_s", c.device.v_m_per_s},
                 {"n_loops", c.device.n_loops},
                 {"ej1_over_h_hz", c.device.ej1_over_h_hz},
                 {"ej2_over_h_hz", c.device.ej2_over_h_hz},
                 {"cal_peak_f_hz", c.device.cal_peak_f_hz},
                 {"cal_fwhm_hz", c.device.cal_fwhm_hz}};
  j["sweep"] = {{"f_lo_hz", c.sweep.f_lo_hz},
                {"f_hi_hz", c.sweep.f_hi_hz},
                {"n_points", c.sweep.n_points}};
  j["fluxmap"] = {{"v1_lo_volt", c.fluxmap.v1_lo_volt},
                  {"v1_hi_volt", c.fluxmap.v1_hi_volt},
                  {"n_v1", c.fluxmap.n_v1},
                  {"v2_volt", c.fluxmap.v2_volt},
                  {"f_lo_hz", c.fluxmap.f_lo_hz},
                  {"f_hi_hz", c.fluxmap.f_hi_hz},
                  {"n_f", c.fluxmap.n_f},
                  {"m00_phi0_per_volt", c.fluxmap.m00_phi0_per_volt},
                  {"m10_phi0_per_volt", c.fluxmap.m10_phi0_per_volt},
                  {"m01_phi0_per_volt", c.fluxmap.m01_phi0_per_volt},
                  {"m11_phi0_per_volt", c.fluxmap.m11_phi0_per_volt},
                  {"offset_a_phi0", c.fluxmap.offset_a_phi0},
                  {"offset_b_phi0", c.fluxmap.offset_b_phi0},
                  {"inhomogeneity_g", c.fluxmap.inhomogeneity_g},
                  {"noise_rel", c.fluxmap.noise_rel}};
  j["nonlin"] = {{"f_hz", c.nonlin.f_hz},
                 {"kerr_over_2pi_hz", c.nonlin.kerr_over_2pi_hz},
                 {"kappa_over_2pi_hz", c.nonlin.kappa_over_2pi_hz},
                 {"p_lo_dbm", c.nonlin.p_lo_dbm},
                 {"p_hi_dbm", c.nonlin.p_hi_dbm},
                 {"n_points", c.nonlin.n_points},
                 {"input_branches", c.nonlin.input_branches}};
  j["dynamics"] = {{"pulse_bandwidth_hz", c.dynamics.pulse_bandwidth_hz},
                   {"t_on_s", c.dynamics.t_on_s},
                   {"t_off_s", c.dynamics.t_off_s},
                   {"detection_bandwidth_hz",
                    c.dynamics.detection_bandwidth_hz}};
  j["quantum"] = {{"theta_rad", c.quantum.theta_rad},
                  {"records", c.quantum.records},
                  {"n_h", c.quantum.n_h},
                  {"eta", c.quantum.eta},
                  {"dephasing_d", c.quantum.dephasing_d},
                  {"tau_s", c.quantum.tau_s},
                  {"cutoff", c.quantum.cutoff},
                  {"wigner_extent", c.quantum.wigner_extent},
                  {"wigner_n", c.quantum.wigner_n}};
  j["output_dir"] = c.output_dir;
  j["format"] = c.format;
  j["seed"] = c.seed;
  return j.dump(2);
}

std::string config_hash_hex(const RunConfig& config) {
  const std::string text = to_json(config);
  std::uint64_t hash = 14695981039346656037ull;  // FNV-1a 64
  for (unsigned char byte : text) {
    hash ^= byte;
    hash *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string hex(16, '0');
  for (int i = 15; i >= 0; --i) {
    hex[static_cast<size_t>(i)] = digits[hash & 0xf];
    hash >>= 4;
  }
  return hex;
}

switchnet::SwitchSpec build_switch_spec(const DeviceConfig& device) {
  elements::SquidArraySpec squid;
  squid.n_loops = device.n_loops;
  squid.ej1_hz = device.ej1_over_h_hz;
  squid.ej2_hz = device.ej2_over_h_hz;

  elements::ResonatorSpec resonator = elements::calibrate_resonator(
      squid, device.cal_peak_f_hz, device.cal_fwhm_hz, device.z0_ohm,
      device.v_m_per_s);

  switchnet::SwitchSpec spec;
  spec.hybrid.f_center_hz = device.hybrid_f_center_hz;
  spec.hybrid.z0_ohm = device.z0_ohm;
  spec.hybrid.kind = device.hybrid_kind == "ideal"
                         ? elements::HybridKind::ideal
                         : elements::HybridKind::branchline;
  spec.resonator_a = resonator;
  spec.resonator_b = resonator;
  return spec;
}

}  // namespace qsw::config
