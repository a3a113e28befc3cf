#include "qsw/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsw/constants.hpp"
#include "qsw/csvio.hpp"
#include "qsw/dynamics.hpp"
#include "qsw/errors.hpp"
#include "qsw/fluxcal.hpp"
#include "qsw/nonlin.hpp"
#include "qsw/quantum.hpp"
#include "qsw/rng.hpp"
#include "qsw/switchnet.hpp"

namespace qsw::commands {

namespace {

using nlohmann::ordered_json;

std::vector<std::string> provenance(const config::RunConfig& config) {
  return {"config_hash=" + config::config_hash_hex(config),
          "seed=" + std::to_string(config.seed)};
}

std::filesystem::path out_path(const config::RunConfig& config,
                               const std::string& name) {
  std::filesystem::create_directories(config.output_dir);
  return std::filesystem::path(config.output_dir) / name;
}

// Data tables honor the configured format; summaries are always JSON.
void write_table(const config::RunConfig& config, const std::string& stem,
                 const csvio::Table& table) {
  if (config.format == "csv") {
    csvio::write_csv(out_path(config, stem + ".csv").string(), table);
    return;
  }
  ordered_json j;
  ordered_json prov;
  prov["config_hash"] = config::config_hash_hex(config);
  prov["seed"] = config.seed;
  j["_provenance"] = prov;
  j["header"] = table.header;
  ordered_json rows = ordered_json::array();
  for (const auto& row : table.rows) rows.push_back(row);
  j["rows"] = rows;
  std::ofstream out(out_path(config, stem + ".json"));
  out << j.dump(2) << "\n";
}

void write_summary(const config::RunConfig& config, const std::string& stem,
                   ordered_json body) {
  ordered_json j;
  ordered_json prov;
  prov["config_hash"] = config::config_hash_hex(config);
  prov["seed"] = config.seed;
  j["_provenance"] = prov;
  for (auto& [key, value] : body.items()) j[key] = value;
  std::ofstream out(out_path(config, stem + ".json"));
  out << j.dump(2) << "\n";
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1 || !(hi >= lo)) {
    throw ValidationError("grid must be non-empty with hi >= lo");
  }
  std::vector<double> x(static_cast<size_t>(n));
  if (n == 1) {
    x[0] = lo;
    return x;
  }
  for (int i = 0; i < n; ++i) {
    x[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  }
  return x;
}

fluxcal::FluxMap map_from_config(const config::FluxmapConfig& f) {
  fluxcal::FluxMap map;
  map.m << f.m00_phi0_per_volt, f.m01_phi0_per_volt, f.m10_phi0_per_volt,
      f.m11_phi0_per_volt;
  map.offset_phi0 << f.offset_a_phi0, f.offset_b_phi0;
  map.inhomogeneity_g = f.inhomogeneity_g;
  return map;
}

fluxcal::SpectroscopyDataset simulate_dataset(const config::RunConfig& config,
                                              const switchnet::SwitchSpec& spec) {
  const auto& fc = config.fluxmap;
  if (fc.n_v1 < 2 || fc.n_f < 3) {
    throw ValidationError("fluxmap grids need n_v1 >= 2 and n_f >= 3");
  }
  auto data = fluxcal::simulate_flux_map(
      spec, map_from_config(fc), linspace(fc.v1_lo_volt, fc.v1_hi_volt, fc.n_v1),
      fc.v2_volt, linspace(fc.f_lo_hz, fc.f_hi_hz, fc.n_f));
  if (fc.noise_rel > 0.0) {
    Rng rng(config.seed, 17);
    for (auto& row : data.s12_sq) {
      for (double& s : row) {
        s = std::clamp(s * (1.0 + fc.noise_rel * rng.normal()), 0.0, 1.1);
      }
    }
  }
  return data;
}

}  // namespace

void cmd_sweep(const config::RunConfig& config) {
  const auto& sw = config.sweep;
  if (sw.n_points < 1 || !(sw.f_hi_hz >= sw.f_lo_hz) || !(sw.f_lo_hz > 0.0)) {
    throw ValidationError("sweep frequency list is empty or inverted");
  }
  const auto spec = config::build_switch_spec(config.device);
  const auto [on, off] = switchnet::find_operating_points(spec);

  const std::vector<double> f = linspace(sw.f_lo_hz, sw.f_hi_hz, sw.n_points);
  csvio::Table table;
  table.comments = provenance(config);
  table.header = {"f_hz", "s12_on_sq", "s13_on_sq", "s12_off_sq",
                  "s13_off_sq"};
  std::vector<std::array<double, 2>> s13_on(f.size());
  for (size_t i = 0; i < f.size(); ++i) {
    const auto s_on = switchnet::switch_smatrix(spec, on.phi_a, on.phi_b, f[i]);
    const auto s_off =
        switchnet::switch_smatrix(spec, off.phi_a, off.phi_b, f[i]);
    const double p12_on = std::norm(s_on.s(1, 0));
    const double p13_on = std::norm(s_on.s(2, 0));
    table.rows.push_back({f[i], p12_on, p13_on, std::norm(s_off.s(1, 0)),
                          std::norm(s_off.s(2, 0))});
    s13_on[i] = {f[i], p13_on};
  }
  write_table(config, "sweep", table);

  const auto fit = switchnet::bandwidth_fit(s13_on);
  const auto ratios = switchnet::on_off_ratios(spec, on, off,
                                               spec.hybrid.f_center_hz);
  ordered_json summary;
  summary["f0_hz"] = fit.f0_hz;
  summary["fwhm_hz"] = fit.fwhm_hz;
  summary["peak_transmittance"] = fit.amplitude;
  summary["fit_residual_norm"] = fit.residual_norm;
  summary["on_phi_a"] = on.phi_a;
  summary["on_phi_b"] = on.phi_b;
  summary["off_phi_a"] = off.phi_a;
  summary["off_phi_b"] = off.phi_b;
  summary["s12_on_off_db"] = ratios.s12_db;
  summary["s13_on_off_db"] = ratios.s13_db;
  write_summary(config, "sweep_summary", summary);
}

void cmd_fluxmap(const config::RunConfig& config) {
  const auto spec = config::build_switch_spec(config.device);
  const auto data = simulate_dataset(config, spec);
  fluxcal::write_dataset_csv(data, out_path(config, "fluxmap.csv").string(),
                             provenance(config));

  ordered_json summary;
  summary["n_v1"] = data.v1_volt.size();
  summary["n_f"] = data.f_hz.size();
  summary["v2_volt"] = data.v2_volt;
  summary["noise_rel"] = config.fluxmap.noise_rel;
  write_summary(config, "fluxmap_summary", summary);
}

void cmd_fit(const config::RunConfig& config, const std::string& dataset_path) {
  const auto spec = config::build_switch_spec(config.device);
  const fluxcal::SpectroscopyDataset data =
      dataset_path.empty() ? simulate_dataset(config, spec)
                           : fluxcal::read_dataset_csv(dataset_path);

  fluxcal::FluxFitInit init;
  init.map = map_from_config(config.fluxmap);
  init.squid.n_loops = config.device.n_loops;
  init.squid.ej1_hz = config.device.ej1_over_h_hz;
  init.squid.ej2_hz = config.device.ej2_over_h_hz;

  const auto result = fluxcal::fit_flux_model(spec, data, init);

  const auto dips = fluxcal::extract_dips(data);
  csvio::Table table;
  table.comments = provenance(config);
  table.header = {"v_index", "v1_volt", "dip_f_hz", "depth"};
  for (const auto& dip : dips) {
    table.rows.push_back({static_cast<double>(dip.v_index),
                          data.v1_volt[static_cast<size_t>(dip.v_index)],
                          dip.f_hz, dip.depth});
  }
  write_table(config, "fit_dips", table);

  ordered_json summary;
  summary["m00_phi0_per_volt"] = result.map.m(0, 0);
  summary["m10_phi0_per_volt"] = result.map.m(1, 0);
  summary["m01_phi0_per_volt"] = result.map.m(0, 1);
  summary["m11_phi0_per_volt"] = result.map.m(1, 1);
  summary["offset_a_phi0"] = result.map.offset_phi0(0);
  summary["offset_b_phi0"] = result.map.offset_phi0(1);
  summary["inhomogeneity_g"] = result.map.inhomogeneity_g;
  summary["ej1_over_h_hz"] = result.squid.ej1_hz;
  summary["ej2_over_h_hz"] = result.squid.ej2_hz;
  summary["residual_norm_hz"] = result.residual_norm_hz;
  summary["iterations"] = result.iterations;
  summary["converged"] = result.converged;
  summary["rank_warning"] = result.rank_warning;
  summary["n_dips"] = dips.size();
  write_summary(config, "fit_summary", summary);
}

void cmd_compression(const config::RunConfig& config) {
  const auto& nc = config.nonlin;
  if (nc.n_points < 2 || !(nc.p_hi_dbm > nc.p_lo_dbm)) {
    throw ValidationError("compression sweep needs at least two powers");
  }
  if (!(nc.f_hz > 0.0) || nc.input_branches < 1) {
    throw ValidationError("compression needs f_hz > 0 and input_branches >= 1");
  }
  nonlin::DuffingParams params;
  params.omega_r_rad = 2.0 * kPi * nc.f_hz;
  params.omega_drive_rad = params.omega_r_rad;
  params.kappa_rad = 2.0 * kPi * nc.kappa_over_2pi_hz;
  params.kerr_rad = 2.0 * kPi * nc.kerr_over_2pi_hz;

  csvio::Table table;
  table.comments = provenance(config);
  table.header = {"p_dbm", "n_photons", "transmission", "transmission_db"};
  for (int i = 0; i < nc.n_points; ++i) {
    const double p_dbm =
        nc.p_lo_dbm + (nc.p_hi_dbm - nc.p_lo_dbm) * i / (nc.n_points - 1);
    params.alpha_in_sq =
        nonlin::photon_flux_from_power(nonlin::dbm_to_watt(p_dbm), nc.f_hz) /
        nc.input_branches;
    const auto resp = nonlin::duffing_response(params);
    table.rows.push_back({p_dbm, resp.n_photons, resp.transmission,
                          10.0 * std::log10(std::max(resp.transmission,
                                                     1e-30))});
  }
  write_table(config, "compression", table);

  const double p_cp =
      nonlin::compression_point_dbm(params, nc.f_hz, nc.input_branches);
  ordered_json summary;
  summary["p_1db_dbm"] = p_cp;
  summary["kerr_over_2pi_hz"] = nc.kerr_over_2pi_hz;
  summary["kappa_over_2pi_hz"] = nc.kappa_over_2pi_hz;
  summary["photons_per_us_at_2p3_pw"] =
      nonlin::photon_flux_from_power(2.3e-12, nc.f_hz) * 1e-6;
  summary["photons_per_us_at_minus_90_dbm"] =
      nonlin::photon_flux_from_power(nonlin::dbm_to_watt(-90.0), nc.f_hz) *
      1e-6;
  write_summary(config, "compression_summary", summary);
}

void cmd_pulse(const config::RunConfig& config) {
  const auto& dc = config.dynamics;
  if (!(dc.t_off_s > dc.t_on_s) || !(dc.pulse_bandwidth_hz > 0.0)) {
    throw ValidationError("pulse needs t_off > t_on and positive bandwidth");
  }
  const auto spec = config::build_switch_spec(config.device);
  const auto [on, off] = switchnet::find_operating_points(spec);
  const auto model = dynamics::build_dynamics_model(spec, on, off);

  auto make_pulse = [&](double phi_off, double phi_on) {
    dynamics::FluxPulse pulse;
    pulse.base_phi0 = phi_off;
    pulse.amplitude_phi0 = std::remainder(phi_on - phi_off, 1.0);
    pulse.t_on_s = dc.t_on_s;
    pulse.t_off_s = dc.t_off_s;
    pulse.bandwidth_hz = dc.pulse_bandwidth_hz;
    return pulse;
  };
  const auto pulse_a = make_pulse(off.phi_a, on.phi_a);
  const auto pulse_b = make_pulse(off.phi_b, on.phi_b);

  const double t_start = dc.t_on_s - 25e-9;
  const double t_end = dc.t_off_s + 35e-9;
  const double t_mid = 0.5 * (dc.t_on_s + dc.t_off_s);
  dynamics::ProbeSpec probe{model.f_fit_center_hz, 1};
  const double dt =
      0.45 * dynamics::stable_time_step(model, pulse_a, pulse_b, probe.f_hz);
  const auto record = dynamics::simulate_switching(model, pulse_a, pulse_b,
                                                   probe, dt, t_start, t_end);
  dynamics::write_waveform_csv(record,
                               out_path(config, "waveform.csv").string(),
                               provenance(config));

  // Both pulse edges as seen on each output port of the emitted record,
  // fitted after detection filtering.
  const auto filtered =
      dynamics::filter_record(record, dc.detection_bandwidth_hz);
  auto fit_edge = [&](int port, double lo, double hi) {
    return dynamics::tanh_step_fit(dynamics::slice(filtered, lo, hi), port);
  };
  const auto p2_on = fit_edge(2, t_start, t_mid);
  const auto p2_off = fit_edge(2, t_mid, t_end);
  const auto p3_on = fit_edge(3, t_start, t_mid);
  const auto p3_off = fit_edge(3, t_mid, t_end);

  csvio::Table edges;
  edges.comments = provenance(config);
  edges.header = {"port",        "at_off_edge", "t0_ns",
                  "width_ns",    "t_10_90_ns",  "level_start",
                  "level_end",   "rising"};
  auto add_edge = [&](int port, int at_off, const dynamics::StepFit& fit) {
    edges.rows.push_back({static_cast<double>(port),
                          static_cast<double>(at_off), fit.t0_s * 1e9,
                          fit.w_s * 1e9, fit.t_10_90_s * 1e9, fit.level_start,
                          fit.level_end, fit.rising ? 1.0 : 0.0});
  };
  add_edge(2, 0, p2_on);
  add_edge(2, 1, p2_off);
  add_edge(3, 0, p3_on);
  add_edge(3, 1, p3_off);
  write_table(config, "pulse_edges", edges);

  ordered_json summary;
  summary["kappa_over_2pi_hz"] = model.kappa_rad / (2.0 * kPi);
  summary["f_probe_hz"] = probe.f_hz;
  summary["p2_fall_on_edge_ns"] = p2_on.t_10_90_s * 1e9;
  summary["p2_rise_off_edge_ns"] = p2_off.t_10_90_s * 1e9;
  summary["p3_rise_on_edge_ns"] = p3_on.t_10_90_s * 1e9;
  summary["p3_fall_off_edge_ns"] = p3_off.t_10_90_s * 1e9;
  summary["detection_bandwidth_hz"] = dc.detection_bandwidth_hz;
  write_summary(config, "pulse_summary", summary);
}

void cmd_photon(const config::RunConfig& config) {
  const auto& qc = config.quantum;
  if (qc.theta_rad.empty()) {
    throw ValidationError("photon command needs a non-empty theta sweep");
  }
  if (qc.wigner_n < 2 || !(qc.wigner_extent > 0.0)) {
    throw ValidationError("wigner grid needs n >= 2 and positive extent");
  }

  csvio::Table moments_table;
  moments_table.comments = provenance(config);
  moments_table.header = {"theta_rad",  "n_ideal", "n_extracted", "n_se",
                          "abs_a_ideal", "abs_a_extracted", "a_se",
                          "m22_re", "m22_se"};
  csvio::Table g2_table;
  g2_table.comments = provenance(config);
  g2_table.header = {"theta_rad", "g2", "g2_se"};

  std::vector<double> ideal_n(qc.theta_rad.size());
  std::vector<double> extracted_n(qc.theta_rad.size());
  // Reconstruct at theta = pi when the sweep contains it, otherwise at the
  // sweep point with the largest extracted photon number.
  quantum::MomentSet chosen_moments;
  double chosen_theta = 0.0;
  double chosen_rank = -1.0;

  for (size_t i = 0; i < qc.theta_rad.size(); ++i) {
    quantum::SourceParams source;
    source.theta_rad = qc.theta_rad[i];
    source.tau_s = qc.tau_s;
    source.eta = qc.eta;
    source.dephasing_d = qc.dephasing_d;

    // Disjoint deterministic streams per sweep point.
    const std::uint64_t seed_sig = config.seed * 1000003ull + 2 * i;
    const std::uint64_t seed_ref = config.seed * 1000003ull + 2 * i + 1;
    const auto signal = quantum::synthesize_records(
        quantum::SignalState::from_source(source), qc.n_h, qc.records,
        seed_sig);
    const auto reference = quantum::synthesize_records(
        quantum::SignalState::make_vacuum(), qc.n_h, qc.records, seed_ref);
    const auto moments = quantum::extract_moments(signal, reference);

    const auto ideal = quantum::source_moments(source);
    ideal_n[i] = ideal.at(1, 1).value.real();
    extracted_n[i] = moments.at(1, 1).value.real();
    moments_table.rows.push_back(
        {qc.theta_rad[i], ideal_n[i], extracted_n[i],
         moments.at(1, 1).std_error, std::abs(ideal.at(0, 1).value),
         std::abs(moments.at(0, 1).value), moments.at(0, 1).std_error,
         moments.at(2, 2).value.real(), moments.at(2, 2).std_error});

    const auto& n_mom = moments.at(1, 1);
    if (n_mom.value.real() > 3.0 * n_mom.std_error) {
      const auto g = quantum::g2(moments);
      g2_table.rows.push_back({qc.theta_rad[i], g.value, g.std_error});
    }
    const bool is_pi = std::fabs(qc.theta_rad[i] - kPi) < 1e-9;
    const double rank = is_pi ? std::numeric_limits<double>::infinity()
                              : extracted_n[i];
    if (rank > chosen_rank) {
      chosen_rank = rank;
      chosen_theta = qc.theta_rad[i];
      chosen_moments = moments;
    }
  }
  write_table(config, "photon_moments", moments_table);
  write_table(config, "photon_g2", g2_table);

  ordered_json summary;
  summary["gain"] = quantum::calibrate_gain(ideal_n, extracted_n);

  if (!chosen_moments.moments.empty()) {
    const auto rho = quantum::mle_reconstruct(chosen_moments, qc.cutoff);
    ordered_json rho_json =
        nlohmann::ordered_json::parse(quantum::density_to_json(rho));
    ordered_json prov;
    prov["config_hash"] = config::config_hash_hex(config);
    prov["seed"] = config.seed;
    ordered_json rho_out;
    rho_out["_provenance"] = prov;
    for (auto& [key, value] : rho_json.items()) rho_out[key] = value;
    std::ofstream rho_file(out_path(config, "photon_rho.json"));
    rho_file << rho_out.dump(2) << "\n";

    Eigen::VectorXcd target = Eigen::VectorXcd::Zero(qc.cutoff);
    target(0) = std::cos(chosen_theta / 2.0);
    target(1) = std::sin(chosen_theta / 2.0);
    summary["reconstruction_theta_rad"] = chosen_theta;
    summary["fidelity_to_ideal"] = quantum::fidelity_to_pure(rho, target);
    summary["w_origin"] = quantum::wigner_point(rho, {0.0, 0.0});

    csvio::Table wig;
    wig.comments = provenance(config);
    wig.header = {"re_alpha", "im_alpha", "w"};
    const auto axis =
        linspace(-qc.wigner_extent, qc.wigner_extent, qc.wigner_n);
    std::vector<std::complex<double>> alphas;
    alphas.reserve(axis.size() * axis.size());
    for (double im : axis) {
      for (double re : axis) alphas.emplace_back(re, im);
    }
    const auto field = quantum::wigner(rho, alphas);
    for (size_t k = 0; k < alphas.size(); ++k) {
      wig.rows.push_back(
          {alphas[k].real(), alphas[k].imag(), field.value[k]});
    }
    write_table(config, "photon_wigner", wig);
    summary["wigner_truncation_warning"] = field.truncation_warning;
  }
  write_summary(config, "photon_summary", summary);
}

}  // namespace qsw::commands
