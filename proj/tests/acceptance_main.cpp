// Acceptance gate: ten device-level checks, one pass/fail line each.
// Exit code is the number of failed checks.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qsw/config.hpp"
#include "qsw/constants.hpp"
#include "qsw/dynamics.hpp"
#include "qsw/elements.hpp"
#include "qsw/fluxcal.hpp"
#include "qsw/nonlin.hpp"
#include "qsw/optimize.hpp"
#include "qsw/quantum.hpp"
#include "qsw/rng.hpp"
#include "qsw/switchnet.hpp"

using namespace qsw;
using Complexd = std::complex<double>;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int id, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

const config::RunConfig& base_config() {
  static const config::RunConfig config = config::default_config();
  return config;
}

const switchnet::SwitchSpec& device() {
  static const switchnet::SwitchSpec spec =
      config::build_switch_spec(base_config().device);
  return spec;
}

const std::pair<switchnet::OperatingPoint, switchnet::OperatingPoint>&
operating_points() {
  static const auto points = switchnet::find_operating_points(device());
  return points;
}

switchnet::LorentzianFit physical_linewidth_fit() {
  const auto& [on, off] = operating_points();
  (void)off;
  std::vector<std::array<double, 2>> pts;
  for (int i = 0; i <= 200; ++i) {
    const double f = 6.75e9 + 0.9e9 * i / 200.0;
    pts.push_back(
        {f, std::norm(switchnet::switch_smatrix(device(), on.phi_a, on.phi_b,
                                                f)
                          .s(2, 0))});
  }
  return switchnet::bandwidth_fit(pts);
}

// --- criterion 1 -----------------------------------------------------------

void criterion_network_exactness() {
  const auto t0 = Clock::now();
  Rng rng(1001);
  double worst_u = 0.0, worst_r = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double f = 4.6e9 + 3.6e9 * rng.uniform();
    const auto s = switchnet::switch_smatrix(device(), rng.uniform(),
                                             rng.uniform(), f);
    worst_u = std::max(worst_u, s.unitarity_defect());
    worst_r = std::max(worst_r, s.reciprocity_defect());
  }

  auto ideal = device();
  ideal.hybrid.kind = elements::HybridKind::ideal;
  double worst_split = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double f = 5.0e9 + 3.0e9 * rng.uniform();
    const double phi = rng.uniform();
    const auto s = switchnet::switch_smatrix(ideal, phi, phi, f);
    const double total = std::norm(s.s(1, 0)) + std::norm(s.s(2, 0));
    worst_split = std::max(worst_split, std::abs(total - 1.0));
  }

  const double elapsed = seconds_since(t0);
  const bool pass = worst_u < 1e-9 && worst_r < 1e-9 && worst_split < 1e-9 &&
                    elapsed < 10.0;
  report(1, pass,
         fmt("unitarity %.2e, reciprocity %.2e, |S12|^2+|S13|^2 defect %.2e "
             "(limits 1e-9), %.1f s (limit 10 s)",
             worst_u, worst_r, worst_split, elapsed));
}

// --- criterion 2 -----------------------------------------------------------

void criterion_tuning_range() {
  const auto t0 = Clock::now();
  const auto& res = device().resonator_a;
  const double f_top = switchnet::resonance_frequency(res, 0.0);
  const double f_bot = switchnet::resonance_frequency(res, 0.5);
  const double elapsed = seconds_since(t0);
  const bool pass = std::abs(f_top - 7.5e9) < 0.4e9 &&
                    std::abs(f_bot - 5.5e9) < 0.4e9 && elapsed < 1.0;
  report(2, pass,
         fmt("endpoints %.3f / %.3f GHz (targets 7.5 / 5.5 +- 0.4), %.2f s "
             "(limit 1 s)",
             f_top / 1e9, f_bot / 1e9, elapsed));
}

// --- criterion 3 -----------------------------------------------------------

void criterion_bandwidth_pipeline() {
  const auto t0 = Clock::now();
  const double f0 = 7.20e9, w = 1.49e8, a = 0.97;
  auto synth = [&](double noise, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i <= 100; ++i) {
      const double f = f0 - 2.0 * w + 4.0 * w * i / 100.0;
      const double df = f - f0;
      const double y = a / (1.0 + 4.0 * df * df / (w * w));
      pts.push_back({f, y + noise * a * rng.normal()});
    }
    return switchnet::bandwidth_fit(pts);
  };

  const auto clean = synth(0.0, 1);
  const bool exact = std::abs(clean.f0_hz - f0) < 1e-9 * f0 &&
                     std::abs(clean.fwhm_hz - w) < 1e-9 * w;
  const auto noisy = synth(0.01, 3);
  const bool tolerant = std::abs(noisy.f0_hz - f0) < 0.01 * f0 &&
                        std::abs(noisy.fwhm_hz - w) < 0.01 * w;

  const auto physical = physical_linewidth_fit();
  const bool in_range =
      physical.fwhm_hz > 75e6 && physical.fwhm_hz < 300e6;

  const double elapsed = seconds_since(t0);
  const bool pass = exact && tolerant && in_range && elapsed < 5.0;
  report(3, pass,
         fmt("noiseless df0 %.1e Hz, dw %.1e Hz; noisy df0 %.3f%%, dw %.3f%%; "
             "model width %.0f MHz (range [75,300]); %.1f s (limit 5 s)",
             std::abs(clean.f0_hz - f0), std::abs(clean.fwhm_hz - w),
             100.0 * std::abs(noisy.f0_hz - f0) / f0,
             100.0 * std::abs(noisy.fwhm_hz - w) / w, physical.fwhm_hz / 1e6,
             elapsed));
}

// --- criterion 4 -----------------------------------------------------------

void criterion_isolation() {
  const auto t0 = Clock::now();
  const auto& [on, off] = operating_points();
  const auto ratios = switchnet::on_off_ratios(device(), on, off, 7.2e9);

  // Cross-check against the single-Lorentzian leakage estimate at the
  // published detuning and linewidth, evaluated on the ideal-hybrid
  // network so hybrid ripple does not enter.
  const double detuning = 1.7e9, kappa_hz = 1.49e8;
  const double estimate =
      10.0 * std::log10(1.0 + 4.0 * detuning * detuning /
                                  (kappa_hz * kappa_hz));
  auto ideal = device();
  ideal.hybrid.kind = elements::HybridKind::ideal;
  const auto pts = switchnet::find_operating_points(ideal);
  const auto ideal_ratios =
      switchnet::on_off_ratios(ideal, pts.first, pts.second, 7.2e9);

  const double elapsed = seconds_since(t0);
  const bool pass = ratios.s12_db >= 25.0 && ratios.s13_db >= 25.0 &&
                    std::abs(estimate - ideal_ratios.s13_db) <= 2.0 &&
                    elapsed < 5.0;
  report(4, pass,
         fmt("on/off S12 %.1f dB, S13 %.1f dB (floor 25); single-pole "
             "estimate %.1f dB vs ideal-hybrid network %.1f dB (gap limit "
             "2); %.1f s (limit 5 s)",
             ratios.s12_db, ratios.s13_db, estimate, ideal_ratios.s13_db,
             elapsed));
}

// --- criterion 5 -----------------------------------------------------------

void criterion_compression() {
  const auto t0 = Clock::now();
  nonlin::DuffingParams params;
  params.omega_r_rad = 2.0 * kPi * 7.2e9;
  params.omega_drive_rad = params.omega_r_rad;
  params.kappa_rad = 2.0 * kPi * 1.49e8;
  params.kerr_rad = -2.0 * kPi * 2.8e4;
  const double p_cp = nonlin::compression_point_dbm(params, 7.2e9, 2);

  const double photons_per_us =
      nonlin::photon_flux_from_power(2.3e-12, 7.2e9) * 1e-6;

  const double elapsed = seconds_since(t0);
  const bool pass = std::abs(p_cp - (-81.0)) <= 1.5 &&
                    std::abs(photons_per_us - 4.8e5) <= 0.2e5 &&
                    elapsed < 5.0;
  report(5, pass,
         fmt("P_1dB %.2f dBm (target -81 +- 1.5); 2.3 pW -> %.3gx10^5 "
             "photons/us (target 4.8 +- 0.2); %.2f s (limit 5 s)",
             p_cp, photons_per_us / 1e5, elapsed));
}

// --- criterion 6 -----------------------------------------------------------

void criterion_kerr() {
  const auto t0 = Clock::now();
  const auto& res = device().resonator_a;
  const double phi_center = optimize::bisect_root(
      [&](double p) {
        return switchnet::resonance_frequency(res, p) - 7.2e9;
      },
      0.05, 0.45, 1e-6);

  const auto base = nonlin::kerr_from_network(res, phi_center);
  const double mag = std::abs(base.kerr_over_2pi_hz);
  const bool in_window = mag > 28e3 / 3.0 && mag < 28e3 * 3.0;

  auto scaled = res;
  scaled.squid.n_loops *= 4;
  scaled.squid.ej1_hz *= 4.0;
  scaled.squid.ej2_hz *= 4.0;
  const auto quad = nonlin::kerr_from_network(scaled, phi_center);
  const double ratio =
      std::abs(base.kerr_over_2pi_hz / quad.kerr_over_2pi_hz);

  const double elapsed = seconds_since(t0);
  const bool pass =
      in_window && base.kerr_over_2pi_hz < 0.0 && ratio >= 10.0 &&
      elapsed < 1.0;
  report(6, pass,
         fmt("K/2pi %.1f kHz (window [9.3, 84] around 28); 4x loops -> "
             "|K| ratio %.1f (floor 10); %.2f s (limit 1 s)",
             base.kerr_over_2pi_hz / 1e3, ratio, elapsed));
}

// --- criterion 7 -----------------------------------------------------------

void criterion_dynamics() {
  const auto t0 = Clock::now();
  const auto& [on, off] = operating_points();
  const auto model = dynamics::build_dynamics_model(device(), on, off);

  auto pulse_for = [&](double base, double target) {
    dynamics::FluxPulse pulse;
    pulse.base_phi0 = base;
    pulse.amplitude_phi0 = std::remainder(target - base, 1.0);
    pulse.t_on_s = 30e-9;
    pulse.t_off_s = 90e-9;
    pulse.bandwidth_hz = 5e8;
    return pulse;
  };
  const auto pa = pulse_for(off.phi_a, on.phi_a);
  const auto pb = pulse_for(off.phi_b, on.phi_b);

  const auto rep = dynamics::rise_fall_report(model, pa, pb);
  const std::array<double, 4> times{
      rep.probe2_on.t_10_90_s, rep.probe2_off.t_10_90_s,
      rep.probe3_on.t_10_90_s, rep.probe3_off.t_10_90_s};
  bool in_band = true;
  for (double t : times) in_band = in_band && t > 3e-9 && t < 10e-9;

  // Step-size robustness on one representative edge.
  auto edge_time = [&](double dt_scale) {
    dynamics::ProbeSpec probe{model.f_fit_center_hz, 3};
    const double dt =
        dt_scale * dynamics::stable_time_step(model, pa, pb, probe.f_hz);
    const auto rec = dynamics::simulate_switching(
        model, pa, pb, probe, dt, pa.t_on_s - 25e-9,
        0.5 * (pa.t_on_s + pa.t_off_s));
    const auto filtered = dynamics::filter_record(rec, 7.5e7);
    return dynamics::tanh_step_fit(filtered, 1).t_10_90_s;
  };
  const double t_coarse = edge_time(0.45);
  const double t_fine = edge_time(0.225);
  const double step_change = std::abs(t_coarse - t_fine) / t_fine;

  // Steady state against the analytic single-mode response at a detuned
  // probe frequency.
  const double f_probe = model.f_fit_center_hz + 0.05e9;
  const auto hold_a = pulse_for(on.phi_a, on.phi_a);
  const auto hold_b = pulse_for(on.phi_b, on.phi_b);
  dynamics::ProbeSpec probe{f_probe, 1};
  const double dt =
      0.4 * dynamics::stable_time_step(model, hold_a, hold_b, f_probe);
  const auto rec = dynamics::simulate_switching(model, hold_a, hold_b, probe,
                                                dt, 0.0, 50e-9);
  const Complexd j(0.0, 1.0);
  const double s = 1.0 / std::sqrt(2.0);
  const double half_k = 0.5 * model.kappa_rad;
  auto cavity = [&](double omega_r) {
    const double delta = omega_r - 2.0 * kPi * f_probe;
    return std::sqrt(half_k) / (half_k - j * delta);
  };
  const Complexd u_a = -j * s, u_b = -s;
  const Complexd amp_a = cavity(model.omega_r_a(on.phi_a)) * u_a;
  const Complexd amp_b = cavity(model.omega_r_b(on.phi_b)) * u_b;
  const Complexd r_a = std::sqrt(half_k) * amp_a - u_a;
  const Complexd r_b = std::sqrt(half_k) * amp_b - u_b;
  const Complexd v_a = std::sqrt(half_k) * amp_a;
  const Complexd v_b = std::sqrt(half_k) * amp_b;
  const size_t n = rec.size() - 1;
  const double ss_gap = std::max(
      std::max(std::abs(rec.p1[n] - (-(j * r_a + r_b) * s)),
               std::abs(rec.p2[n] - (-(r_a + j * r_b) * s))),
      std::max(std::abs(rec.p3[n] - (-(v_a + j * v_b) * s)),
               std::abs(rec.p4[n] - (-(j * v_a + v_b) * s))));

  const double elapsed = seconds_since(t0);
  const bool pass =
      in_band && step_change < 0.01 && ss_gap < 1e-3 && elapsed < 30.0;
  report(7, pass,
         fmt("10-90 times %.1f/%.1f/%.1f/%.1f ns (band [3,10]); halving "
             "shift %.2f%% (limit 1%%); steady-state gap %.1e (limit 1e-3); "
             "%.1f s (limit 30 s)",
             times[0] * 1e9, times[1] * 1e9, times[2] * 1e9, times[3] * 1e9,
             100.0 * step_change, ss_gap, elapsed));
}

// --- criterion 8 -----------------------------------------------------------

void criterion_flux_fit() {
  const auto t0 = Clock::now();

  fluxcal::FluxMap truth;
  truth.m << 0.9, 0.2, 0.6, 0.8;
  truth.offset_phi0 << 0.03, -0.05;
  truth.inhomogeneity_g = 0.02;

  std::vector<double> v1(25), f(201);
  for (int i = 0; i < 25; ++i) v1[i] = -1.0 + 2.0 * i / 24.0;
  for (int i = 0; i < 201; ++i) f[i] = 5.2e9 + 2.6e9 * i / 200.0;
  const auto data =
      fluxcal::simulate_flux_map(device(), truth, v1, 0.15, f);

  fluxcal::FluxFitInit init;
  init.map = truth;
  init.map.m(0, 0) *= 1.03;
  init.map.m(1, 0) *= 0.96;
  init.map.offset_phi0(0) += 0.01;
  init.map.offset_phi0(1) -= 0.01;
  init.map.inhomogeneity_g *= 1.5;
  init.squid = device().resonator_a.squid;
  init.squid.ej1_hz *= 1.04;
  init.squid.ej2_hz *= 0.97;

  auto worst_error = [&](const fluxcal::FluxFitResult& fit) {
    double worst = 0.0;
    auto track = [&](double got, double want) {
      worst = std::max(worst, std::abs(got - want) / std::abs(want));
    };
    track(fit.map.m(0, 0), truth.m(0, 0));
    track(fit.map.m(1, 0), truth.m(1, 0));
    track(fit.map.offset_phi0(0), truth.offset_phi0(0));
    track(fit.map.offset_phi0(1), truth.offset_phi0(1));
    track(fit.map.inhomogeneity_g, truth.inhomogeneity_g);
    track(fit.squid.ej1_hz, 1.06e12);
    track(fit.squid.ej2_hz, 1.54e12);
    return worst;
  };

  const auto clean_fit = fluxcal::fit_flux_model(device(), data, init);
  const double clean_err = worst_error(clean_fit);

  double noisy_err = 0.0;
  int converged = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto noisy = data;
    Rng rng(300 + static_cast<std::uint64_t>(trial));
    for (auto& row : noisy.s12_sq) {
      for (double& v : row) {
        v = std::clamp(v * (1.0 + 0.01 * rng.normal()), 0.0, 1.1);
      }
    }
    const auto fit = fluxcal::fit_flux_model(device(), noisy, init);
    converged += fit.converged ? 1 : 0;
    noisy_err = std::max(noisy_err, worst_error(fit));
  }

  const double elapsed = seconds_since(t0);
  const bool pass = clean_fit.converged && clean_err < 1e-3 &&
                    converged == 20 && noisy_err < 0.02 && elapsed < 60.0;
  report(8, pass,
         fmt("noiseless worst error %.4f%% (limit 0.1%%); 20 noisy trials "
             "worst %.2f%% (limit 2%%), %d/20 converged; %.1f s (limit 60 s)",
             100.0 * clean_err, 100.0 * noisy_err, converged, elapsed));
}

// --- criterion 9 -----------------------------------------------------------

Eigen::MatrixXcd matrix_sqrt(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m);
  Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * vals.cwiseSqrt().asDiagonal() *
         eig.eigenvectors().adjoint();
}

double mixed_fidelity(const Eigen::MatrixXcd& rho,
                      const Eigen::MatrixXcd& sigma) {
  const Eigen::MatrixXcd root = matrix_sqrt(rho);
  const double tr = matrix_sqrt(root * sigma * root).trace().real();
  return tr * tr;
}

void criterion_quantum_pipeline() {
  const auto t0 = Clock::now();
  const std::size_t records = 100000;
  const double n_h = 2.0;
  const std::uint64_t seed = 1;

  std::vector<double> thetas(8);
  for (int k = 0; k < 8; ++k) thetas[k] = 2.0 * kPi * k / 8.0;

  double chi2 = 0.0;
  quantum::MomentSet m_pi, m_vac;
  std::vector<Complexd> sig_pi;
  std::uint64_t seed_ref_pi = 0;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    quantum::SourceParams src;
    src.theta_rad = thetas[k];
    src.eta = 0.98;
    src.dephasing_d = 0.86;
    const std::uint64_t seed_sig = seed * 1000003ull + 2 * k;
    const std::uint64_t seed_ref = seed * 1000003ull + 2 * k + 1;
    const auto signal = quantum::synthesize_records(
        quantum::SignalState::from_source(src), n_h, records, seed_sig);
    const auto reference = quantum::synthesize_records(
        quantum::SignalState::make_vacuum(), n_h, records, seed_ref);
    const auto m = quantum::extract_moments(signal, reference);
    const double ideal = 0.98 * std::pow(std::sin(thetas[k] / 2.0), 2);
    const double dev = (m.at(1, 1).value.real() - ideal) /
                       std::max(m.at(1, 1).std_error, 1e-12);
    chi2 += dev * dev;
    if (k == 4) {
      m_pi = m;
      sig_pi = signal;
      seed_ref_pi = seed_ref;
    }
    if (k == 0) m_vac = m;
  }
  const double chi2_dof = chi2 / static_cast<double>(thetas.size());

  const auto g = quantum::g2(m_pi);
  const bool g2_ok = std::abs(g.value) <= 0.05;

  const int cutoff = 5;
  const auto rho_pi = quantum::mle_reconstruct(m_pi, cutoff);
  Eigen::MatrixXcd truth = Eigen::MatrixXcd::Zero(cutoff, cutoff);
  truth(0, 0) = 0.02;
  truth(1, 1) = 0.98;
  const double fidelity = mixed_fidelity(rho_pi.rho, truth);

  const double w_one = quantum::wigner_point(rho_pi, Complexd(0.0, 0.0));
  const bool w_one_ok = std::abs(w_one - (-2.0 / kPi)) <= 0.05;

  const auto rho_vac = quantum::mle_reconstruct(m_vac, cutoff);
  const double w_vac = quantum::wigner_point(rho_vac, Complexd(0.0, 0.0));
  const bool w_vac_ok = std::abs(w_vac - 2.0 / kPi) <= 0.01;

  // Reference contaminated with 0.02 thermal quanta biases the pair moment
  // low and pushes the extracted correlation below zero.
  const auto warm_reference = quantum::synthesize_records(
      quantum::SignalState::make_thermal(0.02), n_h, records, seed_ref_pi);
  const auto m_warm = quantum::extract_moments(sig_pi, warm_reference);
  const auto g_warm = quantum::g2(m_warm);
  const bool warm_ok = g_warm.value < 0.0;

  const double elapsed = seconds_since(t0);
  const bool pass = chi2_dof < 2.0 && g2_ok && fidelity >= 0.98 &&
                    w_one_ok && w_vac_ok && warm_ok && elapsed < 120.0;
  report(9, pass,
         fmt("chi2/dof %.2f (limit 2); g2 %.3f +- %.3f (band +-0.05); "
             "fidelity %.3f (floor 0.98); W(0) %.3f vs -0.637 (+-0.05); "
             "vacuum W(0) %.4f vs 0.6366 (+-0.01); warm-reference g2 %.3f "
             "(< 0); %.0f s (limit 120 s)",
             chi2_dof, g.value, g.std_error, fidelity, w_one, w_vac,
             g_warm.value, elapsed));
}

// --- criterion 10 ----------------------------------------------------------

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_determinism() {
  const auto t0 = Clock::now();
  const auto root =
      std::filesystem::temp_directory_path() / "qsw_acceptance_det";
  std::filesystem::remove_all(root);
  std::filesystem::create_directories(root);

  const auto cfg_path = root / "config.json";
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({
  "sweep": {"n_points": 41},
  "fluxmap": {"n_v1": 11, "n_f": 101, "noise_rel": 0.01},
  "quantum": {"theta_rad": [0.0, 1.5707963267948966, 3.141592653589793],
              "records": 20000, "wigner_n": 11},
  "format": "csv"
})";
  }

  auto run_all = [&](const std::string& out_dir) {
    const std::string base = std::string("\"") + QSW_CLI_PATH + "\"";
    for (const char* sub :
         {"sweep", "fluxmap", "fit", "compression", "pulse", "photon"}) {
      const std::string cmd = base + " " + sub + " --config " +
                              cfg_path.string() + " --seed 7 --out " +
                              out_dir + " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) return false;
    }
    return true;
  };

  const auto dir_a = (root / "a").string();
  const auto dir_b = (root / "b").string();
  const bool ran = run_all(dir_a) && run_all(dir_b);

  bool identical = ran;
  std::size_t compared = 0;
  if (ran) {
    for (const auto& entry :
         std::filesystem::recursive_directory_iterator(dir_a)) {
      if (!entry.is_regular_file()) continue;
      const auto rel = std::filesystem::relative(entry.path(), dir_a);
      const auto twin = std::filesystem::path(dir_b) / rel;
      ++compared;
      if (!std::filesystem::exists(twin) ||
          read_bytes(entry.path()) != read_bytes(twin)) {
        identical = false;
        std::printf("  mismatch: %s\n", rel.string().c_str());
      }
    }
  }

  const double elapsed = seconds_since(t0);
  const bool pass = ran && identical && compared > 0;
  report(10, pass,
         fmt("%zu files byte-compared across two runs%s, %.1f s", compared,
             ran ? (identical ? ", all identical" : ", differences found")
                 : " (CLI run failed)",
             elapsed));
}

}  // namespace

int main() {
  std::printf("acceptance checks, reference device configuration\n");
  criterion_network_exactness();
  criterion_tuning_range();
  criterion_bandwidth_pipeline();
  criterion_isolation();
  criterion_compression();
  criterion_kerr();
  criterion_dynamics();
  criterion_flux_fit();
  criterion_quantum_pipeline();
  criterion_determinism();
  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures;
}
