#include "qsw/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

#include "qsw/constants.hpp"
#include "qsw/csvio.hpp"
#include "qsw/errors.hpp"
#include "qsw/optimize.hpp"

namespace qsw::dynamics {

namespace {

using std::complex;

constexpr complex<double> kJ{0.0, 1.0};
constexpr double kInvSqrt2 = 0.7071067811865475244;
// Gaussian low-pass time constant: s = sqrt(ln 2) / (2 pi B).
constexpr double kSigmaFactor = 0.13250980912064477;
constexpr double kLn9 = 2.1972245773362196;

double wrap_half(double phi) {
  // Periodic and even in flux; image in [0, 0.5].
  return std::fabs(std::remainder(phi, 1.0));
}

double interp_table(const std::vector<double>& xs, const std::vector<double>& ys,
                    double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  size_t hi = static_cast<size_t>(it - xs.begin());
  size_t lo = hi - 1;
  double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

// Largest |i d - k/2| on the pulse trajectory, for the explicit-step
// stability check. Flux extremes are base and base + amplitude; the
// filtered edge never overshoots them.
double max_eigen_rate(const SwitchDynamicsModel& model, const FluxPulse& pa,
                      const FluxPulse& pb, double omega_probe) {
  double worst = model.kappa_rad / 2.0;
  const double phis_a[2] = {pa.base_phi0, pa.base_phi0 + pa.amplitude_phi0};
  const double phis_b[2] = {pb.base_phi0, pb.base_phi0 + pb.amplitude_phi0};
  for (double phi : phis_a) {
    double delta = model.omega_r_a(phi) - omega_probe;
    worst = std::max(worst, std::hypot(model.kappa_rad / 2.0, delta));
  }
  for (double phi : phis_b) {
    double delta = model.omega_r_b(phi) - omega_probe;
    worst = std::max(worst, std::hypot(model.kappa_rad / 2.0, delta));
  }
  return worst;
}

struct InputCoeffs {
  complex<double> u_a{0.0, 0.0}, u_b{0.0, 0.0};  // input-hybrid side
  complex<double> w_a{0.0, 0.0}, w_b{0.0, 0.0};  // output-hybrid side
};

InputCoeffs route_probe(int input_port) {
  // Ideal-hybrid columns: through ports pick up -j/sqrt2, coupled ports
  // -1/sqrt2. Arm A hangs off through of port 1; arm B off through of
  // port 2 (and mirrored on the output hybrid).
  InputCoeffs c;
  switch (input_port) {
    case 1:
      c.u_a = -kJ * kInvSqrt2;
      c.u_b = complex<double>(-kInvSqrt2, 0.0);
      break;
    case 2:
      c.u_a = complex<double>(-kInvSqrt2, 0.0);
      c.u_b = -kJ * kInvSqrt2;
      break;
    case 3:
      c.w_a = complex<double>(-kInvSqrt2, 0.0);
      c.w_b = -kJ * kInvSqrt2;
      break;
    case 4:
      c.w_a = -kJ * kInvSqrt2;
      c.w_b = complex<double>(-kInvSqrt2, 0.0);
      break;
    default:
      throw ValidationError("probe input port must be 1..4");
  }
  return c;
}

}  // namespace

double stable_time_step(const SwitchDynamicsModel& model,
                        const FluxPulse& pulse_a, const FluxPulse& pulse_b,
                        double probe_f_hz) {
  const double omega_probe = 2.0 * kPi * probe_f_hz;
  const double rate_hz = std::max({model.kappa_rad / (2.0 * kPi),
                                   pulse_a.bandwidth_hz,
                                   pulse_b.bandwidth_hz});
  const double bound_spec = 1.0 / (20.0 * rate_hz);
  const double bound_phys =
      2.5 / max_eigen_rate(model, pulse_a, pulse_b, omega_probe);
  return std::min(bound_spec, bound_phys);
}

double pulse_flux(const FluxPulse& pulse, double t_s) {
  if (!(pulse.bandwidth_hz > 0.0)) {
    throw ValidationError("pulse bandwidth must be positive");
  }
  if (!(pulse.t_off_s > pulse.t_on_s)) {
    throw ValidationError("pulse t_off must exceed t_on");
  }
  const double sigma = kSigmaFactor / pulse.bandwidth_hz;
  const double inv = 1.0 / (sigma * std::sqrt(2.0));
  return pulse.base_phi0 +
         0.5 * pulse.amplitude_phi0 *
             (std::erf((t_s - pulse.t_on_s) * inv) -
              std::erf((t_s - pulse.t_off_s) * inv));
}

const std::vector<complex<double>>& WaveformRecord::port(int p) const {
  switch (p) {
    case 1:
      return p1;
    case 2:
      return p2;
    case 3:
      return p3;
    case 4:
      return p4;
    default:
      throw ValidationError("waveform port index must be 1..4");
  }
}

void validate_waveform(const WaveformRecord& record) {
  if (!(record.dt_s > 0.0) || !std::isfinite(record.t0_s)) {
    throw ValidationError("waveform time axis is invalid");
  }
  size_t n = record.p1.size();
  if (n == 0 || record.p2.size() != n || record.p3.size() != n ||
      record.p4.size() != n) {
    throw ValidationError("waveform port arrays must be non-empty and equal");
  }
  for (int p = 1; p <= 4; ++p) {
    for (const auto& z : record.port(p)) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw ValidationError("waveform contains non-finite samples");
      }
      if (std::abs(z) > 1.0 + 1e-6) {
        throw ValidationError("waveform amplitude exceeds the passive bound");
      }
    }
  }
}

void write_waveform_csv(const WaveformRecord& record, const std::string& path,
                        const std::vector<std::string>& comments) {
  csvio::Table table;
  table.comments = comments;
  table.header = {"t_s", "re_p2", "im_p2", "re_p3", "im_p3"};
  table.rows.reserve(record.size());
  for (size_t i = 0; i < record.size(); ++i) {
    table.rows.push_back({record.time_at(i), record.p2[i].real(),
                          record.p2[i].imag(), record.p3[i].real(),
                          record.p3[i].imag()});
  }
  csvio::write_csv(path, table);
}

WaveformRecord slice(const WaveformRecord& record, double t_lo_s,
                     double t_hi_s) {
  if (!(t_hi_s > t_lo_s)) {
    throw ValidationError("slice window must have positive width");
  }
  WaveformRecord out;
  out.dt_s = record.dt_s;
  out.input_port = record.input_port;
  out.probe_f_hz = record.probe_f_hz;
  bool first = true;
  for (size_t i = 0; i < record.size(); ++i) {
    double t = record.time_at(i);
    if (t < t_lo_s || t > t_hi_s) continue;
    if (first) {
      out.t0_s = t;
      first = false;
    }
    out.p1.push_back(record.p1[i]);
    out.p2.push_back(record.p2[i]);
    out.p3.push_back(record.p3[i]);
    out.p4.push_back(record.p4[i]);
  }
  if (out.p1.empty()) {
    throw ValidationError("slice window contains no samples");
  }
  return out;
}

WaveformRecord filter_record(const WaveformRecord& record,
                             double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) {
    throw ValidationError("detection bandwidth must be positive");
  }
  if (record.size() == 0 || !(record.dt_s > 0.0)) {
    throw ValidationError("cannot filter an empty waveform");
  }
  const double sigma = kSigmaFactor / bandwidth_hz;
  const int half = static_cast<int>(std::ceil(5.0 * sigma / record.dt_s));
  if (half == 0) return record;

  std::vector<double> kernel(static_cast<size_t>(2 * half + 1));
  double norm = 0.0;
  for (int k = -half; k <= half; ++k) {
    double x = static_cast<double>(k) * record.dt_s / sigma;
    double v = std::exp(-0.5 * x * x);
    kernel[static_cast<size_t>(k + half)] = v;
    norm += v;
  }
  for (double& v : kernel) v /= norm;

  WaveformRecord out = record;
  const int n = static_cast<int>(record.size());
  auto apply = [&](const std::vector<complex<double>>& src,
                   std::vector<complex<double>>& dst) {
    for (int i = 0; i < n; ++i) {
      complex<double> acc{0.0, 0.0};
      for (int k = -half; k <= half; ++k) {
        int j = std::clamp(i + k, 0, n - 1);  // hold edge values
        acc += kernel[static_cast<size_t>(k + half)] *
               src[static_cast<size_t>(j)];
      }
      dst[static_cast<size_t>(i)] = acc;
    }
  };
  apply(record.p1, out.p1);
  apply(record.p2, out.p2);
  apply(record.p3, out.p3);
  apply(record.p4, out.p4);
  return out;
}

double SwitchDynamicsModel::omega_r_a(double phi) const {
  return interp_table(phi_grid, omega_a_rad, wrap_half(phi));
}

double SwitchDynamicsModel::omega_r_b(double phi) const {
  return interp_table(phi_grid, omega_b_rad, wrap_half(phi));
}

SwitchDynamicsModel build_dynamics_model(const switchnet::SwitchSpec& spec,
                                         const switchnet::OperatingPoint& on,
                                         const switchnet::OperatingPoint& off) {
  SwitchDynamicsModel model;
  model.on = on;
  model.off = off;

  constexpr int kTablePoints = 161;
  model.phi_grid.resize(kTablePoints);
  model.omega_a_rad.resize(kTablePoints);
  model.omega_b_rad.resize(kTablePoints);
  for (int i = 0; i < kTablePoints; ++i) {
    double phi = 0.5 * static_cast<double>(i) / (kTablePoints - 1);
    model.phi_grid[i] = phi;
    model.omega_a_rad[i] =
        2.0 * kPi * switchnet::resonance_frequency(spec.resonator_a, phi);
    model.omega_b_rad[i] =
        2.0 * kPi * switchnet::resonance_frequency(spec.resonator_b, phi);
  }

  // Linewidth of the routed passband at the resonant point.
  double f_guess =
      interp_table(model.phi_grid, model.omega_a_rad, wrap_half(on.phi_a)) /
      (2.0 * kPi);
  constexpr int kFitPoints = 201;
  const double f_lo = f_guess - 0.45e9;
  const double f_hi = f_guess + 0.45e9;
  std::vector<std::array<double, 2>> pts(kFitPoints);
  for (int i = 0; i < kFitPoints; ++i) {
    double f = f_lo + (f_hi - f_lo) * static_cast<double>(i) / (kFitPoints - 1);
    auto s = switchnet::switch_smatrix(spec, on.phi_a, on.phi_b, f);
    pts[static_cast<size_t>(i)] = {f, std::norm(s.s(2, 0))};
  }
  auto fit = switchnet::bandwidth_fit(pts);
  if (!(fit.fwhm_hz > 1e6) || !(fit.fwhm_hz < 1.5e9)) {
    throw NonConvergenceError("linewidth fit outside the physical range");
  }
  model.kappa_rad = 2.0 * kPi * fit.fwhm_hz;
  model.f_fit_center_hz = fit.f0_hz;
  return model;
}

WaveformRecord simulate_switching(const SwitchDynamicsModel& model,
                                  const FluxPulse& pulse_a,
                                  const FluxPulse& pulse_b,
                                  const ProbeSpec& probe, double dt_s,
                                  double t_start_s, double t_end_s) {
  if (!(model.kappa_rad > 0.0)) {
    throw ValidationError("dynamics model has no positive linewidth");
  }
  if (!(probe.f_hz > 0.0)) {
    throw ValidationError("probe frequency must be positive");
  }
  if (!(t_end_s > t_start_s) || !(dt_s > 0.0)) {
    throw ValidationError("time window must be increasing with positive dt");
  }
  const double omega_p = 2.0 * kPi * probe.f_hz;
  const double dt_max = stable_time_step(model, pulse_a, pulse_b, probe.f_hz);
  if (dt_s > dt_max) {
    throw ValidationError(
        "step-size instability: dt exceeds the explicit-integration bound");
  }

  const InputCoeffs in = route_probe(probe.input_port);
  const double kappa = model.kappa_rad;
  const double root_k2 = std::sqrt(kappa / 2.0);
  const complex<double> drive_a = root_k2 * (in.u_a + in.w_a);
  const complex<double> drive_b = root_k2 * (in.u_b + in.w_b);

  auto delta_a = [&](double t) {
    return model.omega_r_a(pulse_flux(pulse_a, t)) - omega_p;
  };
  auto delta_b = [&](double t) {
    return model.omega_r_b(pulse_flux(pulse_b, t)) - omega_p;
  };

  const size_t n_steps =
      static_cast<size_t>(std::floor((t_end_s - t_start_s) / dt_s + 0.5)) + 1;
  WaveformRecord rec;
  rec.t0_s = t_start_s;
  rec.dt_s = dt_s;
  rec.input_port = probe.input_port;
  rec.probe_f_hz = probe.f_hz;
  rec.p1.reserve(n_steps);
  rec.p2.reserve(n_steps);
  rec.p3.reserve(n_steps);
  rec.p4.reserve(n_steps);

  // Start in the steady state of the initial detunings.
  complex<double> a_a =
      drive_a / complex<double>(kappa / 2.0, -delta_a(t_start_s));
  complex<double> a_b =
      drive_b / complex<double>(kappa / 2.0, -delta_b(t_start_s));

  auto deriv = [&](complex<double> a, double delta,
                   complex<double> drive) -> complex<double> {
    return complex<double>(-kappa / 2.0, delta) * a + drive;
  };

  auto emit = [&](complex<double> aa, complex<double> ab) {
    complex<double> r_a = root_k2 * aa - in.u_a;
    complex<double> r_b = root_k2 * ab - in.u_b;
    complex<double> v_a = root_k2 * aa - in.w_a;
    complex<double> v_b = root_k2 * ab - in.w_b;
    rec.p1.push_back(-(kJ * r_a + r_b) * kInvSqrt2);
    rec.p2.push_back(-(r_a + kJ * r_b) * kInvSqrt2);
    rec.p4.push_back(-(kJ * v_a + v_b) * kInvSqrt2);
    rec.p3.push_back(-(v_a + kJ * v_b) * kInvSqrt2);
  };

  double t = t_start_s;
  emit(a_a, a_b);
  for (size_t i = 1; i < n_steps; ++i) {
    const double th = t + 0.5 * dt_s;
    const double tf = t + dt_s;
    const double da0 = delta_a(t), da1 = delta_a(th), da2 = delta_a(tf);
    const double db0 = delta_b(t), db1 = delta_b(th), db2 = delta_b(tf);

    complex<double> k1 = deriv(a_a, da0, drive_a);
    complex<double> k2 = deriv(a_a + 0.5 * dt_s * k1, da1, drive_a);
    complex<double> k3 = deriv(a_a + 0.5 * dt_s * k2, da1, drive_a);
    complex<double> k4 = deriv(a_a + dt_s * k3, da2, drive_a);
    a_a += (dt_s / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    k1 = deriv(a_b, db0, drive_b);
    k2 = deriv(a_b + 0.5 * dt_s * k1, db1, drive_b);
    k3 = deriv(a_b + 0.5 * dt_s * k2, db1, drive_b);
    k4 = deriv(a_b + dt_s * k3, db2, drive_b);
    a_b += (dt_s / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    t = tf;
    emit(a_a, a_b);
  }
  return rec;
}

StepFit tanh_step_fit(const WaveformRecord& record, int port) {
  const auto& z = record.port(port);
  const size_t n = z.size();
  if (n < 8) {
    throw ValidationError("step fit needs at least 8 samples");
  }
  std::vector<double> y(n), t_ns(n);
  for (size_t i = 0; i < n; ++i) {
    y[i] = std::norm(z[i]);
    t_ns[i] = record.time_at(i) * 1e9;
  }

  const size_t edge = std::max<size_t>(3, n / 10);
  double lo0 = 0.0, hi0 = 0.0;
  for (size_t i = 0; i < edge; ++i) {
    lo0 += y[i];
    hi0 += y[n - 1 - i];
  }
  lo0 /= static_cast<double>(edge);
  hi0 /= static_cast<double>(edge);

  const double y_min = *std::min_element(y.begin(), y.end());
  const double y_max = *std::max_element(y.begin(), y.end());
  const double span_y = y_max - y_min;
  if (!(std::fabs(hi0 - lo0) > 1e-9) || !(span_y > 1e-9)) {
    throw ValidationError("step fit requires a non-flat record");
  }

  // Hysteresis transition count; ringing inside the middle band does not
  // retrigger. Exactly one low/high state change is required.
  const double band_lo = y_min + 0.25 * span_y;
  const double band_hi = y_min + 0.75 * span_y;
  int state = 0;  // -1 low, +1 high, 0 unknown
  int transitions = 0;
  for (size_t i = 0; i < n; ++i) {
    int s = y[i] < band_lo ? -1 : (y[i] > band_hi ? +1 : 0);
    if (s == 0) continue;
    if (state != 0 && s != state) ++transitions;
    state = s;
  }
  if (transitions != 1) {
    throw ValidationError("step fit requires exactly one transition");
  }

  const double mid = y_min + 0.5 * span_y;
  double t_mid = t_ns[n / 2], t_25 = t_ns.front(), t_75 = t_ns.back();
  bool seen_mid = false, seen_25 = false, seen_75 = false;
  for (size_t i = 0; i < n; ++i) {
    bool above_mid = y[i] > mid;
    if (!seen_mid && above_mid != (y[0] > mid)) {
      t_mid = t_ns[i];
      seen_mid = true;
    }
    if (!seen_25 && (y[i] > band_lo) != (y[0] > band_lo)) {
      t_25 = t_ns[i];
      seen_25 = true;
    }
    if (!seen_75 && (y[i] > band_hi) != (y[0] > band_hi)) {
      t_75 = t_ns[i];
      seen_75 = true;
    }
  }
  double w0 = std::fabs(t_75 - t_25) / 1.0986122886681098;
  const double dt_ns = record.dt_s * 1e9;
  w0 = std::max(w0, dt_ns);

  Eigen::VectorXd x0(4);
  x0 << lo0, hi0 - lo0, t_mid, w0;
  auto resid = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(n));
    for (size_t i = 0; i < n; ++i) {
      double u = (t_ns[i] - x(2)) / x(3);
      r(static_cast<Eigen::Index>(i)) =
          x(0) + 0.5 * x(1) * (1.0 + std::tanh(u)) - y[i];
    }
    return r;
  };
  optimize::LeastSquaresOptions opt;
  opt.max_iter = 200;
  opt.scale = Eigen::VectorXd(4);
  opt.scale << span_y, span_y, 5.0, 2.0;
  auto fit = optimize::levenberg_marquardt(resid, x0, opt);
  if (!fit.converged) {
    throw NonConvergenceError("tanh step fit did not converge");
  }

  double a = fit.x(0), b = fit.x(1), t0 = fit.x(2), w = fit.x(3);
  if (w < 0.0) {  // tanh(-u) reflection: same curve with flipped plateaus
    w = -w;
    a = a + b;
    b = -b;
  }
  if (!(w > 0.0)) {
    throw NonConvergenceError("step fit collapsed to zero width");
  }

  StepFit out;
  out.t0_s = t0 * 1e-9;
  out.w_s = w * 1e-9;
  out.level_start = a;
  out.level_end = a + b;
  out.t_10_90_s = kLn9 * w * 1e-9;
  out.rising = b > 0.0;
  return out;
}

RiseFallReport rise_fall_report(const SwitchDynamicsModel& model,
                                const FluxPulse& pulse_a,
                                const FluxPulse& pulse_b,
                                double detection_bandwidth_hz) {
  const double t_on = std::min(pulse_a.t_on_s, pulse_b.t_on_s);
  const double t_off = std::max(pulse_a.t_off_s, pulse_b.t_off_s);
  if (!(t_off - t_on > 12.0 / model.kappa_rad)) {
    throw ValidationError("pulse plateau too short to settle between edges");
  }
  const double t_start = t_on - 25e-9;
  const double t_end = t_off + 35e-9;
  const double t_mid = 0.5 * (t_on + t_off);
  const double f_probe = model.f_fit_center_hz;

  auto fit_edges = [&](int input_port, StepFit& on_edge, StepFit& off_edge) {
    ProbeSpec probe{f_probe, input_port};
    const double dt =
        0.45 * stable_time_step(model, pulse_a, pulse_b, f_probe);
    auto rec = simulate_switching(model, pulse_a, pulse_b, probe, dt, t_start,
                                  t_end);
    auto smooth = filter_record(rec, detection_bandwidth_hz);
    on_edge = tanh_step_fit(slice(smooth, t_start, t_mid), 1);
    off_edge = tanh_step_fit(slice(smooth, t_mid, t_end), 1);
  };

  RiseFallReport report;
  fit_edges(2, report.probe2_on, report.probe2_off);
  fit_edges(3, report.probe3_on, report.probe3_off);
  return report;
}

}  // namespace qsw::dynamics
