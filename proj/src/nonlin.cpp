#include "qsw/nonlin.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "qsw/constants.hpp"
#include "qsw/errors.hpp"
#include "qsw/optimize.hpp"

namespace qsw::nonlin {

namespace {

using std::complex;
constexpr complex<double> kJ{0.0, 1.0};

// Impedance at the array plane looking into one half line terminated by the
// coupling capacitor and the matched load.
complex<double> side_impedance(const elements::ResonatorSpec& spec,
                               double omega) {
  const complex<double> z_load =
      spec.z0_ohm + 1.0 / (kJ * omega * spec.c_coupling_f);
  const double beta_l =
      omega / spec.half_line.v_m_per_s * spec.half_line.length_m;
  const double z0 = spec.half_line.z0_ohm;
  const complex<double> t = std::tan(beta_l);
  return z0 * (z_load + kJ * z0 * t) / (z0 + kJ * z_load * t);
}

double series_reactance(const elements::ResonatorSpec& spec, double l_arr,
                        double omega) {
  return omega * l_arr + 2.0 * side_impedance(spec, omega).imag();
}

}  // namespace

KerrEstimate kerr_from_network(const elements::ResonatorSpec& spec,
                               double phi) {
  const double ej_hz = elements::ej_of_flux(spec.squid, phi);
  const double l_arr =
      elements::array_inductance_from_ej(spec.squid.n_loops, ej_hz);

  // Series-mode frequency: zero crossing of the loop reactance at the array
  // plane. Bracket around the transmission peak, widening once if needed.
  const auto transmission = [&](double f) {
    return std::norm(elements::resonator_smatrix_at_ej(spec, ej_hz, f).s(1, 0));
  };
  const double f_peak =
      optimize::maximize_scan_golden(transmission, 4.0e9, 9.2e9, 261, 1e4);
  const auto x_of_f = [&](double f) {
    return series_reactance(spec, l_arr, 2.0 * kPi * f);
  };
  double lo = 0.9 * f_peak, hi = 1.1 * f_peak;
  if (x_of_f(lo) * x_of_f(hi) > 0.0) {
    lo = 0.7 * f_peak;
    hi = 1.3 * f_peak;
  }
  const double f_mode = optimize::bisect_root(x_of_f, lo, hi, 1e-3);
  const double omega = 2.0 * kPi * f_mode;

  // Series resonance: X = 0 and L_tot = 1/2 dX/dw.
  const double df = 1e6;
  const double dxdw = (x_of_f(f_mode + df) - x_of_f(f_mode - df)) /
                      (2.0 * (2.0 * kPi * df));
  const double l_tot = 0.5 * dxdw;
  if (!(l_tot > 0.0) || !(l_arr < l_tot)) {
    throw ValidationError("kerr_from_network: degenerate lumped mode");
  }

  const auto bonded = [&](double f) {
    return std::norm(elements::bonded_resonator_smatrix(spec, f).s(1, 0));
  };
  const double f_bare =
      optimize::maximize_scan_golden(bonded, 5.5e9, 10.5e9, 261, 1e4);

  KerrEstimate est;
  est.l_total_h = l_tot;
  est.participation = l_arr / l_tot;
  est.c_eff_f = kPi / (2.0 * (2.0 * kPi * f_bare) * spec.z0_ohm);
  est.f_mode_hz = f_mode;
  const double i_zp = std::sqrt(kConst.hbar * omega / (2.0 * l_tot));
  est.phi_zp_rad = (2.0 * kPi / kConst.phi0) *
                   (l_arr / spec.squid.n_loops) * i_zp;
  const double ej_joule = kConst.h * ej_hz;
  const double k_rad = spec.squid.n_loops * ej_joule *
                       std::pow(est.phi_zp_rad, 4) / (2.0 * kConst.hbar);
  est.kerr_over_2pi_hz = -k_rad / (2.0 * kPi);
  return est;
}

namespace {

void validate(const DuffingParams& p) {
  if (!(p.kappa_rad > 0.0)) throw ValidationError("duffing: kappa <= 0");
  if (p.kappa_in_rad > p.kappa_rad) {
    throw ValidationError("duffing: kappa_in > kappa");
  }
  if (p.alpha_in_sq < 0.0) throw ValidationError("duffing: negative drive");
}

double kappa_in_of(const DuffingParams& p) {
  return p.kappa_in_rad > 0.0 ? p.kappa_in_rad : 0.5 * p.kappa_rad;
}

// Real roots of x^3 + a x^2 + b x + c, appended to `out`.
void solve_cubic(double a, double b, double c, std::vector<double>* out) {
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = -a / 3.0;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 + s);
    const double v = std::cbrt(-q / 2.0 - s);
    out->push_back(shift + u + v);
  } else {
    // Three real roots (trigonometric form).
    const double r = std::sqrt(std::max(-p / 3.0, 0.0));
    if (r == 0.0) {
      out->push_back(shift);
      return;
    }
    const double arg = std::clamp(3.0 * q / (2.0 * p * r), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      out->push_back(shift +
                     2.0 * r * std::cos(theta - 2.0 * kPi * k / 3.0));
    }
  }
}

}  // namespace

std::vector<double> duffing_photon_roots(const DuffingParams& params) {
  validate(params);
  const double delta = params.omega_drive_rad - params.omega_r_rad;
  const double half_k = 0.5 * params.kappa_rad;
  const double drive = kappa_in_of(params) * params.alpha_in_sq;
  const double lorentz = delta * delta + half_k * half_k;
  const double n_lin = drive / lorentz;

  std::vector<double> roots;
  if (params.kerr_rad == 0.0 || n_lin == 0.0) {
    roots.push_back(n_lin);
    return roots;
  }

  // Normalized by the linear solution: a3 m^3 + a2 m^2 + m - 1 = 0.
  const double k = params.kerr_rad;
  const double a3 = k * k * n_lin * n_lin / lorentz;
  const double a2 = -2.0 * delta * k * n_lin / lorentz;
  std::vector<double> m;
  if (a3 < 1e-280) {
    // Essentially linear; the Newton polish below absorbs the remainder.
    m.push_back(1.0);
  } else {
    solve_cubic(a2 / a3, 1.0 / a3, -1.0 / a3, &m);
  }

  for (double mi : m) {
    if (!(mi > 0.0) || !std::isfinite(mi)) continue;
    // One Newton polish in the original variable.
    double n = mi * n_lin;
    for (int it = 0; it < 2; ++it) {
      const double d = delta - k * n;
      const double fvalue = n * (d * d + half_k * half_k) - drive;
      const double fprime = d * d + half_k * half_k - 2.0 * n * d * k;
      if (fprime != 0.0) n -= fvalue / fprime;
    }
    if (n > 0.0 && std::isfinite(n)) roots.push_back(n);
  }
  std::sort(roots.begin(), roots.end());
  // Collapse duplicates from the polish step.
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double x, double y) {
                            return std::abs(x - y) <=
                                   1e-9 * std::max(std::abs(x), std::abs(y));
                          }),
              roots.end());
  return roots;
}

DuffingResponse duffing_response(const DuffingParams& params) {
  const auto roots = duffing_photon_roots(params);
  DuffingResponse res;
  res.n_photons = roots.empty() ? 0.0 : roots.front();
  res.transmitted_flux = 0.5 * params.kappa_rad * res.n_photons;
  res.transmission = params.alpha_in_sq > 0.0
                         ? res.transmitted_flux / params.alpha_in_sq
                         : 0.0;
  return res;
}

double compression_point_dbm(const DuffingParams& params, double f_hz,
                             int input_branches) {
  if (!(f_hz > 0.0)) throw ValidationError("compression_point: f <= 0");
  if (input_branches < 1) {
    throw ValidationError("compression_point: need >= 1 branch");
  }
  validate(params);
  if (std::abs(params.kerr_rad) < 1e-12) {
    throw ValidationError(
        "compression_point: |K| below numeric floor, no compression");
  }

  DuffingParams p = params;
  p.omega_drive_rad = p.omega_r_rad;  // on resonance
  const auto transmission_db = [&](double arm_flux) {
    p.alpha_in_sq = arm_flux;
    return 10.0 * std::log10(duffing_response(p).transmission);
  };

  // Reference level well below compression, then an upward log sweep.
  const double kappa = params.kappa_rad;
  const double n_scale = kappa / std::abs(params.kerr_rad);
  const double flux_scale = 0.5 * kappa * n_scale;  // arm flux near 1 dB
  const double t0_db = transmission_db(1e-6 * flux_scale);

  double lo = 1e-6 * flux_scale, hi = lo;
  bool bracketed = false;
  for (int i = 0; i < 200; ++i) {
    hi = lo * 1.25;
    if (t0_db - transmission_db(hi) >= 1.0) {
      bracketed = true;
      break;
    }
    lo = hi;
  }
  if (!bracketed) {
    throw NonConvergenceError("compression_point: no 1 dB drop found");
  }
  const double log_flux = optimize::bisect_root(
      [&](double lf) {
        return (t0_db - transmission_db(std::pow(10.0, lf))) - 1.0;
      },
      std::log10(lo), std::log10(hi), 1e-4);
  const double arm_flux = std::pow(10.0, log_flux);
  const double device_power =
      input_branches * power_from_photon_flux(arm_flux, f_hz);
  return watt_to_dbm(device_power);
}

double photon_flux_from_power(double p_watt, double f_hz) {
  if (!(f_hz > 0.0)) throw ValidationError("photon flux: f <= 0");
  return p_watt / (kConst.h * f_hz);
}

double power_from_photon_flux(double flux_per_s, double f_hz) {
  if (!(f_hz > 0.0)) throw ValidationError("photon flux: f <= 0");
  return flux_per_s * kConst.h * f_hz;
}

double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double watt_to_dbm(double p_watt) {
  if (!(p_watt > 0.0)) throw ValidationError("watt_to_dbm: power <= 0");
  return 10.0 * std::log10(p_watt / 1e-3);
}

}  // namespace qsw::nonlin
