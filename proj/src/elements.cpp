#include "qsw/elements.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "qsw/constants.hpp"
#include "qsw/errors.hpp"
#include "qsw/optimize.hpp"

namespace qsw::elements {

using netcore::Complex;

double SquidArraySpec::tuning_ratio() const {
  const double hi = ej1_hz + ej2_hz;
  const double lo = std::abs(ej1_hz - ej2_hz);
  if (lo <= 0.0) throw ValidationError("tuning_ratio: degenerate junctions");
  return hi / lo;
}

double ej_of_flux(const SquidArraySpec& squid, double phi) {
  if (squid.ej1_hz <= 0.0 || squid.ej2_hz <= 0.0) {
    throw ValidationError("ej_of_flux: junction energies must be positive");
  }
  const double e1 = squid.ej1_hz, e2 = squid.ej2_hz;
  const double arg = e1 * e1 + e2 * e2 +
                     2.0 * e1 * e2 * std::cos(2.0 * kPi * phi);
  return std::sqrt(std::max(arg, 0.0));
}

double array_inductance_from_ej(int n_loops, double ej_hz) {
  if (n_loops < 1) throw ValidationError("array_inductance: n_loops < 1");
  if (ej_hz <= 0.0) throw ValidationError("array_inductance: E_J <= 0");
  const double phi0_bar = kConst.phi0 / (2.0 * kPi);
  return n_loops * phi0_bar * phi0_bar / (kConst.h * ej_hz);
}

double array_inductance(const SquidArraySpec& squid, double phi) {
  return array_inductance_from_ej(squid.n_loops, ej_of_flux(squid, phi));
}

AbcdMatrix tline_abcd(const TransmissionLineSpec& line, double f_hz) {
  const double beta_l = 2.0 * kPi * f_hz * line.length_m / line.v_m_per_s;
  AbcdMatrix m;
  m.a = m.d = std::cos(beta_l);
  m.b = Complex(0.0, line.z0_ohm * std::sin(beta_l));
  m.c = Complex(0.0, std::sin(beta_l) / line.z0_ohm);
  m.f_hz = f_hz;
  return m;
}

AbcdMatrix series_capacitor_abcd(double c_farad, double f_hz) {
  if (c_farad <= 0.0) throw ValidationError("series capacitor: C <= 0");
  AbcdMatrix m;
  m.b = Complex(0.0, -1.0 / (2.0 * kPi * f_hz * c_farad));
  m.f_hz = f_hz;
  return m;
}

AbcdMatrix series_inductor_abcd(double l_henry, double f_hz) {
  AbcdMatrix m;
  m.b = Complex(0.0, 2.0 * kPi * f_hz * l_henry);
  m.f_hz = f_hz;
  return m;
}

SMatrix resonator_smatrix_at_ej(const ResonatorSpec& spec, double ej_hz,
                                double f_hz) {
  const double l_arr = array_inductance_from_ej(spec.squid.n_loops, ej_hz);
  const std::array<AbcdMatrix, 5> chain{
      series_capacitor_abcd(spec.c_coupling_f, f_hz),
      tline_abcd(spec.half_line, f_hz),
      series_inductor_abcd(l_arr, f_hz),
      tline_abcd(spec.half_line, f_hz),
      series_capacitor_abcd(spec.c_coupling_f, f_hz)};
  return netcore::abcd_to_s(netcore::cascade(chain), spec.z0_ohm);
}

SMatrix resonator_smatrix(const ResonatorSpec& spec, double phi, double f_hz) {
  return resonator_smatrix_at_ej(spec, ej_of_flux(spec.squid, phi), f_hz);
}

SMatrix bonded_resonator_smatrix(const ResonatorSpec& spec, double f_hz) {
  const std::array<AbcdMatrix, 4> chain{
      series_capacitor_abcd(spec.c_coupling_f, f_hz),
      tline_abcd(spec.half_line, f_hz),
      tline_abcd(spec.half_line, f_hz),
      series_capacitor_abcd(spec.c_coupling_f, f_hz)};
  return netcore::abcd_to_s(netcore::cascade(chain), spec.z0_ohm);
}

namespace {

SMatrix ideal_hybrid_smatrix(const HybridSpec& spec, double f_hz) {
  SMatrix out;
  out.s = Eigen::MatrixXcd::Zero(4, 4);
  const Complex through(0.0, -1.0 / std::sqrt(2.0));  // one quarter-wave hop
  const Complex coupled(-1.0 / std::sqrt(2.0), 0.0);  // two quarter-wave hops
  out.s(0, 2) = out.s(2, 0) = through;
  out.s(1, 3) = out.s(3, 1) = through;
  out.s(0, 3) = out.s(3, 0) = coupled;
  out.s(1, 2) = out.s(2, 1) = coupled;
  out.z_ref_ohm = spec.z0_ohm;
  out.f_hz = f_hz;
  return out;
}

SMatrix branchline_hybrid_smatrix(const HybridSpec& spec, double f_hz) {
  using netcore::connect;
  using netcore::connect_self;
  using netcore::ideal_junction;

  // Quarter-wave at f_center; only the electrical length matters.
  TransmissionLineSpec through_arm{spec.z0_ohm / std::sqrt(2.0), 1.0,
                                   0.25 / spec.f_center_hz};
  TransmissionLineSpec shunt_arm{spec.z0_ohm, 1.0, 0.25 / spec.f_center_hz};
  const SMatrix l_through_a =
      netcore::abcd_to_s(tline_abcd(through_arm, f_hz), spec.z0_ohm);
  const SMatrix l_shunt = netcore::abcd_to_s(tline_abcd(shunt_arm, f_hz),
                                             spec.z0_ohm);
  const SMatrix tee = ideal_junction(3, spec.z0_ohm, f_hz);

  // Corner tees: port 0 external, ports 1/2 to the arms. Ring wiring:
  // 1 -(z0/sqrt2)- 3 on top, 2 -(z0/sqrt2)- 4 on the bottom, 1-2 and 3-4
  // shunt arms on the sides.
  SMatrix n = connect(tee, 1, l_through_a, 0);   // [P1, t1b, l13]
  n = connect(n, 2, tee, 1);                     // [P1, t1b, P3, t3b]
  n = connect(n, 1, l_shunt, 0);                 // [P1, P3, t3b, l12]
  n = connect(n, 3, tee, 1);                     // [P1, P3, t3b, P2, t2b]
  n = connect(n, 2, l_shunt, 0);                 // [P1, P3, P2, t2b, l34]
  n = connect(n, 4, tee, 2);                     // [P1, P3, P2, t2b, P4, t4b]
  n = connect(n, 3, l_through_a, 0);             // [P1, P3, P2, P4, t4b, l24]
  n = connect_self(n, 4, 5);                     // [P1, P3, P2, P4]

  static constexpr int order[4] = {0, 2, 1, 3};
  SMatrix out;
  out.s.resize(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out.s(i, j) = n.s(order[i], order[j]);
  }
  out.z_ref_ohm = spec.z0_ohm;
  out.f_hz = f_hz;
  return out;
}

}  // namespace

SMatrix hybrid_smatrix(const HybridSpec& spec, double f_hz) {
  return spec.kind == HybridKind::ideal ? ideal_hybrid_smatrix(spec, f_hz)
                                        : branchline_hybrid_smatrix(spec, f_hz);
}

namespace {

double bonded_peak_power(const ResonatorSpec& spec, double f_hz) {
  const SMatrix s = bonded_resonator_smatrix(spec, f_hz);
  return std::norm(s.s(1, 0));
}

struct PeakShape {
  double f_peak;
  double fwhm;
};

PeakShape measure_bonded_peak(const ResonatorSpec& spec) {
  const auto power = [&](double f) { return bonded_peak_power(spec, f); };
  const double f_peak =
      optimize::maximize_scan_golden(power, 5.5e9, 10.5e9, 201, 1.0);
  const double p_half = 0.5 * power(f_peak);
  const auto half_crossing = [&](double f) { return power(f) - p_half; };
  const double f_lo =
      optimize::bisect_root(half_crossing, f_peak - 2.5e9, f_peak, 1.0);
  const double f_hi =
      optimize::bisect_root(half_crossing, f_peak, f_peak + 3.0e9, 1.0);
  return {f_peak, f_hi - f_lo};
}

}  // namespace

ResonatorSpec calibrate_resonator(const SquidArraySpec& squid, double f0_hz,
                                  double fwhm_hz, double z0_ohm,
                                  double v_m_per_s) {
  if (f0_hz <= 0.0 || fwhm_hz <= 0.0 || fwhm_hz >= f0_hz) {
    throw ValidationError("calibrate_resonator: bad targets");
  }
  ResonatorSpec spec;
  spec.z0_ohm = z0_ohm;
  spec.squid = squid;
  spec.half_line.z0_ohm = z0_ohm;
  spec.half_line.v_m_per_s = v_m_per_s;

  // Seed from the unloaded half-wave length and the weak-coupling linewidth,
  // then refine both knobs against the exact network response.
  const double q = f0_hz / fwhm_hz;
  const double x0 = std::sqrt(kPi / (4.0 * q));  // omega Cc z0 at threshold
  const double len0 = v_m_per_s / (4.0 * f0_hz * (1.0 + 2.0 * x0 / kPi));
  const double c0 = x0 / (2.0 * kPi * f0_hz * z0_ohm);

  const auto residual = [&](const Eigen::VectorXd& x) {
    ResonatorSpec trial = spec;
    trial.half_line.length_m = x(0);
    trial.c_coupling_f = x(1);
    const PeakShape shape = measure_bonded_peak(trial);
    Eigen::VectorXd r(2);
    r(0) = (shape.f_peak - f0_hz) / f0_hz;
    r(1) = (shape.fwhm - fwhm_hz) / fwhm_hz;
    return r;
  };

  Eigen::VectorXd x0v(2);
  x0v << len0, c0;
  optimize::LeastSquaresOptions opt;
  opt.max_iter = 60;
  opt.cost_tol = 1e-18;
  opt.step_tol = 1e-13;
  opt.scale = x0v;
  const auto fit = optimize::levenberg_marquardt(residual, x0v, opt);
  if (fit.cost > 1e-12) {
    throw NonConvergenceError("calibrate_resonator: targets not reached");
  }
  spec.half_line.length_m = fit.x(0);
  spec.c_coupling_f = fit.x(1);
  return spec;
}

}  // namespace qsw::elements
