#include "qsw/switchnet.hpp"

#include <algorithm>
#include <cmath>

#include "qsw/errors.hpp"
#include "qsw/optimize.hpp"

namespace qsw::switchnet {

using netcore::connect;
using netcore::connect_self;

namespace {

constexpr double kPowerFloor = 1e-24;  // |S|^2 floor, amplitude 1e-12

SMatrix arm_smatrix(const ResonatorSpec& res,
                    const elements::TransmissionLineSpec& lead, double ej_hz,
                    double f_hz) {
  SMatrix s = elements::resonator_smatrix_at_ej(res, ej_hz, f_hz);
  if (lead.length_m > 0.0) {
    const SMatrix l =
        netcore::abcd_to_s(elements::tline_abcd(lead, f_hz), res.z0_ohm);
    s = connect(l, 1, s, 0);
    s = connect(s, 1, l, 0);
  }
  return s;
}

}  // namespace

SMatrix switch_smatrix_at_ej(const SwitchSpec& spec, double ej_a_hz,
                             double ej_b_hz, double f_hz) {
  const SMatrix top = elements::hybrid_smatrix(spec.hybrid, f_hz);
  const SMatrix bot = top;
  const SMatrix arm_a = arm_smatrix(spec.resonator_a, spec.interconnect,
                                    ej_a_hz, f_hz);
  const SMatrix arm_b = arm_smatrix(spec.resonator_b, spec.interconnect,
                                    ej_b_hz, f_hz);

  // Hybrid output 2 feeds arm a, output 3 feeds arm b; both arms land on the
  // matching ports of the output hybrid. With that straight wiring the fully
  // transmitting state exits on the output hybrid's port 1, so the device
  // port order below maps P3 to it (and P4 to its port 0).
  SMatrix n = connect(top, 2, arm_a, 0);  // [P1, P2, topB, armAout]
  n = connect(n, 3, bot, 2);              // [P1, P2, topB, bot0, bot1, botB]
  n = connect(n, 2, arm_b, 0);            // [P1, P2, bot0, bot1, botB, armBout]
  n = connect_self(n, 4, 5);              // [P1, P2, bot0, bot1]

  static constexpr int order[4] = {0, 1, 3, 2};
  SMatrix out;
  out.s.resize(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out.s(i, j) = n.s(order[i], order[j]);
  }
  out.z_ref_ohm = n.z_ref_ohm;
  out.f_hz = f_hz;
  return out;
}

SMatrix switch_smatrix(const SwitchSpec& spec, double phi_a, double phi_b,
                       double f_hz) {
  return switch_smatrix_at_ej(spec,
                              elements::ej_of_flux(spec.resonator_a.squid,
                                                   phi_a),
                              elements::ej_of_flux(spec.resonator_b.squid,
                                                   phi_b),
                              f_hz);
}

double resonance_frequency_at_ej(const ResonatorSpec& spec, double ej_hz,
                                 double f_lo_hz, double f_hi_hz) {
  const auto power = [&](double f) {
    return std::norm(elements::resonator_smatrix_at_ej(spec, ej_hz, f).s(1, 0));
  };
  return optimize::maximize_scan_golden(power, f_lo_hz, f_hi_hz, 241, 1e4);
}

double resonance_frequency(const ResonatorSpec& spec, double phi,
                           double f_lo_hz, double f_hi_hz) {
  return resonance_frequency_at_ej(spec, elements::ej_of_flux(spec.squid, phi),
                                   f_lo_hz, f_hi_hz);
}

namespace {

// log10 of the branching power ratio |S12/S13|^2 at the hybrid center.
double log_branching(const SwitchSpec& spec, double phi_a, double phi_b) {
  const SMatrix s =
      switch_smatrix(spec, phi_a, phi_b, spec.hybrid.f_center_hz);
  const double p12 = std::max(std::norm(s.s(1, 0)), kPowerFloor);
  const double p13 = std::max(std::norm(s.s(2, 0)), kPowerFloor);
  return std::log10(p12) - std::log10(p13);
}

double wrap_flux(double phi) {
  double w = std::remainder(phi, 1.0);
  if (w == -0.5) w = 0.5;
  return w;
}

OperatingPoint refine_point(const SwitchSpec& spec, double phi_a0,
                            double phi_b0, bool minimize, SwitchState state) {
  const auto objective = [&](const Eigen::VectorXd& x) {
    const double v = log_branching(spec, x(0), x(1));
    return minimize ? v : -v;
  };
  Eigen::VectorXd x0(2);
  x0 << phi_a0, phi_b0;
  const auto res = optimize::nelder_mead(objective, x0, 0.02, 1e-4, 400);
  OperatingPoint pt;
  pt.phi_a = wrap_flux(res.x(0));
  pt.phi_b = wrap_flux(res.x(1));
  pt.state = state;
  pt.merit = std::pow(10.0, log_branching(spec, pt.phi_a, pt.phi_b));
  return pt;
}

}  // namespace

std::pair<OperatingPoint, OperatingPoint> find_operating_points(
    const SwitchSpec& spec) {
  constexpr int kGrid = 21;
  double best_min = 1e300, best_max = -1e300;
  double min_a = 0, min_b = 0, max_a = 0, max_b = 0;
  for (int i = 0; i < kGrid; ++i) {
    const double pa = -0.5 + i / static_cast<double>(kGrid - 1);
    for (int j = 0; j < kGrid; ++j) {
      const double pb = -0.5 + j / static_cast<double>(kGrid - 1);
      const double v = log_branching(spec, pa, pb);
      if (v < best_min) {
        best_min = v;
        min_a = pa;
        min_b = pb;
      }
      if (v > best_max) {
        best_max = v;
        max_a = pa;
        max_b = pb;
      }
    }
  }
  OperatingPoint resonant =
      refine_point(spec, min_a, min_b, true, SwitchState::resonant);
  OperatingPoint off =
      refine_point(spec, max_a, max_b, false, SwitchState::off_resonant);
  return {resonant, off};
}

OnOffRatios on_off_ratios(const SwitchSpec& spec, const OperatingPoint& on,
                          const OperatingPoint& off, double f_hz) {
  const SMatrix s_on = switch_smatrix(spec, on.phi_a, on.phi_b, f_hz);
  const SMatrix s_off = switch_smatrix(spec, off.phi_a, off.phi_b, f_hz);
  OnOffRatios r;
  double p12_on = std::norm(s_on.s(1, 0));
  double p12_off = std::norm(s_off.s(1, 0));
  double p13_on = std::norm(s_on.s(2, 0));
  double p13_off = std::norm(s_off.s(2, 0));
  if (p12_on < kPowerFloor) {
    p12_on = kPowerFloor;
    r.ideal_limited_12 = true;
  }
  if (p13_off < kPowerFloor) {
    p13_off = kPowerFloor;
    r.ideal_limited_13 = true;
  }
  r.s12_db = 10.0 * std::log10(p12_off / p12_on);
  r.s13_db = 10.0 * std::log10(p13_on / p13_off);
  return r;
}

LorentzianFit bandwidth_fit(std::span<const std::array<double, 2>> points) {
  if (points.size() < 4) {
    throw ValidationError("bandwidth_fit: need at least 4 samples");
  }
  double peak = -1e300, f_at_peak = 0.0;
  for (const auto& p : points) {
    if (p[1] > peak) {
      peak = p[1];
      f_at_peak = p[0];
    }
  }
  // Initial width from the half-power span on the sampled grid.
  double lo = points.front()[0], hi = points.back()[0];
  for (const auto& p : points) {
    if (p[0] < f_at_peak && p[1] < 0.5 * peak) lo = p[0];
    if (p[0] > f_at_peak && p[1] < 0.5 * peak && hi == points.back()[0]) {
      hi = p[0];
    }
  }
  const double w0 = std::max(hi - lo, (points.back()[0] - points.front()[0]) /
                                          static_cast<double>(points.size()));

  const auto residual = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(points.size());
    for (size_t k = 0; k < points.size(); ++k) {
      const double df = points[k][0] - x(1);
      const double model = x(0) / (1.0 + 4.0 * df * df / (x(2) * x(2)));
      r(static_cast<int>(k)) = model - points[k][1];
    }
    return r;
  };
  Eigen::VectorXd x0(3);
  x0 << peak, f_at_peak, w0;
  optimize::LeastSquaresOptions opt;
  opt.max_iter = 200;
  opt.scale = x0.cwiseAbs();
  const auto res = optimize::levenberg_marquardt(residual, x0, opt);
  LorentzianFit fit;
  fit.amplitude = res.x(0);
  fit.f0_hz = res.x(1);
  fit.fwhm_hz = std::abs(res.x(2));
  fit.residual_norm = std::sqrt(2.0 * res.cost);
  return fit;
}

std::vector<std::array<double, 2>> reflection_spectrum(
    const SwitchSpec& spec, const OperatingPoint& point, double f_lo_hz,
    double f_hi_hz, int n_points) {
  if (n_points < 2 || !(f_hi_hz > f_lo_hz)) {
    throw ValidationError("reflection_spectrum: bad frequency grid");
  }
  std::vector<std::array<double, 2>> out;
  out.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double f = f_lo_hz + (f_hi_hz - f_lo_hz) * i / (n_points - 1);
    const SMatrix s = switch_smatrix(spec, point.phi_a, point.phi_b, f);
    const double p = std::max(std::norm(s.s(0, 0)), 1e-30);
    out.push_back({f, 10.0 * std::log10(p)});
  }
  return out;
}

}  // namespace qsw::switchnet
