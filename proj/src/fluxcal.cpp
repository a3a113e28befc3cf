#include "qsw/fluxcal.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qsw/csvio.hpp"
#include "qsw/errors.hpp"
#include "qsw/optimize.hpp"

namespace qsw::fluxcal {

Eigen::Vector2d flux_from_voltages(const FluxMap& map,
                                   const Eigen::Vector2d& v_volt) {
  return map.m * v_volt + map.offset_phi0;
}

double effective_ej_with_inhomogeneity(const elements::SquidArraySpec& spec,
                                       double phi_mean, double g) {
  if (spec.n_loops < 1) {
    throw ValidationError("effective_ej: need at least one loop");
  }
  double inv_sum = 0.0;
  for (int k = 0; k < spec.n_loops; ++k) {
    const double phi_k =
        phi_mean * (1.0 + g * (k - 0.5 * (spec.n_loops - 1)));
    const double e = elements::ej_of_flux(spec, phi_k);
    if (!(e > 0.0)) {
      throw ValidationError("effective_ej: singular per-loop energy");
    }
    inv_sum += 1.0 / e;
  }
  return spec.n_loops / inv_sum;
}

void validate(const SpectroscopyDataset& data) {
  if (data.v1_volt.empty() || data.f_hz.size() < 3) {
    throw ValidationError("dataset: need voltages and >= 3 frequencies");
  }
  if (!std::isfinite(data.v2_volt)) {
    throw ValidationError("dataset: V2 not finite");
  }
  for (double v : data.v1_volt) {
    if (!std::isfinite(v)) throw ValidationError("dataset: V1 not finite");
  }
  for (size_t i = 1; i < data.f_hz.size(); ++i) {
    if (!(data.f_hz[i] > data.f_hz[i - 1])) {
      throw ValidationError("dataset: frequency grid not ascending");
    }
  }
  if (data.s12_sq.size() != data.v1_volt.size()) {
    throw ValidationError("dataset: row count mismatch");
  }
  for (const auto& row : data.s12_sq) {
    if (row.size() != data.f_hz.size()) {
      throw ValidationError("dataset: spectrum length mismatch");
    }
    for (double s : row) {
      if (!std::isfinite(s) || s < 0.0 || s > 1.1) {
        throw ValidationError("dataset: |S12|^2 outside [0, 1.1]");
      }
    }
  }
}

namespace {

void arm_energies(const switchnet::SwitchSpec& device, const FluxMap& map,
                  double v1, double v2, double* ej_a, double* ej_b) {
  const Eigen::Vector2d phi =
      flux_from_voltages(map, Eigen::Vector2d(v1, v2));
  *ej_a = effective_ej_with_inhomogeneity(device.resonator_a.squid, phi(0),
                                          map.inhomogeneity_g);
  *ej_b = effective_ej_with_inhomogeneity(device.resonator_b.squid, phi(1),
                                          map.inhomogeneity_g);
}

}  // namespace

SpectroscopyDataset simulate_flux_map(const switchnet::SwitchSpec& device,
                                      const FluxMap& map,
                                      const std::vector<double>& v1_volt,
                                      double v2_volt,
                                      const std::vector<double>& f_hz) {
  SpectroscopyDataset data;
  data.v1_volt = v1_volt;
  data.v2_volt = v2_volt;
  data.f_hz = f_hz;
  data.s12_sq.reserve(v1_volt.size());
  for (double v1 : v1_volt) {
    double ej_a = 0.0, ej_b = 0.0;
    arm_energies(device, map, v1, v2_volt, &ej_a, &ej_b);
    std::vector<double> row;
    row.reserve(f_hz.size());
    for (double f : f_hz) {
      row.push_back(
          std::norm(switchnet::switch_smatrix_at_ej(device, ej_a, ej_b, f)
                        .s(1, 0)));
    }
    data.s12_sq.push_back(std::move(row));
  }
  validate(data);
  return data;
}

namespace {
const std::vector<std::string> kDatasetHeader = {"V1", "V2", "f_Hz",
                                                 "S12_sq"};
}

void write_dataset_csv(const SpectroscopyDataset& data,
                       const std::string& path,
                       const std::vector<std::string>& comments) {
  validate(data);
  csvio::Table table;
  table.comments = comments;
  table.header = kDatasetHeader;
  table.rows.reserve(data.v1_volt.size() * data.f_hz.size());
  for (size_t i = 0; i < data.v1_volt.size(); ++i) {
    for (size_t k = 0; k < data.f_hz.size(); ++k) {
      table.rows.push_back(
          {data.v1_volt[i], data.v2_volt, data.f_hz[k], data.s12_sq[i][k]});
    }
  }
  csvio::write_csv(path, table);
}

SpectroscopyDataset read_dataset_csv(const std::string& path) {
  const csvio::Table table = csvio::read_csv(path, kDatasetHeader);
  if (table.rows.empty()) throw SchemaError(path + ": no data rows");
  SpectroscopyDataset data;
  data.v2_volt = table.rows.front()[1];
  // First block (constant V1 prefix) defines the frequency grid.
  const double v1_first = table.rows.front()[0];
  size_t nf = 0;
  while (nf < table.rows.size() && table.rows[nf][0] == v1_first) ++nf;
  if (nf < 3) throw SchemaError(path + ": frequency grid shorter than 3");
  if (table.rows.size() % nf != 0) {
    throw SchemaError(path + ": row count not a multiple of the grid size");
  }
  data.f_hz.reserve(nf);
  for (size_t k = 0; k < nf; ++k) data.f_hz.push_back(table.rows[k][2]);
  const size_t n_blocks = table.rows.size() / nf;
  for (size_t i = 0; i < n_blocks; ++i) {
    const double v1 = table.rows[i * nf][0];
    std::vector<double> row(nf);
    for (size_t k = 0; k < nf; ++k) {
      const auto& cells = table.rows[i * nf + k];
      if (cells[0] != v1) {
        throw SchemaError(path + ": ragged voltage block");
      }
      if (cells[1] != data.v2_volt) {
        throw SchemaError(path + ": V2 must be constant");
      }
      if (cells[2] != data.f_hz[k]) {
        throw SchemaError(path + ": frequency grids differ between blocks");
      }
      row[k] = cells[3];
    }
    data.v1_volt.push_back(v1);
    data.s12_sq.push_back(std::move(row));
  }
  validate(data);
  return data;
}

namespace {

// Vertex of the parabola through three samples; falls back to the center
// when the curvature is not positive. Shared by data extraction and model
// prediction so a noiseless round trip cancels exactly.
double parabola_vertex(double f0, double s0, double f1, double s1, double f2,
                       double s2) {
  const double x0 = f0 - f1, x2 = f2 - f1;
  const double denom = x0 * x2 * (x0 - x2);
  if (denom == 0.0) return f1;
  const double a = (x2 * (s0 - s1) - x0 * (s2 - s1)) / denom;
  if (!(a > 0.0)) return f1;
  const double b = ((s0 - s1) - a * x0 * x0) / x0;
  const double vertex = f1 - 0.5 * b / a;
  return std::clamp(vertex, std::min(f0, f2), std::max(f0, f2));
}

}  // namespace

std::vector<DipObservation> extract_dips(const SpectroscopyDataset& data,
                                         double threshold_rel) {
  validate(data);
  if (!(threshold_rel > 0.0)) {
    throw ValidationError("extract_dips: threshold must be positive");
  }
  std::vector<DipObservation> dips;
  const auto& f = data.f_hz;
  for (size_t i = 0; i < data.s12_sq.size(); ++i) {
    const auto& s = data.s12_sq[i];
    const double cutoff =
        threshold_rel * *std::max_element(s.begin(), s.end());
    // One observation per contiguous sub-cutoff run, at its deepest sample.
    // Runs that only graze the cutoff are flank fragments of a neighboring
    // dip split off by noise, not dips of their own; the 0.9 hysteresis
    // drops them. Boundary minima cannot be refined and are dropped too.
    size_t k = 0;
    while (k < s.size()) {
      if (!(s[k] < cutoff)) {
        ++k;
        continue;
      }
      size_t best = k, end = k;
      while (end < s.size() && s[end] < cutoff) {
        if (s[end] < s[best]) best = end;
        ++end;
      }
      if (best > 0 && best + 1 < s.size() && s[best] < 0.9 * cutoff) {
        DipObservation dip;
        dip.v_index = static_cast<int>(i);
        dip.f_hz = parabola_vertex(f[best - 1], s[best - 1], f[best],
                                   s[best], f[best + 1], s[best + 1]);
        dip.depth = s[best];
        dips.push_back(dip);
      }
      k = end;
    }
  }
  return dips;
}

namespace {

// Resonance frequency versus array energy for fixed resonator geometry.
// Linear interpolation on a dense grid; used only to center search windows.
struct ResonanceTable {
  double ej_lo = 0.0, ej_hi = 0.0;
  std::vector<double> f_hz;

  double lookup(double ej) const {
    const double t = std::clamp((ej - ej_lo) / (ej_hi - ej_lo), 0.0, 1.0) *
                     (f_hz.size() - 1);
    const size_t k =
        std::min(static_cast<size_t>(t), f_hz.size() - 2);
    return f_hz[k] + (f_hz[k + 1] - f_hz[k]) * (t - k);
  }
};

ResonanceTable build_resonance_table(const elements::ResonatorSpec& res,
                                     double ej_lo, double ej_hi, int n) {
  ResonanceTable table;
  table.ej_lo = ej_lo;
  table.ej_hi = ej_hi;
  table.f_hz.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double ej = ej_lo + (ej_hi - ej_lo) * i / (n - 1);
    table.f_hz.push_back(
        switchnet::resonance_frequency_at_ej(res, ej, 4.3e9, 8.9e9));
  }
  return table;
}

struct DipPredictor {
  const switchnet::SwitchSpec& device;
  const std::vector<double>& f_grid;
  ResonanceTable table_a, table_b;

  // Model dip frequencies for both arms at one voltage point: evaluate the
  // modeled spectrum on the dataset's own grid around the table estimate,
  // take the local argmin, and refine with the shared parabola.
  std::pair<double, double> predict(double ej_a, double ej_b) const {
    std::map<int, double> bins;
    const auto power = [&](int k) {
      auto it = bins.find(k);
      if (it != bins.end()) return it->second;
      const double p = std::norm(
          switchnet::switch_smatrix_at_ej(device, ej_a, ej_b, f_grid[k])
              .s(1, 0));
      bins.emplace(k, p);
      return p;
    };
    const int nf = static_cast<int>(f_grid.size());
    const auto locate = [&](double f_center) {
      const auto it = std::lower_bound(f_grid.begin(), f_grid.end(), f_center);
      int j = static_cast<int>(it - f_grid.begin());
      j = std::clamp(j, 0, nf - 1);
      int lo = std::max(0, j - 2), hi = std::min(nf - 1, j + 2);
      for (;;) {
        int k = lo;
        for (int i = lo; i <= hi; ++i) {
          if (power(i) < power(k)) k = i;
        }
        const bool can_grow_lo = k == lo && lo > 0 && j - lo < 12;
        const bool can_grow_hi = k == hi && hi < nf - 1 && hi - j < 12;
        if (can_grow_lo) {
          lo = std::max(0, lo - 2);
        } else if (can_grow_hi) {
          hi = std::min(nf - 1, hi + 2);
        } else {
          if (k == 0 || k == nf - 1) return f_grid[k];
          return parabola_vertex(f_grid[k - 1], power(k - 1), f_grid[k],
                                 power(k), f_grid[k + 1], power(k + 1));
        }
      }
    };
    return {locate(table_a.lookup(ej_a)), locate(table_b.lookup(ej_b))};
  }
};

}  // namespace

FluxFitResult fit_flux_dips(const switchnet::SwitchSpec& device,
                            const std::vector<double>& f_grid,
                            const std::vector<double>& v1_volt, double v2_volt,
                            const std::vector<DipObservation>& dips,
                            const FluxFitInit& init) {
  if (dips.empty()) throw ValidationError("fit_flux_dips: no dips");
  for (const auto& dip : dips) {
    if (dip.v_index < 0 ||
        dip.v_index >= static_cast<int>(v1_volt.size())) {
      throw ValidationError("fit_flux_dips: dip voltage index out of range");
    }
  }

  const double ej_cap_lo = 3.4e11, ej_cap_hi = 3.3e12;
  DipPredictor predictor{
      device, f_grid,
      build_resonance_table(device.resonator_a, ej_cap_lo, ej_cap_hi, 256),
      build_resonance_table(device.resonator_b, ej_cap_lo, ej_cap_hi, 256)};

  // x = [m00, m10, off_a_eff, off_b_eff, g, ej1, ej2]; offsets are effective
  // at the sweep's fixed V2.
  Eigen::VectorXd x0(7);
  const Eigen::Vector2d off_eff =
      init.map.offset_phi0 + init.map.m.col(1) * v2_volt;
  x0 << init.map.m(0, 0), init.map.m(1, 0), off_eff(0), off_eff(1),
      init.map.inhomogeneity_g, init.squid.ej1_hz, init.squid.ej2_hz;

  // Indices of sweep points that actually carry observations.
  std::vector<int> active;
  for (const auto& dip : dips) active.push_back(dip.v_index);
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());

  const auto residuals = [&](const Eigen::VectorXd& x) {
    elements::SquidArraySpec squid_a = device.resonator_a.squid;
    elements::SquidArraySpec squid_b = device.resonator_b.squid;
    // Box guard: a wild trial step must not leave the model's domain.
    // Clamped trials produce a flat, large residual and get damped away.
    squid_a.ej1_hz = squid_b.ej1_hz = std::clamp(x(5), 1e10, 1e14);
    squid_a.ej2_hz = squid_b.ej2_hz = std::clamp(x(6), 1e10, 1e14);
    std::map<int, std::pair<double, double>> pred;
    for (int v : active) {
      const double phi_a = x(0) * v1_volt[v] + x(2);
      const double phi_b = x(1) * v1_volt[v] + x(3);
      const double ej_a = std::clamp(
          effective_ej_with_inhomogeneity(squid_a, phi_a, x(4)), ej_cap_lo,
          ej_cap_hi);
      const double ej_b = std::clamp(
          effective_ej_with_inhomogeneity(squid_b, phi_b, x(4)), ej_cap_lo,
          ej_cap_hi);
      pred[v] = predictor.predict(ej_a, ej_b);
    }
    Eigen::VectorXd r(dips.size());
    for (size_t i = 0; i < dips.size(); ++i) {
      const auto& p = pred[dips[i].v_index];
      const double da = dips[i].f_hz - p.first;
      const double db = dips[i].f_hz - p.second;
      const double raw =
          (std::abs(da) <= std::abs(db) ? da : db) / 1e6;
      // Soft-L1 residual, linear below ~20 MHz and saturating above, so a
      // band-edge artifact among the observations cannot capture the fit.
      r(static_cast<int>(i)) =
          raw / std::sqrt(1.0 + (raw / 20.0) * (raw / 20.0));
    }
    return r;
  };

  optimize::LeastSquaresOptions opt;
  opt.max_iter = 120;
  opt.scale.resize(7);
  opt.scale << 1e2, 1e2, 1e2, 1e2, 1e5, 1e12, 1e12;
  const auto lm = optimize::levenberg_marquardt(residuals, x0, opt);
  if (!lm.converged) {
    throw NonConvergenceError("fit_flux_dips: no convergence after " +
                              std::to_string(lm.iterations) + " iterations");
  }

  FluxFitResult result;
  result.map = init.map;
  result.map.m(0, 0) = lm.x(0);
  result.map.m(1, 0) = lm.x(1);
  result.map.offset_phi0 =
      Eigen::Vector2d(lm.x(2), lm.x(3)) - result.map.m.col(1) * v2_volt;
  result.map.inhomogeneity_g = lm.x(4);
  result.squid = init.squid;
  result.squid.ej1_hz = lm.x(5);
  result.squid.ej2_hz = lm.x(6);
  result.residual_norm_hz = std::sqrt(2.0 * lm.cost) * 1e6;
  result.iterations = lm.iterations;
  result.converged = lm.converged;
  result.cost_history = lm.cost_history;

  const auto [v_lo, v_hi] =
      std::minmax_element(v1_volt.begin(), v1_volt.end());
  const double span = *v_hi - *v_lo;
  result.rank_warning = std::min(std::abs(lm.x(0)), std::abs(lm.x(1))) *
                            span < 1.0;
  return result;
}

FluxFitResult fit_flux_model(const switchnet::SwitchSpec& device,
                             const SpectroscopyDataset& data,
                             const FluxFitInit& init) {
  return fit_flux_dips(device, data.f_hz, data.v1_volt, data.v2_volt,
                       extract_dips(data), init);
}

}  // namespace qsw::fluxcal
