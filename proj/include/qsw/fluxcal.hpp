#pragma once

#include <string>
#include <vector>

#include "qsw/switchnet.hpp"

namespace qsw::fluxcal {

// Linear coil-voltage to SQUID-flux conversion with a shared per-loop flux
// gradient. Fluxes in Phi0, voltages in volt.
struct FluxMap {
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();  // Phi0 per volt
  Eigen::Vector2d offset_phi0 = Eigen::Vector2d::Zero();
  double inhomogeneity_g = 0.0;  // flux gradient per loop index
};

// Phi = M V + offset, componentwise in Phi0.
Eigen::Vector2d flux_from_voltages(const FluxMap& map,
                                   const Eigen::Vector2d& v_volt);

// Per-loop flux Phi_k = Phi (1 + g (k - (N-1)/2)); loop inductances add in
// series, so the array energy is the harmonic mean N / sum_k 1/E_J(Phi_k).
// Even in g; reduces to ej_of_flux at g = 0.
double effective_ej_with_inhomogeneity(const elements::SquidArraySpec& spec,
                                       double phi_mean, double g);

// One V1 sweep at fixed V2: |S12|^2 over a shared frequency grid.
struct SpectroscopyDataset {
  std::vector<double> v1_volt;
  double v2_volt = 0.0;
  std::vector<double> f_hz;                 // ascending
  std::vector<std::vector<double>> s12_sq;  // [v1 index][f index]
};

// Checks finiteness, grid ordering, and |S12|^2 within [0, 1.1].
void validate(const SpectroscopyDataset& data);

SpectroscopyDataset simulate_flux_map(const switchnet::SwitchSpec& device,
                                      const FluxMap& map,
                                      const std::vector<double>& v1_volt,
                                      double v2_volt,
                                      const std::vector<double>& f_hz);

// Columns V1,V2,f_Hz,S12_sq; one row per (voltage, frequency) sample.
void write_dataset_csv(const SpectroscopyDataset& data,
                       const std::string& path,
                       const std::vector<std::string>& comments = {});
SpectroscopyDataset read_dataset_csv(const std::string& path);

// Local minimum of a spectrum, refined to sub-grid accuracy by a parabola
// through the three bracketing samples.
struct DipObservation {
  int v_index = 0;
  double f_hz = 0.0;
  double depth = 0.0;  // |S12|^2 at the refined minimum's center bin
};

// One observation per contiguous run of samples below threshold_rel times
// the spectrum maximum of the same voltage point, taken at the run's
// deepest sample. Runs that only graze the cutoff (deepest sample above
// 0.9 of it) or whose minimum sits on the grid boundary are dropped. Dip
// positions are invariant under positive rescaling of the whole dataset.
std::vector<DipObservation> extract_dips(const SpectroscopyDataset& data,
                                         double threshold_rel = 0.5);

struct FluxFitInit {
  FluxMap map;
  elements::SquidArraySpec squid;
};

// Fitted quantities: M column 0, offsets, g, and the two junction energies
// (shared by both arrays). M column 1 cannot be constrained by a single V1
// sweep and is carried over from the initial guess; offsets absorb its
// contribution at the sweep's fixed V2.
struct FluxFitResult {
  FluxMap map;
  elements::SquidArraySpec squid;
  double residual_norm_hz = 0.0;
  int iterations = 0;
  bool converged = false;
  bool rank_warning = false;  // fitted flux span below one period
  std::vector<double> cost_history;
};

// Least-squares fit of modeled to observed dip frequencies with
// nearest-resonator assignment. Model dips come from the same grid-and-
// parabola reduction as extract_dips, so a noiseless round trip has zero
// residual at the true parameters. Throws NonConvergenceError.
FluxFitResult fit_flux_dips(const switchnet::SwitchSpec& device,
                            const std::vector<double>& f_grid,
                            const std::vector<double>& v1_volt, double v2_volt,
                            const std::vector<DipObservation>& dips,
                            const FluxFitInit& init);

// Convenience wrapper: extracts dips from the dataset, then fits.
FluxFitResult fit_flux_model(const switchnet::SwitchSpec& device,
                             const SpectroscopyDataset& data,
                             const FluxFitInit& init);

}  // namespace qsw::fluxcal
