#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qsw::quantum {

// Phenomenological emitter: preparation angle, exponential emission mode
// (power decay constant tau), routing efficiency, and a dephasing factor
// that scales the coherence only.
struct SourceParams {
  double theta_rad = 0.0;
  double tau_s = 90e-9;
  double eta = 0.98;
  double dephasing_d = 1.0;
};

void validate(const SourceParams& params);

// Emitted-mode state restricted to the {|0>, |1>} subspace.
// coh = <1|rho|0> = <a>; positivity requires |coh|^2 <= p1 (1 - p1).
struct TwoLevelState {
  double p1 = 0.0;
  std::complex<double> coh{0.0, 0.0};
};

TwoLevelState source_state(const SourceParams& params);

enum class StateKind { vacuum, coherent, thermal, two_level };

struct SignalState {
  StateKind kind = StateKind::vacuum;
  std::complex<double> alpha{0.0, 0.0};
  double n_thermal = 0.0;
  TwoLevelState two_level;

  static SignalState make_vacuum();
  static SignalState make_coherent(std::complex<double> alpha);
  static SignalState make_thermal(double n_bar);
  static SignalState make_two_level(const TwoLevelState& state);
  static SignalState from_source(const SourceParams& params);
};

struct Moment {
  std::complex<double> value{0.0, 0.0};
  double std_error = 0.0;
};

// Normally ordered moments <(a+)^n a^m> for n + m <= 4.
struct MomentSet {
  std::map<std::pair<int, int>, Moment> moments;
  std::size_t record_count = 0;

  const Moment& at(int n, int m) const;
  bool contains(int n, int m) const;
};

// Ideal moments of the source family; zero standard errors.
MomentSet source_moments(const SourceParams& params);

// One complex heterodyne sample per shot: the signal mode's Husimi-
// distributed amplitude plus a circular Gaussian of variance n_h per
// complex sample. The Husimi draw already carries the vacuum quantum, so
// the total added-noise power above the signal photon number is n_h + 1
// ((n_h + 1)/2 per quadrature).
std::vector<std::complex<double>> synthesize_records(const SignalState& state,
                                                     double n_h,
                                                     std::size_t count,
                                                     std::uint64_t seed);

// Binomial inversion of anti-normally ordered sample moments against the
// reference set, jackknife errors over contiguous blocks.
MomentSet extract_moments(
    std::span<const std::complex<double>> signal,
    std::span<const std::complex<double>> reference, std::size_t n_blocks = 50,
    double max_std_error = std::numeric_limits<double>::infinity());

struct ValueWithError {
  double value = 0.0;
  double std_error = 0.0;
};

// <(a+)^2 a^2> / <a+a>^2 with first-order error propagation. Requires
// <a+a> to exceed three times its standard error.
ValueWithError g2(const MomentSet& moments);

// Per-shot time-binned samples, bins of width dt starting at t0.
struct BinnedRecords {
  double t0_s = 0.0;
  double dt_s = 0.0;
  Eigen::MatrixXcd samples;  // shots x bins
};

// Spreads each shot's signal draw over the exponential emission mode and
// fills the per-bin remainder with noise, so the matched filter recovers
// single-shot statistics and bin powers sum to the photon number.
BinnedRecords synthesize_binned_records(const SignalState& state, double n_h,
                                        std::size_t count, std::uint64_t seed,
                                        std::size_t n_bins, double bin_dt_s,
                                        double tau_s);

std::vector<std::complex<double>> matched_filter(const BinnedRecords& records,
                                                 double tau_s);

struct PowerWaveform {
  std::vector<double> t_s;
  std::vector<double> power;      // photons per bin above the noise floor
  std::vector<double> std_error;
};

PowerWaveform power_waveform(const BinnedRecords& signal,
                             const BinnedRecords& reference);

// a exp(-t/tau) least squares; returns tau in seconds.
ValueWithError decay_time_fit(const PowerWaveform& waveform);

struct DensityMatrix {
  Eigen::MatrixXcd rho;
  int dim() const { return static_cast<int>(rho.rows()); }
};

// Hermitian within 1e-10, unit trace within 1e-10, eigenvalues >= -1e-10.
void validate(const DensityMatrix& rho);

// Gaussian-likelihood fit over physical density matrices by projected
// gradient descent; stops when the cost gain per step drops below 1e-10
// relatively.
DensityMatrix mle_reconstruct(const MomentSet& moments, int cutoff = 5);

double fidelity_to_pure(const DensityMatrix& rho,
                        const Eigen::VectorXcd& psi);

struct WignerField {
  std::vector<std::complex<double>> alpha;
  std::vector<double> value;
  bool truncation_warning = false;  // some |alpha|^2 > dim / 2
};

WignerField wigner(const DensityMatrix& rho,
                   std::span<const std::complex<double>> alphas);
double wigner_point(const DensityMatrix& rho, std::complex<double> alpha);

// Scalar detection gain: least squares of extracted photon numbers against
// the ideal theta dependence; apply_gain rescales a MomentSet by
// gain^{(n+m)/2} once the gain is frozen.
double calibrate_gain(std::span<const double> ideal,
                      std::span<const double> extracted);
MomentSet apply_gain(const MomentSet& moments, double gain);

std::string moments_to_json(const MomentSet& moments);
std::string density_to_json(const DensityMatrix& rho);

void write_records_csv(const std::string& path,
                       std::span<const std::complex<double>> records,
                       const std::vector<std::string>& comments = {});
std::vector<std::complex<double>> read_records_csv(const std::string& path);

}  // namespace qsw::quantum
