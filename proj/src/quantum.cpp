#include "qsw/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "qsw/constants.hpp"
#include "qsw/csvio.hpp"
#include "qsw/errors.hpp"
#include "qsw/optimize.hpp"
#include "qsw/rng.hpp"

namespace qsw::quantum {

namespace {

using std::complex;

constexpr int kMaxOrder = 4;

constexpr double kChoose[5][5] = {{1, 0, 0, 0, 0},
                                  {1, 1, 0, 0, 0},
                                  {1, 2, 1, 0, 0},
                                  {1, 3, 3, 1, 0},
                                  {1, 4, 6, 4, 1}};

// Moment indices (n, m), n + m <= 4, ascending total order so the binomial
// inversion can run front to back.
const std::vector<std::pair<int, int>>& moment_keys() {
  static const std::vector<std::pair<int, int>> keys = [] {
    std::vector<std::pair<int, int>> k;
    for (int total = 0; total <= kMaxOrder; ++total) {
      for (int n = total; n >= 0; --n) k.emplace_back(n, total - n);
    }
    return k;
  }();
  return keys;
}

void validate_state(const SignalState& state) {
  switch (state.kind) {
    case StateKind::vacuum:
      return;
    case StateKind::coherent:
      if (!std::isfinite(state.alpha.real()) ||
          !std::isfinite(state.alpha.imag())) {
        throw ValidationError("coherent amplitude must be finite");
      }
      return;
    case StateKind::thermal:
      if (!(state.n_thermal >= 0.0)) {
        throw ValidationError("thermal occupation must be non-negative");
      }
      return;
    case StateKind::two_level: {
      const auto& s = state.two_level;
      if (!(s.p1 >= 0.0) || !(s.p1 <= 1.0)) {
        throw ValidationError("two-level population must lie in [0, 1]");
      }
      if (std::norm(s.coh) > s.p1 * (1.0 - s.p1) + 1e-12) {
        throw ValidationError("two-level coherence violates positivity");
      }
      return;
    }
  }
  throw UnsupportedStateError("unknown signal state kind");
}

// Husimi draw for the two-level state in polar form. The radial density
// e^{-x}(rho00 + rho11 x) in x = r^2 is an exponential/Gamma(2) mixture;
// the conditional angle density is (1 + b cos(phi - phi_c)) / 2pi with
// b <= 1 by positivity, sampled by rejection under a flat envelope.
complex<double> sample_two_level(const TwoLevelState& state, Rng& rng) {
  const double rho11 = state.p1;
  const double rho00 = 1.0 - rho11;
  double x = rng.exponential();
  if (rng.uniform() <= rho11) x += rng.exponential();
  const double r = std::sqrt(x);

  const double mag = std::abs(state.coh);
  if (mag < 1e-15) {
    const double phi = 2.0 * kPi * rng.uniform();
    return {r * std::cos(phi), r * std::sin(phi)};
  }
  const double phi_c = std::arg(state.coh);
  const double beta = std::min(1.0, 2.0 * r * mag / (rho00 + rho11 * x));
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double phi = 2.0 * kPi * rng.uniform();
    const double accept = (1.0 + beta * std::cos(phi - phi_c)) / (1.0 + beta);
    if (rng.uniform() <= accept) {
      return {r * std::cos(phi), r * std::sin(phi)};
    }
  }
  throw NonConvergenceError("angle rejection sampler failed to accept");
}

complex<double> sample_signal(const SignalState& state, Rng& rng) {
  switch (state.kind) {
    case StateKind::vacuum:
      return rng.complex_normal(1.0);
    case StateKind::coherent:
      return state.alpha + rng.complex_normal(1.0);
    case StateKind::thermal:
      return rng.complex_normal(state.n_thermal + 1.0);
    case StateKind::two_level:
      return sample_two_level(state.two_level, rng);
  }
  throw UnsupportedStateError("unknown signal state kind");
}

// Anti-normal sample moments sum_r conj(S)^n S^m per contiguous block.
struct RawBlocks {
  std::vector<std::array<complex<double>, 15>> sums;
  std::vector<std::size_t> counts;
};

RawBlocks accumulate_blocks(std::span<const complex<double>> records,
                            std::size_t n_blocks) {
  RawBlocks out;
  out.sums.assign(n_blocks, {});
  out.counts.assign(n_blocks, 0);
  const std::size_t n = records.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = i * n_blocks / n;
    const complex<double> s = records[i];
    const complex<double> c = std::conj(s);
    complex<double> s_pow[5], c_pow[5];
    s_pow[0] = c_pow[0] = 1.0;
    for (int k = 1; k <= kMaxOrder; ++k) {
      s_pow[k] = s_pow[k - 1] * s;
      c_pow[k] = c_pow[k - 1] * c;
    }
    auto& sums = out.sums[b];
    const auto& keys = moment_keys();
    for (std::size_t k = 0; k < keys.size(); ++k) {
      sums[k] += c_pow[keys[k].first] * s_pow[keys[k].second];
    }
    ++out.counts[b];
  }
  return out;
}

using MomentArray = std::array<complex<double>, 15>;

MomentArray block_means(const RawBlocks& blocks, std::ptrdiff_t skip) {
  MomentArray total{};
  std::size_t count = 0;
  for (std::size_t b = 0; b < blocks.sums.size(); ++b) {
    if (static_cast<std::ptrdiff_t>(b) == skip) continue;
    for (std::size_t k = 0; k < total.size(); ++k) {
      total[k] += blocks.sums[b][k];
    }
    count += blocks.counts[b];
  }
  for (auto& v : total) v /= static_cast<double>(count);
  return total;
}

// Solve M_raw(n,m) = sum C(n,i) C(m,j) A(i,j) N(n-i,m-j) for the normally
// ordered A, ascending in total order; N comes from the reference set.
MomentArray invert_binomial(const MomentArray& raw, const MomentArray& noise) {
  const auto& keys = moment_keys();
  auto index_of = [&](int n, int m) {
    for (std::size_t k = 0; k < keys.size(); ++k) {
      if (keys[k].first == n && keys[k].second == m) return k;
    }
    throw ValidationError("moment index out of range");
  };
  MomentArray a{};
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const int n = keys[k].first, m = keys[k].second;
    complex<double> acc = raw[k];
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= m; ++j) {
        if (i == n && j == m) continue;
        acc -= kChoose[n][i] * kChoose[m][j] * a[index_of(i, j)] *
               noise[index_of(n - i, m - j)];
      }
    }
    a[k] = (n == 0 && m == 0) ? complex<double>(1.0, 0.0) : acc;
  }
  return a;
}

std::vector<double> bin_overlaps(std::size_t n_bins, double bin_dt_s,
                                 double tau_s) {
  // Overlap of the k-th time bin with the normalized e^{-t/2tau} mode.
  std::vector<double> c(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    const double t0 = static_cast<double>(k) * bin_dt_s;
    c[k] = 2.0 * std::sqrt(tau_s / bin_dt_s) *
           (std::exp(-t0 / (2.0 * tau_s)) -
            std::exp(-(t0 + bin_dt_s) / (2.0 * tau_s)));
  }
  return c;
}

Eigen::MatrixXcd lowering_operator(int dim) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

Eigen::MatrixXcd moment_operator(const Eigen::MatrixXcd& a, int n, int m) {
  const int dim = static_cast<int>(a.rows());
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Identity(dim, dim);
  for (int i = 0; i < n; ++i) op = op * a.adjoint();
  for (int j = 0; j < m; ++j) op = op * a;
  return op;
}

// Euclidean projection onto {lambda >= 0, sum lambda = 1}.
Eigen::VectorXd project_simplex(Eigen::VectorXd lambda) {
  const int n = static_cast<int>(lambda.size());
  std::vector<double> sorted(lambda.data(), lambda.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0, theta = 0.0;
  int rank = 0;
  for (int i = 0; i < n; ++i) {
    cumulative += sorted[i];
    const double t = (cumulative - 1.0) / (i + 1);
    if (sorted[i] - t > 0.0) {
      theta = t;
      rank = i + 1;
    }
  }
  (void)rank;
  for (int i = 0; i < n; ++i) lambda(i) = std::max(lambda(i) - theta, 0.0);
  return lambda;
}

Eigen::MatrixXcd project_physical(const Eigen::MatrixXcd& rho) {
  Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm);
  Eigen::VectorXd lambda = project_simplex(eig.eigenvalues());
  return eig.eigenvectors() * lambda.asDiagonal() *
         eig.eigenvectors().adjoint();
}

}  // namespace

void validate(const SourceParams& params) {
  if (!(params.theta_rad >= 0.0) || !(params.theta_rad < 2.0 * kPi)) {
    throw ValidationError("source angle must lie in [0, 2 pi)");
  }
  if (!(params.tau_s > 0.0)) {
    throw ValidationError("emission time constant must be positive");
  }
  if (!(params.eta >= 0.0) || !(params.eta <= 1.0)) {
    throw ValidationError("routing efficiency must lie in [0, 1]");
  }
  if (!(params.dephasing_d >= 0.0) || !(params.dephasing_d <= 1.0)) {
    throw ValidationError("dephasing factor must lie in [0, 1]");
  }
}

TwoLevelState source_state(const SourceParams& params) {
  validate(params);
  const double half = 0.5 * params.theta_rad;
  TwoLevelState state;
  state.p1 = params.eta * std::sin(half) * std::sin(half);
  state.coh = params.dephasing_d * std::sqrt(params.eta) *
              std::sin(params.theta_rad) / 2.0;
  return state;
}

SignalState SignalState::make_vacuum() { return {}; }

SignalState SignalState::make_coherent(complex<double> alpha) {
  SignalState s;
  s.kind = StateKind::coherent;
  s.alpha = alpha;
  return s;
}

SignalState SignalState::make_thermal(double n_bar) {
  SignalState s;
  s.kind = StateKind::thermal;
  s.n_thermal = n_bar;
  return s;
}

SignalState SignalState::make_two_level(const TwoLevelState& state) {
  SignalState s;
  s.kind = StateKind::two_level;
  s.two_level = state;
  return s;
}

SignalState SignalState::from_source(const SourceParams& params) {
  return make_two_level(source_state(params));
}

const Moment& MomentSet::at(int n, int m) const {
  auto it = moments.find({n, m});
  if (it == moments.end()) {
    throw ValidationError("moment (n, m) not present in the set");
  }
  return it->second;
}

bool MomentSet::contains(int n, int m) const {
  return moments.count({n, m}) > 0;
}

MomentSet source_moments(const SourceParams& params) {
  const TwoLevelState state = source_state(params);
  MomentSet out;
  out.record_count = 0;
  for (const auto& [n, m] : moment_keys()) {
    complex<double> v{0.0, 0.0};
    if (n == 0 && m == 0) v = 1.0;
    if (n == 1 && m == 1) v = state.p1;
    if (n == 0 && m == 1) v = state.coh;
    if (n == 1 && m == 0) v = std::conj(state.coh);
    out.moments[{n, m}] = Moment{v, 0.0};
  }
  return out;
}

std::vector<complex<double>> synthesize_records(const SignalState& state,
                                                double n_h, std::size_t count,
                                                std::uint64_t seed) {
  if (!(n_h >= 0.0)) {
    throw ValidationError("added noise quanta must be non-negative");
  }
  if (count == 0) {
    throw ValidationError("record count must be at least 1");
  }
  validate_state(state);
  Rng rng(seed);
  std::vector<complex<double>> records(count);
  for (auto& s : records) {
    s = sample_signal(state, rng);
    if (n_h > 0.0) s += rng.complex_normal(n_h);
  }
  return records;
}

MomentSet extract_moments(std::span<const complex<double>> signal,
                          std::span<const complex<double>> reference,
                          std::size_t n_blocks, double max_std_error) {
  if (signal.empty() || reference.empty()) {
    throw ValidationError("signal and reference record sets must be non-empty");
  }
  const std::size_t blocks =
      std::min({n_blocks, signal.size(), reference.size()});
  if (blocks < 2) {
    throw ValidationError("jackknife needs at least two blocks");
  }
  const RawBlocks sig = accumulate_blocks(signal, blocks);
  const RawBlocks ref = accumulate_blocks(reference, blocks);

  const MomentArray a_full =
      invert_binomial(block_means(sig, -1), block_means(ref, -1));

  std::vector<MomentArray> a_jack(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    a_jack[b] = invert_binomial(
        block_means(sig, static_cast<std::ptrdiff_t>(b)),
        block_means(ref, static_cast<std::ptrdiff_t>(b)));
  }

  const auto& keys = moment_keys();
  MomentSet out;
  out.record_count = signal.size();
  for (std::size_t k = 0; k < keys.size(); ++k) {
    complex<double> mean{0.0, 0.0};
    for (const auto& a : a_jack) mean += a[k];
    mean /= static_cast<double>(blocks);
    double spread = 0.0;
    for (const auto& a : a_jack) spread += std::norm(a[k] - mean);
    const double se =
        std::sqrt(spread * (blocks - 1) / static_cast<double>(blocks));
    out.moments[keys[k]] = Moment{a_full[k], se};
    if (se > max_std_error) {
      throw ValidationError(
          "insufficient records: moment standard error exceeds tolerance");
    }
  }
  return out;
}

ValueWithError g2(const MomentSet& moments) {
  const Moment& n2 = moments.at(1, 1);
  const Moment& n4 = moments.at(2, 2);
  const double n_bar = n2.value.real();
  if (!(n_bar > 3.0 * n2.std_error)) {
    throw ValidationError(
        "g2 undefined: photon number below three standard errors");
  }
  const double g = n4.value.real() / (n_bar * n_bar);
  const double var =
      std::pow(n4.std_error / (n_bar * n_bar), 2) +
      std::pow(2.0 * n4.value.real() * n2.std_error / std::pow(n_bar, 3), 2);
  return {g, std::sqrt(var)};
}

BinnedRecords synthesize_binned_records(const SignalState& state, double n_h,
                                        std::size_t count, std::uint64_t seed,
                                        std::size_t n_bins, double bin_dt_s,
                                        double tau_s) {
  if (!(n_h >= 0.0) || count == 0 || n_bins == 0) {
    throw ValidationError("binned synthesis needs records, bins, and n_h >= 0");
  }
  if (!(bin_dt_s > 0.0) || !(tau_s > 0.0)) {
    throw ValidationError("bin width and time constant must be positive");
  }
  validate_state(state);
  const std::vector<double> c = bin_overlaps(n_bins, bin_dt_s, tau_s);

  BinnedRecords out;
  out.t0_s = 0.0;
  out.dt_s = bin_dt_s;
  out.samples.resize(static_cast<Eigen::Index>(count),
                     static_cast<Eigen::Index>(n_bins));
  Rng rng(seed);
  for (std::size_t r = 0; r < count; ++r) {
    const complex<double> s = sample_signal(state, rng);
    for (std::size_t k = 0; k < n_bins; ++k) {
      // The mode share of the vacuum travels with the signal draw; the
      // remainder plus amplifier noise fills the bin.
      const double residual = n_h + 1.0 - c[k] * c[k];
      out.samples(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
          c[k] * s + rng.complex_normal(residual);
    }
  }
  return out;
}

std::vector<complex<double>> matched_filter(const BinnedRecords& records,
                                            double tau_s) {
  const auto n_bins = static_cast<std::size_t>(records.samples.cols());
  if (n_bins == 0 || records.samples.rows() == 0 || !(records.dt_s > 0.0)) {
    throw ValidationError("matched filter needs non-empty binned records");
  }
  if (!(tau_s > 0.0)) {
    throw ValidationError("matched filter time constant must be positive");
  }
  const std::vector<double> c = bin_overlaps(n_bins, records.dt_s, tau_s);
  const double norm = std::inner_product(c.begin(), c.end(), c.begin(), 0.0);
  std::vector<complex<double>> out(
      static_cast<std::size_t>(records.samples.rows()));
  for (Eigen::Index r = 0; r < records.samples.rows(); ++r) {
    complex<double> acc{0.0, 0.0};
    for (std::size_t k = 0; k < n_bins; ++k) {
      acc += c[k] * records.samples(r, static_cast<Eigen::Index>(k));
    }
    out[static_cast<std::size_t>(r)] = acc / norm;
  }
  return out;
}

PowerWaveform power_waveform(const BinnedRecords& signal,
                             const BinnedRecords& reference) {
  if (signal.samples.cols() != reference.samples.cols() ||
      std::fabs(signal.t0_s - reference.t0_s) > 1e-15 ||
      std::fabs(signal.dt_s - reference.dt_s) > 1e-15 * signal.dt_s) {
    throw SchemaError("binned record sets sit on different time grids");
  }
  if (signal.samples.rows() == 0 || reference.samples.rows() == 0) {
    throw ValidationError("binned record sets must be non-empty");
  }
  const auto n_bins = static_cast<std::size_t>(signal.samples.cols());
  const double r_s = static_cast<double>(signal.samples.rows());
  const double r_r = static_cast<double>(reference.samples.rows());

  PowerWaveform out;
  out.t_s.resize(n_bins);
  out.power.resize(n_bins);
  out.std_error.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    double mean_s = 0.0, mean_r = 0.0, sq_s = 0.0, sq_r = 0.0;
    for (Eigen::Index r = 0; r < signal.samples.rows(); ++r) {
      const double p = std::norm(signal.samples(r, col));
      mean_s += p;
      sq_s += p * p;
    }
    for (Eigen::Index r = 0; r < reference.samples.rows(); ++r) {
      const double p = std::norm(reference.samples(r, col));
      mean_r += p;
      sq_r += p * p;
    }
    mean_s /= r_s;
    mean_r /= r_r;
    const double var_s = std::max(0.0, sq_s / r_s - mean_s * mean_s);
    const double var_r = std::max(0.0, sq_r / r_r - mean_r * mean_r);
    out.t_s[k] = signal.t0_s + (k + 0.5) * signal.dt_s;
    out.power[k] = mean_s - mean_r;
    out.std_error[k] = std::sqrt(var_s / r_s + var_r / r_r);
  }
  return out;
}

ValueWithError decay_time_fit(const PowerWaveform& waveform) {
  const std::size_t n = waveform.t_s.size();
  if (n < 4) {
    throw ValidationError("decay fit needs at least 4 bins");
  }
  const double peak = *std::max_element(waveform.power.begin(),
                                        waveform.power.end());
  if (!(peak > 0.0)) {
    throw ValidationError("decay fit needs positive power");
  }
  const double span = waveform.t_s.back() - waveform.t_s.front();
  double tau0 = span / 3.0;
  if (waveform.power.front() > 1e-12 && waveform.power.back() > 1e-12 &&
      waveform.power.front() > waveform.power.back()) {
    tau0 = span / std::log(waveform.power.front() / waveform.power.back());
  }

  Eigen::VectorXd x0(2);
  x0 << peak, tau0;
  auto resid = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      r(static_cast<Eigen::Index>(k)) =
          x(0) * std::exp(-(waveform.t_s[k] - waveform.t_s.front()) / x(1)) -
          waveform.power[k];
    }
    return r;
  };
  optimize::LeastSquaresOptions opt;
  opt.scale = Eigen::VectorXd(2);
  opt.scale << peak, tau0;
  auto fit = optimize::levenberg_marquardt(resid, x0, opt);
  if (!fit.converged || !(fit.x(1) > 0.0)) {
    throw NonConvergenceError("decay time fit did not converge");
  }
  return {fit.x(1), 0.0};
}

void validate(const DensityMatrix& rho) {
  if (rho.rho.rows() < 1 || rho.rho.rows() != rho.rho.cols()) {
    throw ValidationError("density matrix must be square and non-empty");
  }
  if ((rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("density matrix is not Hermitian");
  }
  if (std::abs(rho.rho.trace() - complex<double>(1.0, 0.0)) > 1e-10) {
    throw ValidationError("density matrix trace differs from one");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(
      0.5 * (rho.rho + rho.rho.adjoint()));
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw ValidationError("density matrix has a negative eigenvalue");
  }
}

DensityMatrix mle_reconstruct(const MomentSet& moments, int cutoff) {
  if (cutoff < 3) {
    throw ValidationError("reconstruction cutoff must be at least 3");
  }
  if (moments.moments.empty()) {
    throw ValidationError("moment set is empty");
  }
  for (const auto& [key, m] : moments.moments) {
    if (!std::isfinite(m.value.real()) || !std::isfinite(m.value.imag()) ||
        !std::isfinite(m.std_error)) {
      throw ValidationError("moment values and errors must be finite");
    }
  }

  const Eigen::MatrixXcd a = lowering_operator(cutoff);
  struct Target {
    Eigen::MatrixXcd op;
    complex<double> mu;
    double weight;
  };
  std::vector<Target> targets;
  double w_max = 0.0;
  for (const auto& [key, m] : moments.moments) {
    if (key.first == 0 && key.second == 0) continue;
    const double sigma = std::max(m.std_error, 1e-4);
    Target t{moment_operator(a, key.first, key.second), m.value,
             1.0 / (sigma * sigma)};
    w_max = std::max(w_max, t.weight);
    targets.push_back(std::move(t));
  }
  double lipschitz = 0.0;
  for (auto& t : targets) {
    t.weight /= w_max;  // cost rescaling only; the argmin is unchanged
    lipschitz += 2.0 * t.weight * t.op.squaredNorm();
  }

  auto cost = [&](const Eigen::MatrixXcd& rho) {
    double c = 0.0;
    for (const auto& t : targets) {
      c += t.weight * std::norm((rho * t.op).trace() - t.mu);
    }
    return c;
  };
  auto gradient = [&](const Eigen::MatrixXcd& rho) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(cutoff, cutoff);
    for (const auto& t : targets) {
      const complex<double> e = (rho * t.op).trace() - t.mu;
      g += t.weight * (std::conj(e) * t.op + e * t.op.adjoint());
    }
    return g;
  };

  Eigen::MatrixXcd rho =
      Eigen::MatrixXcd::Identity(cutoff, cutoff) / static_cast<double>(cutoff);
  double chi2 = cost(rho);
  const double gamma0 = 1.0 / lipschitz;
  double gamma = gamma0;
  bool converged = false;
  constexpr int kMaxIter = 50000;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Eigen::MatrixXcd g = gradient(rho);
    Eigen::MatrixXcd trial = project_physical(rho - gamma * g);
    double chi2_trial = cost(trial);
    int backtracks = 0;
    while (chi2_trial > chi2 && backtracks < 60) {
      gamma *= 0.5;
      trial = project_physical(rho - gamma * g);
      chi2_trial = cost(trial);
      ++backtracks;
    }
    if (chi2_trial > chi2) {  // no descent direction left
      converged = true;
      break;
    }
    const double gain = chi2 - chi2_trial;
    rho = trial;
    chi2 = chi2_trial;
    gamma = std::min(gamma * 1.3, 100.0 * gamma0);
    if (gain < 1e-10 * std::max(1.0, chi2)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NonConvergenceError("density-matrix reconstruction did not settle");
  }

  DensityMatrix out{project_physical(rho)};
  validate(out);
  return out;
}

double fidelity_to_pure(const DensityMatrix& rho, const Eigen::VectorXcd& psi) {
  if (psi.size() != rho.rho.rows()) {
    throw ValidationError("pure state dimension mismatch");
  }
  const double norm2 = psi.squaredNorm();
  if (!(norm2 > 0.0)) {
    throw ValidationError("pure state must be non-zero");
  }
  const double f = ((psi.adjoint() * rho.rho * psi)(0, 0).real()) / norm2;
  return std::clamp(f, 0.0, 1.0);
}

double wigner_point(const DensityMatrix& rho, complex<double> alpha) {
  const int dim = rho.dim();
  const int pad = dim + 10;
  const Eigen::MatrixXcd a = lowering_operator(pad);
  // D(alpha) = exp(alpha a+ - alpha* a) through the Hermitian generator.
  const Eigen::MatrixXcd b =
      complex<double>(0.0, -1.0) * (alpha * a.adjoint() - std::conj(alpha) * a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(b);
  Eigen::VectorXcd phases(pad);
  for (int i = 0; i < pad; ++i) {
    phases(i) = std::exp(complex<double>(0.0, eig.eigenvalues()(i)));
  }
  const Eigen::MatrixXcd disp =
      eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();

  Eigen::MatrixXcd rho_pad = Eigen::MatrixXcd::Zero(pad, pad);
  rho_pad.topLeftCorner(dim, dim) = rho.rho;
  const Eigen::MatrixXcd shifted = disp.adjoint() * rho_pad * disp;
  complex<double> parity{0.0, 0.0};
  double sign = 1.0;
  for (int n = 0; n < pad; ++n) {
    parity += sign * shifted(n, n);
    sign = -sign;
  }
  if (std::fabs(parity.imag()) > 1e-10) {
    throw ValidationError("quasi-probability came out complex");
  }
  return (2.0 / kPi) * parity.real();
}

WignerField wigner(const DensityMatrix& rho,
                   std::span<const complex<double>> alphas) {
  validate(rho);
  WignerField out;
  out.alpha.assign(alphas.begin(), alphas.end());
  out.value.resize(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (std::norm(alphas[i]) > rho.dim() / 2.0) {
      out.truncation_warning = true;
    }
    out.value[i] = wigner_point(rho, alphas[i]);
  }
  return out;
}

double calibrate_gain(std::span<const double> ideal,
                      std::span<const double> extracted) {
  if (ideal.size() != extracted.size() || ideal.empty()) {
    throw ValidationError("gain calibration needs matching non-empty sweeps");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ideal.size(); ++i) {
    num += ideal[i] * extracted[i];
    den += ideal[i] * ideal[i];
  }
  if (!(den > 0.0)) {
    throw ValidationError("gain calibration needs a non-zero ideal sweep");
  }
  return num / den;
}

MomentSet apply_gain(const MomentSet& moments, double gain) {
  if (!(gain > 0.0)) {
    throw ValidationError("gain must be positive");
  }
  MomentSet out = moments;
  for (auto& [key, m] : out.moments) {
    const double scale =
        std::pow(gain, -0.5 * static_cast<double>(key.first + key.second));
    m.value *= scale;
    m.std_error *= scale;
  }
  return out;
}

std::string moments_to_json(const MomentSet& moments) {
  nlohmann::ordered_json j;
  j["record_count"] = moments.record_count;
  nlohmann::ordered_json entries;
  for (const auto& [key, m] : moments.moments) {
    nlohmann::ordered_json e;
    e["re"] = m.value.real();
    e["im"] = m.value.imag();
    e["std_error"] = m.std_error;
    entries["m_" + std::to_string(key.first) + "_" +
            std::to_string(key.second)] = e;
  }
  j["moments"] = entries;
  return j.dump(2);
}

std::string density_to_json(const DensityMatrix& rho) {
  nlohmann::ordered_json j;
  j["dim"] = rho.dim();
  nlohmann::ordered_json elements = nlohmann::ordered_json::array();
  for (int r = 0; r < rho.dim(); ++r) {
    for (int c = 0; c < rho.dim(); ++c) {
      elements.push_back({rho.rho(r, c).real(), rho.rho(r, c).imag()});
    }
  }
  j["elements_row_major"] = elements;
  return j.dump(2);
}

void write_records_csv(const std::string& path,
                       std::span<const complex<double>> records,
                       const std::vector<std::string>& comments) {
  csvio::Table table;
  table.comments = comments;
  table.header = {"shot_index", "re", "im"};
  table.rows.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    table.rows.push_back(
        {static_cast<double>(i), records[i].real(), records[i].imag()});
  }
  csvio::write_csv(path, table);
}

std::vector<complex<double>> read_records_csv(const std::string& path) {
  const csvio::Table table = csvio::read_csv(path, {"shot_index", "re", "im"});
  std::vector<complex<double>> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    out.emplace_back(row[1], row[2]);
  }
  return out;
}

}  // namespace qsw::quantum
