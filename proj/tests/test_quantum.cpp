#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "qsw/constants.hpp"
#include "qsw/errors.hpp"
#include "qsw/quantum.hpp"

using namespace qsw::quantum;
using Complexd = std::complex<double>;
using qsw::kPi;

namespace {

// n-th Fock state in a given dimension.
Eigen::VectorXcd fock(int n, int dim) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(n) = 1.0;
  return v;
}

DensityMatrix pure(const Eigen::VectorXcd& psi) {
  DensityMatrix rho;
  rho.rho = psi * psi.adjoint();
  return rho;
}

bool close(const Moment& m, Complexd truth, double n_sigma) {
  return std::abs(m.value - truth) <= n_sigma * std::max(m.std_error, 1e-12);
}

}  // namespace

TEST_CASE("source state follows the preparation angle") {
  SourceParams params;
  params.theta_rad = kPi;
  params.eta = 0.98;
  params.dephasing_d = 0.86;
  auto state = source_state(params);
  CHECK(state.p1 == doctest::Approx(0.98).epsilon(1e-12));
  CHECK(std::abs(state.coh) < 1e-12);

  params.theta_rad = kPi / 2.0;
  state = source_state(params);
  CHECK(state.p1 == doctest::Approx(0.49).epsilon(1e-12));
  CHECK(std::abs(state.coh) ==
        doctest::Approx(0.86 * std::sqrt(0.98) * 0.5).epsilon(1e-12));

  const auto moments = source_moments(params);
  CHECK(moments.at(1, 1).value.real() == doctest::Approx(0.49).epsilon(1e-12));
  CHECK(std::abs(moments.at(0, 1).value - state.coh) < 1e-14);
  CHECK(std::abs(moments.at(2, 2).value) < 1e-14);
  CHECK(moments.at(0, 0).value.real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("source validation rejects non-physical parameters") {
  SourceParams params;
  params.eta = 1.4;
  CHECK_THROWS_AS(validate(params), qsw::ValidationError);
  params = SourceParams{};
  params.dephasing_d = -0.1;
  CHECK_THROWS_AS(validate(params), qsw::ValidationError);

  TwoLevelState bad;
  bad.p1 = 0.5;
  bad.coh = 0.7;  // |coh|^2 > p1 (1 - p1)
  CHECK_THROWS_AS(
      (void)synthesize_records(SignalState::make_two_level(bad), 1.0, 10, 1),
      qsw::ValidationError);
}

TEST_CASE("record synthesis is seeded and deterministic") {
  const auto state = SignalState::make_coherent(Complexd(0.4, -0.2));
  const auto a = synthesize_records(state, 2.0, 500, 42);
  const auto b = synthesize_records(state, 2.0, 500, 42);
  const auto c = synthesize_records(state, 2.0, 500, 43);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.size() == 500);
}

TEST_CASE("moment inversion recovers coherent-state moments") {
  const Complexd alpha(0.7, 0.3);
  const auto signal =
      synthesize_records(SignalState::make_coherent(alpha), 1.5, 200000, 7);
  const auto reference =
      synthesize_records(SignalState::make_vacuum(), 1.5, 200000, 8);
  const auto m = extract_moments(signal, reference);

  CHECK(m.record_count == 200000);
  CHECK(close(m.at(0, 1), alpha, 5.0));
  CHECK(close(m.at(1, 1), std::norm(alpha), 5.0));
  CHECK(close(m.at(0, 2), alpha * alpha, 5.0));
  CHECK(close(m.at(2, 2), std::norm(alpha) * std::norm(alpha), 5.0));

  const auto g = g2(m);
  CHECK(std::abs(g.value - 1.0) <= 5.0 * g.std_error);
}

TEST_CASE("moment inversion recovers thermal-state moments") {
  const double n_bar = 0.8;
  const auto signal =
      synthesize_records(SignalState::make_thermal(n_bar), 2.0, 200000, 11);
  const auto reference =
      synthesize_records(SignalState::make_vacuum(), 2.0, 200000, 12);
  const auto m = extract_moments(signal, reference);
  CHECK(close(m.at(1, 1), n_bar, 5.0));
  CHECK(close(m.at(2, 2), 2.0 * n_bar * n_bar, 5.0));
  CHECK(close(m.at(0, 1), 0.0, 5.0));
}

TEST_CASE("two-level emission shows vanishing pair correlation") {
  SourceParams params;
  params.theta_rad = kPi;
  const auto state = SignalState::from_source(params);
  const auto signal = synthesize_records(state, 1.0, 200000, 21);
  const auto reference =
      synthesize_records(SignalState::make_vacuum(), 1.0, 200000, 22);
  const auto m = extract_moments(signal, reference);
  CHECK(close(m.at(1, 1), 0.98, 5.0));
  CHECK(close(m.at(2, 2), 0.0, 5.0));
  const auto g = g2(m);
  CHECK(std::abs(g.value) <= 5.0 * g.std_error);
}

TEST_CASE("identical signal and reference invert to the vacuum") {
  const auto signal =
      synthesize_records(SignalState::make_vacuum(), 2.0, 100000, 31);
  const auto reference =
      synthesize_records(SignalState::make_vacuum(), 2.0, 100000, 32);
  const auto m = extract_moments(signal, reference);
  for (int n = 0; n <= 2; ++n) {
    for (int mm = 0; mm <= 2; ++mm) {
      if (n + mm == 0 || n + mm > 4) continue;
      CHECK(close(m.at(n, mm), 0.0, 5.0));
    }
  }
}

TEST_CASE("added detection noise does not bias the inversion") {
  const Complexd alpha(0.5, 0.0);
  for (double n_h : {0.0, 3.0}) {
    const auto signal = synthesize_records(SignalState::make_coherent(alpha),
                                           n_h, 150000, 41);
    const auto reference =
        synthesize_records(SignalState::make_vacuum(), n_h, 150000, 42);
    const auto m = extract_moments(signal, reference);
    CHECK(close(m.at(1, 1), std::norm(alpha), 5.0));
  }
}

TEST_CASE("jackknife errors shrink as one over sqrt records") {
  const auto state = SignalState::make_thermal(0.5);
  const auto ref_state = SignalState::make_vacuum();
  const auto se_at = [&](std::size_t count, std::uint64_t seed) {
    const auto m =
        extract_moments(synthesize_records(state, 2.0, count, seed),
                        synthesize_records(ref_state, 2.0, count, seed + 1));
    return m.at(1, 1).std_error;
  };
  const double r = se_at(10000, 51) / se_at(40000, 53);
  CHECK(r > 1.3);
  CHECK(r < 3.1);
}

TEST_CASE("moment preconditions raise typed errors") {
  const auto signal =
      synthesize_records(SignalState::make_vacuum(), 2.0, 5000, 61);
  const auto reference =
      synthesize_records(SignalState::make_vacuum(), 2.0, 5000, 62);
  CHECK_THROWS_AS((void)extract_moments(signal, reference, 50, 1e-9),
                  qsw::ValidationError);
  const auto m = extract_moments(signal, reference);
  CHECK_THROWS_AS((void)g2(m), qsw::ValidationError);
}

TEST_CASE("binned records: matched filter power difference equals n") {
  SourceParams params;
  params.theta_rad = kPi;
  const auto state = SignalState::from_source(params);
  const std::size_t shots = 60000, bins = 40;
  const double bin_dt = 10e-9, tau = 90e-9;
  const auto sig =
      synthesize_binned_records(state, 2.0, shots, 71, bins, bin_dt, tau);
  const auto ref = synthesize_binned_records(SignalState::make_vacuum(), 2.0,
                                             shots, 72, bins, bin_dt, tau);
  CHECK(sig.samples.rows() == static_cast<Eigen::Index>(shots));
  CHECK(sig.samples.cols() == static_cast<Eigen::Index>(bins));

  const auto mf_sig = matched_filter(sig, tau);
  const auto mf_ref = matched_filter(ref, tau);
  double p_sig = 0.0, p_ref = 0.0;
  for (std::size_t i = 0; i < shots; ++i) {
    p_sig += std::norm(mf_sig[i]);
    p_ref += std::norm(mf_ref[i]);
  }
  p_sig /= static_cast<double>(shots);
  p_ref /= static_cast<double>(shots);
  // Extra filtered power above the reference is the signal photon number.
  CHECK(p_sig - p_ref == doctest::Approx(0.98).epsilon(0.1));
}

TEST_CASE("power waveform decays with the emission time constant") {
  SourceParams params;
  params.theta_rad = kPi;
  const auto state = SignalState::from_source(params);
  const std::size_t shots = 100000, bins = 40;
  const double bin_dt = 10e-9, tau = 90e-9;
  const auto sig =
      synthesize_binned_records(state, 2.0, shots, 81, bins, bin_dt, tau);
  const auto ref = synthesize_binned_records(SignalState::make_vacuum(), 2.0,
                                             shots, 82, bins, bin_dt, tau);
  const auto wave = power_waveform(sig, ref);
  REQUIRE(wave.power.size() == bins);

  double total = 0.0;
  for (double p : wave.power) total += p;
  CHECK(total == doctest::Approx(0.98).epsilon(0.1));

  const auto fit = decay_time_fit(wave);
  CHECK(fit.value == doctest::Approx(tau).epsilon(0.07));
}

TEST_CASE("mle reconstructs ideal states from exact moments") {
  SourceParams params;
  params.theta_rad = kPi;
  params.eta = 1.0;
  const auto rho1 = mle_reconstruct(source_moments(params), 5);
  CHECK(rho1.rho(1, 1).real() >= 0.99);
  CHECK(fidelity_to_pure(rho1, fock(1, 5)) >= 0.99);

  params.theta_rad = 0.0;
  const auto rho0 = mle_reconstruct(source_moments(params), 5);
  CHECK(rho0.rho(0, 0).real() >= 0.999);

  params.theta_rad = kPi / 2.0;
  params.dephasing_d = 1.0;
  const auto rho_plus = mle_reconstruct(source_moments(params), 5);
  Eigen::VectorXcd target = Eigen::VectorXcd::Zero(5);
  target(0) = std::cos(kPi / 4.0);
  target(1) = std::sin(kPi / 4.0);
  CHECK(fidelity_to_pure(rho_plus, target) >= 0.99);
}

TEST_CASE("density matrix validation") {
  DensityMatrix rho = pure(fock(0, 4));
  CHECK_NOTHROW(validate(rho));
  rho.rho(0, 0) = 1.2;
  CHECK_THROWS_AS(validate(rho), qsw::ValidationError);
  rho = pure(fock(0, 4));
  rho.rho(0, 1) = 0.3;  // breaks hermiticity
  CHECK_THROWS_AS(validate(rho), qsw::ValidationError);
}

TEST_CASE("wigner values at the origin and normalization") {
  const auto rho0 = pure(fock(0, 6));
  const auto rho1 = pure(fock(1, 6));
  CHECK(wigner_point(rho0, Complexd(0.0, 0.0)) ==
        doctest::Approx(2.0 / kPi).epsilon(1e-9));
  CHECK(wigner_point(rho1, Complexd(0.0, 0.0)) ==
        doctest::Approx(-2.0 / kPi).epsilon(1e-9));

  // Displaced vacuum: peak value at alpha.
  const Complexd alpha(0.8, -0.5);
  Eigen::VectorXcd coh = Eigen::VectorXcd::Zero(18);
  double nf = 1.0;
  for (int n = 0; n < 18; ++n) {
    coh(n) = std::exp(-0.5 * std::norm(alpha)) * std::pow(alpha, n) / nf;
    nf *= std::sqrt(n + 1.0);
  }
  coh.normalize();
  CHECK(wigner_point(pure(coh), alpha) ==
        doctest::Approx(2.0 / kPi).epsilon(1e-6));

  // Grid integral of W is one, and |W| respects the global bound. The
  // basis must extend past twice the largest grid |alpha|^2 (18 here) for
  // the displaced expansion to hold across the whole grid.
  const int half = 30;
  const double step = 0.1;
  std::vector<Complexd> grid;
  for (int i = -half; i <= half; ++i) {
    for (int j = -half; j <= half; ++j) {
      grid.push_back(Complexd(step * i, step * j));
    }
  }
  const auto field = wigner(pure(fock(1, 45)), grid);
  double integral = 0.0;
  double peak = 0.0;
  for (double v : field.value) {
    integral += v * step * step;
    peak = std::max(peak, std::abs(v));
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(0.01));
  CHECK(peak <= 2.0 / kPi + 1e-9);
  CHECK_FALSE(field.truncation_warning);

  // Far points exceed the reliable radius of the truncated basis.
  const std::vector<Complexd> far{Complexd(3.0, 0.0)};
  CHECK(wigner(pure(fock(0, 4)), far).truncation_warning);
}

TEST_CASE("gain calibration and moment rescaling") {
  const std::vector<double> ideal{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> extracted;
  for (double v : ideal) extracted.push_back(2.0 * v);
  CHECK(calibrate_gain(ideal, extracted) == doctest::Approx(2.0).epsilon(1e-12));

  MomentSet m;
  m.moments[{0, 1}] = Moment{Complexd(0.6, 0.0), 0.1};
  m.moments[{1, 1}] = Moment{Complexd(0.9, 0.0), 0.2};
  const auto scaled = apply_gain(m, 4.0);
  CHECK(scaled.at(0, 1).value.real() == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(scaled.at(0, 1).std_error == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(scaled.at(1, 1).value.real() == doctest::Approx(0.225).epsilon(1e-12));
}

TEST_CASE("json emission carries moments and matrices") {
  MomentSet m;
  m.record_count = 123;
  m.moments[{1, 1}] = Moment{Complexd(0.5, -0.25), 0.01};
  const auto j = nlohmann::json::parse(moments_to_json(m));
  CHECK(j["record_count"].get<std::size_t>() == 123);
  CHECK(j["moments"]["m_1_1"]["re"].get<double>() == doctest::Approx(0.5));
  CHECK(j["moments"]["m_1_1"]["im"].get<double>() == doctest::Approx(-0.25));
  CHECK(j["moments"]["m_1_1"]["std_error"].get<double>() ==
        doctest::Approx(0.01));

  const auto rho = pure(fock(1, 3));
  const auto jr = nlohmann::json::parse(density_to_json(rho));
  CHECK(jr["dim"].get<int>() == 3);
  CHECK(jr["elements_row_major"].size() == 9);
}

TEST_CASE("records csv round trip") {
  const auto records =
      synthesize_records(SignalState::make_thermal(0.3), 1.0, 200, 91);
  const auto dir =
      std::filesystem::temp_directory_path() / "qsw_quantum_tests";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "records.csv").string();
  write_records_csv(path, records, {"seed=91"});
  const auto back = read_records_csv(path);
  REQUIRE(back.size() == records.size());
  CHECK(back == records);
}
