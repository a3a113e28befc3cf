#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qsw/errors.hpp"
#include "qsw/fluxcal.hpp"

using namespace qsw::fluxcal;
using qsw::elements::SquidArraySpec;

namespace {

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "qsw_fluxcal_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

qsw::switchnet::SwitchSpec test_device() {
  qsw::switchnet::SwitchSpec spec;
  spec.hybrid.kind = qsw::elements::HybridKind::ideal;
  spec.resonator_a = qsw::elements::calibrate_resonator(SquidArraySpec{},
                                                        8.30e9, 3.05e8);
  spec.resonator_b = spec.resonator_a;
  return spec;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> x(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) x[i] = lo + (hi - lo) * i / (n - 1);
  return x;
}

FluxMap true_map() {
  FluxMap map;
  map.m << 0.9, 0.2, 0.6, 0.8;
  map.offset_phi0 << 0.03, -0.05;
  map.inhomogeneity_g = 0.02;
  return map;
}

}  // namespace

TEST_CASE("flux from voltages is the affine map") {
  FluxMap map = true_map();
  const Eigen::Vector2d v(0.4, -0.2);
  const Eigen::Vector2d phi = flux_from_voltages(map, v);
  CHECK(phi(0) == doctest::Approx(0.9 * 0.4 + 0.2 * -0.2 + 0.03).epsilon(1e-14));
  CHECK(phi(1) == doctest::Approx(0.6 * 0.4 + 0.8 * -0.2 - 0.05).epsilon(1e-14));
}

TEST_CASE("inhomogeneous array energy: frozen value, parity, g = 0 limit") {
  SquidArraySpec squid;
  CHECK(effective_ej_with_inhomogeneity(squid, 2.0, 0.05) ==
        doctest::Approx(2342618983193.5996).epsilon(1e-12));
  CHECK(effective_ej_with_inhomogeneity(squid, 1.3, 0.03) ==
        doctest::Approx(effective_ej_with_inhomogeneity(squid, 1.3, -0.03))
            .epsilon(1e-12));
  CHECK(effective_ej_with_inhomogeneity(squid, 0.37, 0.0) ==
        doctest::Approx(qsw::elements::ej_of_flux(squid, 0.37)).epsilon(1e-14));
}

TEST_CASE("dataset validation rejects malformed inputs") {
  SpectroscopyDataset data;
  data.v1_volt = {0.0, 0.1};
  data.f_hz = {6.0e9, 6.1e9, 6.2e9};
  data.s12_sq = {{1.0, 0.5, 1.0}, {1.0, 0.4, 1.0}};
  CHECK_NOTHROW(validate(data));

  auto bad = data;
  bad.f_hz = {6.1e9, 6.0e9, 6.2e9};
  CHECK_THROWS_AS(validate(bad), qsw::ValidationError);

  bad = data;
  bad.s12_sq[1][2] = 1.5;
  CHECK_THROWS_AS(validate(bad), qsw::ValidationError);

  bad = data;
  bad.s12_sq[0][0] = std::nan("");
  CHECK_THROWS_AS(validate(bad), qsw::ValidationError);
}

TEST_CASE("simulated map has the right shape and stays in range") {
  const auto device = test_device();
  const auto data = simulate_flux_map(device, true_map(),
                                      linspace(-0.5, 0.5, 5), 0.15,
                                      linspace(5.4e9, 7.6e9, 61));
  CHECK(data.s12_sq.size() == 5);
  CHECK(data.s12_sq[0].size() == 61);
  for (const auto& row : data.s12_sq) {
    for (double s : row) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("dataset csv round trip is exact") {
  const auto device = test_device();
  const auto data = simulate_flux_map(device, true_map(),
                                      linspace(-0.3, 0.3, 3), 0.15,
                                      linspace(5.8e9, 7.4e9, 41));
  const auto path = (temp_dir() / "roundtrip.csv").string();
  write_dataset_csv(data, path, {"config_hash=deadbeef", "seed=7"});
  const auto back = read_dataset_csv(path);
  REQUIRE(back.v1_volt.size() == data.v1_volt.size());
  REQUIRE(back.f_hz.size() == data.f_hz.size());
  CHECK(back.v2_volt == data.v2_volt);
  double worst = 0.0;
  for (size_t i = 0; i < data.v1_volt.size(); ++i) {
    for (size_t j = 0; j < data.f_hz.size(); ++j) {
      worst = std::max(worst,
                       std::abs(back.s12_sq[i][j] - data.s12_sq[i][j]));
    }
  }
  CHECK(worst == 0.0);
  CHECK(back.f_hz == data.f_hz);
}

TEST_CASE("csv reader names the missing column") {
  const auto path = (temp_dir() / "bad_header.csv").string();
  {
    std::ofstream out(path);
    out << "V1,V2,f_Hz\n0,0,6e9\n";
  }
  try {
    (void)read_dataset_csv(path);
    FAIL("expected a schema error");
  } catch (const qsw::SchemaError& e) {
    CHECK(std::string(e.what()).find("S12_sq") != std::string::npos);
  }
}

TEST_CASE("dip extraction refines minima and ignores rescaling") {
  SpectroscopyDataset data;
  data.v1_volt = {0.0, 0.1};
  data.v2_volt = 0.0;
  data.f_hz = linspace(6.0e9, 8.0e9, 101);
  const double w = 1.0e8;
  // Centers deliberately off the grid midpoints: a dip landing exactly
  // halfway between samples has two equal bracketing values and no strict
  // local minimum.
  const std::vector<double> centers{6.733e9, 7.4065e9};
  for (double f0 : centers) {
    std::vector<double> row(data.f_hz.size());
    for (size_t j = 0; j < row.size(); ++j) {
      const double df = data.f_hz[j] - f0;
      row[j] = 1.0 - 0.9 / (1.0 + 4.0 * df * df / (w * w));
    }
    data.s12_sq.push_back(row);
  }

  const auto dips = extract_dips(data);
  REQUIRE(dips.size() == 2);
  for (size_t k = 0; k < 2; ++k) {
    CHECK(dips[k].v_index == static_cast<int>(k));
    CHECK(std::abs(dips[k].f_hz - centers[k]) < 2e6);
    CHECK(dips[k].depth < 0.5);
  }

  auto scaled = data;
  for (auto& row : scaled.s12_sq) {
    for (double& s : row) s *= 0.3;
  }
  const auto dips2 = extract_dips(scaled);
  REQUIRE(dips2.size() == 2);
  CHECK(dips2[0].f_hz == doctest::Approx(dips[0].f_hz).epsilon(1e-9));
  CHECK(dips2[1].f_hz == doctest::Approx(dips[1].f_hz).epsilon(1e-9));
}

TEST_CASE("noiseless generate-then-fit recovers the model exactly") {
  const auto device = test_device();
  const auto v1 = linspace(-1.0, 1.0, 17);
  const auto f = linspace(5.2e9, 7.8e9, 181);
  const auto data = simulate_flux_map(device, true_map(), v1, 0.15, f);

  FluxFitInit init;
  init.map = true_map();
  init.map.m(0, 0) *= 1.03;
  init.map.m(1, 0) *= 0.96;
  init.map.offset_phi0(0) += 0.01;
  init.map.offset_phi0(1) -= 0.01;
  init.map.inhomogeneity_g *= 1.5;
  init.squid = SquidArraySpec{};
  init.squid.ej1_hz *= 1.04;
  init.squid.ej2_hz *= 0.97;

  const auto fit = fit_flux_model(device, data, init);
  CHECK(fit.converged);
  CHECK_FALSE(fit.rank_warning);

  const auto truth = true_map();
  CHECK(fit.map.m(0, 0) == doctest::Approx(truth.m(0, 0)).epsilon(1e-3));
  CHECK(fit.map.m(1, 0) == doctest::Approx(truth.m(1, 0)).epsilon(1e-3));
  CHECK(fit.map.offset_phi0(0) ==
        doctest::Approx(truth.offset_phi0(0)).epsilon(1e-3));
  CHECK(fit.map.offset_phi0(1) ==
        doctest::Approx(truth.offset_phi0(1)).epsilon(1e-3));
  CHECK(fit.map.inhomogeneity_g ==
        doctest::Approx(truth.inhomogeneity_g).epsilon(1e-3));
  CHECK(fit.squid.ej1_hz == doctest::Approx(1.06e12).epsilon(1e-3));
  CHECK(fit.squid.ej2_hz == doctest::Approx(1.54e12).epsilon(1e-3));

  // The second coil column is not observable in a single sweep and must be
  // carried over from the initial guess untouched.
  CHECK(fit.map.m(0, 1) == init.map.m(0, 1));
  CHECK(fit.map.m(1, 1) == init.map.m(1, 1));
}

TEST_CASE("narrow voltage span raises the rank warning") {
  const auto device = test_device();
  const auto v1 = linspace(-0.05, 0.05, 9);
  const auto f = linspace(5.2e9, 7.8e9, 181);
  const auto data = simulate_flux_map(device, true_map(), v1, 0.15, f);

  FluxFitInit init;
  init.map = true_map();
  init.squid = SquidArraySpec{};
  const auto fit = fit_flux_model(device, data, init);
  CHECK(fit.rank_warning);
}
