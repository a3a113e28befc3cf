#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qsw/commands.hpp"
#include "qsw/config.hpp"
#include "qsw/errors.hpp"

namespace {

// Exit codes: 0 success, 2 invalid input or configuration, 3 numerical
// failure (no convergence, singular network, bracketing).
constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microwave switch simulator: network synthesis, flux"
               " calibration, nonlinearity, switching dynamics, and photon"
               " statistics."};
  app.require_subcommand(1);
  // Accept the shared options before or after the subcommand name.
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_given = false;

  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_dir, "Output directory (overrides config)");
  app.add_option("--format", format, "Table format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "RNG seed (overrides config)")
      ->each([&](const std::string&) { seed_given = true; });

  auto* sweep = app.add_subcommand("sweep", "Frequency response at both"
                                            " operating points");
  auto* fluxmap = app.add_subcommand("fluxmap", "Two-tone flux map dataset");
  auto* fit = app.add_subcommand("fit", "Flux-map model fit");
  std::string dataset_path;
  fit->add_option("--dataset", dataset_path,
                  "Flux-map CSV to fit (default: simulate one)");
  auto* compression =
      app.add_subcommand("compression", "Power sweep and 1 dB point");
  auto* pulse = app.add_subcommand("pulse", "Time-domain switching waveform");
  auto* photon =
      app.add_subcommand("photon", "Moment extraction and state"
                         " reconstruction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    qsw::config::RunConfig config = config_path.empty()
                                        ? qsw::config::default_config()
                                        : qsw::config::load_config(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (!format.empty()) config.format = format;
    if (seed_given) config.seed = seed;

    if (sweep->parsed()) qsw::commands::cmd_sweep(config);
    if (fluxmap->parsed()) qsw::commands::cmd_fluxmap(config);
    if (fit->parsed()) qsw::commands::cmd_fit(config, dataset_path);
    if (compression->parsed()) qsw::commands::cmd_compression(config);
    if (pulse->parsed()) qsw::commands::cmd_pulse(config);
    if (photon->parsed()) qsw::commands::cmd_photon(config);
  } catch (const qsw::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const qsw::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const qsw::BracketError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const qsw::SingularNetworkError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const qsw::FrequencyMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const qsw::UnsupportedStateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
