#pragma once

#include <string>

#include "qsw/config.hpp"

namespace qsw::commands {

// Each command writes its result files under config.output_dir and throws
// on failure; the CLI maps exception classes to exit codes. Every emitted
// file carries the config hash and seed.

void cmd_sweep(const config::RunConfig& config);
void cmd_fluxmap(const config::RunConfig& config);

// Fits the flux model. Simulates its own dataset when dataset_path is
// empty, otherwise reads the CSV at dataset_path.
void cmd_fit(const config::RunConfig& config, const std::string& dataset_path);

void cmd_compression(const config::RunConfig& config);
void cmd_pulse(const config::RunConfig& config);
void cmd_photon(const config::RunConfig& config);

}  // namespace qsw::commands
