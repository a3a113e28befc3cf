#pragma once

#include "qsw/netcore.hpp"

namespace qsw::elements {

using netcore::AbcdMatrix;
using netcore::SMatrix;

// Lossless transmission line segment.
struct TransmissionLineSpec {
  double z0_ohm = 50.0;
  double v_m_per_s = 1.3e8;   // phase velocity
  double length_m = 0.0;
};

// Array of n identical two-junction loops in series. Junction energies are
// expressed as frequencies E/h in Hz.
struct SquidArraySpec {
  int n_loops = 5;
  double ej1_hz = 1.06e12;
  double ej2_hz = 1.54e12;

  // max/min tunable energy ratio (E1+E2)/|E1-E2|.
  double tuning_ratio() const;
};

enum class HybridKind { ideal, branchline };

// pi/2 hybrid coupler. Port order: 0 input, 1 isolated, 2 and 3 outputs.
struct HybridSpec {
  double f_center_hz = 7.2e9;
  double z0_ohm = 50.0;
  HybridKind kind = HybridKind::branchline;
};

// Half-wave resonator: series coupling capacitor, half line, series array
// inductor, half line, series coupling capacitor. half_line and c_coupling
// come from calibrate_resonator.
struct ResonatorSpec {
  double z0_ohm = 50.0;
  TransmissionLineSpec half_line;
  double c_coupling_f = 65e-15;
  SquidArraySpec squid;
};

// Tunable array energy at flux phi (units of the flux quantum):
// E(phi) = sqrt(E1^2 + E2^2 + 2 E1 E2 cos(2 pi phi)), in Hz.
double ej_of_flux(const SquidArraySpec& squid, double phi);

// Series inductance of the array, henries.
double array_inductance_from_ej(int n_loops, double ej_hz);
double array_inductance(const SquidArraySpec& squid, double phi);

// Element chain matrices at frequency f.
AbcdMatrix tline_abcd(const TransmissionLineSpec& line, double f_hz);
AbcdMatrix series_capacitor_abcd(double c_farad, double f_hz);
AbcdMatrix series_inductor_abcd(double l_henry, double f_hz);

// Two-port resonator response referenced to spec.z0_ohm.
SMatrix resonator_smatrix(const ResonatorSpec& spec, double phi, double f_hz);
SMatrix resonator_smatrix_at_ej(const ResonatorSpec& spec, double ej_hz,
                                double f_hz);

// Same structure with the array replaced by a direct bond; this is the
// fixed-frequency test device the calibration targets reproduce.
SMatrix bonded_resonator_smatrix(const ResonatorSpec& spec, double f_hz);

// Four-port hybrid response. The ideal kind is frequency independent; the
// branchline kind composes four quarter-wave segments (through arms z0/sqrt2,
// shunt arms z0) joined by ideal junctions and reduces to the ideal matrix at
// f_center.
SMatrix hybrid_smatrix(const HybridSpec& spec, double f_hz);

// Solves for (half-line length, coupling capacitance) so the bonded test
// device peaks at f0 with full width at half maximum fwhm. Other fields of
// the returned spec are taken from `base`.
ResonatorSpec calibrate_resonator(const SquidArraySpec& squid, double f0_hz,
                                  double fwhm_hz, double z0_ohm = 50.0,
                                  double v_m_per_s = 1.3e8);

}  // namespace qsw::elements
