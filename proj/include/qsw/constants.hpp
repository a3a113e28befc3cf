#pragma once

namespace qsw {

// CODATA 2018 exact values (SI).
struct PhysicalConstants {
  double e = 1.602176634e-19;       // elementary charge, C
  double h = 6.62607015e-34;        // Planck constant, J s
  double hbar = 1.054571817e-34;    // reduced Planck constant, J s
  double phi0 = 2.067833848461929e-15;  // flux quantum h/(2e), Wb
};

inline constexpr PhysicalConstants kConst{};

// phi0 == h/(2e) must hold to double precision; checked in tests.

inline constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace qsw
