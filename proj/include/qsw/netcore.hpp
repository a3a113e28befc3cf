#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>

namespace qsw::netcore {

using Complex = std::complex<double>;

// Chain (ABCD) matrix of a two-port at a single frequency.
// Convention: [V1; I1] = [a b; c d] [V2; -I2] with I2 flowing out of port 2.
struct AbcdMatrix {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};
  double f_hz = 0.0;

  Complex determinant() const { return a * d - b * c; }
};

// Scattering matrix of an n-port, all ports referenced to z_ref_ohm.
struct SMatrix {
  Eigen::MatrixXcd s;
  double z_ref_ohm = 50.0;
  double f_hz = 0.0;

  int ports() const { return static_cast<int>(s.rows()); }

  // max |(S^H S - I)_ij|; zero for a lossless network.
  double unitarity_defect() const;
  // max |S_ij - S_ji|; zero for a reciprocal network.
  double reciprocity_defect() const;
};

// Exact two-port ABCD <-> S conversions at reference impedance z_ref.
SMatrix abcd_to_s(const AbcdMatrix& m, double z_ref_ohm);
AbcdMatrix s_to_abcd(const SMatrix& s);

// Ordered product of chain matrices; identity for an empty list.
// Throws FrequencyMismatchError if members disagree on frequency.
AbcdMatrix cascade(std::span<const AbcdMatrix> chain);

// S-matrix of the disjoint union; ports of a first, then ports of b.
SMatrix block_diag(const SMatrix& a, const SMatrix& b);

// Joins port_a of network a to port_b of network b (0-based indices).
// Resulting port order: remaining ports of a, then remaining ports of b.
// Throws SingularNetworkError when the interconnection is resonant-singular.
SMatrix connect(const SMatrix& a, int port_a, const SMatrix& b, int port_b);

// Joins two ports of the same network; remaining ports keep their order.
SMatrix connect_self(const SMatrix& n, int port_i, int port_j);

// Ideal matched through line of zero length.
SMatrix through_smatrix(double z_ref_ohm, double f_hz);

// Ideal lossless junction of n_ports lines at a common node:
// S = (2/n) * ones - identity.
SMatrix ideal_junction(int n_ports, double z_ref_ohm, double f_hz);

}  // namespace qsw::netcore
