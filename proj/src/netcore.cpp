#include "qsw/netcore.hpp"

#include <cmath>

#include "qsw/errors.hpp"

namespace qsw::netcore {

namespace {
constexpr double kSingularFloor = 1e-20;
}

double SMatrix::unitarity_defect() const {
  const Eigen::MatrixXcd g =
      s.adjoint() * s - Eigen::MatrixXcd::Identity(s.rows(), s.cols());
  return g.cwiseAbs().maxCoeff();
}

double SMatrix::reciprocity_defect() const {
  return (s - s.transpose()).cwiseAbs().maxCoeff();
}

SMatrix abcd_to_s(const AbcdMatrix& m, double z_ref_ohm) {
  if (!(z_ref_ohm > 0.0)) {
    throw ValidationError("abcd_to_s: reference impedance must be positive");
  }
  const Complex z0{z_ref_ohm, 0.0};
  const Complex denom = m.a + m.b / z0 + m.c * z0 + m.d;
  if (std::abs(denom) < kSingularFloor) {
    throw SingularNetworkError("abcd_to_s: singular conversion denominator");
  }
  SMatrix out;
  out.s.resize(2, 2);
  out.s(0, 0) = (m.a + m.b / z0 - m.c * z0 - m.d) / denom;
  out.s(0, 1) = 2.0 * m.determinant() / denom;
  out.s(1, 0) = 2.0 / denom;
  out.s(1, 1) = (-m.a + m.b / z0 - m.c * z0 + m.d) / denom;
  out.z_ref_ohm = z_ref_ohm;
  out.f_hz = m.f_hz;
  return out;
}

AbcdMatrix s_to_abcd(const SMatrix& sm) {
  if (sm.ports() != 2) {
    throw ValidationError("s_to_abcd: needs a two-port");
  }
  const Complex s11 = sm.s(0, 0), s12 = sm.s(0, 1);
  const Complex s21 = sm.s(1, 0), s22 = sm.s(1, 1);
  if (std::abs(s21) < kSingularFloor) {
    throw SingularNetworkError("s_to_abcd: S21 = 0 has no chain matrix");
  }
  const Complex z0{sm.z_ref_ohm, 0.0};
  const Complex two_s21 = 2.0 * s21;
  AbcdMatrix m;
  m.a = ((1.0 + s11) * (1.0 - s22) + s12 * s21) / two_s21;
  m.b = z0 * ((1.0 + s11) * (1.0 + s22) - s12 * s21) / two_s21;
  m.c = ((1.0 - s11) * (1.0 - s22) - s12 * s21) / (two_s21 * z0);
  m.d = ((1.0 - s11) * (1.0 + s22) + s12 * s21) / two_s21;
  m.f_hz = sm.f_hz;
  return m;
}

AbcdMatrix cascade(std::span<const AbcdMatrix> chain) {
  AbcdMatrix acc;
  if (chain.empty()) return acc;
  acc = chain[0];
  for (size_t k = 1; k < chain.size(); ++k) {
    const AbcdMatrix& m = chain[k];
    const double fref = std::max(std::abs(acc.f_hz), std::abs(m.f_hz));
    if (std::abs(acc.f_hz - m.f_hz) > 1e-9 * std::max(fref, 1.0)) {
      throw FrequencyMismatchError("cascade: members at different frequencies");
    }
    AbcdMatrix r;
    r.a = acc.a * m.a + acc.b * m.c;
    r.b = acc.a * m.b + acc.b * m.d;
    r.c = acc.c * m.a + acc.d * m.c;
    r.d = acc.c * m.b + acc.d * m.d;
    r.f_hz = acc.f_hz;
    acc = r;
  }
  return acc;
}

SMatrix block_diag(const SMatrix& a, const SMatrix& b) {
  if (a.z_ref_ohm != b.z_ref_ohm) {
    throw ValidationError("block_diag: mixed reference impedances");
  }
  const double fref = std::max(std::abs(a.f_hz), std::abs(b.f_hz));
  if (std::abs(a.f_hz - b.f_hz) > 1e-9 * std::max(fref, 1.0)) {
    throw FrequencyMismatchError("block_diag: mixed frequencies");
  }
  SMatrix out;
  const int na = a.ports(), nb = b.ports();
  out.s = Eigen::MatrixXcd::Zero(na + nb, na + nb);
  out.s.topLeftCorner(na, na) = a.s;
  out.s.bottomRightCorner(nb, nb) = b.s;
  out.z_ref_ohm = a.z_ref_ohm;
  out.f_hz = a.f_hz;
  return out;
}

// Wave constraints for joining ports k, l of one network: a_k = b_l, a_l = b_k.
// Solving the 2x2 system for a_k, a_l gives the reduced scattering matrix
//   S'_ij = S_ij + [ S_ik ((1 - S_kl) S_lj + S_ll S_kj)
//                  + S_il ((1 - S_lk) S_kj + S_kk S_lj) ] / D,
//   D = (1 - S_kl)(1 - S_lk) - S_kk S_ll.
SMatrix connect_self(const SMatrix& n, int port_i, int port_j) {
  const int np = n.ports();
  if (port_i < 0 || port_j < 0 || port_i >= np || port_j >= np ||
      port_i == port_j) {
    throw ValidationError("connect_self: bad port indices");
  }
  const int k = port_i, l = port_j;
  const Complex d = (1.0 - n.s(k, l)) * (1.0 - n.s(l, k)) -
                    n.s(k, k) * n.s(l, l);
  if (std::abs(d) < kSingularFloor) {
    throw SingularNetworkError("connect_self: resonant-singular junction");
  }
  std::vector<int> keep;
  keep.reserve(np - 2);
  for (int p = 0; p < np; ++p) {
    if (p != k && p != l) keep.push_back(p);
  }
  SMatrix out;
  out.s.resize(np - 2, np - 2);
  for (size_t r = 0; r < keep.size(); ++r) {
    const int i = keep[r];
    for (size_t c = 0; c < keep.size(); ++c) {
      const int j = keep[c];
      const Complex num =
          n.s(i, k) * ((1.0 - n.s(k, l)) * n.s(l, j) + n.s(l, l) * n.s(k, j)) +
          n.s(i, l) * ((1.0 - n.s(l, k)) * n.s(k, j) + n.s(k, k) * n.s(l, j));
      out.s(r, c) = n.s(i, j) + num / d;
    }
  }
  out.z_ref_ohm = n.z_ref_ohm;
  out.f_hz = n.f_hz;
  return out;
}

SMatrix connect(const SMatrix& a, int port_a, const SMatrix& b, int port_b) {
  if (port_a < 0 || port_a >= a.ports() || port_b < 0 || port_b >= b.ports()) {
    throw ValidationError("connect: bad port indices");
  }
  // Disjoint-union then self-join keeps one interconnection formula; with no
  // a<->b coupling the self-join denominator reduces to 1 - S_a(kk) S_b(ll).
  return connect_self(block_diag(a, b), port_a, a.ports() + port_b);
}

SMatrix through_smatrix(double z_ref_ohm, double f_hz) {
  SMatrix out;
  out.s = Eigen::MatrixXcd::Zero(2, 2);
  out.s(0, 1) = out.s(1, 0) = 1.0;
  out.z_ref_ohm = z_ref_ohm;
  out.f_hz = f_hz;
  return out;
}

SMatrix ideal_junction(int n_ports, double z_ref_ohm, double f_hz) {
  if (n_ports < 1) throw ValidationError("ideal_junction: n_ports < 1");
  SMatrix out;
  out.s = Eigen::MatrixXcd::Constant(n_ports, n_ports, 2.0 / n_ports);
  out.s.diagonal().array() -= 1.0;
  out.z_ref_ohm = z_ref_ohm;
  out.f_hz = f_hz;
  return out;
}

}  // namespace qsw::netcore
