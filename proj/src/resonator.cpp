#include "spinres/resonator.hpp"

#include <cmath>
#include <complex>

#include "spinres/constants.hpp"
#include "spinres/errors.hpp"

namespace spinres {

namespace {

using constants::c_light;
using constants::hbar;
using constants::mu0;
using constants::mu_bohr;
using constants::mu_nuclear;
using constants::pi;

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

// Rotation taking `axis` (normalized) onto +z.
Eigen::Matrix3d rotation_to_z(const Eigen::Vector3d& axis) {
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d v = axis.cross(z);
  const double c = axis.dot(z);
  if (v.norm() < 1e-14) {
    if (c > 0.0) return Eigen::Matrix3d::Identity();
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(1, 1) = -1.0;
    flip(2, 2) = -1.0;  // pi rotation about x
    return flip;
  }
  Eigen::Matrix3d vx;
  vx << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return Eigen::Matrix3d::Identity() + vx + vx * vx / (1.0 + c);
}

}  // namespace

double ResonatorModel::wavelength_m() const { return 2.0 * pi * c_light / omega_c; }

void ResonatorModel::validate() const {
  if (!(omega_c > 0.0) || !std::isfinite(omega_c))
    throw InvalidInputError("resonator frequency must be positive");
  if (!(quality > 0.0) || !std::isfinite(quality))
    throw InvalidInputError("quality factor must be positive");
  if (!(impedance_ohm > 0.0) || !std::isfinite(impedance_ohm))
    throw InvalidInputError("impedance must be positive");
  if (mode_volume_m3 && !(*mode_volume_m3 > 0.0))
    throw InvalidInputError("mode volume must be positive");
}

double zero_point_current(const ResonatorModel& r) {
  r.validate();
  return r.omega_c * std::sqrt(hbar / (2.0 * r.impedance_ohm));
}

Eigen::Vector3d field_at_point(const WireGeometry& wire, double current,
                               const Eigen::Vector3d& point) {
  const double axis_norm = wire.direction.norm();
  if (!(axis_norm > 0.0)) throw InvalidInputError("wire direction must be non-zero");
  const Eigen::Vector3d u = wire.direction / axis_norm;
  const Eigen::Vector3d rel = point - wire.point;
  const Eigen::Vector3d radial = rel - rel.dot(u) * u;
  const double d = radial.norm();
  if (d < 1e-15) throw SingularGeometryError("field requested on the wire axis");
  // B = mu0 I / (2 pi d), circulating about the axis.
  return (mu0 * current / (2.0 * pi * d)) * u.cross(radial / d);
}

CouplingResult single_spin_coupling(const SpinSystem& sys, const Transition& t,
                                    const Eigen::Vector3d& b0_direction,
                                    const Eigen::Vector3d& delta_b) {
  sys.validate();
  if (t.level_lo < 0 || t.level_hi >= sys.dim() || t.level_lo >= t.level_hi)
    throw InvalidInputError("transition level indices out of range");
  const double b0_norm = b0_direction.norm();
  if (!(b0_norm > 0.0)) throw InvalidInputError("static field direction must be non-zero");

  // Work in the frame whose z axis is the static field; the Hamiltonian is
  // built with B || z, so only delta_b needs rotating.
  const Eigen::Matrix3d rot = rotation_to_z(b0_direction / b0_norm);
  const Eigen::Vector3d db = rot * delta_b;

  const EigenSystem eig = eigensystem_at(sys, t.field_t);
  const SpinOperators se = angular_momentum_operators(sys.electron_spin);
  const SpinOperators si = angular_momentum_operators(sys.nuclear_spin);
  const Eigen::MatrixXcd eye_e = Eigen::MatrixXcd::Identity(sys.electron_dim(), sys.electron_dim());
  const Eigen::MatrixXcd eye_n = Eigen::MatrixXcd::Identity(sys.nuclear_dim(), sys.nuclear_dim());

  const double ge = sys.g_e * mu_bohr / hbar;
  const double gn = sys.g_n * mu_nuclear / hbar;
  const Eigen::MatrixXcd op =
      ge * (db.x() * kron(se.x, eye_n) + db.y() * kron(se.y, eye_n) + db.z() * kron(se.z, eye_n)) -
      gn * (db.x() * kron(eye_e, si.x) + db.y() * kron(eye_e, si.y) + db.z() * kron(eye_e, si.z));

  CouplingResult out;
  out.g0 = std::abs((eig.states.col(t.level_hi).adjoint() * op * eig.states.col(t.level_lo))(0));
  out.zero_point_field_t = std::hypot(db.x(), db.y());
  out.transition = t;
  return out;
}

double purcell_rate(double g0, double kappa, double delta) {
  if (!(g0 >= 0.0) || !(kappa > 0.0))
    throw InvalidInputError("purcell rate needs g0 >= 0 and kappa > 0");
  const double x = 2.0 * delta / kappa;
  return (4.0 * g0 * g0 / kappa) / (1.0 + x * x);
}

double purcell_factor(double quality, double wavelength_m, double mode_volume_m3) {
  if (!(quality > 0.0) || !(wavelength_m > 0.0) || !(mode_volume_m3 > 0.0))
    throw InvalidInputError("purcell factor needs positive Q, wavelength, volume");
  const double l3 = wavelength_m * wavelength_m * wavelength_m;
  return 3.0 * quality * l3 / (4.0 * pi * pi * mode_volume_m3);
}

double free_space_emission_rate(double magnetic_moment_j_per_t, double omega) {
  if (!(omega > 0.0)) throw InvalidInputError("emission rate needs a positive frequency");
  if (!(magnetic_moment_j_per_t > 0.0))
    throw InvalidInputError("emission rate needs a positive magnetic moment");
  const double w3 = omega * omega * omega;
  const double c3 = c_light * c_light * c_light;
  return mu0 * w3 * magnetic_moment_j_per_t * magnetic_moment_j_per_t / (3.0 * pi * hbar * c3);
}

double nuclear_purcell_scaling(double electron_rate, double gyro_ratio) {
  if (!(electron_rate >= 0.0) || !(gyro_ratio > 0.0))
    throw InvalidInputError("needs a non-negative rate and a positive gyromagnetic ratio");
  return electron_rate * gyro_ratio * gyro_ratio;
}

double pi_pulse_power(double t_p, double t_ref, double p_ref) {
  if (!(t_p > 0.0) || !(t_ref > 0.0) || !(p_ref >= 0.0))
    throw InvalidInputError("pulse durations must be positive and power non-negative");
  const double r = t_ref / t_p;
  return p_ref * r * r;
}

}  // namespace spinres
