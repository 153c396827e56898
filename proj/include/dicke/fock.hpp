#pragma once
// Two-mode bosonic states at fixed particle number and the collective spin
// (Schwinger) operators acting on them.
//
// Basis convention used everywhere in the library: inside a sector with M
// particles, index n = 0..M is the occupation of the first mode, so the
// basis vector n is |n, M-n> and carries J_z eigenvalue m = n - M/2.

#include <complex>
#include <map>
#include <memory>
#include <optional>

#include <Eigen/Dense>

namespace dicke {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

enum class Axis { x, y, z };

inline double jz_value(int n, int particles) { return n - 0.5 * particles; }

/// Pure state of M particles. Construction renormalizes amplitudes whose norm
/// is within 1e-6 of one and rejects anything further off.
class SectorPureState {
 public:
  SectorPureState(int particles, CVector amplitudes);

  int particles() const { return particles_; }
  const CVector& amplitudes() const { return amplitudes_; }

 private:
  int particles_;
  CVector amplitudes_;
};

/// Density operator on one sector. The matrix is hermitized on construction;
/// trace is held to the same renormalize-or-reject rule as pure states.
class SectorDensityMatrix {
 public:
  SectorDensityMatrix(int particles, CMatrix matrix);
  static SectorDensityMatrix from_pure(const SectorPureState& state);

  int particles() const { return particles_; }
  const CMatrix& matrix() const { return matrix_; }

 private:
  int particles_;
  CMatrix matrix_;
};

/// One block of a SectoredState. `amplitudes` is kept when the block is known
/// to be pure so that downstream code can take rank-one shortcuts.
struct Sector {
  double weight;
  SectorDensityMatrix state;
  std::optional<CVector> amplitudes;
};

/// Probability mixture of fixed-number blocks, block diagonal in total
/// particle number. This is the general state after particle loss.
class SectoredState {
 public:
  SectoredState(std::map<int, Sector> sectors, int source_particles);
  static SectoredState from_pure(const SectorPureState& state);

  const std::map<int, Sector>& sectors() const { return sectors_; }
  int source_particles() const { return source_particles_; }
  int max_particles() const;
  bool is_single_pure_sector() const;

 private:
  std::map<int, Sector> sectors_;
  int source_particles_;
};

struct SpinOperators {
  int sector;
  CMatrix jx, jy, jz, jplus, jminus;
};

SpinOperators build_sector_operators(int particles);

/// Eigendecomposition jy = V diag(lambda) V^dagger for one sector. The
/// eigenvalues are exactly -M/2, ..., M/2 and are stored that way.
struct JySpectrum {
  int particles;
  RVector eigenvalues;
  CMatrix vectors;
};

/// Cached per particle number; safe to call from several threads.
std::shared_ptr<const JySpectrum> jy_spectrum(int particles);

/// U(theta) = exp(-i theta J_y) on the sector with the given particle number.
CMatrix rotation_matrix(int particles, double theta);

SectorPureState rotate_y(const SectorPureState& state, double theta);
SectorDensityMatrix rotate_y(const SectorDensityMatrix& state, double theta);
SectoredState rotate_y(const SectoredState& state, double theta);

/// Re-express a state of modes (a, b) in the Fock basis of the interferometer
/// arms a_+ = (a + b)/sqrt2, a_- = (b - a)/sqrt2. This is rotate_y(-pi/2).
SectorPureState to_pm_basis(const SectorPureState& state);
SectoredState to_pm_basis(const SectoredState& state);

struct MomentRecord {
  double mean_jx;
  double mean_jy;
  double mean_jz;
  double var_jz;
  double mean_jx2_plus_jy2;
  double mean_particles;
};

MomentRecord collective_moments(const SectoredState& state);

/// <J_axis> and <J_axis^2> over the whole mixture.
struct AxisMoments {
  double mean;
  double second;
  double variance() const { return second - mean * mean; }
};

AxisMoments axis_moments(const SectoredState& state, Axis axis);

}  // namespace dicke
