#include "dicke/fock.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "dicke/errors.hpp"

namespace dicke {
namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kRenormalizeLimit = 1e-6;

// <n+1| J_+ |n> in a sector of `particles` particles.
double raising_element(int n, int particles) {
  const double j = 0.5 * particles;
  const double m = jz_value(n, particles);
  return std::sqrt(std::max(0.0, j * (j + 1.0) - m * (m + 1.0)));
}

double checked_scale(double norm2, const char* what) {
  if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > kRenormalizeLimit) {
    throw InvalidArgument(std::string(what) + " is not normalized (got " + std::to_string(norm2) + ")");
  }
  return std::abs(norm2 - 1.0) > kNormTolerance ? norm2 : 1.0;
}

}  // namespace

SectorPureState::SectorPureState(int particles, CVector amplitudes)
    : particles_(particles), amplitudes_(std::move(amplitudes)) {
  if (particles_ < 0) throw InvalidArgument("particle number must be non-negative");
  if (amplitudes_.size() != particles_ + 1) {
    throw InvalidArgument("amplitude vector length must be particles + 1");
  }
  const double scale = checked_scale(amplitudes_.squaredNorm(), "pure state");
  if (scale != 1.0) amplitudes_ /= std::sqrt(scale);
}

SectorDensityMatrix::SectorDensityMatrix(int particles, CMatrix matrix)
    : particles_(particles), matrix_(std::move(matrix)) {
  if (particles_ < 0) throw InvalidArgument("particle number must be non-negative");
  if (matrix_.rows() != particles_ + 1 || matrix_.cols() != particles_ + 1) {
    throw InvalidArgument("density matrix must be (particles + 1) square");
  }
  const double asym = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-8) throw InvalidArgument("density matrix is not hermitian");
  matrix_ = 0.5 * (matrix_ + matrix_.adjoint()).eval();
  const double scale = checked_scale(matrix_.trace().real(), "density matrix trace");
  if (scale != 1.0) matrix_ /= scale;
}

SectorDensityMatrix SectorDensityMatrix::from_pure(const SectorPureState& state) {
  const CVector& psi = state.amplitudes();
  return SectorDensityMatrix(state.particles(), psi * psi.adjoint());
}

SectoredState::SectoredState(std::map<int, Sector> sectors, int source_particles)
    : sectors_(std::move(sectors)), source_particles_(source_particles) {
  if (sectors_.empty()) throw InvalidArgument("sectored state needs at least one sector");
  double total = 0.0;
  for (auto& [particles, sector] : sectors_) {
    if (sector.state.particles() != particles) {
      throw InvalidArgument("sector key does not match its particle number");
    }
    if (!(sector.weight >= -kNormTolerance)) throw InvalidArgument("negative sector weight");
    sector.weight = std::max(0.0, sector.weight);
    total += sector.weight;
  }
  const double scale = checked_scale(total, "sector weights");
  if (scale != 1.0) {
    for (auto& entry : sectors_) entry.second.weight /= scale;
  }
}

SectoredState SectoredState::from_pure(const SectorPureState& state) {
  std::map<int, Sector> sectors;
  sectors.emplace(state.particles(),
                  Sector{1.0, SectorDensityMatrix::from_pure(state), state.amplitudes()});
  return SectoredState(std::move(sectors), state.particles());
}

int SectoredState::max_particles() const { return sectors_.rbegin()->first; }

bool SectoredState::is_single_pure_sector() const {
  return sectors_.size() == 1 && sectors_.begin()->second.amplitudes.has_value();
}

SpinOperators build_sector_operators(int particles) {
  if (particles < 0) throw InvalidArgument("particle number must be non-negative");
  const int dim = particles + 1;
  SpinOperators ops;
  ops.sector = particles;
  ops.jplus = CMatrix::Zero(dim, dim);
  ops.jz = CMatrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    ops.jz(n, n) = jz_value(n, particles);
    if (n + 1 < dim) ops.jplus(n + 1, n) = raising_element(n, particles);
  }
  ops.jminus = ops.jplus.adjoint();
  ops.jx = 0.5 * (ops.jplus + ops.jminus);
  ops.jy = (ops.jplus - ops.jminus) / Complex(0.0, 2.0);
  return ops;
}

namespace {

std::shared_ptr<const JySpectrum> compute_jy_spectrum(int particles) {
  const int dim = particles + 1;
  auto spectrum = std::make_shared<JySpectrum>();
  spectrum->particles = particles;
  spectrum->eigenvalues.resize(dim);
  spectrum->vectors.resize(dim, dim);
  if (dim == 1) {
    spectrum->eigenvalues(0) = 0.0;
    spectrum->vectors(0, 0) = 1.0;
    return spectrum;
  }
  // With D = diag(i^n), D^dagger jy D is real symmetric tridiagonal with
  // off-diagonal -<n+1|J_+|n>/2 and zero diagonal.
  RVector diag = RVector::Zero(dim);
  RVector sub(dim - 1);
  for (int n = 0; n + 1 < dim; ++n) sub(n) = -0.5 * raising_element(n, particles);
  Eigen::SelfAdjointEigenSolver<RMatrix> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NoConvergence("jy eigendecomposition failed");

  const RVector& values = solver.eigenvalues();
  const RMatrix& q = solver.eigenvectors();
  for (int k = 0; k < dim; ++k) {
    const double exact = jz_value(k, particles);
    if (std::abs(values(k) - exact) > 1e-8 * dim) {
      throw NoConvergence("jy spectrum deviates from -j..j at M=" + std::to_string(particles));
    }
    spectrum->eigenvalues(k) = exact;
  }
  static const Complex kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int n = 0; n < dim; ++n) {
    spectrum->vectors.row(n) = kPowers[n % 4] * q.row(n).cast<Complex>();
  }
  return spectrum;
}

}  // namespace

std::shared_ptr<const JySpectrum> jy_spectrum(int particles) {
  if (particles < 0) throw InvalidArgument("particle number must be non-negative");
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const JySpectrum>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(particles); it != cache.end()) return it->second;
  }
  auto computed = compute_jy_spectrum(particles);
  std::lock_guard lock(mutex);
  return cache.emplace(particles, std::move(computed)).first->second;
}

namespace {

CVector phases(const RVector& eigenvalues, double theta) {
  CVector out(eigenvalues.size());
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    out(k) = std::polar(1.0, -theta * eigenvalues(k));
  }
  return out;
}

}  // namespace

CMatrix rotation_matrix(int particles, double theta) {
  const auto spectrum = jy_spectrum(particles);
  const CMatrix& v = spectrum->vectors;
  return v * phases(spectrum->eigenvalues, theta).asDiagonal() * v.adjoint();
}

SectorPureState rotate_y(const SectorPureState& state, double theta) {
  const auto spectrum = jy_spectrum(state.particles());
  const CMatrix& v = spectrum->vectors;
  CVector coeffs = v.adjoint() * state.amplitudes();
  coeffs = coeffs.cwiseProduct(phases(spectrum->eigenvalues, theta));
  return SectorPureState(state.particles(), v * coeffs);
}

SectorDensityMatrix rotate_y(const SectorDensityMatrix& state, double theta) {
  const CMatrix u = rotation_matrix(state.particles(), theta);
  return SectorDensityMatrix(state.particles(), u * state.matrix() * u.adjoint());
}

SectoredState rotate_y(const SectoredState& state, double theta) {
  std::map<int, Sector> rotated;
  for (const auto& [particles, sector] : state.sectors()) {
    if (sector.amplitudes) {
      SectorPureState pure =
          rotate_y(SectorPureState(particles, *sector.amplitudes), theta);
      rotated.emplace(particles, Sector{sector.weight, SectorDensityMatrix::from_pure(pure),
                                        pure.amplitudes()});
    } else {
      rotated.emplace(particles, Sector{sector.weight, rotate_y(sector.state, theta), {}});
    }
  }
  return SectoredState(std::move(rotated), state.source_particles());
}

SectorPureState to_pm_basis(const SectorPureState& state) {
  return rotate_y(state, -std::numbers::pi / 2);
}

SectoredState to_pm_basis(const SectoredState& state) {
  return rotate_y(state, -std::numbers::pi / 2);
}

namespace {

struct SectorExpectations {
  Complex jplus;
  Complex jplus2;
  double jz;
  double jz2;
};

SectorExpectations sector_expectations(const CMatrix& rho, int particles) {
  SectorExpectations e{0.0, 0.0, 0.0, 0.0};
  const int dim = particles + 1;
  for (int n = 0; n < dim; ++n) {
    const double m = jz_value(n, particles);
    const double p = rho(n, n).real();
    e.jz += p * m;
    e.jz2 += p * m * m;
    if (n + 1 < dim) e.jplus += raising_element(n, particles) * rho(n, n + 1);
    if (n + 2 < dim) {
      e.jplus2 += raising_element(n, particles) * raising_element(n + 1, particles) * rho(n, n + 2);
    }
  }
  return e;
}

double casimir(int particles) {
  const double j = 0.5 * particles;
  return j * (j + 1.0);
}

}  // namespace

MomentRecord collective_moments(const SectoredState& state) {
  MomentRecord r{0, 0, 0, 0, 0, 0};
  double jz2 = 0.0;
  for (const auto& [particles, sector] : state.sectors()) {
    const auto e = sector_expectations(sector.state.matrix(), particles);
    const double w = sector.weight;
    r.mean_jx += w * e.jplus.real();
    r.mean_jy += w * e.jplus.imag();
    r.mean_jz += w * e.jz;
    jz2 += w * e.jz2;
    r.mean_jx2_plus_jy2 += w * (casimir(particles) - e.jz2);
    r.mean_particles += w * particles;
  }
  r.var_jz = std::max(0.0, jz2 - r.mean_jz * r.mean_jz);
  return r;
}

AxisMoments axis_moments(const SectoredState& state, Axis axis) {
  AxisMoments out{0.0, 0.0};
  for (const auto& [particles, sector] : state.sectors()) {
    const auto e = sector_expectations(sector.state.matrix(), particles);
    const double w = sector.weight;
    const double transverse = casimir(particles) - e.jz2;
    switch (axis) {
      case Axis::x:
        out.mean += w * e.jplus.real();
        out.second += w * 0.5 * (transverse + e.jplus2.real());
        break;
      case Axis::y:
        out.mean += w * e.jplus.imag();
        out.second += w * 0.5 * (transverse - e.jplus2.real());
        break;
      case Axis::z:
        out.mean += w * e.jz;
        out.second += w * e.jz2;
        break;
    }
  }
  return out;
}

}  // namespace dicke
