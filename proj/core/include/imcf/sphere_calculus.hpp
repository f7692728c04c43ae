#pragma once

// Finite-difference calculus on the round sphere S^{n-1}.
//
// Two backends share one node layout convention: polar angles are cell centred,
// xi_j = (j + 1/2) pi / N, so no node sits on a pole and cot(xi) stays finite.
//
//  * axisymmetric: fields depend on xi only; works for any n >= 3.  The Hessian in the
//    orthonormal frame is diag(u'', cot(xi) u', ..., cot(xi) u') with n - 2 repeated entries.
//  * latlong: full (xi, psi) tensor grid on S^2 (n = 3 only), psi_k = 2 pi k / (2N).
//
// Derivatives are 4th-order central differences; pole ghosts come from the reflection
// (xi, psi) -> (-xi, psi + pi).  Quadrature interpolates in cos(k xi) at the cell centres
// (a Fejer-type rule against the weight sin^{n-2} xi), which integrates constants exactly.

#include <memory>
#include <span>
#include <vector>

namespace imcf {

enum class SphereBackend { axisymmetric, latlong };

class SphereGrid {
 public:
  /// Throws ConfigurationError for resolution < 8, n < 3, or latlong with n != 3.
  static std::shared_ptr<const SphereGrid> make(SphereBackend backend, int n, int resolution);

  SphereBackend backend() const { return backend_; }
  int dimension() const { return n_; }
  int polar_count() const { return polar_count_; }
  int azimuth_count() const { return azimuth_count_; }
  std::size_t size() const { return weights_.size(); }
  double polar_step() const { return polar_step_; }
  double azimuth_step() const { return azimuth_step_; }

  /// Number of frame directions sharing the second Hessian entry (n - 2 axisymmetric, 1 latlong).
  int azimuthal_multiplicity() const;

  double polar_angle(std::size_t node) const;
  double azimuth(std::size_t node) const;
  std::span<const double> polar_angles() const { return polar_angles_; }
  std::span<const double> weights() const { return weights_; }

  std::size_t index(int polar, int azimuthal) const {
    return static_cast<std::size_t>(polar) * static_cast<std::size_t>(azimuth_count_) +
           static_cast<std::size_t>(azimuthal);
  }

 private:
  SphereGrid() = default;

  SphereBackend backend_ = SphereBackend::axisymmetric;
  int n_ = 3;
  int polar_count_ = 0;
  int azimuth_count_ = 1;
  double polar_step_ = 0.0;
  double azimuth_step_ = 0.0;
  std::vector<double> polar_angles_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

std::shared_ptr<const SphereGrid> make_grid(SphereBackend backend, int n, int resolution);

/// Polar weights of the Fejer-type rule for the weight sin^{p}(xi) on [0, pi] at N cell centres.
std::vector<double> fejer_polar_weights(int polar_count, int sine_power);

class ScalarField {
 public:
  ScalarField(GridPtr grid, std::vector<double> values);
  ScalarField(GridPtr grid, double constant);

  const SphereGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Derivatives in the orthonormal frame (e_xi, e_psi / sin xi, ...).  For the axisymmetric backend
/// grad2 and hess12 vanish and hess22 stands for n - 2 identical frame directions.
struct SphereDerivatives {
  int multiplicity = 1;
  std::vector<double> grad1;
  std::vector<double> grad2;
  std::vector<double> hess11;
  std::vector<double> hess12;
  std::vector<double> hess22;
  std::vector<double> laplacian;
  std::vector<double> grad_sq;

  std::size_t size() const { return grad1.size(); }
  void resize(std::size_t n);
  /// Recomputes laplacian and grad_sq from the frame components.
  void finalize();
};

SphereDerivatives derivatives(const ScalarField& field);
SphereDerivatives derivatives(const SphereGrid& grid, std::span<const double> values);

double integrate(const ScalarField& field);
double integrate(const SphereGrid& grid, std::span<const double> values);

}  // namespace imcf
