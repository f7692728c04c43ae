#include "imcf/sphere_calculus.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "imcf/ambient.hpp"
#include "imcf/errors.hpp"

namespace imcf {

namespace {

constexpr double kPi = std::numbers::pi;

// int_0^pi sin^p(x) cos(k x) dx
//   = pi cos(k pi / 2) Gamma(p + 1) / (2^p Gamma(1 + (p + k)/2) Gamma(1 + (p - k)/2))
double sine_cosine_moment(int p, int k) {
  if (k % 2 != 0) {
    return 0.0;
  }
  const double b = 1.0 + 0.5 * (p - k);
  if (b <= 0.0 && b == std::floor(b)) {
    return 0.0;  // 1 / Gamma at a pole
  }
  int sign_b = 1;
  const double log_gamma_b = boost::math::lgamma(b, &sign_b);
  const double log_value = std::log(kPi) + std::lgamma(p + 1.0) - p * std::log(2.0) -
                           std::lgamma(1.0 + 0.5 * (p + k)) - log_gamma_b;
  const double sign = ((k / 2) % 2 == 0 ? 1.0 : -1.0) * sign_b;
  return sign * std::exp(log_value);
}

// Fourth-order central stencils, grouped into differences so constants give exactly zero.
inline double first_difference(double um2, double um1, double up1, double up2, double h) {
  return (8.0 * (up1 - um1) - (up2 - um2)) / (12.0 * h);
}

inline double second_difference(double um2, double um1, double u0, double up1, double up2,
                                double h) {
  return (16.0 * ((um1 - u0) + (up1 - u0)) - ((um2 - u0) + (up2 - u0))) / (12.0 * h * h);
}

}  // namespace

std::vector<double> fejer_polar_weights(int polar_count, int sine_power) {
  const int count = polar_count;
  std::vector<double> moments(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    moments[static_cast<std::size_t>(k)] = sine_cosine_moment(sine_power, k);
  }
  std::vector<double> w(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const double xi = (j + 0.5) * kPi / count;
    double acc = 0.5 * moments[0];
    for (int k = 1; k < count; ++k) {
      acc += moments[static_cast<std::size_t>(k)] * std::cos(k * xi);
    }
    w[static_cast<std::size_t>(j)] = 2.0 * acc / count;
  }
  return w;
}

std::shared_ptr<const SphereGrid> SphereGrid::make(SphereBackend backend, int n, int resolution) {
  if (n < 3) {
    throw ConfigurationError("sphere grid: ambient dimension must be >= 3");
  }
  if (resolution < 8) {
    throw ConfigurationError("sphere grid: resolution must be >= 8, got " +
                             std::to_string(resolution));
  }
  if (backend == SphereBackend::latlong && n != 3) {
    throw ConfigurationError("sphere grid: latlong backend supports n = 3 only, got n = " +
                             std::to_string(n));
  }
  std::shared_ptr<SphereGrid> grid(new SphereGrid());
  grid->backend_ = backend;
  grid->n_ = n;
  grid->polar_count_ = resolution;
  grid->polar_step_ = kPi / resolution;
  grid->polar_angles_.resize(static_cast<std::size_t>(resolution));
  for (int j = 0; j < resolution; ++j) {
    grid->polar_angles_[static_cast<std::size_t>(j)] = (j + 0.5) * grid->polar_step_;
  }
  const std::vector<double> polar = fejer_polar_weights(resolution, n - 2);
  if (backend == SphereBackend::axisymmetric) {
    grid->azimuth_count_ = 1;
    grid->azimuth_step_ = 0.0;
    const double equator = sphere_area(n - 1);  // |S^{n-2}|
    grid->weights_.resize(polar.size());
    for (std::size_t j = 0; j < polar.size(); ++j) {
      grid->weights_[j] = equator * polar[j];
    }
  } else {
    grid->azimuth_count_ = 2 * resolution;
    grid->azimuth_step_ = 2.0 * kPi / grid->azimuth_count_;
    grid->weights_.resize(static_cast<std::size_t>(resolution) * grid->azimuth_count_);
    for (int j = 0; j < resolution; ++j) {
      for (int k = 0; k < grid->azimuth_count_; ++k) {
        grid->weights_[grid->index(j, k)] =
            polar[static_cast<std::size_t>(j)] * grid->azimuth_step_;
      }
    }
  }
  return grid;
}

std::shared_ptr<const SphereGrid> make_grid(SphereBackend backend, int n, int resolution) {
  return SphereGrid::make(backend, n, resolution);
}

int SphereGrid::azimuthal_multiplicity() const {
  return backend_ == SphereBackend::axisymmetric ? n_ - 2 : 1;
}

double SphereGrid::polar_angle(std::size_t node) const {
  return polar_angles_[node / static_cast<std::size_t>(azimuth_count_)];
}

double SphereGrid::azimuth(std::size_t node) const {
  return static_cast<double>(node % static_cast<std::size_t>(azimuth_count_)) * azimuth_step_;
}

// ---------------------------------------------------------------------------------------------

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) {
    throw ConfigurationError("scalar field: null grid");
  }
  if (values_.size() != grid_->size()) {
    throw ConfigurationError("scalar field: value count " + std::to_string(values_.size()) +
                             " does not match grid size " + std::to_string(grid_->size()));
  }
}

ScalarField::ScalarField(GridPtr grid, double constant)
    : ScalarField(grid, std::vector<double>(grid ? grid->size() : 0, constant)) {}

void SphereDerivatives::resize(std::size_t n) {
  for (auto* v : {&grad1, &grad2, &hess11, &hess12, &hess22, &laplacian, &grad_sq}) {
    v->assign(n, 0.0);
  }
}

void SphereDerivatives::finalize() {
  for (std::size_t i = 0; i < grad1.size(); ++i) {
    laplacian[i] = hess11[i] + multiplicity * hess22[i];
    grad_sq[i] = grad1[i] * grad1[i] + grad2[i] * grad2[i];
  }
}

namespace {

SphereDerivatives axisymmetric_derivatives(const SphereGrid& grid, std::span<const double> u) {
  const int count = grid.polar_count();
  const double h = grid.polar_step();
  // Even reflection across both poles.
  auto at = [&](int j) {
    if (j < 0) {
      j = -1 - j;
    } else if (j >= count) {
      j = 2 * count - 1 - j;
    }
    return u[static_cast<std::size_t>(j)];
  };
  SphereDerivatives d;
  d.multiplicity = grid.dimension() - 2;
  d.resize(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const auto i = static_cast<std::size_t>(j);
    const double xi = grid.polar_angles()[i];
    const double du = first_difference(at(j - 2), at(j - 1), at(j + 1), at(j + 2), h);
    d.grad1[i] = du;
    d.hess11[i] = second_difference(at(j - 2), at(j - 1), u[i], at(j + 1), at(j + 2), h);
    d.hess22[i] = std::cos(xi) / std::sin(xi) * du;
  }
  d.finalize();
  return d;
}

SphereDerivatives latlong_derivatives(const SphereGrid& grid, std::span<const double> u) {
  const int np = grid.polar_count();
  const int na = grid.azimuth_count();
  const int half_turn = na / 2;
  const double hp = grid.polar_step();
  const double ha = grid.azimuth_step();

  // Value at polar index j (possibly a ghost across a pole) and azimuth index k.
  auto at = [&](std::span<const double> f, int j, int k) {
    if (j < 0) {
      j = -1 - j;
      k += half_turn;
    } else if (j >= np) {
      j = 2 * np - 1 - j;
      k += half_turn;
    }
    k = ((k % na) + na) % na;
    return f[grid.index(j, k)];
  };

  std::vector<double> du_dpsi(grid.size());
  for (int j = 0; j < np; ++j) {
    for (int k = 0; k < na; ++k) {
      du_dpsi[grid.index(j, k)] =
          first_difference(at(u, j, k - 2), at(u, j, k - 1), at(u, j, k + 1), at(u, j, k + 2), ha);
    }
  }

  SphereDerivatives d;
  d.multiplicity = 1;
  d.resize(grid.size());
  for (int j = 0; j < np; ++j) {
    const double xi = grid.polar_angles()[static_cast<std::size_t>(j)];
    const double s = std::sin(xi);
    const double c = std::cos(xi);
    for (int k = 0; k < na; ++k) {
      const std::size_t i = grid.index(j, k);
      const double u_xi =
          first_difference(at(u, j - 2, k), at(u, j - 1, k), at(u, j + 1, k), at(u, j + 2, k), hp);
      const double u_xixi = second_difference(at(u, j - 2, k), at(u, j - 1, k), u[i],
                                              at(u, j + 1, k), at(u, j + 2, k), hp);
      const double u_psi = du_dpsi[i];
      const double u_psipsi = second_difference(at(u, j, k - 2), at(u, j, k - 1), u[i],
                                                at(u, j, k + 1), at(u, j, k + 2), ha);
      const std::span<const double> dp(du_dpsi);
      const double u_xipsi = first_difference(at(dp, j - 2, k), at(dp, j - 1, k),
                                              at(dp, j + 1, k), at(dp, j + 2, k), hp);
      d.grad1[i] = u_xi;
      d.grad2[i] = u_psi / s;
      d.hess11[i] = u_xixi;
      d.hess12[i] = u_xipsi / s - c * u_psi / (s * s);
      d.hess22[i] = u_psipsi / (s * s) + c / s * u_xi;
    }
  }
  d.finalize();
  return d;
}

}  // namespace

SphereDerivatives derivatives(const SphereGrid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) {
    throw ConfigurationError("derivatives: value count does not match grid size");
  }
  return grid.backend() == SphereBackend::axisymmetric ? axisymmetric_derivatives(grid, values)
                                                       : latlong_derivatives(grid, values);
}

SphereDerivatives derivatives(const ScalarField& field) {
  return derivatives(field.grid(), field.values());
}

double integrate(const SphereGrid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) {
    throw ConfigurationError("integrate: value count does not match grid size");
  }
  const std::span<const double> w = grid.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += w[i] * values[i];
  }
  return acc;
}

double integrate(const ScalarField& field) { return integrate(field.grid(), field.values()); }

}  // namespace imcf
