#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ricci_lab/grid.hpp"
#include "ricci_lab/manifold_models.hpp"

namespace rlab {

/// Node geometry of a MetricState: coordinates, metric volume weights,
/// local length scale and scalar curvature.
///
/// Polar grids (spheres, conformal S^2) carry radial fields only; the ball
/// and heat-kernel estimators built on them are exact within that class.
/// Tori are reduced to functions of the first coordinate on a periodic grid;
/// the remaining sides enter only through the cross-section factor.
class Discretization {
 public:
  GridKind kind() const noexcept { return kind_; }
  int size() const noexcept { return static_cast<int>(coordinates_.size()); }
  int dimension() const noexcept { return dimension_; }
  double spacing() const noexcept { return spacing_; }
  double time() const noexcept { return time_; }

  const Eigen::VectorXd& coordinates() const noexcept { return coordinates_; }
  /// Metric volume element w_i attached to node i.
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  /// log of the local length scale (phi for conformal metrics, log r for round spheres).
  const Eigen::VectorXd& log_scale() const noexcept { return log_scale_; }
  const Eigen::VectorXd& scalar_curvature() const noexcept { return curvature_; }
  /// Flux coefficients. Polar: size N+1 (faces at theta = i h). Periodic: size N, face i
  /// joins node i and node i+1 mod N.
  const Eigen::VectorXd& face_coefficients() const noexcept { return faces_; }

  double total_volume() const { return weights_.sum(); }
  /// |S^{n-1}| for polar grids; product of the non-reduced sides for tori.
  double transverse_measure() const noexcept { return transverse_; }
  /// Side lengths for tori (empty otherwise).
  const std::vector<double>& torus_sides() const noexcept { return torus_sides_; }

  ScalarField field(Eigen::VectorXd values) const { return ScalarField(kind_, std::move(values)); }
  void require_compatible(const ScalarField& u) const;

  friend Discretization discretize(const MetricState& state, int grid_n);

 private:
  Discretization() = default;

  GridKind kind_ = GridKind::kPolar;
  int dimension_ = 2;
  double spacing_ = 0.0;
  double time_ = 0.0;
  double transverse_ = 0.0;
  Eigen::VectorXd coordinates_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd log_scale_;
  Eigen::VectorXd curvature_;
  Eigen::VectorXd faces_;
  std::vector<double> torus_sides_;
};

/// Conformal states use their own grid and ignore grid_n.
Discretization discretize(const MetricState& state, int grid_n = kDefaultGridN);

/// Unit-sphere Laplacian (1/sin)(sin f')' on a theta grid (finite-volume, zero pole flux).
Eigen::VectorXd unit_sphere_laplacian(const ThetaGrid& grid, const Eigen::VectorXd& f);

/// (sum w_i |u_i|^p)^{1/p}; p = +inf gives max |u_i|.
double lp_norm(const ScalarField& u, double p, const Discretization& geom);
double weighted_inner(const ScalarField& u, const ScalarField& v, const Discretization& geom);

/// |grad u| at nodes: centred differences inside, second-order one-sided at the ends
/// of polar grids, centred periodic differences on tori.
ScalarField gradient_norm_field(const ScalarField& u, const Discretization& geom);

/// Matrix of -Delta + V in the node basis, self-adjoint for <u,v> = sum w_i u_i v_i.
struct DiscreteOperator {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd weights;
  Eigen::VectorXd potential;
  GridKind kind = GridKind::kPolar;

  int size() const { return static_cast<int>(weights.size()); }
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const { return matrix * u; }
};

DiscreteOperator laplacian_operator(const Discretization& geom);
DiscreteOperator schrodinger_operator(const Discretization& geom, const ScalarField& potential);
/// H + c, used for the shifted generator H + 1.
DiscreteOperator shifted(const DiscreteOperator& op, double shift);

/// One-dimensional periodic -d^2/dx^2 on N cells of [0, length), node weights length/N * cross_section.
DiscreteOperator periodic_laplacian(int grid_n, double length, double cross_section = 1.0);

/// (R + max_M R_-) / 4 with R_- = -min(0, R).
ScalarField potential_hs(const Discretization& geom);
/// R / 4.
ScalarField potential_lambda0(const Discretization& geom);

/// Eigenpairs ascending; eigenvector columns are orthonormal for the weighted inner product.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  Eigen::VectorXd weights;
};

/// Dense solve of D^{1/2} A D^{-1/2} with D = diag(w), mapped back to the weighted frame.
SpectralDecomposition decompose(const DiscreteOperator& op);

/// Smallest eigenvalue of -Delta + R/4.
double first_eigenvalue(const Discretization& geom);

/// sum w_i (|grad u|_i^2 + potential_hs_i u_i^2).
double quadratic_form(const Discretization& geom, const ScalarField& u);

}  // namespace rlab
