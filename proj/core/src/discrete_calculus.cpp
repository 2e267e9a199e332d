#include "ricci_lab/discrete_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "ricci_lab/errors.hpp"

namespace rlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Assembles W^{-1} L from symmetric face couplings.
Eigen::MatrixXd assemble_from_faces(GridKind kind, const Eigen::VectorXd& weights,
                                    const Eigen::VectorXd& faces) {
  const int n = static_cast<int>(weights.size());
  Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(n, n);
  auto couple = [&](int a, int b, double c) {
    stiffness(a, a) += c;
    stiffness(b, b) += c;
    stiffness(a, b) -= c;
    stiffness(b, a) -= c;
  };
  if (kind == GridKind::kPolar) {
    // Interior faces 1..N-1; faces 0 and N are the poles and carry no flux.
    for (int f = 1; f < n; ++f) couple(f - 1, f, faces[f]);
  } else {
    for (int f = 0; f < n; ++f) couple(f, (f + 1) % n, faces[f]);
  }
  return weights.cwiseInverse().asDiagonal() * stiffness;
}

}  // namespace

void Discretization::require_compatible(const ScalarField& u) const {
  if (u.size() != size() || u.kind() != kind_)
    throw DomainError("field does not live on this grid (size " + std::to_string(u.size()) +
                      " vs " + std::to_string(size()) + ")");
}

Eigen::VectorXd unit_sphere_laplacian(const ThetaGrid& grid, const Eigen::VectorXd& f) {
  const int n = grid.size();
  const double h = grid.spacing();
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    const double up = i + 1 < n ? std::sin(grid.face(i + 1)) * (f[i + 1] - f[i]) : 0.0;
    const double down = i > 0 ? std::sin(grid.face(i)) * (f[i] - f[i - 1]) : 0.0;
    out[i] = (up - down) / (std::sin(grid.node(i)) * h * h);
  }
  return out;
}

Discretization discretize(const MetricState& state, int grid_n) {
  Discretization geom;
  geom.dimension_ = state.dimension();
  geom.time_ = state.time();

  if (state.is_flat_torus()) {
    if (grid_n < 3) throw DomainError("periodic grid needs at least 3 nodes");
    const double stretch = std::sqrt(state.scale());
    for (double side : state.flat_torus().side_lengths) geom.torus_sides_.push_back(side * stretch);
    const double length = geom.torus_sides_.front();
    double cross = 1.0;
    for (std::size_t k = 1; k < geom.torus_sides_.size(); ++k) cross *= geom.torus_sides_[k];
    const double h = length / grid_n;
    geom.kind_ = GridKind::kPeriodic;
    geom.spacing_ = h;
    geom.transverse_ = cross;
    geom.coordinates_.resize(grid_n);
    for (int i = 0; i < grid_n; ++i) geom.coordinates_[i] = (i + 0.5) * h;
    geom.weights_ = Eigen::VectorXd::Constant(grid_n, h * cross);
    geom.log_scale_ = Eigen::VectorXd::Zero(grid_n);
    geom.curvature_ = Eigen::VectorXd::Zero(grid_n);
    geom.faces_ = Eigen::VectorXd::Constant(grid_n, cross / h);
    return geom;
  }

  geom.kind_ = GridKind::kPolar;
  if (state.is_round_sphere()) {
    if (grid_n < 3) throw DomainError("theta grid needs at least 3 nodes");
    const ThetaGrid grid(grid_n);
    const int n = geom.dimension_;
    const double r = sphere_radius(state);
    const double h = grid.spacing();
    const double omega = sphere_area(n - 1);
    geom.spacing_ = h;
    geom.transverse_ = omega;
    geom.coordinates_ = grid.nodes();
    geom.weights_.resize(grid_n);
    for (int i = 0; i < grid_n; ++i)
      geom.weights_[i] = omega * std::pow(r, n) * std::pow(std::sin(grid.node(i)), n - 1) * h;
    geom.log_scale_ = Eigen::VectorXd::Constant(grid_n, std::log(r));
    geom.curvature_ = Eigen::VectorXd::Constant(grid_n, n * (n - 1) / (r * r));
    geom.faces_.resize(grid_n + 1);
    for (int f = 0; f <= grid_n; ++f)
      geom.faces_[f] = omega * std::pow(r, n - 2) * std::pow(std::sin(grid.face(f)), n - 1) / h;
    geom.faces_[0] = 0.0;
    geom.faces_[grid_n] = 0.0;
    return geom;
  }

  const auto& conformal = state.conformal();
  const ThetaGrid& grid = conformal.grid;
  const int size = grid.size();
  const double h = grid.spacing();
  geom.spacing_ = h;
  geom.transverse_ = kTwoPi;
  geom.coordinates_ = grid.nodes();
  geom.log_scale_ = conformal.phi;
  const Eigen::VectorXd area_factor = (2.0 * conformal.phi.array()).exp();
  geom.weights_ = area_factor.cwiseProduct(grid.base_weights());
  // R = e^{-2 phi} (2 - 2 Lap phi); in 2D the Dirichlet form is conformally invariant.
  const Eigen::VectorXd lap = unit_sphere_laplacian(grid, conformal.phi);
  geom.curvature_ = (2.0 - 2.0 * lap.array()) / area_factor.array();
  geom.faces_.resize(size + 1);
  for (int f = 0; f <= size; ++f) geom.faces_[f] = kTwoPi * std::sin(grid.face(f)) / h;
  geom.faces_[0] = 0.0;
  geom.faces_[size] = 0.0;
  return geom;
}

double lp_norm(const ScalarField& u, double p, const Discretization& geom) {
  geom.require_compatible(u);
  if (!(p >= 1.0)) throw DomainError("Lp norm needs p >= 1");
  if (std::isinf(p)) return u.values().cwiseAbs().maxCoeff();
  const Eigen::ArrayXd mag = u.values().array().abs();
  return std::pow((geom.weights().array() * mag.pow(p)).sum(), 1.0 / p);
}

double weighted_inner(const ScalarField& u, const ScalarField& v, const Discretization& geom) {
  geom.require_compatible(u);
  geom.require_compatible(v);
  return (geom.weights().array() * u.values().array() * v.values().array()).sum();
}

ScalarField gradient_norm_field(const ScalarField& u, const Discretization& geom) {
  geom.require_compatible(u);
  const Eigen::VectorXd& x = u.values();
  const int n = geom.size();
  const double h = geom.spacing();
  Eigen::VectorXd grad(n);
  if (geom.kind() == GridKind::kPeriodic) {
    for (int i = 0; i < n; ++i) grad[i] = std::abs(x[(i + 1) % n] - x[(i + n - 1) % n]) / (2.0 * h);
    return geom.field(std::move(grad));
  }
  for (int i = 1; i + 1 < n; ++i) grad[i] = (x[i + 1] - x[i - 1]) / (2.0 * h);
  grad[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h);
  grad[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / (2.0 * h);
  grad = grad.cwiseAbs().cwiseProduct((-geom.log_scale().array()).exp().matrix());
  return geom.field(std::move(grad));
}

DiscreteOperator laplacian_operator(const Discretization& geom) {
  DiscreteOperator op;
  op.kind = geom.kind();
  op.weights = geom.weights();
  op.potential = Eigen::VectorXd::Zero(geom.size());
  op.matrix = assemble_from_faces(geom.kind(), geom.weights(), geom.face_coefficients());
  return op;
}

DiscreteOperator schrodinger_operator(const Discretization& geom, const ScalarField& potential) {
  geom.require_compatible(potential);
  DiscreteOperator op = laplacian_operator(geom);
  op.potential = potential.values();
  op.matrix.diagonal() += potential.values();
  return op;
}

DiscreteOperator shifted(const DiscreteOperator& op, double shift) {
  DiscreteOperator out = op;
  out.potential.array() += shift;
  out.matrix.diagonal().array() += shift;
  return out;
}

DiscreteOperator periodic_laplacian(int grid_n, double length, double cross_section) {
  if (grid_n < 3) throw DomainError("periodic grid needs at least 3 nodes");
  if (!(length > 0.0)) throw DomainError("periodic grid length must be > 0");
  const double h = length / grid_n;
  DiscreteOperator op;
  op.kind = GridKind::kPeriodic;
  op.weights = Eigen::VectorXd::Constant(grid_n, h * cross_section);
  op.potential = Eigen::VectorXd::Zero(grid_n);
  op.matrix = assemble_from_faces(GridKind::kPeriodic, op.weights,
                                  Eigen::VectorXd::Constant(grid_n, cross_section / h));
  return op;
}

ScalarField potential_hs(const Discretization& geom) {
  const Eigen::VectorXd& r = geom.scalar_curvature();
  const double max_negative = std::max(0.0, -r.minCoeff());
  return geom.field((r.array() + max_negative) / 4.0);
}

ScalarField potential_lambda0(const Discretization& geom) {
  return geom.field(geom.scalar_curvature() / 4.0);
}

SpectralDecomposition decompose(const DiscreteOperator& op) {
  const Eigen::ArrayXd root = op.weights.array().sqrt();
  Eigen::MatrixXd sym = root.matrix().asDiagonal() * op.matrix * root.inverse().matrix().asDiagonal();
  sym = 0.5 * (sym + sym.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolve failed");
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = root.inverse().matrix().asDiagonal() * solver.eigenvectors();
  out.weights = op.weights;
  return out;
}

double first_eigenvalue(const Discretization& geom) {
  return decompose(schrodinger_operator(geom, potential_lambda0(geom))).eigenvalues[0];
}

double quadratic_form(const Discretization& geom, const ScalarField& u) {
  const Eigen::ArrayXd grad = gradient_norm_field(u, geom).values().array();
  const Eigen::ArrayXd pot = potential_hs(geom).values().array();
  const Eigen::ArrayXd x = u.values().array();
  return (geom.weights().array() * (grad.square() + pot * x.square())).sum();
}

}  // namespace rlab
