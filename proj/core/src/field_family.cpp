#include "ricci_lab/field_family.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "ricci_lab/errors.hpp"

namespace rlab {

namespace {

constexpr int kMaxPower = 6;
constexpr int kMaxBumpLevel = 5;

// Angle in [0, pi] measured from the pole (polar) or from x = 0 (periodic).
Eigen::ArrayXd pole_angle(const Discretization& geom) {
  if (geom.kind() == GridKind::kPolar) return geom.coordinates().array();
  const double length = geom.torus_sides().front();
  const Eigen::ArrayXd a = geom.coordinates().array() * (2.0 * std::numbers::pi / length);
  return a.min(2.0 * std::numbers::pi - a);
}

// Signed angle coordinate whose cosine is the first harmonic.
Eigen::ArrayXd harmonic_angle(const Discretization& geom) {
  if (geom.kind() == GridKind::kPolar) return geom.coordinates().array();
  return geom.coordinates().array() * (2.0 * std::numbers::pi / geom.torus_sides().front());
}

// One [1,2,1]/4 pass; polar ends reflect, periodic grids wrap.
void smooth_once(Eigen::VectorXd& u, GridKind kind) {
  const Eigen::Index n = u.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index lo = i - 1, hi = i + 1;
    if (kind == GridKind::kPeriodic) {
      lo = (lo + n) % n;
      hi = hi % n;
    } else {
      lo = std::max<Eigen::Index>(lo, 0);
      hi = std::min<Eigen::Index>(hi, n - 1);
    }
    out[i] = 0.25 * u[lo] + 0.5 * u[i] + 0.25 * u[hi];
  }
  u = out;
}

Eigen::VectorXd smooth_noise(std::mt19937_64& rng, Eigen::Index n, GridKind kind, int passes) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd u(n);
  for (Eigen::Index i = 0; i < n; ++i) u[i] = normal(rng);
  for (int k = 0; k < passes; ++k) smooth_once(u, kind);
  return u;
}

std::mt19937_64 field_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

void fnv_mix(std::uint64_t& h, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
}

}  // namespace

std::vector<LabeledField> deterministic_fields(const Discretization& geom) {
  const Eigen::Index n = geom.size();
  const Eigen::ArrayXd angle = harmonic_angle(geom);
  const Eigen::ArrayXd from_pole = pole_angle(geom);
  std::vector<LabeledField> out;
  out.push_back({"const", Eigen::VectorXd::Ones(n)});
  for (int k = 1; k <= kMaxPower; ++k)
    out.push_back({"cos^" + std::to_string(k), angle.cos().pow(k).matrix()});
  for (int j = 0; j <= kMaxBumpLevel; ++j) {
    const double width = std::ldexp(1.0, -j);
    out.push_back({"bump_" + std::to_string(j), (-(from_pole / width).square()).exp().matrix()});
  }
  return out;
}

std::vector<LabeledField> random_smooth_fields(const Discretization& geom, int count,
                                               std::uint64_t seed, int first_index) {
  std::vector<LabeledField> out;
  out.reserve(std::max(count, 0));
  for (int k = 0; k < count; ++k) {
    const int index = first_index + k;
    std::mt19937_64 rng = field_rng(seed, static_cast<std::uint64_t>(index));
    // Smoothing depth cycles through 1..32 passes; odd indices are exponentiated to
    // give positive, concentrating profiles.
    const int passes = 1 << (index % 6);
    Eigen::VectorXd u = smooth_noise(rng, geom.size(), geom.kind(), passes);
    if (index % 2 == 1) {
      const double spread = std::max(u.cwiseAbs().maxCoeff(), 1e-300);
      u = (u.array() * (2.0 / spread)).exp().matrix();
    }
    out.push_back({"rand_" + std::to_string(index), std::move(u)});
  }
  return out;
}

std::uint64_t family_hash(const std::vector<LabeledField>& fields) {
  std::uint64_t h = 1469598103934665603ULL;
  const std::string version = kFieldFamilyVersion;
  fnv_mix(h, version.data(), version.size());
  for (const LabeledField& f : fields) {
    fnv_mix(h, f.id.data(), f.id.size());
    fnv_mix(h, f.values.data(), sizeof(double) * static_cast<std::size_t>(f.values.size()));
  }
  return h;
}

FieldFamily make_field_family(const Discretization& geom, const FieldFamilySpec& spec) {
  if (spec.budget < 1) throw DomainError("field budget must be positive");
  FieldFamily family;
  family.budget = spec.budget;
  family.fields = deterministic_fields(geom);
  if (static_cast<int>(family.fields.size()) > spec.budget) family.fields.resize(spec.budget);
  const int deterministic = static_cast<int>(family.fields.size());
  for (LabeledField& f : random_smooth_fields(geom, spec.budget - deterministic, spec.seed))
    family.fields.push_back(std::move(f));
  family.hash = family_hash(family.fields);
  family.description = std::string(kFieldFamilyVersion) + ": " + std::to_string(deterministic) +
                       " deterministic + " + std::to_string(spec.budget - deterministic) +
                       " random (seed " + std::to_string(spec.seed) + ")";
  return family;
}

AscentResult local_ascent(const Eigen::VectorXd& start,
                          const std::function<double(const Eigen::VectorXd&)>& objective,
                          GridKind kind, int steps, std::uint64_t seed, double step_size) {
  AscentResult result{start, objective(start), 0};
  std::mt19937_64 rng = field_rng(seed, 0xA5CE47ULL);
  for (int s = 0; s < steps; ++s) {
    Eigen::VectorXd noise = smooth_noise(rng, start.size(), kind, 8);
    const double scale = noise.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) continue;
    const Eigen::VectorXd trial =
        result.values.cwiseProduct((noise.array() * (step_size / scale)).exp().matrix());
    const double value = objective(trial);
    if (std::isfinite(value) && value > result.objective) {
      result.values = trial;
      result.objective = value;
      ++result.accepted;
    }
  }
  return result;
}

}  // namespace rlab
