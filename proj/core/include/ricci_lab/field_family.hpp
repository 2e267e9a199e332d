#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ricci_lab/discrete_calculus.hpp"

namespace rlab {

/// Bumped whenever the generator changes, so stored hashes stay meaningful.
inline constexpr const char* kFieldFamilyVersion = "radial-family/1";

struct FieldFamilySpec {
  int budget = 200;
  std::uint64_t seed = 1;
};

struct LabeledField {
  std::string id;
  Eigen::VectorXd values;
};

struct FieldFamily {
  std::vector<LabeledField> fields;
  std::uint64_t hash = 0;
  std::string description;
  int budget = 0;
};

/// Constants, cos^k of the coordinate angle, and bumps of width 2^-j (j <= 5) at the pole
/// (or at x = 0 on tori).
std::vector<LabeledField> deterministic_fields(const Discretization& geom);

/// Low-pass filtered node noise. Field k depends only on (seed, k).
std::vector<LabeledField> random_smooth_fields(const Discretization& geom, int count,
                                               std::uint64_t seed, int first_index = 0);

/// Deterministic fields followed by random ones, budget fields in total.
FieldFamily make_field_family(const Discretization& geom, const FieldFamilySpec& spec);

/// 64-bit FNV-1a over the version tag and the raw bytes of every field.
std::uint64_t family_hash(const std::vector<LabeledField>& fields);

struct AscentResult {
  Eigen::VectorXd values;
  double objective = 0.0;
  int accepted = 0;
};

/// Sign-preserving multiplicative hill climb: u <- u * exp(step * smooth noise),
/// kept only when the objective increases.
AscentResult local_ascent(const Eigen::VectorXd& start,
                          const std::function<double(const Eigen::VectorXd&)>& objective,
                          GridKind kind, int steps, std::uint64_t seed, double step_size = 0.25);

}  // namespace rlab
