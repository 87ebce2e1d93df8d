#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "spca/covariance.hpp"

namespace spca {

enum class EigvecKind { ThreePeak, Step, Custom };
enum class InnovationKind { Gaussian, TwoSidedWeibull };

/// Data-generating process Xₜ = AXₜ₋₁ + εₜ with A = Σⱼ νʲ pⱼpⱼᵀ.
struct VarModelSpec {
  int p = 128;
  double nu = 0.6;
  EigvecKind eigvec = EigvecKind::ThreePeak;
  Vector custom;  // used when eigvec == Custom
  InnovationKind innovation = InnovationKind::Gaussian;
  double shape = 0.5;  // Weibull shape
  int burn_in = 1000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct VarModel {
  Matrix A;
  Matrix U;  // columns p₁,…,p_p
  CovarianceMatrix sigma0;
  Vector beta0;
  int s0 = 0;
};

/// Grid evaluation of the leading-eigenvector profile, normalized to unit
/// length. Step is 1 on (0.4, 0.6]; ThreePeak is three triangular bumps of
/// half-width 0.05 centred at 0.25, 0.5, 0.75.
Vector leading_vector(EigvecKind kind, int p, const Vector& custom = {});

/// Orthonormal basis whose first column is p1: a Householder reflection
/// mapping e₁ to p1, with the remaining columns rotated by a Haar-random
/// orthogonal matrix drawn from `seed`. seed == 0 skips the rotation.
Matrix complete_basis(const Vector& p1, std::uint64_t seed);

VarModel build_model(const VarModelSpec& spec);

/// Scale making a Weibull(shape) variable have unit second moment:
/// Γ(1 + 2/shape)^{-1/2}.
double weibull_unit_scale(double shape);

/// Draws one innovation vector with i.i.d. mean-zero unit-variance entries.
class InnovationSampler {
 public:
  InnovationSampler(InnovationKind kind, double shape);

  void fill(std::mt19937_64& rng, Eigen::Ref<Vector> out);

 private:
  InnovationKind kind_;
  std::normal_distribution<double> normal_;
  std::weibull_distribution<double> weibull_;
  std::bernoulli_distribution coin_;
};

Vector sample_innovation(InnovationKind kind, double shape, int p, std::mt19937_64& rng);

/// burn_in + n steps from X₀ = 0 seeded with spec.seed; returns the last n.
TimeSeriesMatrix simulate(const VarModel& model, const VarModelSpec& spec, int n);

/// Deterministic per-replication seed (splitmix64 mixing).
std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t index);

/// Flat key=value format with keys p, nu, eigvec, innovation, shape,
/// burn_in, seed. Custom vectors are written as eigvec=custom:v1;v2;...
std::string format_model_spec(const VarModelSpec& spec);
VarModelSpec parse_model_spec(std::string_view text);

std::string to_string(EigvecKind kind);
std::string to_string(InnovationKind kind);
EigvecKind parse_eigvec_kind(std::string_view s);
InnovationKind parse_innovation_kind(std::string_view s);

}  // namespace spca
