#pragma once

// Closed-form evaluators for the rate and oracle-inequality quantities of
// the sparse rank-one estimators. Universal constants are inputs (default 1);
// nothing here estimates them.

#include <string>
#include <string_view>

namespace spca::theory {

struct TheoryParams {
  double sigma_gap = 1.0;  // σ, eigen-gap of Σ₀
  double eta = 0.1;        // η, radius of the local region (σ > 3η)
  double b = 1.0;
  double b_tilde = 1.0;
  double c_tilde = 1.0;
  double c = 1.0;
  double C = 2.0;          // universal constant, > 1
  double rho_sum = 1.0;    // Σ_{l=0}^n ρ(l), user supplied
  double phi_max = 1.0;
  int s0 = 1;
  int s = 0;
  double K = 1.0;
  double gamma1 = 1.0;
  double gamma2 = 2.0;
  double C1 = 1.0;
  double C2 = 1.0;

  /// Throws PreconditionError unless σ > 3η, C > 1 and the positive fields
  /// are positive.
  void validate() const;
};

/// √(2(b+1) log p / (c̃ n))
double zeta_n(const TheoryParams& params, double p, double n);

/// (σ − 3η) / (φ_max Σρ)
double tau_n(const TheoryParams& params);

/// φ_max ζₙ Σρ
double gamma_n(const TheoryParams& params, double p, double n);

struct OracleBound {
  double A_n;
  double B_n;
  double bound;       // B_n s₀ λ₁, bound on ‖β̂ − β⁰‖₁
  double prob_floor;  // lower bound on the probability the bound holds
};

/// Gaussian-case ℓ1 oracle inequality. Requires 0 < ξₙ < τₙ and λ₁ > A_n.
OracleBound oracle_l1_gaussian(const TheoryParams& params, double p, double n, double xi_n,
                               double lambda1, double beta0_l1norm);

struct RateL1 {
  double lambda1_star;  // √s₀ φ²_max √(log p / n)
  double l1_rate;       // s₀^{3/2} φ²_max √(log p / n)
  double l2sq_rate;     // s₀³ φ⁴_max log p / n
};

RateL1 rate_l1_gaussian(const TheoryParams& params, double p, double n);

/// γ = (1/γ₁ + 2/γ₂)^{-1}
double gamma_exponent(double gamma1, double gamma2);

/// Whether the combined tail exponent is below one, as the sub-Weibull
/// results require.
bool gamma_exponent_below_one(double gamma1, double gamma2);

struct SubWeibullBounds {
  double K2;    // 2^{2/γ₂} K²
  double tau1n;
  double tau2n;
};

/// Requires n > 4 in the sense of the theorem; only n > 1 is enforced so the
/// formulas stay evaluable at small test points.
SubWeibullBounds sub_weibull_bounds(const TheoryParams& params, double p, double n);

/// Sub-Weibull ℓ1 oracle inequality. Requires τ₁ₙ < ξₙ < σ − 3η, ζₙ > τ₂ₙ and
/// λ₁ > ((C+1)/(C−1)) ζₙ ‖β⁰‖₁; violations are reported by name.
OracleBound oracle_l1_subweibull(const TheoryParams& params, double p, double n, double xi_n,
                                 double zeta, double lambda1, double beta0_l1norm);

struct L0Bound {
  int s_tilde;
  double zeta_tilde;
  double gamma_tilde;
  double delta_n;  // bound on ‖β̂⁰ − β⁰‖₂
};

/// ℓ0 oracle inequality quantities. Requires σ − 3η − γ̃ₙ > 0.
L0Bound l0_bound(const TheoryParams& params, double p, double n, double lambda0);

/// δₙ from its ingredients, exposed for direct evaluation.
double l0_delta(double gamma_tilde, double phi_max, double gap, int s_tilde, double lambda0);

struct Lambdas {
  double lambda0;  // 3 log p / n
  double lambda1;  // (log p / n)^{1/2} / 3
};

Lambdas default_lambdas(double p, double n);

/// Flat key=value text, one field per line, keys named as the struct
/// fields (sigma_gap, eta, b, b_tilde, c_tilde, c, C, rho_sum, phi_max, s0,
/// s, K, gamma1, gamma2, C1, C2). Missing keys keep their defaults.
TheoryParams parse_theory_params(std::string_view text);
std::string format_theory_params(const TheoryParams& params);

/// Σ_{l=0}^{n} νˡ. A geometric-decay proxy for the ρ-mixing sum of the VAR
/// design, not the true ρ-mixing coefficients.
double rho_sum_proxy(double nu, int n);

}  // namespace spca::theory
