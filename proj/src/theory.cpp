#include "spca/theory.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <cmath>
#include <sstream>
#include <string>

#include "spca/errors.hpp"

namespace spca::theory {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

void TheoryParams::validate() const {
  require(sigma_gap > 3.0 * eta, "sigma_gap must exceed 3*eta");
  require(eta > 0.0, "eta must be positive");
  require(C > 1.0, "C must exceed 1");
  require(b > 0.0 && b_tilde > 0.0 && c_tilde > 0.0 && c > 0.0, "b, b_tilde, c_tilde, c must be positive");
  require(rho_sum >= 0.0, "rho_sum must be nonnegative");
  require(phi_max > 0.0, "phi_max must be positive");
  require(s0 >= 1 && s >= 0, "s0 must be positive and s nonnegative");
  require(K > 0.0 && gamma1 > 0.0 && gamma2 > 0.0 && C1 > 0.0 && C2 > 0.0,
          "K, gamma1, gamma2, C1, C2 must be positive");
}

double zeta_n(const TheoryParams& params, double p, double n) {
  require(p >= 2.0, "zeta_n needs p >= 2");
  require(n >= 1.0, "zeta_n needs n >= 1");
  return std::sqrt(2.0 * (params.b + 1.0) * std::log(p) / (params.c_tilde * n));
}

double tau_n(const TheoryParams& params) {
  require(params.rho_sum > 0.0, "tau_n undefined: rho_sum must be positive");
  require(params.phi_max > 0.0, "tau_n undefined: phi_max must be positive");
  return (params.sigma_gap - 3.0 * params.eta) / (params.phi_max * params.rho_sum);
}

double gamma_n(const TheoryParams& params, double p, double n) {
  return params.phi_max * zeta_n(params, p, n) * params.rho_sum;
}

OracleBound oracle_l1_gaussian(const TheoryParams& params, double p, double n, double xi_n,
                               double lambda1, double beta0_l1norm) {
  require(params.C > 1.0, "C must exceed 1");
  const double tau = tau_n(params);
  require(xi_n > 0.0 && xi_n < tau,
          "xi_n must satisfy 0 < xi_n < tau_n = " + fmt(tau) + " (got " + fmt(xi_n) + ")");
  const double zeta = zeta_n(params, p, n);
  const double ratio = (params.C + 1.0) / (params.C - 1.0);
  OracleBound out{};
  out.A_n = ratio * params.phi_max * beta0_l1norm * (zeta * params.rho_sum);
  require(lambda1 > out.A_n,
          "lambda1 must exceed A_n = " + fmt(out.A_n) + " (got " + fmt(lambda1) + ")");
  const double denom =
      params.sigma_gap - 3.0 * params.eta - params.phi_max * xi_n * params.rho_sum;
  out.B_n = 2.0 * (params.C + 1.0) * (params.C + 1.0) / denom;
  out.bound = out.B_n * params.s0 * lambda1;
  out.prob_floor = 1.0 - std::exp(-2.0 * params.b * std::log(p)) -
                   2.0 * std::exp(-params.c_tilde * n * std::min(xi_n, xi_n * xi_n));
  return out;
}

RateL1 rate_l1_gaussian(const TheoryParams& params, double p, double n) {
  require(p >= 2.0, "rate needs p >= 2");
  require(n > 0.0, "rate needs n > 0");
  const double s0 = params.s0;
  const double phi2 = params.phi_max * params.phi_max;
  const double root = std::sqrt(std::log(p) / n);
  return RateL1{std::sqrt(s0) * phi2 * root, std::pow(s0, 1.5) * phi2 * root,
                s0 * s0 * s0 * phi2 * phi2 * std::log(p) / n};
}

double gamma_exponent(double gamma1, double gamma2) {
  require(gamma1 > 0.0 && gamma2 > 0.0, "gamma1 and gamma2 must be positive");
  return 1.0 / (1.0 / gamma1 + 2.0 / gamma2);
}

bool gamma_exponent_below_one(double gamma1, double gamma2) {
  return gamma_exponent(gamma1, gamma2) < 1.0;
}

SubWeibullBounds sub_weibull_bounds(const TheoryParams& params, double p, double n) {
  require(n > 1.0, "sub-Weibull bounds need n > 1");
  require(p >= 2.0, "sub-Weibull bounds need p >= 2");
  const double g = gamma_exponent(params.gamma1, params.gamma2);
  SubWeibullBounds out{};
  out.K2 = std::pow(2.0, 2.0 / params.gamma2) * params.K * params.K;
  const double c1 = std::pow(params.C1, 1.0 / g);
  out.tau1n = out.K2 * c1 * std::pow(std::log(n), 1.0 / g) / n;
  const double first =
      out.K2 * c1 * std::pow(std::log(n * p * p) + 2.0 * params.b_tilde * std::log(p), 1.0 / g) / n;
  const double second =
      out.K2 * std::sqrt(2.0 * params.C2 * (params.b_tilde + 1.0) * std::log(p) / n);
  out.tau2n = std::max(first, second);
  return out;
}

OracleBound oracle_l1_subweibull(const TheoryParams& params, double p, double n, double xi_n,
                                 double zeta, double lambda1, double beta0_l1norm) {
  require(params.C > 1.0, "C must exceed 1");
  const SubWeibullBounds sw = sub_weibull_bounds(params, p, n);
  const double gap = params.sigma_gap - 3.0 * params.eta;
  require(xi_n > sw.tau1n, "xi_n must exceed tau_1n = " + fmt(sw.tau1n) + " (got " + fmt(xi_n) + ")");
  require(xi_n < gap, "xi_n must be below sigma - 3 eta = " + fmt(gap) + " (got " + fmt(xi_n) + ")");
  require(zeta > sw.tau2n, "zeta_n must exceed tau_2n = " + fmt(sw.tau2n) + " (got " + fmt(zeta) + ")");
  OracleBound out{};
  out.A_n = (params.C + 1.0) / (params.C - 1.0) * zeta * beta0_l1norm;
  require(lambda1 > out.A_n,
          "lambda1 must exceed A_n = " + fmt(out.A_n) + " (got " + fmt(lambda1) + ")");
  out.B_n = 2.0 * (params.C + 1.0) * (params.C + 1.0) / (gap - xi_n);
  out.bound = out.B_n * params.s0 * lambda1;
  const double g = gamma_exponent(params.gamma1, params.gamma2);
  out.prob_floor = 1.0 - 2.0 * std::exp(-params.b_tilde * std::log(p * p)) -
                   2.0 * n * std::exp(-std::pow(xi_n * n, g) / (std::pow(sw.K2, g) * params.C1)) -
                   2.0 * std::exp(-xi_n * xi_n * n / (sw.K2 * sw.K2 * params.C2));
  return out;
}

double l0_delta(double gamma_tilde, double phi_max, double gap, int s_tilde, double lambda0) {
  const double denom = gap - gamma_tilde;
  require(denom > 0.0, "delta_n undefined: sigma - 3 eta - gamma_tilde must be positive (got " +
                           fmt(denom) + ")");
  const double gp = gamma_tilde * phi_max;
  return (gp + std::sqrt(gp * gp + 4.0 * denom * s_tilde * lambda0)) / (2.0 * denom);
}

L0Bound l0_bound(const TheoryParams& params, double p, double n, double lambda0) {
  require(p >= 2.0, "l0 bound needs p >= 2");
  require(n > 0.0, "l0 bound needs n > 0");
  L0Bound out{};
  out.s_tilde = std::max(params.s0, params.s);
  out.zeta_tilde = std::sqrt((params.b + 4.0 * out.s_tilde) * std::log(p) / (params.c * n));
  out.gamma_tilde = params.phi_max * out.zeta_tilde * params.rho_sum;
  out.delta_n = l0_delta(out.gamma_tilde, params.phi_max, params.sigma_gap - 3.0 * params.eta,
                         out.s_tilde, lambda0);
  return out;
}

Lambdas default_lambdas(double p, double n) {
  require(p >= 2.0, "default lambdas need p >= 2");
  require(n > 0.0, "default lambdas need n > 0");
  const double r = std::log(p) / n;
  return Lambdas{3.0 * r, std::sqrt(r) / 3.0};
}

double rho_sum_proxy(double nu, int n) {
  require(nu >= 0.0 && nu < 1.0, "rho proxy needs 0 <= nu < 1");
  require(n >= 0, "rho proxy needs n >= 0");
  double total = 0.0;
  double term = 1.0;
  for (int l = 0; l <= n; ++l) {
    total += term;
    term *= nu;
  }
  return total;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

TheoryParams parse_theory_params(std::string_view text) {
  TheoryParams params;
  std::istringstream is{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw InputDataError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(view.substr(0, eq)));
    const std::string value(trim(view.substr(eq + 1)));
    double v = 0.0;
    std::size_t used = 0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw InputDataError("line " + std::to_string(line_no) + ": invalid number '" + value + "'");
    }
    auto as_int = [&]() {
      if (v != std::floor(v)) throw InputDataError("key '" + key + "' needs an integer");
      return static_cast<int>(v);
    };
    if (key == "sigma_gap" || key == "sigma") params.sigma_gap = v;
    else if (key == "eta") params.eta = v;
    else if (key == "b") params.b = v;
    else if (key == "b_tilde") params.b_tilde = v;
    else if (key == "c_tilde") params.c_tilde = v;
    else if (key == "c") params.c = v;
    else if (key == "C") params.C = v;
    else if (key == "rho_sum") params.rho_sum = v;
    else if (key == "phi_max") params.phi_max = v;
    else if (key == "s0") params.s0 = as_int();
    else if (key == "s") params.s = as_int();
    else if (key == "K") params.K = v;
    else if (key == "gamma1") params.gamma1 = v;
    else if (key == "gamma2") params.gamma2 = v;
    else if (key == "C1") params.C1 = v;
    else if (key == "C2") params.C2 = v;
    else throw InputDataError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  return params;
}

std::string format_theory_params(const TheoryParams& p) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "sigma_gap=" << p.sigma_gap << "\neta=" << p.eta << "\nb=" << p.b << "\nb_tilde=" << p.b_tilde
     << "\nc_tilde=" << p.c_tilde << "\nc=" << p.c << "\nC=" << p.C << "\nrho_sum=" << p.rho_sum
     << "\nphi_max=" << p.phi_max << "\ns0=" << p.s0 << "\ns=" << p.s << "\nK=" << p.K
     << "\ngamma1=" << p.gamma1 << "\ngamma2=" << p.gamma2 << "\nC1=" << p.C1 << "\nC2=" << p.C2
     << '\n';
  return os.str();
}

}  // namespace spca::theory
