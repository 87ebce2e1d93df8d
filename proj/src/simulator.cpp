#include "spca/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <vector>

#include "spca/errors.hpp"
#include "spca/solver.hpp"

namespace spca {

void VarModelSpec::validate() const {
  if (p < 2) throw PreconditionError("model dimension p must be at least 2");
  if (!(nu >= 0.0 && nu < 1.0)) throw PreconditionError("nu must lie in [0, 1) for stationarity");
  if (innovation == InnovationKind::TwoSidedWeibull && !(shape > 0.0)) {
    throw PreconditionError("Weibull shape must be positive");
  }
  if (burn_in < 0) throw PreconditionError("burn_in must be nonnegative");
  if (eigvec == EigvecKind::Custom && custom.size() != p) {
    throw DimensionError("custom eigenvector length does not match p");
  }
}

namespace {

double step_profile(double x) { return (x > 0.4 && x <= 0.6) ? 1.0 : 0.0; }

double three_peak_profile(double x) {
  double v = 0.0;
  for (double c : {0.25, 0.5, 0.75}) v += std::max(0.0, 1.0 - std::abs(x - c) / 0.05);
  return v;
}

}  // namespace

Vector leading_vector(EigvecKind kind, int p, const Vector& custom) {
  if (p < 2) throw PreconditionError("leading vector needs p >= 2");
  Vector v(p);
  if (kind == EigvecKind::Custom) {
    if (custom.size() != p) throw DimensionError("custom eigenvector length does not match p");
    v = custom;
  } else {
    for (int j = 1; j <= p; ++j) {
      const double x = static_cast<double>(j) / static_cast<double>(p);
      v(j - 1) = kind == EigvecKind::Step ? step_profile(x) : three_peak_profile(x);
    }
  }
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw PreconditionError("leading-vector profile evaluates to zero on the grid");
  }
  return v / norm;
}

Matrix complete_basis(const Vector& p1, std::uint64_t seed) {
  const Eigen::Index p = p1.size();
  if (std::abs(p1.norm() - 1.0) > 1e-10) throw PreconditionError("complete_basis needs a unit vector");

  // Reflect e₁ onto ±p1 choosing the numerically stable sign.
  Matrix u = Matrix::Identity(p, p);
  Vector w = p1;
  const bool flip = p1(0) > 0.0;
  w(0) += flip ? 1.0 : -1.0;
  const double wn = w.squaredNorm();
  if (wn > 0.0) u.noalias() -= (2.0 / wn) * w * w.transpose();
  if (flip) u.col(0) = -u.col(0);
  u.col(0) = p1;

  if (seed != 0 && p > 2) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix g(p - 1, p - 1);
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(rng);
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    const Matrix rest = u.rightCols(p - 1) * q;
    u.rightCols(p - 1) = rest;
  }
  return u;
}

VarModel build_model(const VarModelSpec& spec) {
  spec.validate();
  const Vector p1 = leading_vector(spec.eigvec, spec.p, spec.custom);
  Matrix u = complete_basis(p1, spec.seed);

  Vector coef(spec.p);
  Vector var(spec.p);
  for (int j = 0; j < spec.p; ++j) {
    coef(j) = std::pow(spec.nu, j + 1);
    var(j) = 1.0 / (1.0 - coef(j) * coef(j));
  }
  Matrix a = u * coef.asDiagonal() * u.transpose();
  Matrix s0 = u * var.asDiagonal() * u.transpose();
  a = 0.5 * (a + a.transpose()).eval();
  s0 = 0.5 * (s0 + s0.transpose()).eval();

  const double phi_max = 1.0 / std::sqrt(1.0 - spec.nu * spec.nu);
  Vector b0 = phi_max * p1;
  const int s0_count = static_cast<int>(support_of(b0).size());
  return VarModel{std::move(a), std::move(u), CovarianceMatrix(std::move(s0)), std::move(b0),
                  s0_count};
}

double weibull_unit_scale(double shape) {
  if (!(shape > 0.0)) throw PreconditionError("Weibull shape must be positive");
  return 1.0 / std::sqrt(std::tgamma(1.0 + 2.0 / shape));
}

InnovationSampler::InnovationSampler(InnovationKind kind, double shape)
    : kind_(kind),
      normal_(0.0, 1.0),
      weibull_(kind == InnovationKind::TwoSidedWeibull ? shape : 1.0,
               kind == InnovationKind::TwoSidedWeibull ? weibull_unit_scale(shape) : 1.0),
      coin_(0.5) {}

void InnovationSampler::fill(std::mt19937_64& rng, Eigen::Ref<Vector> out) {
  if (kind_ == InnovationKind::Gaussian) {
    for (Eigen::Index j = 0; j < out.size(); ++j) out(j) = normal_(rng);
  } else {
    for (Eigen::Index j = 0; j < out.size(); ++j) {
      const double w = weibull_(rng);
      out(j) = coin_(rng) ? w : -w;
    }
  }
}

Vector sample_innovation(InnovationKind kind, double shape, int p, std::mt19937_64& rng) {
  InnovationSampler sampler(kind, shape);
  Vector v(p);
  sampler.fill(rng, v);
  return v;
}

TimeSeriesMatrix simulate(const VarModel& model, const VarModelSpec& spec, int n) {
  if (n < 1) throw PreconditionError("simulate needs n >= 1");
  const Eigen::Index p = model.A.rows();
  std::mt19937_64 rng(spec.seed);
  InnovationSampler sampler(spec.innovation, spec.shape);

  Matrix out(n, p);
  Vector x = Vector::Zero(p);
  Vector next(p);
  Vector eps(p);
  const long total = static_cast<long>(spec.burn_in) + n;
  for (long step = 0; step < total; ++step) {
    sampler.fill(rng, eps);
    next.noalias() = model.A * x;
    next += eps;
    x.swap(next);
    const long row = step - spec.burn_in;
    if (row >= 0) out.row(row) = x.transpose();
  }
  return TimeSeriesMatrix(std::move(out));
}

std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(master_seed ^ mix(index));
}

std::string to_string(EigvecKind kind) {
  switch (kind) {
    case EigvecKind::ThreePeak:
      return "threepeak";
    case EigvecKind::Step:
      return "step";
    case EigvecKind::Custom:
      return "custom";
  }
  return "?";
}

std::string to_string(InnovationKind kind) {
  return kind == InnovationKind::Gaussian ? "gaussian" : "weibull";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view key, std::string_view value) {
  std::string v(value);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    throw InputDataError("invalid number for key '" + std::string(key) + "': " + v);
  }
  return out;
}

long long parse_integer(std::string_view key, std::string_view value) {
  const double d = parse_double(key, value);
  if (d != std::floor(d)) {
    throw InputDataError("expected an integer for key '" + std::string(key) + "'");
  }
  return static_cast<long long>(d);
}

}  // namespace

EigvecKind parse_eigvec_kind(std::string_view s) {
  const std::string v = lower(trim(s));
  if (v == "threepeak" || v == "peak" || v == "three-peak") return EigvecKind::ThreePeak;
  if (v == "step") return EigvecKind::Step;
  if (v == "custom") return EigvecKind::Custom;
  throw InputDataError("unknown eigenvector kind: " + std::string(s));
}

InnovationKind parse_innovation_kind(std::string_view s) {
  const std::string v = lower(trim(s));
  if (v == "gaussian" || v == "normal") return InnovationKind::Gaussian;
  if (v == "weibull" || v == "two-sided-weibull") return InnovationKind::TwoSidedWeibull;
  throw InputDataError("unknown innovation kind: " + std::string(s));
}

std::string format_model_spec(const VarModelSpec& spec) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "p=" << spec.p << '\n';
  os << "nu=" << spec.nu << '\n';
  os << "eigvec=" << to_string(spec.eigvec);
  if (spec.eigvec == EigvecKind::Custom) {
    os << ':';
    for (Eigen::Index j = 0; j < spec.custom.size(); ++j) {
      if (j) os << ';';
      os << spec.custom(j);
    }
  }
  os << '\n';
  os << "innovation=" << to_string(spec.innovation) << '\n';
  os << "shape=" << spec.shape << '\n';
  os << "burn_in=" << spec.burn_in << '\n';
  os << "seed=" << spec.seed << '\n';
  return os.str();
}

VarModelSpec parse_model_spec(std::string_view text) {
  VarModelSpec spec;
  std::istringstream is{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw InputDataError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = lower(trim(view.substr(0, eq)));
    const std::string_view value = trim(view.substr(eq + 1));
    if (key == "p") {
      spec.p = static_cast<int>(parse_integer(key, value));
    } else if (key == "nu") {
      spec.nu = parse_double(key, value);
    } else if (key == "eigvec") {
      const auto colon = value.find(':');
      spec.eigvec = parse_eigvec_kind(value.substr(0, colon));
      if (spec.eigvec == EigvecKind::Custom) {
        if (colon == std::string_view::npos) {
          throw InputDataError("eigvec=custom needs values: custom:v1;v2;...");
        }
        std::vector<double> values;
        std::string_view rest = value.substr(colon + 1);
        while (!rest.empty()) {
          const auto semi = rest.find(';');
          values.push_back(parse_double(key, trim(rest.substr(0, semi))));
          if (semi == std::string_view::npos) break;
          rest.remove_prefix(semi + 1);
        }
        spec.custom = Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
      }
    } else if (key == "innovation") {
      spec.innovation = parse_innovation_kind(value);
    } else if (key == "shape") {
      spec.shape = parse_double(key, value);
    } else if (key == "burn_in") {
      spec.burn_in = static_cast<int>(parse_integer(key, value));
    } else if (key == "seed") {
      const std::string v(value);
      std::size_t used = 0;
      try {
        spec.seed = std::stoull(v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != v.size()) throw InputDataError("invalid seed: " + v);
    } else {
      throw InputDataError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return spec;
}

}  // namespace spca
