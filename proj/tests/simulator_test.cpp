#include "spca/simulator.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "spca/errors.hpp"
#include "test_support.hpp"

namespace spca {
namespace {

int count_nonzero(const Vector& v) {
  int k = 0;
  for (double x : v) k += x != 0.0;
  return k;
}

VarModelSpec custom_spec(int p, double nu, const Vector& p1) {
  VarModelSpec spec;
  spec.p = p;
  spec.nu = nu;
  spec.eigvec = EigvecKind::Custom;
  spec.custom = p1;
  return spec;
}

TEST(LeadingVector, CustomUnchanged) {
  Vector c = Vector::Zero(6);
  c(0) = 0.6;
  c(1) = 0.8;
  EXPECT_TRUE(leading_vector(EigvecKind::Custom, 6, c).isApprox(c));
  EXPECT_THROW((void)leading_vector(EigvecKind::Custom, 6, Vector::Zero(6)), PreconditionError);
}

TEST(LeadingVector, StepAtTen) {
  const Vector v = leading_vector(EigvecKind::Step, 10);
  Vector expected = Vector::Zero(10);
  expected(4) = expected(5) = 1.0 / std::sqrt(2.0);
  EXPECT_LT((v - expected).norm(), 1e-15);
}

TEST(LeadingVector, SupportCountsAt512) {
  const Vector peak = leading_vector(EigvecKind::ThreePeak, 512);
  EXPECT_EQ(count_nonzero(peak), 153);
  EXPECT_NE(peak(102), 0.0);  // j = 103
  EXPECT_EQ(peak(101), 0.0);
  EXPECT_NE(peak(408), 0.0);  // j = 409
  EXPECT_EQ(peak(409), 0.0);
  EXPECT_NEAR(peak.norm(), 1.0, 1e-14);

  const Vector step = leading_vector(EigvecKind::Step, 512);
  EXPECT_EQ(count_nonzero(step), 103);
  EXPECT_NE(step(204), 0.0);
  EXPECT_EQ(step(203), 0.0);
  EXPECT_NE(step(306), 0.0);
  EXPECT_EQ(step(307), 0.0);
}

TEST(CompleteBasis, OrthonormalWithFirstColumn) {
  Vector e1 = Vector::Zero(4);
  e1(0) = 1;
  Matrix u = complete_basis(e1, 0);
  EXPECT_TRUE((u.transpose() * u).isIdentity(1e-12));
  EXPECT_TRUE(u.col(0).isApprox(e1));

  Vector d(2);
  d << 1, 1;
  d /= std::sqrt(2.0);
  u = complete_basis(d, 5);
  EXPECT_NEAR(std::abs(u(0, 1)), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(u(0, 1), -u(1, 1), 1e-12);

  const Vector p1 = leading_vector(EigvecKind::ThreePeak, 64);
  for (std::uint64_t seed : {0u, 3u}) {
    u = complete_basis(p1, seed);
    EXPECT_TRUE((u.transpose() * u).isIdentity(1e-12));
    EXPECT_EQ(u.col(0), p1);
  }
}

TEST(BuildModel, SmallExample) {
  Vector e1 = Vector::Zero(2);
  e1(0) = 1;
  const VarModel m = build_model(custom_spec(2, 0.5, e1));
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 4.0 / 3.0;
  expected(1, 1) = 16.0 / 15.0;
  EXPECT_LT((m.sigma0.data() - expected).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(m.beta0(0), std::sqrt(4.0 / 3.0), 1e-14);
}

TEST(BuildModel, WhiteNoise) {
  VarModelSpec spec;
  spec.p = 16;
  spec.nu = 0.0;
  const VarModel m = build_model(spec);
  EXPECT_EQ(m.A.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT((m.sigma0.data() - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((m.beta0 - m.U.col(0)).norm(), 1e-14);
}

TEST(BuildModel, EigenstructureMatchesReference) {
  for (double nu : {0.85, 0.6, 0.35, 0.1}) {
    VarModelSpec spec;
    spec.p = 32;
    spec.nu = nu;
    const VarModel m = build_model(spec);
    // ‖β⁰‖ = (1 − ν²)^{-1/2}; 0.85 gives 1.8983159915 (mpmath).
    EXPECT_NEAR(m.beta0.norm(), 1.0 / std::sqrt(1.0 - nu * nu), 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.sigma0.data());
    const auto& ev = es.eigenvalues();
    EXPECT_NEAR(ev(31) / ev(30), 1.0 + nu * nu, 1e-9);
    // Σ₀ solves the Lyapunov equation Σ₀ = AΣ₀Aᵀ + I.
    const Matrix lyap = m.A * m.sigma0.data() * m.A.transpose() + Matrix::Identity(32, 32);
    EXPECT_LT((lyap - m.sigma0.data()).cwiseAbs().maxCoeff(), 1e-10);
    const Vector b = beta0(m.sigma0);
    EXPECT_LT(std::min((b - m.beta0).norm(), (b + m.beta0).norm()), 1e-8);
  }
  EXPECT_NEAR(build_model(VarModelSpec{.p = 8, .nu = 0.85}).beta0.norm(), 1.8983159915, 1e-9);
}

TEST(Innovation, WeibullScale) {
  EXPECT_NEAR(weibull_unit_scale(0.5), 1.0 / std::sqrt(24.0), 1e-15);
  EXPECT_NEAR(weibull_unit_scale(0.5), 0.2041241, 1e-7);
  EXPECT_NEAR(weibull_unit_scale(2.0), 1.0, 1e-15);
}

TEST(Innovation, MomentsGaussianAndWeibull) {
  std::mt19937_64 rng(51);
  for (InnovationKind kind : {InnovationKind::Gaussian, InnovationKind::TwoSidedWeibull}) {
    const int draws = 200000;
    double sum = 0.0, sq = 0.0;
    InnovationSampler sampler(kind, 0.5);
    Vector buf(100);
    for (int i = 0; i < draws / 100; ++i) {
      sampler.fill(rng, buf);
      sum += buf.sum();
      sq += buf.squaredNorm();
    }
    EXPECT_NEAR(sum / draws, 0.0, 0.03);
    EXPECT_NEAR(sq / draws, 1.0, 0.1);
  }
}

TEST(Simulate, ReproducibleAndSeedSensitive) {
  VarModelSpec spec;
  spec.p = 8;
  spec.burn_in = 50;
  const VarModel m = build_model(spec);
  const Matrix a = simulate(m, spec, 20).data();
  const Matrix b = simulate(m, spec, 20).data();
  EXPECT_EQ(a, b);
  spec.seed = 2;
  EXPECT_NE(a, simulate(m, spec, 20).data());
}

TEST(Simulate, SingleStepIsInnovation) {
  VarModelSpec spec;
  spec.p = 5;
  spec.burn_in = 0;
  spec.nu = 0.7;
  const VarModel m = build_model(spec);
  const Matrix x = simulate(m, spec, 1).data();
  std::mt19937_64 rng(spec.seed);
  const Vector eps = sample_innovation(spec.innovation, spec.shape, 5, rng);
  EXPECT_EQ(Vector(x.row(0).transpose()), eps);
}

TEST(Simulate, RecursionHolds) {
  VarModelSpec spec;
  spec.p = 6;
  spec.burn_in = 0;
  spec.nu = 0.5;
  spec.innovation = InnovationKind::TwoSidedWeibull;
  const VarModel m = build_model(spec);
  const Matrix x = simulate(m, spec, 30).data();
  std::mt19937_64 rng(spec.seed);
  Vector prev = Vector::Zero(6);
  for (int t = 0; t < 30; ++t) {
    const Vector eps = sample_innovation(spec.innovation, spec.shape, 6, rng);
    const Vector expected = m.A * prev + eps;
    EXPECT_LT((Vector(x.row(t).transpose()) - expected).norm(), 1e-12);
    prev = expected;
  }
}

TEST(Simulate, SampleCovarianceApproachesSigma0) {
  VarModelSpec spec;
  spec.p = 4;
  spec.nu = 0.6;
  spec.eigvec = EigvecKind::Step;
  const VarModel m = build_model(spec);
  const CovarianceMatrix s = sample_covariance(simulate(m, spec, 50000));
  EXPECT_LT((s.data() - m.sigma0.data()).norm() / m.sigma0.data().norm(), 0.05);
}

TEST(ReplicationSeed, DistinctAndStable) {
  EXPECT_EQ(replication_seed(7, 3), replication_seed(7, 3));
  EXPECT_NE(replication_seed(7, 3), replication_seed(7, 4));
  EXPECT_NE(replication_seed(7, 3), replication_seed(8, 3));
}

TEST(ModelSpecText, RoundTrip) {
  VarModelSpec spec;
  spec.p = 6;
  spec.nu = 0.35;
  spec.innovation = InnovationKind::TwoSidedWeibull;
  spec.shape = 0.7;
  spec.burn_in = 12;
  spec.seed = 99;
  VarModelSpec back = parse_model_spec(format_model_spec(spec));
  EXPECT_EQ(back.p, 6);
  EXPECT_EQ(back.nu, 0.35);
  EXPECT_EQ(back.innovation, InnovationKind::TwoSidedWeibull);
  EXPECT_EQ(back.shape, 0.7);
  EXPECT_EQ(back.burn_in, 12);
  EXPECT_EQ(back.seed, 99u);

  Vector c(3);
  c << 0.1, -0.25, 1.0 / 3.0;
  spec = custom_spec(3, 0.2, c);
  back = parse_model_spec(format_model_spec(spec));
  EXPECT_EQ(back.eigvec, EigvecKind::Custom);
  EXPECT_EQ(back.custom, c);

  EXPECT_THROW((void)parse_model_spec("p=4\nbogus=1\n"), InputDataError);
  EXPECT_THROW((void)parse_model_spec("nu=abc\n"), InputDataError);
}

TEST(VarModelSpec, Validation) {
  VarModelSpec spec;
  spec.nu = 1.0;
  EXPECT_THROW(spec.validate(), PreconditionError);
  spec.nu = -0.1;
  EXPECT_THROW(spec.validate(), PreconditionError);
  spec = VarModelSpec{};
  spec.eigvec = EigvecKind::Custom;
  spec.custom = Vector::Ones(3);
  EXPECT_THROW(spec.validate(), DimensionError);
}

}  // namespace
}  // namespace spca
