#include "spca/dataio.hpp"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "spca/errors.hpp"
#include "spca/theory.hpp"
#include "test_support.hpp"

namespace spca::dataio {
namespace {

PanelData parse(const std::string& text, CsvOptions options = {}) {
  std::istringstream is(text);
  return read_csv(is, options);
}

PanelData column(std::initializer_list<double> values) {
  PanelData d;
  d.matrix.resize(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) d.matrix(i++, 0) = v;
  for (Eigen::Index r = 1; r <= d.matrix.rows(); ++r) d.row_labels.push_back(std::to_string(r));
  d.column_labels = {"x"};
  return d;
}

std::string error_of(const std::string& text) {
  try {
    (void)parse(text);
  } catch (const InputDataError& e) {
    return e.what();
  }
  return {};
}

TEST(ReadCsv, Basic) {
  const PanelData d = parse("1,2\n3,4");
  Matrix expected(2, 2);
  expected << 1, 2, 3, 4;
  EXPECT_EQ(d.matrix, expected);
  EXPECT_EQ(d.row_labels, (std::vector<std::string>{"1", "2"}));
  EXPECT_EQ(d.column_labels, (std::vector<std::string>{"1", "2"}));
}

TEST(ReadCsv, HeaderAndDelimiter) {
  const PanelData d = parse("a;b;c\n1;2;3.5\n-4;5e-1;6\n", {true, ';'});
  EXPECT_EQ(d.column_labels, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(d.matrix(1, 1), 0.5);
  EXPECT_EQ(d.matrix(0, 2), 3.5);
}

TEST(ReadCsv, RejectsBadInputWithLocation) {
  EXPECT_NE(error_of("1,2\n3\n").find("row 2"), std::string::npos);
  EXPECT_NE(error_of("1,2\n3,NA\n").find("row 2, column 2"), std::string::npos);
  EXPECT_NE(error_of("1,,2\n").find("column 2"), std::string::npos);
  EXPECT_NE(error_of("1,x\n").find("'x'"), std::string::npos);
  EXPECT_FALSE(error_of("").empty());
  EXPECT_THROW((void)load_csv("/nonexistent/file.csv"), InputDataError);
}

TEST(WriteMatrixCsv, RoundTripsExactly) {
  std::mt19937_64 rng(61);
  const Matrix m = testing::random_gaussian(5, 3, rng);
  std::ostringstream os;
  write_matrix_csv(m, os, {"a", "b", "c"});
  const PanelData back = parse(os.str(), {true, ','});
  EXPECT_EQ(back.matrix, m);
}

TEST(DetrendLinear, Examples) {
  EXPECT_LT(detrend_linear(column({1, 2, 3})).matrix.norm(), 1e-14);
  EXPECT_LT(detrend_linear(column({7, 7, 7})).matrix.norm(), 1e-14);
  // OLS on t = 1..4: slope 0.8, intercept 0.5
  const Matrix r = detrend_linear(column({1, 3, 2, 4})).matrix;
  EXPECT_NEAR(r(0, 0), -0.3, 1e-14);
  EXPECT_NEAR(r(1, 0), 0.9, 1e-14);
  EXPECT_NEAR(r(2, 0), -0.9, 1e-14);
  EXPECT_NEAR(r(3, 0), 0.3, 1e-14);
  EXPECT_THROW((void)detrend_linear(column({1, 2})), PreconditionError);
}

TEST(DetrendLinear, IdempotentAndOrthogonalToTrend) {
  std::mt19937_64 rng(62);
  PanelData d;
  d.matrix = testing::random_gaussian(30, 4, rng);
  for (int t = 0; t < 30; ++t) d.matrix.row(t).array() += 0.3 * t;
  d.row_labels.resize(30, "r");
  d.column_labels.resize(4, "c");
  const PanelData once = detrend_linear(d);
  const PanelData twice = detrend_linear(once);
  EXPECT_LT((once.matrix - twice.matrix).cwiseAbs().maxCoeff(), 1e-12);
  const Vector t = Vector::LinSpaced(30, 1, 30);
  for (int j = 0; j < 4; ++j) {
    EXPECT_NEAR(once.matrix.col(j).sum(), 0.0, 1e-11);
    EXPECT_NEAR(once.matrix.col(j).dot(t), 0.0, 1e-10);
  }
}

TEST(Spectrum, MatchesReferenceAndRankDeficiency) {
  std::mt19937_64 rng(63);
  const CovarianceMatrix s = testing::random_psd(10, rng, 4);
  const std::vector<double> top = spectrum(s, 5);
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.data());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(top[i], es.eigenvalues()(9 - i), 1e-7);
  EXPECT_NEAR(top[4], 0.0, 1e-7);
  for (std::size_t i = 1; i < top.size(); ++i) EXPECT_LE(top[i], top[i - 1]);

  PanelData rank1;
  rank1.matrix = Vector::LinSpaced(6, 1, 6) * Vector::LinSpaced(3, 1, 3).transpose();
  rank1.row_labels.resize(6, "r");
  rank1.column_labels.resize(3, "c");
  const std::vector<double> r = spectrum(rank1, 2);
  EXPECT_GT(r[0], 1.0);
  EXPECT_NEAR(r[1], 0.0, 1e-9);
}

TEST(Spectrum, IdentityCovarianceNearOne) {
  std::mt19937_64 rng(64);
  PanelData d;
  d.matrix = testing::random_gaussian(10000, 3, rng);
  d.row_labels.resize(10000, "r");
  d.column_labels.resize(3, "c");
  for (double v : spectrum(d, 3)) EXPECT_NEAR(v, 1.0, 0.05);
}

TEST(FitAllMethods, WhiteNoisePanel) {
  std::mt19937_64 rng(65);
  PanelData d;
  d.matrix = testing::random_gaussian(200, 20, rng);
  d.row_labels.resize(200, "r");
  for (int j = 0; j < 20; ++j) d.column_labels.push_back("d" + std::to_string(j));
  const MethodFits fits = fit_all_methods(d);
  const theory::Lambdas l = theory::default_lambdas(20, 200);
  EXPECT_EQ(fits.lambda0, l.lambda0);
  EXPECT_EQ(fits.lambda1, l.lambda1);
  EXPECT_EQ(fits.standard.support.size(), 20u);
  EXPECT_LT(fits.l0.support.size(), 20u);

  std::ostringstream os;
  write_estimates_csv(fits, d.column_labels, os);
  const std::string csv = os.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "index,coordinate_label,l0_estimate,l1_estimate,standard_estimate");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 21);
}

TEST(FitAllMethods, ZeroL1PenaltyEqualsStandard) {
  std::mt19937_64 rng(66);
  PanelData d;
  d.matrix = testing::random_gaussian(50, 6, rng);
  d.row_labels.resize(50, "r");
  d.column_labels.resize(6, "c");
  const MethodFits fits = fit_all_methods(d, {std::nullopt, 0.0});
  EXPECT_LT((fits.l1.beta - fits.standard.beta).norm(), 1e-6);
}

}  // namespace
}  // namespace spca::dataio
