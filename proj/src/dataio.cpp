#include "spca/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "spca/errors.hpp"
#include "spca/theory.hpp"

namespace spca::dataio {

void PanelData::validate() const {
  if (static_cast<Eigen::Index>(row_labels.size()) != matrix.rows() ||
      static_cast<Eigen::Index>(column_labels.size()) != matrix.cols()) {
    throw InputDataError("label counts do not match the data dimensions");
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, delimiter)) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  return cells;
}

std::string where(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

bool is_missing(const std::string& cell) {
  std::string lower(cell);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower.empty() || lower == "na" || lower == "nan" || lower == "null" || lower == ".";
}

std::vector<std::string> numbered_labels(Eigen::Index count) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 1; i <= count; ++i) labels.push_back(std::to_string(i));
  return labels;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace

PanelData read_csv(std::istream& is, const CsvOptions& options) {
  PanelData out;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool header_pending = options.header;

  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split(line, options.delimiter);
    if (header_pending) {
      out.column_labels = std::move(cells);
      width = out.column_labels.size();
      header_pending = false;
      continue;
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw InputDataError("ragged row " + std::to_string(line_no) + ": expected " +
                           std::to_string(width) + " cells, found " + std::to_string(cells.size()));
    }
    std::vector<double> values(width);
    for (std::size_t c = 0; c < width; ++c) {
      const std::string& cell = cells[c];
      if (is_missing(cell)) throw InputDataError("missing value at " + where(line_no, c + 1));
      const char* begin = cell.data();
      const char* end = begin + cell.size();
      if (*begin == '+') ++begin;
      const auto [ptr, ec] = std::from_chars(begin, end, values[c]);
      if (ec != std::errc() || ptr != end || !std::isfinite(values[c])) {
        throw InputDataError("cannot parse '" + cell + "' at " + where(line_no, c + 1));
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InputDataError("CSV contains no data rows");

  out.matrix.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      out.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  out.row_labels = numbered_labels(out.matrix.rows());
  if (out.column_labels.empty()) out.column_labels = numbered_labels(out.matrix.cols());
  return out;
}

PanelData load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputDataError("cannot open " + path);
  return read_csv(in, options);
}

void write_matrix_csv(const Matrix& m, std::ostream& os,
                      const std::vector<std::string>& column_labels) {
  if (!column_labels.empty()) {
    for (std::size_t j = 0; j < column_labels.size(); ++j) {
      if (j) os << ',';
      os << column_labels[j];
    }
    os << '\n';
  }
  for (Eigen::Index t = 0; t < m.rows(); ++t) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << std::setprecision(17) << m(t, j);
    }
    os << '\n';
  }
}

PanelData detrend_linear(const PanelData& data) {
  const Eigen::Index n = data.matrix.rows();
  if (n < 3) throw PreconditionError("detrending needs at least 3 rows");
  const double mean_t = (static_cast<double>(n) + 1.0) / 2.0;
  Vector centred_t(n);
  for (Eigen::Index t = 0; t < n; ++t) centred_t(t) = static_cast<double>(t + 1) - mean_t;
  const double sxx = centred_t.squaredNorm();

  PanelData out = data;
  for (Eigen::Index j = 0; j < data.matrix.cols(); ++j) {
    const auto col = data.matrix.col(j);
    const double mean_y = col.mean();
    const double slope = centred_t.dot(col) / sxx;
    for (Eigen::Index t = 0; t < n; ++t) {
      out.matrix(t, j) = col(t) - mean_y - slope * centred_t(t);
    }
  }
  return out;
}

std::vector<double> spectrum(const CovarianceMatrix& s, int k) {
  if (k < 0 || k > s.p()) throw PreconditionError("spectrum needs 0 <= k <= p");
  PowerIterationOptions options;
  options.tol = 1e-10 * std::max(1.0, std::abs(s.data().trace()));
  options.max_iter = 1000000;

  std::vector<double> values;
  Matrix current = s.data();
  for (int i = 0; i < k; ++i) {
    const EigenPair pair = leading_eigenpair(CovarianceMatrix(current), options);
    double value = std::max(pair.value, 0.0);
    if (!values.empty()) value = std::min(value, values.back());
    values.push_back(value);
    current -= pair.value * (pair.vector * pair.vector.transpose());
    current = 0.5 * (current + current.transpose()).eval();
  }
  return values;
}

std::vector<double> spectrum(const PanelData& data, int k) {
  return spectrum(sample_covariance(TimeSeriesMatrix(data.matrix)), k);
}

void write_spectrum_csv(const std::vector<double>& values, std::ostream& os) {
  os << "rank,eigenvalue\n";
  for (std::size_t i = 0; i < values.size(); ++i) os << i + 1 << ',' << fmt_double(values[i]) << '\n';
}

MethodFits fit_all_methods(const PanelData& data, const LambdaOverrides& lambdas) {
  data.validate();
  const TimeSeriesMatrix x(data.matrix);
  const CovarianceMatrix sigma_hat = sample_covariance(x);
  const Vector init = beta0(sigma_hat);
  const theory::Lambdas defaults = theory::default_lambdas(x.p(), x.n());

  MethodFits fits;
  fits.lambda0 = lambdas.lambda0.value_or(defaults.lambda0);
  fits.lambda1 = lambdas.lambda1.value_or(defaults.lambda1);

  SolverConfig config;
  config.penalty = Penalty::L0;
  config.lambda = fits.lambda0;
  fits.l0 = solve(sigma_hat, config, init);
  config.penalty = Penalty::L1;
  config.lambda = fits.lambda1;
  fits.l1 = solve(sigma_hat, config, init);
  config.penalty = Penalty::None;
  config.lambda = 0.0;
  fits.standard = solve(sigma_hat, config, init);
  return fits;
}

void write_estimates_csv(const MethodFits& fits, const std::vector<std::string>& labels,
                         std::ostream& os) {
  const Eigen::Index p = fits.standard.beta.size();
  if (static_cast<Eigen::Index>(labels.size()) != p) {
    throw DimensionError("label count does not match the estimate length");
  }
  os << "index,coordinate_label,l0_estimate,l1_estimate,standard_estimate\n";
  for (Eigen::Index j = 0; j < p; ++j) {
    os << j + 1 << ',' << labels[static_cast<std::size_t>(j)] << ',' << fmt_double(fits.l0.beta(j))
       << ',' << fmt_double(fits.l1.beta(j)) << ',' << fmt_double(fits.standard.beta(j)) << '\n';
  }
}

}  // namespace spca::dataio
