#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spca/covariance.hpp"
#include "spca/solver.hpp"

namespace spca::dataio {

/// n×p panel (rows = sample units such as years, columns = coordinates such
/// as days) with labels for both axes.
struct PanelData {
  Matrix matrix;
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;

  /// Throws InputDataError if the label counts disagree with the matrix.
  void validate() const;
};

struct CsvOptions {
  bool header = false;
  char delimiter = ',';
};

/// Parses a rectangular numeric CSV. Ragged rows, empty cells, NA markers and
/// non-numeric cells are rejected with the 1-based row/column of the cell.
PanelData read_csv(std::istream& is, const CsvOptions& options = {});
PanelData load_csv(const std::string& path, const CsvOptions& options = {});

void write_matrix_csv(const Matrix& m, std::ostream& os,
                      const std::vector<std::string>& column_labels = {});

/// Per-column OLS fit against the row index 1..n, returning the residuals.
/// Requires n >= 3.
PanelData detrend_linear(const PanelData& data);

/// Top-k eigenvalues of (1/n)XᵀX, descending, by power iteration with
/// deflation.
std::vector<double> spectrum(const CovarianceMatrix& s, int k);
std::vector<double> spectrum(const PanelData& data, int k);

void write_spectrum_csv(const std::vector<double>& values, std::ostream& os);

struct LambdaOverrides {
  std::optional<double> lambda0;
  std::optional<double> lambda1;
};

struct MethodFits {
  SparseEstimate l0;
  SparseEstimate l1;
  SparseEstimate standard;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
};

/// Σ̂ₙ from the panel, then the ℓ0, ℓ1 and unpenalized fits from the
/// standard-PCA start. λ defaults come from the panel's own (p, n).
MethodFits fit_all_methods(const PanelData& data, const LambdaOverrides& lambdas = {});

/// Columns: index,coordinate_label,l0_estimate,l1_estimate,standard_estimate
void write_estimates_csv(const MethodFits& fits, const std::vector<std::string>& labels,
                         std::ostream& os);

}  // namespace spca::dataio
