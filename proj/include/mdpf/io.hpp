#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mdpf/builder.hpp"
#include "mdpf/coarsegrain.hpp"
#include "mdpf/observables.hpp"

namespace mdpf {

/// Numeric CSV with a header row. Values are written with %.17g.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Throws FormatError if the column is missing.
  std::vector<double> column(const std::string& name) const;
  bool has(const std::string& name) const;
};

void write_csv(const std::string& path, const CsvTable& table);
/// Throws FormatError on ragged rows or non-numeric cells.
CsvTable read_csv(const std::string& path);

/// x1, mean, variance, n_samples
CsvTable profile_table(const Profile& p);
/// x1, m, m_variance, d2m, a1, da1_dx1, a0, alpha, alpha_variance, n_samples
CsvTable drift_table(const DriftTerms& d);
CsvTable rdf_table(const RdfResult& r);
CsvTable double_well_table(const DoubleWell& w);

/// Grid recovered from an x1 column of uniformly spaced points.
Grid grid_from_column(const std::vector<double>& x1);
/// Profile from a table with x1 and the named value column; variances are
/// read when a `<name>_variance` or `variance` column exists.
Profile profile_from_table(const CsvTable& t, const std::string& value_column);

/// Two-column (a, b) pairs from the first two columns.
std::vector<std::pair<double, double>> pairs_from_table(const CsvTable& t);

void write_band(const std::string& path, const BandMatrix& b);
BandMatrix read_band(const std::string& path);

/// A dense symmetric K x K matrix stored in the band format with full width.
BandMatrix dense_as_band(const Eigen::MatrixXd& m, double dx);

}  // namespace mdpf
