#include "mdpf/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mdpf/errors.hpp"

namespace mdpf {

std::vector<double> CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] != name) continue;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
  throw FormatError("csv: no column '" + name + "'");
}

bool CsvTable::has(const std::string& name) const {
  for (const auto& h : header)
    if (h == name) return true;
  return false;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
  out << '\n';
  char buf[32];
  for (const auto& r : table.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", r[c]);
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r\"");
    const auto e = cell.find_last_not_of(" \t\r\"");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  CsvTable t;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw FormatError(path + ":" + std::to_string(no) + ": expected " + std::to_string(t.header.size()) + " cells");
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const char* end = cells[c].data() + cells[c].size();
      auto [p, ec] = std::from_chars(cells[c].data(), end, row[c]);
      if (ec != std::errc() || p != end) {
        throw FormatError(path + ":" + std::to_string(no) + ": not a number: '" + cells[c] + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw FormatError(path + ": empty file");
  return t;
}

CsvTable profile_table(const Profile& p) {
  CsvTable t{{"x1", "mean", "variance", "n_samples"}, {}};
  for (std::size_t k = 0; k < p.grid.count; ++k) {
    t.rows.push_back({p.grid.x(k), p.mean[k], p.variance[k], static_cast<double>(p.n_samples)});
  }
  return t;
}

CsvTable drift_table(const DriftTerms& d) {
  CsvTable t{{"x1", "m", "m_variance", "d2m", "a1", "da1_dx1", "a0", "alpha", "alpha_variance", "n_samples"}, {}};
  const auto alpha = d.alpha();
  for (std::size_t k = 0; k < d.grid().count; ++k) {
    t.rows.push_back({d.grid().x(k), d.m.mean[k], d.m.variance[k], d.d2m.mean[k], d.a1.mean[k], d.da1.mean[k],
                      d.a0.mean[k], alpha[k], d.alpha_samples.variance[k], static_cast<double>(d.m.n_samples)});
  }
  return t;
}

CsvTable rdf_table(const RdfResult& r) {
  CsvTable t{{"r", "g"}, {}};
  for (std::size_t k = 0; k < r.r.size(); ++k) t.rows.push_back({r.r[k], r.g[k]});
  return t;
}

CsvTable double_well_table(const DoubleWell& w) {
  CsvTable t{{"m", "f_prime", "f"}, {}};
  for (std::size_t k = 0; k < w.m.size(); ++k) t.rows.push_back({w.m[k], w.f_prime[k], w.f[k]});
  return t;
}

Grid grid_from_column(const std::vector<double>& x1) {
  if (x1.size() < 2) throw FormatError("profile needs at least two grid points");
  const double dx = (x1.back() - x1.front()) / static_cast<double>(x1.size() - 1);
  for (std::size_t k = 1; k < x1.size(); ++k) {
    if (std::abs(x1[k] - x1.front() - dx * static_cast<double>(k)) > 1e-9 * std::max(1.0, std::abs(dx))) {
      throw FormatError("profile grid is not uniform");
    }
  }
  if (!(dx > 0.0)) throw FormatError("profile grid must be increasing");
  return Grid::periodic(dx * static_cast<double>(x1.size()), x1.size(), x1.front());
}

Profile profile_from_table(const CsvTable& t, const std::string& value_column) {
  Profile p;
  p.grid = grid_from_column(t.column("x1"));
  p.mean = t.column(value_column);
  if (t.has(value_column + "_variance")) {
    p.variance = t.column(value_column + "_variance");
  } else if (t.has("variance") && value_column == "mean") {
    p.variance = t.column("variance");
  } else {
    p.variance.assign(p.mean.size(), 0.0);
  }
  p.n_samples = t.has("n_samples") && !t.rows.empty() ? static_cast<std::size_t>(t.column("n_samples").front()) : 1;
  p.weight_sum = static_cast<double>(p.n_samples);
  return p;
}

std::vector<std::pair<double, double>> pairs_from_table(const CsvTable& t) {
  if (t.header.size() < 2) throw FormatError("expected two columns");
  std::vector<std::pair<double, double>> out;
  for (const auto& r : t.rows) out.emplace_back(r[0], r[1]);
  return out;
}

void write_band(const std::string& path, const BandMatrix& b) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  b.write(out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

BandMatrix read_band(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return BandMatrix::read(in);
}

BandMatrix dense_as_band(const Eigen::MatrixXd& m, double dx) {
  const auto K = static_cast<std::size_t>(m.rows());
  BandMatrix b(K, K, dx);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t d = 0; d < b.bandwidth() + 1; ++d) {
      b.diag(i, d) = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>((i + d) % K));
    }
  return b;
}

}  // namespace mdpf
