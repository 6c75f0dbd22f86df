#include "cmclab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace cmclab {

int GridSpec::columns() const {
  int c = 1;
  for (int a = 0; a < dim(); ++a) c *= nodes_x;
  return c;
}

std::vector<int> GridSpec::shape() const {
  std::vector<int> s(dim(), nodes_x);
  s.push_back(nodes_t);
  return s;
}

void GridSpec::validate() const {
  if (n < 2) throw PreconditionError("grid dimension n must be >= 2");
  if (static_cast<int>(x_center.size()) != dim()) throw PreconditionError("grid center has wrong dimension");
  if (!(delta > 0.0)) throw PreconditionError("grid offset delta must be positive");
  if (!(t_max > delta)) throw PreconditionError("grid t_max must exceed delta");
  if (!(x_extent > 0.0)) throw PreconditionError("grid x_extent must be positive");
  if (nodes_x < 3 || nodes_t < 3) throw PreconditionError("grid too small: need >= 3 nodes per axis");
}

GridField::GridField(GridSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  values_ = Eigen::VectorXd::Zero(spec_.size());
}

GridField::GridField(GridSpec spec, Eigen::VectorXd values) : spec_(std::move(spec)), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.size()) throw StructuralError("grid value count mismatch");
}

int GridField::stride(int axis) const {
  if (axis == spec_.dim()) return spec_.columns();
  int s = 1;
  for (int a = 0; a < axis; ++a) s *= spec_.nodes_x;
  return s;
}

int GridField::index(const std::vector<int>& multi) const {
  int idx = 0;
  for (int a = 0; a <= spec_.dim(); ++a) idx += multi[a] * stride(a);
  return idx;
}

std::vector<int> GridField::multi_index(int idx) const {
  std::vector<int> m(spec_.dim() + 1);
  m[spec_.dim()] = idx / spec_.columns();
  int c = idx % spec_.columns();
  for (int a = 0; a < spec_.dim(); ++a) {
    m[a] = c % spec_.nodes_x;
    c /= spec_.nodes_x;
  }
  return m;
}

std::vector<double> GridField::column_point(int column) const {
  std::vector<double> x(spec_.dim());
  for (int a = 0; a < spec_.dim(); ++a) {
    x[a] = spec_.x(a, column % spec_.nodes_x);
    column /= spec_.nodes_x;
  }
  return x;
}

std::vector<double> GridField::coordinates(int idx) const {
  auto x = column_point(column_of(idx));
  x.push_back(spec_.t(t_index_of(idx)));
  return x;
}

bool GridField::on_boundary(int idx) const {
  auto m = multi_index(idx);
  auto shape = spec_.shape();
  for (std::size_t a = 0; a < m.size(); ++a)
    if (m[a] == 0 || m[a] == shape[a] - 1) return true;
  return false;
}

void write_csv(std::ostream& os, const GridField& u) {
  const auto& s = u.spec();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", s.h_prime());
  os << "# n=" << s.n << ", h_prime=" << buf;
  std::snprintf(buf, sizeof buf, "%.17g", s.h_t());
  os << ", h_t=" << buf;
  std::snprintf(buf, sizeof buf, "%.17g", s.delta);
  os << ", delta=" << buf << "\n";
  for (int idx = 0; idx < u.size(); ++idx) {
    for (double c : u.coordinates(idx)) {
      std::snprintf(buf, sizeof buf, "%.17g,", c);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", u[idx]);
    os << buf << "\n";
  }
}

void write_csv(const std::string& path, const GridField& u) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_csv(os, u);
}

GridField read_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("#", 0) != 0) throw ConfigError("grid CSV: missing header");
  std::map<std::string, double> meta;
  {
    std::string body = header.substr(1);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("grid CSV: malformed header entry '" + item + "'");
      std::string key = item.substr(0, eq);
      key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
      meta[key] = std::stod(item.substr(eq + 1));
    }
  }
  for (const char* key : {"n", "h_prime", "h_t", "delta"})
    if (!meta.count(key)) throw ConfigError(std::string("grid CSV: header lacks ") + key);
  int n = static_cast<int>(meta["n"]);
  if (n < 2) throw ConfigError("grid CSV: n must be >= 2");

  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != n + 1) throw ConfigError("grid CSV: row has wrong column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("grid CSV: no data rows");

  GridSpec spec;
  spec.n = n;
  spec.delta = meta["delta"];
  std::set<double> ts, x1s;
  for (const auto& r : rows) {
    ts.insert(r[n - 1]);
    x1s.insert(r[0]);
  }
  spec.nodes_t = static_cast<int>(ts.size());
  spec.nodes_x = static_cast<int>(x1s.size());
  spec.t_max = *ts.rbegin();
  spec.x_extent = 0.5 * (*x1s.rbegin() - *x1s.begin());
  spec.x_center.assign(n - 1, 0.0);
  std::vector<double> lo(n - 1, 1e300), hi(n - 1, -1e300);
  for (const auto& r : rows)
    for (int a = 0; a < n - 1; ++a) {
      lo[a] = std::min(lo[a], r[a]);
      hi[a] = std::max(hi[a], r[a]);
    }
  for (int a = 0; a < n - 1; ++a) spec.x_center[a] = 0.5 * (lo[a] + hi[a]);
  spec.validate();
  if (static_cast<int>(rows.size()) != spec.size()) throw ConfigError("grid CSV: row count does not match a tensor grid");
  if (std::fabs(spec.delta - *ts.begin()) > 1e-12 * std::max(1.0, spec.delta))
    throw ConfigError("grid CSV: delta disagrees with smallest t");

  GridField u(spec);
  for (const auto& r : rows) {
    std::vector<int> m(n);
    for (int a = 0; a < n - 1; ++a) m[a] = static_cast<int>(std::lround((r[a] - lo[a]) / spec.h_prime()));
    m[n - 1] = static_cast<int>(std::lround((r[n - 1] - spec.delta) / spec.h_t()));
    u[u.index(m)] = r[n];
  }
  return u;
}

GridField read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path);
  return read_csv(is);
}

std::vector<std::pair<int, double>> first_derivative_stencil(int N, int k, double h) {
  if (k > 0 && k < N - 1) return {{-1, -0.5 / h}, {1, 0.5 / h}};
  if (k == 0) return {{0, -1.5 / h}, {1, 2.0 / h}, {2, -0.5 / h}};
  return {{0, 1.5 / h}, {-1, -2.0 / h}, {-2, 0.5 / h}};
}

std::vector<std::pair<int, double>> second_derivative_stencil(int N, int k, double h) {
  double h2 = h * h;
  if (k > 0 && k < N - 1) return {{-1, 1.0 / h2}, {0, -2.0 / h2}, {1, 1.0 / h2}};
  int s = (k == 0) ? 1 : -1;
  if (N < 4) return {{0, 1.0 / h2}, {s, -2.0 / h2}, {2 * s, 1.0 / h2}};
  return {{0, 2.0 / h2}, {s, -5.0 / h2}, {2 * s, 4.0 / h2}, {3 * s, -1.0 / h2}};
}

}  // namespace cmclab
