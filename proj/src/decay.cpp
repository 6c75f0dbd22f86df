#include "cmclab/decay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Dense>

namespace cmclab {

namespace {

bool in_window(const GridField& u, int column, const XWindow& w) {
  const auto& s = u.spec();
  auto x = u.column_point(column);
  for (int a = 0; a < s.dim(); ++a)
    if (std::fabs(x[a] - s.x_center[a]) > w.fraction * s.x_extent + 1e-12) return false;
  // strictly interior
  int c = column;
  for (int a = 0; a < s.dim(); ++a) {
    int i = c % s.nodes_x;
    c /= s.nodes_x;
    if (i == 0 || i == s.nodes_x - 1) return false;
  }
  return true;
}

std::vector<int> window_columns(const GridField& u, const XWindow& w) {
  std::vector<int> cols;
  for (int col = 0; col < u.spec().columns(); ++col)
    if (in_window(u, col, w)) cols.push_back(col);
  if (cols.empty()) throw PreconditionError("measurement window contains no interior column");
  return cols;
}

}  // namespace

std::vector<Level> sup_levels(const GridField& diff, XWindow window) {
  const auto& s = diff.spec();
  auto cols = window_columns(diff, window);
  std::vector<Level> out;
  for (int it = 1; it < s.nodes_t - 1; ++it) {
    double m = 0.0;
    for (int col : cols) m = std::max(m, std::fabs(diff[diff.node(col, it)]));
    out.push_back({s.t(it), m});
  }
  return out;
}

std::vector<Level> remainder(const GridField& u, const ExpansionField& field, int k, bool drop_global,
                             XWindow window) {
  if (field.spec.size() != u.spec().size()) throw StructuralError("expansion field does not match the grid");
  GridField d(u.spec());
  for (int idx = 0; idx < u.size(); ++idx)
    d[idx] = u[idx] - field.eval(u.column_of(idx), u.spec().t(u.t_index_of(idx)), k, drop_global);
  return sup_levels(d, window);
}

std::vector<Level> gradient_levels(const GridField& u, const ExpansionField& field, const ProblemData& data,
                                   std::span<const double> x) {
  const auto& s = u.spec();
  int best = 0;
  double bd = INFINITY;
  for (int col = 0; col < s.columns(); ++col) {
    auto p = u.column_point(col);
    double d = 0.0;
    for (int a = 0; a < s.dim(); ++a) d += (p[a] - x[a]) * (p[a] - x[a]);
    if (d < bd) {
      bd = d;
      best = col;
    }
  }
  GridField v(s);
  for (int idx = 0; idx < u.size(); ++idx) {
    auto p = u.column_point(u.column_of(idx));
    v[idx] = u[idx] - data.phi_at(p) - field.c1(u.column_of(idx)) * s.t(u.t_index_of(idx));
  }
  std::vector<Level> out;
  for (int it = 1; it < s.nodes_t - 1; ++it) {
    auto nd = node_derivatives(v, u.node(best, it));
    out.push_back({s.t(it), nd.grad.norm()});
  }
  return out;
}

DecayReport fit_exponent(std::vector<Level> levels, std::optional<std::pair<double, double>> window,
                         double log_threshold) {
  DecayReport r;
  std::sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) { return a.t < b.t; });
  r.levels = levels;
  std::vector<Level> use;
  if (window) {
    for (const auto& l : levels)
      if (l.t >= window->first - 1e-12 && l.t <= window->second + 1e-12) use.push_back(l);
    r.fit_window = *window;
  } else {
    if (levels.size() > 4) use.assign(levels.begin() + 2, levels.end() - 2);
    if (!use.empty()) r.fit_window = {use.front().t, use.back().t};
  }
  int dropped = 0;
  std::vector<Level> pos;
  for (const auto& l : use) {
    if (l.norm > 0.0 && l.t > 0.0) pos.push_back(l);
    else ++dropped;
  }
  if (dropped > 0) r.notices.push_back(std::to_string(dropped) + " zero levels dropped from the fit");
  if (pos.size() < 5) throw PreconditionError("fewer than 5 usable levels for the exponent fit");
  const int N = static_cast<int>(pos.size());
  r.used_levels = N;

  auto ols = [&](const std::vector<double>& xs, const std::vector<double>& ys, double& slope, double& ssr,
                 double& se) {
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < N; ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= N;
    my /= N;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < N; ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw PreconditionError("exponent fit needs distinct t levels");
    slope = sxy / sxx;
    double b = my - slope * mx;
    ssr = 0.0;
    for (int i = 0; i < N; ++i) ssr += std::pow(ys[i] - slope * xs[i] - b, 2);
    se = N > 2 ? std::sqrt(ssr / (N - 2) / sxx) : 0.0;
  };

  std::vector<double> xs(N), ys(N);
  for (int i = 0; i < N; ++i) {
    xs[i] = std::log(pos[i].t);
    ys[i] = std::log(pos[i].norm);
  }
  ols(xs, ys, r.fitted_exponent, r.model_residual, r.std_error);

  bool all_small = std::all_of(pos.begin(), pos.end(), [](const Level& l) { return l.t < 1.0; });
  if (all_small) {
    std::vector<double> yl(N);
    for (int i = 0; i < N; ++i) yl[i] = ys[i] - std::log(std::log(1.0 / pos[i].t));
    double se = 0.0;
    ols(xs, yl, r.log_exponent, r.log_model_residual, se);
    r.log_flag = r.model_residual > 0.0 && r.log_model_residual <= (1.0 - log_threshold) * r.model_residual;
  } else {
    r.notices.push_back("log model skipped: levels with t >= 1");
  }
  return r;
}

GlobalFit fit_global_coefficient(const GridField& u, const ExpansionField& field,
                                 std::optional<std::pair<double, double>> window, int extra, double max_condition) {
  const auto& s = u.spec();
  if (field.spec.size() != s.size()) throw StructuralError("expansion field does not match the grid");
  const int n = s.n;
  for (const auto& T : field.columns)
    if (!T.has(n + 1, 1)) throw PreconditionError("global fit needs tables solved through the log term");
  std::vector<int> rows;
  for (int it = 1; it < s.nodes_t - 1; ++it) {
    double t = s.t(it);
    if (window ? (t >= window->first - 1e-12 && t <= window->second + 1e-12) : it >= 2) rows.push_back(it);
  }
  // Basis: t^{n+1}, then t^i (log t)^j.
  std::vector<std::pair<int, int>> basis{{n + 1, 0}};
  for (int i = n + 2; i <= n + 1 + extra; ++i)
    for (int j = 0; j <= (i - 1) / n; ++j) basis.push_back({i, j});
  if (!window) {
    std::size_t keep = std::max(basis.size() + 4, rows.size() / 3);
    if (rows.size() > keep) rows.resize(keep);
  }
  if (rows.size() < basis.size() + 2) throw PreconditionError("too few levels for the global coefficient fit");

  GlobalFit out;
  out.levels = static_cast<int>(rows.size());
  out.window = {s.t(rows.front()), s.t(rows.back())};
  Eigen::MatrixXd A(rows.size(), basis.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double t = s.t(rows[r]);
    for (std::size_t b = 0; b < basis.size(); ++b)
      A(r, b) = std::pow(t, basis[b].first) * std::pow(std::log(t), basis[b].second);
  }
  Eigen::VectorXd colscale = A.colwise().norm().transpose();
  Eigen::MatrixXd As = A * colscale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double cond = sv(0) / sv(sv.size() - 1);
  out.max_condition = cond;
  if (!(cond <= max_condition))
    throw PreconditionError("global coefficient fit ill-conditioned (condition " + std::to_string(cond) + ")");
  for (int col = 0; col < s.columns(); ++col) {
    Eigen::VectorXd y(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      int idx = u.node(col, rows[r]);
      y[r] = u[idx] - field.eval(col, s.t(rows[r]), n + 1, true);
    }
    Eigen::VectorXd c = svd.solve(y);
    out.values.push_back(c[0] / colscale[0]);
    out.condition.push_back(cond);
  }
  return out;
}

std::string decay_svg(const DecayReport& r, const std::string& title) {
  const double W = 480, Hh = 360, pad = 50;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& l : r.levels) {
    if (!(l.norm > 0.0)) continue;
    xmin = std::min(xmin, std::log10(l.t));
    xmax = std::max(xmax, std::log10(l.t));
    ymin = std::min(ymin, std::log10(l.norm));
    ymax = std::max(ymax, std::log10(l.norm));
  }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  auto X = [&](double lx) { return pad + (lx - xmin) / (xmax - xmin) * (W - 2 * pad); };
  auto Y = [&](double ly) { return Hh - pad - (ly - ymin) / (ymax - ymin) * (Hh - 2 * pad); };
  std::ostringstream os;
  char buf[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hh << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"20\" font-size=\"13\">%s: slope %.3f +/- %.3f%s</text>\n", pad,
                title.c_str(), r.fitted_exponent, r.std_error, r.log_flag ? " (log factor)" : "");
  os << buf;
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                pad, pad, W - 2 * pad, Hh - 2 * pad);
  os << buf;
  for (const auto& l : r.levels) {
    if (!(l.norm > 0.0)) continue;
    bool used = l.t >= r.fit_window.first - 1e-12 && l.t <= r.fit_window.second + 1e-12;
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"%s\"/>\n", X(std::log10(l.t)),
                  Y(std::log10(l.norm)), used ? "steelblue" : "gray");
    os << buf;
  }
  // Fitted line through the window centroid.
  double sx = 0.0, sy = 0.0;
  int cnt = 0;
  for (const auto& l : r.levels)
    if (l.norm > 0.0 && l.t >= r.fit_window.first - 1e-12 && l.t <= r.fit_window.second + 1e-12) {
      sx += std::log10(l.t);
      sy += std::log10(l.norm);
      ++cnt;
    }
  if (cnt > 0) {
    sx /= cnt;
    sy /= cnt;
    double y0 = sy + r.fitted_exponent * (xmin - sx), y1 = sy + r.fitted_exponent * (xmax - sx);
    std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"firebrick\"/>\n",
                  X(xmin), Y(y0), X(xmax), Y(y1));
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"11\">log10 t</text>\n", W / 2, Hh - 15);
  os << buf;
  os << "</svg>\n";
  return os.str();
}

}  // namespace cmclab
