#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmclab/operator.hpp"

namespace cmclab {

/// Diagnostics of one affine solve: unknown slot (i, j), the equation slot of
/// t Q it annihilates, the constant term of the pivot jet K1 and the defect of
/// the c = 2 affineness probe.
struct ProbeRecord {
  int i = 0, j = 0;
  int eq_i = 0, eq_j = 0;
  double pivot = 0.0;
  double affine_defect = 0.0;
};

struct ExpansionOptions {
  int log_cap = -1;  // -1: ceil(k / n) + 1
  double affine_tol = 1e-10;
  double pivot_tol = 1e-10;
  double residual_tol = 1e-9;
};

inline int default_log_cap(int k, int n) { return (k + n - 1) / n + 1; }

/// Coefficients c_{i,j} of u_k = sum c_{i,j} t^i (log t)^j at one base point.
/// c_{i,j} is a jet of order jet_order - i. Slot (n+1, 0) is never solved; it
/// is absent until supplied through solve_global.
template <class S>
struct ExpansionTable {
  int n = 2;
  int k = 0;
  int jet_order = 0;
  int log_cap = 0;
  SeriesData<S> data;
  std::map<std::pair<int, int>, Jet<S>> coeffs;
  std::vector<ProbeRecord> probes;
  std::optional<int> residual_order;
  double residual_below = 0.0;
  std::string global_source;
  std::vector<std::string> notices;
  ExpansionOptions options;

  int dim() const { return n - 1; }
  double scale() const { return data.scale(); }
  int cap_at(int i) const { return i < 1 ? 0 : (i - 1) / n; }
  int coeff_order(int i) const { return jet_order - i; }
  bool has(int i, int j) const { return coeffs.count({i, j}) > 0; }
  bool has_global() const { return has(n + 1, 0); }
  Jet<S> coeff(int i, int j) const {
    auto it = coeffs.find({i, j});
    if (it != coeffs.end()) return it->second;
    return Jet<S>(dim(), std::max(coeff_order(i), 0));
  }
};

namespace detail {

template <class S>
LogSeries<S> ansatz(const ExpansionTable<S>& T, int K, int O, bool drop_global = false) {
  LogSeries<S> u(T.dim(), O, K, T.log_cap);
  for (const auto& [ij, c] : T.coeffs) {
    if (ij.first > K) continue;
    if (drop_global && ij.first == T.n + 1 && ij.second == 0) continue;
    u.set(ij.first, ij.second, c.with_order(O));
  }
  return u;
}

template <class S>
Jet<S> constant_jet(const ExpansionTable<S>& T, int order, int v) {
  return Jet<S>::constant(T.dim(), order, ScalarOps<S>::from_int(v));
}

/// c_1 = H_0 sqrt((1 + |D phi|^2) / (1 - H_0^2)) as a jet of order m - 1.
template <class S>
Jet<S> closed_form_c1(const SeriesData<S>& d) {
  const int m = d.jet_order();
  Jet<S> g = Jet<S>::constant(d.dim(), m - 1, S(1));
  for (int a = 0; a < d.dim(); ++a) {
    Jet<S> pa = diff(d.phi, a);
    g += pa * pa;
  }
  Jet<S> h0 = d.H[0].with_order(m - 1);
  Jet<S> one = Jet<S>::constant(d.dim(), m - 1, S(1));
  return h0 * sqrt(g * recip(one - h0 * h0));
}

template <class S>
void solve_c1(ExpansionTable<S>& T) {
  const int m = T.jet_order;
  const int O = m + 1;
  const int d = T.dim();
  auto g = [&](const Jet<S>& c) {
    T.coeffs[{1, 0}] = c;
    return tQ_series(ansatz(T, 1, O), T.data).coeff(0, 0);
  };
  ProbeRecord rec{1, 0, 0, 0, 0.0, 0.0};
  if constexpr (ScalarOps<S>::exact) {
    Jet<S> c = closed_form_c1(T.data);
    Jet<S> r = g(c);
    if (!r.is_zero() && !cmclab::rational_sqrt_inexact())
      throw InconsistencyError("exact c_1 does not annihilate the t^0 coefficient");
    rec.pivot = -T.n * (1.0 - std::pow(ScalarOps<S>::to_double(T.data.H[0].constant_term()), 2));
  } else {
    const double scale = T.scale();
    const double h = 1e-4 * scale;
    Jet<double> c(d, m - 1);
    Jet<double> r = g(c);
    double best = r.max_abs();
    int stalled = 0;
    Jet<double> slope;
    for (int it = 0; it < 100 && best > 1e-15 * scale && stalled < 3; ++it) {
      Jet<double> hp = Jet<double>::constant(d, m - 1, h);
      slope = (g(c + hp) - g(c - hp)) * (0.5 / h);
      c = c - r * recip(slope);
      r = g(c);
      double now = r.max_abs();
      if (now < best) {
        best = now;
        stalled = 0;
      } else {
        ++stalled;
      }
    }
    T.coeffs[{1, 0}] = c;
    if (best > T.options.residual_tol * scale)
      throw InconsistencyError("c_1 iteration did not annihilate the t^0 coefficient");
    rec.pivot = slope.valid() ? slope.constant_term() : -T.n;
  }
  T.probes.push_back(rec);
}

/// Solves level i (all log powers), highest log power first.
template <class S>
void solve_level(ExpansionTable<S>& T, int i) {
  const int m = T.jet_order;
  const int O = m - i + 2;
  if (m - i < 0) throw PreconditionError("insufficient jet budget for order " + std::to_string(i));
  const double scale = T.scale();
  const bool resonant = i == T.n + 1;
  const int N = T.cap_at(i);
  if (N > T.log_cap) throw LogCapOverflow("log power " + std::to_string(N) + " at order " + std::to_string(i) +
                                          " exceeds cap " + std::to_string(T.log_cap));
  double level_mag = 1.0;
  for (int ju = N; ju >= (resonant ? 1 : 0); --ju) {
    const int je = resonant ? ju - 1 : ju;
    auto probe = [&](int v) {
      T.coeffs[{i, ju}] = constant_jet(T, m - i, v);
      return tQ_series(ansatz(T, i, O), T.data).coeff(i - 1, je);
    };
    Jet<S> K0 = probe(0);
    Jet<S> K1 = probe(1) - K0;
    Jet<S> K2 = probe(2) - K0;
    double defect = (K2 - S(2) * K1).max_abs();
    level_mag = std::max({level_mag, K0.max_abs(), K1.max_abs()});
    ProbeRecord rec{i, ju, i - 1, je, ScalarOps<S>::to_double(K1.constant_term()), defect};
    T.probes.push_back(rec);
    if (defect > T.options.affine_tol * scale * level_mag)
      throw InconsistencyError("affine probe failed at (" + std::to_string(i) + ", " + std::to_string(ju) + ")");
    if (std::fabs(rec.pivot) < T.options.pivot_tol)
      throw InconsistencyError("vanishing pivot off resonance at (" + std::to_string(i) + ", " +
                               std::to_string(ju) + ")");
    T.coeffs[{i, ju}] = -(K0 * recip(K1));
  }
  if (resonant) {
    // The pivot of slot (n+1, 0) vanishes; record it for the table.
    T.coeffs.erase({i, 0});
    auto base = tQ_series(ansatz(T, i, O), T.data).coeff(i - 1, 0);
    T.coeffs[{i, 0}] = constant_jet(T, m - i, 1);
    auto moved = tQ_series(ansatz(T, i, O), T.data).coeff(i - 1, 0);
    T.coeffs.erase({i, 0});
    T.probes.push_back({i, 0, i - 1, 0, ScalarOps<S>::to_double((moved - base).constant_term()), 0.0});
  }
  LogSeries<S> r = tQ_series(ansatz(T, i, O), T.data);
  for (int j = 0; j <= T.log_cap; ++j) {
    double v = r.coeff(i - 1, j).max_abs();
    if (v > T.options.residual_tol * scale * level_mag)
      throw InconsistencyError("coefficient (" + std::to_string(i - 1) + ", " + std::to_string(j) +
                               ") of t Q does not vanish after solving order " + std::to_string(i));
  }
}

}  // namespace detail

/// t Q(u_k) with every coefficient through t^k trustworthy: the ansatz holds
/// u_k at t_order k + 1 (slot k + 1 zero) and jet order m - k + 1.
template <class S>
LogSeries<S> residual_series(const ExpansionTable<S>& T, int k, bool drop_global = false) {
  if (k < 1 || k > T.k) throw PreconditionError("residual order outside the solved range");
  const int O = T.jet_order - k + 1;
  if (O < 2) throw PreconditionError("insufficient jet budget for residual at order " + std::to_string(k));
  return tQ_series(detail::ansatz(T, k + 1, O, drop_global), T.data);
}

/// Smallest t-power whose coefficient (any log power) exceeds tol * scale;
/// nullopt when all of them vanish.
template <class S>
std::optional<int> lowest_surviving(const LogSeries<S>& r, double tol) {
  for (int i = 0; i <= r.t_order(); ++i)
    for (int j = 0; j <= r.log_cap(); ++j)
      if (r.coeff(i, j).max_abs() > tol) return i;
  return std::nullopt;
}

template <class S>
void update_residual_order(ExpansionTable<S>& T) {
  LogSeries<S> r = residual_series(T, T.k);
  const double tol = T.options.residual_tol * T.scale();
  T.residual_order = lowest_surviving(r, tol);
  int top = T.residual_order.value_or(r.t_order() + 1);
  double below = 0.0;
  for (int i = 0; i < top; ++i)
    for (int j = 0; j <= r.log_cap(); ++j) below = std::max(below, r.coeff(i, j).max_abs());
  T.residual_below = below;
}

/// c_0 .. c_n and c_{n+1,1} by affine probing of t Q. The slot (n+1, 0) is
/// left absent. Requires jet order m >= n + 3 and H data to order n + 2.
template <class S>
ExpansionTable<S> solve_local(const SeriesData<S>& data, const ExpansionOptions& opt = {}) {
  data.validate();
  const int n = data.n;
  const int m = data.jet_order();
  if (m < n + 3) throw PreconditionError("jet order must be >= n + 3 for the local expansion");
  ExpansionTable<S> T;
  T.n = n;
  T.jet_order = m;
  T.log_cap = opt.log_cap >= 0 ? opt.log_cap : default_log_cap(n + 1, n);
  T.data = data;
  T.options = opt;
  T.coeffs[{0, 0}] = data.phi;
  detail::solve_c1(T);
  for (int i = 2; i <= n + 1; ++i) detail::solve_level(T, i);
  T.k = n + 1;
  update_residual_order(T);
  return T;
}

/// Continues a local table to order k with slot (n+1, 0) set to c_global
/// (the zero jet when absent, with a notice).
template <class S>
ExpansionTable<S> solve_global(ExpansionTable<S> T, std::optional<Jet<S>> c_global, int k,
                               std::string source = "user") {
  const int n = T.n;
  const int m = T.jet_order;
  if (T.k < n + 1 || !T.has(n + 1, 1)) throw PreconditionError("solve_global needs a completed local table");
  if (k < n + 1) throw PreconditionError("target order must be >= n + 1");
  if (m < k + 2) throw PreconditionError("jet order must be >= k + 2 for order " + std::to_string(k));
  const int need_cap = default_log_cap(k, n);
  if (T.log_cap < need_cap) T.log_cap = T.options.log_cap >= 0 ? std::max(T.options.log_cap, T.cap_at(k)) : need_cap;
  const int order = m - n - 1;
  if (!c_global) {
    T.notices.push_back("c_{" + std::to_string(n + 1) +
                        ",0} is not determined by local data; using the zero jet (default)");
    c_global = Jet<S>(T.dim(), order);
    source = "zero (default)";
  }
  if (c_global->dim() != T.dim()) throw StructuralError("c_global has the wrong dimension");
  if (c_global->order() < order)
    T.notices.push_back("c_global given to jet order " + std::to_string(c_global->order()) + ", padded with zeros to " +
                        std::to_string(order));
  T.coeffs[{n + 1, 0}] = c_global->with_order(order);
  T.global_source = source;
  for (int i = n + 2; i <= k; ++i) detail::solve_level(T, i);
  T.k = std::max(k, n + 1);
  update_residual_order(T);
  return T;
}

/// u_k as a log-series of t_order k and jet order m - k. With drop_global the
/// slot (n+1, 0) is left out (u_{n+1} local).
template <class S>
LogSeries<S> build_uk(const ExpansionTable<S>& T, int k, bool drop_global = false) {
  if (k < 0 || k > T.k) throw PreconditionError("order outside the solved range");
  return detail::ansatz(T, k, T.jet_order - k, drop_global);
}

/// u_k at base + y, or at the base point when y is empty.
double eval_uk(const ExpansionTable<double>& T, int k, std::span<const double> y, double t, bool drop_global = false);

/// c_2 from the closed form
///   [Lap c0 - c0_a c0_b c0_ab / W + (n-2) H0 Dc0.Dc1 / sqrt(W) + n H1 sqrt(W)] / (2 (n-1) (1 - H0^2))
/// with W = 1 + |Dc0|^2 + c1^2, as a jet of order m - 2.
template <class S>
Jet<S> closed_form_c2(const SeriesData<S>& d, const Jet<S>& c1, bool literal_display = false) {
  const int m = d.jet_order();
  const int dim = d.dim();
  const int n = d.n;
  const int o = m - 2;
  std::vector<Jet<S>> p(dim), q(dim);
  Jet<S> W = Jet<S>::constant(dim, o, S(1)) + c1.with_order(o) * c1.with_order(o);
  Jet<S> G0 = Jet<S>::constant(dim, o, S(1));
  for (int a = 0; a < dim; ++a) {
    p[a] = diff(d.phi, a).truncated(o);
    q[a] = diff(c1, a).with_order(o);
    W += p[a] * p[a];
    G0 += p[a] * p[a];
  }
  Jet<S> lap(dim, o), quad(dim, o), dot(dim, o);
  for (int a = 0; a < dim; ++a) {
    Jet<S> pa_full = diff(d.phi, a);
    dot += p[a] * q[a];
    for (int b = 0; b < dim; ++b) {
      Jet<S> pab = diff(pa_full, b);
      if (a == b) lap += pab;
      quad += p[a] * p[b] * pab;
    }
  }
  Jet<S> H0 = d.H[0].with_order(o);
  Jet<S> H1 = d.H.size() > 1 ? d.H[1].with_order(o) : Jet<S>(dim, o);
  Jet<S> rootW = sqrt(W);
  Jet<S> bracket = lap - quad * recip(W);
  const S nn(static_cast<double>(n));
  const S n2(static_cast<double>(n - 2));
  if (literal_display) {
    bracket += n2 * (H0 * dot * recip(W)) + nn * (H1 * sqrt(G0));
  } else {
    bracket += n2 * (H0 * dot * recip(rootW)) + nn * (H1 * rootW);
  }
  Jet<S> one = Jet<S>::constant(dim, o, S(1));
  return bracket * recip(S(2.0 * (n - 1)) * (one - H0 * H0));
}

/// Double-precision table from parsed problem data: the jets of phi and H at
/// the base point, the local solve, and continuation to order k when k > n+1.
ExpansionTable<double> expand(const ProblemData& data, int jet_order, int k,
                              std::optional<Jet<double>> c_global = std::nullopt, std::string global_source = "user",
                              const ExpansionOptions& opt = {});

struct C31Report {
  int trials = 0;
  double H = 0.0;  // NaN when drawn per trial
  bool exact = false;
  double max_ratio = 0.0;       // max |c_{3,1}| / (1 + max input magnitude)
  int nonzero_exact = 0;        // exact mode: trials with c_{3,1} != 0
  bool sqrt_fallback = false;   // exact mode: an inexact sqrt occurred
  std::vector<double> values;   // per-trial max |c_{3,1}|
};

/// c_{3,1} over random polynomial boundary jets, n = 2, constant H. Without H
/// a fresh H in (-0.9, 0.9) is drawn per trial. In exact mode H = num/den must
/// make 1 - H^2 a rational square.
C31Report verify_c31_float(int trials, std::optional<double> H, std::uint64_t seed, int jet_order = 5);
C31Report verify_c31_exact(int trials, std::int64_t H_num, std::int64_t H_den, std::uint64_t seed, int jet_order = 5);

/// c_{3,1} for n = 2 and arbitrary H (no zero assertion).
double c31_for(const ProblemData& data, int jet_order = 6);

}  // namespace cmclab
