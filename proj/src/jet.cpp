#include "cmclab/jet.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>

namespace cmclab {

namespace {

// Appends all multi-indices of length dim and total degree deg, first
// component descending.
void enumerate_degree(int dim, int deg, std::vector<int>& prefix, std::vector<int>& out) {
  if (static_cast<int>(prefix.size()) == dim - 1) {
    prefix.push_back(deg);
    out.insert(out.end(), prefix.begin(), prefix.end());
    prefix.pop_back();
    return;
  }
  for (int first = deg; first >= 0; --first) {
    prefix.push_back(first);
    enumerate_degree(dim, deg - first, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

MonomialBasis::MonomialBasis(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1 || dim > 8) throw StructuralError("jet dimension must be in [1, 8]");
  if (order < 0) throw StructuralError("jet order must be nonnegative");
  for (int deg = 0; deg <= order; ++deg) {
    std::vector<int> prefix;
    std::size_t before = exps_.size();
    enumerate_degree(dim, deg, prefix, exps_);
    degree_.insert(degree_.end(), (exps_.size() - before) / dim, deg);
  }
  keys_.resize(degree_.size());
  for (int i = 0; i < size(); ++i) keys_[i] = key(exponents(i));

  std::vector<int> sum(dim);
  for (int a = 0; a < size(); ++a) {
    for (int b = 0; b < size() && degree_[a] + degree_[b] <= order; ++b) {
      auto ea = exponents(a);
      auto eb = exponents(b);
      for (int d = 0; d < dim; ++d) sum[d] = ea[d] + eb[d];
      products_.push_back({a, b, index(sum)});
    }
  }

  diff_.resize(dim);
  std::vector<int> lowered(dim);
  for (int axis = 0; axis < dim; ++axis) {
    for (int i = 0; i < size(); ++i) {
      auto e = exponents(i);
      if (e[axis] == 0) continue;
      std::copy(e.begin(), e.end(), lowered.begin());
      --lowered[axis];
      diff_[axis].push_back({i, index(lowered), e[axis]});
    }
  }
}

std::uint64_t MonomialBasis::key(std::span<const int> beta) const {
  std::uint64_t k = 0;
  for (int b : beta) k = k * static_cast<std::uint64_t>(order_ + 1) + static_cast<std::uint64_t>(b);
  return k;
}

int MonomialBasis::index(std::span<const int> beta) const {
  if (static_cast<int>(beta.size()) != dim_) return -1;
  int deg = 0;
  for (int b : beta) {
    if (b < 0) return -1;
    deg += b;
  }
  if (deg > order_) return -1;
  // Within a degree block keys are strictly decreasing.
  int lo = prefix_size(deg - 1);
  int hi = prefix_size(deg);
  std::uint64_t k = key(beta);
  auto first = keys_.begin() + lo;
  auto last = keys_.begin() + hi;
  auto it = std::lower_bound(first, last, k, std::greater<>());
  if (it == last || *it != k) return -1;
  return static_cast<int>(it - keys_.begin());
}

int MonomialBasis::prefix_size(int deg) const {
  if (deg < 0) return 0;
  if (deg >= order_) return size();
  return static_cast<int>(std::upper_bound(degree_.begin(), degree_.end(), deg) - degree_.begin());
}

std::shared_ptr<const MonomialBasis> MonomialBasis::get(int dim, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialBasis>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{dim, order}];
  if (!slot) slot = std::make_shared<const MonomialBasis>(dim, order);
  return slot;
}

}  // namespace cmclab
