#include "hkl/analysis.hpp"

#include <algorithm>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>

#include "hkl/error.hpp"

namespace hkl {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

std::size_t ExpandedNet::place_index(const std::string& place, const Atom& token) const {
  auto it = std::lower_bound(lowPlaces.begin(), lowPlaces.end(), std::make_pair(place, token));
  if (it == lowPlaces.end() || it->first != place || it->second != token)
    throw Error(ErrorCode::DimensionMismatch, "no low-level place " + place + ":" + token);
  return static_cast<std::size_t>(it - lowPlaces.begin());
}

ExpandedNet expand(const NetInstance& inst, std::size_t cap) {
  ExpandedNet net;
  for (const auto& p : inst.schema.places)
    for (const auto& a : inst.structure->carrier(p.sort)) net.lowPlaces.emplace_back(p.name, a);
  std::sort(net.lowPlaces.begin(), net.lowPlaces.end());
  net.lowTransitions = all_modes(inst, cap);
  net.incidence.assign(net.lowPlaces.size(), std::vector<long>(net.lowTransitions.size(), 0));
  for (std::size_t t = 0; t < net.lowTransitions.size(); ++t) {
    auto effect = mode_effect(inst, net.lowTransitions[t]);
    for (const auto& [place, ms] : effect->produced)
      for (const auto& [a, k] : ms) net.incidence[net.place_index(place, a)][t] += static_cast<long>(k);
    for (const auto& [place, ms] : effect->consumed)
      for (const auto& [a, k] : ms) net.incidence[net.place_index(place, a)][t] -= static_cast<long>(k);
  }
  return net;
}

InvariantVector::InvariantVector(InvariantKind kind, std::vector<long> weights)
    : kind_(kind), weights_(std::move(weights)) {
  long g = 0;
  for (long w : weights_) g = std::gcd(g, w);
  if (g == 0) throw Error(ErrorCode::ZeroInvariant, "the all-zero vector is not an invariant");
  auto first = std::find_if(weights_.begin(), weights_.end(), [](long w) { return w != 0; });
  if (*first < 0) g = -g;
  for (long& w : weights_) w /= g;
}

namespace {

using Matrix = std::vector<std::vector<cpp_rational>>;

/// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(Matrix& m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    std::size_t sel = row;
    while (sel < m.size() && m[sel][col] == 0) ++sel;
    if (sel == m.size()) continue;
    std::swap(m[sel], m[row]);
    cpp_rational lead = m[row][col];
    for (auto& x : m[row]) x /= lead;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col] == 0) continue;
      cpp_rational factor = m[r][col];
      for (std::size_t c = 0; c < cols; ++c) m[r][c] -= factor * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

/// Integer basis of {x : A·x = 0} for an r×c matrix given row-wise.
std::vector<std::vector<long>> kernel(const std::vector<std::vector<long>>& a, std::size_t cols) {
  Matrix m;
  for (const auto& row : a) m.emplace_back(row.begin(), row.end());
  auto pivots = rref(m, cols);
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t p : pivots) is_pivot[p] = true;

  std::vector<std::vector<long>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<cpp_rational> v(cols, 0);
    v[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m[i][free];
    cpp_int lcm = 1;
    for (const auto& x : v) lcm = boost::multiprecision::lcm(lcm, boost::multiprecision::denominator(x));
    std::vector<long> ints;
    for (const auto& x : v) {
      cpp_rational scaled = x * lcm;
      ints.push_back(static_cast<long>(boost::multiprecision::numerator(scaled)));
    }
    basis.push_back(std::move(ints));
  }
  return basis;
}

std::vector<std::vector<long>> transpose(const std::vector<std::vector<long>>& m, std::size_t cols) {
  std::vector<std::vector<long>> t(cols, std::vector<long>(m.size(), 0));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) t[j][i] = m[i][j];
  return t;
}

}  // namespace

std::vector<InvariantVector> place_invariants(const ExpandedNet& net) {
  std::vector<InvariantVector> out;
  for (auto& v : kernel(transpose(net.incidence, net.lowTransitions.size()), net.lowPlaces.size()))
    out.emplace_back(InvariantKind::Place, std::move(v));
  return out;
}

std::vector<InvariantVector> transition_invariants(const ExpandedNet& net) {
  std::vector<InvariantVector> out;
  for (auto& v : kernel(net.incidence, net.lowTransitions.size()))
    out.emplace_back(InvariantKind::Transition, std::move(v));
  return out;
}

std::size_t incidence_rank(const ExpandedNet& net) {
  Matrix m;
  for (const auto& row : net.incidence) m.emplace_back(row.begin(), row.end());
  return rref(m, net.lowTransitions.size()).size();
}

long weighted_sum(const ExpandedNet& net, const InvariantVector& iv, const Marking& m) {
  if (iv.kind() != InvariantKind::Place || iv.weights().size() != net.lowPlaces.size())
    throw Error(ErrorCode::DimensionMismatch, "invariant has " + std::to_string(iv.weights().size()) +
                                                  " weights, net has " + std::to_string(net.lowPlaces.size()) +
                                                  " low-level places");
  long sum = 0;
  for (const auto& [place, ms] : m.tokens)
    for (const auto& [a, k] : ms) sum += iv.weights()[net.place_index(place, a)] * static_cast<long>(k);
  return sum;
}

bool check_invariant(const NetInstance& inst, const InvariantVector& iv, const std::vector<Marking>& markings) {
  ExpandedNet net = expand(inst);
  std::optional<long> value;
  bool conserved = true;
  for (const auto& m : markings) {
    long s = weighted_sum(net, iv, m);
    if (value && *value != s) conserved = false;
    value = s;
  }
  if (markings.empty()) weighted_sum(net, iv, inst.marking);
  return conserved;
}

std::vector<Marking> deadlocks(const NetInstance& inst, std::size_t bound) {
  auto graph = reachable_markings(inst, bound);
  std::vector<bool> has_successor(graph.markings.size(), false);
  for (const auto& e : graph.edges) has_successor[e.from] = true;
  std::vector<Marking> out;
  for (std::size_t i = 0; i < graph.markings.size(); ++i)
    if (!has_successor[i]) out.push_back(graph.markings[i]);
  return out;
}

}  // namespace hkl
