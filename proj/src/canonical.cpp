#include "canonical.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace hkl::detail {

namespace {

using Adjacency = std::vector<std::vector<std::pair<int, std::size_t>>>;  // (label, neighbor)

class Canonicalizer {
 public:
  explicit Canonicalizer(const ColoredGraph& g) : n_(g.colors.size()), out_(n_), in_(n_) {
    std::vector<std::string> colors = g.colors;
    std::sort(colors.begin(), colors.end());
    colors.erase(std::unique(colors.begin(), colors.end()), colors.end());
    color_.resize(n_);
    for (std::size_t v = 0; v < n_; ++v)
      color_[v] = static_cast<int>(std::lower_bound(colors.begin(), colors.end(), g.colors[v]) - colors.begin());

    std::vector<std::string> labels;
    for (const auto& e : g.edges) labels.push_back(e.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    for (const auto& e : g.edges) {
      int l = static_cast<int>(std::lower_bound(labels.begin(), labels.end(), e.label) - labels.begin());
      out_[e.from].emplace_back(l, e.to);
      in_[e.to].emplace_back(l, e.from);
      edges_.emplace_back(e.from, e.to, l);
    }
    for (auto& a : out_) std::sort(a.begin(), a.end());
    for (auto& a : in_) std::sort(a.begin(), a.end());
  }

  std::vector<std::size_t> run() {
    if (n_ == 0) return {};
    std::vector<int> cell = color_;
    search(cell);
    return best_order_;
  }

 private:
  using Signature = std::vector<int>;

  /// Equitable refinement; cells stay ordered by (old cell, neighborhood).
  void refine(std::vector<int>& cell) const {
    std::size_t count = distinct(cell);
    while (true) {
      std::vector<std::pair<Signature, std::size_t>> sigs(n_);
      for (std::size_t v = 0; v < n_; ++v) {
        Signature s{cell[v]};
        std::vector<std::pair<int, int>> o, i;
        for (auto [l, w] : out_[v]) o.emplace_back(l, cell[w]);
        for (auto [l, w] : in_[v]) i.emplace_back(l, cell[w]);
        std::sort(o.begin(), o.end());
        std::sort(i.begin(), i.end());
        s.push_back(static_cast<int>(o.size()));
        for (auto [l, c] : o) s.insert(s.end(), {l, c});
        s.push_back(-1);
        for (auto [l, c] : i) s.insert(s.end(), {l, c});
        sigs[v] = {std::move(s), v};
      }
      std::vector<std::size_t> idx(n_);
      for (std::size_t v = 0; v < n_; ++v) idx[v] = v;
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return sigs[a].first < sigs[b].first; });
      int next = -1;
      const Signature* prev = nullptr;
      for (std::size_t v : idx) {
        if (!prev || sigs[v].first != *prev) ++next;
        cell[v] = next;
        prev = &sigs[v].first;
      }
      std::size_t now = static_cast<std::size_t>(next + 1);
      if (now == count) return;
      count = now;
    }
  }

  static std::size_t distinct(const std::vector<int>& cell) {
    std::vector<int> c = cell;
    std::sort(c.begin(), c.end());
    return static_cast<std::size_t>(std::unique(c.begin(), c.end()) - c.begin());
  }

  void search(std::vector<int> cell) {
    refine(cell);
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t v = 0; v < n_; ++v) members[cell[v]].push_back(v);

    const std::vector<std::size_t>* target = nullptr;
    int target_cell = -1;
    for (const auto& [c, vs] : members)
      if (vs.size() > 1) {
        target = &vs;
        target_cell = c;
        break;
      }

    if (!target) {
      std::vector<std::size_t> order(n_);
      for (std::size_t v = 0; v < n_; ++v) order[static_cast<std::size_t>(cell[v])] = v;
      consider(order, cell);
      return;
    }

    // Twins (same neighborhoods) are interchangeable by an automorphism, so
    // one representative per twin class suffices.
    std::vector<std::pair<std::vector<std::pair<int, std::size_t>>, std::vector<std::pair<int, std::size_t>>>> tried;
    for (std::size_t v : *target) {
      auto key = std::make_pair(out_[v], in_[v]);
      if (std::find(tried.begin(), tried.end(), key) != tried.end()) continue;
      tried.push_back(std::move(key));
      std::vector<int> next = cell;
      for (std::size_t w = 0; w < n_; ++w)
        if (next[w] > target_cell || (next[w] == target_cell && w != v)) ++next[w];
      search(std::move(next));
    }
  }

  void consider(const std::vector<std::size_t>& order, const std::vector<int>& pos) {
    std::vector<long> cert;
    cert.reserve(n_ + 3 * edges_.size());
    for (std::size_t v : order) cert.push_back(color_[v]);
    std::vector<std::tuple<int, int, int>> es;
    for (auto [f, t, l] : edges_) es.emplace_back(pos[f], pos[t], l);
    std::sort(es.begin(), es.end());
    for (auto [f, t, l] : es) cert.insert(cert.end(), {f, t, l});
    if (best_order_.empty() || cert < best_cert_) {
      best_cert_ = std::move(cert);
      best_order_ = order;
    }
  }

  std::size_t n_;
  std::vector<int> color_;
  Adjacency out_;
  Adjacency in_;
  std::vector<std::tuple<std::size_t, std::size_t, int>> edges_;
  std::vector<long> best_cert_;
  std::vector<std::size_t> best_order_;
};

}  // namespace

std::vector<std::size_t> canonical_order(const ColoredGraph& g) { return Canonicalizer(g).run(); }

}  // namespace hkl::detail
