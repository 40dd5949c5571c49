#include "hkl/runs.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "hkl/error.hpp"

namespace hkl {

namespace {

/// Shared registry of conditions and events discovered while unfolding.
/// Identities are structural: a condition is (producer, place, token, copy),
/// an event is (mode, preset), so equal partial runs get equal keys.
class Unfolder {
 public:
  explicit Unfolder(const NetInstance& inst) : inst_(inst) {
    for (const auto& [place, ms] : inst.marking.tokens)
      for (const auto& [token, k] : ms)
        for (std::size_t i = 0; i < k; ++i) initial_.push_back(condition(-1, place, token, i));
  }

  std::vector<Run> run(std::size_t max_events, std::size_t max_configurations) {
    std::set<std::vector<int>> seen{{}};
    std::deque<std::vector<int>> queue{{}};
    std::vector<std::vector<int>> maximal;
    while (!queue.empty()) {
      std::vector<int> config = std::move(queue.front());
      queue.pop_front();
      auto next = extensions(config);
      if (next.empty()) {
        maximal.push_back(config);
        continue;
      }
      if (config.size() >= max_events)
        throw Error(ErrorCode::BoundExceeded,
                    "a run still grows after " + std::to_string(max_events) + " events");
      for (int e : next) {
        std::vector<int> grown = config;
        grown.insert(std::upper_bound(grown.begin(), grown.end(), e), e);
        if (seen.insert(grown).second) {
          if (seen.size() > max_configurations)
            throw Error(ErrorCode::BoundExceeded, "more than " + std::to_string(max_configurations) +
                                                      " partial runs");
          queue.push_back(std::move(grown));
        }
      }
    }
    std::sort(maximal.begin(), maximal.end());
    std::vector<Run> out;
    for (const auto& config : maximal) out.push_back(to_run(config));
    return out;
  }

 private:
  struct ConditionKey {
    int producer;
    std::string place;
    Atom token;
    std::size_t copy;
    auto operator<=>(const ConditionKey&) const = default;
  };
  struct EventKey {
    Mode mode;
    std::vector<int> preset;
    auto operator<=>(const EventKey&) const = default;
  };

  int condition(int producer, const std::string& place, const Atom& token, std::size_t copy) {
    ConditionKey key{producer, place, token, copy};
    auto [it, fresh] = condition_ids_.emplace(key, static_cast<int>(conditions_.size()));
    if (fresh) conditions_.push_back(key);
    return it->second;
  }

  int event(const Mode& mode, std::vector<int> preset, const ModeEffect& effect) {
    EventKey key{mode, std::move(preset)};
    auto it = event_ids_.find(key);
    if (it != event_ids_.end()) return it->second;
    int id = static_cast<int>(events_.size());
    event_ids_.emplace(key, id);
    events_.push_back(key);
    std::vector<int> post;
    for (const auto& [place, ms] : effect.produced)
      for (const auto& [token, k] : ms)
        for (std::size_t i = 0; i < k; ++i) post.push_back(condition(id, place, token, i));
    postsets_.push_back(std::move(post));
    return id;
  }

  std::vector<int> cut(const std::vector<int>& config) const {
    std::set<int> c(initial_.begin(), initial_.end());
    for (int e : config) c.insert(postsets_[e].begin(), postsets_[e].end());
    for (int e : config)
      for (int x : events_[e].preset) c.erase(x);
    return {c.begin(), c.end()};
  }

  std::vector<int> extensions(const std::vector<int>& config) {
    const auto available = cut(config);
    Marking m;
    for (const auto& [place, _] : inst_.marking.tokens) m.tokens[place];
    // (place, token) -> producer -> condition ids (ascending copy)
    std::map<std::pair<std::string, Atom>, std::map<int, std::vector<int>>> groups;
    for (int c : available) {
      const auto& k = conditions_[c];
      ++m.tokens[k.place][k.token];
      groups[{k.place, k.token}][k.producer].push_back(c);
    }
    for (auto& [_, by_producer] : groups)
      for (auto& [_, ids] : by_producer)
        std::sort(ids.begin(), ids.end(), [&](int x, int y) { return conditions_[x].copy < conditions_[y].copy; });

    std::vector<int> out;
    for (const auto& mode : enabled_modes(inst_, m)) {
      auto effect = mode_effect(inst_, mode);
      // For each demanded (place, token, n): every split of n over producer
      // classes; copies within one class are interchangeable.
      std::vector<std::vector<std::vector<int>>> options;
      for (const auto& [place, ms] : effect->consumed)
        for (const auto& [token, n] : ms) {
          std::vector<std::vector<int>> choices;
          const auto& classes = groups[{place, token}];
          std::vector<const std::vector<int>*> cls;
          for (const auto& [_, ids] : classes) cls.push_back(&ids);
          std::vector<int> pick;
          std::function<void(std::size_t, std::size_t)> split = [&](std::size_t i, std::size_t left) {
            if (i == cls.size()) {
              if (left == 0) choices.push_back(pick);
              return;
            }
            for (std::size_t take = 0; take <= std::min(left, cls[i]->size()); ++take) {
              pick.insert(pick.end(), cls[i]->begin(), cls[i]->begin() + static_cast<long>(take));
              split(i + 1, left - take);
              pick.resize(pick.size() - take);
            }
          };
          split(0, n);
          options.push_back(std::move(choices));
        }
      std::vector<int> preset;
      std::function<void(std::size_t)> combine = [&](std::size_t i) {
        if (i == options.size()) {
          std::vector<int> sorted = preset;
          std::sort(sorted.begin(), sorted.end());
          out.push_back(event(mode, std::move(sorted), *effect));
          return;
        }
        for (const auto& choice : options[i]) {
          preset.insert(preset.end(), choice.begin(), choice.end());
          combine(i + 1);
          preset.resize(preset.size() - choice.size());
        }
      };
      combine(0);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  Run to_run(const std::vector<int>& config) const {
    std::vector<int> conds = initial_;
    for (int e : config) conds.insert(conds.end(), postsets_[e].begin(), postsets_[e].end());
    std::sort(conds.begin(), conds.end());
    std::map<int, std::size_t> local;
    Run r;
    for (int c : conds) {
      local[c] = r.conditions.size();
      r.conditions.push_back(Condition{conditions_[c].place, conditions_[c].token, 0});
    }
    for (int e : config) {
      Event ev{events_[e].mode, {}, {}};
      for (int c : events_[e].preset) ev.preset.push_back(local.at(c));
      for (int c : postsets_[e]) ev.postset.push_back(local.at(c));
      std::sort(ev.postset.begin(), ev.postset.end());
      r.events.push_back(std::move(ev));
    }
    normalize_occurrences(r);
    return r;
  }

  const NetInstance& inst_;
  std::vector<int> initial_;
  std::map<ConditionKey, int> condition_ids_;
  std::vector<ConditionKey> conditions_;
  std::map<EventKey, int> event_ids_;
  std::vector<EventKey> events_;
  std::vector<std::vector<int>> postsets_;
};

}  // namespace

std::vector<Run> unfold(const NetInstance& inst, std::size_t maxEvents, std::size_t maxConfigurations) {
  if (maxEvents == 0) throw Error(ErrorCode::BoundExceeded, "maxEvents must be positive");
  return Unfolder(inst).run(maxEvents, maxConfigurations);
}

Determinism is_deterministic(const NetInstance& inst, std::size_t bound) {
  auto graph = reachable_markings(inst, bound);
  for (const auto& m : graph.markings) {
    auto modes = enabled_modes(inst, m);
    std::vector<ModeEffect> effects;
    for (const auto& mode : modes) effects.push_back(*mode_effect(inst, mode));
    for (std::size_t i = 0; i < modes.size(); ++i)
      for (std::size_t j = i + 1; j < modes.size(); ++j) {
        for (const auto& [place, need] : effects[i].consumed) {
          auto other = effects[j].consumed.find(place);
          if (other == effects[j].consumed.end()) continue;
          const Multiset& have = m.tokens.at(place);
          for (const auto& [token, k] : need) {
            auto o = other->second.find(token);
            if (o == other->second.end()) continue;
            auto h = have.find(token);
            std::size_t available = h == have.end() ? 0 : h->second;
            if (k + o->second > available) return {false, Conflict{m, modes[i], modes[j]}};
          }
        }
      }
  }
  return {true, std::nullopt};
}

Run project_run(const Run& r, const Atom& token) {
  std::vector<std::size_t> keep_index(r.conditions.size(), RunFlow::npos);
  Run out;
  for (std::size_t c = 0; c < r.conditions.size(); ++c)
    if (r.conditions[c].token == token) {
      keep_index[c] = out.conditions.size();
      out.conditions.push_back(r.conditions[c]);
    }
  if (out.conditions.empty()) throw Error(ErrorCode::UnknownToken, "no condition carries token '" + token + "'");
  for (const auto& e : r.events) {
    Event pe{e.mode, {}, {}};
    for (std::size_t c : e.preset)
      if (keep_index[c] != RunFlow::npos) pe.preset.push_back(keep_index[c]);
    for (std::size_t c : e.postset)
      if (keep_index[c] != RunFlow::npos) pe.postset.push_back(keep_index[c]);
    if (!pe.preset.empty() || !pe.postset.empty()) out.events.push_back(std::move(pe));
  }
  return out;
}

Module run_as_module(const Run& r, const std::string& name) {
  RunFlow f = run_flow(r);
  Module m;
  m.name = name;
  auto side = [&](bool minimal) {
    std::vector<InterfaceElement> out;
    std::map<std::string, std::size_t> repeats;
    for (std::size_t c = 0; c < r.conditions.size(); ++c) {
      if ((minimal ? f.producer[c] : f.consumer[c]) != RunFlow::npos) continue;
      std::string label = r.conditions[c].place + ":" + r.conditions[c].token;
      std::size_t k = repeats[label]++;
      if (k > 0) label += "#" + std::to_string(k);
      out.push_back(InterfaceElement{label, ElementKind::Place, std::nullopt, c});
    }
    return out;
  };
  m.left = side(true);
  m.right = side(false);
  m.interior = r;
  return m;
}

Module compose_runs(const Module& r1, const Module& r2) {
  for (const Module* m : {&r1, &r2})
    if (!std::holds_alternative<Run>(m->interior))
      throw Error(ErrorCode::KindMismatch, "module '" + m->name + "' does not contain a run");
  return compose(r1, r2);
}

Run compose_runs(const Run& r1, const Run& r2) {
  return std::get<Run>(compose_runs(run_as_module(r1, "r1"), run_as_module(r2, "r2")).interior);
}

std::vector<std::vector<std::size_t>> global_views(const Run& r, std::size_t cap) {
  const auto before = condition_order(r);
  const std::size_t n = r.conditions.size();
  // Maximal antichains are the maximal cliques of the incomparability graph.
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      adj[i][j] = i != j && !before[i][j] && !before[j][i];

  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> clique;
  std::function<void(std::vector<std::size_t>, std::vector<std::size_t>)> bron_kerbosch =
      [&](std::vector<std::size_t> candidates, std::vector<std::size_t> excluded) {
        if (candidates.empty() && excluded.empty()) {
          if (!clique.empty() || n == 0) {
            auto view = clique;
            std::sort(view.begin(), view.end());
            out.push_back(std::move(view));
            if (out.size() > cap)
              throw Error(ErrorCode::BoundExceeded, "more than " + std::to_string(cap) + " global views");
          }
          return;
        }
        // Pivot with the most neighbors among the candidates.
        std::size_t pivot = candidates.empty() ? excluded.front() : candidates.front();
        std::size_t best = 0;
        for (const auto* pool : {&candidates, &excluded})
          for (std::size_t u : *pool) {
            std::size_t deg = 0;
            for (std::size_t v : candidates) deg += adj[u][v];
            if (deg > best) {
              best = deg;
              pivot = u;
            }
          }
        std::vector<std::size_t> branch;
        for (std::size_t v : candidates)
          if (!adj[pivot][v]) branch.push_back(v);
        for (std::size_t v : branch) {
          std::vector<std::size_t> nc, nx;
          for (std::size_t u : candidates)
            if (adj[v][u]) nc.push_back(u);
          for (std::size_t u : excluded)
            if (adj[v][u]) nx.push_back(u);
          clique.push_back(v);
          bron_kerbosch(std::move(nc), std::move(nx));
          clique.pop_back();
          candidates.erase(std::find(candidates.begin(), candidates.end(), v));
          excluded.push_back(v);
        }
      };
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  if (n == 0) return {{}};
  bron_kerbosch(all, {});
  std::sort(out.begin(), out.end());
  return out;
}

Marking view_marking(const Run& r, const std::vector<std::size_t>& view, const std::vector<std::string>& places) {
  Marking m;
  for (const auto& p : places) m.tokens[p];
  for (std::size_t c : view) ++m.tokens[r.conditions.at(c).place][r.conditions.at(c).token];
  return m;
}

boost::multiprecision::cpp_int count_linearizations(const Run& r, std::size_t cap) {
  const std::size_t n = r.events.size();
  if (n > 64) throw Error(ErrorCode::CapExceeded, "linearization counting supports at most 64 events");
  RunFlow f = run_flow(r);
  validate_run(r);
  std::vector<std::uint64_t> preds(n, 0);
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t c : r.events[e].preset)
      if (f.producer[c] != RunFlow::npos) preds[e] |= std::uint64_t{1} << f.producer[c];
  const std::uint64_t full = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;

  using boost::multiprecision::cpp_int;
  std::unordered_map<std::uint64_t, cpp_int> memo;
  std::function<cpp_int(std::uint64_t)> ways = [&](std::uint64_t done) -> cpp_int {
    if (done == full) return 1;
    if (auto it = memo.find(done); it != memo.end()) return it->second;
    cpp_int total = 0;
    for (std::size_t e = 0; e < n; ++e) {
      std::uint64_t bit = std::uint64_t{1} << e;
      if (!(done & bit) && (preds[e] & done) == preds[e]) total += ways(done | bit);
    }
    if (memo.size() >= cap) throw Error(ErrorCode::CapExceeded, "too many partial linearizations");
    memo.emplace(done, total);
    return total;
  };
  return ways(0);
}

}  // namespace hkl
