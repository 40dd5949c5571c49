#include "hkl/run.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "hkl/error.hpp"

namespace hkl {

RunFlow run_flow(const Run& r) {
  RunFlow f;
  f.producer.assign(r.conditions.size(), RunFlow::npos);
  f.consumer.assign(r.conditions.size(), RunFlow::npos);
  for (std::size_t e = 0; e < r.events.size(); ++e) {
    for (std::size_t c : r.events[e].postset) {
      if (c >= r.conditions.size()) throw Error(ErrorCode::OccurrenceViolation, "postset index out of range");
      if (f.producer[c] != RunFlow::npos)
        throw Error(ErrorCode::OccurrenceViolation, "condition " + r.conditions[c].place + ":" +
                                                        r.conditions[c].token + " has two producing events");
      f.producer[c] = e;
    }
    for (std::size_t c : r.events[e].preset) {
      if (c >= r.conditions.size()) throw Error(ErrorCode::OccurrenceViolation, "preset index out of range");
      if (f.consumer[c] != RunFlow::npos)
        throw Error(ErrorCode::OccurrenceViolation, "condition " + r.conditions[c].place + ":" +
                                                        r.conditions[c].token + " has two consuming events");
      f.consumer[c] = e;
    }
  }
  return f;
}

namespace {

/// Events in a topological order of the causal flow; throws on cycles.
std::vector<std::size_t> topological_events(const Run& r, const RunFlow& f) {
  const std::size_t n = r.events.size();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t c : r.events[e].preset)
      if (f.producer[c] != RunFlow::npos) {
        succ[f.producer[c]].push_back(e);
        ++indegree[e];
      }
  std::deque<std::size_t> ready;
  for (std::size_t e = 0; e < n; ++e)
    if (indegree[e] == 0) ready.push_back(e);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    std::size_t e = ready.front();
    ready.pop_front();
    order.push_back(e);
    for (std::size_t s : succ[e])
      if (--indegree[s] == 0) ready.push_back(s);
  }
  if (order.size() != n) throw Error(ErrorCode::CycleIntroduced, "the causal flow of the run contains a cycle");
  return order;
}

}  // namespace

void validate_run(const Run& r) {
  RunFlow f = run_flow(r);
  for (const auto& e : r.events)
    for (std::size_t c : e.preset)
      if (std::find(e.postset.begin(), e.postset.end(), c) != e.postset.end())
        throw Error(ErrorCode::CycleIntroduced, "an event both consumes and produces one condition");
  topological_events(r, f);
}

std::vector<std::vector<bool>> event_order(const Run& r) {
  RunFlow f = run_flow(r);
  auto topo = topological_events(r, f);
  const std::size_t n = r.events.size();
  std::vector<std::vector<bool>> before(n, std::vector<bool>(n, false));
  // Process in topological order: predecessors of e are the producers of its
  // preset plus their predecessors.
  for (std::size_t e : topo)
    for (std::size_t c : r.events[e].preset) {
      std::size_t p = f.producer[c];
      if (p == RunFlow::npos) continue;
      before[p][e] = true;
      for (std::size_t q = 0; q < n; ++q)
        if (before[q][p]) before[q][e] = true;
    }
  return before;
}

std::vector<std::vector<bool>> condition_order(const Run& r) {
  RunFlow f = run_flow(r);
  auto ev = event_order(r);
  const std::size_t n = r.conditions.size();
  std::vector<std::vector<bool>> before(n, std::vector<bool>(n, false));
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t consumer = f.consumer[c];
    if (consumer == RunFlow::npos) continue;
    for (std::size_t d = 0; d < n; ++d) {
      std::size_t producer = f.producer[d];
      if (producer == RunFlow::npos) continue;
      if (producer == consumer || ev[consumer][producer]) before[c][d] = true;
    }
  }
  return before;
}

void normalize_occurrences(Run& r) {
  RunFlow f = run_flow(r);
  auto topo = topological_events(r, f);
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < r.conditions.size(); ++c)
    if (f.producer[c] == RunFlow::npos) order.push_back(c);
  for (std::size_t e : topo) {
    auto post = r.events[e].postset;
    std::sort(post.begin(), post.end());
    order.insert(order.end(), post.begin(), post.end());
  }
  std::map<std::pair<std::string, Atom>, std::size_t> next;
  for (std::size_t c : order) r.conditions[c].occurrence = next[{r.conditions[c].place, r.conditions[c].token}]++;
}

}  // namespace hkl
