#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hkl/netschema.hpp"

namespace hkl {

/// A token occurrence: `token` lies on `place`. `occurrence` tells repeated
/// visits of the same (place, token) apart.
struct Condition {
  std::string place;
  Atom token;
  std::size_t occurrence = 0;
  bool operator==(const Condition&) const = default;
  auto operator<=>(const Condition&) const = default;
};

/// A transition occurrence. Preset and postset index into Run::conditions.
struct Event {
  Mode mode;
  std::vector<std::size_t> preset;
  std::vector<std::size_t> postset;
  bool operator==(const Event&) const = default;
};

/// Occurrence net recording one concurrent execution. The causal order is
/// the transitive closure of the condition -> event -> condition flow.
struct Run {
  std::vector<Condition> conditions;
  std::vector<Event> events;

  bool operator==(const Run&) const = default;
};

/// Structural occurrence-net check: indices in range, acyclic flow, at most
/// one producer and one consumer per condition.
/// Throws CycleIntroduced or OccurrenceViolation.
void validate_run(const Run& r);

/// Producer / consumer event of each condition (npos when absent).
struct RunFlow {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> producer;
  std::vector<std::size_t> consumer;
};
RunFlow run_flow(const Run& r);

/// Reflexive-free causal order on conditions: before[i][j] iff condition i
/// causally precedes condition j.
std::vector<std::vector<bool>> condition_order(const Run& r);

/// Causal order on events.
std::vector<std::vector<bool>> event_order(const Run& r);

/// Renumbers `occurrence` per (place, token) along a topological order so
/// condition triples stay unique after fusion.
void normalize_occurrences(Run& r);

}  // namespace hkl
