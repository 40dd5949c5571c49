#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hkl/calculus.hpp"
#include "hkl/netschema.hpp"
#include "hkl/run.hpp"

namespace hkl {

/// All maximal runs of the instance, each with at most `maxEvents` events,
/// in a deterministic order. Conflicts branch into separate runs.
/// Throws BoundExceeded when a run can still grow at `maxEvents` events or
/// when more than `maxConfigurations` partial runs would be explored.
std::vector<Run> unfold(const NetInstance& inst, std::size_t maxEvents,
                        std::size_t maxConfigurations = 1'000'000);

struct Conflict {
  Marking marking;
  Mode first;
  Mode second;
};

struct Determinism {
  bool deterministic = true;
  std::optional<Conflict> witness;
};

/// True iff no reachable marking enables two distinct modes whose combined
/// input demand exceeds the tokens available. Throws BoundExceeded.
Determinism is_deterministic(const NetInstance& inst, std::size_t bound = 100'000);

/// Sub-run induced by the conditions carrying `token` and the events
/// adjacent to them. Throws UnknownToken.
Run project_run(const Run& r, const Atom& token);

/// The run as a module: minimal conditions form the left interface, maximal
/// conditions the right one, labeled "place:token" (suffixed "#k" when a
/// side holds several equal pairs).
Module run_as_module(const Run& r, const std::string& name = "run");

/// Fuses r1's maximal conditions with equally labeled minimal conditions of
/// r2 and revalidates the occurrence net. Throws KindMismatch,
/// CycleIntroduced or OccurrenceViolation.
Run compose_runs(const Run& r1, const Run& r2);

/// Module-level variant for runs with hand-chosen interfaces.
Module compose_runs(const Module& r1, const Module& r2);

/// Maximal antichains of conditions under the causal order, each sorted by
/// condition index; the list is sorted. Throws BoundExceeded beyond `cap`.
std::vector<std::vector<std::size_t>> global_views(const Run& r, std::size_t cap = 1'000'000);

/// Tokens of a view as a marking over `places` (places without tokens get
/// empty entries).
Marking view_marking(const Run& r, const std::vector<std::size_t>& view,
                     const std::vector<std::string>& places);

/// Number of total orders of the events that extend the causal order.
/// Throws CapExceeded for runs with more than 64 events or more than
/// `cap` downward-closed event sets.
boost::multiprecision::cpp_int count_linearizations(const Run& r, std::size_t cap = 5'000'000);

}  // namespace hkl
