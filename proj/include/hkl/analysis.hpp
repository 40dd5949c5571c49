#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hkl/netschema.hpp"

namespace hkl {

/// Low-level expansion of an instance: one place per (place, carrier
/// element of its sort), one transition per defined mode.
struct ExpandedNet {
  std::vector<std::pair<std::string, Atom>> lowPlaces;
  std::vector<Mode> lowTransitions;
  /// incidence[p][t] = produced - consumed
  std::vector<std::vector<long>> incidence;

  std::size_t place_index(const std::string& place, const Atom& token) const;
};

/// Throws CapExceeded when the mode count exceeds `cap`.
ExpandedNet expand(const NetInstance& inst, std::size_t cap = 100'000);

enum class InvariantKind { Place, Transition };

/// Normalized integer kernel vector: nonzero, coprime entries, first
/// nonzero entry positive.
class InvariantVector {
 public:
  /// Throws ZeroInvariant for the all-zero vector; normalizes otherwise.
  InvariantVector(InvariantKind kind, std::vector<long> weights);

  InvariantKind kind() const { return kind_; }
  const std::vector<long>& weights() const { return weights_; }

  bool operator==(const InvariantVector&) const = default;

 private:
  InvariantKind kind_;
  std::vector<long> weights_;
};

/// Basis of the left kernel (yᵀ·C = 0), exact rational elimination.
std::vector<InvariantVector> place_invariants(const ExpandedNet& net);

/// Basis of the right kernel (C·x = 0).
std::vector<InvariantVector> transition_invariants(const ExpandedNet& net);

/// Rank of the incidence matrix (exact).
std::size_t incidence_rank(const ExpandedNet& net);

/// Weighted token sum of a marking for a place invariant over the low
/// places of `net`.
long weighted_sum(const ExpandedNet& net, const InvariantVector& iv, const Marking& m);

/// True iff the weighted token sum is equal across all markings. Throws
/// DimensionMismatch if the vector does not fit the instance's expansion or
/// is not a place invariant.
bool check_invariant(const NetInstance& inst, const InvariantVector& iv, const std::vector<Marking>& markings);

/// Reachable markings without enabled modes. Throws BoundExceeded.
std::vector<Marking> deadlocks(const NetInstance& inst, std::size_t bound);

}  // namespace hkl
