#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hkl/diagnostics.hpp"
#include "hkl/signatures.hpp"

namespace hkl {

struct Place {
  std::string name;
  std::string sort;
  /// Initial-marking inscription: elm(set), a closed term, or none.
  std::optional<Term> init;
  bool operator==(const Place&) const = default;
};

struct Transition {
  std::string name;
  std::optional<Term> guard;
  bool operator==(const Transition&) const = default;
};

enum class ArcDirection { PlaceToTransition, TransitionToPlace };

/// Arcs always join a place and a transition; the direction says which way
/// tokens flow. Indices refer into NetSchema::places / transitions.
struct Arc {
  std::size_t place = 0;
  std::size_t transition = 0;
  ArcDirection direction = ArcDirection::PlaceToTransition;
  Term inscription;
  bool operator==(const Arc&) const = default;
};

/// High-level Petri net whose inscriptions are terms over a signature.
struct NetSchema {
  SignaturePtr signature;
  std::vector<Place> places;
  std::vector<Transition> transitions;
  std::vector<Arc> arcs;

  std::optional<std::size_t> find_place(const std::string& name) const;
  std::optional<std::size_t> find_transition(const std::string& name) const;

  bool operator==(const NetSchema& other) const;
};

/// Structural well-formedness: unique node names, arc sorts, Elm only as
/// initial inscription, guard variables bound by input arcs, consistent
/// variable sorts per transition. `executable` additionally rejects
/// variables that occur only on output arcs; module fragments whose
/// transitions are completed by fusion are checked without it.
Diagnostics validate_schema(const NetSchema& schema, bool executable = false);

using Multiset = std::map<Atom, std::size_t>;

/// Tokens per place, keyed by place name. Every place of the net has an
/// entry; zero multiplicities are never stored.
struct Marking {
  std::map<std::string, Multiset> tokens;

  std::size_t total() const;
  bool operator==(const Marking&) const = default;
  auto operator<=>(const Marking&) const = default;
};

std::string format_marking(const Marking& m);

struct Mode {
  std::string transition;
  Valuation valuation;
  bool operator==(const Mode&) const = default;
  auto operator<=>(const Mode&) const = default;
};

std::string format_mode(const Mode& m);

struct NetInstance {
  NetSchema schema;
  StructurePtr structure;
  Marking marking;

  bool operator==(const NetInstance& other) const;
};

/// Grounds a schema under a structure and computes its initial marking.
/// Throws SignatureMismatch, InvalidStructure or InvalidSchema.
NetInstance instantiate(const NetSchema& schema, const StructurePtr& structure);

/// Every mode enabled in the instance's marking, ordered by transition
/// name then valuation. Undefined inscriptions or guards disable a mode.
std::vector<Mode> enabled_modes(const NetInstance& inst);

/// Same, for an arbitrary marking of the instance's net.
std::vector<Mode> enabled_modes(const NetInstance& inst, const Marking& marking);

/// Successor marking, or nullopt when the mode is not enabled in `marking`.
std::optional<Marking> fire(const NetInstance& inst, const Marking& marking, const Mode& mode);

/// Modes whose arc inscriptions and guard are all defined, over the full
/// carrier product of the transition's variables, regardless of marking.
/// Throws CapExceeded when the product exceeds `cap` valuations.
std::vector<Mode> all_modes(const NetInstance& inst, std::size_t cap = 1u << 20);

/// Tokens a mode consumes and produces, per place name.
struct ModeEffect {
  std::map<std::string, Multiset> consumed;
  std::map<std::string, Multiset> produced;
};

/// nullopt when an inscription is undefined under the mode.
std::optional<ModeEffect> mode_effect(const NetInstance& inst, const Mode& mode);

/// Throws NotEnabled when the mode is not enabled.
NetInstance fire(const NetInstance& inst, const Mode& mode);

struct ReachabilityGraph {
  struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    Mode mode;
    bool operator==(const Edge&) const = default;
  };
  /// markings[0] is the initial marking; order is breadth-first discovery.
  std::vector<Marking> markings;
  std::vector<Edge> edges;

  bool operator==(const ReachabilityGraph&) const = default;
};

/// Breadth-first exploration. Throws BoundExceeded when more than `bound`
/// distinct markings are found.
ReachabilityGraph reachable_markings(const NetInstance& inst, std::size_t bound);

}  // namespace hkl
