#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hkl/diagnostics.hpp"
#include "hkl/netschema.hpp"
#include "hkl/run.hpp"

namespace hkl {

enum class ElementKind { Place, Transition };

std::string to_string(ElementKind k);

/// A labeled boundary element. `node` binds it to an interior place
/// (place/condition index) or transition (transition/event index); unbound
/// elements only carry the label.
struct InterfaceElement {
  std::string label;
  ElementKind kind = ElementKind::Transition;
  std::optional<std::string> sort;
  std::optional<std::size_t> node;
  bool operator==(const InterfaceElement&) const = default;
};

/// Interior given only by name and interface.
struct Abstract {
  bool operator==(const Abstract&) const = default;
};

using Interior = std::variant<Abstract, NetSchema, NetInstance, Run>;

enum class InteriorKind { Abstract, Schema, Instance, Run };
InteriorKind interior_kind(const Interior& i);
std::string to_string(InteriorKind k);

/// Unit of composition: an interior plus left and right interfaces.
struct Module {
  std::string name;
  std::vector<InterfaceElement> left;
  std::vector<InterfaceElement> right;
  Interior interior;

  bool operator==(const Module&) const = default;
};

/// Construction-time checks: unique labels per side, bindings in range and
/// of matching kind, abstract modules unbound. Returns diagnostics.
Diagnostics validate_module(const Module& m);

/// Throws InvalidModule / DuplicateLabel if validate_module reports errors.
Module make_module(Module m);

/// Fuses a.right with equally labeled elements of b.left. Unmatched
/// elements propagate to the composite's interfaces. Abstract interiors
/// compose with anything; other mixed kinds are rejected.
/// Throws KindMismatch, DuplicateLabel, SortMismatch, SignatureMismatch,
/// InscriptionMismatch, CycleIntroduced or OccurrenceViolation.
Module compose(const Module& a, const Module& b);

struct Composability {
  bool ok = true;
  Diagnostics blocking;
};

Composability is_composable(const Module& a, const Module& b);

/// Isomorphism-invariant representative: interior nodes are reordered and
/// renamed canonically, interfaces sorted by label, the module name cleared.
/// Node names of net interiors are treated as identities, not content.
Module canonical_form(const Module& m);

/// Renames interface labels; interior untouched. Throws RenamingCollision if
/// two labels of one side end up equal or the renaming is not injective.
Module rename_labels(const Module& m, const std::map<std::string, std::string>& renaming);

/// Label sets of the two sides, sorted.
std::vector<std::string> labels(const std::vector<InterfaceElement>& side);

/// Number of interior place-kind and transition-kind nodes.
std::size_t interior_size(const Interior& i);

}  // namespace hkl
