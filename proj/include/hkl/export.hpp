#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hkl/calculus.hpp"
#include "hkl/netschema.hpp"
#include "hkl/run.hpp"

namespace hkl {

/// Sequence of fired modes, replayable from the initial marking.
using Trace = std::vector<Mode>;

/// Graphviz digraph text. Places and conditions are ellipses, transitions
/// and events boxes; interface elements sit on the min/max ranks.
std::string export_dot(const Module& m);
std::string export_dot(const NetInstance& inst);
std::string export_dot(const Run& r);
std::string export_dot(const ReachabilityGraph& g);

inline constexpr int kFormatVersion = 1;

/// `{"formatVersion": 1, "kind": ..., "body": ...}`, pretty-printed.
std::string export_json(const Signature& sig);
std::string export_json(const Structure& st);
std::string export_json(const NetSchema& schema);
std::string export_json(const NetInstance& inst);
std::string export_json(const Run& r);
std::string export_json(const Module& m);
std::string export_json(const ReachabilityGraph& g);
std::string export_json(const Trace& t);

/// Inverse of export_json. Unknown or missing keys, a wrong kind or
/// version, and ill-sorted terms throw Error{Format}.
template <typename T>
T import_json(std::string_view text);

template <> Signature import_json<Signature>(std::string_view text);
template <> Structure import_json<Structure>(std::string_view text);
template <> NetSchema import_json<NetSchema>(std::string_view text);
template <> NetInstance import_json<NetInstance>(std::string_view text);
template <> Run import_json<Run>(std::string_view text);
template <> Module import_json<Module>(std::string_view text);
template <> ReachabilityGraph import_json<ReachabilityGraph>(std::string_view text);
template <> Trace import_json<Trace>(std::string_view text);

}  // namespace hkl
