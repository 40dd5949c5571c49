#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hkl/calculus.hpp"
#include "hkl/dsl.hpp"
#include "hkl/error.hpp"
#include "hkl/netschema.hpp"
#include "hkl/run.hpp"

namespace test {

inline std::string path(const std::string& rel) { return std::string(HKL_SOURCE_DIR) + "/" + rel; }

inline std::string read_text(const std::string& rel) {
  std::ifstream f(path(rel), std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline hkl::dsl::ModelSet load(const std::string& rel) {
  auto r = hkl::dsl::parse(read_text(rel), rel);
  if (!r.model) throw std::runtime_error("fixture " + rel + " does not parse");
  return *r.model;
}

inline hkl::dsl::ModelSet letters() { return load("models/letters.hkl"); }

inline hkl::Module system_module(const hkl::dsl::ModelSet& m) {
  return hkl::dsl::evaluate_system(m, m.systems.front().expr);
}

inline hkl::NetInstance instance_of(const hkl::dsl::ModelSet& m) {
  return hkl::instantiate(std::get<hkl::NetSchema>(system_module(m).interior), m.structures.front());
}

inline hkl::NetInstance letters_instance() { return instance_of(letters()); }

inline const std::array<std::string, 4> kBoxes = {"outbox", "postbox", "deliveryBox", "inbox"};

/// Hand-written state space of the letter system: each letter advances
/// independently through the four boxes.
inline std::set<hkl::Marking> letter_markings_oracle(const std::vector<std::string>& letters) {
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> stack{std::vector<int>(letters.size(), 0)};
  while (!stack.empty()) {
    auto s = stack.back();
    stack.pop_back();
    if (!seen.insert(s).second) continue;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] < 3) {
        auto t = s;
        ++t[i];
        stack.push_back(t);
      }
  }
  std::set<hkl::Marking> out;
  for (const auto& s : seen) {
    hkl::Marking m;
    for (const auto& b : kBoxes) m.tokens[b];
    for (std::size_t i = 0; i < s.size(); ++i) ++m.tokens[kBoxes[s[i]]][letters[i]];
    out.insert(m);
  }
  return out;
}

/// Causal order on events from the flow relation, by transitive closure.
inline std::vector<std::vector<bool>> event_precedence(const hkl::Run& r) {
  std::size_t n = r.events.size();
  std::vector<std::vector<bool>> lt(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (auto c : r.events[i].postset)
        if (std::count(r.events[j].preset.begin(), r.events[j].preset.end(), c)) lt[i][j] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (lt[i][k] && lt[k][j]) lt[i][j] = true;
  return lt;
}

/// Counts event permutations that respect the causal order.
inline long brute_force_linearizations(const hkl::Run& r) {
  auto lt = event_precedence(r);
  std::vector<std::size_t> perm(r.events.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  long count = 0;
  do {
    bool ok = true;
    for (std::size_t i = 0; i < perm.size() && ok; ++i)
      for (std::size_t j = i + 1; j < perm.size() && ok; ++j)
        if (lt[perm[j]][perm[i]]) ok = false;
    count += ok;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

/// Every firing sequence from the initial marking, explored exhaustively;
/// returns the multiset of fired modes of each maximal sequence.
inline std::set<std::multiset<std::string>> maximal_firing_bags(const hkl::NetInstance& inst) {
  std::set<std::multiset<std::string>> out;
  std::set<std::pair<hkl::Marking, std::multiset<std::string>>> seen;
  std::vector<std::pair<hkl::Marking, std::multiset<std::string>>> stack{{inst.marking, {}}};
  while (!stack.empty()) {
    auto [m, bag] = stack.back();
    stack.pop_back();
    if (!seen.insert({m, bag}).second) continue;
    auto modes = hkl::enabled_modes(inst, m);
    if (modes.empty()) out.insert(bag);
    for (const auto& mode : modes) {
      auto b = bag;
      b.insert(hkl::format_mode(mode));
      stack.push_back({*hkl::fire(inst, m, mode), b});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random modules for the composition property suites

inline hkl::SignaturePtr random_signature() {
  auto sig = std::make_shared<hkl::Signature>();
  sig->name = "R";
  sig->sorts = {"S", "U"};
  sig->sets = {{"all", "S"}};
  return sig;
}

struct ModuleGenerator {
  std::mt19937_64 rng;
  hkl::SignaturePtr sig = random_signature();
  bool abstractOnly = false;

  explicit ModuleGenerator(std::uint64_t seed) : rng(seed) {}

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

  /// Label pool: labels starting with 'p' are places, 't' transitions.
  static const std::vector<std::string>& pool() {
    static const std::vector<std::string> labels = {"p1", "p2", "p3", "t1", "t2", "t3"};
    return labels;
  }

  hkl::Module module(const std::string& name, bool abstract) {
    hkl::Module m;
    m.name = name;
    hkl::NetSchema s;
    s.signature = sig;
    if (!abstract) {
      std::size_t np = pick(4), nt = pick(4);
      for (std::size_t i = 0; i < np; ++i) {
        std::string sort = coin(0.8) ? "S" : "U";
        std::optional<hkl::Term> init;
        if (sort == "S" && coin(0.2)) init = hkl::Term::elm(*sig, "all");
        s.places.push_back({"p" + std::to_string(i), sort, init});
      }
      for (std::size_t i = 0; i < nt; ++i) s.transitions.push_back({"t" + std::to_string(i), std::nullopt});
      if (np && nt) {
        std::size_t na = pick(5);
        for (std::size_t k = 0; k < na; ++k) {
          std::size_t p = pick(np), t = pick(nt);
          auto dir = coin() ? hkl::ArcDirection::PlaceToTransition : hkl::ArcDirection::TransitionToPlace;
          const auto& sort = s.places[p].sort;
          s.arcs.push_back({p, t, dir, hkl::Term::variable(sort == "S" ? "x" : "y", sort)});
        }
      }
    }
    auto side = [&] {
      std::vector<hkl::InterfaceElement> out;
      for (const auto& l : pool()) {
        if (!coin(0.35)) continue;
        hkl::InterfaceElement e;
        e.label = l;
        e.kind = l[0] == 'p' ? hkl::ElementKind::Place : hkl::ElementKind::Transition;
        if (e.kind == hkl::ElementKind::Place) e.sort = coin(0.85) ? "S" : "U";
        std::size_t count = e.kind == hkl::ElementKind::Place ? s.places.size() : s.transitions.size();
        if (!abstract && count && coin(0.8)) {
          e.node = pick(count);
          if (e.kind == hkl::ElementKind::Place) e.sort = s.places[*e.node].sort;
        }
        out.push_back(e);
      }
      return out;
    };
    m.left = side();
    m.right = side();
    if (abstract) m.interior = hkl::Abstract{};
    else m.interior = std::move(s);
    return m;
  }

  /// A triple for which both association orders are defined.
  std::array<hkl::Module, 3> composable_triple(std::size_t* attempts = nullptr) {
    for (;;) {
      if (attempts) ++*attempts;
      bool abstract_mix = coin(0.15);
      std::array<hkl::Module, 3> t{module("R", abstract_mix && coin()), module("S", abstract_mix && coin()),
                                   module("T", abstract_mix && coin())};
      try {
        for (auto& m : t) m = hkl::make_module(m);
        (void)hkl::compose(hkl::compose(t[0], t[1]), t[2]);
        (void)hkl::compose(t[0], hkl::compose(t[1], t[2]));
        return t;
      } catch (const hkl::Error&) {
      }
    }
  }
};

}  // namespace test
