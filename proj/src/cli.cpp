#include "hkl/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "hkl/analysis.hpp"
#include "hkl/dsl.hpp"
#include "hkl/error.hpp"
#include "hkl/export.hpp"
#include "hkl/runs.hpp"
#include "json_codec.hpp"

namespace hkl::cli {

namespace {

using detail::json;

/// I/O or usage problem; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<std::string> paths;
  std::string format = "text";
  std::string out;
  std::string system;
  std::string structure;
  // simulate
  bool interactive = false;
  bool random = false;
  std::size_t steps = 10;
  std::uint64_t seed = 0;
  std::string replay;
  std::string trace;
  // unfold
  std::size_t maxEvents = 1000;
  bool stats = false;
  // analyze
  bool invariants = false;
  bool reachability = false;
  bool deadlocks = false;
  std::size_t bound = 100'000;
  // export
  std::string what = "module";
};

class Session {
 public:
  Session(const Options& o, std::istream& in, std::ostream& out, std::ostream& err, bool color)
      : opt_(o), in_(in), out_(out), err_(err), color_(color) {}

  int check() {
    auto model = load();
    Diagnostics problems;
    for (const auto& s : model.systems) {
      auto c = compose_all(model, s.expr);
      for (auto& d : c) {
        d.message = "system '" + s.name + "': " + d.message;
        problems.push_back(std::move(d));
      }
    }
    report(problems);
    if (has_errors(problems)) return kModelError;
    progress() << "ok: " << model.signatures.size() << " signature(s), " << model.structures.size()
               << " structure(s), " << model.modules.size() << " module(s), " << model.systems.size()
               << " system(s)\n";
    return kSuccess;
  }

  int compose() {
    auto model = load();
    Module m = evaluate_system(model, select_system(model).expr);
    progress() << "left: " << label_list(m.left) << ", right: " << label_list(m.right) << "\n";
    if (opt_.format == "json") emit(export_json(m));
    else if (opt_.format == "dot") emit(export_dot(m));
    else if (!opt_.out.empty()) emit("left: " + label_list(m.left) + "\nright: " + label_list(m.right) + "\n");
    return kSuccess;
  }

  int instantiate_cmd() {
    auto model = load();
    NetInstance inst = instance(model);
    if (opt_.format == "json") emit(export_json(inst));
    else if (opt_.format == "dot") emit(export_dot(inst));
    else emit(format_marking(inst.marking) + "\n");
    return kSuccess;
  }

  int simulate() {
    auto model = load();
    NetInstance inst = instance(model);
    int modes = int(opt_.interactive) + int(opt_.random) + int(!opt_.replay.empty());
    if (modes > 1) throw UsageError("choose one of --interactive, --random, --replay");
    Trace trace;
    Marking marking = inst.marking;
    if (!opt_.replay.empty()) {
      trace = import_json<Trace>(read_file(opt_.replay));
      for (std::size_t i = 0; i < trace.size(); ++i) {
        auto next = fire(inst, marking, trace[i]);
        if (!next)
          throw Error(ErrorCode::NotEnabled, "step " + std::to_string(i + 1) + ": " + format_mode(trace[i]) +
                                                 " is not enabled");
        marking = std::move(*next);
      }
    } else if (opt_.interactive) {
      interactive(inst, marking, trace);
    } else {
      std::mt19937_64 rng(opt_.seed);
      progress() << "initial: " << format_marking(marking) << "\n";
      for (std::size_t i = 0; i < opt_.steps; ++i) {
        auto enabled = enabled_modes(inst, marking);
        if (enabled.empty()) {
          progress() << "deadlock after " << i << " step(s)\n";
          break;
        }
        std::uniform_int_distribution<std::size_t> pick(0, enabled.size() - 1);
        const Mode& m = enabled[pick(rng)];
        marking = *fire(inst, marking, m);
        trace.push_back(m);
        progress() << (i + 1) << ". " << format_mode(m) << "\n";
      }
    }
    if (!opt_.trace.empty()) write_file(opt_.trace, export_json(trace));
    if (opt_.format == "json") {
      json body{{"trace", json::parse(export_json(trace))["body"]}, {"marking", detail::marking_json(marking)}};
      emit(detail::envelope("simulation", std::move(body)).dump(2) + "\n");
    } else {
      emit("final: " + format_marking(marking) + "\n");
    }
    return kSuccess;
  }

  int unfold_cmd() {
    if (opt_.maxEvents == 0) throw UsageError("--max-events must be positive");
    auto model = load();
    NetInstance inst = instance(model);
    auto runs = unfold(inst, opt_.maxEvents);
    if (opt_.stats) {
      std::ostream& os = opt_.format == "text" ? out_ : err_;
      os << "runs " << runs.size() << "\n";
      for (const auto& r : runs) {
        os << "events " << r.events.size() << "\n";
        os << "conditions " << r.conditions.size() << "\n";
        os << "views " << global_views(r).size() << "\n";
        os << "linearizations " << count_linearizations(r) << "\n";
      }
    }
    if (opt_.format == "json") {
      json body = json::array();
      for (const auto& r : runs) body.push_back(json::parse(export_json(r))["body"]);
      emit(detail::envelope("runs", std::move(body)).dump(2) + "\n");
    } else if (opt_.format == "dot") {
      std::string text;
      for (const auto& r : runs) text += export_dot(r);
      emit(text);
    } else if (!opt_.stats) {
      std::ostringstream os;
      for (std::size_t k = 0; k < runs.size(); ++k) {
        os << "run " << k + 1 << ": " << runs[k].events.size() << " event(s)\n";
        for (const auto& e : runs[k].events) os << "  " << format_mode(e.mode) << "\n";
      }
      emit(os.str());
    }
    return kSuccess;
  }

  int analyze() {
    if (opt_.bound == 0) throw UsageError("--bound must be positive");
    auto model = load();
    NetInstance inst = instance(model);
    bool all = !opt_.invariants && !opt_.reachability && !opt_.deadlocks;
    json body = json::object();
    std::ostringstream os;
    if (all || opt_.reachability) {
      auto g = reachable_markings(inst, opt_.bound);
      body["reachableMarkings"] = g.markings.size();
      os << "reachable markings: " << g.markings.size() << "\n";
    }
    if (all || opt_.invariants) {
      ExpandedNet net = expand(inst);
      auto pis = place_invariants(net);
      auto tis = transition_invariants(net);
      json pj = json::array(), tj = json::array();
      os << "place invariants: " << pis.size() << "\n";
      for (const auto& iv : pis) {
        long value = weighted_sum(net, iv, inst.marking);
        json weights = json::object();
        for (std::size_t i = 0; i < iv.weights().size(); ++i)
          if (iv.weights()[i] != 0)
            weights[net.lowPlaces[i].first + ":" + net.lowPlaces[i].second] = iv.weights()[i];
        pj.push_back(json{{"weights", weights}, {"value", value}});
        os << "  " << weighted_text(weights) << " = " << value << "\n";
      }
      os << "transition invariants: " << tis.size() << "\n";
      for (const auto& iv : tis) {
        json weights = json::object();
        for (std::size_t i = 0; i < iv.weights().size(); ++i)
          if (iv.weights()[i] != 0) weights[format_mode(net.lowTransitions[i])] = iv.weights()[i];
        tj.push_back(json{{"weights", weights}});
        os << "  " << weighted_text(weights) << "\n";
      }
      body["placeInvariants"] = std::move(pj);
      body["transitionInvariants"] = std::move(tj);
    }
    if (all || opt_.deadlocks) {
      auto dl = deadlocks(inst, opt_.bound);
      json dj = json::array();
      os << "deadlocks: " << dl.size() << "\n";
      for (const auto& m : dl) {
        dj.push_back(detail::marking_json(m));
        os << "  " << format_marking(m) << "\n";
      }
      body["deadlocks"] = std::move(dj);
    }
    if (opt_.format == "json") emit(detail::envelope("report", std::move(body)).dump(2) + "\n");
    else emit(os.str());
    return kSuccess;
  }

  int export_cmd() {
    if (opt_.format == "text") throw UsageError("export needs --format json or --format dot");
    auto model = load();
    bool dot = opt_.format == "dot";
    if (opt_.what == "module") {
      Module m = evaluate_system(model, select_system(model).expr);
      emit(dot ? export_dot(m) : export_json(m));
      return kSuccess;
    }
    NetInstance inst = instance(model);
    if (opt_.what == "instance") {
      emit(dot ? export_dot(inst) : export_json(inst));
    } else if (opt_.what == "reachability") {
      auto g = reachable_markings(inst, opt_.bound);
      emit(dot ? export_dot(g) : export_json(g));
    } else {
      auto runs = unfold(inst, opt_.maxEvents);
      if (runs.size() != 1) throw Error(ErrorCode::Format, "the instance has " + std::to_string(runs.size()) + " runs");
      emit(dot ? export_dot(runs.front()) : export_json(runs.front()));
    }
    return kSuccess;
  }

 private:
  std::ostream& progress() { return opt_.format == "text" ? out_ : err_; }

  std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) throw UsageError("cannot write '" + path + "'");
  }

  void emit(const std::string& text) {
    if (opt_.out.empty()) out_ << text;
    else write_file(opt_.out, text);
  }

  void report(const Diagnostics& ds) {
    for (const auto& d : ds) {
      std::ostringstream line;
      line << d;
      std::string s = line.str();
      if (color_) {
        auto pos = s.find("error");
        if (pos != std::string::npos) s = s.substr(0, pos) + "\x1b[1;31merror\x1b[0m" + s.substr(pos + 5);
      }
      err_ << s << "\n";
    }
  }

  dsl::ModelSet load() {
    if (opt_.paths.empty()) throw UsageError("no input files");
    std::vector<dsl::SourceFile> files;
    for (const auto& p : opt_.paths) files.push_back({p, read_file(p)});
    auto result = dsl::parse(files);
    report(result.diagnostics);
    if (!result.model) throw ModelFailure{};
    return std::move(*result.model);
  }

  Diagnostics compose_all(const dsl::ModelSet& model, const dsl::SystemExpr& e) {
    try {
      evaluate_system(model, e);
      return {};
    } catch (const Error& ex) {
      return {Diagnostic{Severity::Error, std::string(to_string(ex.code())), "", ex.what(), {}}};
    }
  }

  const dsl::SystemDecl& select_system(const dsl::ModelSet& model) {
    if (!opt_.system.empty()) {
      const auto* s = model.find_system(opt_.system);
      if (!s) throw UsageError("no system named '" + opt_.system + "'");
      return *s;
    }
    if (model.systems.size() != 1) throw UsageError("pick a system with --system");
    return model.systems.front();
  }

  NetInstance instance(const dsl::ModelSet& model) {
    Module m = evaluate_system(model, select_system(model).expr);
    const auto* schema = std::get_if<NetSchema>(&m.interior);
    if (!schema) throw Error(ErrorCode::InvalidSchema, "the system has no net to instantiate");
    StructurePtr st;
    if (!opt_.structure.empty()) {
      st = model.find_structure(opt_.structure);
      if (!st) throw UsageError("no structure named '" + opt_.structure + "'");
    } else if (model.structures.size() == 1) {
      st = model.structures.front();
    } else {
      throw UsageError("pick a structure with --structure");
    }
    return hkl::instantiate(*schema, st);
  }

  static std::string label_list(const std::vector<InterfaceElement>& side) {
    if (side.empty()) return "(empty)";
    std::string s;
    for (const auto& l : labels(side)) s += (s.empty() ? "" : " ") + l;
    return s;
  }

  static std::string weighted_text(const json& weights) {
    std::string s;
    for (const auto& [k, v] : weights.items()) {
      long w = v.get<long>();
      std::string term = (w == 1 ? "" : std::to_string(w) + "*") + k;
      s += s.empty() ? term : (w < 0 ? " " : " + ") + term;
    }
    return s.empty() ? "0" : s;
  }

  void interactive(const NetInstance& inst, Marking& marking, Trace& trace) {
    std::ostream& os = progress();
    for (;;) {
      os << "marking: " << format_marking(marking) << "\n";
      auto enabled = enabled_modes(inst, marking);
      if (enabled.empty()) {
        os << "deadlock\n";
        return;
      }
      for (std::size_t i = 0; i < enabled.size(); ++i) os << "  " << i + 1 << ") " << format_mode(enabled[i]) << "\n";
      std::size_t choice = 0;
      for (;;) {
        os << "choose 1-" << enabled.size() << " or q: " << std::flush;
        std::string line;
        if (!std::getline(in_, line)) {
          os << "\n";
          return;
        }
        line.erase(0, line.find_first_not_of(" \t\r"));
        line.erase(line.find_last_not_of(" \t\r") + 1);
        if (line == "q" || line == "quit") return;
        try {
          std::size_t used = 0;
          unsigned long n = std::stoul(line, &used);
          if (used == line.size() && n >= 1 && n <= enabled.size()) {
            choice = n;
            break;
          }
        } catch (const std::exception&) {
        }
        os << "invalid choice '" << line << "'\n";
      }
      const Mode& m = enabled[choice - 1];
      marking = *fire(inst, marking, m);
      trace.push_back(m);
      os << "fired " << format_mode(m) << "\n";
    }
  }

 public:
  /// Parse failure whose diagnostics were already printed.
  struct ModelFailure {};

 private:
  const Options& opt_;
  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;
  bool color_;
};

bool color_enabled(bool tty) {
  if (const char* env = std::getenv("HKL_COLOR")) return std::string(env) == "1";
  return tty;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err, bool tty) {
  Options o;
  CLI::App app{"Compose, instantiate, simulate and analyze modular high-level Petri nets", "hkl"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto common = [&](CLI::App* cmd, bool instance) {
    cmd->add_option("paths", o.paths, "Model files (.hkl)")->required();
    cmd->add_option("--out", o.out, "Write the artifact to a file instead of stdout");
    cmd->add_option("--system", o.system, "System to use (default: the only one)");
    if (instance) cmd->add_option("--structure", o.structure, "Structure to instantiate with (default: the only one)");
  };
  auto format = [&](CLI::App* cmd, std::vector<std::string> allowed) {
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember(allowed));
  };

  auto* check = app.add_subcommand("check", "Parse and validate models");
  check->add_option("paths", o.paths, "Model files (.hkl)")->required();

  auto* compose = app.add_subcommand("compose", "Compose the modules of a system");
  common(compose, false);
  format(compose, {"text", "json", "dot"});

  auto* inst = app.add_subcommand("instantiate", "Instantiate a system with a structure");
  common(inst, true);
  format(inst, {"text", "json", "dot"});

  auto* sim = app.add_subcommand("simulate", "Play the token game");
  common(sim, true);
  format(sim, {"text", "json"});
  sim->add_flag("--interactive", o.interactive, "Choose modes from a numbered menu");
  sim->add_flag("--random", o.random, "Fire uniformly chosen modes");
  sim->add_option("--steps", o.steps, "Number of random steps");
  sim->add_option("--seed", o.seed, "Random seed");
  sim->add_option("--replay", o.replay, "Replay a trace file");
  sim->add_option("--trace", o.trace, "Write the trace to a file");

  auto* unf = app.add_subcommand("unfold", "Compute the maximal runs");
  common(unf, true);
  format(unf, {"text", "json", "dot"});
  unf->add_option("--max-events", o.maxEvents, "Largest run to build")->check(CLI::PositiveNumber);
  unf->add_flag("--stats", o.stats, "Print run statistics");

  auto* ana = app.add_subcommand("analyze", "Reachability, invariants and deadlocks");
  common(ana, true);
  format(ana, {"text", "json"});
  ana->add_flag("--invariants", o.invariants, "Place and transition invariants");
  ana->add_flag("--reachability", o.reachability, "Count reachable markings");
  ana->add_flag("--deadlocks", o.deadlocks, "List dead markings");
  ana->add_option("--bound", o.bound, "Largest state space to explore")->check(CLI::PositiveNumber);

  auto* exp = app.add_subcommand("export", "Write a system artifact as JSON or DOT");
  common(exp, true);
  format(exp, {"json", "dot"});
  exp->add_option("--what", o.what, "Artifact to export")
      ->check(CLI::IsMember({"module", "instance", "run", "reachability"}));
  exp->add_option("--max-events", o.maxEvents, "Largest run to build")->check(CLI::PositiveNumber);
  exp->add_option("--bound", o.bound, "Largest state space to explore")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  Session s(o, in, out, err, color_enabled(tty));
  try {
    if (*check) return s.check();
    if (*compose) return s.compose();
    if (*inst) return s.instantiate_cmd();
    if (*sim) return s.simulate();
    if (*unf) return s.unfold_cmd();
    if (*ana) return s.analyze();
    if (*exp) return s.export_cmd();
  } catch (const Session::ModelFailure&) {
    return kModelError;
  } catch (const UsageError& e) {
    err << "hkl: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "hkl: error: " << e.what() << "\n";
    return kModelError;
  }
  return kUsageError;
}

}  // namespace hkl::cli
