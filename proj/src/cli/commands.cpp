#include "doctrina/cli.hpp"

#include "doctrina/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <random>
#include <sstream>

namespace doctrina::cli {

namespace {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::size_t depth = 4;
  std::size_t rounds = 64;
  std::size_t splits = 16;
  std::size_t fresh = 256;
  std::size_t doublings = 2;
  std::size_t model_size = 3;
  bool json = false;
  std::uint64_t seed = 1;

  SaturationBudget budget() const { return {rounds, splits, fresh}; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TheoryFile load(const std::string& path) {
  try {
    return parse_theory(read_file(path));
  } catch (const ParseError& e) {
    throw Error(path + ":" + e.what());
  }
}

Json budget_json(const SaturationBudget& b) {
  return Json{{"rounds", b.rounds}, {"splits", b.split_depth}, {"fresh_terms", b.fresh_terms}};
}

Json trace_json(const Signature& sig, const std::vector<TraceStep>& trace) {
  Json out = Json::array();
  for (const TraceStep& s : trace) {
    Json inst = Json::array();
    for (const Term& t : s.instance.components())
      inst.push_back(to_string(sig, s.instance.domain(), t));
    out.push_back(Json{{"axiom", s.axiom}, {"instance", inst}, {"branch", s.branch}});
  }
  return out;
}

std::string status_name(bool proved) { return proved ? "proved" : "unknown"; }

void emit(std::ostream& out, const RunConfig& cfg, const Json& j, const std::string& human) {
  if (cfg.json)
    out << j.dump(2) << "\n";
  else
    out << human;
}

// Every model of t with carriers up to max_size satisfies s. Returns the
// number of models of t checked, or nullopt if enumeration was refused.
std::optional<std::size_t> check_models(const Theory& t, const Sequent& s, std::size_t max_size,
                                        bool& sound) {
  sound = true;
  if (max_size == 0)
    return 0;
  try {
    auto sig = std::make_shared<const Signature>(t.signature);
    ModelStream stream(sig, max_size);
    std::size_t models = 0;
    while (stream.next()) {
      if (!satisfies(stream.current(), t))
        continue;
      ++models;
      if (!satisfies(stream.current(), s)) {
        sound = false;
        break;
      }
    }
    return models;
  } catch (const RefusalError&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------- entails

int cmd_entails(const std::string& path, const std::string& sequent, const std::string& axiom,
                const RunConfig& cfg, std::ostream& out) {
  Workspace ws(load(path));
  Theory theory = ws.theory();
  std::optional<Sequent> s;
  if (!axiom.empty()) {
    const Axiom* a = theory.find_axiom(axiom);
    if (!a)
      throw Error("unknown axiom '" + axiom + "'");
    s = a->sequent;
    std::erase_if(theory.axioms, [&](const Axiom& x) { return x.name == axiom; });
  } else {
    s = ws.parse_sequent(sequent);
    theory = ws.theory();
  }
  const Signature& sig = theory.signature;
  EntailmentVerdict v = entails(theory, *s, cfg.budget());
  Json j{{"command", "entails"},
         {"sequent", to_string(sig, *s)},
         {"status", status_name(v.proved())},
         {"budget", budget_json(cfg.budget())}};
  if (v.proved()) {
    j["bound_used"] = v.bound_used;
    j["used_disjuncts"] = v.used_disjuncts;
    j["trace"] = trace_json(sig, v.trace);
  }
  std::string human = to_string(sig, *s) + ": " + status_name(v.proved()) + "\n";
  for (const TraceStep& st : v.trace)
    human += "  [" + st.branch + "] " + st.axiom + " at " + to_string(sig, st.instance) + "\n";
  emit(out, cfg, j, human);
  return v.proved() ? 0 : 2;
}

// --------------------------------------------------------------- herbrand

Json herbrand_goal(Workspace& ws, const GoalDecl& decl, const RunConfig& cfg, bool& proved,
                   std::string& human) {
  const Theory& t = ws.theory();
  const Signature& sig = t.signature;
  const ExistentialGoal& g = ws.goal(decl);
  HerbrandSchedule schedule{cfg.depth, cfg.doublings, cfg.budget()};
  auto cert = find_witnesses(t, g, schedule);
  proved = cert.has_value();
  Json j{{"goal", decl.name}, {"statement", to_string(sig, g)}, {"status", status_name(proved)}};
  human += decl.name + ": " + status_name(proved) + "\n";
  if (!cert)
    return j;
  Json ws_json = Json::array();
  for (const TermTuple& w : cert->witnesses)
    ws_json.push_back(to_string(sig, w));
  j["witnesses"] = ws_json;
  j["derived_sequent"] = to_string(sig, cert->derived);
  j["depth_used"] = cert->depth_used;
  j["budget"] = budget_json(cert->budget);
  j["trace"] = trace_json(sig, cert->trace);
  human += "  witnesses: " + ws_json.dump() + "\n  derived: " + to_string(sig, cert->derived) + "\n";
  if (decl.kind == GoalDecl::Kind::ForallForall) {
    Formula premise = ws.morleyisation().translate(decl.body);
    Formula conclusion = ws.morleyisation().translate(*decl.conclusion);
    Sequent conj = conjunctive_sequent(premise, conclusion, cert->witnesses);
    bool ok = entails(t, conj, cert->budget).proved();
    j["conjunctive_sequent"] = to_string(sig, conj);
    j["conjunctive_status"] = status_name(ok);
    human += "  conjunctive: " + to_string(sig, conj) + " (" + status_name(ok) + ")\n";
  }
  bool sound = true;
  auto models = check_models(t, cert->derived, cfg.model_size, sound);
  if (!sound)
    throw Error("goal '" + decl.name + "': certificate fails in a finite model");
  if (models)
    j["models_checked"] = *models;
  else
    j["models_checked"] = nullptr;
  return j;
}

int cmd_herbrand(const std::string& path, const std::string& goal, const RunConfig& cfg,
                 std::ostream& out) {
  Workspace ws(load(path));
  std::vector<const GoalDecl*> goals;
  if (!goal.empty()) {
    const GoalDecl* g = ws.file().find_goal(goal);
    if (!g)
      throw Error("unknown goal '" + goal + "'");
    goals.push_back(g);
  } else {
    for (const GoalDecl& g : ws.file().goals)
      goals.push_back(&g);
  }
  Json results = Json::array();
  std::string human;
  bool all = true;
  for (const GoalDecl* g : goals) {
    bool proved = false;
    results.push_back(herbrand_goal(ws, *g, cfg, proved, human));
    all = all && proved;
  }
  emit(out, cfg, goal.empty() ? results : results[0], human);
  return all ? 0 : 2;
}

// -------------------------------------------------------------------- leq

int cmd_leq(const std::string& path, const std::string& left, const std::string& right,
            const std::string& context, const RunConfig& cfg, std::ostream& out) {
  Workspace ws(load(path));
  Context base = ws.parse_context(context);
  ExElement a = ws.parse_element(left, base);
  ExElement b = ws.parse_element(right, base);
  const Theory& t = ws.theory();
  const Signature& sig = t.signature;
  LeqResult r = leq(t, a, b, cfg.depth, cfg.budget());
  Json j{{"command", "leq"},
         {"left", to_string(sig, a)},
         {"right", to_string(sig, b)},
         {"status", status_name(r.proved())},
         {"depth", cfg.depth},
         {"budget", budget_json(cfg.budget())}};
  std::string human = to_string(sig, a) + " <= " + to_string(sig, b) + ": " +
                      status_name(r.proved()) + "\n";
  if (r.proved()) {
    Json pairs = Json::array();
    for (const LeqPairWitness& p : r.pairs) {
      Json arrows = Json::array();
      for (const LeqArrow& ar : p.arrows) {
        arrows.push_back(Json{{"target", ar.target}, {"arrow", to_string(sig, ar.arrow)}});
        human += "  pair " + std::to_string(p.source) + " -> pair " + std::to_string(ar.target) +
                 " along " + to_string(sig, ar.arrow) + "\n";
      }
      pairs.push_back(Json{{"source", p.source},
                           {"arrows", arrows},
                           {"sequent", to_string(sig, p.sequent)},
                           {"trace", trace_json(sig, p.trace)}});
    }
    j["pairs"] = pairs;
  }
  emit(out, cfg, j, human);
  return r.proved() ? 0 : 2;
}

// ------------------------------------------------------------------ model

int cmd_model(const std::string& path, const std::string& model_path, const RunConfig& cfg,
              std::ostream& out) {
  Workspace ws(load(path));
  auto base = std::make_shared<const Signature>(ws.file().signature);
  FiniteModel m = model_from_json(base, read_file(model_path));
  if (!ws.morleyisation().definitions().empty())
    m = expand_model(ws.morleyisation(), m);
  auto vs = violations(m, ws.theory());
  Json list = Json::array();
  std::string human = vs.empty() ? "all axioms hold\n" : "";
  for (const Violation& v : vs) {
    list.push_back(Json{{"axiom", v.axiom}, {"counter_tuple", v.counter_tuple}});
    std::string tuple;
    for (std::size_t i = 0; i < v.counter_tuple.size(); ++i)
      tuple += (i ? ", " : "") + std::to_string(v.counter_tuple[i]);
    human += v.axiom + " fails at (" + tuple + ")\n";
  }
  Json j{{"command", "model"}, {"satisfied", vs.empty()}, {"violations", list}};
  emit(out, cfg, j, human);
  return vs.empty() ? 0 : 1;
}

// ------------------------------------------------------------------- laws

// Random elements over the empty context: pairs with one witness variable
// and bodies built from atoms over it.
class ElementSource {
public:
  ElementSource(const Signature& sig, std::uint64_t seed) : sig_(sig), rng_(seed) {
    for (SortId s = 0; s < sig.sorts().size(); ++s) {
      Context w({{"w", s}});
      std::vector<Formula> atoms;
      for (SymbolId r = 0; r < sig.relations().size(); ++r) {
        const RelationSymbol& rs = sig.relation_symbol(r);
        std::vector<Term> args;
        bool ok = true;
        for (SortId a : rs.args) {
          auto ts = enumerate_terms(sig, w, a, 1);
          if (ts.empty()) {
            ok = false;
            break;
          }
          args.push_back(ts[pick(ts.size())]);
        }
        if (ok)
          atoms.push_back(Formula::relation(sig, w, r, std::move(args)));
      }
      auto ts = enumerate_terms(sig, w, s, 1);
      if (ts.size() > 1)
        atoms.push_back(Formula::equal(w, ts[0], ts[1]));
      if (!atoms.empty())
        atoms_.push_back({w, std::move(atoms)});
    }
  }

  ExElement next(bool horn) {
    if (atoms_.empty())
      return top(Context());
    std::size_t n = horn ? 1 : pick(3) + 1;
    std::vector<ExPair> pairs;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& [w, atoms] = atoms_[pick(atoms_.size())];
      std::vector<Formula> body;
      for (std::size_t k = pick(2) + 1; k > 0; --k)
        body.push_back(atoms[pick(atoms.size())]);
      Formula f = Formula::conj(w, body);
      if (!horn && pick(2))
        f = Formula::disj(f, atoms[pick(atoms.size())]);
      pairs.push_back({w, f});
    }
    return ExElement(Context(), std::move(pairs));
  }

private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  const Signature& sig_;
  std::mt19937_64 rng_;
  std::vector<std::pair<Context, std::vector<Formula>>> atoms_;
};

int cmd_laws(const std::string& path, std::size_t count, const RunConfig& cfg, std::ostream& out) {
  Workspace ws(load(path));
  const Theory& t = ws.theory();
  const Signature& sig = t.signature;
  bool horn = t.fragment == Fragment::Horn;
  ElementSource src(sig, cfg.seed);
  SaturationBudget budget = cfg.budget();
  std::size_t checks = 0;
  Json failures = Json::array();
  auto check = [&](const char* law, const ExElement& x, const ExElement& y, const ExElement& a,
                   const ExElement& b, const ExElement& c) {
    ++checks;
    if (leq(t, x, y, 0, budget).proved() && leq(t, y, x, 0, budget).proved())
      return;
    failures.push_back(Json{{"law", law},
                            {"a", to_string(sig, a)},
                            {"b", to_string(sig, b)},
                            {"c", to_string(sig, c)}});
  };
  for (std::size_t i = 0; i < count; ++i) {
    ExElement a = src.next(horn), b = src.next(horn), c = src.next(horn);
    check("meet_commutative", meet(t, a, b), meet(t, b, a), a, b, c);
    check("meet_associative", meet(t, a, meet(t, b, c)), meet(t, meet(t, a, b), c), a, b, c);
    if (horn)
      continue;
    check("join_commutative", join(t, a, b), join(t, b, a), a, b, c);
    check("join_associative", join(t, a, join(t, b, c)), join(t, join(t, a, b), c), a, b, c);
    check("absorption_meet", meet(t, a, join(t, a, b)), a, a, b, c);
    check("absorption_join", join(t, a, meet(t, a, b)), a, a, b, c);
    check("distributive", meet(t, a, join(t, b, c)), join(t, meet(t, a, b), meet(t, a, c)), a, b,
          c);
  }
  Json j{{"command", "laws"},
         {"seed", cfg.seed},
         {"triples", count},
         {"checks", checks},
         {"failures", failures}};
  std::string human = std::to_string(checks) + " checks, " + std::to_string(failures.size()) +
                      " not confirmed at depth 0\n";
  emit(out, cfg, j, human);
  return failures.empty() ? 0 : 2;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Existential completion, entailment and Herbrand witnesses for universal theories",
               "doctrina"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string file, sequent, axiom, goal, left, right, context, model_path;
  std::size_t count = 20;

  auto common = [&](CLI::App* sub) {
    sub->add_option("file", file, "Theory file")->required();
    sub->add_option("--depth", cfg.depth, "Maximal term depth")->capture_default_str();
    sub->add_option("--rounds", cfg.rounds, "Saturation rounds per branch")->capture_default_str();
    sub->add_option("--splits", cfg.splits, "Case-split depth cap")->capture_default_str();
    sub->add_option("--fresh", cfg.fresh, "Terms the chase may create")->capture_default_str();
    sub->add_option("--model-size", cfg.model_size, "Largest carrier for model checks")
        ->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    sub->add_flag("--json", cfg.json, "Machine-readable output");
  };

  auto* entails_cmd = app.add_subcommand("entails", "Decide a sequent (Proved / Unknown)");
  common(entails_cmd);
  auto* seq_opt = entails_cmd->add_option("--sequent", sequent, "Sequent 'lhs |- rhs [ctx]'");
  auto* ax_opt = entails_cmd->add_option("--axiom", axiom, "Prove this axiom from the others");
  seq_opt->excludes(ax_opt);

  auto* herbrand_cmd = app.add_subcommand("herbrand", "Find Herbrand witnesses for goals");
  common(herbrand_cmd);
  herbrand_cmd->add_option("--goal", goal, "Goal name (default: every goal)");
  herbrand_cmd->add_option("--doublings", cfg.doublings, "Budget doublings in the schedule")
      ->capture_default_str();

  auto* leq_cmd = app.add_subcommand("leq", "Compare two existential elements");
  common(leq_cmd);
  leq_cmd->add_option("left", left, "Element '{ [binders] formula ; ... }'")->required();
  leq_cmd->add_option("right", right, "Element")->required();
  leq_cmd->add_option("--context", context, "Base context 'x:S, y:T'");

  auto* model_cmd = app.add_subcommand("model", "Check a finite model against the axioms");
  common(model_cmd);
  model_cmd->add_option("model", model_path, "Model JSON file")->required();

  auto* laws_cmd = app.add_subcommand("laws", "Check lattice laws on random elements");
  common(laws_cmd);
  laws_cmd->add_option("--count", count, "Random triples")->capture_default_str();

  auto* print_cmd = app.add_subcommand("print", "Parse and pretty-print a theory file");
  print_cmd->add_option("file", file, "Theory file")->required();

  std::vector<const char*> argv{"doctrina"};
  for (const std::string& a : args)
    argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (entails_cmd->parsed()) {
      if (sequent.empty() && axiom.empty())
        throw Error("entails needs --sequent or --axiom");
      return cmd_entails(file, sequent, axiom, cfg, out);
    }
    if (herbrand_cmd->parsed())
      return cmd_herbrand(file, goal, cfg, out);
    if (leq_cmd->parsed())
      return cmd_leq(file, left, right, context, cfg, out);
    if (model_cmd->parsed())
      return cmd_model(file, model_path, cfg, out);
    if (laws_cmd->parsed())
      return cmd_laws(file, count, cfg, out);
    if (print_cmd->parsed()) {
      out << print_theory(load(file));
      return 0;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

} // namespace doctrina::cli
