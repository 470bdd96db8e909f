// Acceptance suite: one line per criterion, exit status 0 iff all pass.

#include "build.hpp"
#include "ex_generators.hpp"
#include "generators.hpp"
#include "oracle.hpp"

#include "doctrina/cli.hpp"
#include "doctrina/error.hpp"
#include "doctrina/herbrand.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <span>
#include <set>
#include <sstream>

using namespace doctrina;
using namespace doctrina::test;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = DOCTRINA_CORPUS_DIR;
const SaturationBudget kBudget{};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void fail(std::string what) {
    pass = false;
    if (failures.size() < 5)
      failures.push_back(std::move(what));
  }
};

// ------------------------------------------------- proof collection (crit 6)

struct Collected {
  Theory theory;
  std::vector<Sequent> sequents;
  std::set<std::string> seen;
};

std::map<std::string, Collected> g_proofs;
std::size_t g_verdicts = 0;

std::string theory_key(const Theory& t) {
  const Signature& sig = t.signature;
  std::string key = to_string(t.fragment) + "|";
  for (const std::string& s : sig.sorts())
    key += s + ",";
  for (const FunctionSymbol& f : sig.functions()) {
    key += f.name + ":";
    for (SortId a : f.args)
      key += std::to_string(a) + " ";
    key += "->" + std::to_string(f.result) + ",";
  }
  for (const RelationSymbol& r : sig.relations()) {
    key += r.name + ":";
    for (SortId a : r.args)
      key += std::to_string(a) + " ";
    key += ",";
  }
  for (const Axiom& a : t.axioms)
    key += a.name + "=" + to_string(sig, a.sequent) + ";";
  return key;
}

void record_proof(const Theory& t, const Sequent& s, const EntailmentVerdict&) {
  ++g_verdicts;
  std::string key = theory_key(t);
  auto it = g_proofs.find(key);
  if (it == g_proofs.end())
    it = g_proofs.emplace(key, Collected{t, {}, {}}).first;
  if (it->second.seen.insert(to_string(t.signature, s)).second)
    it->second.sequents.push_back(s);
}

// ----------------------------------------------------------------- helpers

FiniteModel random_structure(Rng& rng, std::shared_ptr<const Signature> sig, std::size_t size) {
  FiniteModel m(sig, std::vector<std::size_t>(sig->sorts().size(), size));
  for (SymbolId f = 0; f < sig->functions().size(); ++f)
    for (std::size_t i = 0, n = m.table_size(sig->function_symbol(f).args); i < n; ++i)
      m.set_function_entry(f, i, static_cast<Element>(pick(rng, size)));
  for (SymbolId r = 0; r < sig->relations().size(); ++r)
    for (std::size_t i = 0, n = m.table_size(sig->relation_symbol(r).args); i < n; ++i)
      m.set_relation_entry(r, i, coin(rng));
  return m;
}

TinyModel tiny(const FiniteModel& m) {
  const Signature& sig = m.signature();
  TinyModel t;
  for (std::size_t n : m.carriers())
    t.size.push_back(static_cast<int>(n));
  for (SymbolId f = 0; f < sig.functions().size(); ++f) {
    std::map<std::vector<int>, int> table;
    for (const auto& args : all_args(t, sig.function_symbol(f).args)) {
      std::vector<Element> e(args.begin(), args.end());
      table[args] = static_cast<int>(m.apply(f, e));
    }
    t.fn.push_back(std::move(table));
  }
  for (SymbolId r = 0; r < sig.relations().size(); ++r) {
    std::set<std::vector<int>> rows;
    for (const auto& args : all_args(t, sig.relation_symbol(r).args)) {
      std::vector<Element> e(args.begin(), args.end());
      if (m.holds(r, e))
        rows.insert(args);
    }
    t.rel.push_back(std::move(rows));
  }
  return t;
}

std::set<std::vector<Element>> oracle_extend(const TinyModel& m, const ExElement& a) {
  std::set<std::vector<Element>> out;
  for (const auto& cval : all_args(m, a.base().sorts()))
    for (const ExPair& p : a.pairs()) {
      bool found = false;
      for (const auto& w : all_args(m, p.witness.sorts())) {
        std::vector<int> env = w;
        env.insert(env.end(), cval.begin(), cval.end());
        if (holds(m, p.body, env)) {
          found = true;
          break;
        }
      }
      if (found) {
        out.insert(std::vector<Element>(cval.begin(), cval.end()));
        break;
      }
    }
  return out;
}

std::set<std::vector<Element>> as_set(const Subset& s) {
  auto e = s.elements();
  return {e.begin(), e.end()};
}

// The identity reading of a leq proof: every arrow of every pair is the
// identity on the pair's own context.
bool identity_arrows(const LeqResult& r, const ExElement& a) {
  for (const LeqPairWitness& p : r.pairs)
    for (const LeqArrow& ar : p.arrows)
      if (!(ar.arrow == identity(a.pairs()[p.source].body.context())))
        return false;
  return true;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> corpus_files() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(kCorpus))
    if (e.path().extension() == ".th")
      out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

// ----------------------------------------------------------- criterion 1

Outcome category_laws() {
  Outcome o;
  auto start = Clock::now();
  Rng rng(1001);
  std::size_t triples = 0;
  while (triples < 1000) {
    Signature sig = random_signature(rng, 3, 5);
    Context a = random_context(rng, sig, 3, "a");
    Context b = random_context(rng, sig, 3, "b");
    Context c = random_context(rng, sig, 3, "c");
    Context d = random_context(rng, sig, 3, "d");
    auto f = random_tuple(rng, sig, a, b, 3);
    auto g = random_tuple(rng, sig, b, c, 3);
    auto h = random_tuple(rng, sig, c, d, 3);
    auto k = random_tuple(rng, sig, a, c, 3);
    if (!f || !g || !h || !k)
      continue;
    ++triples;
    if (!(compose(*h, compose(*g, *f)) == compose(compose(*h, *g), *f)))
      o.fail("associativity");
    if (!(compose(identity(b), *f) == *f) || !(compose(*f, identity(a)) == *f))
      o.fail("identity");
    Product p = product(b, c);
    TermTuple pair = pairing(*f, *k);
    if (!(compose(p.left, pair) == *f) || !(compose(p.right, pair) == *k))
      o.fail("projection");
    TermTuple into = compose(pair, identity(a));
    if (!(pairing(compose(p.left, into), compose(p.right, into)) == into))
      o.fail("pairing uniqueness");
    if (!(compose(terminal_map(b), *f) == terminal_map(a)))
      o.fail("terminal");
  }
  double secs = seconds_since(start);
  if (secs >= 10)
    o.fail("runtime " + std::to_string(secs) + "s");
  o.detail = std::to_string(triples) + " triples, " + std::to_string(secs).substr(0, 5) + "s";
  return o;
}

// ----------------------------------------------------------- criterion 2

Outcome lattice_laws() {
  Outcome o;
  auto start = Clock::now();
  Rng rng(2002);
  auto theories = lattice_theories();
  std::size_t checks = 0;
  for (int i = 0; i < 300; ++i) {
    const Theory& t = theories[i % theories.size()];
    const Signature& sig = t.signature;
    bool horn = t.fragment == Fragment::Horn;
    Context c = random_context(rng, sig, 1, "c");
    ExElement a = random_element(rng, sig, c, 3, 1, horn);
    ExElement b = random_element(rng, sig, c, 3, 1, horn);
    ExElement d = random_element(rng, sig, c, 3, 1, horn);
    auto check = [&](const char* law, const ExElement& x, const ExElement& y) {
      ++checks;
      if (!mutual_leq(t, x, y, 0, kBudget))
        o.fail(std::string(law) + " on " + to_string(sig, a) + ", " + to_string(sig, b) + ", " +
               to_string(sig, d));
    };
    check("meet associativity", meet(t, a, meet(t, b, d)), meet(t, meet(t, a, b), d));
    check("meet commutativity", meet(t, a, b), meet(t, b, a));
    if (horn)
      continue;
    check("join associativity", join(t, a, join(t, b, d)), join(t, join(t, a, b), d));
    check("join commutativity", join(t, a, b), join(t, b, a));
    check("absorption meet", meet(t, a, join(t, a, b)), a);
    check("absorption join", join(t, a, meet(t, a, b)), a);
    check("distributivity", meet(t, a, join(t, b, d)), join(t, meet(t, a, b), meet(t, a, d)));
    check("dual distributivity", join(t, a, meet(t, b, d)),
          meet(t, join(t, a, b), join(t, a, d)));
  }
  o.detail = "300 triples, " + std::to_string(checks) + " mutual-leq checks, " +
             std::to_string(seconds_since(start)).substr(0, 5) + "s";
  return o;
}

// ----------------------------------------------------------- criterion 3

Outcome adjunction_suite() {
  Outcome o;
  auto start = Clock::now();
  Rng rng(3003);
  auto theories = lattice_theories();
  Signature sig = lattice_signature();
  std::size_t adj_proved = 0, eq_proved = 0;
  for (int i = 0; i < 200; ++i) {
    const Theory& t = theories[i % theories.size()];
    bool horn = t.fragment == Fragment::Horn;
    Context d = random_context(rng, sig, 1, "d");
    if (d.empty())
      d = ctx(sig, {{"d0", "S"}});
    Context c = random_context(rng, sig, 1, "c");
    Context dc = concat(d, c);
    TermTuple pi = projection(dc, d.size(), c.size());
    std::size_t depth = pick(rng, 2);

    // Sigma_d -| pi*, both directions: counit-shaped and unit-shaped
    // instances make sure positive answers occur.
    ExElement a = random_element(rng, sig, dc, 3, 1, horn);
    ExElement b = random_element(rng, sig, c, 3, 1, horn);
    if (i % 3 == 1 && !horn)
      b = join(t, exists_along(a, d), b);
    if (i % 3 == 2)
      a = meet(t, a, subst_ex(b, pi));
    bool left = leq(t, exists_along(a, d), b, depth, kBudget).proved();
    bool right = leq(t, a, subst_ex(b, pi), depth, kBudget).proved();
    if (left != right)
      o.fail("adjunction at depth " + std::to_string(depth) + ": " + to_string(sig, a) + " vs " +
             to_string(sig, b));
    adj_proved += left;

    // Frobenius.
    ExElement fa = random_element(rng, sig, dc, 3, 1, horn);
    ExElement fb = random_element(rng, sig, c, 3, 1, horn);
    if (!mutual_leq(t, exists_along(meet(t, fa, subst_ex(fb, pi)), d),
                    meet(t, exists_along(fa, d), fb), 0, kBudget))
      o.fail("Frobenius: " + to_string(sig, fa) + " / " + to_string(sig, fb));

    // Beck-Chevalley along f : c' -> c.
    Context c2 = random_context(rng, sig, 2, "k");
    auto f = random_tuple(rng, sig, c2, c, 1);
    if (!f) {
      o.fail("no tuple");
      continue;
    }
    Context dc2 = concat(d, c2);
    TermTuple one_f = pairing(projection(dc2, 0, d.size()),
                              compose(*f, projection(dc2, d.size(), c2.size())));
    ExElement ba = random_element(rng, sig, dc, 3, 1, horn);
    if (!mutual_leq(t, subst_ex(exists_along(ba, d), *f), exists_along(subst_ex(ba, one_f), d), 0,
                    kBudget))
      o.fail("Beck-Chevalley: " + to_string(sig, ba));

    // Elementary structure: meet(pi* x, delta) <= y iff x <= (1 x Diag)* y.
    Context e = ctx(sig, {{"y", "S"}});
    Context ce = concat(c, e);
    Context cee = concat(ce, e);
    std::vector<std::size_t> keep, dup;
    for (std::size_t k = 0; k < ce.size(); ++k)
      keep.push_back(k);
    dup = keep;
    dup.push_back(c.size());
    ExElement x = random_element(rng, sig, ce, 2, 1, horn);
    ExElement y = random_element(rng, sig, cee, 2, 1, horn);
    if (i % 2 == 0)
      y = meet(t, subst_ex(x, select(cee, ce, keep)), equality_predicate(e, c));
    bool el = leq(t, meet(t, subst_ex(x, select(cee, ce, keep)), equality_predicate(e, c)), y, 1,
                  kBudget)
                  .proved();
    bool er = leq(t, x, subst_ex(y, select(ce, cee, dup)), 1, kBudget).proved();
    if (el != er)
      o.fail("equality adjunction: " + to_string(sig, x) + " / " + to_string(sig, y));
    eq_proved += el;
  }
  double secs = seconds_since(start);
  if (adj_proved == 0 || eq_proved == 0)
    o.fail("no positive adjunction instance");
  if (secs >= 120)
    o.fail("runtime " + std::to_string(secs) + "s");
  o.detail = "200 instances each (adjunction proved in " + std::to_string(adj_proved) +
             ", equality adjunction in " + std::to_string(eq_proved) + "), " +
             std::to_string(secs).substr(0, 5) + "s";
  return o;
}

// ----------------------------------------------------------- criterion 4

Outcome unit_injectivity() {
  Outcome o;
  Rng rng(4004);
  auto theories = lattice_theories();
  Signature sig = lattice_signature();
  std::size_t equivalent = 0;
  for (int i = 0; i < 200; ++i) {
    const Theory& t = theories[i % theories.size()];
    bool horn = t.fragment == Fragment::Horn;
    Context c = random_context(rng, sig, 2, "x");
    Formula phi = random_formula(rng, sig, c, 3, 2, horn);
    Formula psi = random_formula(rng, sig, c, 3, 2, horn);
    switch (i % 4) {
    case 1:
      psi = normalize(Formula::conj(phi, phi));
      break;
    case 2:
      psi = horn ? Formula::conj(phi, Formula::truth(c))
                 : Formula::disj(phi, Formula::conj(phi, psi));
      break;
    default:
      break;
    }
    LeqResult lr = leq(t, unit(phi), unit(psi), 0, kBudget);
    LeqResult rl = leq(t, unit(psi), unit(phi), 0, kBudget);
    bool units = lr.proved() && rl.proved();
    bool seqs = entails(t, Sequent(c, phi, psi), kBudget).proved() &&
                entails(t, Sequent(c, psi, phi), kBudget).proved();
    if (units != seqs)
      o.fail(to_string(sig, phi) + " vs " + to_string(sig, psi));
    if (units && (!identity_arrows(lr, unit(phi)) || !identity_arrows(rl, unit(psi))))
      o.fail("non-identity arrow for " + to_string(sig, phi));
    equivalent += units;
  }
  if (equivalent == 0)
    o.fail("no equivalent pair generated");
  o.detail = "200 pairs, " + std::to_string(equivalent) + " equivalent, 0 discrepancies";
  if (!o.pass)
    o.detail = "200 pairs, " + std::to_string(o.failures.size()) + "+ discrepancies";
  return o;
}

// ----------------------------------------------------------- criterion 5

bool all_models_satisfy(const Theory& t, const Sequent& s, std::size_t max_size,
                        std::size_t& models) {
  auto sig = std::make_shared<const Signature>(t.signature);
  ModelStream stream(sig, max_size);
  while (stream.next()) {
    if (!satisfies(stream.current(), t))
      continue;
    ++models;
    if (!satisfies(stream.current(), s))
      return false;
  }
  return true;
}

std::size_t f_depth(const Term& t) {
  std::size_t inner = 0;
  if (!t.is_var())
    for (const Term& a : t.args())
      inner = std::max(inner, f_depth(a));
  return inner + (!t.is_var() && !t.args().empty() ? 1 : 0);
}

Outcome herbrand_corpus() {
  Outcome o;
  auto start = Clock::now();
  std::size_t files_with_cert = 0, certificates = 0, models = 0;
  bool saw_a = false, saw_b = false, saw_c = false, saw_unknown = false;
  for (const fs::path& p : corpus_files()) {
    cli::Workspace ws(cli::parse_theory(read(p)));
    const Theory& t = ws.theory();
    const Signature& sig = t.signature;
    bool any = false;
    for (const cli::GoalDecl& decl : ws.file().goals) {
      const ExistentialGoal& g = ws.goal(decl);
      auto cert = find_witnesses(t, g, HerbrandSchedule{4, 2, kBudget});
      std::string where = p.filename().string() + ":" + decl.name;
      if (!cert) {
        if (p.filename() == "unknown.th")
          saw_unknown = true;
        else
          o.fail(where + " gave no certificate");
        continue;
      }
      any = true;
      ++certificates;
      if (!verify(t, *cert))
        o.fail(where + " does not replay");
      try {
        if (!all_models_satisfy(t, cert->derived, 3, models))
          o.fail(where + " fails in a finite model");
      } catch (const RefusalError&) {
        o.fail(where + " model enumeration refused");
      }
      std::vector<std::string> ws_names;
      for (const TermTuple& w : cert->witnesses)
        ws_names.push_back(to_string(sig, w));

      if (p.filename() == "two_witnesses.th") {
        if (ws_names != std::vector<std::string>{"a", "f(a)"})
          o.fail(where + " witnesses differ from {a, f(a)}");
        // Each single witness fails in some 2-element model of the theory.
        for (const TermTuple& w : cert->witnesses) {
          Sequent single = derived_sequent(g, {w});
          bool countermodel = false;
          auto shared = std::make_shared<const Signature>(sig);
          ModelStream stream(shared, 2);
          while (stream.next())
            if (stream.current().carrier(0) == 2 && satisfies(stream.current(), t) &&
                !satisfies(stream.current(), single)) {
              countermodel = true;
              break;
            }
          if (!countermodel || entails(t, single, kBudget).proved())
            o.fail(where + " witness " + to_string(sig, w) + " suffices alone");
        }
        saw_a = true;
      }
      if (t.fragment == Fragment::Horn && is_horn(g.matrix)) {
        if (cert->witnesses.size() != 1)
          o.fail(where + " Horn goal with several witnesses");
        else if (f_depth(cert->witnesses[0][0]) >= 2)
          saw_b = true;
      }
      if (decl.kind == cli::GoalDecl::Kind::ForallForall) {
        Formula premise = ws.morleyisation().translate(decl.body);
        Formula conclusion = ws.morleyisation().translate(*decl.conclusion);
        Sequent conj = conjunctive_sequent(premise, conclusion, cert->witnesses);
        bool cp = entails(t, conj, cert->budget).proved();
        bool dp = entails(t, cert->derived, cert->budget).proved();
        if (cp != dp || !cp)
          o.fail(where + " conjunctive form not verified");
        else if (t.fragment == Fragment::ClassicalMorleyised)
          saw_c = true;
      }
      // Minimality: no single witness can be dropped.
      for (std::size_t k = 0; k < cert->witnesses.size(); ++k) {
        auto fewer = cert->witnesses;
        fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(k));
        if (entails(t, derived_sequent(g, fewer), cert->budget).proved())
          o.fail(where + " witness list not minimal");
      }
    }
    files_with_cert += any;
  }
  double secs = seconds_since(start);
  if (files_with_cert < 10)
    o.fail("only " + std::to_string(files_with_cert) + " files with certificates");
  if (!saw_a)
    o.fail("missing the two-witness example");
  if (!saw_b)
    o.fail("missing a Horn witness of f-depth >= 2");
  if (!saw_c)
    o.fail("missing the classical forall/forall reduction");
  if (!saw_unknown)
    o.fail("unknown goal was not reported as unknown");
  if (secs >= 60)
    o.fail("runtime " + std::to_string(secs) + "s");
  o.detail = std::to_string(files_with_cert) + " files, " + std::to_string(certificates) +
             " certificates, " + std::to_string(models) + " model checks, " +
             std::to_string(secs).substr(0, 5) + "s";
  return o;
}

// ----------------------------------------------------------- criterion 7

Outcome universal_property() {
  Outcome o;
  Rng rng(7007);
  auto sig = std::make_shared<const Signature>(lattice_signature());
  Theory t;
  t.signature = *sig;
  for (int i = 0; i < 200; ++i) {
    FiniteModel fm = random_structure(rng, sig, 2);
    TinyModel tm = tiny(fm);
    ModelInterpretation m(fm);
    Context c = random_context(rng, *sig, 2, "c");
    ExElement a = random_element(rng, *sig, c, 3, 1);
    ExElement b = random_element(rng, *sig, c, 3, 1);
    Subset ea = extend_morphism(m, a);
    Subset eb = extend_morphism(m, b);
    if (as_set(ea) != oracle_extend(tm, a))
      o.fail("extension differs from pointwise value");
    Subset u = ea;
    u |= eb;
    if (!(extend_morphism(m, join(t, a, b)) == u))
      o.fail("join");
    Subset n = ea;
    n &= eb;
    if (!(extend_morphism(m, meet(t, a, b)) == n))
      o.fail("meet");

    Context c2 = random_context(rng, *sig, 2, "k");
    auto f = random_tuple(rng, *sig, c2, c, 2);
    if (f && !(extend_morphism(m, subst_ex(a, *f)) ==
               preimage(ea, eval(fm, *f), dims_of(fm, c2))))
      o.fail("subst_ex");

    Context d = ctx(*sig, {{"d0", "S"}});
    Context dc = concat(d, c);
    ExElement ad = random_element(rng, *sig, dc, 3, 1);
    std::vector<std::size_t> proj = eval(fm, projection(dc, d.size(), c.size()));
    if (!(extend_morphism(m, exists_along(ad, d)) ==
          image(extend_morphism(m, ad), proj, dims_of(fm, c))))
      o.fail("exists_along");

    Formula phi = random_formula(rng, *sig, c, 3, 2);
    if (!(extend_morphism(m, unit(phi)) == eval(fm, phi)))
      o.fail("unit");
  }
  o.detail = "200 elements over random 2-element models, exact equality";
  return o;
}

// ----------------------------------------------------------- criterion 8

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe)
    return "<popen failed>";
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
    out.append(buf, n);
  int status = pclose(pipe);
  out += "\n<status " + std::to_string(status) + ">\n";
  return out;
}

std::vector<std::string> corpus_commands() {
  std::string cli = DOCTRINA_CLI_PATH;
  std::vector<std::string> cmds;
  for (const fs::path& p : corpus_files())
    cmds.push_back(cli + " herbrand --json '" + p.string() + "' 2>&1");
  for (const auto& e : fs::directory_iterator(kCorpus / "models")) {
    std::string stem = e.path().stem().string();
    for (const fs::path& p : corpus_files())
      if (stem.rfind(p.stem().string() + "_", 0) == 0)
        cmds.push_back(cli + " model --json '" + p.string() + "' '" + e.path().string() +
                       "' 2>&1");
  }
  cmds.push_back(cli + " entails --json '" + (kCorpus / "two_witnesses.th").string() +
                 "' --sequent 'true |- R(a) \\/ R(f(a))' 2>&1");
  cmds.push_back(cli + " leq --json '" + (kCorpus / "two_witnesses.th").string() +
                 "' '{ [] true }' '{ [y:S] R(y) }' 2>&1");
  cmds.push_back(cli + " laws --json --count 5 --seed 3 '" + (kCorpus / "branching.th").string() +
                 "' 2>&1");
  std::sort(cmds.begin(), cmds.end());
  return cmds;
}

Outcome determinism() {
  Outcome o;
  auto cmds = corpus_commands();
  std::string first, second;
  for (const std::string& c : cmds)
    first += capture(c);
  for (const std::string& c : cmds)
    second += capture(c);
  if (first != second)
    o.fail("outputs differ between runs");
  if (first.find("\"witnesses\"") == std::string::npos)
    o.fail("no certificate in the output");
  o.detail = std::to_string(cmds.size()) + " commands, " + std::to_string(first.size()) +
             " bytes, identical across two runs";
  return o;
}

// ----------------------------------------------------------- criterion 6

// Flat copy of a structure with a pointwise, short-circuiting evaluator;
// independent of ModelInterpretation.
struct Flat {
  std::vector<int> size;
  std::vector<std::vector<int>> fn;
  std::vector<std::vector<char>> rel;
};

std::size_t flat_index(const Flat& m, std::span<const SortId> sorts, std::span<const int> args) {
  std::size_t i = 0;
  for (std::size_t k = 0; k < sorts.size(); ++k)
    i = i * static_cast<std::size_t>(m.size[sorts[k]]) + static_cast<std::size_t>(args[k]);
  return i;
}

// Visits every argument vector over `sorts` in index order.
template <class F> void odometer(const std::vector<int>& size, std::span<const SortId> sorts, F f) {
  std::vector<int> v(sorts.size(), 0);
  for (SortId s : sorts)
    if (size[s] == 0)
      return;
  for (;;) {
    f(v);
    std::size_t i = v.size();
    for (;;) {
      if (i == 0)
        return;
      --i;
      if (++v[i] < size[sorts[i]])
        break;
      v[i] = 0;
    }
  }
}

Flat flatten(const FiniteModel& fm) {
  const Signature& sig = fm.signature();
  Flat m;
  for (std::size_t n : fm.carriers())
    m.size.push_back(static_cast<int>(n));
  for (SymbolId f = 0; f < sig.functions().size(); ++f) {
    std::vector<int> table;
    odometer(m.size, sig.function_symbol(f).args, [&](const std::vector<int>& v) {
      std::vector<Element> e(v.begin(), v.end());
      table.push_back(static_cast<int>(fm.apply(f, e)));
    });
    m.fn.push_back(std::move(table));
  }
  for (SymbolId r = 0; r < sig.relations().size(); ++r) {
    std::vector<char> table;
    odometer(m.size, sig.relation_symbol(r).args, [&](const std::vector<int>& v) {
      std::vector<Element> e(v.begin(), v.end());
      table.push_back(fm.holds(r, e) ? 1 : 0);
    });
    m.rel.push_back(std::move(table));
  }
  return m;
}

int flat_eval(const Signature& sig, const Flat& m, const Term& t, const std::vector<int>& env) {
  if (t.is_var())
    return env[t.var_index()];
  int args[8];
  std::size_t n = t.args().size();
  for (std::size_t i = 0; i < n; ++i)
    args[i] = flat_eval(sig, m, t.args()[i], env);
  return m.fn[t.symbol()][flat_index(m, sig.function_symbol(t.symbol()).args, {args, n})];
}

bool flat_holds(const Signature& sig, const Flat& m, const Formula& phi,
                const std::vector<int>& env) {
  switch (phi.kind()) {
  case FormulaKind::True:
    return true;
  case FormulaKind::False:
    return false;
  case FormulaKind::Eq:
    return flat_eval(sig, m, phi.terms()[0], env) == flat_eval(sig, m, phi.terms()[1], env);
  case FormulaKind::Rel: {
    int args[8];
    std::size_t n = phi.terms().size();
    for (std::size_t i = 0; i < n; ++i)
      args[i] = flat_eval(sig, m, phi.terms()[i], env);
    SymbolId r = phi.relation_symbol();
    return m.rel[r][flat_index(m, sig.relation_symbol(r).args, {args, n})] != 0;
  }
  case FormulaKind::And:
    for (std::size_t i = 0; i < phi.child_count(); ++i)
      if (!flat_holds(sig, m, phi.child(i), env))
        return false;
    return true;
  case FormulaKind::Or:
    for (std::size_t i = 0; i < phi.child_count(); ++i)
      if (flat_holds(sig, m, phi.child(i), env))
        return true;
    return false;
  }
  return false;
}

bool flat_satisfies(const Signature& sig, const Flat& m, const Sequent& s) {
  bool ok = true;
  odometer(m.size, s.context.sorts(), [&](const std::vector<int>& env) {
    if (ok && flat_holds(sig, m, s.lhs, env) && !flat_holds(sig, m, s.rhs, env))
      ok = false;
  });
  return ok;
}

// Table contents of the structure relabelled by `perm` (per sort), restricted
// to the symbols in `fns` and `rels`. Equal encodings mean equal structures.
std::vector<int> encode(const Signature& sig, const Flat& m,
                        const std::vector<std::vector<int>>& perm, const std::vector<bool>& fns,
                        const std::vector<bool>& rels) {
  // inverse[s][new] = old
  std::vector<std::vector<int>> inverse(perm.size());
  for (std::size_t s = 0; s < perm.size(); ++s) {
    inverse[s].resize(perm[s].size());
    for (std::size_t i = 0; i < perm[s].size(); ++i)
      inverse[s][static_cast<std::size_t>(perm[s][i])] = static_cast<int>(i);
  }
  std::vector<int> out(m.size.begin(), m.size.end());
  std::vector<int> old;
  for (SymbolId f = 0; f < sig.functions().size(); ++f) {
    if (!fns[f])
      continue;
    const auto& sorts = sig.function_symbol(f).args;
    SortId res = sig.function_symbol(f).result;
    odometer(m.size, sorts, [&](const std::vector<int>& v) {
      old.resize(v.size());
      for (std::size_t k = 0; k < v.size(); ++k)
        old[k] = inverse[sorts[k]][static_cast<std::size_t>(v[k])];
      out.push_back(perm[res][static_cast<std::size_t>(m.fn[f][flat_index(m, sorts, old)])]);
    });
  }
  for (SymbolId r = 0; r < sig.relations().size(); ++r) {
    if (!rels[r])
      continue;
    const auto& sorts = sig.relation_symbol(r).args;
    odometer(m.size, sorts, [&](const std::vector<int>& v) {
      old.resize(v.size());
      for (std::size_t k = 0; k < v.size(); ++k)
        old[k] = inverse[sorts[k]][static_cast<std::size_t>(v[k])];
      out.push_back(m.rel[r][flat_index(m, sorts, old)]);
    });
  }
  return out;
}

// All per-sort relabellings of the carriers.
std::vector<std::vector<std::vector<int>>> relabellings(const std::vector<int>& size) {
  std::vector<std::vector<std::vector<int>>> out{{}};
  for (int n : size) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<std::vector<int>>> next;
    do
      for (const auto& prefix : out) {
        next.push_back(prefix);
        next.back().push_back(p);
      }
    while (std::next_permutation(p.begin(), p.end()));
    out = std::move(next);
  }
  return out;
}

void mark_symbols(const Term& t, std::vector<bool>& fns) {
  if (t.is_var())
    return;
  fns[t.symbol()] = true;
  for (const Term& a : t.args())
    mark_symbols(a, fns);
}

void mark_symbols(const Formula& phi, std::vector<bool>& fns, std::vector<bool>& rels) {
  if (phi.kind() == FormulaKind::Rel)
    rels[phi.relation_symbol()] = true;
  if (phi.kind() == FormulaKind::Rel || phi.kind() == FormulaKind::Eq)
    for (const Term& t : phi.terms())
      mark_symbols(t, fns);
  if (phi.kind() == FormulaKind::And || phi.kind() == FormulaKind::Or)
    for (std::size_t i = 0; i < phi.child_count(); ++i)
      mark_symbols(phi.child(i), fns, rels);
}

// Every collected sequent is checked in every model of its theory with
// carriers of size <= 3. Satisfaction is invariant under isomorphism and only
// depends on the symbols a sequent mentions, so one structure per
// isomorphism class is kept and, per symbol set, one per distinct reduct.
Outcome soundness() {
  Outcome o;
  auto start = Clock::now();
  std::size_t sequents = 0, checks = 0, models_total = 0;
  for (auto& [key, col] : g_proofs) {
    sequents += col.sequents.size();
    const Signature& sig = col.theory.signature;
    auto shared = std::make_shared<const Signature>(sig);
    std::vector<bool> all_f(sig.functions().size(), true), all_r(sig.relations().size(), true);
    std::vector<Flat> models;
    try {
      ModelStream stream(shared, 3);
      std::vector<int> last_size;
      std::vector<std::vector<std::vector<int>>> perms;
      while (stream.next()) {
        Flat m = flatten(stream.current());
        bool model = true;
        for (const Axiom& ax : col.theory.axioms)
          if (!flat_satisfies(sig, m, ax.sequent)) {
            model = false;
            break;
          }
        if (!model)
          continue;
        if (m.size != last_size) {
          perms = relabellings(m.size);
          last_size = m.size;
        }
        std::vector<int> self = encode(sig, m, perms.front(), all_f, all_r);
        bool canonical = true;
        for (std::size_t k = 1; k < perms.size() && canonical; ++k)
          canonical = !(encode(sig, m, perms[k], all_f, all_r) < self);
        if (canonical)
          models.push_back(std::move(m));
      }
    } catch (const RefusalError& e) {
      o.fail(std::string("enumeration refused: ") + e.what());
      continue;
    }
    models_total += models.size();

    std::map<std::pair<std::vector<bool>, std::vector<bool>>, std::vector<const Sequent*>> groups;
    for (const Sequent& s : col.sequents) {
      std::vector<bool> fns(sig.functions().size()), rels(sig.relations().size());
      mark_symbols(s.lhs, fns, rels);
      mark_symbols(s.rhs, fns, rels);
      groups[{fns, rels}].push_back(&s);
    }
    for (const auto& [symbols, group] : groups) {
      std::set<std::vector<int>> seen;
      for (const Flat& m : models) {
        std::vector<std::vector<int>> id;
        for (int n : m.size) {
          id.emplace_back(static_cast<std::size_t>(n));
          std::iota(id.back().begin(), id.back().end(), 0);
        }
        if (!seen.insert(encode(sig, m, id, symbols.first, symbols.second)).second)
          continue;
        for (const Sequent* s : group) {
          ++checks;
          if (!flat_satisfies(sig, m, *s))
            o.fail("counterexample to " + to_string(sig, *s));
        }
      }
    }
  }
  if (g_verdicts == 0)
    o.fail("no Proved verdicts were collected");
  o.detail = std::to_string(g_verdicts) + " Proved verdicts (" + std::to_string(sequents) +
             " distinct, " + std::to_string(g_proofs.size()) + " theories), " +
             std::to_string(models_total) + " models up to isomorphism, " +
             std::to_string(checks) + " checks, " +
             std::to_string(seconds_since(start)).substr(0, 5) + "s";
  return o;
}

} // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i)
    only.insert(std::atoi(argv[i]));
  ScopedProofObserver observer(record_proof);
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // Soundness runs last so that it sees every verdict of the other criteria.
  std::vector<Criterion> criteria = {
      {1, "category and product laws", category_laws},
      {2, "distributive lattice laws", lattice_laws},
      {3, "adjunction, Frobenius, Beck-Chevalley", adjunction_suite},
      {4, "unit injectivity", unit_injectivity},
      {5, "Herbrand corpus", herbrand_corpus},
      {7, "extension to models", universal_property},
      {8, "determinism of CLI output", determinism},
      {6, "semantic soundness of Proved verdicts", soundness},
  };
  std::map<int, std::pair<std::string, Outcome>> results;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.count(c.id))
      continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    results[c.id] = {c.name, o};
  }
  bool all = true;
  for (const auto& [id, r] : results) {
    const auto& [name, o] = r;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << ". " << name << ": " << o.detail
              << "\n";
    for (const std::string& f : o.failures)
      std::cout << "         " << f << "\n";
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
