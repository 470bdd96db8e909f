#include "doctrina/herbrand.hpp"

#include "doctrina/error.hpp"

#include <algorithm>

namespace doctrina {

ClassicalFormula ClassicalFormula::leaf(Formula phi) {
  ClassicalFormula out(Kind::Leaf, phi.context());
  out.leaf_ = std::move(phi);
  return out;
}

ClassicalFormula ClassicalFormula::negation(ClassicalFormula phi) {
  ClassicalFormula out(Kind::Not, phi.context());
  out.children_.push_back(std::move(phi));
  return out;
}

namespace {

ClassicalFormula nary(ClassicalFormula::Kind kind, Context ctx,
                      std::vector<ClassicalFormula> parts,
                      ClassicalFormula (*make)(Context, std::vector<ClassicalFormula>)) {
  for (const ClassicalFormula& p : parts)
    if (!p.context().same_shape(ctx))
      throw StructuralError("classical formula: parts over different contexts");
  bool leaves = std::all_of(parts.begin(), parts.end(), [](const ClassicalFormula& p) {
    return p.kind() == ClassicalFormula::Kind::Leaf;
  });
  if (leaves) {
    std::vector<Formula> fs;
    for (const ClassicalFormula& p : parts)
      fs.push_back(p.formula());
    return ClassicalFormula::leaf(kind == ClassicalFormula::Kind::And
                                      ? Formula::conj(ctx, std::move(fs))
                                      : Formula::disj(ctx, std::move(fs)));
  }
  if (parts.size() == 1)
    return std::move(parts[0]);
  return make(std::move(ctx), std::move(parts));
}

} // namespace

ClassicalFormula ClassicalFormula::conj(Context ctx, std::vector<ClassicalFormula> parts) {
  return nary(Kind::And, std::move(ctx), std::move(parts), [](Context c, std::vector<ClassicalFormula> ps) {
    ClassicalFormula out(Kind::And, std::move(c));
    out.children_ = std::move(ps);
    return out;
  });
}

ClassicalFormula ClassicalFormula::disj(Context ctx, std::vector<ClassicalFormula> parts) {
  return nary(Kind::Or, std::move(ctx), std::move(parts), [](Context c, std::vector<ClassicalFormula> ps) {
    ClassicalFormula out(Kind::Or, std::move(c));
    out.children_ = std::move(ps);
    return out;
  });
}

bool ClassicalFormula::has_negation() const {
  if (kind_ == Kind::Not)
    return true;
  return std::any_of(children_.begin(), children_.end(),
                     [](const ClassicalFormula& c) { return c.has_negation(); });
}

bool operator==(const ClassicalFormula& a, const ClassicalFormula& b) {
  if (a.kind_ != b.kind_ || !a.context_.same_shape(b.context_))
    return false;
  if (a.kind_ == ClassicalFormula::Kind::Leaf)
    return *a.leaf_ == *b.leaf_;
  return a.children_ == b.children_;
}

std::string to_string(const Signature& sig, const ClassicalFormula& phi) {
  using Kind = ClassicalFormula::Kind;
  switch (phi.kind()) {
  case Kind::Leaf: {
    const Formula& f = phi.formula();
    std::string s = to_string(sig, f);
    return f.child_count() > 1 || f.kind() == FormulaKind::Eq ? "(" + s + ")" : s;
  }
  case Kind::Not:
    return "~" + to_string(sig, phi.children()[0]);
  case Kind::And:
  case Kind::Or: {
    std::string out = "(";
    for (std::size_t i = 0; i < phi.children().size(); ++i) {
      if (i)
        out += phi.kind() == Kind::And ? " /\\ " : " \\/ ";
      out += to_string(sig, phi.children()[i]);
    }
    return out + ")";
  }
  }
  return {};
}

namespace {

void collect_vars(const Term& t, std::vector<bool>& used) {
  if (t.is_var()) {
    used[t.var_index()] = true;
    return;
  }
  for (const Term& a : t.args())
    collect_vars(a, used);
}

void collect_vars(const Formula& phi, std::vector<bool>& used) {
  if (phi.is_atom()) {
    for (const Term& t : phi.terms())
      collect_vars(t, used);
    return;
  }
  for (std::size_t i = 0; i < phi.child_count(); ++i)
    collect_vars(phi.child(i), used);
}

// Rebuilds phi over `ctx`, variable i replaced by repl[i].
Formula rename(const Signature& sig, const Formula& phi, const Context& ctx,
               const std::vector<Term>& repl) {
  auto move = [&](const Term& t) { return substitute(t, repl); };
  switch (phi.kind()) {
  case FormulaKind::True:
    return Formula::truth(ctx);
  case FormulaKind::False:
    return Formula::falsity(ctx);
  case FormulaKind::Eq:
    return Formula::equal(ctx, move(phi.terms()[0]), move(phi.terms()[1]));
  case FormulaKind::Rel: {
    std::vector<Term> args;
    for (const Term& t : phi.terms())
      args.push_back(move(t));
    return Formula::relation(sig, ctx, phi.relation_symbol(), std::move(args));
  }
  case FormulaKind::And:
  case FormulaKind::Or: {
    std::vector<Formula> parts;
    for (std::size_t i = 0; i < phi.child_count(); ++i)
      parts.push_back(rename(sig, phi.child(i), ctx, repl));
    return phi.kind() == FormulaKind::And ? Formula::conj(ctx, std::move(parts))
                                          : Formula::disj(ctx, std::move(parts));
  }
  }
  return phi;
}

Context canonical_context(const std::vector<SortId>& sorts) {
  std::vector<Binding> bs;
  for (std::size_t i = 0; i < sorts.size(); ++i)
    bs.push_back({"x" + std::to_string(i), sorts[i]});
  return Context(std::move(bs));
}

std::vector<Term> variables(const Context& c) {
  std::vector<Term> out;
  for (std::size_t i = 0; i < c.size(); ++i)
    out.push_back(Term::var(i, c[i].sort));
  return out;
}

} // namespace

Morleyisation::Morleyisation(Theory base) : theory_(std::move(base)) {}

SymbolId Morleyisation::define(const std::string& name, Formula phi) {
  Signature& sig = theory_.signature;
  std::string fresh = name;
  while (sig.find_relation(fresh))
    fresh += "_";
  const Context& ctx = phi.context();
  SymbolId n = sig.add_relation(fresh, ctx.sorts());
  Formula atom = Formula::relation(sig, ctx, n, variables(ctx));
  theory_.axioms.push_back({fresh + "_exclusive",
                            Sequent(ctx, Formula::conj(phi, atom), Formula::falsity(ctx))});
  theory_.axioms.push_back({fresh + "_exhaustive",
                            Sequent(ctx, Formula::truth(ctx), Formula::disj(phi, atom))});
  theory_.fragment = Fragment::ClassicalMorleyised;
  definitions_.push_back({n, std::move(phi)});
  return n;
}

Formula Morleyisation::negate(const Formula& phi) {
  const Signature& sig = theory_.signature;
  const Context& ctx = phi.context();
  switch (phi.kind()) {
  case FormulaKind::True:
    return Formula::falsity(ctx);
  case FormulaKind::False:
    return Formula::truth(ctx);
  case FormulaKind::Rel: {
    SymbolId r = phi.relation_symbol();
    std::string key = "R" + std::to_string(r);
    auto it = atoms_.find(key);
    if (it == atoms_.end()) {
      Context args = canonical_context(sig.relation_symbol(r).args);
      Formula def = Formula::relation(sig, args, r, variables(args));
      it = atoms_.emplace(key, define("N" + sig.relation_symbol(r).name, def)).first;
    }
    return Formula::relation(theory_.signature, ctx, it->second, phi.terms());
  }
  case FormulaKind::Eq: {
    SortId s = phi.terms()[0].sort();
    std::string key = "E" + std::to_string(s);
    auto it = atoms_.find(key);
    if (it == atoms_.end()) {
      Context args = canonical_context({s, s});
      Formula def = Formula::equal(args, Term::var(0, s), Term::var(1, s));
      it = atoms_.emplace(key, define("NEq_" + sig.sort_name(s), def)).first;
    }
    return Formula::relation(theory_.signature, ctx, it->second, phi.terms());
  }
  case FormulaKind::And:
  case FormulaKind::Or:
    break;
  }
  std::vector<bool> used(ctx.size(), false);
  collect_vars(phi, used);
  std::vector<SortId> sorts;
  std::vector<Term> repl, args;
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (used[i]) {
      repl.push_back(Term::var(sorts.size(), ctx[i].sort));
      args.push_back(Term::var(i, ctx[i].sort));
      sorts.push_back(ctx[i].sort);
    } else {
      repl.push_back(Term::var(0, ctx[i].sort)); // never referenced
    }
  }
  Formula def = rename(sig, phi, canonical_context(sorts), repl);
  auto it = compounds_.find(def);
  if (it == compounds_.end())
    it = compounds_.emplace(def, define("Nphi" + std::to_string(compound_++), def)).first;
  return Formula::relation(theory_.signature, ctx, it->second, std::move(args));
}

Formula Morleyisation::translate(const ClassicalFormula& phi) {
  using Kind = ClassicalFormula::Kind;
  switch (phi.kind()) {
  case Kind::Leaf:
    return phi.formula();
  case Kind::Not:
    return negate(translate(phi.children()[0]));
  case Kind::And:
  case Kind::Or: {
    std::vector<Formula> parts;
    for (const ClassicalFormula& c : phi.children())
      parts.push_back(translate(c));
    return phi.kind() == Kind::And ? Formula::conj(phi.context(), std::move(parts))
                                   : Formula::disj(phi.context(), std::move(parts));
  }
  }
  return Formula::truth(phi.context());
}

void Morleyisation::add_axiom(std::string name, const ClassicalFormula& lhs,
                              const ClassicalFormula& rhs) {
  Formula l = translate(lhs);
  Formula r = translate(rhs);
  theory_.axioms.push_back({std::move(name), Sequent(lhs.context(), l, r)});
}

Theory morleyise(const Signature& sig, const std::vector<ClassicalAxiom>& axioms) {
  Theory base;
  base.signature = sig;
  Morleyisation m(std::move(base));
  for (const ClassicalAxiom& a : axioms)
    m.add_axiom(a.name, a.lhs, a.rhs);
  Theory out = m.theory();
  out.validate();
  return out;
}

FiniteModel expand_model(const Morleyisation& m, const FiniteModel& model) {
  auto sig = std::make_shared<const Signature>(m.theory().signature);
  const Signature& base = model.signature();
  FiniteModel out(sig, model.carriers());
  for (SymbolId f = 0; f < base.functions().size(); ++f) {
    std::size_t n = model.table_size(base.function_symbol(f).args);
    for (std::size_t i = 0; i < n; ++i)
      out.set_function_entry(f, i, model.function_entry(f, i));
  }
  for (SymbolId r = 0; r < base.relations().size(); ++r) {
    std::size_t n = model.table_size(base.relation_symbol(r).args);
    for (std::size_t i = 0; i < n; ++i)
      out.set_relation_entry(r, i, model.relation_entry(r, i));
  }
  for (const auto& d : m.definitions()) {
    Subset s = eval(out, d.negated);
    for (std::size_t i = 0; i < s.universe(); ++i)
      out.set_relation_entry(d.symbol, i, !s.contains(i));
  }
  return out;
}

ExistentialGoal::ExistentialGoal(Context o, Context b, Formula m)
    : outer(std::move(o)), bound(std::move(b)), matrix(std::move(m)) {
  if (!matrix.context().same_shape(concat(bound, outer)))
    throw StructuralError("existential goal: matrix is not over bound ++ outer");
}

std::string to_string(const Signature& sig, const ExistentialGoal& g) {
  std::string out = "true |- exists ";
  for (std::size_t i = 0; i < g.bound.size(); ++i) {
    if (i)
      out += ", ";
    out += g.bound[i].name + ":" + sig.sort_name(g.bound[i].sort);
  }
  out += ". " + to_string(sig, g.matrix);
  if (!g.outer.empty())
    out += " " + to_string(sig, g.outer);
  return out;
}

std::vector<HerbrandSchedule::Stage> HerbrandSchedule::stages() const {
  auto scaled = [&](std::size_t j) {
    SaturationBudget b = budget;
    b.rounds <<= j;
    b.split_depth <<= j;
    b.fresh_terms <<= j;
    return b;
  };
  std::vector<Stage> out;
  std::size_t levels = std::max(max_depth, max_doublings);
  for (std::size_t n = 0; n <= levels; ++n) {
    if (n <= max_depth)
      for (std::size_t j = 0; j <= std::min(n, max_doublings); ++j)
        out.push_back({n, scaled(j)});
    if (n <= max_doublings)
      for (std::size_t k = 0; k < std::min(n, max_depth + 1); ++k)
        out.push_back({k, scaled(n)});
  }
  return out;
}

Sequent derived_sequent(const ExistentialGoal& g, const std::vector<TermTuple>& witnesses) {
  std::vector<Formula> parts;
  for (const TermTuple& t : witnesses)
    parts.push_back(substitute(g.matrix, pairing(t, identity(g.outer))));
  return Sequent(g.outer, Formula::truth(g.outer), Formula::disj(g.outer, std::move(parts)));
}

std::optional<HerbrandCertificate> find_witnesses(const Theory& t, const ExistentialGoal& g,
                                                  const HerbrandSchedule& schedule) {
  t.validate();
  if (!well_formed(t.signature, g.matrix))
    throw StructuralError("existential goal is not well-formed over the signature");
  if (t.fragment == Fragment::Horn && !is_horn(g.matrix))
    throw FragmentError("goal matrix is not Horn but the theory is");
  ExElement left = top(g.outer);
  ExElement right = exists_along(unit(g.matrix), g.bound);
  for (const HerbrandSchedule::Stage& stage : schedule.stages()) {
    LeqResult r = leq(t, left, right, stage.depth, stage.budget);
    if (!r.proved())
      continue;
    std::vector<TermTuple> witnesses;
    for (const LeqArrow& a : r.pairs[0].arrows) {
      std::vector<Term> comps(a.arrow.components().begin(),
                              a.arrow.components().begin() + g.bound.size());
      witnesses.emplace_back(g.outer, g.bound, std::move(comps));
    }
    EntailmentVerdict v = entails(t, derived_sequent(g, witnesses), stage.budget);
    if (!v.proved())
      continue;
    for (std::size_t i = 0; i < witnesses.size();) {
      std::vector<TermTuple> fewer = witnesses;
      fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(i));
      EntailmentVerdict w = entails(t, derived_sequent(g, fewer), stage.budget);
      if (w.proved()) {
        witnesses = std::move(fewer);
        v = std::move(w);
      } else {
        ++i;
      }
    }
    Sequent derived = derived_sequent(g, witnesses);
    HerbrandCertificate cert{g, std::move(witnesses), std::move(derived),
                             std::move(v.trace), stage.depth, stage.budget};
    if (!verify(t, cert))
      throw Error("internal error: witness certificate failed verification");
    return cert;
  }
  return std::nullopt;
}

bool verify(const Theory& t, const HerbrandCertificate& c) {
  if (!(derived_sequent(c.goal, c.witnesses) == c.derived))
    return false;
  if (!entails(t, c.derived, c.budget).proved())
    return false;
  return replay(t, c.derived, c.trace);
}

ExistentialGoal reduce_forall_forall(Morleyisation& m, const Formula& phi, const Formula& psi) {
  const Context& d = phi.context();
  const Context& e = psi.context();
  Formula nphi = m.negate(phi);
  Context all = concat(d, e);
  Formula matrix = Formula::disj(substitute(nphi, projection(all, 0, d.size())),
                                 substitute(psi, projection(all, d.size(), e.size())));
  return ExistentialGoal(e, d, matrix);
}

Sequent conjunctive_sequent(const Formula& phi, const Formula& psi,
                            const std::vector<TermTuple>& witnesses) {
  const Context& e = psi.context();
  std::vector<Formula> parts;
  for (const TermTuple& t : witnesses)
    parts.push_back(substitute(phi, t));
  return Sequent(e, Formula::conj(e, std::move(parts)), psi);
}

} // namespace doctrina
