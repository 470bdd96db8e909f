#include "doctrina/logic.hpp"

#include "doctrina/error.hpp"

#include <algorithm>

namespace doctrina {

struct Formula::Node {
  FormulaKind kind;
  SymbolId rel = 0;
  std::vector<Term> terms;
  std::vector<std::shared_ptr<const Node>> children;
};

using NodePtr = std::shared_ptr<const Formula::Node>;

struct FormulaAccess {
  static const Formula::Node& node(const Formula& f) { return *f.node_; }
  static const NodePtr& ptr(const Formula& f) { return f.node_; }
  static Formula wrap(Context ctx, NodePtr n) {
    return Formula(std::move(ctx), std::move(n));
  }
};

namespace {

NodePtr make_node(FormulaKind kind, SymbolId rel = 0,
                  std::vector<Term> terms = {},
                  std::vector<NodePtr> children = {}) {
  return std::make_shared<const Formula::Node>(
      Formula::Node{kind, rel, std::move(terms), std::move(children)});
}

const NodePtr& true_node() {
  static const NodePtr n = make_node(FormulaKind::True);
  return n;
}

const NodePtr& false_node() {
  static const NodePtr n = make_node(FormulaKind::False);
  return n;
}

void check_term(const Context& ctx, const Term& t) {
  if (t.var_bound() > ctx.size())
    throw StructuralError("term uses a variable outside its context");
}

std::strong_ordering compare_nodes(const Formula::Node& a,
                                   const Formula::Node& b) {
  if (&a == &b)
    return std::strong_ordering::equal;
  if (auto c = a.kind <=> b.kind; c != 0)
    return c;
  if (auto c = a.rel <=> b.rel; c != 0)
    return c;
  if (auto c = a.terms.size() <=> b.terms.size(); c != 0)
    return c;
  for (std::size_t i = 0; i < a.terms.size(); ++i)
    if (auto c = a.terms[i] <=> b.terms[i]; c != 0)
      return c;
  if (auto c = a.children.size() <=> b.children.size(); c != 0)
    return c;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (auto c = compare_nodes(*a.children[i], *b.children[i]); c != 0)
      return c;
  return std::strong_ordering::equal;
}

Formula nary(FormulaKind kind, const Context& ctx, std::vector<Formula> parts) {
  for (const Formula& p : parts)
    if (!p.context().same_shape(ctx))
      throw StructuralError(
          "connective applied to formulas over different contexts");
  if (parts.size() == 1)
    return parts.front().with_context(ctx);
  if (parts.empty())
    return kind == FormulaKind::And ? Formula::truth(ctx) : Formula::falsity(ctx);
  std::vector<NodePtr> children;
  children.reserve(parts.size());
  for (const Formula& p : parts)
    children.push_back(FormulaAccess::ptr(p));
  return FormulaAccess::wrap(ctx, make_node(kind, 0, {}, std::move(children)));
}

} // namespace

// ------------------------------------------------------------ construction

Formula Formula::truth(Context ctx) { return Formula(std::move(ctx), true_node()); }

Formula Formula::falsity(Context ctx) {
  return Formula(std::move(ctx), false_node());
}

Formula Formula::equal(Context ctx, Term lhs, Term rhs) {
  if (lhs.sort() != rhs.sort())
    throw StructuralError("equation between terms of different sorts");
  check_term(ctx, lhs);
  check_term(ctx, rhs);
  return Formula(std::move(ctx),
                 make_node(FormulaKind::Eq, 0, {std::move(lhs), std::move(rhs)}));
}

Formula Formula::relation(const Signature& sig, Context ctx, SymbolId rel,
                          std::vector<Term> args) {
  const RelationSymbol& sym = sig.relation_symbol(rel);
  if (sym.args.size() != args.size())
    throw StructuralError("relation '" + sym.name + "' expects " +
                          std::to_string(sym.args.size()) + " arguments, got " +
                          std::to_string(args.size()));
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i].sort() != sym.args[i])
      throw StructuralError("argument " + std::to_string(i + 1) + " of '" +
                            sym.name + "' has the wrong sort");
    check_term(ctx, args[i]);
  }
  return Formula(std::move(ctx),
                 make_node(FormulaKind::Rel, rel, std::move(args)));
}

Formula Formula::conj(Context ctx, std::vector<Formula> parts) {
  return nary(FormulaKind::And, ctx, std::move(parts));
}

Formula Formula::disj(Context ctx, std::vector<Formula> parts) {
  return nary(FormulaKind::Or, ctx, std::move(parts));
}

Formula Formula::conj(const Formula& a, const Formula& b) {
  return nary(FormulaKind::And, a.context(), {a, b});
}

Formula Formula::disj(const Formula& a, const Formula& b) {
  return nary(FormulaKind::Or, a.context(), {a, b});
}

FormulaKind Formula::kind() const { return node_->kind; }

const std::vector<Term>& Formula::terms() const { return node_->terms; }

SymbolId Formula::relation_symbol() const {
  if (node_->kind != FormulaKind::Rel)
    throw StructuralError("formula is not a relation atom");
  return node_->rel;
}

std::size_t Formula::child_count() const { return node_->children.size(); }

Formula Formula::child(std::size_t i) const {
  if (i >= node_->children.size())
    throw StructuralError("formula child index out of range");
  return Formula(ctx_, node_->children[i]);
}

Formula Formula::with_context(Context ctx) const {
  if (!ctx.same_shape(ctx_))
    throw StructuralError("with_context: context shape differs");
  return Formula(std::move(ctx), node_);
}

bool operator==(const Formula& a, const Formula& b) {
  if (!a.ctx_.same_shape(b.ctx_))
    return false;
  return compare_nodes(*a.node_, *b.node_) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (!a.ctx_.same_shape(b.ctx_)) {
    auto sa = a.ctx_.sorts();
    auto sb = b.ctx_.sorts();
    return std::lexicographical_compare_three_way(sa.begin(), sa.end(),
                                                  sb.begin(), sb.end());
  }
  return compare_nodes(*a.node_, *b.node_);
}

// ---------------------------------------------------------------- queries

namespace {

bool horn_node(const Formula::Node& n) {
  switch (n.kind) {
  case FormulaKind::True:
  case FormulaKind::Eq:
  case FormulaKind::Rel:
    return true;
  case FormulaKind::False:
  case FormulaKind::Or:
    return false;
  case FormulaKind::And:
    return std::all_of(n.children.begin(), n.children.end(),
                       [](const NodePtr& c) { return horn_node(*c); });
  }
  return false;
}

bool well_formed_node(const Signature& sig, const Context& ctx,
                      const Formula::Node& n) {
  switch (n.kind) {
  case FormulaKind::True:
  case FormulaKind::False:
    return true;
  case FormulaKind::Eq:
    return n.terms.size() == 2 && n.terms[0].sort() == n.terms[1].sort() &&
           well_formed(sig, ctx, n.terms[0]) && well_formed(sig, ctx, n.terms[1]);
  case FormulaKind::Rel: {
    if (n.rel >= sig.relations().size())
      return false;
    const RelationSymbol& r = sig.relations()[n.rel];
    if (r.args.size() != n.terms.size())
      return false;
    for (std::size_t i = 0; i < n.terms.size(); ++i)
      if (n.terms[i].sort() != r.args[i] || !well_formed(sig, ctx, n.terms[i]))
        return false;
    return true;
  }
  case FormulaKind::And:
  case FormulaKind::Or:
    return std::all_of(n.children.begin(), n.children.end(),
                       [&](const NodePtr& c) {
                         return well_formed_node(sig, ctx, *c);
                       });
  }
  return false;
}

std::size_t depth_node(const Formula::Node& n) {
  std::size_t d = 0;
  for (const Term& t : n.terms)
    d = std::max(d, t.depth());
  for (const NodePtr& c : n.children)
    d = std::max(d, depth_node(*c));
  return d;
}

NodePtr substitute_node(const NodePtr& n, std::span<const Term> repl) {
  switch (n->kind) {
  case FormulaKind::True:
  case FormulaKind::False:
    return n;
  case FormulaKind::Eq:
  case FormulaKind::Rel: {
    std::vector<Term> terms;
    terms.reserve(n->terms.size());
    for (const Term& t : n->terms)
      terms.push_back(substitute(t, repl));
    return make_node(n->kind, n->rel, std::move(terms));
  }
  case FormulaKind::And:
  case FormulaKind::Or: {
    std::vector<NodePtr> children;
    children.reserve(n->children.size());
    for (const NodePtr& c : n->children)
      children.push_back(substitute_node(c, repl));
    return make_node(n->kind, 0, {}, std::move(children));
  }
  }
  return n;
}

} // namespace

bool is_horn(const Formula& phi) {
  return horn_node(FormulaAccess::node(phi));
}

bool well_formed(const Signature& sig, const Formula& phi) {
  for (const Binding& b : phi.context().bindings())
    if (b.sort >= sig.sorts().size())
      return false;
  return well_formed_node(sig, phi.context(), FormulaAccess::node(phi));
}

std::size_t max_term_depth(const Formula& phi) {
  return depth_node(FormulaAccess::node(phi));
}

Formula substitute(const Formula& phi, const TermTuple& f) {
  if (!phi.context().same_shape(f.codomain()))
    throw StructuralError(
        "substitute: formula context does not match the tuple codomain");
  return FormulaAccess::wrap(
      f.domain(), substitute_node(FormulaAccess::ptr(phi), f.components()));
}

// -------------------------------------------------------------- normal form

namespace {

using Clause = std::vector<Formula>;

void sort_unique(Clause& c) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
}

std::vector<Clause> dnf_rec(const Formula& phi) {
  switch (phi.kind()) {
  case FormulaKind::True:
    return {Clause{}};
  case FormulaKind::False:
    return {};
  case FormulaKind::Eq: {
    const Term& l = phi.terms()[0];
    const Term& r = phi.terms()[1];
    if (l == r)
      return {Clause{}};
    if (r < l)
      return {Clause{Formula::equal(phi.context(), r, l)}};
    return {Clause{phi}};
  }
  case FormulaKind::Rel:
    return {Clause{phi}};
  case FormulaKind::And: {
    std::vector<Clause> acc{Clause{}};
    for (std::size_t i = 0; i < phi.child_count(); ++i) {
      std::vector<Clause> part = dnf_rec(phi.child(i));
      std::vector<Clause> next;
      next.reserve(acc.size() * part.size());
      for (const Clause& a : acc)
        for (const Clause& b : part) {
          Clause c = a;
          c.insert(c.end(), b.begin(), b.end());
          sort_unique(c);
          next.push_back(std::move(c));
        }
      acc = std::move(next);
      if (acc.empty())
        break;
    }
    return acc;
  }
  case FormulaKind::Or: {
    std::vector<Clause> acc;
    for (std::size_t i = 0; i < phi.child_count(); ++i) {
      std::vector<Clause> part = dnf_rec(phi.child(i));
      acc.insert(acc.end(), part.begin(), part.end());
    }
    return acc;
  }
  }
  return {};
}

bool subset_of(const Clause& small, const Clause& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

} // namespace

std::vector<std::vector<Formula>> dnf(const Formula& phi) {
  std::vector<Clause> clauses = dnf_rec(phi);
  for (Clause& c : clauses)
    sort_unique(c);
  std::sort(clauses.begin(), clauses.end(),
            [](const Clause& a, const Clause& b) {
              if (a.size() != b.size())
                return a.size() < b.size();
              return a < b;
            });
  clauses.erase(std::unique(clauses.begin(), clauses.end()), clauses.end());
  // Absorption: drop clauses implied by a smaller one.
  std::vector<Clause> kept;
  for (Clause& c : clauses) {
    bool absorbed = std::any_of(kept.begin(), kept.end(), [&](const Clause& k) {
      return subset_of(k, c);
    });
    if (!absorbed)
      kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

Formula normalize(const Formula& phi) {
  const Context& ctx = phi.context();
  std::vector<Clause> clauses = dnf(phi);
  std::vector<Formula> parts;
  parts.reserve(clauses.size());
  for (Clause& c : clauses)
    parts.push_back(Formula::conj(ctx, std::move(c)));
  return Formula::disj(ctx, std::move(parts));
}

std::vector<Formula> disjuncts(const Formula& phi) {
  if (phi.kind() == FormulaKind::False)
    return {};
  if (phi.kind() != FormulaKind::Or)
    return {phi};
  std::vector<Formula> out;
  for (std::size_t i = 0; i < phi.child_count(); ++i) {
    auto part = disjuncts(phi.child(i));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// ----------------------------------------------------------------- printing

namespace {

void print(const Signature& sig, const Context& ctx, const Formula::Node& n,
           bool inside_and, std::string& out) {
  switch (n.kind) {
  case FormulaKind::True:
    out += "true";
    return;
  case FormulaKind::False:
    out += "false";
    return;
  case FormulaKind::Eq:
    out += to_string(sig, ctx, n.terms[0]) + " = " + to_string(sig, ctx, n.terms[1]);
    return;
  case FormulaKind::Rel: {
    out += sig.relation_symbol(n.rel).name;
    if (n.terms.empty())
      return;
    out += '(';
    for (std::size_t i = 0; i < n.terms.size(); ++i) {
      if (i > 0)
        out += ", ";
      out += to_string(sig, ctx, n.terms[i]);
    }
    out += ')';
    return;
  }
  case FormulaKind::And:
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i > 0)
        out += " /\\ ";
      print(sig, ctx, *n.children[i], true, out);
    }
    return;
  case FormulaKind::Or:
    if (inside_and)
      out += '(';
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i > 0)
        out += " \\/ ";
      print(sig, ctx, *n.children[i], false, out);
    }
    if (inside_and)
      out += ')';
    return;
  }
}

} // namespace

std::string to_string(const Signature& sig, const Formula& phi) {
  std::string out;
  print(sig, phi.context(), FormulaAccess::node(phi), false, out);
  return out;
}

// ------------------------------------------------------- sequents, theories

Sequent::Sequent(Context ctx, Formula l, Formula r)
    : context(std::move(ctx)), lhs(l.with_context(context)),
      rhs(r.with_context(context)) {}

Sequent substitute(const Sequent& s, const TermTuple& f) {
  return Sequent(f.domain(), substitute(s.lhs, f), substitute(s.rhs, f));
}

std::string to_string(const Signature& sig, const Sequent& s) {
  std::string out = to_string(sig, s.lhs) + " |- " + to_string(sig, s.rhs);
  if (!s.context.empty())
    out += " " + to_string(sig, s.context);
  return out;
}

std::string to_string(Fragment f) {
  switch (f) {
  case Fragment::Horn:
    return "horn";
  case Fragment::Coherent:
    return "coherent";
  case Fragment::ClassicalMorleyised:
    return "classical";
  }
  return "coherent";
}

const Axiom* Theory::find_axiom(std::string_view name) const {
  for (const Axiom& a : axioms)
    if (a.name == name)
      return &a;
  return nullptr;
}

void Theory::validate() const {
  for (std::size_t i = 0; i < axioms.size(); ++i) {
    const Axiom& a = axioms[i];
    for (std::size_t j = 0; j < i; ++j)
      if (axioms[j].name == a.name)
        throw StructuralError("duplicate axiom name '" + a.name + "'");
    if (!well_formed(signature, a.sequent.lhs) ||
        !well_formed(signature, a.sequent.rhs))
      throw StructuralError("axiom '" + a.name +
                            "' is not well-formed over the signature");
    if (fragment == Fragment::Horn &&
        !(is_horn(a.sequent.lhs) && is_horn(a.sequent.rhs)))
      throw FragmentError("axiom '" + a.name + "' is not Horn");
  }
}

} // namespace doctrina
