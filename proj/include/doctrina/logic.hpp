#ifndef DOCTRINA_LOGIC_HPP
#define DOCTRINA_LOGIC_HPP

// Quantifier-free coherent formulas in context, sequents and universal
// theories. Entailment lives in entailment.hpp.

#include "doctrina/terms.hpp"

#include <compare>
#include <memory>
#include <string>
#include <vector>

namespace doctrina {

enum class FormulaKind { True, False, Eq, Rel, And, Or };

/// A formula built from true, false, equations, relation atoms and finite
/// conjunctions/disjunctions, over a fixed context. Immutable, cheap to copy.
class Formula {
public:
  static Formula truth(Context ctx);
  static Formula falsity(Context ctx);
  static Formula equal(Context ctx, Term lhs, Term rhs);
  static Formula relation(const Signature& sig, Context ctx, SymbolId rel,
                          std::vector<Term> args);
  /// n-ary conjunction; empty is true, a singleton is its element.
  static Formula conj(Context ctx, std::vector<Formula> parts);
  static Formula disj(Context ctx, std::vector<Formula> parts);
  static Formula conj(const Formula& a, const Formula& b);
  static Formula disj(const Formula& a, const Formula& b);

  FormulaKind kind() const;
  const Context& context() const { return ctx_; }
  /// The two sides of an equation or the arguments of a relation atom.
  const std::vector<Term>& terms() const;
  SymbolId relation_symbol() const;
  std::size_t child_count() const;
  Formula child(std::size_t i) const;

  bool is_atom() const {
    return kind() == FormulaKind::Eq || kind() == FormulaKind::Rel;
  }

  /// Same formula tree over a context of the same shape (renaming only).
  Formula with_context(Context ctx) const;

  /// Structural comparison; context names are ignored, sorts are not.
  friend bool operator==(const Formula& a, const Formula& b);
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);

  struct Node;

private:
  Formula(Context ctx, std::shared_ptr<const Node> node)
      : ctx_(std::move(ctx)), node_(std::move(node)) {}
  friend struct FormulaAccess;

  Context ctx_;
  std::shared_ptr<const Node> node_;
};

/// Uses only true, equations, relation atoms and conjunction.
bool is_horn(const Formula& phi);

/// Checks every symbol, sort and variable against `sig` and the context.
bool well_formed(const Signature& sig, const Formula& phi);

/// `phi[f]`: phi must live over codomain(f); the result lives over domain(f).
Formula substitute(const Formula& phi, const TermTuple& f);

/// Disjunctive normal form: a list of clauses, each a sorted, duplicate-free
/// list of atoms. Trivial equations `t = t` are dropped, equations oriented,
/// false clauses removed. No clauses means false; an empty clause means true.
std::vector<std::vector<Formula>> dnf(const Formula& phi);

/// Flattened sorted DNF with unit laws, idempotence and commutativity
/// ordering applied. Logically equivalent to the input.
Formula normalize(const Formula& phi);

/// Top-level disjuncts: nested Or nodes flattened; false has none.
std::vector<Formula> disjuncts(const Formula& phi);

/// Largest term depth occurring in the formula.
std::size_t max_term_depth(const Formula& phi);

/// `\/` binds weaker than `/\`; terms print canonically.
std::string to_string(const Signature& sig, const Formula& phi);

struct Sequent {
  Context context;
  Formula lhs;
  Formula rhs;

  Sequent(Context ctx, Formula l, Formula r);

  friend bool operator==(const Sequent& a, const Sequent& b) {
    return a.context.same_shape(b.context) && a.lhs == b.lhs && a.rhs == b.rhs;
  }
};

/// Sequent substituted along f: domain(f) -> context.
Sequent substitute(const Sequent& s, const TermTuple& f);

/// `lhs |- rhs [ctx]`, the context omitted when empty.
std::string to_string(const Signature& sig, const Sequent& s);

enum class Fragment { Horn, Coherent, ClassicalMorleyised };

std::string to_string(Fragment f);

struct Axiom {
  std::string name;
  Sequent sequent;

  bool operator==(const Axiom&) const = default;
};

/// A universal theory: every axiom is a sequent between quantifier-free
/// formulas.
struct Theory {
  Signature signature;
  std::vector<Axiom> axioms;
  Fragment fragment = Fragment::Coherent;

  const Axiom* find_axiom(std::string_view name) const;
  /// Throws StructuralError/FragmentError if an axiom is ill-formed or falls
  /// outside the declared fragment.
  void validate() const;
};

} // namespace doctrina

#endif // DOCTRINA_LOGIC_HPP
