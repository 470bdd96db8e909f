#ifndef DOCTRINA_HERBRAND_HPP
#define DOCTRINA_HERBRAND_HPP

// Witness extraction for existential goals over universal theories, and the
// classical front end: negation is eliminated by Morleyisation, and a
// sequent between universal statements reduces to an existential goal.

#include "doctrina/completion.hpp"
#include "doctrina/semantics.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace doctrina {

/// A quantifier-free formula with negation. Leaves are negation-free
/// formulas; every node carries the leaf formulas' context.
class ClassicalFormula {
public:
  enum class Kind { Leaf, Not, And, Or };

  static ClassicalFormula leaf(Formula phi);
  static ClassicalFormula negation(ClassicalFormula phi);
  static ClassicalFormula conj(Context ctx, std::vector<ClassicalFormula> parts);
  static ClassicalFormula disj(Context ctx, std::vector<ClassicalFormula> parts);

  Kind kind() const { return kind_; }
  const Context& context() const { return context_; }
  /// Leaf only.
  const Formula& formula() const { return *leaf_; }
  const std::vector<ClassicalFormula>& children() const { return children_; }
  bool has_negation() const;

  friend bool operator==(const ClassicalFormula& a, const ClassicalFormula& b);

private:
  ClassicalFormula(Kind kind, Context ctx) : kind_(kind), context_(std::move(ctx)) {}

  Kind kind_;
  Context context_;
  std::optional<Formula> leaf_;
  std::vector<ClassicalFormula> children_;
};

/// `~` binds tightest; leaves print as formulas.
std::string to_string(const Signature& sig, const ClassicalFormula& phi);

/// Incremental Morleyisation of a theory. Each negated subformula gets a
/// relation symbol N with a defining pair of axioms phi /\ N |- false and
/// true |- phi \/ N:
///  - ~R(ts) becomes NR(ts), NR over R's argument sorts;
///  - ~(s = t) at sort S becomes NEq_S(s, t);
///  - ~true and ~false become false and true;
///  - any other ~phi becomes Nphi<k>(xs), xs the variables occurring in phi.
/// Names get a trailing '_' until fresh. Equal negated subformulas (up to
/// renaming of their variables) share one symbol.
class Morleyisation {
public:
  explicit Morleyisation(Theory base);

  /// Translates, adding symbols and defining axioms on first use.
  Formula translate(const ClassicalFormula& phi);
  /// translate(~phi) for a negation-free phi.
  Formula negate(const Formula& phi);
  void add_axiom(std::string name, const ClassicalFormula& lhs,
                 const ClassicalFormula& rhs);

  /// Fragment is ClassicalMorleyised once a symbol has been added.
  const Theory& theory() const { return theory_; }

  struct Definition {
    SymbolId symbol;
    /// Over the symbol's argument context.
    Formula negated;
  };
  /// In creation order; a definition only mentions earlier symbols.
  const std::vector<Definition>& definitions() const { return definitions_; }

private:
  SymbolId define(const std::string& name, Formula phi);

  Theory theory_;
  std::vector<Definition> definitions_;
  std::map<std::string, SymbolId> atoms_;
  std::map<Formula, SymbolId> compounds_;
  std::size_t compound_ = 0;
};

struct ClassicalAxiom {
  std::string name;
  ClassicalFormula lhs;
  ClassicalFormula rhs;
};

/// Theory over `sig` with the given axioms, Morleyised. Negation-free input
/// yields a theory with exactly those axioms, fragment Coherent.
Theory morleyise(const Signature& sig, const std::vector<ClassicalAxiom>& axioms);

/// Expands a model of the base signature to the Morleyised one, each
/// N-symbol read as the complement of its formula.
FiniteModel expand_model(const Morleyisation& m, const FiniteModel& model);

/// `|-_outer exists bound. matrix`, matrix over bound ++ outer.
struct ExistentialGoal {
  Context outer;
  Context bound;
  Formula matrix;

  ExistentialGoal(Context outer, Context bound, Formula matrix);
};

std::string to_string(const Signature& sig, const ExistentialGoal& g);

/// Stage order: level n = max(depth, doublings); within a level first
/// (n, 0), ..., (n, n), then (0, n), ..., (n - 1, n). Every budget field is
/// scaled by 2^doublings.
struct HerbrandSchedule {
  std::size_t max_depth = 4;
  std::size_t max_doublings = 2;
  SaturationBudget budget;

  struct Stage {
    std::size_t depth;
    SaturationBudget budget;
  };
  std::vector<Stage> stages() const;
};

struct HerbrandCertificate {
  ExistentialGoal goal;
  /// outer -> bound, in term enumeration order.
  std::vector<TermTuple> witnesses;
  /// true |-_outer matrix(t_1) \/ ... \/ matrix(t_n).
  Sequent derived;
  std::vector<TraceStep> trace;
  std::size_t depth_used;
  SaturationBudget budget;
};

/// true |-_outer matrix(t_1) \/ ... \/ matrix(t_n).
Sequent derived_sequent(const ExistentialGoal& g, const std::vector<TermTuple>& witnesses);

/// Runs leq(top, exists bound. matrix) at each stage until Proved, keeps the
/// witnesses whose disjuncts the proof used, then drops witnesses one at a
/// time while the derived sequent stays Proved. The result is re-checked
/// with verify() before it is returned; nullopt when the schedule runs out.
/// Throws FragmentError for a non-Horn matrix over a Horn theory and
/// StructuralError for an ill-formed theory or goal.
std::optional<HerbrandCertificate> find_witnesses(const Theory& t, const ExistentialGoal& g,
                                                  const HerbrandSchedule& schedule = {});

/// Cold check: the derived sequent matches the witnesses, entails proves it
/// at the recorded budget and the recorded trace replays.
bool verify(const Theory& t, const HerbrandCertificate& c);

/// For `phi(x) |- psi(y)` read as `forall x. phi |- forall y. psi`: the goal
/// `|-_y exists x. ~phi(x) \/ psi(y)`, ~phi translated by m.
ExistentialGoal reduce_forall_forall(Morleyisation& m, const Formula& phi, const Formula& psi);

/// phi(t_1(y)) /\ ... /\ phi(t_n(y)) |-_y psi(y).
Sequent conjunctive_sequent(const Formula& phi, const Formula& psi,
                            const std::vector<TermTuple>& witnesses);

} // namespace doctrina

#endif // DOCTRINA_HERBRAND_HPP
