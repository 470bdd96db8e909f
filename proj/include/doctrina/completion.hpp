#ifndef DOCTRINA_COMPLETION_HPP
#define DOCTRINA_COMPLETION_HPP

// The free existential completion of the syntactic doctrine of a universal
// theory. An element over a context c is a finite set of pairs (d, x) with x
// a formula over d ++ c, read as "exists d. x", the set read as a
// disjunction. Elements are preorder representatives: equalities between
// them are stated as mutual leq.

#include "doctrina/entailment.hpp"
#include "doctrina/semantics.hpp"

#include <cstddef>
#include <vector>

namespace doctrina {

struct ExPair {
  Context witness;
  /// Over witness ++ base.
  Formula body;
};

class ExElement {
public:
  /// Bodies are normalized and re-contexted over witness ++ base; repeated
  /// pairs are dropped, keeping the first occurrence.
  /// Throws StructuralError if a body's context is not witness ++ base.
  ExElement(Context base, std::vector<ExPair> pairs);

  const Context& base() const { return base_; }
  const std::vector<ExPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  /// Same base shape and the same pairs in the same order.
  friend bool operator==(const ExElement& a, const ExElement& b);

private:
  Context base_;
  std::vector<ExPair> pairs_;
};

/// Exactly one pair with a Horn body: the shape of elements in Horn mode.
bool is_horn(const ExElement& a);

std::string to_string(const Signature& sig, const ExElement& a);

/// One arrow r = <t, pi_c>: witness ++ c -> target witness ++ c.
struct LeqArrow {
  std::size_t target;
  TermTuple arrow;
};

struct LeqPairWitness {
  std::size_t source;
  /// Arrows whose pulled-back targets the proof used, in candidate order.
  std::vector<LeqArrow> arrows;
  /// The sequent handed to entails and its trace.
  Sequent sequent;
  std::vector<TraceStep> trace;
};

struct LeqResult {
  EntailmentStatus status = EntailmentStatus::Unknown;
  /// One entry per pair of the left element when Proved.
  std::vector<LeqPairWitness> pairs;

  bool proved() const { return status == EntailmentStatus::Proved; }
};

/// a <= b: for each pair (d, x) of a, every arrow <t, pi_c> with t a tuple of
/// depth <= `depth` into a witness context of b is collected; x must entail
/// the disjunction of all pulled-back bodies. Sound at any depth.
/// Throws StructuralError if the bases differ in shape.
LeqResult leq(const Theory& t, const ExElement& a, const ExElement& b,
              std::size_t depth, const SaturationBudget& budget = {});

ExElement top(const Context& c);
ExElement bottom(const Context& c);
/// {(empty, phi)}.
ExElement unit(const Formula& phi);

/// Pairs (d ++ e, x /\ y) over all pairs of a and b.
ExElement meet(const Theory& t, const ExElement& a, const ExElement& b);
/// Union of pairs. Throws FragmentError for Horn theories.
ExElement join(const Theory& t, const ExElement& a, const ExElement& b);

/// Reindexing along f: c' -> c; each body moves along 1_d x f.
ExElement subst_ex(const ExElement& a, const TermTuple& f);

/// Existential quantification of the first |d| variables of a's base: each
/// witness e becomes e ++ d, bodies unchanged.
/// Throws StructuralError if the base does not start with d.
ExElement exists_along(const ExElement& a, const Context& d);

/// Componentwise equality of two copies of d, as a formula over d ++ d.
Formula delta(const Context& d);
/// The diagonal d -> d ++ d.
TermTuple diagonal(const Context& d);
/// {(empty, delta_d)} over c ++ d ++ d, equalities between the two d blocks.
ExElement equality_predicate(const Context& d, const Context& c);

/// The unique extension of a model to the completion: the union over pairs
/// of the projection onto c of the interpretation of the body.
Subset extend_morphism(ModelInterpretation& m, const ExElement& a);

} // namespace doctrina

#endif // DOCTRINA_COMPLETION_HPP
