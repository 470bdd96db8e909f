#ifndef DOCTRINA_ENTAILMENT_HPP
#define DOCTRINA_ENTAILMENT_HPP

// Bounded semi-decision of `T |- (lhs |- rhs)` for universal coherent
// theories: a chase over a congruence-closed fact store, with case splits on
// disjunctive axiom heads. Answers Proved (with a replayable trace) or
// Unknown; never "refuted".

#include "doctrina/logic.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace doctrina {

struct SaturationBudget {
  std::size_t rounds = 64;
  std::size_t split_depth = 16;
  /// Terms the chase may create beyond those occurring in the sequent.
  std::size_t fresh_terms = 256;

  bool operator==(const SaturationBudget&) const = default;
};

enum class EntailmentStatus { Proved, Unknown };

/// One axiom instance used by the chase. `instance` maps the axiom's context
/// into the sequent's context. Branch ids are dotted paths: "0", "0.1", ...
/// A step whose head has several disjuncts opens one child branch per
/// disjunct. The pseudo-axiom "@lhs" splits on a disjunctive left-hand side.
struct TraceStep {
  std::string axiom;
  TermTuple instance;
  std::string branch;
};

struct EntailmentVerdict {
  EntailmentStatus status = EntailmentStatus::Unknown;
  std::vector<TraceStep> trace;
  /// Largest number of saturation rounds any branch needed.
  std::size_t bound_used = 0;
  /// Indices into disjuncts(rhs) that closed some branch.
  std::vector<std::size_t> used_disjuncts;

  bool proved() const { return status == EntailmentStatus::Proved; }
};

/// Procedure: context variables become fresh constants; lhs facts and all
/// terms of the sequent seed the store; each round fires every axiom
/// instance whose lhs matches (axiom variables range over classes already in
/// the store), then the first unsatisfied disjunctive instance is split on.
/// A branch closes when `false` is derived or a disjunct of rhs holds.
/// Any exhausted budget yields Unknown.
///
/// Throws StructuralError if the sequent is ill-formed over the signature.
EntailmentVerdict entails(const Theory& theory, const Sequent& sequent,
                          const SaturationBudget& budget = {});

/// Checks a trace as a proof of `sequent`, independently of the search:
/// every step's lhs must hold when it is applied, every split must cover all
/// head disjuncts, and every leaf must be contradictory or satisfy rhs.
bool replay(const Theory& theory, const Sequent& sequent,
            const std::vector<TraceStep>& trace);

using ProofObserver =
    std::function<void(const Theory&, const Sequent&, const EntailmentVerdict&)>;

/// Registers an observer called for every Proved verdict on this thread
/// while the object is alive.
class ScopedProofObserver {
public:
  explicit ScopedProofObserver(ProofObserver observer);
  ~ScopedProofObserver();
  ScopedProofObserver(const ScopedProofObserver&) = delete;
  ScopedProofObserver& operator=(const ScopedProofObserver&) = delete;
};

} // namespace doctrina

#endif // DOCTRINA_ENTAILMENT_HPP
