#ifndef DOCTRINA_SEMANTICS_HPP
#define DOCTRINA_SEMANTICS_HPP

// Finite structures and the powerset doctrine over them. A context is
// interpreted as the product of its carriers; a formula as a subset of it.

#include "doctrina/logic.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace doctrina {

using Element = std::uint32_t;

/// Carriers are 0..n-1 per sort. Function tables and relations are stored
/// flat, indexed by the mixed-radix encoding of the argument vector with the
/// first argument most significant.
class FiniteModel {
public:
  FiniteModel(std::shared_ptr<const Signature> sig, std::vector<std::size_t> carriers);

  const Signature& signature() const { return *sig_; }
  const std::shared_ptr<const Signature>& signature_ptr() const { return sig_; }
  std::size_t carrier(SortId s) const { return carriers_.at(s); }
  const std::vector<std::size_t>& carriers() const { return carriers_; }

  Element apply(SymbolId f, std::span<const Element> args) const;
  void set_function(SymbolId f, std::span<const Element> args, Element value);
  bool holds(SymbolId r, std::span<const Element> args) const;
  void set_relation(SymbolId r, std::span<const Element> args, bool value);

  /// Number of argument vectors of a symbol's table.
  std::size_t table_size(std::span<const SortId> arg_sorts) const;
  /// Direct access by flat argument index, for enumeration.
  Element function_entry(SymbolId f, std::size_t index) const;
  void set_function_entry(SymbolId f, std::size_t index, Element value);
  bool relation_entry(SymbolId r, std::size_t index) const;
  void set_relation_entry(SymbolId r, std::size_t index, bool value);

  /// Throws StructuralError unless every function entry is defined and in
  /// range.
  void validate() const;

  friend bool operator==(const FiniteModel& a, const FiniteModel& b);

private:
  std::size_t index(std::span<const SortId> sorts, std::span<const Element> args) const;

  std::shared_ptr<const Signature> sig_;
  std::vector<std::size_t> carriers_;
  std::vector<std::vector<Element>> functions_; // kUndefined where unset
  std::vector<std::vector<bool>> relations_;
};

/// A subset of the product of the carriers of a context, as a bit set over
/// mixed-radix tuple indices (first binding most significant). The empty
/// context has exactly one tuple.
class Subset {
public:
  explicit Subset(std::vector<std::size_t> dims, bool full = false);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t universe() const { return universe_; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }

  bool contains(std::size_t index) const;
  bool contains(std::span<const Element> tuple) const;
  void insert(std::size_t index);
  void insert(std::span<const Element> tuple);

  std::size_t index_of(std::span<const Element> tuple) const;
  std::vector<Element> tuple_of(std::size_t index) const;
  /// Members in increasing index order.
  std::vector<std::vector<Element>> elements() const;

  Subset& operator&=(const Subset& other);
  Subset& operator|=(const Subset& other);
  friend Subset operator&(Subset a, const Subset& b) { return a &= b; }
  friend Subset operator|(Subset a, const Subset& b) { return a |= b; }
  bool subset_of(const Subset& other) const;
  friend bool operator==(const Subset& a, const Subset& b) = default;

private:
  std::vector<std::size_t> dims_;
  std::size_t universe_;
  std::vector<std::uint64_t> bits_;
};

/// Carrier sizes of the bindings of `ctx`.
std::vector<std::size_t> dims_of(const FiniteModel& m, const Context& ctx);

Element eval(const FiniteModel& m, const Term& t, std::span<const Element> env);

/// The interpretation of `phi` as a subset of the carriers of its context,
/// computed compositionally: atoms pointwise, connectives as set operations.
/// Throws StructuralError if phi is not over the model's signature.
Subset eval(const FiniteModel& m, const Formula& phi);

/// The function |domain| -> |codomain| interpreting `f`: entry i is the
/// index (in the codomain product) of the image of domain tuple i.
std::vector<std::size_t> eval(const FiniteModel& m, const TermTuple& f);

/// Inverse image of `s` (over the codomain) along an evaluated map.
Subset preimage(const Subset& s, const std::vector<std::size_t>& map,
                std::vector<std::size_t> domain_dims);
/// Direct image along an evaluated map; the left adjoint to preimage.
Subset image(const Subset& s, const std::vector<std::size_t>& map,
             std::vector<std::size_t> codomain_dims);

struct Violation {
  std::string axiom;
  std::vector<Element> counter_tuple;
};

/// First counterexample of a sequent, if any.
std::optional<std::vector<Element>> counterexample(const FiniteModel& m, const Sequent& s);
/// One entry per failing axiom, in axiom order.
std::vector<Violation> violations(const FiniteModel& m, const Theory& t);
bool satisfies(const FiniteModel& m, const Theory& t);
bool satisfies(const FiniteModel& m, const Sequent& s);

/// A model seen as a morphism out of the syntactic doctrine: interprets
/// formulas with memoization. Not safe for concurrent use.
class ModelInterpretation {
public:
  explicit ModelInterpretation(FiniteModel m) : model_(std::move(m)) {}
  const FiniteModel& model() const { return model_; }
  const Subset& operator()(const Formula& phi);

private:
  FiniteModel model_;
  std::map<Formula, Subset> memo_;
};

/// log2 of the number of structures with the given carrier sizes, rounded
/// up per table.
std::size_t table_bits(const Signature& sig, const std::vector<std::size_t>& carriers);

/// Upper bound on table_bits accepted by enumeration: DOCTRINA_MAX_TABLE_BITS
/// if set, otherwise 24.
std::size_t max_table_bits();

/// Deterministic enumeration of all structures whose carriers have sizes in
/// 1..max_size. Carrier size vectors vary first-sort-slowest; within a size
/// vector, tables count like an odometer, last relation fastest.
/// Throws RefusalError if the largest size vector exceeds max_table_bits().
class ModelStream {
public:
  ModelStream(std::shared_ptr<const Signature> sig, std::size_t max_size);
  /// Advances to the next model; false when exhausted.
  bool next();
  const FiniteModel& current() const { return *current_; }

private:
  bool next_sizes();
  bool next_tables();
  void reset_tables();

  std::shared_ptr<const Signature> sig_;
  std::size_t max_size_;
  std::vector<std::size_t> sizes_;
  std::optional<FiniteModel> current_;
  bool started_ = false;
};

std::vector<FiniteModel> enumerate_models(std::shared_ptr<const Signature> sig,
                                          std::size_t max_size);

/// Model JSON: {"carriers": {sort: n}, "functions": {name: [[args..., value],
/// ...] or a bare integer for constants}, "relations": {name: [[args...],
/// ...]}}. Throws Error on malformed input.
FiniteModel model_from_json(std::shared_ptr<const Signature> sig, std::string_view text);
std::string model_to_json(const FiniteModel& m);

} // namespace doctrina

#endif // DOCTRINA_SEMANTICS_HPP
