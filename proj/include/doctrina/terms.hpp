#ifndef DOCTRINA_TERMS_HPP
#define DOCTRINA_TERMS_HPP

// Multi-sorted signatures, well-sorted terms and the category of terms:
// contexts are objects, tuples of terms are morphisms, substitution is
// composition and concatenation of contexts is the product.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace doctrina {

using SortId = std::uint32_t;
using SymbolId = std::uint32_t;

struct FunctionSymbol {
  std::string name;
  std::vector<SortId> args;
  SortId result = 0;

  bool operator==(const FunctionSymbol&) const = default;
};

struct RelationSymbol {
  std::string name;
  std::vector<SortId> args;

  bool operator==(const RelationSymbol&) const = default;
};

/// Sorts, function symbols and relation symbols, each in its own namespace.
/// Ids are positions in declaration order.
class Signature {
public:
  SortId add_sort(std::string name);
  SymbolId add_function(std::string name, std::vector<SortId> args,
                        SortId result);
  SymbolId add_constant(std::string name, SortId sort) {
    return add_function(std::move(name), {}, sort);
  }
  SymbolId add_relation(std::string name, std::vector<SortId> args);

  std::optional<SortId> find_sort(std::string_view name) const;
  std::optional<SymbolId> find_function(std::string_view name) const;
  std::optional<SymbolId> find_relation(std::string_view name) const;

  SortId sort(std::string_view name) const;
  SymbolId function(std::string_view name) const;
  SymbolId relation(std::string_view name) const;

  const std::vector<std::string>& sorts() const { return sorts_; }
  const std::vector<FunctionSymbol>& functions() const { return functions_; }
  const std::vector<RelationSymbol>& relations() const { return relations_; }

  const std::string& sort_name(SortId s) const;
  const FunctionSymbol& function_symbol(SymbolId f) const;
  const RelationSymbol& relation_symbol(SymbolId r) const;

  bool operator==(const Signature&) const = default;

private:
  void check_sort(SortId s) const;

  std::vector<std::string> sorts_;
  std::vector<FunctionSymbol> functions_;
  std::vector<RelationSymbol> relations_;
};

struct Binding {
  std::string name;
  SortId sort = 0;

  bool operator==(const Binding&) const = default;
};

/// An ordered list of typed variables. Variables are referred to by position;
/// names only matter for printing. The empty context is the terminal object.
class Context {
public:
  Context();
  explicit Context(std::vector<Binding> bindings);

  std::size_t size() const { return bindings_->size(); }
  bool empty() const { return bindings_->empty(); }
  const Binding& operator[](std::size_t i) const { return (*bindings_)[i]; }
  const std::vector<Binding>& bindings() const { return *bindings_; }
  std::vector<SortId> sorts() const;

  /// Sub-context of `len` bindings starting at `offset`.
  Context slice(std::size_t offset, std::size_t len) const;

  /// Same sort list; names are ignored.
  bool same_shape(const Context& other) const;

  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const Context& a, const Context& b) {
    return a.bindings_ == b.bindings_ || *a.bindings_ == *b.bindings_;
  }

private:
  std::shared_ptr<const std::vector<Binding>> bindings_;
};

/// Concatenation `c ++ d`. Names of `d` that clash are primed until unique.
Context concat(const Context& c, const Context& d);

/// A well-sorted term whose variables are positions in some context.
/// Immutable and cheap to copy.
class Term {
public:
  static Term var(std::size_t index, SortId sort);
  /// Application of `f`; argument sorts are checked against `sig`.
  static Term apply(const Signature& sig, SymbolId f, std::vector<Term> args);

  bool is_var() const;
  std::size_t var_index() const;
  SymbolId symbol() const;
  std::span<const Term> args() const;
  SortId sort() const;
  /// 0 for variables, 1 for constants, 1 + max over arguments otherwise.
  std::size_t depth() const;
  /// One past the largest variable index occurring in the term (0 if closed).
  std::size_t var_bound() const;
  std::size_t hash() const;

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

private:
  friend Term substitute(const Term&, std::span<const Term>);
  static Term apply_unchecked(SymbolId f, SortId result, std::vector<Term> args);

  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Simultaneous substitution of `replacement[i]` for variable `i`.
Term substitute(const Term& t, std::span<const Term> replacement);

/// Checks variable range and sorts against `ctx` and symbols against `sig`.
bool well_formed(const Signature& sig, const Context& ctx, const Term& t);

/// A morphism `domain -> codomain` of the category of terms: one term over
/// `domain` per binding of `codomain`.
class TermTuple {
public:
  TermTuple(Context domain, Context codomain, std::vector<Term> components);

  const Context& domain() const { return domain_; }
  const Context& codomain() const { return codomain_; }
  const std::vector<Term>& components() const { return components_; }
  const Term& operator[](std::size_t i) const { return components_[i]; }
  std::size_t size() const { return components_.size(); }
  std::size_t depth() const;

  /// Same components and same context shapes.
  friend bool operator==(const TermTuple& a, const TermTuple& b);

private:
  Context domain_;
  Context codomain_;
  std::vector<Term> components_;
};

TermTuple identity(const Context& c);
/// The unique map into the empty context.
TermTuple terminal_map(const Context& c);
/// `g . f`; requires codomain(f) = domain(g).
TermTuple compose(const TermTuple& g, const TermTuple& f);
/// `<f, g>`; requires domain(f) = domain(g).
TermTuple pairing(const TermTuple& f, const TermTuple& g);
/// The variable tuple `whole -> whole[offset, offset+len)`.
TermTuple projection(const Context& whole, std::size_t offset, std::size_t len);
/// Variable tuple `domain -> codomain` picking `indices[i]` for component i.
TermTuple select(const Context& domain, const Context& codomain,
                 std::span<const std::size_t> indices);

struct Product {
  Context context;
  TermTuple left;  // context -> c
  TermTuple right; // context -> d
};

/// `c x d` as the concatenation `c ++ d` with its two projections.
Product product(const Context& c, const Context& d);

/// All well-sorted terms of `sort` over `ctx` of depth <= max_depth, ordered
/// by depth, then symbol declaration order, then arguments.
std::vector<Term> enumerate_terms(const Signature& sig, const Context& ctx,
                                  SortId sort, std::size_t max_depth);

/// All tuples `domain -> codomain` whose components have depth <= max_depth,
/// without duplicates, ordered by maximal component depth and then
/// lexicographically by component.
std::vector<TermTuple> enumerate_tuples(const Signature& sig,
                                        const Context& domain,
                                        const Context& codomain,
                                        std::size_t max_depth);

/// Canonical printing: `x`, `a`, `f(x, g(a))`.
std::string to_string(const Signature& sig, const Context& ctx, const Term& t);
/// `[x:S, y:T]`, or the empty string for the empty context.
std::string to_string(const Signature& sig, const Context& ctx);
/// A singleton prints as its only term, otherwise `(t1, t2, ...)`.
std::string to_string(const Signature& sig, const TermTuple& f);

} // namespace doctrina

#endif // DOCTRINA_TERMS_HPP
