#ifndef DOCTRINA_SRC_FACT_STORE_HPP
#define DOCTRINA_SRC_FACT_STORE_HPP

// Ground term universe with congruence closure and relation facts. Used by
// the chase in entailment.cpp and by the trace replayer.

#include "doctrina/terms.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

namespace doctrina::detail {

using NodeId = std::uint32_t;
inline constexpr NodeId kUnbound = static_cast<NodeId>(-1);

class FactStore {
public:
  struct Node {
    std::uint32_t head; // function symbol, or kVarBit | context index
    std::vector<NodeId> args;
    SortId sort;
    std::uint32_t depth;
  };
  static constexpr std::uint32_t kVarBit = 1u << 31;

  explicit FactStore(const Signature& sig) : sig_(&sig) {}

  /// Ground constant standing for variable `index` of the sequent context.
  NodeId add_var(std::size_t index, SortId sort);
  /// Interns `t`, reading variable i as `env[i]`; every variable must be bound.
  NodeId add(const Term& t, std::span<const NodeId> env);
  /// The class of `t` if it is already represented; never creates nodes.
  /// Exact only after close().
  std::optional<NodeId> lookup(const Term& t, std::span<const NodeId> env) const;

  NodeId find(NodeId n) const;
  void merge(NodeId a, NodeId b);
  bool add_fact(SymbolId rel, std::span<const NodeId> args);
  bool has_fact(SymbolId rel, std::span<const NodeId> args) const;

  void set_contradiction() { contradiction_ = true; }
  bool contradiction() const { return contradiction_; }

  /// Congruence closure to a fixpoint, then re-canonicalises facts and
  /// rebuilds the class index. Returns true if any classes were merged.
  bool close();

  std::size_t node_count() const { return nodes_.size(); }
  const Node& node(NodeId n) const { return nodes_[n]; }

  // Class index, valid as of the last close().
  const std::vector<NodeId>& classes() const { return classes_; }
  const std::vector<NodeId>& classes_of_sort(SortId s) const;
  const std::vector<NodeId>& members(NodeId root) const;
  /// Facts of `rel` as canonical argument vectors, in sorted order.
  std::vector<std::vector<NodeId>> facts_of(SymbolId rel) const;

  /// Smallest recorded term of the class of `n` (as of the last close()).
  Term term_of(NodeId n) const;

  struct KeyHash {
    std::size_t operator()(const std::vector<std::uint32_t>& k) const;
  };

private:

  std::vector<std::uint32_t> key_of(std::uint32_t head,
                                    std::span<const NodeId> args) const;
  NodeId intern(std::uint32_t head, std::vector<NodeId> args, SortId sort,
                std::uint32_t depth);
  Term node_term(NodeId n) const;

  const Signature* sig_;
  std::vector<Node> nodes_;
  mutable std::vector<std::optional<Term>> term_cache_; // per node
  mutable std::vector<NodeId> parent_;
  std::unordered_map<std::vector<std::uint32_t>, NodeId, KeyHash> table_;
  std::set<std::vector<std::uint32_t>> facts_; // [rel, class...]
  bool contradiction_ = false;
  bool dirty_ = false;
  bool merged_ = false;

  std::vector<NodeId> classes_;
  std::vector<std::vector<NodeId>> by_sort_;
  std::unordered_map<NodeId, std::vector<NodeId>> members_;
  std::unordered_map<NodeId, NodeId> rep_;
};

} // namespace doctrina::detail

#endif // DOCTRINA_SRC_FACT_STORE_HPP
