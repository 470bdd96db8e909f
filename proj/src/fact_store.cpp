#include "fact_store.hpp"

#include "doctrina/error.hpp"

#include <algorithm>

namespace doctrina::detail {

std::size_t
FactStore::KeyHash::operator()(const std::vector<std::uint32_t>& k) const {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (std::uint32_t v : k)
    h = (h ^ v) * 0x100000001b3ULL;
  return h;
}

std::vector<std::uint32_t> FactStore::key_of(std::uint32_t head,
                                             std::span<const NodeId> args) const {
  std::vector<std::uint32_t> key;
  key.reserve(args.size() + 1);
  key.push_back(head);
  for (NodeId a : args)
    key.push_back(find(a));
  return key;
}

NodeId FactStore::intern(std::uint32_t head, std::vector<NodeId> args,
                         SortId sort, std::uint32_t depth) {
  auto key = key_of(head, args);
  if (auto it = table_.find(key); it != table_.end())
    return find(it->second);
  NodeId id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{head, std::move(args), sort, depth});
  parent_.push_back(id);
  table_.emplace(std::move(key), id);
  dirty_ = true;
  return id;
}

NodeId FactStore::add_var(std::size_t index, SortId sort) {
  return intern(kVarBit | static_cast<std::uint32_t>(index), {}, sort, 0);
}

NodeId FactStore::add(const Term& t, std::span<const NodeId> env) {
  if (t.is_var()) {
    NodeId n = env[t.var_index()];
    if (n == kUnbound)
      throw StructuralError("fact store: unbound variable");
    return find(n);
  }
  std::vector<NodeId> args;
  args.reserve(t.args().size());
  std::uint32_t depth = 0;
  for (const Term& a : t.args()) {
    NodeId n = add(a, env);
    args.push_back(n);
    depth = std::max(depth, nodes_[n].depth);
  }
  return intern(t.symbol(), std::move(args), t.sort(), depth + 1);
}

std::optional<NodeId> FactStore::lookup(const Term& t,
                                        std::span<const NodeId> env) const {
  if (t.is_var()) {
    NodeId n = env[t.var_index()];
    if (n == kUnbound)
      return std::nullopt;
    return find(n);
  }
  std::vector<std::uint32_t> key;
  key.reserve(t.args().size() + 1);
  key.push_back(t.symbol());
  for (const Term& a : t.args()) {
    auto n = lookup(a, env);
    if (!n)
      return std::nullopt;
    key.push_back(*n);
  }
  auto it = table_.find(key);
  if (it == table_.end())
    return std::nullopt;
  return find(it->second);
}

NodeId FactStore::find(NodeId n) const {
  NodeId root = n;
  while (parent_[root] != root)
    root = parent_[root];
  while (parent_[n] != root) {
    NodeId next = parent_[n];
    parent_[n] = root;
    n = next;
  }
  return root;
}

void FactStore::merge(NodeId a, NodeId b) {
  NodeId ra = find(a);
  NodeId rb = find(b);
  if (ra == rb)
    return;
  if (rb < ra)
    std::swap(ra, rb);
  parent_[rb] = ra;
  dirty_ = true;
  merged_ = true;
}

bool FactStore::add_fact(SymbolId rel, std::span<const NodeId> args) {
  std::vector<std::uint32_t> key;
  key.reserve(args.size() + 1);
  key.push_back(rel);
  for (NodeId a : args)
    key.push_back(find(a));
  return facts_.insert(std::move(key)).second;
}

bool FactStore::has_fact(SymbolId rel, std::span<const NodeId> args) const {
  std::vector<std::uint32_t> key;
  key.reserve(args.size() + 1);
  key.push_back(rel);
  for (NodeId a : args)
    key.push_back(find(a));
  return facts_.count(key) > 0;
}

bool FactStore::close() {
  bool merged_any = merged_;
  if (dirty_) {
    bool changed = true;
    while (changed) {
      changed = false;
      table_.clear();
      for (NodeId n = 0; n < nodes_.size(); ++n) {
        auto key = key_of(nodes_[n].head, nodes_[n].args);
        auto [it, inserted] = table_.emplace(std::move(key), n);
        if (!inserted && find(it->second) != find(n)) {
          merge(it->second, n);
          changed = true;
          merged_any = true;
        }
      }
    }
  }

  if (merged_any) {
    std::set<std::vector<std::uint32_t>> canon;
    for (const auto& f : facts_) {
      std::vector<std::uint32_t> k = f;
      for (std::size_t i = 1; i < k.size(); ++i)
        k[i] = find(k[i]);
      canon.insert(std::move(k));
    }
    facts_ = std::move(canon);
  }

  classes_.clear();
  by_sort_.assign(sig_->sorts().size(), {});
  members_.clear();
  rep_.clear();
  for (NodeId n = 0; n < nodes_.size(); ++n) {
    NodeId r = find(n);
    auto& m = members_[r];
    if (m.empty()) {
      classes_.push_back(r);
      by_sort_[nodes_[n].sort].push_back(r);
    }
    m.push_back(n);
    auto it = rep_.find(r);
    if (it == rep_.end() || nodes_[n].depth < nodes_[it->second].depth)
      rep_[r] = n;
  }
  dirty_ = false;
  merged_ = false;
  return merged_any;
}

const std::vector<NodeId>& FactStore::classes_of_sort(SortId s) const {
  static const std::vector<NodeId> none;
  return s < by_sort_.size() ? by_sort_[s] : none;
}

const std::vector<NodeId>& FactStore::members(NodeId root) const {
  static const std::vector<NodeId> none;
  auto it = members_.find(root);
  return it == members_.end() ? none : it->second;
}

std::vector<std::vector<NodeId>> FactStore::facts_of(SymbolId rel) const {
  std::vector<std::vector<NodeId>> out;
  auto it = facts_.lower_bound(std::vector<std::uint32_t>{rel});
  for (; it != facts_.end() && (*it)[0] == rel; ++it)
    out.emplace_back(it->begin() + 1, it->end());
  return out;
}

Term FactStore::node_term(NodeId n) const {
  if (term_cache_.size() < nodes_.size())
    term_cache_.resize(nodes_.size());
  if (term_cache_[n])
    return *term_cache_[n];
  const Node& node = nodes_[n];
  if (node.head & kVarBit) {
    term_cache_[n] = Term::var(node.head & ~kVarBit, node.sort);
  } else {
    std::vector<Term> args;
    args.reserve(node.args.size());
    for (NodeId a : node.args)
      args.push_back(node_term(a));
    term_cache_[n] = Term::apply(*sig_, node.head, std::move(args));
  }
  return *term_cache_[n];
}

Term FactStore::term_of(NodeId n) const {
  NodeId r = find(n);
  auto it = rep_.find(r);
  if (it == rep_.end())
    return node_term(n);
  return node_term(it->second);
}

} // namespace doctrina::detail
