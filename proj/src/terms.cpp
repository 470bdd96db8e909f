#include "doctrina/terms.hpp"

#include "doctrina/error.hpp"

#include <algorithm>
#include <functional>

namespace doctrina {

// ---------------------------------------------------------------- Signature

namespace {

template <typename Seq, typename Proj>
std::optional<std::uint32_t> find_name(const Seq& seq, std::string_view name,
                                       Proj proj) {
  for (std::size_t i = 0; i < seq.size(); ++i)
    if (proj(seq[i]) == name)
      return static_cast<std::uint32_t>(i);
  return std::nullopt;
}

} // namespace

SortId Signature::add_sort(std::string name) {
  if (find_sort(name))
    throw StructuralError("duplicate sort '" + name + "'");
  sorts_.push_back(std::move(name));
  return static_cast<SortId>(sorts_.size() - 1);
}

SymbolId Signature::add_function(std::string name, std::vector<SortId> args,
                                 SortId result) {
  if (find_function(name))
    throw StructuralError("duplicate function symbol '" + name + "'");
  for (SortId s : args)
    check_sort(s);
  check_sort(result);
  functions_.push_back({std::move(name), std::move(args), result});
  return static_cast<SymbolId>(functions_.size() - 1);
}

SymbolId Signature::add_relation(std::string name, std::vector<SortId> args) {
  if (find_relation(name))
    throw StructuralError("duplicate relation symbol '" + name + "'");
  for (SortId s : args)
    check_sort(s);
  relations_.push_back({std::move(name), std::move(args)});
  return static_cast<SymbolId>(relations_.size() - 1);
}

std::optional<SortId> Signature::find_sort(std::string_view name) const {
  return find_name(sorts_, name, [](const std::string& s) -> const std::string& { return s; });
}

std::optional<SymbolId> Signature::find_function(std::string_view name) const {
  return find_name(functions_, name, [](const FunctionSymbol& f) -> const std::string& { return f.name; });
}

std::optional<SymbolId> Signature::find_relation(std::string_view name) const {
  return find_name(relations_, name, [](const RelationSymbol& r) -> const std::string& { return r.name; });
}

SortId Signature::sort(std::string_view name) const {
  if (auto s = find_sort(name))
    return *s;
  throw StructuralError("undeclared sort '" + std::string(name) + "'");
}

SymbolId Signature::function(std::string_view name) const {
  if (auto f = find_function(name))
    return *f;
  throw StructuralError("undeclared function symbol '" + std::string(name) + "'");
}

SymbolId Signature::relation(std::string_view name) const {
  if (auto r = find_relation(name))
    return *r;
  throw StructuralError("undeclared relation symbol '" + std::string(name) + "'");
}

const std::string& Signature::sort_name(SortId s) const {
  check_sort(s);
  return sorts_[s];
}

const FunctionSymbol& Signature::function_symbol(SymbolId f) const {
  if (f >= functions_.size())
    throw StructuralError("unknown function id " + std::to_string(f));
  return functions_[f];
}

const RelationSymbol& Signature::relation_symbol(SymbolId r) const {
  if (r >= relations_.size())
    throw StructuralError("unknown relation id " + std::to_string(r));
  return relations_[r];
}

void Signature::check_sort(SortId s) const {
  if (s >= sorts_.size())
    throw StructuralError("unknown sort id " + std::to_string(s));
}

// ------------------------------------------------------------------ Context

namespace {
const std::shared_ptr<const std::vector<Binding>>& empty_bindings() {
  static const auto empty = std::make_shared<const std::vector<Binding>>();
  return empty;
}
} // namespace

Context::Context() : bindings_(empty_bindings()) {}

Context::Context(std::vector<Binding> bindings) {
  for (std::size_t i = 0; i < bindings.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (bindings[i].name == bindings[j].name)
        throw StructuralError("duplicate variable '" + bindings[i].name +
                              "' in context");
  bindings_ = bindings.empty()
                  ? empty_bindings()
                  : std::make_shared<const std::vector<Binding>>(std::move(bindings));
}

std::vector<SortId> Context::sorts() const {
  std::vector<SortId> out;
  out.reserve(size());
  for (const auto& b : *bindings_)
    out.push_back(b.sort);
  return out;
}

Context Context::slice(std::size_t offset, std::size_t len) const {
  if (offset + len > size())
    throw StructuralError("context slice out of range");
  if (offset == 0 && len == size())
    return *this;
  return Context(std::vector<Binding>(bindings_->begin() + offset,
                                      bindings_->begin() + offset + len));
}

bool Context::same_shape(const Context& other) const {
  if (bindings_ == other.bindings_)
    return true;
  if (size() != other.size())
    return false;
  for (std::size_t i = 0; i < size(); ++i)
    if ((*this)[i].sort != other[i].sort)
      return false;
  return true;
}

std::optional<std::size_t> Context::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < size(); ++i)
    if ((*this)[i].name == name)
      return i;
  return std::nullopt;
}

Context concat(const Context& c, const Context& d) {
  if (c.empty())
    return d;
  if (d.empty())
    return c;
  std::vector<Binding> out = c.bindings();
  auto taken = [&](const std::string& name) {
    return std::any_of(out.begin(), out.end(),
                       [&](const Binding& b) { return b.name == name; });
  };
  for (std::size_t i = 0; i < d.size(); ++i) {
    Binding b = d[i];
    auto later = [&](const std::string& name) {
      for (std::size_t j = i + 1; j < d.size(); ++j)
        if (d[j].name == name)
          return true;
      return false;
    };
    while (taken(b.name) || (b.name != d[i].name && later(b.name)))
      b.name += '\'';
    out.push_back(std::move(b));
  }
  return Context(std::move(out));
}

// --------------------------------------------------------------------- Term

struct Term::Node {
  bool is_var;
  std::uint32_t index; // variable index or function symbol
  SortId sort;
  std::vector<Term> args;
  std::size_t depth;
  std::size_t var_bound;
  std::size_t hash;
};

namespace {
std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}
} // namespace

Term Term::var(std::size_t index, SortId sort) {
  std::size_t h = mix(mix(0x51, index), sort);
  return Term(std::make_shared<const Node>(
      Node{true, static_cast<std::uint32_t>(index), sort, {}, 0, index + 1, h}));
}

Term Term::apply(const Signature& sig, SymbolId f, std::vector<Term> args) {
  const FunctionSymbol& sym = sig.function_symbol(f);
  if (sym.args.size() != args.size())
    throw StructuralError("function '" + sym.name + "' expects " +
                          std::to_string(sym.args.size()) + " arguments, got " +
                          std::to_string(args.size()));
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i].sort() != sym.args[i])
      throw StructuralError("argument " + std::to_string(i + 1) + " of '" +
                            sym.name + "' has sort " +
                            sig.sort_name(args[i].sort()) + ", expected " +
                            sig.sort_name(sym.args[i]));
  }
  return apply_unchecked(f, sym.result, std::move(args));
}

bool Term::is_var() const { return node_->is_var; }

std::size_t Term::var_index() const {
  if (!node_->is_var)
    throw StructuralError("term is not a variable");
  return node_->index;
}

SymbolId Term::symbol() const {
  if (node_->is_var)
    throw StructuralError("term is a variable");
  return node_->index;
}

std::span<const Term> Term::args() const { return node_->args; }
SortId Term::sort() const { return node_->sort; }
std::size_t Term::depth() const { return node_->depth; }
std::size_t Term::var_bound() const { return node_->var_bound; }
std::size_t Term::hash() const { return node_->hash; }

Term Term::apply_unchecked(SymbolId f, SortId result, std::vector<Term> args) {
  std::size_t depth = 0;
  std::size_t bound = 0;
  std::size_t h = mix(0xa7, f);
  for (const Term& a : args) {
    depth = std::max(depth, a.depth());
    bound = std::max(bound, a.var_bound());
    h = mix(h, a.hash());
  }
  return Term(std::make_shared<const Node>(
      Node{false, f, result, std::move(args), depth + 1, bound, h}));
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_)
    return true;
  if (a.node_->hash != b.node_->hash)
    return false;
  return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_)
    return std::strong_ordering::equal;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (auto c = x.depth <=> y.depth; c != 0)
    return c;
  if (x.is_var != y.is_var)
    return x.is_var ? std::strong_ordering::less : std::strong_ordering::greater;
  if (auto c = x.index <=> y.index; c != 0)
    return c;
  if (auto c = x.sort <=> y.sort; c != 0)
    return c;
  for (std::size_t i = 0; i < x.args.size(); ++i)
    if (auto c = x.args[i] <=> y.args[i]; c != 0)
      return c;
  return std::strong_ordering::equal;
}

Term substitute(const Term& t, std::span<const Term> replacement) {
  if (t.is_var()) {
    std::size_t i = t.var_index();
    if (i >= replacement.size())
      throw StructuralError("substitution does not cover variable #" +
                            std::to_string(i));
    if (replacement[i].sort() != t.sort())
      throw StructuralError("substitution changes the sort of variable #" +
                            std::to_string(i));
    return replacement[i];
  }
  if (t.var_bound() == 0)
    return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  bool changed = false;
  for (const Term& a : t.args()) {
    args.push_back(substitute(a, replacement));
    changed = changed || !(args.back() == a);
  }
  if (!changed)
    return t;
  return Term::apply_unchecked(t.symbol(), t.sort(), std::move(args));
}

bool well_formed(const Signature& sig, const Context& ctx, const Term& t) {
  if (t.is_var())
    return t.var_index() < ctx.size() && ctx[t.var_index()].sort == t.sort();
  if (t.symbol() >= sig.functions().size())
    return false;
  const FunctionSymbol& f = sig.functions()[t.symbol()];
  if (f.result != t.sort() || f.args.size() != t.args().size())
    return false;
  for (std::size_t i = 0; i < f.args.size(); ++i)
    if (t.args()[i].sort() != f.args[i] || !well_formed(sig, ctx, t.args()[i]))
      return false;
  return true;
}

// ---------------------------------------------------------------- TermTuple

TermTuple::TermTuple(Context domain, Context codomain,
                     std::vector<Term> components)
    : domain_(std::move(domain)), codomain_(std::move(codomain)),
      components_(std::move(components)) {
  if (components_.size() != codomain_.size())
    throw StructuralError("tuple has " + std::to_string(components_.size()) +
                          " components for a codomain of size " +
                          std::to_string(codomain_.size()));
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (components_[i].sort() != codomain_[i].sort)
      throw StructuralError("tuple component " + std::to_string(i) +
                            " has the wrong sort");
    if (components_[i].var_bound() > domain_.size())
      throw StructuralError("tuple component " + std::to_string(i) +
                            " uses a variable outside the domain");
  }
}

std::size_t TermTuple::depth() const {
  std::size_t d = 0;
  for (const Term& t : components_)
    d = std::max(d, t.depth());
  return d;
}

bool operator==(const TermTuple& a, const TermTuple& b) {
  return a.domain_.same_shape(b.domain_) &&
         a.codomain_.same_shape(b.codomain_) && a.components_ == b.components_;
}

TermTuple identity(const Context& c) {
  std::vector<Term> comps;
  comps.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    comps.push_back(Term::var(i, c[i].sort));
  return TermTuple(c, c, std::move(comps));
}

TermTuple terminal_map(const Context& c) { return TermTuple(c, Context(), {}); }

TermTuple compose(const TermTuple& g, const TermTuple& f) {
  if (!f.codomain().same_shape(g.domain()))
    throw StructuralError("compose: codomain of the first map does not match "
                          "the domain of the second");
  std::vector<Term> comps;
  comps.reserve(g.size());
  for (const Term& t : g.components())
    comps.push_back(substitute(t, f.components()));
  return TermTuple(f.domain(), g.codomain(), std::move(comps));
}

TermTuple pairing(const TermTuple& f, const TermTuple& g) {
  if (!f.domain().same_shape(g.domain()))
    throw StructuralError("pairing: maps have different domains");
  std::vector<Term> comps = f.components();
  comps.insert(comps.end(), g.components().begin(), g.components().end());
  return TermTuple(f.domain(), concat(f.codomain(), g.codomain()),
                   std::move(comps));
}

TermTuple projection(const Context& whole, std::size_t offset,
                     std::size_t len) {
  Context part = whole.slice(offset, len);
  std::vector<Term> comps;
  comps.reserve(len);
  for (std::size_t i = 0; i < len; ++i)
    comps.push_back(Term::var(offset + i, whole[offset + i].sort));
  return TermTuple(whole, std::move(part), std::move(comps));
}

TermTuple select(const Context& domain, const Context& codomain,
                 std::span<const std::size_t> indices) {
  if (indices.size() != codomain.size())
    throw StructuralError("select: wrong number of indices");
  std::vector<Term> comps;
  comps.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= domain.size())
      throw StructuralError("select: index out of range");
    comps.push_back(Term::var(i, domain[i].sort));
  }
  return TermTuple(domain, codomain, std::move(comps));
}

Product product(const Context& c, const Context& d) {
  Context both = concat(c, d);
  return Product{both, projection(both, 0, c.size()),
                 projection(both, c.size(), d.size())};
}

// -------------------------------------------------------------- Enumeration

namespace {

// Lexicographic odometer step; false once every combination was visited.
bool advance(std::vector<std::size_t>& idx,
             const std::vector<std::size_t>& limits) {
  for (std::size_t i = idx.size(); i > 0; --i) {
    if (++idx[i - 1] < limits[i - 1])
      return true;
    idx[i - 1] = 0;
  }
  return false;
}

// layers[k][s]: terms of sort s with depth exactly k.
using Layers = std::vector<std::vector<std::vector<Term>>>;

Layers build_layers(const Signature& sig, const Context& ctx,
                    std::size_t max_depth) {
  const std::size_t nsorts = sig.sorts().size();
  Layers layers(max_depth + 1, std::vector<std::vector<Term>>(nsorts));
  for (std::size_t i = 0; i < ctx.size(); ++i)
    layers[0][ctx[i].sort].push_back(Term::var(i, ctx[i].sort));

  for (std::size_t k = 1; k <= max_depth; ++k) {
    // Terms of depth <= k-1, per sort, in order.
    std::vector<std::vector<Term>> below(nsorts);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t s = 0; s < nsorts; ++s)
        below[s].insert(below[s].end(), layers[j][s].begin(),
                        layers[j][s].end());

    for (SymbolId f = 0; f < sig.functions().size(); ++f) {
      const FunctionSymbol& sym = sig.functions()[f];
      if (sym.args.empty()) {
        if (k == 1)
          layers[1][sym.result].push_back(Term::apply(sig, f, {}));
        continue;
      }
      bool inhabited = true;
      for (SortId s : sym.args)
        inhabited = inhabited && !below[s].empty();
      if (!inhabited)
        continue;
      std::vector<std::size_t> limits;
      for (SortId s : sym.args)
        limits.push_back(below[s].size());
      std::vector<std::size_t> idx(sym.args.size(), 0);
      do {
        bool reaches = false;
        for (std::size_t a = 0; a < idx.size(); ++a)
          reaches = reaches || below[sym.args[a]][idx[a]].depth() == k - 1;
        if (!reaches)
          continue;
        std::vector<Term> args;
        args.reserve(idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a)
          args.push_back(below[sym.args[a]][idx[a]]);
        layers[k][sym.result].push_back(Term::apply(sig, f, std::move(args)));
      } while (advance(idx, limits));
    }
  }
  return layers;
}

} // namespace

std::vector<Term> enumerate_terms(const Signature& sig, const Context& ctx,
                                  SortId sort, std::size_t max_depth) {
  if (sort >= sig.sorts().size())
    throw StructuralError("enumerate_terms: unknown sort");
  Layers layers = build_layers(sig, ctx, max_depth);
  std::vector<Term> out;
  for (const auto& layer : layers)
    out.insert(out.end(), layer[sort].begin(), layer[sort].end());
  return out;
}

std::vector<TermTuple> enumerate_tuples(const Signature& sig,
                                        const Context& domain,
                                        const Context& codomain,
                                        std::size_t max_depth) {
  for (const Binding& b : codomain.bindings())
    if (b.sort >= sig.sorts().size())
      throw StructuralError("enumerate_tuples: unknown sort");
  Layers layers = build_layers(sig, domain, max_depth);
  const std::size_t nsorts = sig.sorts().size();
  std::vector<std::vector<Term>> pool(nsorts);
  for (const auto& layer : layers)
    for (std::size_t s = 0; s < nsorts; ++s)
      pool[s].insert(pool[s].end(), layer[s].begin(), layer[s].end());

  std::vector<TermTuple> out;
  const std::size_t n = codomain.size();
  for (std::size_t i = 0; i < n; ++i)
    if (pool[codomain[i].sort].empty())
      return out;

  // Layer by maximal depth; inside a layer, lexicographic odometer order.
  std::vector<std::size_t> limits;
  for (std::size_t i = 0; i < n; ++i)
    limits.push_back(pool[codomain[i].sort].size());
  for (std::size_t k = 0; k <= max_depth; ++k) {
    std::vector<std::size_t> idx(n, 0);
    do {
      std::size_t top = 0;
      for (std::size_t i = 0; i < n; ++i)
        top = std::max(top, pool[codomain[i].sort][idx[i]].depth());
      if (top != k)
        continue;
      std::vector<Term> comps;
      comps.reserve(n);
      for (std::size_t i = 0; i < n; ++i)
        comps.push_back(pool[codomain[i].sort][idx[i]]);
      out.emplace_back(domain, codomain, std::move(comps));
    } while (advance(idx, limits));
  }
  return out;
}

// ----------------------------------------------------------------- Printing

std::string to_string(const Signature& sig, const Context& ctx, const Term& t) {
  if (t.is_var()) {
    if (t.var_index() < ctx.size())
      return ctx[t.var_index()].name;
    return "#" + std::to_string(t.var_index());
  }
  std::string out = sig.function_symbol(t.symbol()).name;
  if (t.args().empty())
    return out;
  out += '(';
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (i > 0)
      out += ", ";
    out += to_string(sig, ctx, t.args()[i]);
  }
  out += ')';
  return out;
}

std::string to_string(const Signature& sig, const Context& ctx) {
  if (ctx.empty())
    return "";
  std::string out = "[";
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (i > 0)
      out += ", ";
    out += ctx[i].name + ":" + sig.sort_name(ctx[i].sort);
  }
  out += ']';
  return out;
}

std::string to_string(const Signature& sig, const TermTuple& f) {
  if (f.size() == 1)
    return to_string(sig, f.domain(), f[0]);
  std::string out = "(";
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i > 0)
      out += ", ";
    out += to_string(sig, f.domain(), f[i]);
  }
  out += ')';
  return out;
}

} // namespace doctrina
