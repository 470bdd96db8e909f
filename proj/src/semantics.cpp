#include "doctrina/semantics.hpp"

#include "doctrina/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstdlib>

namespace doctrina {

namespace {

constexpr Element kUndefined = static_cast<Element>(-1);

std::size_t product_size(const std::vector<std::size_t>& dims) {
  std::size_t n = 1;
  for (std::size_t d : dims)
    n *= d;
  return n;
}

} // namespace

// ---------------------------------------------------------------------------
// FiniteModel

FiniteModel::FiniteModel(std::shared_ptr<const Signature> sig,
                         std::vector<std::size_t> carriers)
    : sig_(std::move(sig)), carriers_(std::move(carriers)) {
  if (carriers_.size() != sig_->sorts().size())
    throw StructuralError("model: one carrier per sort required");
  for (const FunctionSymbol& f : sig_->functions())
    functions_.emplace_back(table_size(f.args), kUndefined);
  for (const RelationSymbol& r : sig_->relations())
    relations_.emplace_back(table_size(r.args), false);
}

std::size_t FiniteModel::table_size(std::span<const SortId> arg_sorts) const {
  std::size_t n = 1;
  for (SortId s : arg_sorts)
    n *= carriers_.at(s);
  return n;
}

std::size_t FiniteModel::index(std::span<const SortId> sorts,
                               std::span<const Element> args) const {
  if (sorts.size() != args.size())
    throw StructuralError("model: arity mismatch");
  std::size_t i = 0;
  for (std::size_t k = 0; k < sorts.size(); ++k) {
    if (args[k] >= carriers_[sorts[k]])
      throw StructuralError("model: element out of range");
    i = i * carriers_[sorts[k]] + args[k];
  }
  return i;
}

Element FiniteModel::apply(SymbolId f, std::span<const Element> args) const {
  Element v = functions_.at(f)[index(sig_->function_symbol(f).args, args)];
  if (v == kUndefined)
    throw StructuralError("model: function '" + sig_->function_symbol(f).name +
                          "' undefined on some argument");
  return v;
}

void FiniteModel::set_function(SymbolId f, std::span<const Element> args, Element value) {
  const FunctionSymbol& sym = sig_->function_symbol(f);
  if (value >= carriers_[sym.result])
    throw StructuralError("model: value out of range for '" + sym.name + "'");
  functions_[f][index(sym.args, args)] = value;
}

bool FiniteModel::holds(SymbolId r, std::span<const Element> args) const {
  return relations_.at(r)[index(sig_->relation_symbol(r).args, args)];
}

void FiniteModel::set_relation(SymbolId r, std::span<const Element> args, bool value) {
  relations_.at(r)[index(sig_->relation_symbol(r).args, args)] = value;
}

Element FiniteModel::function_entry(SymbolId f, std::size_t index) const {
  return functions_.at(f).at(index);
}

void FiniteModel::set_function_entry(SymbolId f, std::size_t index, Element value) {
  functions_.at(f).at(index) = value;
}

bool FiniteModel::relation_entry(SymbolId r, std::size_t index) const {
  return relations_.at(r).at(index);
}

void FiniteModel::set_relation_entry(SymbolId r, std::size_t index, bool value) {
  relations_.at(r).at(index) = value;
}

void FiniteModel::validate() const {
  for (SymbolId f = 0; f < functions_.size(); ++f) {
    const FunctionSymbol& sym = sig_->function_symbol(f);
    for (Element v : functions_[f])
      if (v == kUndefined || v >= carriers_[sym.result])
        throw StructuralError("model: function '" + sym.name + "' is not total");
  }
}

bool operator==(const FiniteModel& a, const FiniteModel& b) {
  return *a.sig_ == *b.sig_ && a.carriers_ == b.carriers_ &&
         a.functions_ == b.functions_ && a.relations_ == b.relations_;
}

// ---------------------------------------------------------------------------
// Subset

Subset::Subset(std::vector<std::size_t> dims, bool full)
    : dims_(std::move(dims)), universe_(product_size(dims_)),
      bits_((universe_ + 63) / 64, 0) {
  if (full) {
    for (std::size_t i = 0; i < universe_; ++i)
      insert(i);
  }
}

std::size_t Subset::count() const {
  std::size_t n = 0;
  for (std::uint64_t w : bits_)
    n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool Subset::contains(std::size_t index) const {
  return index < universe_ && (bits_[index / 64] >> (index % 64) & 1);
}

bool Subset::contains(std::span<const Element> tuple) const {
  return contains(index_of(tuple));
}

void Subset::insert(std::size_t index) {
  if (index >= universe_)
    throw StructuralError("subset: index out of range");
  bits_[index / 64] |= std::uint64_t{1} << (index % 64);
}

void Subset::insert(std::span<const Element> tuple) { insert(index_of(tuple)); }

std::size_t Subset::index_of(std::span<const Element> tuple) const {
  if (tuple.size() != dims_.size())
    throw StructuralError("subset: tuple length mismatch");
  std::size_t i = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (tuple[k] >= dims_[k])
      throw StructuralError("subset: element out of range");
    i = i * dims_[k] + tuple[k];
  }
  return i;
}

std::vector<Element> Subset::tuple_of(std::size_t index) const {
  std::vector<Element> t(dims_.size());
  for (std::size_t k = dims_.size(); k-- > 0;) {
    t[k] = static_cast<Element>(index % dims_[k]);
    index /= dims_[k];
  }
  return t;
}

std::vector<std::vector<Element>> Subset::elements() const {
  std::vector<std::vector<Element>> out;
  for (std::size_t i = 0; i < universe_; ++i)
    if (contains(i))
      out.push_back(tuple_of(i));
  return out;
}

Subset& Subset::operator&=(const Subset& other) {
  if (dims_ != other.dims_)
    throw StructuralError("subset: dimension mismatch");
  for (std::size_t i = 0; i < bits_.size(); ++i)
    bits_[i] &= other.bits_[i];
  return *this;
}

Subset& Subset::operator|=(const Subset& other) {
  if (dims_ != other.dims_)
    throw StructuralError("subset: dimension mismatch");
  for (std::size_t i = 0; i < bits_.size(); ++i)
    bits_[i] |= other.bits_[i];
  return *this;
}

bool Subset::subset_of(const Subset& other) const {
  if (dims_ != other.dims_)
    throw StructuralError("subset: dimension mismatch");
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] & ~other.bits_[i])
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<std::size_t> dims_of(const FiniteModel& m, const Context& ctx) {
  std::vector<std::size_t> dims;
  for (const Binding& b : ctx.bindings())
    dims.push_back(m.carrier(b.sort));
  return dims;
}

Element eval(const FiniteModel& m, const Term& t, std::span<const Element> env) {
  if (t.is_var())
    return env[t.var_index()];
  std::vector<Element> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args())
    args.push_back(eval(m, a, env));
  return m.apply(t.symbol(), args);
}

namespace {

// Values of a term at every tuple of the context product, by index.
std::vector<Element> term_table(const FiniteModel& m, const Term& t,
                                const std::vector<std::size_t>& dims) {
  std::size_t n = product_size(dims);
  std::vector<Element> out(n);
  if (t.is_var()) {
    std::size_t stride = 1;
    for (std::size_t k = dims.size(); k-- > t.var_index() + 1;)
      stride *= dims[k];
    std::size_t radix = dims[t.var_index()];
    for (std::size_t i = 0; i < n; ++i)
      out[i] = static_cast<Element>((i / stride) % radix);
    return out;
  }
  std::vector<std::vector<Element>> args;
  for (const Term& a : t.args())
    args.push_back(term_table(m, a, dims));
  std::vector<Element> point(args.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < args.size(); ++k)
      point[k] = args[k][i];
    out[i] = m.apply(t.symbol(), point);
  }
  return out;
}

Subset eval_rec(const FiniteModel& m, const Formula& phi,
                const std::vector<std::size_t>& dims) {
  switch (phi.kind()) {
  case FormulaKind::True:
    return Subset(dims, true);
  case FormulaKind::False:
    return Subset(dims, false);
  case FormulaKind::Eq: {
    auto l = term_table(m, phi.terms()[0], dims);
    auto r = term_table(m, phi.terms()[1], dims);
    Subset s(dims);
    for (std::size_t i = 0; i < l.size(); ++i)
      if (l[i] == r[i])
        s.insert(i);
    return s;
  }
  case FormulaKind::Rel: {
    std::vector<std::vector<Element>> args;
    for (const Term& t : phi.terms())
      args.push_back(term_table(m, t, dims));
    Subset s(dims);
    std::vector<Element> point(args.size());
    for (std::size_t i = 0; i < s.universe(); ++i) {
      for (std::size_t k = 0; k < args.size(); ++k)
        point[k] = args[k][i];
      if (m.holds(phi.relation_symbol(), point))
        s.insert(i);
    }
    return s;
  }
  case FormulaKind::And: {
    Subset s(dims, true);
    for (std::size_t i = 0; i < phi.child_count(); ++i)
      s &= eval_rec(m, phi.child(i), dims);
    return s;
  }
  case FormulaKind::Or: {
    Subset s(dims, false);
    for (std::size_t i = 0; i < phi.child_count(); ++i)
      s |= eval_rec(m, phi.child(i), dims);
    return s;
  }
  }
  throw StructuralError("eval: unknown formula kind");
}

} // namespace

Subset eval(const FiniteModel& m, const Formula& phi) {
  if (!well_formed(m.signature(), phi))
    throw StructuralError("eval: formula is not over the model's signature");
  return eval_rec(m, phi, dims_of(m, phi.context()));
}

std::vector<std::size_t> eval(const FiniteModel& m, const TermTuple& f) {
  auto dom = dims_of(m, f.domain());
  auto cod = dims_of(m, f.codomain());
  std::vector<std::vector<Element>> comps;
  for (const Term& t : f.components()) {
    if (!well_formed(m.signature(), f.domain(), t))
      throw StructuralError("eval: term is not over the model's signature");
    comps.push_back(term_table(m, t, dom));
  }
  std::size_t n = product_size(dom);
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = 0;
    for (std::size_t k = 0; k < comps.size(); ++k)
      j = j * cod[k] + comps[k][i];
    out[i] = j;
  }
  return out;
}

Subset preimage(const Subset& s, const std::vector<std::size_t>& map,
                std::vector<std::size_t> domain_dims) {
  Subset out(std::move(domain_dims));
  if (map.size() != out.universe())
    throw StructuralError("preimage: map does not match domain");
  for (std::size_t i = 0; i < map.size(); ++i)
    if (s.contains(map[i]))
      out.insert(i);
  return out;
}

Subset image(const Subset& s, const std::vector<std::size_t>& map,
             std::vector<std::size_t> codomain_dims) {
  Subset out(std::move(codomain_dims));
  if (map.size() != s.universe())
    throw StructuralError("image: map does not match domain");
  for (std::size_t i = 0; i < map.size(); ++i)
    if (s.contains(i))
      out.insert(map[i]);
  return out;
}

std::optional<std::vector<Element>> counterexample(const FiniteModel& m,
                                                   const Sequent& s) {
  Subset l = eval(m, s.lhs);
  Subset r = eval(m, s.rhs);
  for (std::size_t i = 0; i < l.universe(); ++i)
    if (l.contains(i) && !r.contains(i))
      return l.tuple_of(i);
  return std::nullopt;
}

std::vector<Violation> violations(const FiniteModel& m, const Theory& t) {
  std::vector<Violation> out;
  for (const Axiom& ax : t.axioms)
    if (auto c = counterexample(m, ax.sequent))
      out.push_back({ax.name, std::move(*c)});
  return out;
}

bool satisfies(const FiniteModel& m, const Sequent& s) {
  return eval(m, s.lhs).subset_of(eval(m, s.rhs));
}

bool satisfies(const FiniteModel& m, const Theory& t) {
  return std::all_of(t.axioms.begin(), t.axioms.end(),
                     [&](const Axiom& ax) { return satisfies(m, ax.sequent); });
}

const Subset& ModelInterpretation::operator()(const Formula& phi) {
  auto it = memo_.find(phi);
  if (it == memo_.end())
    it = memo_.emplace(phi, eval(model_, phi)).first;
  return it->second;
}

// ---------------------------------------------------------------------------
// Enumeration

std::size_t table_bits(const Signature& sig, const std::vector<std::size_t>& carriers) {
  auto size = [&](const std::vector<SortId>& args) {
    std::size_t n = 1;
    for (SortId s : args)
      n *= carriers[s];
    return n;
  };
  std::size_t bits = 0;
  for (const FunctionSymbol& f : sig.functions()) {
    std::size_t n = carriers[f.result];
    std::size_t per = n <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(n - 1));
    bits += size(f.args) * per;
  }
  for (const RelationSymbol& r : sig.relations())
    bits += size(r.args);
  return bits;
}

std::size_t max_table_bits() {
  if (const char* v = std::getenv("DOCTRINA_MAX_TABLE_BITS")) {
    char* end = nullptr;
    unsigned long n = std::strtoul(v, &end, 10);
    if (end != v && *end == '\0')
      return n;
  }
  return 24;
}

ModelStream::ModelStream(std::shared_ptr<const Signature> sig, std::size_t max_size)
    : sig_(std::move(sig)), max_size_(max_size) {
  if (max_size_ == 0)
    throw StructuralError("enumerate_models: max_size must be at least 1");
  std::vector<std::size_t> largest(sig_->sorts().size(), max_size_);
  std::size_t bits = table_bits(*sig_, largest);
  if (bits > max_table_bits())
    throw RefusalError("enumerate_models: " + std::to_string(bits) +
                       " table bits exceed the cap of " +
                       std::to_string(max_table_bits()) +
                       " (set DOCTRINA_MAX_TABLE_BITS to raise it)");
}

void ModelStream::reset_tables() {
  current_.emplace(sig_, sizes_);
  for (SymbolId f = 0; f < sig_->functions().size(); ++f) {
    std::size_t n = current_->table_size(sig_->function_symbol(f).args);
    for (std::size_t i = 0; i < n; ++i)
      current_->set_function_entry(f, i, 0);
  }
}

bool ModelStream::next_tables() {
  FiniteModel& m = *current_;
  for (SymbolId r = static_cast<SymbolId>(sig_->relations().size()); r-- > 0;) {
    std::size_t n = m.table_size(sig_->relation_symbol(r).args);
    for (std::size_t i = n; i-- > 0;) {
      if (!m.relation_entry(r, i)) {
        m.set_relation_entry(r, i, true);
        return true;
      }
      m.set_relation_entry(r, i, false);
    }
  }
  for (SymbolId f = static_cast<SymbolId>(sig_->functions().size()); f-- > 0;) {
    const FunctionSymbol& sym = sig_->function_symbol(f);
    std::size_t n = m.table_size(sym.args);
    Element limit = static_cast<Element>(m.carrier(sym.result));
    for (std::size_t i = n; i-- > 0;) {
      Element v = m.function_entry(f, i);
      if (v + 1 < limit) {
        m.set_function_entry(f, i, v + 1);
        return true;
      }
      m.set_function_entry(f, i, 0);
    }
  }
  return false;
}

bool ModelStream::next_sizes() {
  for (std::size_t k = sizes_.size(); k-- > 0;) {
    if (sizes_[k] < max_size_) {
      ++sizes_[k];
      return true;
    }
    sizes_[k] = 1;
  }
  return false;
}

bool ModelStream::next() {
  if (!started_) {
    started_ = true;
    sizes_.assign(sig_->sorts().size(), 1);
    reset_tables();
    return true;
  }
  if (next_tables())
    return true;
  if (!next_sizes())
    return false;
  reset_tables();
  return true;
}

std::vector<FiniteModel> enumerate_models(std::shared_ptr<const Signature> sig,
                                          std::size_t max_size) {
  std::vector<FiniteModel> out;
  ModelStream stream(std::move(sig), max_size);
  while (stream.next())
    out.push_back(stream.current());
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using json = nlohmann::json;

Element element(const json& j, std::size_t carrier, const std::string& what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    throw Error("model JSON: " + what + ": expected a non-negative integer");
  auto v = j.get<unsigned long long>();
  if (v >= carrier)
    throw Error("model JSON: " + what + ": element " + std::to_string(v) +
                " out of range");
  return static_cast<Element>(v);
}

std::vector<Element> row(const json& j, const std::vector<SortId>& sorts,
                         const FiniteModel& m, const std::string& what) {
  if (!j.is_array() || j.size() != sorts.size())
    throw Error("model JSON: " + what + ": expected a tuple of length " +
                std::to_string(sorts.size()));
  std::vector<Element> out;
  for (std::size_t k = 0; k < sorts.size(); ++k)
    out.push_back(element(j[k], m.carrier(sorts[k]), what));
  return out;
}

} // namespace

FiniteModel model_from_json(std::shared_ptr<const Signature> sig, std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("model JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("carriers") || !j["carriers"].is_object())
    throw Error("model JSON: missing \"carriers\" object");
  std::vector<std::size_t> carriers(sig->sorts().size());
  std::vector<bool> seen(carriers.size(), false);
  for (auto& [name, value] : j["carriers"].items()) {
    auto s = sig->find_sort(name);
    if (!s)
      throw Error("model JSON: unknown sort '" + name + "'");
    if (!value.is_number_integer() || value.get<long long>() < 0)
      throw Error("model JSON: carrier of '" + name + "' must be a non-negative integer");
    carriers[*s] = value.get<std::size_t>();
    seen[*s] = true;
  }
  for (SortId s = 0; s < seen.size(); ++s)
    if (!seen[s])
      throw Error("model JSON: no carrier for sort '" + sig->sort_name(s) + "'");

  FiniteModel m(sig, carriers);
  if (j.contains("functions")) {
    if (!j["functions"].is_object())
      throw Error("model JSON: \"functions\" must be an object");
    for (auto& [name, table] : j["functions"].items()) {
      auto f = sig->find_function(name);
      if (!f)
        throw Error("model JSON: unknown function '" + name + "'");
      const FunctionSymbol& sym = sig->function_symbol(*f);
      if (sym.args.empty() && table.is_number()) {
        m.set_function(*f, {}, element(table, m.carrier(sym.result), name));
        continue;
      }
      if (!table.is_array())
        throw Error("model JSON: table of '" + name + "' must be an array");
      std::vector<SortId> sorts = sym.args;
      sorts.push_back(sym.result);
      for (const json& r : table) {
        auto t = row(r, sorts, m, name);
        Element v = t.back();
        t.pop_back();
        m.set_function(*f, t, v);
      }
    }
  }
  if (j.contains("relations")) {
    if (!j["relations"].is_object())
      throw Error("model JSON: \"relations\" must be an object");
    for (auto& [name, tuples] : j["relations"].items()) {
      auto r = sig->find_relation(name);
      if (!r)
        throw Error("model JSON: unknown relation '" + name + "'");
      if (!tuples.is_array())
        throw Error("model JSON: relation '" + name + "' must be an array of tuples");
      for (const json& t : tuples)
        m.set_relation(*r, row(t, sig->relation_symbol(*r).args, m, name), true);
    }
  }
  try {
    m.validate();
  } catch (const StructuralError& e) {
    throw Error(std::string("model JSON: ") + e.what());
  }
  return m;
}

std::string model_to_json(const FiniteModel& m) {
  using ojson = nlohmann::ordered_json;
  const Signature& sig = m.signature();
  ojson out;
  ojson carriers = ojson::object();
  for (SortId s = 0; s < sig.sorts().size(); ++s)
    carriers[sig.sort_name(s)] = m.carrier(s);
  out["carriers"] = carriers;
  ojson functions = ojson::object();
  for (SymbolId f = 0; f < sig.functions().size(); ++f) {
    const FunctionSymbol& sym = sig.function_symbol(f);
    if (sym.args.empty()) {
      functions[sym.name] = m.function_entry(f, 0);
      continue;
    }
    std::vector<std::size_t> dims;
    for (SortId s : sym.args)
      dims.push_back(m.carrier(s));
    Subset all(dims, true);
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < all.universe(); ++i) {
      ojson r = ojson::array();
      for (Element e : all.tuple_of(i))
        r.push_back(e);
      r.push_back(m.function_entry(f, i));
      rows.push_back(r);
    }
    functions[sym.name] = rows;
  }
  out["functions"] = functions;
  ojson relations = ojson::object();
  for (SymbolId r = 0; r < sig.relations().size(); ++r) {
    const RelationSymbol& sym = sig.relation_symbol(r);
    std::vector<std::size_t> dims;
    for (SortId s : sym.args)
      dims.push_back(m.carrier(s));
    Subset all(dims, true);
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < all.universe(); ++i) {
      if (!m.relation_entry(r, i))
        continue;
      ojson t = ojson::array();
      for (Element e : all.tuple_of(i))
        t.push_back(e);
      rows.push_back(t);
    }
    relations[sym.name] = rows;
  }
  out["relations"] = relations;
  return out.dump(2);
}

} // namespace doctrina
