#include "doctrina/completion.hpp"

#include "doctrina/error.hpp"

#include <algorithm>
#include <numeric>

namespace doctrina {

namespace {

Context whole(const ExPair& p, const Context& base) { return concat(p.witness, base); }

std::vector<std::size_t> range(std::size_t from, std::size_t len) {
  std::vector<std::size_t> out(len);
  std::iota(out.begin(), out.end(), from);
  return out;
}

// Pulls `phi` (over `target`) back along the variable tuple picking
// `indices` of `domain`.
Formula pull(const Formula& phi, const Context& domain,
             const std::vector<std::size_t>& indices) {
  return substitute(phi, select(domain, phi.context(), indices));
}

void require_same_base(const ExElement& a, const ExElement& b, const char* op) {
  if (!a.base().same_shape(b.base()))
    throw StructuralError(std::string(op) + ": elements live over different contexts");
}

} // namespace

ExElement::ExElement(Context base, std::vector<ExPair> pairs) : base_(std::move(base)) {
  for (ExPair& p : pairs) {
    Context w = concat(p.witness, base_);
    if (!p.body.context().same_shape(w))
      throw StructuralError("existential element: body is not over witness ++ base");
    ExPair q{p.witness, normalize(p.body.with_context(w))};
    bool dup = std::any_of(pairs_.begin(), pairs_.end(), [&](const ExPair& r) {
      return r.witness.same_shape(q.witness) && r.body == q.body;
    });
    if (!dup)
      pairs_.push_back(std::move(q));
  }
}

bool operator==(const ExElement& a, const ExElement& b) {
  if (!a.base_.same_shape(b.base_) || a.pairs_.size() != b.pairs_.size())
    return false;
  for (std::size_t i = 0; i < a.pairs_.size(); ++i)
    if (!a.pairs_[i].witness.same_shape(b.pairs_[i].witness) ||
        !(a.pairs_[i].body == b.pairs_[i].body))
      return false;
  return true;
}

bool is_horn(const ExElement& a) {
  return a.size() == 1 && is_horn(a.pairs()[0].body);
}

std::string to_string(const Signature& sig, const ExElement& a) {
  std::string out = "{";
  for (std::size_t i = 0; i < a.size(); ++i) {
    const ExPair& p = a.pairs()[i];
    out += i ? "; " : " ";
    out += (p.witness.empty() ? "[]" : to_string(sig, p.witness)) + " " + to_string(sig, p.body);
  }
  out += a.empty() ? "}" : " }";
  return out;
}

LeqResult leq(const Theory& t, const ExElement& a, const ExElement& b,
              std::size_t depth, const SaturationBudget& budget) {
  require_same_base(a, b, "leq");
  const Context& c = a.base();
  LeqResult result;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const ExPair& left = a.pairs()[i];
    Context dom = left.body.context();
    TermTuple pi_c = projection(dom, left.witness.size(), c.size());

    struct Candidate {
      std::size_t target;
      TermTuple arrow;
    };
    std::vector<Candidate> candidates;
    std::vector<Formula> pulled;
    std::vector<std::size_t> owner; // top-level disjunct -> candidate
    for (std::size_t j = 0; j < b.size(); ++j) {
      const ExPair& right = b.pairs()[j];
      for (const TermTuple& tup : enumerate_tuples(t.signature, dom, right.witness, depth)) {
        std::vector<Term> comps = tup.components();
        comps.insert(comps.end(), pi_c.components().begin(), pi_c.components().end());
        TermTuple r(dom, right.body.context(), std::move(comps));
        Formula y = substitute(right.body, r);
        for (std::size_t k = disjuncts(y).size(); k > 0; --k)
          owner.push_back(candidates.size());
        candidates.push_back({j, r});
        pulled.push_back(y);
      }
    }
    Sequent s(dom, left.body, Formula::disj(dom, pulled));
    EntailmentVerdict v = entails(t, s, budget);
    if (!v.proved())
      return LeqResult{};
    std::vector<std::size_t> used;
    for (std::size_t d : v.used_disjuncts)
      used.push_back(owner[d]);
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    LeqPairWitness w{i, {}, s, std::move(v.trace)};
    for (std::size_t k : used)
      w.arrows.push_back({candidates[k].target, candidates[k].arrow});
    result.pairs.push_back(std::move(w));
  }
  result.status = EntailmentStatus::Proved;
  return result;
}

ExElement top(const Context& c) { return unit(Formula::truth(c)); }

ExElement bottom(const Context& c) { return ExElement(c, {}); }

ExElement unit(const Formula& phi) {
  return ExElement(phi.context(), {ExPair{Context(), phi}});
}

ExElement meet(const Theory&, const ExElement& a, const ExElement& b) {
  require_same_base(a, b, "meet");
  const Context& c = a.base();
  std::vector<ExPair> pairs;
  for (const ExPair& x : a.pairs()) {
    for (const ExPair& y : b.pairs()) {
      std::size_t nd = x.witness.size(), ne = y.witness.size();
      Context w = concat(x.witness, y.witness);
      Context all = concat(w, c);
      std::vector<std::size_t> xi = range(0, nd);
      std::vector<std::size_t> yi = range(nd, ne);
      for (std::size_t k = 0; k < c.size(); ++k) {
        xi.push_back(nd + ne + k);
        yi.push_back(nd + ne + k);
      }
      Formula body = Formula::conj(pull(x.body.with_context(whole(x, c)), all, xi),
                                   pull(y.body.with_context(whole(y, c)), all, yi));
      pairs.push_back({w, body});
    }
  }
  return ExElement(c, std::move(pairs));
}

ExElement join(const Theory& t, const ExElement& a, const ExElement& b) {
  if (t.fragment == Fragment::Horn)
    throw FragmentError("join is not available over a Horn theory");
  require_same_base(a, b, "join");
  std::vector<ExPair> pairs = a.pairs();
  pairs.insert(pairs.end(), b.pairs().begin(), b.pairs().end());
  return ExElement(a.base(), std::move(pairs));
}

ExElement subst_ex(const ExElement& a, const TermTuple& f) {
  if (!f.codomain().same_shape(a.base()))
    throw StructuralError("subst_ex: tuple codomain differs from the element's base");
  const Context& c2 = f.domain();
  std::vector<ExPair> pairs;
  for (const ExPair& p : a.pairs()) {
    std::size_t nd = p.witness.size();
    Context dom = concat(p.witness, c2);
    std::vector<Term> comps = projection(dom, 0, nd).components();
    TermTuple g = compose(f, projection(dom, nd, c2.size()));
    comps.insert(comps.end(), g.components().begin(), g.components().end());
    TermTuple along(dom, p.body.context(), std::move(comps));
    pairs.push_back({p.witness, substitute(p.body, along)});
  }
  return ExElement(c2, std::move(pairs));
}

ExElement exists_along(const ExElement& a, const Context& d) {
  const Context& base = a.base();
  if (base.size() < d.size() || !base.slice(0, d.size()).same_shape(d))
    throw StructuralError("exists_along: base context does not start with the bound context");
  Context c = base.slice(d.size(), base.size() - d.size());
  std::vector<ExPair> pairs;
  for (const ExPair& p : a.pairs()) {
    Context w = concat(p.witness, d);
    pairs.push_back({w, p.body.with_context(concat(w, c))});
  }
  return ExElement(c, std::move(pairs));
}

Formula delta(const Context& d) {
  Context dd = concat(d, d);
  std::vector<Formula> eqs;
  for (std::size_t i = 0; i < d.size(); ++i)
    eqs.push_back(Formula::equal(dd, Term::var(i, d[i].sort),
                                 Term::var(d.size() + i, d[i].sort)));
  return Formula::conj(dd, std::move(eqs));
}

TermTuple diagonal(const Context& d) {
  std::vector<std::size_t> idx = range(0, d.size());
  std::vector<std::size_t> twice = idx;
  twice.insert(twice.end(), idx.begin(), idx.end());
  return select(d, concat(d, d), twice);
}

ExElement equality_predicate(const Context& d, const Context& c) {
  Context all = concat(c, concat(d, d));
  Formula body = pull(delta(d), all, range(c.size(), 2 * d.size()));
  return ExElement(all, {ExPair{Context(), body}});
}

Subset extend_morphism(ModelInterpretation& m, const ExElement& a) {
  const FiniteModel& model = m.model();
  std::vector<std::size_t> cdims = dims_of(model, a.base());
  Subset out(cdims);
  std::size_t csize = out.universe();
  for (const ExPair& p : a.pairs()) {
    const Subset& s = m(p.body);
    // Tuple indices are mixed radix with the witness block most
    // significant, so projecting onto c keeps the remainder.
    std::vector<std::size_t> map(s.universe());
    for (std::size_t i = 0; i < map.size(); ++i)
      map[i] = i % csize;
    out |= image(s, map, cdims);
  }
  return out;
}

} // namespace doctrina
