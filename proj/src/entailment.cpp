#include "doctrina/entailment.hpp"

#include "doctrina/error.hpp"
#include "fact_store.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <unordered_set>

namespace doctrina {

namespace {

using detail::FactStore;
using detail::kUnbound;
using detail::NodeId;

struct Atom {
  bool eq = false;
  SymbolId rel = 0;
  std::vector<Term> terms;
};

using Clause = std::vector<Atom>;
using Subst = std::vector<NodeId>;

std::vector<Clause> clauses_of(const Formula& phi) {
  std::vector<Clause> out;
  for (const auto& clause : dnf(phi)) {
    Clause c;
    for (const Formula& a : clause)
      c.push_back(Atom{a.kind() == FormulaKind::Eq,
                       a.kind() == FormulaKind::Rel ? a.relation_symbol() : 0,
                       a.terms()});
    out.push_back(std::move(c));
  }
  return out;
}

struct Rule {
  const Axiom* axiom;
  Clause body; // relation atoms first
  std::vector<Clause> head;
  std::vector<bool> used; // per axiom variable: occurs in body or head
};

void mark_vars(const Term& t, std::vector<bool>& used) {
  if (t.is_var()) {
    used[t.var_index()] = true;
    return;
  }
  for (const Term& a : t.args())
    mark_vars(a, used);
}

void mark_vars(const Clause& c, std::vector<bool>& used) {
  for (const Atom& a : c)
    for (const Term& t : a.terms)
      mark_vars(t, used);
}

std::vector<Rule> compile(const Theory& theory) {
  std::vector<Rule> rules;
  for (const Axiom& ax : theory.axioms) {
    std::vector<Clause> head = clauses_of(ax.sequent.rhs);
    bool trivial = std::any_of(head.begin(), head.end(),
                               [](const Clause& c) { return c.empty(); });
    if (trivial)
      continue;
    for (Clause body : clauses_of(ax.sequent.lhs)) {
      std::stable_partition(body.begin(), body.end(),
                            [](const Atom& a) { return !a.eq; });
      std::vector<bool> used(ax.sequent.context.size(), false);
      mark_vars(body, used);
      for (const Clause& h : head)
        mark_vars(h, used);
      rules.push_back(Rule{&ax, std::move(body), head, std::move(used)});
    }
  }
  return rules;
}

bool all_bound(const Term& t, const Subst& s) {
  if (t.is_var())
    return s[t.var_index()] != kUnbound;
  return std::all_of(t.args().begin(), t.args().end(),
                     [&](const Term& a) { return all_bound(a, s); });
}

bool holds(const FactStore& st, const Atom& atom, const Subst& env) {
  if (atom.eq) {
    if (atom.terms[0] == atom.terms[1])
      return true;
    auto a = st.lookup(atom.terms[0], env);
    auto b = st.lookup(atom.terms[1], env);
    return a && b && *a == *b;
  }
  std::vector<NodeId> args;
  args.reserve(atom.terms.size());
  for (const Term& t : atom.terms) {
    auto n = st.lookup(t, env);
    if (!n)
      return false;
    args.push_back(*n);
  }
  return st.has_fact(atom.rel, args);
}

bool holds(const FactStore& st, const Clause& clause, const Subst& env) {
  return std::all_of(clause.begin(), clause.end(),
                     [&](const Atom& a) { return holds(st, a, env); });
}

/// Adds the atoms of `clause`; true if the store changed.
bool apply(FactStore& st, const Clause& clause, const Subst& env) {
  bool changed = false;
  for (const Atom& atom : clause) {
    if (atom.eq) {
      NodeId a = st.add(atom.terms[0], env);
      NodeId b = st.add(atom.terms[1], env);
      if (st.find(a) != st.find(b)) {
        st.merge(a, b);
        changed = true;
      }
    } else {
      std::vector<NodeId> args;
      args.reserve(atom.terms.size());
      for (const Term& t : atom.terms)
        args.push_back(st.add(t, env));
      changed = st.add_fact(atom.rel, args) || changed;
    }
  }
  return changed;
}

void seed(FactStore& st, const Clause& clause, const Subst& env) {
  for (const Atom& atom : clause)
    for (const Term& t : atom.terms)
      st.add(t, env);
}

/// All substitutions (as class roots) under which a rule body holds in a
/// closed store, deduplicated, in discovery order.
class Matcher {
public:
  Matcher(const FactStore& st, const Rule& rule)
      : st_(st), rule_(rule),
        subst_(rule.axiom->sequent.context.size(), kUnbound) {}

  std::vector<Subst> run() {
    atoms(0);
    return std::move(out_);
  }

private:
  using Next = std::function<void()>;

  void term(const Term& p, NodeId cls, const Next& next) {
    if (p.is_var()) {
      NodeId& slot = subst_[p.var_index()];
      if (slot == kUnbound) {
        if (st_.node(cls).sort != p.sort())
          return;
        slot = cls;
        next();
        slot = kUnbound;
      } else if (st_.find(slot) == cls) {
        next();
      }
      return;
    }
    if (all_bound(p, subst_)) {
      auto n = st_.lookup(p, subst_);
      if (n && *n == cls)
        next();
      return;
    }
    for (NodeId m : st_.members(cls)) {
      const auto& node = st_.node(m);
      if (node.head != p.symbol())
        continue;
      args(p, node.args, 0, next);
    }
  }

  void args(const Term& p, const std::vector<NodeId>& nodes, std::size_t j,
            const Next& next) {
    if (j == nodes.size()) {
      next();
      return;
    }
    term(p.args()[j], st_.find(nodes[j]),
         [&] { args(p, nodes, j + 1, next); });
  }

  void atoms(std::size_t k) {
    if (k == rule_.body.size()) {
      free_vars(0);
      return;
    }
    const Atom& atom = rule_.body[k];
    if (!atom.eq) {
      for (const auto& fact : st_.facts_of(atom.rel))
        fact_args(atom, fact, 0, k);
      return;
    }
    const Term& l = atom.terms[0];
    const Term& r = atom.terms[1];
    if (all_bound(l, subst_) && all_bound(r, subst_)) {
      if (holds(st_, atom, subst_))
        atoms(k + 1);
      return;
    }
    for (NodeId c : st_.classes_of_sort(l.sort()))
      term(l, c, [&] { term(r, c, [&] { atoms(k + 1); }); });
  }

  void fact_args(const Atom& atom, const std::vector<NodeId>& fact,
                 std::size_t j, std::size_t k) {
    if (j == fact.size()) {
      atoms(k + 1);
      return;
    }
    term(atom.terms[j], fact[j], [&] { fact_args(atom, fact, j + 1, k); });
  }

  void free_vars(std::size_t v) {
    if (v == subst_.size()) {
      Subst s(subst_.size());
      for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = st_.find(subst_[i]);
      if (seen_.insert(s).second)
        out_.push_back(std::move(s));
      return;
    }
    if (subst_[v] != kUnbound) {
      free_vars(v + 1);
      return;
    }
    // A variable occurring nowhere can take any value of its sort; one
    // instance suffices.
    const auto& classes = st_.classes_of_sort(rule_.axiom->sequent.context[v].sort);
    for (NodeId c : classes) {
      subst_[v] = c;
      free_vars(v + 1);
      if (!rule_.used[v])
        break;
    }
    subst_[v] = kUnbound;
  }

  const FactStore& st_;
  const Rule& rule_;
  Subst subst_;
  std::unordered_set<Subst, FactStore::KeyHash> seen_;
  std::vector<Subst> out_;
};

/// Builds the root store: sequent variables as constants plus every term of
/// the sequent.
struct Seeded {
  FactStore store;
  Subst env;
  std::vector<Clause> lhs;
  std::vector<std::vector<Clause>> goal; // per top-level disjunct of rhs
};

Seeded seed_sequent(const Theory& theory, const Sequent& sequent) {
  if (!well_formed(theory.signature, sequent.lhs) ||
      !well_formed(theory.signature, sequent.rhs))
    throw StructuralError("sequent is not well-formed over the signature");
  Seeded s{FactStore(theory.signature), {}, clauses_of(sequent.lhs), {}};
  for (std::size_t i = 0; i < sequent.context.size(); ++i)
    s.env.push_back(s.store.add_var(i, sequent.context[i].sort));
  for (const Formula& d : disjuncts(sequent.rhs))
    s.goal.push_back(clauses_of(d));
  for (const Clause& c : s.lhs)
    seed(s.store, c, s.env);
  for (const auto& d : s.goal)
    for (const Clause& c : d)
      seed(s.store, c, s.env);
  s.store.close();
  return s;
}

std::optional<std::size_t> goal_index(const FactStore& st,
                                      const std::vector<std::vector<Clause>>& goal,
                                      const Subst& env) {
  for (std::size_t i = 0; i < goal.size(); ++i)
    for (const Clause& c : goal[i])
      if (holds(st, c, env))
        return i;
  return std::nullopt;
}

TermTuple instance_of(const FactStore& st, const Sequent& sequent,
                      const Context& axiom_ctx, const Subst& subst) {
  std::vector<Term> comps;
  comps.reserve(subst.size());
  for (NodeId n : subst)
    comps.push_back(st.term_of(n));
  return TermTuple(sequent.context, axiom_ctx, std::move(comps));
}

std::string child_id(const std::string& id, std::size_t k) {
  return id + "." + std::to_string(k);
}

class Chase {
public:
  Chase(const Theory& theory, const Sequent& sequent,
        const SaturationBudget& budget)
      : theory_(theory), sequent_(sequent), budget_(budget),
        rules_(compile(theory)), seeded_(seed_sequent(theory, sequent)) {
    fresh_limit_ = seeded_.store.node_count() + budget.fresh_terms;
  }

  EntailmentVerdict run() {
    EntailmentVerdict v;
    const auto& lhs = seeded_.lhs;
    bool closed = true;
    if (lhs.size() == 1) {
      FactStore root = seeded_.store;
      apply(root, lhs[0], seeded_.env);
      closed = explore(std::move(root), "0", 0, 0);
    } else if (lhs.size() > 1) {
      trace_.push_back({"@lhs", identity(sequent_.context), "0"});
      for (std::size_t k = 0; k < lhs.size() && closed; ++k) {
        FactStore child = seeded_.store;
        apply(child, lhs[k], seeded_.env);
        closed = explore(std::move(child), child_id("0", k), 0, 0);
      }
    }
    v.status = closed ? EntailmentStatus::Proved : EntailmentStatus::Unknown;
    v.trace = std::move(trace_);
    v.bound_used = max_rounds_;
    v.used_disjuncts.assign(used_.begin(), used_.end());
    return v;
  }

private:
  struct Pending {
    const Rule* rule;
    Subst subst;
  };

  // True when the branch closed; false means some budget ran out or the
  // branch saturated without reaching the goal.
  bool explore(FactStore st, const std::string& id, std::size_t splits,
               std::size_t rounds) {
    for (;;) {
      st.close();
      max_rounds_ = std::max(max_rounds_, rounds);
      if (st.contradiction())
        return true;
      if (auto g = goal_index(st, seeded_.goal, seeded_.env)) {
        used_.insert(*g);
        return true;
      }
      if (rounds >= budget_.rounds)
        return false;
      ++rounds;
      max_rounds_ = std::max(max_rounds_, rounds);

      std::vector<std::pair<const Rule*, std::vector<Subst>>> matches;
      for (const Rule& rule : rules_)
        matches.emplace_back(&rule, Matcher(st, rule).run());

      bool changed = false;
      std::vector<Pending> pending;
      for (auto& [rule, substs] : matches) {
        for (Subst& s : substs) {
          if (rule->head.empty()) {
            record(*rule, s, st, id);
            st.set_contradiction();
            return true;
          }
          if (rule->head.size() == 1) {
            if (holds(st, rule->head[0], s))
              continue;
            TermTuple inst = instance_of(st, sequent_, rule->axiom->sequent.context, s);
            if (apply(st, rule->head[0], s)) {
              trace_.push_back({rule->axiom->name, std::move(inst), id});
              changed = true;
            }
            if (st.node_count() > fresh_limit_)
              return false;
          } else {
            pending.push_back({rule, std::move(s)});
          }
        }
      }

      st.close();
      if (st.contradiction())
        return true;
      if (auto g = goal_index(st, seeded_.goal, seeded_.env)) {
        used_.insert(*g);
        return true;
      }

      const Pending* split = nullptr;
      for (const Pending& p : pending) {
        bool satisfied = std::any_of(
            p.rule->head.begin(), p.rule->head.end(),
            [&](const Clause& c) { return holds(st, c, p.subst); });
        if (!satisfied) {
          split = &p;
          break;
        }
      }
      if (split) {
        if (splits >= budget_.split_depth)
          return false;
        record(*split->rule, split->subst, st, id);
        for (std::size_t k = 0; k < split->rule->head.size(); ++k) {
          FactStore child = st;
          apply(child, split->rule->head[k], split->subst);
          if (child.node_count() > fresh_limit_)
            return false;
          if (!explore(std::move(child), child_id(id, k), splits + 1, rounds))
            return false;
        }
        return true;
      }
      if (!changed)
        return false;
    }
  }

  void record(const Rule& rule, const Subst& s, const FactStore& st,
              const std::string& id) {
    trace_.push_back({rule.axiom->name,
                      instance_of(st, sequent_, rule.axiom->sequent.context, s),
                      id});
  }

  const Theory& theory_;
  const Sequent& sequent_;
  SaturationBudget budget_;
  std::vector<Rule> rules_;
  Seeded seeded_;
  std::size_t fresh_limit_ = 0;
  std::vector<TraceStep> trace_;
  std::set<std::size_t> used_;
  std::size_t max_rounds_ = 0;
};

class Replayer {
public:
  Replayer(const Theory& theory, const Sequent& sequent,
           const std::vector<TraceStep>& trace)
      : theory_(theory), sequent_(sequent), trace_(trace),
        seeded_(seed_sequent(theory, sequent)) {}

  bool run() {
    const auto& lhs = seeded_.lhs;
    bool ok = true;
    if (lhs.size() == 1) {
      FactStore root = seeded_.store;
      apply(root, lhs[0], seeded_.env);
      ok = branch(std::move(root), "0");
    } else if (lhs.size() > 1) {
      if (trace_.empty() || trace_[0].axiom != "@lhs" || trace_[0].branch != "0")
        return false;
      pos_ = 1;
      for (std::size_t k = 0; k < lhs.size() && ok; ++k) {
        FactStore child = seeded_.store;
        apply(child, lhs[k], seeded_.env);
        ok = branch(std::move(child), child_id("0", k));
      }
    }
    return ok && pos_ == trace_.size();
  }

private:
  bool branch(FactStore st, const std::string& id) {
    while (pos_ < trace_.size() && trace_[pos_].branch == id) {
      const TraceStep& step = trace_[pos_++];
      const Axiom* ax = theory_.find_axiom(step.axiom);
      if (!ax)
        return false;
      if (!step.instance.domain().same_shape(sequent_.context) ||
          !step.instance.codomain().same_shape(ax->sequent.context))
        return false;
      Subst env;
      for (const Term& t : step.instance.components()) {
        if (!well_formed(theory_.signature, sequent_.context, t))
          return false;
        env.push_back(st.add(t, seeded_.env));
      }
      st.close();
      auto body = clauses_of(ax->sequent.lhs);
      bool fires = std::any_of(body.begin(), body.end(), [&](const Clause& c) {
        return holds(st, c, env);
      });
      if (!fires)
        return false;
      auto head = clauses_of(ax->sequent.rhs);
      if (head.empty()) {
        st.set_contradiction();
        continue;
      }
      if (head.size() == 1) {
        apply(st, head[0], env);
        continue;
      }
      for (std::size_t k = 0; k < head.size(); ++k) {
        FactStore child = st;
        apply(child, head[k], env);
        if (!branch(std::move(child), child_id(id, k)))
          return false;
      }
      return true;
    }
    st.close();
    return st.contradiction() ||
           goal_index(st, seeded_.goal, seeded_.env).has_value();
  }

  const Theory& theory_;
  const Sequent& sequent_;
  const std::vector<TraceStep>& trace_;
  Seeded seeded_;
  std::size_t pos_ = 0;
};

thread_local std::vector<ProofObserver> observers;

} // namespace

EntailmentVerdict entails(const Theory& theory, const Sequent& sequent,
                          const SaturationBudget& budget) {
  EntailmentVerdict v = Chase(theory, sequent, budget).run();
  if (v.proved())
    for (const auto& obs : observers)
      obs(theory, sequent, v);
  return v;
}

bool replay(const Theory& theory, const Sequent& sequent,
            const std::vector<TraceStep>& trace) {
  return Replayer(theory, sequent, trace).run();
}

ScopedProofObserver::ScopedProofObserver(ProofObserver observer) {
  observers.push_back(std::move(observer));
}

ScopedProofObserver::~ScopedProofObserver() { observers.pop_back(); }

} // namespace doctrina
