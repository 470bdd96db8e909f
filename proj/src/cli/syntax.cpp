#include "doctrina/cli.hpp"

#include "doctrina/error.hpp"

#include <cctype>
#include <map>
#include <set>

namespace doctrina::cli {

namespace {

// ------------------------------------------------------------------ lexer

enum class Tok {
  Name, Colon, Arrow, Star, Turnstile, And, Or, Not, LParen, RParen,
  LBracket, RBracket, Comma, Dot, Equals, LBrace, RBrace, Semi, End
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

const std::set<std::string, std::less<>> kKeywords = {
    "sort", "const", "fn", "rel", "axiom", "goal", "logic",
    "true", "false", "exists", "forall"};

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  static const std::pair<std::string_view, Tok> symbols[] = {
      {"|-", Tok::Turnstile}, {"->", Tok::Arrow}, {"/\\", Tok::And}, {"\\/", Tok::Or},
      {":", Tok::Colon},      {"*", Tok::Star},   {"~", Tok::Not},   {"(", Tok::LParen},
      {")", Tok::RParen},     {"[", Tok::LBracket}, {"]", Tok::RBracket}, {",", Tok::Comma},
      {".", Tok::Dot},        {"=", Tok::Equals}, {"{", Tok::LBrace}, {"}", Tok::RBrace},
      {";", Tok::Semi}};
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n')
        advance(1);
      continue;
    }
    if (name_start(c)) {
      std::size_t j = i;
      while (j < text.size() && name_char(text[j]))
        ++j;
      out.push_back({Tok::Name, std::string(text.substr(i, j - i)), line, col});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const auto& [sym, kind] : symbols) {
      if (text.substr(i, sym.size()) == sym) {
        out.push_back({kind, std::string(sym), line, col});
        advance(sym.size());
        matched = true;
        break;
      }
    }
    if (!matched)
      throw ParseError("unexpected character", line, col, std::string(1, c));
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

// -------------------------------------------------------------------- AST

struct TermAst {
  Token at;
  bool call = false;
  std::vector<TermAst> args;
};

struct FormAst {
  enum class Kind { True, False, Eq, Pred, And, Or, Not };
  Kind kind;
  Token at;
  std::vector<TermAst> terms; // Eq: both sides; Pred: the atom as a term
  std::vector<FormAst> kids;
};

struct BinderAst {
  Token name;
  Token sort;
};

// ----------------------------------------------------------------- parser

class Parser {
public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1)
      ++pos_;
    return t;
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_keyword(std::string_view kw) const { return at(Tok::Name) && peek().text == kw; }
  bool accept(Tok k) {
    if (!at(k))
      return false;
    next();
    return true;
  }

  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw ParseError(msg, t.line, t.column, t.kind == Tok::End ? "end of input" : t.text);
  }

  Token expect(Tok k, const std::string& what) {
    if (!at(k))
      fail(peek(), "expected " + what);
    return next();
  }
  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw))
      fail(peek(), "expected '" + std::string(kw) + "'");
    next();
  }
  Token name(const std::string& what) {
    Token t = expect(Tok::Name, what);
    if (kKeywords.count(t.text))
      fail(t, "keyword used as " + what);
    return t;
  }

  TermAst term() {
    TermAst t{name("a term"), false, {}};
    if (accept(Tok::LParen)) {
      t.call = true;
      do
        t.args.push_back(term());
      while (accept(Tok::Comma));
      expect(Tok::RParen, "')'");
    }
    return t;
  }

  FormAst formula() { return nary(FormAst::Kind::Or, Tok::Or); }

  std::vector<BinderAst> binders() {
    std::vector<BinderAst> out;
    do {
      Token n = name("a variable name");
      expect(Tok::Colon, "':'");
      out.push_back({n, name("a sort name")});
    } while (accept(Tok::Comma));
    return out;
  }

  /// "[" binders? "]"
  std::vector<BinderAst> context() {
    expect(Tok::LBracket, "'['");
    std::vector<BinderAst> out;
    if (!at(Tok::RBracket))
      out = binders();
    expect(Tok::RBracket, "']'");
    return out;
  }

  std::vector<BinderAst> optional_context() {
    return at(Tok::LBracket) ? context() : std::vector<BinderAst>{};
  }

  void finish() {
    if (!at(Tok::End))
      fail(peek(), "unexpected input");
  }

private:
  FormAst nary(FormAst::Kind kind, Tok op) {
    Token start = peek();
    std::vector<FormAst> parts;
    auto add = [&](FormAst f) {
      if (f.kind == kind) {
        for (FormAst& k : f.kids)
          parts.push_back(std::move(k));
      } else {
        parts.push_back(std::move(f));
      }
    };
    add(kind == FormAst::Kind::Or ? nary(FormAst::Kind::And, Tok::And) : unary());
    if (!at(op))
      return parts.size() == 1 ? std::move(parts[0]) : FormAst{kind, start, {}, std::move(parts)};
    while (accept(op))
      add(kind == FormAst::Kind::Or ? nary(FormAst::Kind::And, Tok::And) : unary());
    return FormAst{kind, start, {}, std::move(parts)};
  }

  FormAst unary() {
    if (at(Tok::Not)) {
      Token t = next();
      return FormAst{FormAst::Kind::Not, t, {}, {unary()}};
    }
    if (at_keyword("true"))
      return FormAst{FormAst::Kind::True, next(), {}, {}};
    if (at_keyword("false"))
      return FormAst{FormAst::Kind::False, next(), {}, {}};
    if (at(Tok::LParen)) {
      next();
      FormAst f = formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (!at(Tok::Name))
      fail(peek(), "expected a formula");
    TermAst lhs = term();
    if (at(Tok::Equals)) {
      Token eq = next();
      TermAst rhs = term();
      (void)eq;
      return FormAst{FormAst::Kind::Eq, lhs.at, {lhs, rhs}, {}};
    }
    return FormAst{FormAst::Kind::Pred, lhs.at, {lhs}, {}};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ------------------------------------------------------------ elaboration

struct Scope {
  const Signature& sig;
  Context ctx;
  std::map<std::string, std::size_t, std::less<>> names;
  bool classical;
};

Context make_context(const Signature& sig, const std::vector<BinderAst>& bs) {
  std::vector<Binding> out;
  std::set<std::string> seen;
  for (const BinderAst& b : bs) {
    auto s = sig.find_sort(b.sort.text);
    if (!s)
      Parser::fail(b.sort, "unknown sort");
    if (!seen.insert(b.name.text).second)
      Parser::fail(b.name, "duplicate variable");
    if (sig.find_function(b.name.text))
      Parser::fail(b.name, "variable shadows a function symbol");
    out.push_back({b.name.text, *s});
  }
  return Context(std::move(out));
}

/// Names of later contexts shadow earlier ones; `ctx` is their concat.
Scope make_scope(const Signature& sig, const std::vector<Context>& parts, bool classical) {
  Scope sc{sig, Context(), {}, classical};
  std::size_t offset = 0;
  std::vector<std::pair<std::string, std::size_t>> order;
  for (const Context& c : parts) {
    sc.ctx = concat(sc.ctx, c);
    offset += c.size();
  }
  // The first part is innermost: insert from the last part backwards.
  std::size_t start = offset;
  for (std::size_t p = parts.size(); p-- > 0;) {
    start -= parts[p].size();
    for (std::size_t i = 0; i < parts[p].size(); ++i)
      sc.names[parts[p][i].name] = start + i;
  }
  return sc;
}

Term elab_term(const TermAst& t, const Scope& sc) {
  if (!t.call) {
    auto v = sc.names.find(t.at.text);
    if (v != sc.names.end())
      return Term::var(v->second, sc.ctx[v->second].sort);
  }
  auto f = sc.sig.find_function(t.at.text);
  if (!f)
    Parser::fail(t.at, "unknown variable or function");
  const FunctionSymbol& fs = sc.sig.function_symbol(*f);
  if (fs.args.size() != t.args.size())
    Parser::fail(t.at, "'" + fs.name + "' expects " + std::to_string(fs.args.size()) +
                           " argument(s)");
  std::vector<Term> args;
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    Term a = elab_term(t.args[i], sc);
    if (a.sort() != fs.args[i])
      Parser::fail(t.args[i].at, "sort mismatch: expected " + sc.sig.sort_name(fs.args[i]) +
                                     ", got " + sc.sig.sort_name(a.sort()));
    args.push_back(std::move(a));
  }
  return Term::apply(sc.sig, *f, std::move(args));
}

ClassicalFormula elab(const FormAst& f, const Scope& sc) {
  using K = FormAst::Kind;
  switch (f.kind) {
  case K::True:
    return ClassicalFormula::leaf(Formula::truth(sc.ctx));
  case K::False:
    return ClassicalFormula::leaf(Formula::falsity(sc.ctx));
  case K::Eq: {
    Term l = elab_term(f.terms[0], sc);
    Term r = elab_term(f.terms[1], sc);
    if (l.sort() != r.sort())
      Parser::fail(f.terms[1].at, "sort mismatch: expected " + sc.sig.sort_name(l.sort()) +
                                      ", got " + sc.sig.sort_name(r.sort()));
    return ClassicalFormula::leaf(Formula::equal(sc.ctx, l, r));
  }
  case K::Pred: {
    const TermAst& atom = f.terms[0];
    auto r = sc.sig.find_relation(atom.at.text);
    if (!r)
      Parser::fail(atom.at, "unknown relation");
    const RelationSymbol& rs = sc.sig.relation_symbol(*r);
    if (rs.args.size() != atom.args.size())
      Parser::fail(atom.at, "'" + rs.name + "' expects " + std::to_string(rs.args.size()) +
                                " argument(s)");
    std::vector<Term> args;
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
      Term a = elab_term(atom.args[i], sc);
      if (a.sort() != rs.args[i])
        Parser::fail(atom.args[i].at, "sort mismatch: expected " + sc.sig.sort_name(rs.args[i]) +
                                          ", got " + sc.sig.sort_name(a.sort()));
      args.push_back(std::move(a));
    }
    return ClassicalFormula::leaf(Formula::relation(sc.sig, sc.ctx, *r, std::move(args)));
  }
  case K::Not:
    if (!sc.classical)
      Parser::fail(f.at, "negation requires 'logic classical'");
    return ClassicalFormula::negation(elab(f.kids[0], sc));
  case K::And:
  case K::Or: {
    std::vector<ClassicalFormula> parts;
    for (const FormAst& k : f.kids)
      parts.push_back(elab(k, sc));
    return f.kind == K::And ? ClassicalFormula::conj(sc.ctx, std::move(parts))
                            : ClassicalFormula::disj(sc.ctx, std::move(parts));
  }
  }
  return ClassicalFormula::leaf(Formula::truth(sc.ctx));
}

std::vector<SortId> sort_list(Parser& p, const Signature& sig) {
  std::vector<SortId> out;
  do {
    Token s = p.name("a sort name");
    auto id = sig.find_sort(s.text);
    if (!id)
      Parser::fail(s, "unknown sort");
    out.push_back(*id);
  } while (p.accept(Tok::Star));
  return out;
}

void check_clash(const Context& inner, const std::vector<BinderAst>& outer) {
  for (const BinderAst& b : outer)
    if (inner.index_of(b.name.text))
      Parser::fail(b.name, "variable is already bound");
}

bool classical_file(const TheoryFile& f) {
  return f.logic && *f.logic == Fragment::ClassicalMorleyised;
}

// --------------------------------------------------------------- printing

std::string print_formula(const Signature& sig, const ClassicalFormula& f) {
  if (f.kind() == ClassicalFormula::Kind::Leaf)
    return to_string(sig, f.formula());
  return to_string(sig, f);
}

std::string print_binders(const Signature& sig, const Context& c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i)
    out += (i ? ", " : "") + c[i].name + ":" + sig.sort_name(c[i].sort);
  return out;
}

std::string print_sorts(const Signature& sig, const std::vector<SortId>& sorts) {
  std::string out;
  for (std::size_t i = 0; i < sorts.size(); ++i)
    out += (i ? " * " : "") + sig.sort_name(sorts[i]);
  return out;
}

std::string trailing(const Signature& sig, const Context& c) {
  return c.empty() ? "" : " " + to_string(sig, c);
}

} // namespace

bool operator==(const GoalDecl& a, const GoalDecl& b) {
  return a.name == b.name && a.kind == b.kind && a.outer == b.outer && a.bound == b.bound &&
         a.body == b.body && a.conclusion == b.conclusion;
}

const GoalDecl* TheoryFile::find_goal(std::string_view name) const {
  for (const GoalDecl& g : goals)
    if (g.name == name)
      return &g;
  return nullptr;
}

bool operator==(const TheoryFile& a, const TheoryFile& b) {
  if (a.logic != b.logic || !(a.signature == b.signature) || a.axioms.size() != b.axioms.size() ||
      !(a.goals == b.goals))
    return false;
  for (std::size_t i = 0; i < a.axioms.size(); ++i)
    if (a.axioms[i].name != b.axioms[i].name || !(a.axioms[i].lhs == b.axioms[i].lhs) ||
        !(a.axioms[i].rhs == b.axioms[i].rhs) ||
        !(a.axioms[i].lhs.context() == b.axioms[i].lhs.context()))
      return false;
  return true;
}

TheoryFile parse_theory(std::string_view text) {
  Parser p(text);
  TheoryFile file;
  Signature& sig = file.signature;
  std::set<std::string> axiom_names, goal_names;
  auto fresh_symbol = [&](const Token& t) {
    if (sig.find_function(t.text) || sig.find_relation(t.text))
      Parser::fail(t, "duplicate symbol name");
  };
  while (!p.at(Tok::End)) {
    Token kw = p.expect(Tok::Name, "a declaration");
    if (kw.text == "logic") {
      Token f = p.expect(Tok::Name, "horn, coherent or classical");
      if (f.text == "horn")
        file.logic = Fragment::Horn;
      else if (f.text == "coherent")
        file.logic = Fragment::Coherent;
      else if (f.text == "classical")
        file.logic = Fragment::ClassicalMorleyised;
      else
        Parser::fail(f, "expected horn, coherent or classical");
    } else if (kw.text == "sort") {
      Token n = p.name("a sort name");
      if (sig.find_sort(n.text))
        Parser::fail(n, "duplicate sort name");
      sig.add_sort(n.text);
    } else if (kw.text == "const") {
      Token n = p.name("a constant name");
      fresh_symbol(n);
      p.expect(Tok::Colon, "':'");
      Token s = p.name("a sort name");
      auto id = sig.find_sort(s.text);
      if (!id)
        Parser::fail(s, "unknown sort");
      sig.add_constant(n.text, *id);
    } else if (kw.text == "fn") {
      Token n = p.name("a function name");
      fresh_symbol(n);
      p.expect(Tok::Colon, "':'");
      std::vector<SortId> args = sort_list(p, sig);
      p.expect(Tok::Arrow, "'->'");
      Token s = p.name("a sort name");
      auto id = sig.find_sort(s.text);
      if (!id)
        Parser::fail(s, "unknown sort");
      sig.add_function(n.text, std::move(args), *id);
    } else if (kw.text == "rel") {
      Token n = p.name("a relation name");
      fresh_symbol(n);
      std::vector<SortId> args;
      if (p.accept(Tok::Colon))
        args = sort_list(p, sig);
      sig.add_relation(n.text, std::move(args));
    } else if (kw.text == "axiom") {
      Token n = p.name("an axiom name");
      if (!axiom_names.insert(n.text).second)
        Parser::fail(n, "duplicate axiom name");
      p.expect(Tok::Colon, "':'");
      FormAst lhs = p.formula();
      p.expect(Tok::Turnstile, "'|-'");
      FormAst rhs = p.formula();
      Context c = make_context(sig, p.optional_context());
      Scope sc = make_scope(sig, {c}, classical_file(file));
      file.axioms.push_back({n.text, elab(lhs, sc), elab(rhs, sc)});
    } else if (kw.text == "goal") {
      Token n = p.name("a goal name");
      if (!goal_names.insert(n.text).second)
        Parser::fail(n, "duplicate goal name");
      p.expect(Tok::Colon, "':'");
      GoalDecl g{n.text, GoalDecl::Kind::Exists, Context(), Context(),
                 ClassicalFormula::leaf(Formula::truth(Context())), std::nullopt};
      if (p.at_keyword("forall")) {
        p.next();
        g.kind = GoalDecl::Kind::ForallForall;
        g.bound = make_context(sig, p.binders());
        p.expect(Tok::Dot, "'.'");
        FormAst premise = p.formula();
        p.expect(Tok::Turnstile, "'|-'");
        FormAst conclusion = p.formula();
        g.outer = make_context(sig, p.optional_context());
        g.body = elab(premise, make_scope(sig, {g.bound}, classical_file(file)));
        g.conclusion = elab(conclusion, make_scope(sig, {g.outer}, classical_file(file)));
      } else {
        p.expect_keyword("true");
        p.expect(Tok::Turnstile, "'|-'");
        p.expect_keyword("exists");
        g.bound = make_context(sig, p.binders());
        p.expect(Tok::Dot, "'.'");
        FormAst matrix = p.formula();
        std::vector<BinderAst> outer = p.optional_context();
        check_clash(g.bound, outer);
        g.outer = make_context(sig, outer);
        g.body = elab(matrix, make_scope(sig, {g.bound, g.outer}, classical_file(file)));
      }
      file.goals.push_back(std::move(g));
    } else {
      Parser::fail(kw, "expected a declaration");
    }
  }
  return file;
}

std::string print_theory(const TheoryFile& file) {
  const Signature& sig = file.signature;
  std::string out;
  if (file.logic)
    out += "logic " + to_string(*file.logic) + "\n";
  for (const std::string& s : sig.sorts())
    out += "sort " + s + "\n";
  for (const FunctionSymbol& f : sig.functions()) {
    if (f.args.empty())
      out += "const " + f.name + " : " + sig.sort_name(f.result) + "\n";
    else
      out += "fn " + f.name + " : " + print_sorts(sig, f.args) + " -> " +
             sig.sort_name(f.result) + "\n";
  }
  for (const RelationSymbol& r : sig.relations())
    out += "rel " + r.name + (r.args.empty() ? "" : " : " + print_sorts(sig, r.args)) + "\n";
  for (const ClassicalAxiom& a : file.axioms)
    out += "axiom " + a.name + ": " + print_formula(sig, a.lhs) + " |- " +
           print_formula(sig, a.rhs) + trailing(sig, a.lhs.context()) + "\n";
  for (const GoalDecl& g : file.goals) {
    if (g.kind == GoalDecl::Kind::Exists)
      out += "goal " + g.name + ": true |- exists " + print_binders(sig, g.bound) + ". " +
             print_formula(sig, g.body) + trailing(sig, g.outer) + "\n";
    else
      out += "goal " + g.name + ": forall " + print_binders(sig, g.bound) + ". " +
             print_formula(sig, g.body) + " |- " + print_formula(sig, *g.conclusion) +
             trailing(sig, g.outer) + "\n";
  }
  return out;
}

Workspace::Workspace(const TheoryFile& file)
    : file_(file), morley_([&] {
        Theory t;
        t.signature = file.signature;
        if (file.logic == Fragment::Horn)
          t.fragment = Fragment::Horn;
        return t;
      }()) {
  for (const ClassicalAxiom& a : file_.axioms)
    morley_.add_axiom(a.name, a.lhs, a.rhs);
  for (const GoalDecl& g : file_.goals) {
    if (g.kind == GoalDecl::Kind::Exists)
      goals_.emplace_back(g.outer, g.bound, morley_.translate(g.body));
    else
      goals_.push_back(reduce_forall_forall(morley_, morley_.translate(g.body),
                                            morley_.translate(*g.conclusion)));
  }
  morley_.theory().validate();
}

const ExistentialGoal& Workspace::goal(const GoalDecl& g) const {
  for (std::size_t i = 0; i < file_.goals.size(); ++i)
    if (file_.goals[i].name == g.name)
      return goals_[i];
  throw Error("unknown goal '" + g.name + "'");
}

Context Workspace::parse_context(std::string_view text) const {
  Parser p(text);
  std::vector<BinderAst> bs;
  if (p.at(Tok::LBracket))
    bs = p.context();
  else if (!p.at(Tok::End))
    bs = p.binders();
  p.finish();
  return make_context(signature(), bs);
}

Sequent Workspace::parse_sequent(std::string_view text) {
  Parser p(text);
  FormAst lhs = p.formula();
  p.expect(Tok::Turnstile, "'|-'");
  FormAst rhs = p.formula();
  Context c = make_context(signature(), p.optional_context());
  p.finish();
  Scope sc = make_scope(signature(), {c}, classical_file(file_));
  ClassicalFormula l = elab(lhs, sc);
  ClassicalFormula r = elab(rhs, sc);
  Formula tl = morley_.translate(l);
  Formula tr = morley_.translate(r);
  return Sequent(c, tl, tr);
}

ExElement Workspace::parse_element(std::string_view text, const Context& base) {
  Parser p(text);
  p.expect(Tok::LBrace, "'{'");
  std::vector<ExPair> pairs;
  if (!p.at(Tok::RBrace)) {
    do {
      Context w = make_context(signature(), p.optional_context());
      FormAst body = p.formula();
      Scope sc = make_scope(signature(), {w, base}, classical_file(file_));
      ClassicalFormula cf = elab(body, sc);
      pairs.push_back({w, morley_.translate(cf)});
    } while (p.accept(Tok::Semi));
  }
  p.expect(Tok::RBrace, "'}'");
  p.finish();
  return ExElement(base, std::move(pairs));
}

} // namespace doctrina::cli
