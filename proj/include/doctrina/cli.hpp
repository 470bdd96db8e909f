#ifndef DOCTRINA_CLI_HPP
#define DOCTRINA_CLI_HPP

// Theory-file language and the command-line front end.
//
//   file    := (logic | decl | axiom | goal)*
//   logic   := "logic" ("horn" | "coherent" | "classical")
//   decl    := "sort" NAME | "const" NAME ":" NAME
//            | "fn" NAME ":" NAME ("*" NAME)* "->" NAME
//            | "rel" NAME (":" NAME ("*" NAME)*)?
//   axiom   := "axiom" NAME ":" formula "|-" formula ctx?
//   goal    := "goal" NAME ":" "true" "|-" "exists" binders "." formula ctx?
//            | "goal" NAME ":" "forall" binders "." formula "|-" formula ctx?
//   formula := disjunctions of conjunctions of ["~"] (true | false | term "=" term
//              | NAME | NAME "(" terms ")" | "(" formula ")")
//   ctx     := "[" binders? "]"      binders := NAME ":" NAME ("," NAME ":" NAME)*
//
// `~` needs `logic classical`. Names must be declared before use; `#`
// starts a comment.

#include "doctrina/herbrand.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace doctrina::cli {

struct GoalDecl {
  enum class Kind { Exists, ForallForall };

  std::string name;
  Kind kind = Kind::Exists;
  /// The trailing context.
  Context outer;
  /// The binders after exists/forall.
  Context bound;
  /// Exists: the matrix over bound ++ outer. ForallForall: the premise over
  /// bound.
  ClassicalFormula body;
  /// ForallForall only: the conclusion over outer.
  std::optional<ClassicalFormula> conclusion;

  friend bool operator==(const GoalDecl& a, const GoalDecl& b);
};

struct TheoryFile {
  std::optional<Fragment> logic;
  Signature signature;
  std::vector<ClassicalAxiom> axioms;
  std::vector<GoalDecl> goals;

  const GoalDecl* find_goal(std::string_view name) const;
  friend bool operator==(const TheoryFile& a, const TheoryFile& b);
};

/// Throws ParseError (line, column, offending token) on lexical, syntax and
/// sort errors and on duplicate names.
TheoryFile parse_theory(std::string_view text);

/// Source text that parses back to an equal TheoryFile.
std::string print_theory(const TheoryFile& file);

/// A parsed file elaborated into a theory. Negations in axioms and goals are
/// Morleyised on construction; later ad-hoc text may add more symbols.
class Workspace {
public:
  explicit Workspace(const TheoryFile& file);

  const TheoryFile& file() const { return file_; }
  const Theory& theory() const { return morley_.theory(); }
  const Signature& signature() const { return morley_.theory().signature; }
  Morleyisation& morleyisation() { return morley_; }

  /// The existential goal for a declared goal (for ForallForall goals, the
  /// reduced goal).
  const ExistentialGoal& goal(const GoalDecl& g) const;

  /// Parsers for command-line arguments; names resolve against the current
  /// (possibly Morleyised) signature.
  Context parse_context(std::string_view text) const;
  Sequent parse_sequent(std::string_view text);
  /// "{ [binders] formula ; ... }", bodies over binders ++ base.
  ExElement parse_element(std::string_view text, const Context& base);

private:
  TheoryFile file_;
  Morleyisation morley_;
  std::vector<ExistentialGoal> goals_;
};

/// Runs the command line `args` (without the program name). Exit codes:
/// 0 success / Proved, 2 Unknown, 1 error or failed model check.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace doctrina::cli

#endif // DOCTRINA_CLI_HPP
