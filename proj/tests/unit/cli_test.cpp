#include "oracle.hpp"

#include "doctrina/cli.hpp"
#include "doctrina/error.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace doctrina;
using namespace doctrina::cli;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const fs::path kCorpus = DOCTRINA_CORPUS_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string corpus(const std::string& name) { return (kCorpus / name).string(); }

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_temp(const std::string& name, const std::string& text) {
  fs::path p = fs::temp_directory_path() / ("doctrina_cli_test_" + name);
  std::ofstream(p) << text;
  return p;
}

std::vector<fs::path> corpus_files() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(kCorpus))
    if (e.path().extension() == ".th")
      out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

void expect_parse_error(const std::string& text, std::size_t line, std::size_t column,
                        const std::string& token) {
  try {
    parse_theory(text);
    ADD_FAILURE() << "no error for: " << text;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_EQ(e.column(), column) << e.what();
    EXPECT_EQ(e.token(), token) << e.what();
  }
}

} // namespace

TEST(Parse, DeclarationsAndAxiom) {
  TheoryFile f = parse_theory("sort S  const a : S  rel R : S  axiom ax1: true |- R(a)");
  EXPECT_EQ(f.signature.sorts().size(), 1u);
  EXPECT_EQ(f.signature.functions().size(), 1u);
  EXPECT_EQ(f.signature.relations().size(), 1u);
  ASSERT_EQ(f.axioms.size(), 1u);
  EXPECT_EQ(f.axioms[0].name, "ax1");
}

TEST(Parse, GoalWithBoundContext) {
  TheoryFile f = parse_theory("sort S rel R : S fn f : S -> S  goal g: true |- exists y:S. R(y)");
  ASSERT_EQ(f.goals.size(), 1u);
  EXPECT_EQ(f.goals[0].bound.size(), 1u);
  EXPECT_EQ(f.goals[0].bound[0].name, "y");
  EXPECT_TRUE(f.goals[0].outer.empty());
}

TEST(Parse, PrecedenceAndFlattening) {
  TheoryFile f = parse_theory(
      "sort S rel P : S rel Q : S rel R : S rel Z\n"
      "axiom a1: P(x) /\\ (Q(x) /\\ R(x)) |- P(x) \\/ Q(x) /\\ R(x) \\/ Z [x:S]");
  const Formula& lhs = f.axioms[0].lhs.formula();
  EXPECT_EQ(lhs.kind(), FormulaKind::And);
  EXPECT_EQ(lhs.child_count(), 3u);
  const Formula& rhs = f.axioms[0].rhs.formula();
  EXPECT_EQ(rhs.kind(), FormulaKind::Or);
  ASSERT_EQ(rhs.child_count(), 3u);
  EXPECT_EQ(rhs.child(1).kind(), FormulaKind::And);
}

TEST(Parse, ErrorsCarrySpans) {
  expect_parse_error("sort S\nconst a : T", 2, 11, "T");
  expect_parse_error("sort S rel R : S\naxiom x: true |- Q(a)", 2, 18, "Q");
  expect_parse_error("sort S sort T const a : S rel R : T\naxiom x: true |- R(a)", 2, 20, "a");
  expect_parse_error("sort S sort S", 1, 13, "S");
  expect_parse_error("sort S rel R : S\naxiom x: ~R(y) |- false [y:S]", 2, 10, "~");
  expect_parse_error("sort S @", 1, 8, "@");
  expect_parse_error("sort S rel R : S axiom x: true |- R(y) [y:S", 1, 44, "end of input");
  expect_parse_error("sort S\naxiom x: true |- true\naxiom x: true |- true", 3, 7, "x");
}

TEST(Parse, RoundTripOnCorpus) {
  for (const fs::path& p : corpus_files()) {
    TheoryFile f = parse_theory(read(p));
    std::string printed = print_theory(f);
    TheoryFile again = parse_theory(printed);
    EXPECT_TRUE(again == f) << p;
    EXPECT_EQ(print_theory(again), printed) << p;
  }
}

TEST(Parse, RoundTripClassicalNesting) {
  std::string text =
      "logic classical\nsort S\nrel P : S\nrel Q : S\n"
      "axiom a: ~(P(x) /\\ Q(x)) \\/ ~~(x = x) |- (P(x) \\/ Q(x)) /\\ ~Q(x) [x:S]\n";
  TheoryFile f = parse_theory(text);
  EXPECT_TRUE(parse_theory(print_theory(f)) == f);
}

TEST(Entails, ReflexiveAndTwoBranches) {
  Result r = invoke({"entails", corpus("two_witnesses.th"), "--sequent", "R(x) |- R(x) [x:S]"});
  EXPECT_EQ(r.code, 0);
  r = invoke({"entails", corpus("two_witnesses.th"), "--json", "--sequent",
              "true |- R(a) \\/ R(f(a))"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["status"], "proved");
  ASSERT_EQ(j["trace"].size(), 1u);
  EXPECT_EQ(j["trace"][0]["axiom"], "split");
  EXPECT_EQ(j["used_disjuncts"], Json::array({0, 1}));
}

TEST(Entails, UnknownAndErrors) {
  Result r = invoke({"entails", corpus("unknown.th"), "--sequent", "true |- R(a)"});
  EXPECT_EQ(r.code, 2);
  fs::path bad = write_temp("bad.th", "sort S\nrel R : S\naxiom a: R(x) |- R(y) [x:S]\n");
  r = invoke({"entails", bad.string(), "--sequent", "true |- true"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(":3:20:"), std::string::npos) << r.err;
  r = invoke({"entails", corpus("constant.th")});
  EXPECT_EQ(r.code, 1);
  r = invoke({"entails", corpus("constant.th"), "--axiom", "nope"});
  EXPECT_EQ(r.code, 1);
  // An axiom does not follow from the remaining (empty) set.
  r = invoke({"entails", corpus("constant.th"), "--axiom", "ax1"});
  EXPECT_EQ(r.code, 2);
}

TEST(Herbrand, CorpusExamples) {
  Result r = invoke({"herbrand", corpus("two_witnesses.th"), "--goal", "some_r", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::ordered_json::parse(r.out);
  EXPECT_EQ(j["witnesses"], nlohmann::ordered_json::array({"a", "f(a)"}));
  EXPECT_EQ(j["derived_sequent"], "true |- R(a) \\/ R(f(a))");
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it)
    keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"goal", "statement", "status", "witnesses",
                                            "derived_sequent", "depth_used", "budget", "trace",
                                            "models_checked"}));

  r = invoke({"herbrand", corpus("horn_chase.th"), "--goal", "two_steps", "--json"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(Json::parse(r.out)["witnesses"], Json::array({"a"}));

  r = invoke({"herbrand", corpus("unknown.th"), "--json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(Json::parse(r.out)[0]["status"], "unknown");

  r = invoke({"herbrand", corpus("unknown.th"), "--goal", "missing"});
  EXPECT_EQ(r.code, 1);
}

TEST(Herbrand, ForallForallGivesConjunctiveSequent) {
  Result r = invoke({"herbrand", corpus("forall_forall.th"), "--goal", "shifted", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["witnesses"], Json::array({"g(y)"}));
  EXPECT_EQ(j["conjunctive_sequent"], "P(g(y)) |- P(g(y)) [y:S]");
  EXPECT_EQ(j["conjunctive_status"], "proved");
}

TEST(Herbrand, CertificatesReplayThroughEntails) {
  int replayed = 0;
  for (const fs::path& p : corpus_files()) {
    Result r = invoke({"herbrand", p.string(), "--json", "--model-size", "0"});
    ASSERT_NE(r.code, 1) << p << r.err;
    for (const Json& g : Json::parse(r.out)) {
      if (g["status"] != "proved")
        continue;
      const Json& b = g["budget"];
      Result e = invoke({"entails", p.string(), "--json", "--sequent",
                         g["derived_sequent"].get<std::string>(), "--rounds",
                         std::to_string(b["rounds"].get<std::size_t>()), "--splits",
                         std::to_string(b["splits"].get<std::size_t>()), "--fresh",
                         std::to_string(b["fresh_terms"].get<std::size_t>())});
      EXPECT_EQ(e.code, 0) << p << " " << g["goal"] << e.err;
      ++replayed;
    }
  }
  EXPECT_GE(replayed, 10);
}

TEST(Leq, ThreeExamples) {
  std::string file = corpus("two_witnesses.th");
  Result r = invoke({"leq", file, "{ [y:S] R(f(y)) }", "{ [y:S] R(f(y)) }", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["pairs"][0]["arrows"][0]["arrow"], "y");
  r = invoke({"leq", file, "{}", "{ [] R(a) }"});
  EXPECT_EQ(r.code, 0);
  r = invoke({"leq", file, "{ [] true }", "{ [y:S] R(y) }", "--json"});
  ASSERT_EQ(r.code, 0);
  j = Json::parse(r.out);
  EXPECT_EQ(j["pairs"][0]["arrows"][0]["arrow"], "a");
  EXPECT_EQ(j["pairs"][0]["arrows"][1]["arrow"], "f(a)");
  r = invoke({"leq", file, "{ [] true }", "{ [y:S] R(y) }", "--depth", "1"});
  EXPECT_EQ(r.code, 2);
  r = invoke({"leq", file, "{ [] R(x) }", "{ [] R(x) }", "--context", "x:S"});
  EXPECT_EQ(r.code, 0);
  r = invoke({"leq", file, "{ [] R(z) }", "{ [] R(x) }", "--context", "x:S"});
  EXPECT_EQ(r.code, 1);
}

TEST(Model, ExamplesAndCorpus) {
  fs::path empty = write_temp("empty.th", "sort S\nrel P : S\n");
  fs::path model = write_temp("m.json", R"({"carriers":{"S":2},"relations":{"P":[[0]]}})");
  EXPECT_EQ(invoke({"model", empty.string(), model.string()}).code, 0);

  Result r = invoke({"model", corpus("constant.th"),
                     (kCorpus / "models" / "constant_empty.json").string(), "--json"});
  EXPECT_EQ(r.code, 1);
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["violations"][0]["axiom"], "ax1");
  EXPECT_EQ(j["violations"][0]["counter_tuple"], Json::array());

  EXPECT_EQ(invoke({"model", corpus("two_witnesses.th"),
                    (kCorpus / "models" / "two_witnesses_second.json").string()})
                .code,
            0);
  EXPECT_EQ(invoke({"model", corpus("classical.th"),
                    (kCorpus / "models" / "classical_lift.json").string()})
                .code,
            0);
  fs::path broken = write_temp("broken.json", "{\"carriers\": ");
  EXPECT_EQ(invoke({"model", empty.string(), broken.string()}).code, 1);
}

TEST(Model, AgreesWithEnumeration) {
  // Every structure of size <= 2 over the two-witness signature, written as
  // JSON and checked through the command, against a pointwise oracle.
  std::string file = corpus("two_witnesses.th");
  Workspace ws(parse_theory(read(file)));
  auto sig = std::make_shared<const Signature>(ws.file().signature);
  int satisfied = 0, total = 0;
  for (const FiniteModel& m : enumerate_models(sig, 2)) {
    test::TinyModel tm;
    for (std::size_t n : m.carriers())
      tm.size.push_back(static_cast<int>(n));
    for (SymbolId f = 0; f < sig->functions().size(); ++f) {
      std::map<std::vector<int>, int> table;
      for (const auto& args : test::all_args(tm, sig->function_symbol(f).args)) {
        std::vector<Element> e(args.begin(), args.end());
        table[args] = static_cast<int>(m.apply(f, e));
      }
      tm.fn.push_back(table);
    }
    for (SymbolId r = 0; r < sig->relations().size(); ++r) {
      std::set<std::vector<int>> rows;
      for (const auto& args : test::all_args(tm, sig->relation_symbol(r).args)) {
        std::vector<Element> e(args.begin(), args.end());
        if (m.holds(r, e))
          rows.insert(args);
      }
      tm.rel.push_back(rows);
    }
    bool expected = test::satisfies(tm, ws.theory());
    fs::path p = write_temp("enum.json", model_to_json(m));
    ASSERT_EQ(invoke({"model", file, p.string()}).code, expected ? 0 : 1);
    satisfied += expected;
    ++total;
  }
  EXPECT_GT(satisfied, 0);
  EXPECT_LT(satisfied, total);
}

TEST(Laws, LatticeFileAndDeterminism) {
  Result a = invoke({"laws", corpus("branching.th"), "--json", "--count", "5", "--seed", "7"});
  Result b = invoke({"laws", corpus("branching.th"), "--json", "--count", "5", "--seed", "7"});
  EXPECT_EQ(a.code, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  EXPECT_GT(Json::parse(a.out)["checks"].get<int>(), 0);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"frobnicate"}).code, 1);
  EXPECT_EQ(invoke({"herbrand"}).code, 1);
  EXPECT_EQ(invoke({"herbrand", "/nonexistent/file.th"}).code, 1);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}
