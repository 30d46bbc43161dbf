#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "mechcheck/asl.hpp"
#include "mechcheck/asl_check.hpp"
#include "mechcheck/asl_parser.hpp"
#include "oracles.hpp"

using namespace mechcheck::asl;

namespace {

Diagnostic diagnose(std::string_view text, bool validate_too = false) {
  try {
    SpecAst ast = parse(text);
    if (validate_too) validate(ast);
  } catch (const SpecError& e) {
    return e.diagnostic();
  }
  ADD_FAILURE() << "no diagnostic for:\n" << text;
  return {};
}

// 1-based line/column that points into the text or one past the end of a line.
bool in_bounds(std::string_view text, std::size_t line, std::size_t col) {
  std::vector<std::size_t> lengths{0};
  for (char c : text) {
    if (c == '\n')
      lengths.push_back(0);
    else
      ++lengths.back();
  }
  return line >= 1 && line <= lengths.size() && col >= 1 && col <= lengths[line - 1] + 1;
}

std::string stem(const std::string& path) { return path.substr(0, path.rfind('.')); }

// Random well-formed ASTs for round-trip testing.
class AstGen {
 public:
  explicit AstGen(std::uint64_t seed) : rng_(seed) {}

  SpecAst spec() {
    SpecAst ast;
    int n = pick(1, 8);
    for (int i = 0; i < n; ++i) ast.decls.push_back(decl());
    return ast;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::string name() {
    static const char* names[] = {"a", "Agent", "x_1", "bid", "Winner", "_t", "hasBid", "q9"};
    return names[pick(0, 7)];
  }
  std::int64_t number() {
    switch (pick(0, 4)) {
      case 0: return std::numeric_limits<std::int64_t>::min();
      case 1: return std::numeric_limits<std::int64_t>::max();
      default: return pick(-20, 20);
    }
  }

  ClassExpr class_expr(int depth) {
    switch (depth > 3 ? 0 : pick(0, 4)) {
      case 1: return ClassExpr::some(name(), class_expr(depth + 1));
      case 2: return ClassExpr::all(name(), class_expr(depth + 1));
      case 3: return ClassExpr::conj(class_expr(depth + 1), class_expr(depth + 1));
      case 4: return ClassExpr::disj(class_expr(depth + 1), class_expr(depth + 1));
      default: return ClassExpr::named(name());
    }
  }

  Expr expr() {
    Expr e;
    int n = pick(1, 3);
    for (int i = 0; i < n; ++i) {
      if (i) e.ops.push_back(pick(0, 1) ? '+' : '-');
      e.terms.push_back(pick(0, 1) ? Term::variable(name()) : Term::literal(number()));
    }
    return e;
  }

  Cond cond() { return {expr(), static_cast<CmpOp>(pick(0, 5)), expr()}; }

  std::vector<Stmt> block(int depth) {
    std::vector<Stmt> out;
    int n = pick(0, 3);
    for (int i = 0; i < n; ++i) {
      Stmt s;
      switch (depth > 2 ? pick(0, 1) : pick(0, 3)) {
        case 0:
          s.kind = Stmt::Kind::assign;
          s.name = name();
          s.expr = expr();
          break;
        case 1:
          s.kind = Stmt::Kind::perform;
          s.name = name();
          for (int k = pick(0, 2); k > 0; --k) s.args.push_back(name());
          break;
        case 2:
          s.kind = Stmt::Kind::sequence;
          s.body = block(depth + 1);
          break;
        default:
          s.kind = Stmt::Kind::while_;
          s.cond = cond();
          s.body = block(depth + 1);
      }
      out.push_back(std::move(s));
    }
    return out;
  }

  Decl decl() {
    switch (pick(0, 7)) {
      case 0: return ClassDecl{name(), std::nullopt, std::nullopt, {}};
      case 1: return ClassDecl{name(), name(), std::nullopt, {}};
      case 2: return ClassDecl{name(), std::nullopt, class_expr(0), {}};
      case 3: return IndividualDecl{name(), name(), {}};
      case 4: return pick(0, 1) ? Decl{ObjPropDecl{name(), {}}} : Decl{DataPropDecl{name(), {}}};
      case 5: return pick(0, 1) ? Decl{AssertDecl{name(), name(), name(), {}}}
                                : Decl{AssertValDecl{name(), name(), number(), {}}};
      default: {
        ProcessDecl p;
        p.name = name();
        for (int k = pick(0, 4); k > 0; --k) {
          Section s;
          s.kind = static_cast<Section::Kind>(pick(0, 4));
          if (s.kind == Section::Kind::inputs || s.kind == Section::Kind::outputs)
            for (int j = pick(0, 3); j > 0; --j) s.names.push_back(name());
          if ((s.kind == Section::Kind::pre || s.kind == Section::Kind::result) && pick(0, 3)) s.cond = cond();
          if (s.kind == Section::Kind::body) s.body = block(0);
          p.sections.push_back(std::move(s));
        }
        return p;
      }
    }
  }

  std::mt19937_64 rng_;
};

}  // namespace

TEST(Parse, TwoAgentFragment) {
  SpecAst ast = parse("class Agent; individual agent_1 : Agent; individual agent_2 : Agent;");
  EXPECT_EQ(ast.all<ClassDecl>().size(), 1u);
  auto inds = ast.all<IndividualDecl>();
  ASSERT_EQ(inds.size(), 2u);
  EXPECT_EQ(inds[0].name, "agent_1");
  EXPECT_EQ(inds[1].cls, "Agent");
}

TEST(Parse, CompositeAuctionProcess) {
  SpecAst ast = parse("process Auction { body { perform WinDetermAlgo(); perform PayeAndUtil(); } }");
  auto procs = ast.all<ProcessDecl>();
  ASSERT_EQ(procs.size(), 1u);
  EXPECT_TRUE(procs[0].is_composite());
  auto body = procs[0].body();
  ASSERT_EQ(body.size(), 2u);
  EXPECT_EQ(body[0].kind, Stmt::Kind::perform);
  EXPECT_EQ(body[0].name, "WinDetermAlgo");
  EXPECT_EQ(body[1].name, "PayeAndUtil");
}

TEST(Parse, ExpressionsAndNegativeLiterals) {
  SpecAst ast = parse("process P { body { x := 3 - -4 + y; while x != -1 { x := x-1; } } }");
  auto body = ast.all<ProcessDecl>()[0].body();
  ASSERT_EQ(body[0].expr.terms.size(), 3u);
  EXPECT_EQ(body[0].expr.terms[1], Term::literal(-4));
  EXPECT_EQ(body[0].expr.ops, (std::vector<char>{'-', '+'}));
  EXPECT_EQ(body[1].cond.op, CmpOp::ne);
  EXPECT_EQ(body[1].cond.rhs.terms[0], Term::literal(-1));
  EXPECT_EQ(print(ast), "process P {\n  body {\n    x := 3 - -4 + y;\n    while x != -1 {\n      x := x - 1;\n    }\n  }\n}\n");
}

TEST(Parse, IntegerExtremes) {
  auto value = [](std::string_view src) { return parse(src).all<AssertValDecl>().at(0).value; };
  EXPECT_EQ(value("assertval p(a, 9223372036854775807);"), std::numeric_limits<std::int64_t>::max());
  EXPECT_EQ(value("assertval p(a, -9223372036854775808);"), std::numeric_limits<std::int64_t>::min());
  EXPECT_EQ(diagnose("assertval p(a, 9223372036854775808);").col, 16u);
}

TEST(Parse, SyntaxErrorListsExpectedTokens) {
  Diagnostic d = diagnose("individual a Agent;");
  EXPECT_EQ(d.kind, ErrorKind::SyntaxError);
  EXPECT_EQ(d.line, 1u);
  EXPECT_EQ(d.col, 14u);
  EXPECT_EQ(d.expected, (std::vector<std::string>{"':'"}));
}

TEST(Parse, KeywordsAreReserved) {
  EXPECT_EQ(diagnose("class while;").kind, ErrorKind::SyntaxError);
  EXPECT_EQ(diagnose("process P { body { body := 1; } }").kind, ErrorKind::SyntaxError);
}

TEST(Corpus, GoldenRoundTrip) {
  auto files = oracle::corpus_files("asl", ".asl");
  ASSERT_GE(files.size(), 20u);
  for (const auto& path : files) {
    SCOPED_TRACE(path);
    std::string golden = oracle::slurp(stem(path) + ".golden");
    SpecAst ast = parse(oracle::slurp(path));
    EXPECT_EQ(print(ast), golden);
    EXPECT_EQ(print(parse(golden)), golden);
    EXPECT_EQ(parse(golden), ast);
    EXPECT_NO_THROW(validate(ast));
  }
}

TEST(Corpus, InvalidFilesGiveInBoundsDiagnostics) {
  for (const std::string dir : {"asl_invalid", "asl_semantic"}) {
    auto files = oracle::corpus_files(dir, ".asl");
    ASSERT_FALSE(files.empty());
    for (const auto& path : files) {
      SCOPED_TRACE(path);
      std::string text = oracle::slurp(path);
      Diagnostic d = diagnose(text, true);
      EXPECT_TRUE(in_bounds(text, d.line, d.col)) << d.to_string();
      std::istringstream expected(oracle::slurp(stem(path) + ".expected"));
      std::string where, kind;
      expected >> where >> kind;
      EXPECT_EQ(where, std::to_string(d.line) + ":" + std::to_string(d.col));
      EXPECT_EQ(kind, to_string(d.kind));
      EXPECT_EQ(d.kind == ErrorKind::SyntaxError, dir == "asl_invalid");
    }
  }
}

TEST(Validate, ResolvesForwardReferences) {
  CheckedSpec spec = validate(parse(
      "individual a : Agent; class Agent; assert knows(a, a); objprop knows;"
      "process Q { body { perform P(); } } process P { }"));
  EXPECT_EQ(spec.individuals[0].cls, spec.class_index.at("Agent"));
  EXPECT_EQ(spec.processes[0].callees, (std::vector<std::size_t>{1}));
  EXPECT_FALSE(spec.processes[1].composite);
}

TEST(Validate, SemanticErrors) {
  auto kind = [](std::string_view src) { return diagnose(src, true).kind; };
  EXPECT_EQ(kind("class Winner subclassOf Agent;"), ErrorKind::UnknownClass);
  EXPECT_EQ(kind("class A subclassOf B; class B subclassOf A;"), ErrorKind::CyclicHierarchy);
  EXPECT_EQ(kind("class A subclassOf A;"), ErrorKind::CyclicHierarchy);
  EXPECT_EQ(kind("class A; individual a : A; assertval size(a, 1);"), ErrorKind::UnknownProperty);
  EXPECT_EQ(kind("class A; individual a : A; objprop p; assertval p(a, 1);"), ErrorKind::UnknownProperty);
  EXPECT_EQ(kind("process P { body { perform P(); } }"), ErrorKind::RecursiveProcess);
  EXPECT_EQ(kind("process P { body { while 1 < 2 { perform Nope(); } } }"), ErrorKind::UnknownProcess);
  EXPECT_EQ(kind("class D = some(p, D); objprop p;"), ErrorKind::CyclicHierarchy);
  EXPECT_EQ(kind("class A; class D = A; class E subclassOf D;"), ErrorKind::InvalidDefinedClassUse);
  EXPECT_EQ(kind("class A; class D = some(q, A);"), ErrorKind::UnknownProperty);
  EXPECT_EQ(kind("process P { inputs(a) } process Q { body { perform P(); } }"), ErrorKind::ArityMismatch);
  EXPECT_EQ(kind("individual a : A; individual a : A; class A;"), ErrorKind::DuplicateDeclaration);
}

TEST(Property, PrintParseRoundTripOnRandomAsts) {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    SpecAst ast = AstGen(seed).spec();
    std::string text = print(ast);
    SpecAst back;
    ASSERT_NO_THROW(back = parse(text)) << text;
    ASSERT_EQ(back, ast) << text;
    ASSERT_EQ(print(back), text);
  }
}

TEST(Property, ParserIsTotalOnRandomBytes) {
  std::mt19937_64 rng(99);
  const std::string alphabet = "class individual process body while perform some all and or {}();:=,<>!+-#/\n\t 0123456789ab_\r";
  for (int round = 0; round < 20000; ++round) {
    std::string text;
    int len = static_cast<int>(rng() % 80);
    for (int i = 0; i < len; ++i) {
      if (rng() % 7 == 0)
        text += static_cast<char>(rng() % 256);
      else
        text += alphabet[rng() % alphabet.size()];
    }
    try {
      parse(text);
    } catch (const SpecError& e) {
      ASSERT_TRUE(in_bounds(text, e.diagnostic().line, e.diagnostic().col)) << e.what();
    }
  }
}

TEST(Property, MutatedCorpusStaysTotal) {
  std::mt19937_64 rng(4242);
  auto files = oracle::corpus_files("asl", ".asl");
  for (int round = 0; round < 5000; ++round) {
    std::string text = oracle::slurp(files[rng() % files.size()]);
    for (int m = 0; m < 3 && !text.empty(); ++m) {
      std::size_t at = rng() % text.size();
      switch (rng() % 3) {
        case 0: text.erase(at, 1 + rng() % 4); break;
        case 1: text.insert(at, 1, "{}();:=<-x9 "[rng() % 12]); break;
        default: text[at] = static_cast<char>(rng() % 128);
      }
    }
    try {
      validate(parse(text));
    } catch (const SpecError& e) {
      ASSERT_TRUE(in_bounds(text, e.diagnostic().line, e.diagnostic().col)) << e.what() << "\n" << text;
    }
  }
}

TEST(Property, DeepNestingIsRejectedNotCrashed) {
  std::string deep = "process P { body { " + std::string(100000, '{') + " } }";
  EXPECT_EQ(diagnose(deep).kind, ErrorKind::SyntaxError);
  std::string nested_seq;
  for (int i = 0; i < 5000; ++i) nested_seq += "sequence { ";
  EXPECT_EQ(diagnose("process P { body { " + nested_seq + "} } }").kind, ErrorKind::SyntaxError);
}
