#include <gtest/gtest.h>

#include <filesystem>

#include "nnrepair/error.hpp"
#include "nnrepair/smt/script.hpp"
#include "nnrepair/smt/sexpr.hpp"
#include "nnrepair/smt/solver.hpp"
#include "nnrepair/smt/term.hpp"
#include "test_support.hpp"

namespace nnrepair {
namespace {

using namespace smt;

TEST(Term, ConstantFolding) {
  const Term x = var("x");
  EXPECT_TRUE(add({real(1), real(2)}).is_real_const());
  EXPECT_EQ(add({real(1), real(2)}).value(), Rational(3));
  EXPECT_TRUE(mul(real(0), x).is_real_const());
  EXPECT_EQ(to_smt2(mul(real(1), x)), "x");
  EXPECT_EQ(to_smt2(add({x, real(0)})), "x");
  EXPECT_EQ(to_smt2(add({real(2), x, real(Rational(-1, 2))})), "(+ x 1.5)");
  EXPECT_TRUE(land({boolean(true), boolean(false), gt(x, real(0))}).is_bool_const());
  EXPECT_EQ(to_smt2(lor({boolean(false), gt(x, real(0))})), "(> x 0.0)");
  EXPECT_EQ(to_smt2(ite(boolean(true), x, real(3))), "x");
  EXPECT_TRUE(gt(real(2), real(1)).bool_value());
}

TEST(Term, NegativeConstantsRender) {
  EXPECT_EQ(to_smt2(mul(real(Rational(-7, 2)), var("w"))), "(* (- 3.5) w)");
  EXPECT_EQ(to_smt2(real(Rational(2, 3))), "(/ 2.0 3.0)");
}

TEST(Term, SortErrors) {
  EXPECT_THROW(add({var("b", Sort::kBool), real(1)}), InvalidInputError);
  EXPECT_THROW(land({real(1)}), InvalidInputError);
}

TEST(Term, Evaluate) {
  const Term x = var("x");
  const Term t = ite(gt(x, real(0)), mul(real(2), x), neg(x));
  auto at = [&](Rational v) {
    return evaluate_real(t, [v](const std::string&) { return v; });
  };
  EXPECT_EQ(at(Rational(3)), Rational(6));
  EXPECT_EQ(at(Rational(-3)), Rational(3));
  const Term card = at_least({var("a", Sort::kBool), var("b", Sort::kBool), var("c", Sort::kBool)}, 2);
  auto lookup = [](const std::string& n) { return Rational(n == "c" ? 0 : 1); };
  EXPECT_TRUE(evaluate_bool(card, lookup));
  auto lookup2 = [](const std::string& n) { return Rational(n == "a" ? 1 : 0); };
  EXPECT_FALSE(evaluate_bool(card, lookup2));
}

TEST(Term, AtLeastRendering) {
  const Term card = at_least({var("s_0", Sort::kBool), var("s_1", Sort::kBool)}, 1);
  EXPECT_EQ(to_smt2(card), "(>= (+ (ite s_0 1.0 0.0) (ite s_1 1.0 0.0)) 1.0)");
}

TEST(Script, EmitsDeterministicText) {
  Script s;
  s.logic = "QF_LRA";
  s.options = {{"produce-models", "true"}};
  s.declare("x");
  s.assert_term(gt(var("x"), real(Rational(1, 2))));
  s.get_values = {"x"};
  s.comments = {"demo"};
  const std::string expected =
      "; demo\n"
      "(set-option :produce-models true)\n"
      "(set-logic QF_LRA)\n"
      "(declare-fun x () Real)\n"
      "(assert (> x 0.5))\n"
      "(check-sat)\n"
      "(get-value (x))\n";
  EXPECT_EQ(emit(s), expected);
  EXPECT_EQ(emit(s), emit(s));
}

TEST(Script, RejectsUndeclaredAndDuplicate) {
  Script s;
  s.assert_term(gt(var("y"), real(0)));
  EXPECT_THROW(emit(s), EmissionError);
  Script d;
  d.declare("x");
  d.declare("x");
  EXPECT_THROW(emit(d), EmissionError);
  Script g;
  g.declare("x");
  g.get_values = {"z"};
  EXPECT_THROW(emit(g), EmissionError);
  Script b;
  b.declare("x", Sort::kBool);
  b.assert_term(gt(var("x"), real(0)));
  EXPECT_THROW(emit(b), EmissionError);
}

TEST(Script, BoundVariablesNeedNoDeclaration) {
  Script s;
  s.declare("w");
  s.assert_term(forall({"x"}, ge(mul(var("w"), var("x")), real(0))));
  EXPECT_NE(emit(s).find("(forall ((x Real)) (>= (* w x) 0.0))"), std::string::npos);
}

TEST(SExpr, ParsesNested) {
  const auto e = parse_sexprs("sat ((x (- (/ 7 2))))  ; trailing\n(\"a b\")");
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[0].atom, "sat");
  EXPECT_EQ(e[1].to_string(), "((x (- (/ 7 2))))");
  EXPECT_EQ(e[2].items[0].atom, "\"a b\"");
  EXPECT_THROW(parse_sexprs("((x 1)"), ParseError);
  EXPECT_THROW(parse_sexprs("x)"), ParseError);
}

TEST(Model, ParsesExactValues) {
  const std::vector<std::string> w{"w21"};
  EXPECT_EQ(parse_model("((w21 (- (/ 7 2))))", w).at("w21"), Rational(-7, 2));
  const std::vector<std::string> b{"b"};
  EXPECT_EQ(parse_model("((b 2.5))", b).at("b"), Rational(5, 2));
  EXPECT_EQ(parse_model("((b (/ 1.0 3.0)))", b).at("b"), Rational(1, 3));
  EXPECT_EQ(parse_model("((b 4))", b).at("b"), Rational(4));
  EXPECT_EQ(parse_model("((b true))", b).at("b"), Rational(1));
  EXPECT_EQ(parse_model("((b false))", b).at("b"), Rational(0));
  EXPECT_THROW(parse_model("((b (root-obj (+ (^ x 2) (- 2)) 1)))", b), UnsupportedValueError);
  EXPECT_THROW(parse_model("((a 1))", b), ParseError);
}

TEST(Solver, StatusStrings) {
  for (auto s : {SolverStatus::kSat, SolverStatus::kUnsat, SolverStatus::kTimeout,
                 SolverStatus::kUnknown, SolverStatus::kError}) {
    EXPECT_EQ(parse_status(to_string(s)), s);
  }
  EXPECT_EQ(split_command("z3  -in -smt2"), (std::vector<std::string>{"z3", "-in", "-smt2"}));
}

SolverOptions fake(const std::string& shell) {
  SolverOptions o;
  o.command = {"/bin/sh", "-c", shell};
  o.timeout_s = 10;
  return o;
}

TEST(Solver, FakeSolverVerdicts) {
  Script s;
  s.declare("x");
  s.assert_term(gt(var("x"), real(0)));
  s.get_values = {"x"};
  auto sat = run_solver(s, fake("cat >/dev/null; echo sat; echo '((x (/ 1 4)))'"));
  ASSERT_EQ(sat.status, SolverStatus::kSat);
  EXPECT_EQ(sat.model->at("x"), Rational(1, 4));
  EXPECT_EQ(run_solver(s, fake("cat >/dev/null; echo unsat")).status, SolverStatus::kUnsat);
  EXPECT_EQ(run_solver(s, fake("cat >/dev/null; echo unknown")).status, SolverStatus::kUnknown);
  auto err = run_solver(s, fake("cat >/dev/null; echo '(error \"boom\")'"));
  EXPECT_EQ(err.status, SolverStatus::kError);
  EXPECT_NE(err.message.find("boom"), std::string::npos);
  EXPECT_EQ(run_solver(s, fake("cat >/dev/null; exit 3")).status, SolverStatus::kError);
  auto bad = run_solver(s, fake("cat >/dev/null; echo sat; echo '((x (root-obj x 1)))'"));
  EXPECT_EQ(bad.status, SolverStatus::kError);
}

TEST(Solver, TimeoutKillsProcess) {
  Script s;
  s.declare("x");
  s.assert_term(gt(var("x"), real(0)));
  SolverOptions o = fake("sleep 30");
  o.timeout_s = 0.2;
  const auto v = run_solver(s, o);
  EXPECT_EQ(v.status, SolverStatus::kTimeout);
  EXPECT_LT(v.wall_time_seconds, 5.0);
}

TEST(Solver, MissingBinaryIsError) {
  Script s;
  s.declare("x");
  s.assert_term(gt(var("x"), real(0)));
  SolverOptions o;
  o.command = {"/nonexistent/solver"};
  EXPECT_EQ(run_solver(s, o).status, SolverStatus::kError);
}

TEST(Solver, ArchivesScripts) {
  const auto dir = std::filesystem::temp_directory_path() / "nnrepair_archive_test";
  std::filesystem::remove_all(dir);
  Script s;
  s.declare("x");
  s.assert_term(gt(var("x"), real(0)));
  SolverOptions o = fake("cat >/dev/null; echo sat");
  o.archive_dir = dir.string();
  run_solver(s, o, "q1");
  EXPECT_TRUE(std::filesystem::exists(dir / "q1.smt2"));
  std::filesystem::remove_all(dir);
}

class Z3Test : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!testing::have_solver()) {
      GTEST_SKIP() << "z3 not available";
    }
  }
};

TEST_F(Z3Test, UnsatAndSat) {
  Script s;
  s.logic = "QF_LRA";
  s.declare("x");
  s.assert_term(land({gt(var("x"), real(0)), lt(var("x"), real(0))}));
  EXPECT_EQ(run_solver(s, testing::solver_options()).status, SolverStatus::kUnsat);

  Script t;
  t.logic = "QF_LRA";
  t.declare("x");
  t.assert_term(land({gt(var("x"), real(3)), lt(var("x"), real(4))}));
  t.get_values = {"x"};
  const auto v = run_solver(t, testing::solver_options());
  ASSERT_EQ(v.status, SolverStatus::kSat);
  EXPECT_GT(v.model->at("x"), 3);
  EXPECT_LT(v.model->at("x"), 4);
}

TEST_F(Z3Test, TempFileMode) {
  Script s;
  s.declare("x");
  s.assert_term(eq(mul(real(2), var("x")), real(1)));
  s.get_values = {"x"};
  SolverOptions o = testing::solver_options();
  o.command = {testing::z3_path(), "-smt2"};
  o.use_temp_file = true;
  const auto v = run_solver(s, o);
  ASSERT_EQ(v.status, SolverStatus::kSat);
  EXPECT_EQ(v.model->at("x"), Rational(1, 2));
}

TEST_F(Z3Test, TinyTimeout) {
  Script s;
  s.declare("x");
  s.assert_term(gt(var("x"), real(0)));
  SolverOptions o = testing::solver_options();
  o.timeout_s = 0.000001;
  EXPECT_EQ(run_solver(s, o).status, SolverStatus::kTimeout);
}

}  // namespace
}  // namespace nnrepair
