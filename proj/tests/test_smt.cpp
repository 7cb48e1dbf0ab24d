#include "catch_amalgamated.hpp"

#include <string>
#include <vector>

#include "redfin/expr.hpp"
#include "redfin/smt.hpp"

using namespace redfin;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

namespace {

// Line index of the first line containing the needle, or -1.
int line_of(const std::string& script, const std::string& needle) {
  int line = 0;
  size_t pos = 0;
  while (pos < script.size()) {
    size_t eol = script.find('\n', pos);
    if (eol == std::string::npos) eol = script.size();
    if (script.substr(pos, eol - pos).find(needle) != std::string::npos) return line;
    pos = eol + 1;
    ++line;
  }
  return -1;
}

}  // namespace

TEST_CASE("scripts open with model production and the right logic", "[smt]") {
  Context ctx;
  const SymValue x = ctx.var("x", Sort::Bv64);
  const auto plain = smt::lower({ctx.eq(x, ctx.word(5))});
  CHECK(plain.script.rfind("(set-option :produce-models true)\n", 0) == 0);
  CHECK_THAT(plain.script, ContainsSubstring("(set-logic QF_BV)"));
  CHECK_FALSE(plain.uses_arrays);
  CHECK(plain.variables == std::vector<std::string>{"x"});
  CHECK_THAT(plain.script, ContainsSubstring("(check-sat)\n(get-model)\n"));
  CHECK_THAT(plain.script, !ContainsSubstring("get-objectives"));
  CHECK_THAT(plain.script, !ContainsSubstring(":timeout"));

  const SymValue a = ctx.array_var("mem");
  const auto arr = smt::lower({ctx.eq(ctx.select(a, ctx.byte(3)), ctx.word(5))});
  CHECK_THAT(arr.script, ContainsSubstring("(set-logic QF_ABV)"));
  CHECK(arr.uses_arrays);
  CHECK_THAT(arr.script,
             ContainsSubstring("(declare-const mem (Array (_ BitVec 8) (_ BitVec 64)))"));
}

TEST_CASE("the timeout option becomes a solver option line", "[smt]") {
  Context ctx;
  smt::LowerOptions opts;
  opts.timeout_ms = 2500;
  const auto low = smt::lower({ctx.eq(ctx.var("x", Sort::Bv64), ctx.word(0))}, opts);
  CHECK_THAT(low.script, ContainsSubstring("(set-option :timeout 2500)"));
  CHECK(line_of(low.script, ":produce-models") < line_of(low.script, ":timeout"));
  CHECK(line_of(low.script, ":timeout") < line_of(low.script, "set-logic"));
}

TEST_CASE("definitions appear in dependency order with stable names", "[smt]") {
  Context ctx;
  const SymValue x = ctx.var("x", Sort::Bv64);
  const SymValue sum = ctx.add(x, ctx.word(1));
  const SymValue goal = ctx.eq(sum, ctx.word(10));
  const auto low = smt::lower({goal});

  const std::string sum_def = "_n" + std::to_string(sum.node()->id);
  const std::string goal_def = "_n" + std::to_string(goal.node()->id);
  CHECK(line_of(low.script, "declare-const x") < line_of(low.script, sum_def));
  CHECK(line_of(low.script, "(define-fun " + sum_def + " () (_ BitVec 64) (bvadd x (_ bv1 64))") >= 0);
  CHECK(line_of(low.script, "(define-fun " + goal_def + " () Bool (= " + sum_def + " (_ bv10 64))") >= 0);
  CHECK(line_of(low.script, sum_def) < line_of(low.script, goal_def));
  CHECK(line_of(low.script, "(assert " + goal_def + ")") > line_of(low.script, goal_def));
}

TEST_CASE("lowering the same terms twice produces identical bytes", "[smt]") {
  const auto build = [] {
    Context ctx;
    const SymValue x = ctx.var("x", Sort::Bv64);
    const SymValue y = ctx.var("y", Sort::Bv64);
    const SymValue big = ctx.ite(ctx.slt(x, y), ctx.mul(y, ctx.word(3)),
                                 ctx.sub(ctx.shl(x, ctx.word(2)), y));
    smt::LowerOptions opts;
    opts.objective = smt::ObjectiveKind::Minimize;
    opts.objective_term = big;
    return smt::lower({ctx.sgt(big, ctx.word(-5))}, opts).script;
  };
  const std::string first = build();
  const std::string second = build();
  CHECK(first == second);  // fresh contexts, same construction order, same ids
}

TEST_CASE("negative and boolean constants render in solver syntax", "[smt]") {
  Context ctx;
  const SymValue x = ctx.var("x", Sort::Bv64);
  const auto low = smt::lower({ctx.eq(x, ctx.word(-1)), ctx.var("b", Sort::Bool)});
  CHECK_THAT(low.script, ContainsSubstring("(_ bv18446744073709551615 64)"));
  CHECK_THAT(low.script, ContainsSubstring("(declare-const b Bool)"));
  const auto t = smt::lower({ctx.eq(ctx.var("c", Sort::Bool), ctx.boolean(true))});
  CHECK_THAT(t.script, ContainsSubstring("(= c true)"));
}

TEST_CASE("width changes and byte extraction lower to indexed operators", "[smt]") {
  Context ctx;
  const SymValue a = ctx.var("a", Sort::Bv8);
  const SymValue w = ctx.var("w", Sort::Bv64);
  const auto low = smt::lower({
      ctx.eq(ctx.zero_extend(Sort::Bv64, a), ctx.word(9)),
      ctx.eq(ctx.sign_extend(Sort::Bv64, a), ctx.word(9)),
      ctx.eq(ctx.extract(7, 0, w), ctx.byte(9)),
  });
  CHECK_THAT(low.script, ContainsSubstring("((_ zero_extend 56) a)"));
  CHECK_THAT(low.script, ContainsSubstring("((_ sign_extend 56) a)"));
  CHECK_THAT(low.script, ContainsSubstring("((_ extract 7 0) w)"));
}

TEST_CASE("boolean and bitvector connectives pick the right operator", "[smt]") {
  Context ctx;
  const SymValue p = ctx.var("p", Sort::Bool);
  const SymValue q = ctx.var("q", Sort::Bool);
  const SymValue x = ctx.var("x", Sort::Bv64);
  const auto low = smt::lower({
      ctx.logic_and(p, q),
      ctx.logic_or(p, q),
      ctx.logic_not(p),
      ctx.eq(ctx.bit_and(x, x), ctx.bit_or(x, ctx.bit_xor(x, ctx.bit_not(x)))),
      ctx.eq(ctx.sdiv(x, ctx.word(2)), ctx.ashr(x, ctx.word(1))),
      ctx.ult(ctx.lshr(x, ctx.word(1)), ctx.word(4)),
  });
  CHECK_THAT(low.script, ContainsSubstring("(and p q)"));
  CHECK_THAT(low.script, ContainsSubstring("(or p q)"));
  CHECK_THAT(low.script, ContainsSubstring("(not p)"));
  CHECK_THAT(low.script, ContainsSubstring("(bvand x x)"));
  CHECK_THAT(low.script, ContainsSubstring("(bvxor x"));
  CHECK_THAT(low.script, ContainsSubstring("(bvnot x)"));
  CHECK_THAT(low.script, ContainsSubstring("(bvsdiv x"));
  CHECK_THAT(low.script, ContainsSubstring("(bvashr x"));
  CHECK_THAT(low.script, ContainsSubstring("(bvlshr x"));
  CHECK_THAT(low.script, ContainsSubstring("(bvult"));
}

TEST_CASE("objectives define an alias, optimize it, and query it", "[smt]") {
  Context ctx;
  const SymValue x = ctx.var("x", Sort::Bv64);
  smt::LowerOptions opts;
  opts.objective = smt::ObjectiveKind::Maximize;
  opts.objective_term = x;
  opts.objective_name = "clock";
  const auto low = smt::lower({ctx.ult(x, ctx.word(100))}, opts);
  CHECK_THAT(low.script, ContainsSubstring("(define-fun clock () (_ BitVec 64) x)"));
  CHECK_THAT(low.script, ContainsSubstring("(maximize clock)"));
  CHECK_THAT(low.script, ContainsSubstring("(get-objectives)"));
  CHECK(line_of(low.script, "(assert") < line_of(low.script, "(maximize"));
  CHECK(line_of(low.script, "(maximize") < line_of(low.script, "(check-sat)"));
  CHECK(line_of(low.script, "(get-model)") < line_of(low.script, "(get-objectives)"));

  smt::LowerOptions minopts;
  minopts.objective = smt::ObjectiveKind::Minimize;
  minopts.objective_term = x;
  CHECK_THAT(smt::lower({ctx.ult(x, ctx.word(100))}, minopts).script,
             ContainsSubstring("(minimize objective)"));
}

TEST_CASE("constant arrays are inlined as const casts", "[smt]") {
  Context ctx;
  // Force a surviving Select by storing through an unknown index first.
  const SymValue mem = ctx.var("mem", Sort::Array);
  const SymValue idx = ctx.var("i", Sort::Bv8);
  const auto low = smt::lower({ctx.eq(ctx.select(mem, idx), ctx.word(7))});
  CHECK_THAT(low.script, ContainsSubstring("(select mem i)"));
  CHECK(low.uses_arrays);
}

TEST_CASE("lowering rejects malformed requests", "[smt]") {
  Context ctx;
  const SymValue x = ctx.var("x", Sort::Bv64);
  CHECK_THROWS_MATCHES(smt::lower({x}), smt::LowerError,
                       MessageMatches(ContainsSubstring("assertion must be boolean")));
  CHECK_THROWS_MATCHES(smt::lower({SymValue{}}), smt::LowerError,
                       MessageMatches(ContainsSubstring("assertion must be boolean")));

  smt::LowerOptions opts;
  opts.objective = smt::ObjectiveKind::Minimize;  // term missing
  CHECK_THROWS_MATCHES(smt::lower({ctx.eq(x, x)}, opts), smt::LowerError,
                       MessageMatches(ContainsSubstring("objective term must be a 64-bit value")));

  opts.objective_term = ctx.eq(x, ctx.word(1));  // boolean, not Bv64
  CHECK_THROWS_AS(smt::lower({ctx.eq(x, x)}, opts), smt::LowerError);

  opts.objective_term = x;
  opts.objective_name = "9lives";
  CHECK_THROWS_MATCHES(smt::lower({ctx.eq(x, x)}, opts), smt::LowerError,
                       MessageMatches(ContainsSubstring("objective name must start with a letter")));
  opts.objective_name = "bad name";
  CHECK_THROWS_MATCHES(smt::lower({ctx.eq(x, x)}, opts), smt::LowerError,
                       MessageMatches(ContainsSubstring("invalid character")));
}

TEST_CASE("shared subterms are defined exactly once", "[smt]") {
  Context ctx;
  const SymValue x = ctx.var("x", Sort::Bv64);
  const SymValue shared = ctx.mul(x, x);
  const auto low = smt::lower({ctx.slt(shared, ctx.word(10)), ctx.sgt(shared, ctx.word(-10))});
  const std::string def = "(define-fun _n" + std::to_string(shared.node()->id);
  size_t first = low.script.find(def);
  REQUIRE(first != std::string::npos);
  CHECK(low.script.find(def, first + 1) == std::string::npos);
  CHECK(low.script.find("(declare-const x", low.script.find("(declare-const x") + 1) ==
        std::string::npos);
}
