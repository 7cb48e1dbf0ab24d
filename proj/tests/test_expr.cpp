#include "catch_amalgamated.hpp"

#include <vector>

#include "redfin/expr.hpp"
#include "redfin/scalar.hpp"

using namespace redfin;

namespace {

const std::vector<int64_t> boundary = {scalar::min64, scalar::min64 + 1, -2, -1, 0,
                                       1,             2,                 scalar::max64 - 1,
                                       scalar::max64};

int64_t require_word(Context& ctx, SymValue v) {
  auto k = ctx.known_int(v);
  REQUIRE(k.has_value());
  return *k;
}

bool require_bool(Context& ctx, SymValue v) {
  auto k = ctx.known_bool(v);
  REQUIRE(k.has_value());
  return *k;
}

}  // namespace

TEST_CASE("constant arithmetic folds exactly to the two's-complement scalars", "[expr]") {
  Context ctx;
  for (int64_t a : boundary)
    for (int64_t b : boundary) {
      const SymValue wa = ctx.word(a), wb = ctx.word(b);
      CHECK(require_word(ctx, ctx.add(wa, wb)) == scalar::add(a, b));
      CHECK(require_word(ctx, ctx.sub(wa, wb)) == scalar::sub(a, b));
      CHECK(require_word(ctx, ctx.mul(wa, wb)) == scalar::mul(a, b));
      CHECK(require_word(ctx, ctx.sdiv(wa, wb)) == scalar::sdiv(a, b));
      CHECK(require_word(ctx, ctx.bit_and(wa, wb)) == scalar::bit_and(a, b));
      CHECK(require_word(ctx, ctx.bit_or(wa, wb)) == scalar::bit_or(a, b));
      CHECK(require_word(ctx, ctx.bit_xor(wa, wb)) == scalar::bit_xor(a, b));
      CHECK(require_word(ctx, ctx.shl(wa, wb)) == scalar::shl(a, scalar::to_unsigned(b)));
      CHECK(require_word(ctx, ctx.lshr(wa, wb)) == scalar::lshr(a, scalar::to_unsigned(b)));
      CHECK(require_word(ctx, ctx.ashr(wa, wb)) == scalar::ashr(a, scalar::to_unsigned(b)));
      CHECK(require_bool(ctx, ctx.eq(wa, wb)) == (a == b));
      CHECK(require_bool(ctx, ctx.slt(wa, wb)) == scalar::slt(a, b));
      CHECK(require_bool(ctx, ctx.sgt(wa, wb)) == scalar::sgt(a, b));
      CHECK(require_bool(ctx, ctx.ult(wa, wb)) == scalar::ult(a, b));
    }
  for (int64_t a : boundary) {
    CHECK(require_word(ctx, ctx.neg(ctx.word(a))) == scalar::neg(a));
    CHECK(require_word(ctx, ctx.bit_not(ctx.word(a))) == scalar::bit_not(a));
  }
}

TEST_CASE("division and shift conventions match the solver's theory", "[expr]") {
  Context ctx;
  // Division by zero yields all-ones for non-negative dividends, one otherwise.
  CHECK(require_word(ctx, ctx.sdiv(ctx.word(7), ctx.word(0))) == -1);
  CHECK(require_word(ctx, ctx.sdiv(ctx.word(0), ctx.word(0))) == -1);
  CHECK(require_word(ctx, ctx.sdiv(ctx.word(-7), ctx.word(0))) == 1);
  // The lone signed-division overflow case wraps.
  CHECK(require_word(ctx, ctx.sdiv(ctx.word(scalar::min64), ctx.word(-1))) == scalar::min64);
  // Truncation toward zero.
  CHECK(require_word(ctx, ctx.sdiv(ctx.word(7), ctx.word(2))) == 3);
  CHECK(require_word(ctx, ctx.sdiv(ctx.word(-7), ctx.word(2))) == -3);
  CHECK(require_word(ctx, ctx.sdiv(ctx.word(7), ctx.word(-2))) == -3);
  // Shifts of 64 or more drain the word (sign-fill for arithmetic shift).
  CHECK(require_word(ctx, ctx.shl(ctx.word(1), ctx.word(64))) == 0);
  CHECK(require_word(ctx, ctx.lshr(ctx.word(-1), ctx.word(64))) == 0);
  CHECK(require_word(ctx, ctx.ashr(ctx.word(-1), ctx.word(200))) == -1);
  CHECK(require_word(ctx, ctx.ashr(ctx.word(5), ctx.word(200))) == 0);
  CHECK(require_word(ctx, ctx.lshr(ctx.word(-1), ctx.word(1))) == scalar::max64);
}

TEST_CASE("identical constructions share one node", "[expr]") {
  Context ctx;
  const SymValue x = ctx.var("x", Sort::Bv64);
  const SymValue y = ctx.var("y", Sort::Bv64);
  const SymValue s1 = ctx.add(x, y);
  const SymValue s2 = ctx.add(x, y);
  CHECK(s1 == s2);  // pointer identity through the intern table
  const SymValue p = ctx.mul(s1, s2);
  CHECK(p.node()->child[0] == p.node()->child[1]);
  CHECK_FALSE(ctx.add(y, x) == s1);  // no commutative normalization
  CHECK(ctx.word(42) == ctx.word(42));
  CHECK_FALSE(ctx.word(42) == ctx.word(43));
}

TEST_CASE("node identifiers reproduce across contexts built the same way", "[expr]") {
  auto build = [](Context& ctx) {
    const SymValue x = ctx.var("x", Sort::Bv64);
    return ctx.mul(ctx.add(x, ctx.word(1)), ctx.sub(x, ctx.word(1)));
  };
  Context c1, c2;
  const SymValue a = build(c1), b = build(c2);
  CHECK(a.node()->id == b.node()->id);
  CHECK(a.node()->child[0]->id == b.node()->child[0]->id);
}

TEST_CASE("if-then-else folds only on sound grounds", "[expr]") {
  Context ctx;
  const SymValue x = ctx.var("x", Sort::Bv64);
  const SymValue y = ctx.var("y", Sort::Bv64);
  const SymValue c = ctx.var("c", Sort::Bool);

  CHECK(ctx.ite(ctx.boolean(true), x, y) == x);
  CHECK(ctx.ite(ctx.boolean(false), x, y) == y);
  CHECK(ctx.ite(c, x, x) == x);  // equal branches collapse

  const SymValue kept = ctx.ite(c, x, y);
  CHECK(kept.node()->kind == Kind::Ite);

  // x == x must NOT fold: two occurrences of one variable are never assumed
  // equal by the rewriter (that is the solver's judgement to make).
  const SymValue self_eq = ctx.eq(x, x);
  CHECK_FALSE(ctx.known_bool(self_eq).has_value());
}

TEST_CASE("boolean connectives fold their constant sides", "[expr]") {
  Context ctx;
  const SymValue c = ctx.var("c", Sort::Bool);
  CHECK(require_bool(ctx, ctx.logic_and(ctx.boolean(true), ctx.boolean(false))) == false);
  CHECK(require_bool(ctx, ctx.logic_or(ctx.boolean(true), ctx.boolean(false))) == true);
  CHECK(require_bool(ctx, ctx.logic_not(ctx.boolean(true))) == false);
  // Symbolic operands stay symbolic.
  CHECK_FALSE(ctx.known_bool(ctx.logic_and(c, ctx.var("d", Sort::Bool))).has_value());
}

TEST_CASE("width changes fold on constants", "[expr]") {
  Context ctx;
  CHECK(require_word(ctx, ctx.zero_extend(Sort::Bv64, ctx.byte(0xff))) == 255);
  CHECK(require_word(ctx, ctx.sign_extend(Sort::Bv64, ctx.byte(0xff))) == -1);
  CHECK(require_word(ctx, ctx.sign_extend(Sort::Bv64, ctx.byte(0x7f))) == 127);
  CHECK(require_word(ctx, ctx.zero_extend(Sort::Bv64, ctx.code16(0xbeef))) == 0xbeef);

  const SymValue low = ctx.extract(7, 0, ctx.code16(0xbeef));
  REQUIRE(low.sort() == Sort::Bv8);
  auto k = ctx.known_int(low);
  REQUIRE(k.has_value());
  CHECK((*k & 0xff) == 0xef);
}

TEST_CASE("select over a constant array folds to the default", "[expr]") {
  Context ctx;
  const SymValue arr = ctx.const_array(ctx.word(9));
  const SymValue i = ctx.var("i", Sort::Bv8);
  CHECK(require_word(ctx, ctx.select(arr, i)) == 9);
  // Over an array variable nothing is known.
  const SymValue av = ctx.array_var("mem");
  CHECK_FALSE(ctx.known_int(ctx.select(av, i)).has_value());
}

TEST_CASE("variable names are validated and unique", "[expr]") {
  Context ctx;
  CHECK_NOTHROW(ctx.var("x1", Sort::Bv64));
  CHECK_THROWS_AS(ctx.var("x1", Sort::Bv64), SortError);   // duplicate
  CHECK_THROWS_AS(ctx.var("1x", Sort::Bv64), SortError);   // digit first
  CHECK_THROWS_AS(ctx.var("", Sort::Bv64), SortError);
  CHECK_THROWS_AS(ctx.var("a b", Sort::Bv64), SortError);  // space
  CHECK_NOTHROW(ctx.var("a_b", Sort::Bv64));
}

TEST_CASE("sort mismatches are rejected at construction", "[expr]") {
  Context ctx;
  const SymValue w = ctx.word(1);
  const SymValue b = ctx.boolean(true);
  const SymValue a8 = ctx.byte(1);
  CHECK_THROWS_AS(ctx.add(w, b), SortError);
  CHECK_THROWS_AS(ctx.add(w, a8), SortError);
  CHECK_THROWS_AS(ctx.logic_and(w, w), SortError);
  CHECK_THROWS_AS(ctx.ite(w, w, w), SortError);          // condition not bool
  CHECK_THROWS_AS(ctx.ite(b, w, b), SortError);          // branch sorts differ
  CHECK_THROWS_AS(ctx.slt(w, a8), SortError);
  CHECK_THROWS_AS(ctx.select(w, a8), SortError);         // not an array
  CHECK_THROWS_AS(ctx.eq(w, b), SortError);
}

TEST_CASE("known values are reported only for constants", "[expr]") {
  Context ctx;
  CHECK(ctx.known_int(ctx.word(-5)) == -5);
  CHECK(ctx.known_bool(ctx.boolean(false)) == false);
  CHECK_FALSE(ctx.known_int(ctx.var("v", Sort::Bv64)).has_value());
  CHECK_FALSE(ctx.known_bool(ctx.var("w", Sort::Bool)).has_value());
  const SymValue sum = ctx.add(ctx.var("v2", Sort::Bv64), ctx.word(0));
  CHECK_FALSE(ctx.known_int(sum).has_value());  // no algebraic identities
}
