#include "catch_amalgamated.hpp"

#include <array>
#include <random>

#include "redfin/concrete.hpp"
#include "redfin/hll.hpp"
#include "redfin/scalar.hpp"
#include "redfin/semantics.hpp"

using namespace redfin;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

namespace {

constexpr const char* energy_text = "abs(m[0] - m[1]) * (m[2] + m[3]) / 2";

int64_t eval4(const Expr& e, int64_t t1, int64_t t2, int64_t p1, int64_t p2) {
  ConcreteDomain dom;
  const std::array<int64_t, 4> cells{t1, t2, p1, p2};
  return eval_expr(dom, e, [&](MemoryAddress a) { return cells.at(a); });
}

ConcreteState run_compiled(const Expr& e, const std::vector<int64_t>& data,
                           CompileOptions opts = {}, unsigned steps = 2000) {
  ConcreteDomain dom;
  Engine<ConcreteDomain> eng(dom);
  return eng.simulate(StepBudget{steps},
                      eng.boot_state(Program::from_instructions(compile_expr(e, opts)), data));
}

}  // namespace

TEST_CASE("expression parsing honours precedence and associativity", "[hll]") {
  CHECK(eval4(*parse_expr("2 + 3 * 4"), 0, 0, 0, 0) == 14);
  CHECK(eval4(*parse_expr("(2 + 3) * 4"), 0, 0, 0, 0) == 20);
  CHECK(eval4(*parse_expr("10 - 3 - 4"), 0, 0, 0, 0) == 3);
  CHECK(eval4(*parse_expr("20 / 2 / 5"), 0, 0, 0, 0) == 2);
  CHECK(eval4(*parse_expr("2 * 3 + 4 * 5"), 0, 0, 0, 0) == 26);
  CHECK(eval4(*parse_expr("abs( 3 - 10 )"), 0, 0, 0, 0) == 7);
  CHECK(eval4(*parse_expr("m[1]"), 0, -9, 0, 0) == -9);
  CHECK(eval4(*parse_expr("-7"), 0, 0, 0, 0) == -7);
  CHECK(eval4(*parse_expr("3 - -4"), 0, 0, 0, 0) == 7);
  CHECK(eval4(*parse_expr("abs(abs(-5))"), 0, 0, 0, 0) == 5);
}

TEST_CASE("parse errors point at the offending offset", "[hll]") {
  CHECK_THROWS_MATCHES(parse_expr(""), HllError,
                       MessageMatches(ContainsSubstring("parse error at offset 0") &&
                                      ContainsSubstring("expected expression")));
  CHECK_THROWS_MATCHES(parse_expr("2 +"), HllError,
                       MessageMatches(ContainsSubstring("offset 3") &&
                                      ContainsSubstring("expected expression")));
  CHECK_THROWS_MATCHES(parse_expr("(1 + 2"), HllError,
                       MessageMatches(ContainsSubstring("expected ')'")));
  CHECK_THROWS_MATCHES(parse_expr("m[300]"), HllError,
                       MessageMatches(ContainsSubstring("memory cell out of range [0,255]")));
  CHECK_THROWS_MATCHES(parse_expr("m[x]"), HllError,
                       MessageMatches(ContainsSubstring("expected memory cell")));
  CHECK_THROWS_MATCHES(parse_expr("q[0]"), HllError,
                       MessageMatches(ContainsSubstring("unknown name 'q'")));
  CHECK_THROWS_MATCHES(parse_expr("1 2"), HllError,
                       MessageMatches(ContainsSubstring("unexpected trailing input")));
  CHECK_THROWS_MATCHES(parse_expr("@"), HllError,
                       MessageMatches(ContainsSubstring("unexpected character '@'")));
}

TEST_CASE("the evaluator uses machine division", "[hll]") {
  CHECK(eval4(*parse_expr("m[0] / m[1]"), 7, 0, 0, 0) == -1);
  CHECK(eval4(*parse_expr("m[0] / m[1]"), -7, 0, 0, 0) == 1);
  CHECK(eval4(*parse_expr("m[0] / m[1]"), scalar::min64, -1, 0, 0) == scalar::min64);
  CHECK(eval4(*parse_expr("m[0] / m[1]"), -7, 2, 0, 0) == -3);
  CHECK(eval4(*parse_expr("abs(m[0])"), scalar::min64, 0, 0, 0) == scalar::min64);
}

TEST_CASE("the energy estimate admits a negative value at full input range", "[hll]") {
  const auto e = parse_expr(energy_text);
  // A concrete witness: wildly large timestamps overflow the multiply and
  // drive the estimate negative even though every input is non-negative.
  const int64_t t1 = 5190405167614263295;
  const int64_t t2 = 0;
  const int64_t p1 = 149927859193384455;
  const int64_t p2 = 157447350457463356;
  CHECK(eval4(*e, t1, t2, p1, p2) == -1519183189988343841);

  // The compiled program lands on exactly the same value.
  const auto s = run_compiled(*e, {t1, t2, p1, p2, 0, 100});
  REQUIRE(s.flag(Flag::Halt));
  CHECK(s.regs[0] == -1519183189988343841);
}

TEST_CASE("the energy estimate compiles to twenty-one instructions", "[hll]") {
  const auto code = compile_expr(*parse_expr(energy_text));
  CHECK(code.size() == 21);
  CHECK(code.back() == make_instruction(Opcode::Halt));
  CHECK(compile_expr_body(*parse_expr(energy_text)).size() == 20);
  // r3 is reserved for the surrounding program.
  for (const Instruction& i : code) CHECK(i.reg != 3);
}

TEST_CASE("the compiled energy estimate runs end to end", "[hll]") {
  const auto s = run_compiled(*parse_expr(energy_text), {10, 5, 3, 5, 0, 100});
  REQUIRE(s.flag(Flag::Halt));
  CHECK(s.regs[0] == 20);
  CHECK(s.clock == 31);
  const Dump d = dump_state(s, 0, 5);
  CHECK(d.memory == std::vector<int64_t>{10, 5, 3, 5, 5, 100});  // stack pointer restored
}

TEST_CASE("stack and scratch cells are configurable", "[hll]") {
  CompileOptions opts;
  opts.stack_pointer_cell = 9;
  opts.temp_cell = 8;
  std::vector<int64_t> data(10, 0);
  data[0] = 10; data[1] = 5; data[2] = 3; data[3] = 5; data[9] = 100;
  const auto s = run_compiled(*parse_expr(energy_text), data, opts);
  REQUIRE(s.flag(Flag::Halt));
  CHECK(s.regs[0] == 20);
  CHECK(s.memory[9] == 100);  // the relocated stack pointer is restored too
  CHECK(s.memory[5] == 0);    // the default cells stay untouched
  CHECK(s.memory[4] == 0);
}

TEST_CASE("expressions touching reserved cells are rejected", "[hll]") {
  CHECK_THROWS_MATCHES(compile_expr(*parse_expr("m[5] + 1")), HllError,
                       MessageMatches(ContainsSubstring(
                           "stack pointer cell m[5] is used by the expression")));
  CHECK_THROWS_MATCHES(compile_expr(*parse_expr("m[0] * m[4]")), HllError,
                       MessageMatches(ContainsSubstring(
                           "scratch cell m[4] is used by the expression")));
  CompileOptions clash;
  clash.stack_pointer_cell = 7;
  clash.temp_cell = 7;
  CHECK_THROWS_MATCHES(compile_expr(*parse_expr("m[0]"), clash), HllError,
                       MessageMatches(ContainsSubstring(
                           "stack pointer cell and scratch cell collide at m[7]")));
  // Relocating the cells frees the defaults for data.
  CompileOptions moved;
  moved.stack_pointer_cell = 9;
  moved.temp_cell = 8;
  CHECK_NOTHROW(compile_expr(*parse_expr("m[5] + m[4]"), moved));
}

TEST_CASE("out-of-range constants and constant zero divisors are compile errors", "[hll]") {
  CHECK_THROWS_MATCHES(compile_expr(*parse_expr("m[0] + 300")), HllError,
                       MessageMatches(ContainsSubstring("constant out of range [-128,127]: 300")));
  CHECK_THROWS_MATCHES(compile_expr(*parse_expr("-200")), HllError,
                       MessageMatches(ContainsSubstring("-200")));
  CHECK_THROWS_MATCHES(compile_expr(*parse_expr("m[0] / 0")), HllError,
                       MessageMatches(ContainsSubstring("division by constant zero")));
  CHECK_NOTHROW(compile_expr(*parse_expr("m[0] + 127")));
  CHECK_NOTHROW(compile_expr(*parse_expr("m[0] - -128")));
  CHECK_NOTHROW(compile_expr(*parse_expr("m[0] / m[1]")));  // runtime zero is machine-defined
}

TEST_CASE("expressions deeper than the stack can hold are rejected", "[hll]") {
  ExprPtr e = Expr::var(0);
  for (int k = 0; k < 300; ++k) e = Expr::sub(Expr::abs(e), Expr::abs(Expr::var(1)));
  CHECK_THROWS_MATCHES(compile_expr(*e), HllError,
                       MessageMatches(ContainsSubstring("expression nests too deeply")));
  ExprPtr ok = Expr::var(0);
  for (int k = 0; k < 100; ++k) ok = Expr::sub(Expr::abs(ok), Expr::abs(Expr::var(1)));
  CHECK_NOTHROW(detail_hll::stack_depth(*ok));
}

namespace {

ExprPtr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> leaf_pick(0, 1);
  std::uniform_int_distribution<int> node_pick(0, 6);
  std::uniform_int_distribution<int> const_pick(-128, 127);
  const std::array<MemoryAddress, 6> cells{0, 1, 2, 3, 6, 7};
  std::uniform_int_distribution<size_t> cell_pick(0, cells.size() - 1);

  const int choice = depth == 0 ? leaf_pick(rng) : node_pick(rng);
  switch (choice) {
    case 0: return Expr::constant(const_pick(rng));
    case 1: return Expr::var(cells[cell_pick(rng)]);
    case 2: return Expr::abs(random_expr(rng, depth - 1));
    case 3: return Expr::add(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 4: return Expr::sub(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 5: return Expr::mul(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    default: {
      auto num = random_expr(rng, depth - 1);
      auto den = random_expr(rng, depth - 1);
      if (den->kind == Expr::Kind::Const && den->value == 0) den = Expr::constant(1);
      return Expr::div(std::move(num), std::move(den));
    }
  }
}

}  // namespace

TEST_CASE("compiled code agrees with the evaluator on random expressions", "[hll]") {
  std::mt19937_64 rng(20240821);
  std::uniform_int_distribution<uint64_t> bits;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto e = random_expr(rng, 4);

    std::array<int64_t, memory_size> mem{};
    for (MemoryAddress a : {0, 1, 2, 3, 6, 7}) mem[a] = scalar::to_signed(bits(rng));
    mem[5] = 200;  // stack base, growing downward

    ConcreteDomain dom;
    const int64_t want = eval_expr(dom, *e, [&](MemoryAddress a) { return mem[a]; });

    const auto s = run_compiled(*e, std::vector<int64_t>(mem.begin(), mem.end()));
    REQUIRE(s.flag(Flag::Halt));
    CHECK(s.regs[0] == want);
    CHECK(s.memory[5] == 200);  // stack fully popped
    for (MemoryAddress a : {0, 1, 2, 3, 6, 7}) CHECK(s.memory[a] == mem[a]);
    CHECK(s.regs[3] == 0);  // r3 untouched
  }
}
