#pragma once

// Program verification against declarative property specifications.
//
// A property names symbolic inputs bound to data memory cells, constrains
// them, runs the program for a bounded number of steps, and states a goal
// over the final machine state. The goal language:
//
//   atoms       input names, reg(r0..r3), mem(N), flag(Condition |
//               Overflow | Halt), clock, integer literals, abs(e),
//               ms_of_years(N), mw_of_watts(N)
//   arithmetic  + - * /  (machine semantics: 64-bit wrap-around, signed
//               division)  and unary minus
//   compare     == (or =), !=, <, <=, >, >=   (signed)
//   logic       &&, ||, !
//
// The same parsed goal evaluates over symbolic state (to pose the query)
// and over concrete state (to independently confirm a counter-example by
// re-simulation). Verdicts:
//
//   verify              hypotheses entail the goal, or a confirmed
//                       counter-example assignment of the inputs
//   check_equivalence   two programs agree on an observable for all inputs
//   timing_bounds       least and greatest final clock values, with
//                       witness inputs for each
//
// Counter-examples and timing witnesses are always re-simulated concretely;
// a claimed model that fails re-simulation is reported as Unknown rather
// than passed along.

#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "redfin/concrete.hpp"
#include "redfin/semantics.hpp"
#include "redfin/solver.hpp"
#include "redfin/state.hpp"
#include "redfin/symbolic.hpp"

namespace redfin {

struct VerifyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputSpec {
  std::string name;
  MemoryAddress cell = 0;
};

struct PropertySpec {
  std::vector<InputSpec> inputs;
  std::vector<std::string> constraints;
  unsigned steps = 100;
  std::string goal;                // required by verify()
  bool penalty = false;            // cycle penalty for abs on negative values
  std::vector<int64_t> data;       // initial data memory image
  std::string observable;          // for check_equivalence; default "reg(r0)"
};

// ---------------------------------------------------------------------------
// Goal expressions

struct GoalNode;
using GoalPtr = std::shared_ptr<const GoalNode>;

struct GoalNode {
  enum class Op {
    Const, Input, Reg, Mem, FlagRef, Clock,
    Abs, Neg, Add, Sub, Mul, Div,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or, Not,
  };
  Op op;
  int64_t value = 0;       // Const
  std::string name;        // Input
  unsigned index = 0;      // Reg (0..3) / Mem (0..255)
  Flag flag = Flag::Halt;  // FlagRef
  GoalPtr lhs, rhs;
};

namespace detail_goal {

inline constexpr int64_t ms_per_year = int64_t{366} * 24 * 60 * 60 * 1000;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  GoalPtr parse() {
    auto e = or_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  static GoalPtr mk(GoalNode n) { return std::make_shared<GoalNode>(std::move(n)); }

  GoalPtr or_expr() {
    auto e = and_expr();
    while (eat_op("||")) e = mk({GoalNode::Op::Or, 0, "", 0, Flag::Halt, e, and_expr()});
    return e;
  }

  GoalPtr and_expr() {
    auto e = cmp_expr();
    while (eat_op("&&")) e = mk({GoalNode::Op::And, 0, "", 0, Flag::Halt, e, cmp_expr()});
    return e;
  }

  GoalPtr cmp_expr() {
    auto e = add_expr();
    skip_ws();
    GoalNode::Op op;
    if (eat_op("==") || eat_op("=")) op = GoalNode::Op::Eq;
    else if (eat_op("!=")) op = GoalNode::Op::Ne;
    else if (eat_op("<=")) op = GoalNode::Op::Le;
    else if (eat_op(">=")) op = GoalNode::Op::Ge;
    else if (eat_op("<")) op = GoalNode::Op::Lt;
    else if (eat_op(">")) op = GoalNode::Op::Gt;
    else return e;
    return mk({op, 0, "", 0, Flag::Halt, e, add_expr()});
  }

  GoalPtr add_expr() {
    auto e = mul_expr();
    for (;;) {
      skip_ws();
      if (eat_op("+")) e = mk({GoalNode::Op::Add, 0, "", 0, Flag::Halt, e, mul_expr()});
      else if (peek_minus()) {
        ++pos_;
        e = mk({GoalNode::Op::Sub, 0, "", 0, Flag::Halt, e, mul_expr()});
      } else
        return e;
    }
  }

  GoalPtr mul_expr() {
    auto e = unary_expr();
    for (;;) {
      skip_ws();
      if (eat_op("*")) e = mk({GoalNode::Op::Mul, 0, "", 0, Flag::Halt, e, unary_expr()});
      else if (eat_op("/")) e = mk({GoalNode::Op::Div, 0, "", 0, Flag::Halt, e, unary_expr()});
      else return e;
    }
  }

  GoalPtr unary_expr() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '!' &&
        (pos_ + 1 >= text_.size() || text_[pos_ + 1] != '=')) {
      ++pos_;
      return mk({GoalNode::Op::Not, 0, "", 0, Flag::Halt, unary_expr(), nullptr});
    }
    if (pos_ < text_.size() && text_[pos_] == '-') {
      ++pos_;
      return mk({GoalNode::Op::Neg, 0, "", 0, Flag::Halt, unary_expr(), nullptr});
    }
    return atom();
  }

  GoalPtr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = or_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return mk({GoalNode::Op::Const, number(), "", 0, Flag::Halt, nullptr, nullptr});
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::string word = identifier();
      if (word == "reg") return reg_ref();
      if (word == "mem") return mem_ref();
      if (word == "flag") return flag_ref();
      if (word == "clock") return mk({GoalNode::Op::Clock, 0, "", 0, Flag::Halt, nullptr, nullptr});
      if (word == "abs") {
        expect('(');
        auto e = or_expr();
        expect(')');
        return mk({GoalNode::Op::Abs, 0, "", 0, Flag::Halt, e, nullptr});
      }
      if (word == "ms_of_years") return scaled_const(ms_per_year);
      if (word == "mw_of_watts") return scaled_const(1000);
      return mk({GoalNode::Op::Input, 0, word, 0, Flag::Halt, nullptr, nullptr});
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  GoalPtr reg_ref() {
    expect('(');
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == 'r') ++pos_;
    const int64_t idx = number();
    if (idx < 0 || idx > 3) fail("register index out of range r0..r3");
    expect(')');
    return mk({GoalNode::Op::Reg, 0, "", static_cast<unsigned>(idx), Flag::Halt, nullptr, nullptr});
  }

  GoalPtr mem_ref() {
    expect('(');
    skip_ws();
    const int64_t idx = number();
    if (idx < 0 || idx > 255) fail("memory address out of range [0,255]");
    expect(')');
    return mk({GoalNode::Op::Mem, 0, "", static_cast<unsigned>(idx), Flag::Halt, nullptr, nullptr});
  }

  GoalPtr flag_ref() {
    expect('(');
    skip_ws();
    const std::string word = identifier();
    Flag f;
    if (word == "Condition" || word == "condition") f = Flag::Condition;
    else if (word == "Overflow" || word == "overflow") f = Flag::Overflow;
    else if (word == "Halt" || word == "halt") f = Flag::Halt;
    else fail("unknown flag '" + word + "' (Condition, Overflow, Halt)");
    expect(')');
    return mk({GoalNode::Op::FlagRef, 0, "", 0, f, nullptr, nullptr});
  }

  GoalPtr scaled_const(int64_t scale) {
    expect('(');
    skip_ws();
    const int64_t n = number();
    expect(')');
    return mk({GoalNode::Op::Const, n * scale, "", 0, Flag::Halt, nullptr, nullptr});
  }

  int64_t number() {
    skip_ws();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      fail("expected a number");
    uint64_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const uint64_t d = static_cast<uint64_t>(text_[pos_] - '0');
      if (v > (~uint64_t{0} - d) / 10) fail("number literal too large");
      v = v * 10 + d;
      ++pos_;
    }
    if (v > uint64_t{1} << 63) fail("number literal exceeds 64-bit signed range");
    return static_cast<int64_t>(v);  // 2^63 itself wraps to INT64_MIN under unary minus
  }

  std::string identifier() {
    if (pos_ >= text_.size() ||
        !(std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      fail("expected a name");
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  bool eat_op(std::string_view op) {
    skip_ws();
    if (text_.substr(pos_).rfind(op, 0) != 0) return false;
    // "=" must not eat half of "=="; "<" not half of "<="; handled by caller order.
    pos_ += op.size();
    return true;
  }

  // A '-' that begins a subtraction, not part of an operator.
  bool peek_minus() {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == '-';
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw VerifyError("goal parse error at offset " + std::to_string(pos_) + ": " + message);
  }

  std::string_view text_;
  size_t pos_ = 0;
};

}  // namespace detail_goal

inline GoalPtr parse_goal(std::string_view text) { return detail_goal::Parser(text).parse(); }

// Memory cells a goal expression reads.
inline void collect_mem_refs(const GoalNode& g, std::set<unsigned>& out) {
  if (g.op == GoalNode::Op::Mem) out.insert(g.index);
  if (g.lhs) collect_mem_refs(*g.lhs, out);
  if (g.rhs) collect_mem_refs(*g.rhs, out);
}

// Evaluate a goal over a machine state and an input assignment. Number- and
// truth-valued subexpressions are kept apart; mixing them is an error.
template <typename D>
class GoalEval {
 public:
  using W = typename D::Word;
  using B = typename D::Bool;

  GoalEval(const D& dom, const MachineState<D>& state, const std::map<std::string, W>& inputs)
      : dom_(dom), state_(state), inputs_(inputs) {}

  B boolean(const GoalNode& g) const {
    const Value v = eval(g);
    if (!v.is_bool) throw VerifyError("goal: expected a condition, found a number");
    return v.b;
  }

  W word(const GoalNode& g) const {
    const Value v = eval(g);
    if (v.is_bool) throw VerifyError("goal: expected a number, found a condition");
    return v.w;
  }

 private:
  struct Value {
    bool is_bool = false;
    W w{};
    B b{};
  };

  static Value wordv(W w) { return {false, w, {}}; }
  static Value boolv(B b) { return {true, {}, b}; }

  Value eval(const GoalNode& g) const {
    using Op = GoalNode::Op;
    switch (g.op) {
      case Op::Const: return wordv(dom_.word(g.value));
      case Op::Input: {
        auto it = inputs_.find(g.name);
        if (it == inputs_.end()) throw VerifyError("goal: unknown input '" + g.name + "'");
        return wordv(it->second);
      }
      case Op::Reg: return wordv(state_.regs[g.index]);
      case Op::Mem: return wordv(dom_.mem_read(state_.memory, dom_.addr(static_cast<uint8_t>(g.index))));
      case Op::FlagRef: return boolv(state_.flag(g.flag));
      case Op::Clock: return wordv(state_.clock);
      case Op::Abs: {
        const W x = word(*g.lhs);
        return wordv(dom_.ite_word(dom_.slt(x, dom_.word(0)), dom_.neg(x), x));
      }
      case Op::Neg: return wordv(dom_.sub(dom_.word(0), word(*g.lhs)));
      case Op::Add: return wordv(dom_.add(word(*g.lhs), word(*g.rhs)));
      case Op::Sub: return wordv(dom_.sub(word(*g.lhs), word(*g.rhs)));
      case Op::Mul: return wordv(dom_.mul(word(*g.lhs), word(*g.rhs)));
      case Op::Div: return wordv(dom_.sdiv(word(*g.lhs), word(*g.rhs)));
      case Op::Eq: return boolv(cmp_eq(*g.lhs, *g.rhs));
      case Op::Ne: return boolv(dom_.logic_not(cmp_eq(*g.lhs, *g.rhs)));
      case Op::Lt: return boolv(dom_.slt(word(*g.lhs), word(*g.rhs)));
      case Op::Le: return boolv(dom_.logic_not(dom_.sgt(word(*g.lhs), word(*g.rhs))));
      case Op::Gt: return boolv(dom_.sgt(word(*g.lhs), word(*g.rhs)));
      case Op::Ge: return boolv(dom_.logic_not(dom_.slt(word(*g.lhs), word(*g.rhs))));
      case Op::And: return boolv(dom_.logic_and(boolean(*g.lhs), boolean(*g.rhs)));
      case Op::Or: return boolv(dom_.logic_or(boolean(*g.lhs), boolean(*g.rhs)));
      case Op::Not: return boolv(dom_.logic_not(boolean(*g.lhs)));
    }
    throw VerifyError("goal: corrupt expression node");
  }

  // == works on two numbers or two conditions.
  B cmp_eq(const GoalNode& a, const GoalNode& b) const {
    const Value va = eval(a), vb = eval(b);
    if (va.is_bool != vb.is_bool) throw VerifyError("goal: == mixes a number with a condition");
    if (va.is_bool)
      return dom_.logic_or(dom_.logic_and(va.b, vb.b),
                           dom_.logic_and(dom_.logic_not(va.b), dom_.logic_not(vb.b)));
    return dom_.eq(va.w, vb.w);
  }

  const D& dom_;
  const MachineState<D>& state_;
  const std::map<std::string, W>& inputs_;
};

// ---------------------------------------------------------------------------
// Verification drivers

struct CounterExample {
  std::vector<std::pair<std::string, int64_t>> inputs;  // in spec order
  ConcreteState final_state{};   // from concrete re-simulation
  bool confirmed = false;        // re-simulation agreed with the solver
  std::vector<int64_t> observed; // observables, for equivalence reports
};

struct VerificationResult {
  Outcome outcome = Outcome::Unknown;
  CounterExample cex;     // when Falsified
  std::string detail;
  std::string script;     // the emitted solver script of the main query
  QueryStats stats;
};

struct TimingBound {
  int64_t cycles = 0;
  std::vector<std::pair<std::string, int64_t>> witness;  // inputs attaining it
};

struct TimingResult {
  Outcome outcome = Outcome::Unknown;  // Proven when both bounds exist
  TimingBound best;
  TimingBound worst;
  std::string detail;
  QueryStats stats;
};

namespace detail_verify {

struct SymbolicSetup {
  SymbolicState state;
  std::map<std::string, SymValue> inputs;  // name -> variable
};

inline void check_spec(const PropertySpec& spec) {
  std::set<std::string> names;
  std::set<unsigned> cells;
  for (const auto& in : spec.inputs) {
    if (!names.insert(in.name).second)
      throw VerifyError("duplicate input name '" + in.name + "'");
    if (!cells.insert(in.cell).second)
      throw VerifyError("two inputs bound to cell " + std::to_string(in.cell));
  }
  if (spec.data.size() > memory_size)
    throw VerifyError("initial data exceeds memory size");
}

inline SymbolicSetup boot_symbolic(SymbolicDomain& dom, std::shared_ptr<const Program> program,
                                   const PropertySpec& spec, const std::string& var_prefix = "") {
  std::vector<SymValue> data;
  data.reserve(spec.data.size());
  for (int64_t v : spec.data) data.push_back(dom.word(v));
  SymbolicSetup setup{boot(dom, std::move(program), data), {}};
  for (const auto& in : spec.inputs) {
    const SymValue v = dom.ctx->var(var_prefix + in.name, Sort::Bv64);
    setup.inputs.emplace(in.name, v);
    dom.mem_write(setup.state.memory, dom.addr(in.cell), v);
  }
  return setup;
}

inline std::vector<SymValue> constraint_terms(SymbolicDomain& dom,
                                              const SymbolicSetup& setup,
                                              const PropertySpec& spec) {
  std::vector<SymValue> out;
  out.reserve(spec.constraints.size());
  for (const std::string& text : spec.constraints) {
    const auto parsed = parse_goal(text);
    out.push_back(GoalEval<SymbolicDomain>(dom, setup.state, setup.inputs).boolean(*parsed));
  }
  return out;
}

// Concrete input values a model assigns (unconstrained inputs read as 0).
inline std::vector<std::pair<std::string, int64_t>> inputs_from_model(
    const PropertySpec& spec, const Model& model, const std::string& var_prefix = "") {
  std::vector<std::pair<std::string, int64_t>> out;
  out.reserve(spec.inputs.size());
  for (const auto& in : spec.inputs)
    out.emplace_back(in.name, model.word(var_prefix + in.name).value_or(0));
  return out;
}

inline ConcreteState boot_concrete(ConcreteDomain& dom,
                                   std::shared_ptr<const Program> program,
                                   const PropertySpec& spec,
                                   const std::vector<std::pair<std::string, int64_t>>& inputs) {
  ConcreteState s = boot(dom, std::move(program), spec.data);
  std::map<std::string, int64_t> by_name(inputs.begin(), inputs.end());
  for (const auto& in : spec.inputs)
    dom.mem_write(s.memory, dom.addr(in.cell), by_name.at(in.name));
  return s;
}

inline std::map<std::string, int64_t> input_map(
    const std::vector<std::pair<std::string, int64_t>>& inputs) {
  return {inputs.begin(), inputs.end()};
}

}  // namespace detail_verify

// Does the program satisfy the property for every admissible input?
inline VerificationResult verify(std::shared_ptr<const Program> program, const PropertySpec& spec,
                                 const SolverConfig& cfg) {
  detail_verify::check_spec(spec);
  if (spec.goal.empty()) throw VerifyError("property has no goal");
  const auto goal_ast = parse_goal(spec.goal);

  Context ctx;
  SymbolicDomain dom(ctx);
  SymbolicEngine engine(dom, CycleModel{spec.penalty});
  auto setup = detail_verify::boot_symbolic(dom, program, spec);
  const auto hypotheses = detail_verify::constraint_terms(dom, setup, spec);
  const SymbolicState final_state = engine.simulate(StepBudget{spec.steps}, setup.state);
  const SymValue goal =
      GoalEval<SymbolicDomain>(dom, final_state, setup.inputs).boolean(*goal_ast);

  VerificationResult result;
  const ProveResult pr = prove(ctx, hypotheses, goal, cfg, &result.stats);
  result.detail = pr.detail;
  result.script = pr.script;
  switch (pr.outcome) {
    case Outcome::Proven:
      result.outcome = Outcome::Proven;
      return result;
    case Outcome::Unknown:
      result.outcome = Outcome::Unknown;
      return result;
    case Outcome::Falsified:
      break;
  }

  // Independent confirmation: rerun the counter-example concretely and
  // re-evaluate the goal on the resulting state.
  result.cex.inputs = detail_verify::inputs_from_model(spec, pr.model);
  ConcreteDomain cdom;
  ConcreteEngine cengine(cdom, CycleModel{spec.penalty});
  ConcreteState cs = detail_verify::boot_concrete(cdom, program, spec, result.cex.inputs);
  cs = cengine.simulate(StepBudget{spec.steps}, cs);
  result.cex.final_state = cs;
  const auto cinputs = detail_verify::input_map(result.cex.inputs);
  const bool goal_holds =
      GoalEval<ConcreteDomain>(cdom, cs, cinputs).boolean(*goal_ast);
  result.cex.confirmed = !goal_holds;
  if (!result.cex.confirmed) {
    result.outcome = Outcome::Unknown;
    result.detail = "counter-example failed concrete re-simulation";
    return result;
  }
  result.outcome = Outcome::Falsified;
  return result;
}

// Do two programs agree on an observable for every admissible input?
inline VerificationResult check_equivalence(std::shared_ptr<const Program> program_a,
                                            std::shared_ptr<const Program> program_b,
                                            const PropertySpec& spec, const SolverConfig& cfg) {
  detail_verify::check_spec(spec);
  const std::string obs_text = spec.observable.empty() ? "reg(r0)" : spec.observable;
  const auto obs_ast = parse_goal(obs_text);

  Context ctx;
  SymbolicDomain dom(ctx);
  SymbolicEngine engine(dom, CycleModel{spec.penalty});

  // One shared set of input variables feeds both programs.
  auto setup_a = detail_verify::boot_symbolic(dom, program_a, spec);
  SymbolicState boot_b = boot(dom, program_b, [&] {
    std::vector<SymValue> data;
    for (int64_t v : spec.data) data.push_back(dom.word(v));
    return data;
  }());
  for (const auto& in : spec.inputs)
    dom.mem_write(boot_b.memory, dom.addr(in.cell), setup_a.inputs.at(in.name));

  const auto hypotheses = detail_verify::constraint_terms(dom, setup_a, spec);
  const SymbolicState final_a = engine.simulate(StepBudget{spec.steps}, setup_a.state);
  const SymbolicState final_b = engine.simulate(StepBudget{spec.steps}, boot_b);
  const SymValue obs_a = GoalEval<SymbolicDomain>(dom, final_a, setup_a.inputs).word(*obs_ast);
  const SymValue obs_b = GoalEval<SymbolicDomain>(dom, final_b, setup_a.inputs).word(*obs_ast);

  VerificationResult result;
  const ProveResult pr = prove(ctx, hypotheses, ctx.eq(obs_a, obs_b), cfg, &result.stats);
  result.detail = pr.detail;
  result.script = pr.script;
  if (pr.outcome != Outcome::Falsified) {
    result.outcome = pr.outcome;
    return result;
  }

  result.cex.inputs = detail_verify::inputs_from_model(spec, pr.model);
  ConcreteDomain cdom;
  ConcreteEngine cengine(cdom, CycleModel{spec.penalty});
  const auto cinputs = detail_verify::input_map(result.cex.inputs);
  int64_t observed[2];
  std::shared_ptr<const Program> progs[2] = {program_a, program_b};
  for (int k = 0; k < 2; ++k) {
    ConcreteState cs = detail_verify::boot_concrete(cdom, progs[k], spec, result.cex.inputs);
    cs = cengine.simulate(StepBudget{spec.steps}, cs);
    observed[k] = GoalEval<ConcreteDomain>(cdom, cs, cinputs).word(*obs_ast);
    if (k == 0) result.cex.final_state = cs;
  }
  result.cex.observed = {observed[0], observed[1]};
  result.cex.confirmed = observed[0] != observed[1];
  if (!result.cex.confirmed) {
    result.outcome = Outcome::Unknown;
    result.detail = "counter-example failed concrete re-simulation";
    return result;
  }
  result.outcome = Outcome::Falsified;
  return result;
}

// Least and greatest number of cycles to termination over admissible inputs.
inline TimingResult timing_bounds(std::shared_ptr<const Program> program,
                                  const PropertySpec& spec, const SolverConfig& cfg) {
  detail_verify::check_spec(spec);

  Context ctx;
  SymbolicDomain dom(ctx);
  SymbolicEngine engine(dom, CycleModel{spec.penalty});
  auto setup = detail_verify::boot_symbolic(dom, program, spec);
  const auto hypotheses = detail_verify::constraint_terms(dom, setup, spec);
  const SymbolicState final_state = engine.simulate(StepBudget{spec.steps}, setup.state);

  TimingResult result;

  // The clock only measures terminated runs; demand a proof of halting first.
  const ProveResult halt_pr =
      prove(ctx, hypotheses, final_state.flag(Flag::Halt), cfg, &result.stats);
  if (halt_pr.outcome != Outcome::Proven) {
    result.outcome = Outcome::Unknown;
    result.detail = halt_pr.outcome == Outcome::Falsified
                        ? "program may not halt within the step budget"
                        : "halting check failed: " + halt_pr.detail;
    return result;
  }

  const Optimum best =
      optimize(ctx, hypotheses, final_state.clock, true, "Best case", cfg, &result.stats);
  if (best.outcome != Outcome::Proven) {
    result.outcome = Outcome::Unknown;
    result.detail = "best-case bound failed: " + best.detail;
    return result;
  }
  const Optimum worst =
      optimize(ctx, hypotheses, final_state.clock, false, "Worst case", cfg, &result.stats);
  if (worst.outcome != Outcome::Proven) {
    result.outcome = Outcome::Unknown;
    result.detail = "worst-case bound failed: " + worst.detail;
    return result;
  }

  // Confirm both witnesses by concrete re-simulation of the claimed inputs.
  ConcreteDomain cdom;
  ConcreteEngine cengine(cdom, CycleModel{spec.penalty});
  const Optimum* bounds[2] = {&best, &worst};
  TimingBound* out[2] = {&result.best, &result.worst};
  for (int k = 0; k < 2; ++k) {
    out[k]->cycles = bounds[k]->value;
    out[k]->witness = detail_verify::inputs_from_model(spec, bounds[k]->model);
    ConcreteState cs = detail_verify::boot_concrete(cdom, program, spec, out[k]->witness);
    cs = cengine.simulate(StepBudget{spec.steps}, cs);
    const auto clk = cdom.word_value(cs.clock);
    if (!clk || *clk != bounds[k]->value) {
      result.outcome = Outcome::Unknown;
      result.detail = std::string(k == 0 ? "best" : "worst") +
                      "-case witness failed concrete re-simulation";
      return result;
    }
  }
  result.outcome = Outcome::Proven;
  return result;
}

}  // namespace redfin
