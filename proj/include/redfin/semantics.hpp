#pragma once

// State-transformer semantics, shared by both engines.
//
//   step      = execute . increment . fetch
//   fetch     : ir := program[ic], clock += 1   (the instruction's first cycle)
//   increment : ic := ic + 1 (mod 256)
//   execute   : the decoded instruction's transformer, adding its remaining
//               cycle cost
//
// simulate(budget, s) unrolls step at most budget times, freezing states
// whose Halt flag is concretely true and merging the frozen and running
// continuations when the flag is symbolic:
//
//   simulate(0, s) = s
//   simulate(n, s) = mergeStates(halt(s), s, simulate(n - 1, step(s)))
//
// A symbolic instruction counter is resolved by enumerating its feasible
// concrete values (the Const leaves of its Ite tree), stepping each branch,
// and merging the results; an unbounded counter or more branches than the
// fork cap is a termination error.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "redfin/concrete.hpp"
#include "redfin/isa.hpp"
#include "redfin/state.hpp"
#include "redfin/symbolic.hpp"

namespace redfin {

struct CycleModel {
  bool abs_negative_penalty = false;

  // Cycle cost per instruction, fetch cycle included.
  static constexpr unsigned cost_of(Opcode op) {
    switch (op) {
      case Opcode::Ld:
      case Opcode::Ldmi:
      case Opcode::St:
      case Opcode::Stmi:
        return 2;
      default:
        return 1;
    }
  }
};

struct StepBudget {
  unsigned remaining = 0;
};

struct Diagnostic {
  enum class Kind { IllegalOpcode, SymbolicBranch, Fork };
  Kind kind;
  int slot = -1;  // program slot, -1 when unknown
  std::string message;
};

struct ExecLog {
  std::vector<Diagnostic> entries;
};

struct SymbolicTerminationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Feasible concrete values of an address expression: the Const leaves of its
// Ite tree, or nullopt when a non-constant leaf makes the set unbounded.
inline std::optional<std::vector<uint8_t>> feasible_addrs(const ConcreteDomain&, uint8_t a) {
  return std::vector<uint8_t>{a};
}

inline std::optional<std::vector<uint8_t>> feasible_addrs(const SymbolicDomain&, SymValue a) {
  std::vector<uint8_t> out;
  std::vector<const Node*> work{a.node()};
  while (!work.empty()) {
    const Node* n = work.back();
    work.pop_back();
    if (n->kind == Kind::Const) {
      out.push_back(static_cast<uint8_t>(n->bits & 0xff));
    } else if (n->kind == Kind::Ite) {
      work.push_back(n->child[1]);
      work.push_back(n->child[2]);
    } else {
      return std::nullopt;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <typename D>
class Engine {
 public:
  using State = MachineState<D>;

  explicit Engine(D domain, CycleModel model = {}, ExecLog* log = nullptr, unsigned fork_cap = 16)
      : dom_(domain), model_(model), log_(log), fork_cap_(fork_cap) {}

  const D& domain() const { return dom_; }
  const CycleModel& model() const { return model_; }

  State boot_state(std::shared_ptr<const Program> program,
                   const std::vector<typename D::Word>& data) {
    return boot(dom_, std::move(program), data);
  }

  // T_fetch. Requires a concrete instruction counter.
  State fetch(State s) {
    auto ica = dom_.addr_value(s.ic);
    if (!ica) throw StateError("fetch requires a concrete instruction counter");
    s.ir = dom_.code(s.program->code[*ica]);
    s.clock = dom_.add(s.clock, dom_.word(1));
    return s;
  }

  // T_inc.
  State increment(State s) {
    s.ic = dom_.addr_offset(s.ic, 1);
    return s;
  }

  // T_i: the decoded instruction's transformer, with its remaining cost.
  State execute(State s) {
    auto irc = dom_.code_value(s.ir);
    if (!irc) throw StateError("execute requires a concrete instruction register");
    const Decoded dec = decode(*irc);
    if (std::holds_alternative<IllegalOpcode>(dec)) {
      const auto bad = std::get<IllegalOpcode>(dec);
      diag(Diagnostic::Kind::IllegalOpcode, current_slot(s),
           "illegal opcode " + std::to_string(bad.value) + " halts the machine");
      s.set_flag(Flag::Halt, dom_.boolean(true));
      return s;
    }
    return apply_instruction(std::move(s), std::get<Instruction>(dec));
  }

  State step(const State& s) {
    if (auto halted = dom_.bool_value(s.flag(Flag::Halt)); halted && *halted)
      return s;  // halted machines are frozen, clock included
    if (!dom_.addr_value(s.ic)) return fork_on_symbolic_ic(s);
    return execute(increment(fetch(s)));
  }

  State simulate(StepBudget budget, State s) {
    std::vector<std::pair<typename D::Bool, State>> pending;  // symbolic-halt layers
    unsigned n = budget.remaining;
    while (n > 0) {
      const auto halted = s.flag(Flag::Halt);
      if (auto known = dom_.bool_value(halted)) {
        if (*known) break;  // halted states are frozen; remaining budget changes nothing
      } else {
        pending.emplace_back(halted, s);
      }
      s = step(s);
      --n;
    }
    for (auto it = pending.rbegin(); it != pending.rend(); ++it)
      s = merge_states(it->first, it->second, s);
    return s;
  }

  // Componentwise conditional merge of two states over the same program.
  State merge_states(typename D::Bool cond, const State& then_s, const State& else_s) {
    if (then_s.program != else_s.program && !(then_s.program->code == else_s.program->code))
      throw StateError("mergeStates requires identical programs");
    if (auto known = dom_.bool_value(cond)) return *known ? then_s : else_s;
    State out{};
    out.program = then_s.program;
    for (size_t i = 0; i < register_count; ++i)
      out.regs[i] = dom_.ite_word(cond, then_s.regs[i], else_s.regs[i]);
    out.memory = dom_.mem_merge(cond, then_s.memory, else_s.memory);
    out.ic = dom_.ite_addr(cond, then_s.ic, else_s.ic);
    out.ir = dom_.ite_code(cond, then_s.ir, else_s.ir);
    for (size_t f = 0; f < flag_count; ++f)
      out.flags[f] = dom_.ite_bool(cond, then_s.flags[f], else_s.flags[f]);
    out.clock = dom_.ite_word(cond, then_s.clock, else_s.clock);
    return out;
  }

 private:
  State fork_on_symbolic_ic(const State& s) {
    auto feasible = feasible_addrs(dom_, s.ic);
    if (!feasible || feasible->size() > fork_cap_) {
      std::string detail = feasible
          ? std::to_string(feasible->size()) + " feasible targets exceed the fork cap of " +
                std::to_string(fork_cap_)
          : std::string("unbounded symbolic instruction counter");
      if (last_branch_slot_ >= 0)
        detail += " (last symbolic branch at slot " + std::to_string(last_branch_slot_) + ")";
      throw SymbolicTerminationError("fork on symbolic instruction counter: " + detail);
    }
    diag(Diagnostic::Kind::Fork, last_branch_slot_,
         "forking on symbolic instruction counter over " + std::to_string(feasible->size()) +
             " targets");
    std::vector<State> branches;
    branches.reserve(feasible->size());
    for (uint8_t target : *feasible) {
      State b = s;
      b.ic = dom_.addr(target);
      branches.push_back(step(b));
    }
    State merged = branches.back();
    for (size_t i = feasible->size() - 1; i-- > 0;) {
      const auto cond = dom_.addr_eq(s.ic, dom_.addr((*feasible)[i]));
      merged = merge_states(cond, branches[i], merged);
    }
    return merged;
  }

  State apply_instruction(State s, const Instruction& i) {
    const unsigned extra = CycleModel::cost_of(i.opcode) - 1;
    if (extra > 0) s.clock = dom_.add(s.clock, dom_.word(static_cast<int64_t>(extra)));

    auto mem_at = [&](MemoryAddress a) { return dom_.mem_read(s.memory, dom_.addr(a)); };
    auto x = [&]() { return s.regs[i.reg]; };
    const auto zero = dom_.word(0);

    switch (i.opcode) {
      case Opcode::Halt:
        s.set_flag(Flag::Halt, dom_.boolean(true));
        break;
      case Opcode::Nop:
        break;
      case Opcode::Ld:
        s.regs[i.reg] = mem_at(i.addr);
        break;
      case Opcode::LdI:
        s.regs[i.reg] = dom_.word(static_cast<int64_t>(i.simm));  // sign-extended simm8
        break;
      case Opcode::Ldmi:
        s.regs[i.reg] = dom_.mem_read(s.memory, dom_.word_to_addr(mem_at(i.addr)));
        break;
      case Opcode::St:
        dom_.mem_write(s.memory, dom_.addr(i.addr), x());
        break;
      case Opcode::Stmi:
        dom_.mem_write(s.memory, dom_.word_to_addr(mem_at(i.addr)), x());
        break;
      case Opcode::Add: {
        const auto a = x(), b = mem_at(i.addr);
        const auto z = dom_.add(a, b);
        const auto sa = dom_.slt(a, zero), sb = dom_.slt(b, zero), sz = dom_.slt(z, zero);
        const auto ov = dom_.logic_or(
            dom_.logic_and(dom_.logic_and(dom_.logic_not(sa), dom_.logic_not(sb)), sz),
            dom_.logic_and(dom_.logic_and(sa, sb), dom_.logic_not(sz)));
        sticky_overflow(s, ov);
        s.regs[i.reg] = z;
        break;
      }
      case Opcode::Sub: {
        const auto a = x(), b = mem_at(i.addr);
        const auto z = dom_.sub(a, b);
        const auto sa = dom_.slt(a, zero), sb = dom_.slt(b, zero), sz = dom_.slt(z, zero);
        const auto ov = dom_.logic_or(
            dom_.logic_and(dom_.logic_and(dom_.logic_not(sa), sb), sz),
            dom_.logic_and(dom_.logic_and(sa, dom_.logic_not(sb)), dom_.logic_not(sz)));
        sticky_overflow(s, ov);
        s.regs[i.reg] = z;
        break;
      }
      case Opcode::Mul: {
        const auto a = x(), b = mem_at(i.addr);
        const auto z = dom_.mul(a, b);
        // Low-64 multiply wraps iff the quotient check fails; the only wrap
        // the check misses is (-1) * INT64_MIN, where sdiv itself wraps.
        const auto nonzero = dom_.logic_not(dom_.eq(a, zero));
        const auto quot_bad = dom_.logic_not(dom_.eq(dom_.sdiv(z, a), b));
        const auto min_case = dom_.logic_and(dom_.eq(a, dom_.word(-1)),
                                             dom_.eq(b, dom_.word(scalar::min64)));
        sticky_overflow(s, dom_.logic_and(nonzero, dom_.logic_or(quot_bad, min_case)));
        s.regs[i.reg] = z;
        break;
      }
      case Opcode::Div:
        // SMT-LIB bvsdiv conventions, division by zero included; flags untouched.
        s.regs[i.reg] = dom_.sdiv(x(), mem_at(i.addr));
        break;
      case Opcode::And:
        s.regs[i.reg] = dom_.bit_and(x(), mem_at(i.addr));
        break;
      case Opcode::Or:
        s.regs[i.reg] = dom_.bit_or(x(), mem_at(i.addr));
        break;
      case Opcode::Xor:
        s.regs[i.reg] = dom_.bit_xor(x(), mem_at(i.addr));
        break;
      case Opcode::Abs: {
        const auto a = x();
        const auto negative = dom_.slt(a, zero);
        const auto result = dom_.ite_word(negative, dom_.neg(a), a);
        // |INT64_MIN| wraps negative; that is the only overflow case.
        sticky_via_ite(s, dom_.slt(result, zero));
        s.regs[i.reg] = result;
        if (model_.abs_negative_penalty)
          s.clock = dom_.add(s.clock, dom_.ite_word(negative, dom_.word(1), zero));
        break;
      }
      case Opcode::Not:
        s.regs[i.reg] = dom_.bit_not(x());
        break;
      case Opcode::Sll:
      case Opcode::Srl:
      case Opcode::Sra: {
        const auto amount = dom_.bit_and(mem_at(i.addr), dom_.word(63));  // amounts mod 64
        s.regs[i.reg] = i.opcode == Opcode::Sll ? dom_.shl(x(), amount)
                        : i.opcode == Opcode::Srl ? dom_.lshr(x(), amount)
                                                  : dom_.ashr(x(), amount);
        break;
      }
      case Opcode::SllI:
      case Opcode::SrlI:
      case Opcode::SraI: {
        const auto amount = dom_.word(i.addr & 63);  // amounts mod 64
        s.regs[i.reg] = i.opcode == Opcode::SllI ? dom_.shl(x(), amount)
                        : i.opcode == Opcode::SrlI ? dom_.lshr(x(), amount)
                                                   : dom_.ashr(x(), amount);
        break;
      }
      case Opcode::CmpEq:
        s.set_flag(Flag::Condition, dom_.eq(x(), mem_at(i.addr)));
        break;
      case Opcode::CmpLt:
        s.set_flag(Flag::Condition, dom_.slt(x(), mem_at(i.addr)));
        break;
      case Opcode::CmpGt:
        s.set_flag(Flag::Condition, dom_.sgt(x(), mem_at(i.addr)));
        break;
      case Opcode::Jmpi:
        s.ic = dom_.addr_offset(s.ic, i.simm);
        break;
      case Opcode::JmpiCt:
      case Opcode::JmpiCf: {
        auto cond = s.flag(Flag::Condition);
        if (i.opcode == Opcode::JmpiCf) cond = dom_.logic_not(cond);
        if (!dom_.bool_value(cond)) {
          last_branch_slot_ = current_slot(s);
          diag(Diagnostic::Kind::SymbolicBranch, last_branch_slot_,
               "conditional jump on symbolic condition");
        }
        s.ic = dom_.ite_addr(cond, dom_.addr_offset(s.ic, i.simm), s.ic);
        break;
      }
    }
    return s;
  }

  void sticky_overflow(State& s, typename D::Bool ov) {
    s.set_flag(Flag::Overflow, dom_.logic_or(s.flag(Flag::Overflow), ov));
  }

  // The overflow-state merge the abs path uses: Ite(cond, set, prior).
  void sticky_via_ite(State& s, typename D::Bool cond) {
    s.set_flag(Flag::Overflow,
               dom_.ite_bool(cond, dom_.boolean(true), s.flag(Flag::Overflow)));
  }

  // Slot of the instruction being executed: ic - 1 mod 256 when concrete.
  int current_slot(const State& s) const {
    if (auto ica = dom_.addr_value(s.ic)) return static_cast<uint8_t>(*ica - 1);
    return -1;
  }

  void diag(Diagnostic::Kind kind, int slot, std::string message) {
    if (log_) log_->entries.push_back({kind, slot, std::move(message)});
  }

  D dom_;
  CycleModel model_;
  ExecLog* log_;
  unsigned fork_cap_;
  int last_branch_slot_ = -1;
};

using ConcreteEngine = Engine<ConcreteDomain>;
using SymbolicEngine = Engine<SymbolicDomain>;

}  // namespace redfin
