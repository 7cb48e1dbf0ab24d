#pragma once

// Concrete value domain: plain machine integers with the shared scalar
// semantics. Every query operation reports a known value, so the generic
// semantics never branches symbolically when instantiated with this domain.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "redfin/scalar.hpp"
#include "redfin/state.hpp"

namespace redfin {

struct ConcreteDomain {
  using Word = int64_t;
  using Bool = bool;
  using Addr = uint8_t;
  using Code = uint16_t;
  using Memory = std::array<int64_t, memory_size>;

  Word word(int64_t v) const { return v; }
  Bool boolean(bool v) const { return v; }
  Addr addr(uint8_t v) const { return v; }
  Code code(uint16_t v) const { return v; }

  std::optional<int64_t> word_value(Word v) const { return v; }
  std::optional<bool> bool_value(Bool v) const { return v; }
  std::optional<uint8_t> addr_value(Addr v) const { return v; }
  std::optional<uint16_t> code_value(Code v) const { return v; }

  Word add(Word a, Word b) const { return scalar::add(a, b); }
  Word sub(Word a, Word b) const { return scalar::sub(a, b); }
  Word mul(Word a, Word b) const { return scalar::mul(a, b); }
  Word sdiv(Word a, Word b) const { return scalar::sdiv(a, b); }
  Word bit_and(Word a, Word b) const { return scalar::bit_and(a, b); }
  Word bit_or(Word a, Word b) const { return scalar::bit_or(a, b); }
  Word bit_xor(Word a, Word b) const { return scalar::bit_xor(a, b); }
  Word shl(Word a, Word b) const { return scalar::shl(a, scalar::to_unsigned(b)); }
  Word lshr(Word a, Word b) const { return scalar::lshr(a, scalar::to_unsigned(b)); }
  Word ashr(Word a, Word b) const { return scalar::ashr(a, scalar::to_unsigned(b)); }
  Word neg(Word a) const { return scalar::neg(a); }
  Word bit_not(Word a) const { return scalar::bit_not(a); }

  Bool eq(Word a, Word b) const { return a == b; }
  Bool slt(Word a, Word b) const { return scalar::slt(a, b); }
  Bool sgt(Word a, Word b) const { return scalar::sgt(a, b); }
  Bool ult(Word a, Word b) const { return scalar::ult(a, b); }

  Bool logic_and(Bool a, Bool b) const { return a && b; }
  Bool logic_or(Bool a, Bool b) const { return a || b; }
  Bool logic_not(Bool a) const { return !a; }

  Word ite_word(Bool c, Word a, Word b) const { return c ? a : b; }
  Bool ite_bool(Bool c, Bool a, Bool b) const { return c ? a : b; }
  Addr ite_addr(Bool c, Addr a, Addr b) const { return c ? a : b; }
  Code ite_code(Bool c, Code a, Code b) const { return c ? a : b; }

  Addr addr_offset(Addr base, int8_t offset) const {
    return static_cast<Addr>(base + static_cast<uint8_t>(offset));  // mod 256
  }
  Addr word_to_addr(Word v) const { return static_cast<Addr>(scalar::to_unsigned(v) & 0xff); }
  Bool addr_eq(Addr a, Addr b) const { return a == b; }

  Memory make_memory(const std::vector<Word>& data) const {
    Memory m{};
    for (size_t i = 0; i < data.size(); ++i) m[i] = data[i];
    return m;
  }
  Word mem_read(const Memory& m, Addr a) const { return m[a]; }
  void mem_write(Memory& m, Addr a, Word v) const { m[a] = v; }
  Memory mem_merge(Bool c, const Memory& a, const Memory& b) const { return c ? a : b; }
};

using ConcreteState = MachineState<ConcreteDomain>;

// Report over a concrete state; lo..hi is an inclusive memory window.
inline Dump dump_state(const ConcreteState& s, uint8_t lo, uint8_t hi) {
  if (lo > hi) throw StateError("dump: empty memory window (lo > hi)");
  Dump d;
  d.memory.reserve(static_cast<size_t>(hi) - lo + 1);
  for (unsigned a = lo; a <= hi; ++a) d.memory.push_back(s.memory[a]);
  for (size_t i = 0; i < register_count; ++i) d.regs[i] = s.regs[i];
  d.condition = s.flag(Flag::Condition);
  d.overflow = s.flag(Flag::Overflow);
  d.halt = s.flag(Flag::Halt);
  d.ic = s.ic;
  d.ir = s.ir;
  d.clock = scalar::to_unsigned(s.clock);
  return d;
}

}  // namespace redfin
