#pragma once

// Symbolic value domain: expression DAG values over a shared Context.
// Constant folding keeps fully concrete computations concrete, so running
// this domain on constant inputs mirrors the concrete simulator exactly.

#include <optional>
#include <vector>

#include "redfin/array.hpp"
#include "redfin/concrete.hpp"
#include "redfin/expr.hpp"
#include "redfin/state.hpp"

namespace redfin {

struct SymbolicDomain {
  Context* ctx;

  using Word = SymValue;
  using Bool = SymValue;
  using Addr = SymValue;
  using Code = SymValue;
  using Memory = SymArray;

  explicit SymbolicDomain(Context& c) : ctx(&c) {}

  Word word(int64_t v) const { return ctx->word(v); }
  Bool boolean(bool v) const { return ctx->boolean(v); }
  Addr addr(uint8_t v) const { return ctx->byte(v); }
  Code code(uint16_t v) const { return ctx->code16(v); }

  std::optional<int64_t> word_value(Word v) const { return ctx->known_int(v); }
  std::optional<bool> bool_value(Bool v) const { return ctx->known_bool(v); }
  std::optional<uint8_t> addr_value(Addr v) const {
    auto i = ctx->known_int(v);
    if (!i) return std::nullopt;
    return static_cast<uint8_t>(*i & 0xff);
  }
  std::optional<uint16_t> code_value(Code v) const {
    auto i = ctx->known_int(v);
    if (!i) return std::nullopt;
    return static_cast<uint16_t>(*i & 0xffff);
  }

  Word add(Word a, Word b) const { return ctx->add(a, b); }
  Word sub(Word a, Word b) const { return ctx->sub(a, b); }
  Word mul(Word a, Word b) const { return ctx->mul(a, b); }
  Word sdiv(Word a, Word b) const { return ctx->sdiv(a, b); }
  Word bit_and(Word a, Word b) const { return ctx->bit_and(a, b); }
  Word bit_or(Word a, Word b) const { return ctx->bit_or(a, b); }
  Word bit_xor(Word a, Word b) const { return ctx->bit_xor(a, b); }
  Word shl(Word a, Word b) const { return ctx->shl(a, b); }
  Word lshr(Word a, Word b) const { return ctx->lshr(a, b); }
  Word ashr(Word a, Word b) const { return ctx->ashr(a, b); }
  Word neg(Word a) const { return ctx->neg(a); }
  Word bit_not(Word a) const { return ctx->bit_not(a); }

  Bool eq(Word a, Word b) const { return ctx->eq(a, b); }
  Bool slt(Word a, Word b) const { return ctx->slt(a, b); }
  Bool sgt(Word a, Word b) const { return ctx->sgt(a, b); }
  Bool ult(Word a, Word b) const { return ctx->ult(a, b); }

  Bool logic_and(Bool a, Bool b) const { return ctx->logic_and(a, b); }
  Bool logic_or(Bool a, Bool b) const { return ctx->logic_or(a, b); }
  Bool logic_not(Bool a) const { return ctx->logic_not(a); }

  Word ite_word(Bool c, Word a, Word b) const { return ctx->ite(c, a, b); }
  Bool ite_bool(Bool c, Bool a, Bool b) const { return ctx->ite(c, a, b); }
  Addr ite_addr(Bool c, Addr a, Addr b) const { return ctx->ite(c, a, b); }
  Code ite_code(Bool c, Code a, Code b) const { return ctx->ite(c, a, b); }

  Addr addr_offset(Addr base, int8_t offset) const {
    return ctx->add(base, ctx->byte(static_cast<uint8_t>(offset)));  // mod-256 add
  }
  Addr word_to_addr(Word v) const { return ctx->extract(7, 0, v); }
  Bool addr_eq(Addr a, Addr b) const { return ctx->eq(a, b); }

  Memory make_memory(const std::vector<Word>& data) const {
    SymArray m = SymArray::constant(*ctx, ctx->word(0));
    for (size_t i = 0; i < data.size(); ++i)
      m = m.store(*ctx, ctx->byte(static_cast<uint8_t>(i)), data[i]);
    return m;
  }
  Word mem_read(const Memory& m, Addr a) const { return m.read(*ctx, a); }
  void mem_write(Memory& m, Addr a, Word v) const { m = m.store(*ctx, a, v); }
  Memory mem_merge(Bool c, const Memory& a, const Memory& b) const {
    return SymArray::merge(*ctx, c, a, b);
  }
};

using SymbolicState = MachineState<SymbolicDomain>;

// Lower a fully folded symbolic state to a concrete one. Fails if any
// component is not constant.
inline ConcreteState concretize(const SymbolicDomain& d, const SymbolicState& s) {
  auto want_word = [&](SymValue v, const char* what) {
    auto c = d.word_value(v);
    if (!c) throw StateError(std::string("concrete dump requires concrete state: symbolic ") + what);
    return *c;
  };
  auto want_bool = [&](SymValue v, const char* what) {
    auto c = d.bool_value(v);
    if (!c) throw StateError(std::string("concrete dump requires concrete state: symbolic ") + what);
    return *c;
  };
  ConcreteDomain cd;
  ConcreteState out{};
  out.program = s.program;
  for (size_t i = 0; i < register_count; ++i)
    out.regs[i] = want_word(s.regs[i], "register");
  for (size_t a = 0; a < memory_size; ++a)
    out.memory[a] = want_word(d.mem_read(s.memory, d.addr(static_cast<uint8_t>(a))), "memory cell");
  auto ica = d.addr_value(s.ic);
  if (!ica) throw StateError("concrete dump requires concrete state: symbolic ic");
  out.ic = *ica;
  auto irc = d.code_value(s.ir);
  if (!irc) throw StateError("concrete dump requires concrete state: symbolic ir");
  out.ir = *irc;
  for (size_t f = 0; f < flag_count; ++f)
    out.flags[f] = want_bool(s.flags[f], "flag");
  out.clock = want_word(s.clock, "clock");
  (void)cd;
  return out;
}

}  // namespace redfin
