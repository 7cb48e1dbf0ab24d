#pragma once

// Instruction set: 28 mnemonics over a 16-bit encoding.
//
//   bits [15:10]  opcode (sequential, Halt = 0)
//   bits [9:8]    register index
//   bits [7:0]    address / immediate (two's complement for signed immediates)
//
// decode() masks operand fields that an instruction does not use, so it is a
// left inverse of encode() on canonical encodings and tolerant of noise in
// unused fields. Opcodes above the table yield IllegalOpcode, which carries
// the offending 6-bit value; executing one halts the machine.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace redfin {

enum class Opcode : uint8_t {
  Halt = 0, Nop, Ld, LdI, Ldmi, St, Stmi,
  Add, Sub, Mul, Div, And, Or, Xor,
  Abs, Not, Sll, Srl, Sra, SllI, SrlI, SraI,
  CmpEq, CmpLt, CmpGt, Jmpi, JmpiCt, JmpiCf,
};

inline constexpr int opcode_count = 28;

enum class Operands : uint8_t {
  None,      // Halt, Nop
  Reg,       // Abs, Not
  RegAddr,   // Ld, Ldmi, St, Stmi, ALU, shifts, compares
  RegSimm,   // LdI
  RegUimm,   // SllI, SrlI, SraI
  Simm,      // Jmpi, JmpiCt, JmpiCf
};

struct OpcodeInfo {
  Opcode opcode;
  std::string_view mnemonic;
  Operands operands;
};

inline constexpr std::array<OpcodeInfo, opcode_count> opcode_table{{
    {Opcode::Halt, "halt", Operands::None},
    {Opcode::Nop, "nop", Operands::None},
    {Opcode::Ld, "ld", Operands::RegAddr},
    {Opcode::LdI, "ld_i", Operands::RegSimm},
    {Opcode::Ldmi, "ldmi", Operands::RegAddr},
    {Opcode::St, "st", Operands::RegAddr},
    {Opcode::Stmi, "stmi", Operands::RegAddr},
    {Opcode::Add, "add", Operands::RegAddr},
    {Opcode::Sub, "sub", Operands::RegAddr},
    {Opcode::Mul, "mul", Operands::RegAddr},
    {Opcode::Div, "div", Operands::RegAddr},
    {Opcode::And, "and", Operands::RegAddr},
    {Opcode::Or, "or", Operands::RegAddr},
    {Opcode::Xor, "xor", Operands::RegAddr},
    {Opcode::Abs, "abs", Operands::Reg},
    {Opcode::Not, "not", Operands::Reg},
    {Opcode::Sll, "sll", Operands::RegAddr},
    {Opcode::Srl, "srl", Operands::RegAddr},
    {Opcode::Sra, "sra", Operands::RegAddr},
    {Opcode::SllI, "sll_i", Operands::RegUimm},
    {Opcode::SrlI, "srl_i", Operands::RegUimm},
    {Opcode::SraI, "sra_i", Operands::RegUimm},
    {Opcode::CmpEq, "cmpeq", Operands::RegAddr},
    {Opcode::CmpLt, "cmplt", Operands::RegAddr},
    {Opcode::CmpGt, "cmpgt", Operands::RegAddr},
    {Opcode::Jmpi, "jmpi", Operands::Simm},
    {Opcode::JmpiCt, "jmpi_ct", Operands::Simm},
    {Opcode::JmpiCf, "jmpi_cf", Operands::Simm},
}};

inline constexpr const OpcodeInfo& info_of(Opcode op) {
  return opcode_table[static_cast<size_t>(op)];
}

inline std::optional<Opcode> opcode_of_mnemonic(std::string_view mnemonic) {
  for (const auto& e : opcode_table)
    if (e.mnemonic == mnemonic) return e.opcode;
  return std::nullopt;
}

using Register = uint8_t;       // 0..3
using MemoryAddress = uint8_t;  // 0..255

// A decoded instruction. Register-free forms keep reg = 0; operand-free forms
// keep all fields 0, so Halt encodes as 0x0000.
struct Instruction {
  Opcode opcode = Opcode::Halt;
  Register reg = 0;
  MemoryAddress addr = 0;  // also carries uimm8
  int8_t simm = 0;         // sign-extended 8-bit immediate / jump offset

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

// Decode result for unassigned opcode values.
struct IllegalOpcode {
  uint8_t value = 0;  // the 6-bit opcode field
  friend bool operator==(const IllegalOpcode&, const IllegalOpcode&) = default;
};

using Decoded = std::variant<Instruction, IllegalOpcode>;

struct IsaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Constructors with range checks; the assembler funnels through these.
inline Instruction make_instruction(Opcode op, unsigned reg = 0, int64_t operand = 0) {
  const auto& inf = info_of(op);
  Instruction i;
  i.opcode = op;
  switch (inf.operands) {
    case Operands::None:
      break;
    case Operands::Reg:
    case Operands::RegAddr:
    case Operands::RegSimm:
    case Operands::RegUimm:
      if (reg > 3) throw IsaError("register index out of range: r" + std::to_string(reg));
      i.reg = static_cast<Register>(reg);
      break;
    case Operands::Simm:
      break;
  }
  switch (inf.operands) {
    case Operands::None:
    case Operands::Reg:
      break;
    case Operands::RegAddr:
    case Operands::RegUimm:
      if (operand < 0 || operand > 255)
        throw IsaError(std::string(inf.mnemonic) + ": operand out of range [0,255]: " + std::to_string(operand));
      i.addr = static_cast<MemoryAddress>(operand);
      break;
    case Operands::RegSimm:
    case Operands::Simm:
      if (operand < -128 || operand > 127)
        throw IsaError(std::string(inf.mnemonic) + ": immediate out of range [-128,127]: " + std::to_string(operand));
      i.simm = static_cast<int8_t>(operand);
      break;
  }
  return i;
}

using InstructionCode = uint16_t;

inline constexpr InstructionCode encode(const Instruction& i) {
  const auto& inf = info_of(i.opcode);
  uint16_t code = static_cast<uint16_t>(static_cast<uint16_t>(i.opcode) << 10);
  switch (inf.operands) {
    case Operands::None:
      break;
    case Operands::Reg:
      code |= static_cast<uint16_t>((i.reg & 0x3) << 8);
      break;
    case Operands::RegAddr:
    case Operands::RegUimm:
      code |= static_cast<uint16_t>((i.reg & 0x3) << 8);
      code |= i.addr;
      break;
    case Operands::RegSimm:
      code |= static_cast<uint16_t>((i.reg & 0x3) << 8);
      code |= static_cast<uint8_t>(i.simm);
      break;
    case Operands::Simm:
      code |= static_cast<uint8_t>(i.simm);
      break;
  }
  return code;
}

inline constexpr Decoded decode(InstructionCode code) {
  const uint8_t op_bits = static_cast<uint8_t>(code >> 10);
  if (op_bits >= opcode_count) return IllegalOpcode{op_bits};
  const Opcode op = static_cast<Opcode>(op_bits);
  Instruction i;
  i.opcode = op;
  switch (info_of(op).operands) {
    case Operands::None:
      break;
    case Operands::Reg:
      i.reg = static_cast<Register>((code >> 8) & 0x3);
      break;
    case Operands::RegAddr:
    case Operands::RegUimm:
      i.reg = static_cast<Register>((code >> 8) & 0x3);
      i.addr = static_cast<MemoryAddress>(code & 0xff);
      break;
    case Operands::RegSimm:
      i.reg = static_cast<Register>((code >> 8) & 0x3);
      i.simm = static_cast<int8_t>(static_cast<uint8_t>(code & 0xff));
      break;
    case Operands::Simm:
      i.simm = static_cast<int8_t>(static_cast<uint8_t>(code & 0xff));
      break;
  }
  return i;
}

inline constexpr InstructionCode halt_code = 0;  // encode(Halt)

}  // namespace redfin
