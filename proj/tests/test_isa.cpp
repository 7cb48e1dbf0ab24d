#include "catch_amalgamated.hpp"

#include <set>
#include <string>

#include "redfin/isa.hpp"

using namespace redfin;

namespace {

// The raw bits of `code` that encode() can produce for this operand class.
uint16_t canonical_mask(Operands operands) {
  switch (operands) {
    case Operands::None: return 0xfc00;
    case Operands::Reg: return 0xff00;
    case Operands::RegAddr:
    case Operands::RegUimm:
    case Operands::RegSimm: return 0xffff;
    case Operands::Simm: return 0xfcff;
  }
  return 0;
}

}  // namespace

TEST_CASE("opcode table is complete and mnemonics are unique", "[isa]") {
  REQUIRE(opcode_table.size() == static_cast<size_t>(opcode_count));
  std::set<std::string> mnemonics;
  for (int i = 0; i < opcode_count; ++i) {
    const auto& e = opcode_table[i];
    CHECK(static_cast<int>(e.opcode) == i);  // table indexed by opcode value
    CHECK(mnemonics.insert(std::string(e.mnemonic)).second);
    auto found = opcode_of_mnemonic(e.mnemonic);
    REQUIRE(found.has_value());
    CHECK(*found == e.opcode);
  }
  CHECK_FALSE(opcode_of_mnemonic("bogus").has_value());
  CHECK_FALSE(opcode_of_mnemonic("").has_value());
  CHECK_FALSE(opcode_of_mnemonic("LD").has_value());  // mnemonics are lower-case
}

TEST_CASE("halt encodes to the all-zero word", "[isa]") {
  CHECK(encode(make_instruction(Opcode::Halt)) == 0);
  CHECK(halt_code == 0);
  const Decoded d = decode(0);
  REQUIRE(std::holds_alternative<Instruction>(d));
  CHECK(std::get<Instruction>(d).opcode == Opcode::Halt);
}

TEST_CASE("every 16-bit word decodes, and decode/encode agree on the canonical bits", "[isa]") {
  for (uint32_t raw = 0; raw <= 0xffff; ++raw) {
    const auto code = static_cast<InstructionCode>(raw);
    const uint8_t op_bits = static_cast<uint8_t>(code >> 10);
    const Decoded d = decode(code);
    if (op_bits >= opcode_count) {
      REQUIRE(std::holds_alternative<IllegalOpcode>(d));
      CHECK(std::get<IllegalOpcode>(d).value == op_bits);
      continue;
    }
    REQUIRE(std::holds_alternative<Instruction>(d));
    const Instruction i = std::get<Instruction>(d);
    CHECK(static_cast<uint8_t>(i.opcode) == op_bits);

    // Ignored operand bits are dropped, never smuggled into the instruction.
    const uint16_t canon = code & canonical_mask(info_of(i.opcode).operands);
    CHECK(encode(i) == canon);
    CHECK(decode(encode(i)) == d);  // decoding is idempotent through encode
  }
}

TEST_CASE("well-formed instructions roundtrip exactly", "[isa]") {
  for (const auto& e : opcode_table) {
    switch (e.operands) {
      case Operands::None: {
        const Instruction i = make_instruction(e.opcode);
        CHECK(decode(encode(i)) == Decoded{i});
        break;
      }
      case Operands::Reg:
        for (unsigned r = 0; r < 4; ++r) {
          const Instruction i = make_instruction(e.opcode, r);
          CHECK(decode(encode(i)) == Decoded{i});
        }
        break;
      case Operands::RegAddr:
      case Operands::RegUimm:
        for (unsigned r = 0; r < 4; ++r)
          for (int a : {0, 1, 127, 128, 254, 255}) {
            const Instruction i = make_instruction(e.opcode, r, a);
            CHECK(i.addr == a);
            CHECK(decode(encode(i)) == Decoded{i});
          }
        break;
      case Operands::RegSimm:
        for (unsigned r = 0; r < 4; ++r)
          for (int s : {-128, -127, -1, 0, 1, 126, 127}) {
            const Instruction i = make_instruction(e.opcode, r, s);
            CHECK(i.simm == s);
            CHECK(decode(encode(i)) == Decoded{i});
          }
        break;
      case Operands::Simm:
        for (int s : {-128, -1, 0, 1, 127}) {
          const Instruction i = make_instruction(e.opcode, 0, s);
          CHECK(i.simm == s);
          CHECK(decode(encode(i)) == Decoded{i});
        }
        break;
    }
  }
}

TEST_CASE("operand range violations are rejected with the offending value", "[isa]") {
  CHECK_THROWS_AS(make_instruction(Opcode::Add, 4, 0), IsaError);
  CHECK_THROWS_AS(make_instruction(Opcode::Abs, 17), IsaError);
  CHECK_THROWS_AS(make_instruction(Opcode::Ld, 0, 256), IsaError);
  CHECK_THROWS_AS(make_instruction(Opcode::Ld, 0, -1), IsaError);
  CHECK_THROWS_AS(make_instruction(Opcode::LdI, 0, 128), IsaError);
  CHECK_THROWS_AS(make_instruction(Opcode::LdI, 0, -129), IsaError);
  CHECK_THROWS_AS(make_instruction(Opcode::Jmpi, 0, 128), IsaError);
  CHECK_THROWS_AS(make_instruction(Opcode::SllI, 0, 256), IsaError);
  CHECK_THROWS_MATCHES(make_instruction(Opcode::LdI, 0, 999), IsaError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("999")));
}

TEST_CASE("operand classes match the instruction families", "[isa]") {
  CHECK(info_of(Opcode::Halt).operands == Operands::None);
  CHECK(info_of(Opcode::Nop).operands == Operands::None);
  CHECK(info_of(Opcode::Abs).operands == Operands::Reg);
  CHECK(info_of(Opcode::Not).operands == Operands::Reg);
  CHECK(info_of(Opcode::LdI).operands == Operands::RegSimm);
  for (Opcode op : {Opcode::SllI, Opcode::SrlI, Opcode::SraI})
    CHECK(info_of(op).operands == Operands::RegUimm);
  for (Opcode op : {Opcode::Jmpi, Opcode::JmpiCt, Opcode::JmpiCf})
    CHECK(info_of(op).operands == Operands::Simm);
  for (Opcode op : {Opcode::Ld, Opcode::Ldmi, Opcode::St, Opcode::Stmi, Opcode::Add, Opcode::Sub,
                    Opcode::Mul, Opcode::Div, Opcode::And, Opcode::Or, Opcode::Xor, Opcode::Sll,
                    Opcode::Srl, Opcode::Sra, Opcode::CmpEq, Opcode::CmpLt, Opcode::CmpGt})
    CHECK(info_of(op).operands == Operands::RegAddr);
}
