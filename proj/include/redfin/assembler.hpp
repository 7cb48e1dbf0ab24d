#pragma once

// Two-pass assembler and disassembler for the instruction set.
//
// Line grammar (comments run from ';' or '#' to end of line; commas count as
// whitespace):
//
//   [label:] [mnemonic operand*]
//
// A label names the slot of the next instruction; jump operands may be a
// numeric offset or a label, which resolves to target - (site + 1) — the
// offset is applied after the instruction counter has already advanced.
// Errors carry 1-based source line numbers.

#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "redfin/isa.hpp"
#include "redfin/state.hpp"

namespace redfin {

struct AsmError : std::runtime_error {
  int line;  // 1-based; 0 when not tied to a line
  AsmError(int line_no, const std::string& message)
      : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + message
                                       : message),
        line(line_no) {}
};

namespace detail_asm {

inline bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline bool is_identifier(std::string_view t) {
  if (t.empty() || !is_ident_start(t[0])) return false;
  for (char c : t)
    if (!is_ident_char(c)) return false;
  return true;
}

inline std::optional<int64_t> parse_number(std::string_view t) {
  if (t.empty()) return std::nullopt;
  size_t i = 0;
  bool neg = false;
  if (t[0] == '-' || t[0] == '+') {
    neg = t[0] == '-';
    i = 1;
  }
  if (i == t.size()) return std::nullopt;
  int64_t value = 0;
  for (; i < t.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(t[i]))) return std::nullopt;
    if (value <= 100000) value = value * 10 + (t[i] - '0');  // saturate; range-checked later
  }
  return neg ? -value : value;
}

struct Statement {
  int line_no;
  Opcode opcode;
  std::vector<std::string> operands;  // raw operand tokens, register first when present
};

}  // namespace detail_asm

// Assemble source text into a program.
inline std::shared_ptr<const Program> assemble(std::string_view text) {
  using namespace detail_asm;

  std::map<std::string, uint8_t, std::less<>> labels;
  std::vector<Statement> statements;

  size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (pos > text.size() + 1) break;

    if (size_t c = line.find_first_of(";#"); c != std::string_view::npos) line = line.substr(0, c);

    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : line) {
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
        if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    if (tokens.empty()) {
      if (eol == text.size()) break;
      continue;
    }

    size_t t = 0;
    if (tokens[0].back() == ':') {
      std::string name = tokens[0].substr(0, tokens[0].size() - 1);
      if (!is_identifier(name)) throw AsmError(line_no, "invalid label name '" + name + "'");
      if (statements.size() > 255)
        throw AsmError(line_no, "program overflow at slot 256");
      if (!labels.emplace(name, static_cast<uint8_t>(statements.size())).second)
        throw AsmError(line_no, "duplicate label '" + name + "'");
      t = 1;
    }
    if (t == tokens.size()) {
      if (eol == text.size()) break;
      continue;  // label-only line
    }

    const std::string& mnemonic = tokens[t];
    auto op = opcode_of_mnemonic(mnemonic);
    if (!op) throw AsmError(line_no, "unknown mnemonic '" + mnemonic + "'");
    if (statements.size() > 255) throw AsmError(line_no, "program overflow at slot 256");
    statements.push_back({line_no, *op, {tokens.begin() + static_cast<long>(t) + 1, tokens.end()}});
    if (eol == text.size()) break;
  }

  std::vector<Instruction> instrs;
  instrs.reserve(statements.size());
  for (size_t slot = 0; slot < statements.size(); ++slot) {
    const Statement& st = statements[slot];
    const auto& inf = info_of(st.opcode);
    const auto expect = [&](size_t n) {
      if (st.operands.size() != n)
        throw AsmError(st.line_no, std::string(inf.mnemonic) + " expects " + std::to_string(n) +
                                       " operand" + (n == 1 ? "" : "s") + ", got " +
                                       std::to_string(st.operands.size()));
    };
    const auto parse_reg = [&](const std::string& tok) -> unsigned {
      if (tok.size() == 2 && tok[0] == 'r' && tok[1] >= '0' && tok[1] <= '3')
        return static_cast<unsigned>(tok[1] - '0');
      throw AsmError(st.line_no, "expected register r0..r3, got '" + tok + "'");
    };
    const auto parse_int = [&](const std::string& tok, const char* what) -> int64_t {
      auto v = parse_number(tok);
      if (!v) throw AsmError(st.line_no, std::string("expected ") + what + ", got '" + tok + "'");
      return *v;
    };

    try {
      switch (inf.operands) {
        case Operands::None:
          expect(0);
          instrs.push_back(make_instruction(st.opcode));
          break;
        case Operands::Reg:
          expect(1);
          instrs.push_back(make_instruction(st.opcode, parse_reg(st.operands[0])));
          break;
        case Operands::RegAddr:
        case Operands::RegUimm:
        case Operands::RegSimm: {
          expect(2);
          const unsigned reg = parse_reg(st.operands[0]);  // report bad tokens left to right
          instrs.push_back(make_instruction(st.opcode, reg, parse_int(st.operands[1], "a number")));
          break;
        }
        case Operands::Simm: {
          expect(1);
          const std::string& tok = st.operands[0];
          int64_t offset;
          if (auto v = parse_number(tok)) {
            offset = *v;
          } else if (is_identifier(tok)) {
            auto it = labels.find(tok);
            if (it == labels.end())
              throw AsmError(st.line_no, "undefined label '" + tok + "'");
            offset = static_cast<int64_t>(it->second) - (static_cast<int64_t>(slot) + 1);
            if (offset < -128 || offset > 127)
              throw AsmError(st.line_no, "jump to '" + tok + "' is out of range: offset " +
                                             std::to_string(offset));
          } else {
            throw AsmError(st.line_no, "expected offset or label, got '" + tok + "'");
          }
          instrs.push_back(make_instruction(st.opcode, 0, offset));
          break;
        }
      }
    } catch (const IsaError& e) {
      throw AsmError(st.line_no, e.what());
    }
  }

  return Program::from_instructions(instrs);
}

inline std::string disassemble_instruction(const Instruction& i) {
  const auto& inf = info_of(i.opcode);
  std::string out(inf.mnemonic);
  switch (inf.operands) {
    case Operands::None:
      break;
    case Operands::Reg:
      out += " r" + std::to_string(i.reg);
      break;
    case Operands::RegAddr:
    case Operands::RegUimm:
      out += " r" + std::to_string(i.reg) + " " + std::to_string(i.addr);
      break;
    case Operands::RegSimm:
      out += " r" + std::to_string(i.reg) + " " + std::to_string(i.simm);
      break;
    case Operands::Simm:
      out += " " + std::to_string(i.simm);
      break;
  }
  return out;
}

// Raw codes with unassigned opcodes render as data words.
inline std::string disassemble_code(InstructionCode code) {
  const Decoded d = decode(code);
  if (std::holds_alternative<Instruction>(d))
    return disassemble_instruction(std::get<Instruction>(d));
  static constexpr char digits[] = "0123456789abcdef";
  std::string hex(4, '0');
  for (int k = 0; k < 4; ++k) hex[3 - k] = digits[(code >> (4 * k)) & 0xf];
  return ".code 0x" + hex;
}

// One line per occupied slot.
inline std::string disassemble(const Program& p) {
  std::string out;
  for (size_t slot = 0; slot < p.length; ++slot) {
    out += disassemble_code(p.code[slot]);
    out += '\n';
  }
  return out;
}

}  // namespace redfin
