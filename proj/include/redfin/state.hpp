#pragma once

// Machine state over an abstract value domain.
//
// The state is the tuple (registers, memory, instruction counter, instruction
// register, program, flags, clock). The program is always concrete; every
// other component takes its representation from the domain parameter, so one
// definition serves both the concrete simulator and the symbolic engine.

#include <array>
#include <cstdint>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "redfin/isa.hpp"

namespace redfin {

enum class Flag : uint8_t { Condition = 0, Overflow = 1, Halt = 2 };
inline constexpr size_t flag_count = 3;

inline constexpr size_t register_count = 4;
inline constexpr size_t memory_size = 256;
inline constexpr size_t program_size = 256;

struct StateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Immutable 256-slot program image; unused slots hold the halt encoding.
struct Program {
  std::array<InstructionCode, program_size> code{};
  size_t length = 0;  // slots occupied by the source program

  static std::shared_ptr<const Program> from_codes(const std::vector<InstructionCode>& codes) {
    if (codes.size() > program_size)
      throw StateError("program overflow at slot " + std::to_string(program_size));
    auto p = std::make_shared<Program>();
    p->code.fill(halt_code);
    for (size_t i = 0; i < codes.size(); ++i) p->code[i] = codes[i];
    p->length = codes.size();
    return p;
  }

  static std::shared_ptr<const Program> from_instructions(const std::vector<Instruction>& instrs) {
    std::vector<InstructionCode> codes;
    codes.reserve(instrs.size());
    for (const auto& i : instrs) codes.push_back(encode(i));
    return from_codes(codes);
  }

  friend bool operator==(const Program& a, const Program& b) { return a.code == b.code; }
};

template <typename D>
struct MachineState {
  std::array<typename D::Word, register_count> regs;
  typename D::Memory memory;
  typename D::Addr ic;
  typename D::Code ir;
  std::shared_ptr<const Program> program;
  std::array<typename D::Bool, flag_count> flags;
  typename D::Word clock;

  typename D::Bool flag(Flag f) const { return flags[static_cast<size_t>(f)]; }
  void set_flag(Flag f, typename D::Bool v) { flags[static_cast<size_t>(f)] = v; }

  friend bool operator==(const MachineState& a, const MachineState& b) {
    return a.regs == b.regs && a.memory == b.memory && a.ic == b.ic && a.ir == b.ir &&
           a.program->code == b.program->code && a.flags == b.flags && a.clock == b.clock;
  }
};

// Initial state: registers, flags, counters and clock all zero; memory is the
// given data image over a zero background; ir holds the halt encoding until
// the first fetch.
template <typename D>
MachineState<D> boot(D& d, std::shared_ptr<const Program> program,
                     const std::vector<typename D::Word>& data) {
  if (!program) throw StateError("boot: null program");
  if (data.size() > memory_size)
    throw StateError("boot: data memory overflow at index " + std::to_string(memory_size));
  MachineState<D> s{};
  s.program = std::move(program);
  for (auto& r : s.regs) r = d.word(0);
  s.memory = d.make_memory(data);
  s.ic = d.addr(0);
  s.ir = d.code(halt_code);
  for (auto& f : s.flags) f = d.boolean(false);
  s.clock = d.word(0);
  return s;
}

// Concrete state report.
struct Dump {
  std::vector<int64_t> memory;  // cells lo..hi inclusive
  std::array<int64_t, register_count> regs{};
  bool condition = false;
  bool overflow = false;
  bool halt = false;
  uint8_t ic = 0;
  uint16_t ir = 0;
  uint64_t clock = 0;
};

// Binary program image: 16-bit little-endian words, slot 0 first.
inline void write_image(const Program& p, std::ostream& out) {
  for (size_t i = 0; i < p.length; ++i) {
    const InstructionCode c = p.code[i];
    out.put(static_cast<char>(c & 0xff));
    out.put(static_cast<char>((c >> 8) & 0xff));
  }
}

inline void write_image_file(const Program& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StateError("cannot open for writing: " + path);
  write_image(p, out);
}

inline std::shared_ptr<const Program> read_image(const std::vector<uint8_t>& bytes) {
  if (bytes.size() % 2 != 0)
    throw StateError("binary image has odd length " + std::to_string(bytes.size()));
  if (bytes.size() > 2 * program_size)
    throw StateError("binary image exceeds " + std::to_string(2 * program_size) + " bytes");
  std::vector<InstructionCode> codes;
  codes.reserve(bytes.size() / 2);
  for (size_t i = 0; i < bytes.size(); i += 2)
    codes.push_back(static_cast<InstructionCode>(bytes[i] | (bytes[i + 1] << 8)));
  return Program::from_codes(codes);
}

inline std::shared_ptr<const Program> read_image_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StateError("cannot open: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_image(bytes);
}

}  // namespace redfin
