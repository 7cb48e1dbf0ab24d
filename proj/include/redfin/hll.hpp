#pragma once

// Arithmetic expression language over memory cells, with a reference
// evaluator and a compiler to register code.
//
// Text form:
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := 'abs' '(' expr ')' | '(' expr ')' | 'm[' cell ']' | integer
//
// Division follows the machine's semantics (SMT-LIB signed division,
// division by zero included), so the evaluator is a genuine oracle for
// compiled code.
//
// The compiler keeps the current value in r0 and spills around inner
// subexpressions through a stack that lives in data memory: one cell (the
// stack pointer cell) holds the address of the top of stack, which grows
// downward, and one scratch cell receives popped values so ALU instructions
// can address them statically. Constants in operand position borrow the
// stack pointer cell itself as a staging cell — its value is saved to a
// register, overwritten with the constant for a single ALU instruction, and
// restored — which avoids stack traffic entirely. r1 and r2 are scratch
// within a single push/pop/stage sequence; r3 is never touched.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "redfin/isa.hpp"

namespace redfin {

struct HllError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Const, Var, Abs, Add, Sub, Mul, Div };
  Kind kind;
  int64_t value = 0;        // Const
  MemoryAddress cell = 0;   // Var
  ExprPtr lhs, rhs;         // Abs uses lhs only

  static ExprPtr constant(int64_t v) {
    return std::make_shared<Expr>(Expr{Kind::Const, v, 0, nullptr, nullptr});
  }
  static ExprPtr var(MemoryAddress cell) {
    return std::make_shared<Expr>(Expr{Kind::Var, 0, cell, nullptr, nullptr});
  }
  static ExprPtr abs(ExprPtr x) {
    return std::make_shared<Expr>(Expr{Kind::Abs, 0, 0, std::move(x), nullptr});
  }
  static ExprPtr binary(Kind k, ExprPtr x, ExprPtr y) {
    return std::make_shared<Expr>(Expr{k, 0, 0, std::move(x), std::move(y)});
  }
  static ExprPtr add(ExprPtr x, ExprPtr y) { return binary(Kind::Add, std::move(x), std::move(y)); }
  static ExprPtr sub(ExprPtr x, ExprPtr y) { return binary(Kind::Sub, std::move(x), std::move(y)); }
  static ExprPtr mul(ExprPtr x, ExprPtr y) { return binary(Kind::Mul, std::move(x), std::move(y)); }
  static ExprPtr div(ExprPtr x, ExprPtr y) { return binary(Kind::Div, std::move(x), std::move(y)); }
};

// Reference semantics, generic over the value domain; cell maps a memory
// address to its value.
template <typename D, typename CellFn>
typename D::Word eval_expr(const D& dom, const Expr& e, CellFn&& cell) {
  switch (e.kind) {
    case Expr::Kind::Const:
      return dom.word(e.value);
    case Expr::Kind::Var:
      return cell(e.cell);
    case Expr::Kind::Abs: {
      const auto x = eval_expr(dom, *e.lhs, cell);
      return dom.ite_word(dom.slt(x, dom.word(0)), dom.neg(x), x);
    }
    case Expr::Kind::Add:
      return dom.add(eval_expr(dom, *e.lhs, cell), eval_expr(dom, *e.rhs, cell));
    case Expr::Kind::Sub:
      return dom.sub(eval_expr(dom, *e.lhs, cell), eval_expr(dom, *e.rhs, cell));
    case Expr::Kind::Mul:
      return dom.mul(eval_expr(dom, *e.lhs, cell), eval_expr(dom, *e.rhs, cell));
    case Expr::Kind::Div:
      return dom.sdiv(eval_expr(dom, *e.lhs, cell), eval_expr(dom, *e.rhs, cell));
  }
  throw HllError("eval_expr: corrupt expression node");
}

// ---------------------------------------------------------------------------
// Text parser

namespace detail_hll {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprPtr parse() {
    auto e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  ExprPtr expr() {
    auto e = term();
    for (;;) {
      skip_ws();
      if (eat('+')) e = Expr::add(e, term());
      else if (eat('-')) e = Expr::sub(e, term());
      else return e;
    }
  }

  ExprPtr term() {
    auto e = factor();
    for (;;) {
      skip_ws();
      if (eat('*')) e = Expr::mul(e, factor());
      else if (eat('/')) e = Expr::div(e, factor());
      else return e;
    }
  }

  ExprPtr factor() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expr();
      expect(')');
      return e;
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return integer();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::string word = identifier();
      if (word == "abs") {
        expect('(');
        auto e = expr();
        expect(')');
        return Expr::abs(e);
      }
      if (word == "m") {
        expect('[');
        skip_ws();
        const int64_t cell = number("memory cell");
        if (cell < 0 || cell > 255) fail("memory cell out of range [0,255]");
        expect(']');
        return Expr::var(static_cast<MemoryAddress>(cell));
      }
      fail("unknown name '" + word + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  ExprPtr integer() {
    bool neg = eat('-');
    skip_ws();
    const int64_t v = number("integer");
    return Expr::constant(neg ? -v : v);
  }

  int64_t number(const char* what) {
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      fail(std::string("expected ") + what);
    int64_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      if (v <= (int64_t{1} << 56)) v = v * 10 + (text_[pos_] - '0');  // saturate; ranges checked later
      ++pos_;
    }
    return v;
  }

  std::string identifier() {
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw HllError("parse error at offset " + std::to_string(pos_) + ": " + message);
  }

  std::string_view text_;
  size_t pos_ = 0;
};

}  // namespace detail_hll

inline ExprPtr parse_expr(std::string_view text) { return detail_hll::Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Compiler

struct CompileOptions {
  MemoryAddress stack_pointer_cell = 5;  // holds the address of the top of stack
  MemoryAddress temp_cell = 4;           // receives popped values
};

namespace detail_hll {

inline void collect_cells(const Expr& e, std::set<MemoryAddress>& out) {
  if (e.kind == Expr::Kind::Var) out.insert(e.cell);
  if (e.lhs) collect_cells(*e.lhs, out);
  if (e.rhs) collect_cells(*e.rhs, out);
}

// Maximum number of values parked on the stack at once.
inline unsigned stack_depth(const Expr& e);

inline bool is_commutative(Expr::Kind k) { return k == Expr::Kind::Add || k == Expr::Kind::Mul; }

class Compiler {
 public:
  explicit Compiler(CompileOptions opts) : sp_(opts.stack_pointer_cell), temp_(opts.temp_cell) {}

  std::vector<Instruction> compile_body(const Expr& e) {
    std::set<MemoryAddress> cells;
    collect_cells(e, cells);
    if (sp_ == temp_)
      throw HllError("stack pointer cell and scratch cell collide at m[" + std::to_string(sp_) + "]");
    if (cells.count(sp_))
      throw HllError("stack pointer cell m[" + std::to_string(sp_) + "] is used by the expression");
    if (cells.count(temp_))
      throw HllError("scratch cell m[" + std::to_string(temp_) + "] is used by the expression");
    if (stack_depth(e) > 255) throw HllError("expression nests too deeply for the stack");
    out_.clear();
    emit_expr(e);
    return std::move(out_);
  }

 private:
  void emit(Opcode op, unsigned reg = 0, int64_t operand = 0) {
    out_.push_back(make_instruction(op, reg, operand));
  }

  // r1 := top-of-stack address - 1; push r0 there.
  void push_r0() {
    emit(Opcode::LdI, 1, -1);
    emit(Opcode::Add, 1, sp_);
    emit(Opcode::St, 1, sp_);
    emit(Opcode::Stmi, 0, sp_);
  }

  // Scratch cell := popped value; stack pointer cell restored.
  void pop_to_temp() {
    emit(Opcode::Ldmi, 1, sp_);
    emit(Opcode::St, 1, temp_);
    emit(Opcode::LdI, 2, 1);
    emit(Opcode::Add, 2, sp_);
    emit(Opcode::St, 2, sp_);
  }

  // op r0 with the constant c staged through the stack pointer cell, whose
  // value is dead during the window: save it to r2, overwrite, restore.
  void apply_constant(Opcode op, int64_t c) {
    emit(Opcode::Ld, 2, sp_);
    emit(Opcode::LdI, 1, c);
    emit(Opcode::St, 1, sp_);
    emit(op, 0, sp_);
    emit(Opcode::St, 2, sp_);
  }

  static Opcode opcode_of(Expr::Kind k) {
    switch (k) {
      case Expr::Kind::Add: return Opcode::Add;
      case Expr::Kind::Sub: return Opcode::Sub;
      case Expr::Kind::Mul: return Opcode::Mul;
      case Expr::Kind::Div: return Opcode::Div;
      default: throw HllError("not a binary operator");
    }
  }

  void emit_expr(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Const:
        if (e.value < -128 || e.value > 127)
          throw HllError("constant out of range [-128,127]: " + std::to_string(e.value));
        emit(Opcode::LdI, 0, e.value);
        return;
      case Expr::Kind::Var:
        emit(Opcode::Ld, 0, e.cell);
        return;
      case Expr::Kind::Abs:
        emit_expr(*e.lhs);
        emit(Opcode::Abs, 0);
        return;
      default:
        break;
    }

    const Expr& x = *e.lhs;
    const Expr& y = *e.rhs;
    const Opcode op = opcode_of(e.kind);

    if (e.kind == Expr::Kind::Div && y.kind == Expr::Kind::Const && y.value == 0)
      throw HllError("division by constant zero");

    if (y.kind == Expr::Kind::Var) {
      emit_expr(x);
      emit(op, 0, y.cell);
      return;
    }
    if (is_commutative(e.kind) && x.kind == Expr::Kind::Var) {
      emit_expr(y);
      emit(op, 0, x.cell);
      return;
    }
    if (y.kind == Expr::Kind::Const) {
      if (y.value < -128 || y.value > 127)
        throw HllError("constant out of range [-128,127]: " + std::to_string(y.value));
      emit_expr(x);
      apply_constant(op, y.value);
      return;
    }
    if (is_commutative(e.kind)) {
      emit_expr(x);
      push_r0();
      emit_expr(y);
      pop_to_temp();     // scratch cell := value of x
      emit(op, 0, temp_);
      return;
    }
    emit_expr(y);
    push_r0();
    emit_expr(x);
    pop_to_temp();       // scratch cell := value of y
    emit(op, 0, temp_);
  }

  MemoryAddress sp_;
  MemoryAddress temp_;
  std::vector<Instruction> out_;
};

inline unsigned stack_depth(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const:
    case Expr::Kind::Var:
      return 0;
    case Expr::Kind::Abs:
      return stack_depth(*e.lhs);
    default:
      break;
  }
  const Expr& x = *e.lhs;
  const Expr& y = *e.rhs;
  if (y.kind == Expr::Kind::Var) return stack_depth(x);
  if (is_commutative(e.kind) && x.kind == Expr::Kind::Var) return stack_depth(y);
  if (y.kind == Expr::Kind::Const) return stack_depth(x);
  if (is_commutative(e.kind)) return std::max(stack_depth(x), 1 + stack_depth(y));
  return std::max(stack_depth(y), 1 + stack_depth(x));
}

}  // namespace detail_hll

// Compile to a register program; the result in r0, terminated with halt.
inline std::vector<Instruction> compile_expr(const Expr& e, CompileOptions opts = {}) {
  auto code = detail_hll::Compiler(opts).compile_body(e);
  code.push_back(make_instruction(Opcode::Halt));
  return code;
}

// Body only, no terminator; for embedding in a larger program.
inline std::vector<Instruction> compile_expr_body(const Expr& e, CompileOptions opts = {}) {
  return detail_hll::Compiler(opts).compile_body(e);
}

}  // namespace redfin
