#pragma once

// Deterministic lowering of expression DAGs to SMT-LIB 2 scripts.
//
// Every compound node becomes one define-fun named _n<id> (ids are creation
// indices, so emission is reproducible: the same terms lower to the same
// bytes). Variables become declare-const; constants are emitted inline.
// User variable names are validated letter-first at creation, so they can
// never collide with the _n namespace. The logic is QF_BV unless an array
// node survives folding, in which case it is QF_ABV.

#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "redfin/expr.hpp"

namespace redfin::smt {

struct LowerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ObjectiveKind { None, Minimize, Maximize };

struct LowerOptions {
  std::optional<unsigned> timeout_ms;
  ObjectiveKind objective = ObjectiveKind::None;
  SymValue objective_term{};               // Bv64, required when objective is set
  std::string objective_name = "objective";
};

struct Lowered {
  std::string script;
  bool uses_arrays = false;
  std::vector<std::string> variables;  // declare-const names in declaration order
};

namespace detail {

inline std::string sort_text(Sort s) {
  switch (s) {
    case Sort::Bool: return "Bool";
    case Sort::Bv8: return "(_ BitVec 8)";
    case Sort::Bv16: return "(_ BitVec 16)";
    case Sort::Bv64: return "(_ BitVec 64)";
    case Sort::Array: return "(Array (_ BitVec 8) (_ BitVec 64))";
  }
  throw LowerError("sort_text: bad sort");
}

inline std::string const_text(const Node* n) {
  if (n->sort == Sort::Bool) return n->bits ? "true" : "false";
  return "(_ bv" + std::to_string(n->bits) + " " + std::to_string(width_of(n->sort)) + ")";
}

class Emitter {
 public:
  Lowered run(const std::vector<SymValue>& assertions, const LowerOptions& opts) {
    if (opts.objective != ObjectiveKind::None) {
      if (!opts.objective_term.valid() || opts.objective_term.sort() != Sort::Bv64)
        throw LowerError("objective term must be a 64-bit value");
      validate_name(opts.objective_name);
    }
    for (const SymValue& a : assertions) {
      if (!a.valid() || a.sort() != Sort::Bool) throw LowerError("assertion must be boolean");
      visit(a.node());
    }
    if (opts.objective != ObjectiveKind::None) visit(opts.objective_term.node());

    std::string script;
    script += "(set-option :produce-models true)\n";
    if (opts.timeout_ms) script += "(set-option :timeout " + std::to_string(*opts.timeout_ms) + ")\n";
    script += std::string("(set-logic ") + (uses_arrays_ ? "QF_ABV" : "QF_BV") + ")\n";
    script += decls_;
    script += defs_;
    for (const SymValue& a : assertions) script += "(assert " + ref(a.node()) + ")\n";
    if (opts.objective != ObjectiveKind::None) {
      script += "(define-fun " + opts.objective_name + " () (_ BitVec 64) " +
                ref(opts.objective_term.node()) + ")\n";
      script += opts.objective == ObjectiveKind::Minimize ? "(minimize " : "(maximize ";
      script += opts.objective_name + ")\n";
    }
    script += "(check-sat)\n";
    script += "(get-model)\n";
    if (opts.objective != ObjectiveKind::None) script += "(get-objectives)\n";

    Lowered out;
    out.script = std::move(script);
    out.uses_arrays = uses_arrays_;
    out.variables = std::move(vars_);
    return out;
  }

 private:
  static void validate_name(const std::string& name) {
    if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0])))
      throw LowerError("objective name must start with a letter: '" + name + "'");
    for (char c : name)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
        throw LowerError("objective name contains invalid character: '" + name + "'");
  }

  // Reference to an already-visited node.
  std::string ref(const Node* n) const {
    switch (n->kind) {
      case Kind::Const: return const_text(n);
      case Kind::Var: return n->name;
      case Kind::ConstArray:
        return "((as const " + sort_text(Sort::Array) + ") " + const_text(n->child[0]) + ")";
      default: return "_n" + std::to_string(n->id);
    }
  }

  void visit(const Node* root) {
    // Iterative post-order; children first so every define-fun only uses
    // earlier names.
    std::vector<std::pair<const Node*, bool>> stack{{root, false}};
    while (!stack.empty()) {
      auto [n, expanded] = stack.back();
      stack.pop_back();
      if (done_.count(n->id)) continue;
      if (n->sort == Sort::Array || n->kind == Kind::Select) uses_arrays_ = true;
      if (!expanded) {
        stack.push_back({n, true});
        for (int i = n->arity - 1; i >= 0; --i) stack.push_back({n->child[i], false});
        continue;
      }
      done_.insert(n->id);
      emit(n);
    }
  }

  void emit(const Node* n) {
    switch (n->kind) {
      case Kind::Const:
        return;  // inline
      case Kind::Var:
        decls_ += "(declare-const " + n->name + " " + sort_text(n->sort) + ")\n";
        vars_.push_back(n->name);
        return;
      case Kind::ConstArray:
        return;  // inline
      default:
        break;
    }
    defs_ += "(define-fun _n" + std::to_string(n->id) + " () " + sort_text(n->sort) + " " +
             term(n) + ")\n";
  }

  std::string term(const Node* n) const {
    const bool is_bool = n->arity > 0 && n->child[0]->sort == Sort::Bool;
    const auto c = [&](int i) { return ref(n->child[i]); };
    switch (n->kind) {
      case Kind::Neg: return "(bvneg " + c(0) + ")";
      case Kind::Not: return (is_bool ? "(not " : "(bvnot ") + c(0) + ")";
      case Kind::Add: return "(bvadd " + c(0) + " " + c(1) + ")";
      case Kind::Sub: return "(bvsub " + c(0) + " " + c(1) + ")";
      case Kind::Mul: return "(bvmul " + c(0) + " " + c(1) + ")";
      case Kind::Sdiv: return "(bvsdiv " + c(0) + " " + c(1) + ")";
      case Kind::And: return (is_bool ? "(and " : "(bvand ") + c(0) + " " + c(1) + ")";
      case Kind::Or: return (is_bool ? "(or " : "(bvor ") + c(0) + " " + c(1) + ")";
      case Kind::Xor: return (is_bool ? "(xor " : "(bvxor ") + c(0) + " " + c(1) + ")";
      case Kind::Shl: return "(bvshl " + c(0) + " " + c(1) + ")";
      case Kind::Lshr: return "(bvlshr " + c(0) + " " + c(1) + ")";
      case Kind::Ashr: return "(bvashr " + c(0) + " " + c(1) + ")";
      case Kind::Eq: return "(= " + c(0) + " " + c(1) + ")";
      case Kind::Slt: return "(bvslt " + c(0) + " " + c(1) + ")";
      case Kind::Sgt: return "(bvsgt " + c(0) + " " + c(1) + ")";
      case Kind::Ult: return "(bvult " + c(0) + " " + c(1) + ")";
      case Kind::Ite: return "(ite " + c(0) + " " + c(1) + " " + c(2) + ")";
      case Kind::ZeroExt:
      case Kind::SignExt: {
        const unsigned grow = width_of(n->sort) - width_of(n->child[0]->sort);
        return std::string("((_ ") + (n->kind == Kind::ZeroExt ? "zero_extend" : "sign_extend") +
               " " + std::to_string(grow) + ") " + c(0) + ")";
      }
      case Kind::Extract: {
        const unsigned hi = static_cast<unsigned>(n->bits >> 8), lo = static_cast<unsigned>(n->bits & 0xff);
        return "((_ extract " + std::to_string(hi) + " " + std::to_string(lo) + ") " + c(0) + ")";
      }
      case Kind::Select: return "(select " + c(0) + " " + c(1) + ")";
      default: throw LowerError("term: unexpected node kind");
    }
  }

  std::unordered_set<uint32_t> done_;
  std::string decls_, defs_;
  std::vector<std::string> vars_;
  bool uses_arrays_ = false;
};

}  // namespace detail

inline Lowered lower(const std::vector<SymValue>& assertions, const LowerOptions& opts = {}) {
  return detail::Emitter().run(assertions, opts);
}

}  // namespace redfin::smt
