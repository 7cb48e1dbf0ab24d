#pragma once

// Hash-consed symbolic expression DAG.
//
// Nodes are immutable and interned: building the same term twice yields the
// same pointer, so structural equality is pointer equality and shared
// subterms are stored once. A Context owns its nodes; values from different
// contexts must not be mixed. The context is confined to one thread per
// verification query.
//
// Simplification is deliberately minimal and predictable:
//   - operations whose operands are all Const fold to a Const, using the
//     same scalar semantics as the concrete interpreter;
//   - Ite with a Const condition returns the taken branch;
//   - Ite whose branches are the same node returns that node;
//   - Select over a ConstArray base returns the default value.
// Nothing else is rewritten.

#include <array>
#include <cctype>
#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "redfin/scalar.hpp"

namespace redfin {

enum class Sort : uint8_t { Bool, Bv8, Bv16, Bv64, Array };  // Array: bv8 -> bv64

inline constexpr unsigned width_of(Sort s) {
  switch (s) {
    case Sort::Bool: return 1;
    case Sort::Bv8: return 8;
    case Sort::Bv16: return 16;
    case Sort::Bv64: return 64;
    case Sort::Array: return 0;
  }
  return 0;
}

inline std::string sort_name(Sort s) {
  switch (s) {
    case Sort::Bool: return "bool";
    case Sort::Bv8: return "bv8";
    case Sort::Bv16: return "bv16";
    case Sort::Bv64: return "bv64";
    case Sort::Array: return "array";
  }
  return "?";
}

enum class Kind : uint8_t {
  Const, Var, ConstArray,
  Neg, Not,
  Add, Sub, Mul, Sdiv, And, Or, Xor, Shl, Lshr, Ashr,
  Eq, Slt, Sgt, Ult,
  Ite,
  ZeroExt, SignExt, Extract,
  Select,
};

struct SortError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Node {
  Kind kind;
  Sort sort;
  uint32_t id;        // creation index within the context; drives deterministic emission
  uint64_t bits = 0;  // Const payload (masked to width); Extract packs hi<<8 | lo
  std::string name;   // Var payload
  std::array<const Node*, 3> child{};
  uint8_t arity = 0;
};

class SymValue {
 public:
  SymValue() = default;
  explicit SymValue(const Node* n) : node_(n) {}

  const Node* node() const { return node_; }
  bool valid() const { return node_ != nullptr; }
  Kind kind() const { return node_->kind; }
  Sort sort() const { return node_->sort; }
  bool is_const() const { return node_->kind == Kind::Const; }
  uint64_t const_bits() const { return node_->bits; }

  // Pointer identity is structural equality under hash-consing.
  friend bool operator==(const SymValue& a, const SymValue& b) { return a.node_ == b.node_; }

 private:
  const Node* node_ = nullptr;
};

namespace detail {

inline constexpr uint64_t mask_bits(uint64_t v, unsigned width) {
  return width >= 64 ? v : (v & ((uint64_t{1} << width) - 1));
}

inline constexpr int64_t sext_bits(uint64_t v, unsigned width) {
  if (width >= 64) return static_cast<int64_t>(v);
  const uint64_t sign = uint64_t{1} << (width - 1);
  const uint64_t m = (uint64_t{1} << width) - 1;
  v &= m;
  return static_cast<int64_t>((v ^ sign) - sign);
}

struct NodeKey {
  Kind kind;
  Sort sort;
  uint64_t bits;
  const std::string* name;
  std::array<const Node*, 3> child;
  uint8_t arity;
};

struct NodeKeyHash {
  size_t operator()(const NodeKey& k) const {
    size_t h = std::hash<unsigned>()((static_cast<unsigned>(k.kind) << 8) | static_cast<unsigned>(k.sort));
    auto mix = [&h](size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
    mix(std::hash<uint64_t>()(k.bits));
    if (k.name) mix(std::hash<std::string>()(*k.name));
    for (uint8_t i = 0; i < k.arity; ++i) mix(std::hash<const Node*>()(k.child[i]));
    return h;
  }
};

struct NodeKeyEq {
  bool operator()(const NodeKey& a, const NodeKey& b) const {
    if (a.kind != b.kind || a.sort != b.sort || a.bits != b.bits || a.arity != b.arity) return false;
    if ((a.name == nullptr) != (b.name == nullptr)) return false;
    if (a.name && *a.name != *b.name) return false;
    for (uint8_t i = 0; i < a.arity; ++i)
      if (a.child[i] != b.child[i]) return false;
    return true;
  }
};

}  // namespace detail

class Context {
 public:
  Context() = default;
  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;

  size_t node_count() const { return nodes_.size(); }

  SymValue constant(Sort sort, uint64_t bits) {
    if (sort == Sort::Array) throw SortError("constant: array sort requires const_array");
    bits = detail::mask_bits(bits, width_of(sort));
    if (sort == Sort::Bool) bits &= 1;
    return SymValue(intern(Kind::Const, sort, bits, nullptr, {}, 0));
  }

  SymValue word(int64_t v) { return constant(Sort::Bv64, scalar::to_unsigned(v)); }
  SymValue byte(uint8_t v) { return constant(Sort::Bv8, v); }
  SymValue code16(uint16_t v) { return constant(Sort::Bv16, v); }
  SymValue boolean(bool v) { return constant(Sort::Bool, v ? 1 : 0); }

  // Fresh named variable. Names are solver identifiers: letter first, then
  // letters, digits, underscores. A name may be introduced once per context.
  SymValue var(const std::string& name, Sort sort) {
    check_var_name(name);
    return SymValue(intern(Kind::Var, sort, 0, &name, {}, 0));
  }

  SymValue array_var(const std::string& name) {
    check_var_name(name);
    return SymValue(intern(Kind::Var, Sort::Array, 0, &name, {}, 0));
  }

  SymValue const_array(SymValue default_value) {
    require_sort(default_value, Sort::Bv64, "const_array default");
    return SymValue(intern(Kind::ConstArray, Sort::Array, 0, nullptr, {default_value.node()}, 1));
  }

  // Generic application; named builders below funnel through this.
  SymValue apply(Kind kind, std::initializer_list<SymValue> operands) {
    std::vector<SymValue> ops(operands);
    return apply(kind, ops);
  }

  SymValue apply(Kind kind, const std::vector<SymValue>& ops) {
    switch (kind) {
      case Kind::Neg:
      case Kind::Not:
        require_arity(kind, ops, 1);
        return unary(kind, ops[0]);
      case Kind::Add: case Kind::Sub: case Kind::Mul: case Kind::Sdiv:
      case Kind::And: case Kind::Or: case Kind::Xor:
      case Kind::Shl: case Kind::Lshr: case Kind::Ashr:
        require_arity(kind, ops, 2);
        return binary(kind, ops[0], ops[1]);
      case Kind::Eq: case Kind::Slt: case Kind::Sgt: case Kind::Ult:
        require_arity(kind, ops, 2);
        return compare(kind, ops[0], ops[1]);
      case Kind::Ite:
        require_arity(kind, ops, 3);
        return ite(ops[0], ops[1], ops[2]);
      case Kind::Select:
        require_arity(kind, ops, 2);
        return select(ops[0], ops[1]);
      default:
        throw SortError("apply: kind requires a dedicated builder");
    }
  }

  SymValue neg(SymValue a) { return unary(Kind::Neg, a); }
  SymValue bit_not(SymValue a) { return unary(Kind::Not, a); }
  SymValue add(SymValue a, SymValue b) { return binary(Kind::Add, a, b); }
  SymValue sub(SymValue a, SymValue b) { return binary(Kind::Sub, a, b); }
  SymValue mul(SymValue a, SymValue b) { return binary(Kind::Mul, a, b); }
  SymValue sdiv(SymValue a, SymValue b) { return binary(Kind::Sdiv, a, b); }
  SymValue bit_and(SymValue a, SymValue b) { return binary(Kind::And, a, b); }
  SymValue bit_or(SymValue a, SymValue b) { return binary(Kind::Or, a, b); }
  SymValue bit_xor(SymValue a, SymValue b) { return binary(Kind::Xor, a, b); }
  SymValue shl(SymValue a, SymValue b) { return binary(Kind::Shl, a, b); }
  SymValue lshr(SymValue a, SymValue b) { return binary(Kind::Lshr, a, b); }
  SymValue ashr(SymValue a, SymValue b) { return binary(Kind::Ashr, a, b); }
  SymValue eq(SymValue a, SymValue b) { return compare(Kind::Eq, a, b); }
  SymValue slt(SymValue a, SymValue b) { return compare(Kind::Slt, a, b); }
  SymValue sgt(SymValue a, SymValue b) { return compare(Kind::Sgt, a, b); }
  SymValue ult(SymValue a, SymValue b) { return compare(Kind::Ult, a, b); }

  SymValue logic_and(SymValue a, SymValue b) {
    require_sort(a, Sort::Bool, "logic_and operand");
    return binary(Kind::And, a, b);
  }
  SymValue logic_or(SymValue a, SymValue b) {
    require_sort(a, Sort::Bool, "logic_or operand");
    return binary(Kind::Or, a, b);
  }
  SymValue logic_not(SymValue a) {
    require_sort(a, Sort::Bool, "logic_not operand");
    return unary(Kind::Not, a);
  }

  SymValue ite(SymValue cond, SymValue then_v, SymValue else_v) {
    require_sort(cond, Sort::Bool, "ite condition");
    if (then_v.sort() != else_v.sort())
      throw SortError("ite: branch sorts differ: " + sort_name(then_v.sort()) + " vs " + sort_name(else_v.sort()));
    if (cond.is_const()) return cond.const_bits() ? then_v : else_v;
    if (then_v == else_v) return then_v;
    return SymValue(intern(Kind::Ite, then_v.sort(), 0, nullptr,
                           {cond.node(), then_v.node(), else_v.node()}, 3));
  }

  SymValue zero_extend(Sort target, SymValue a) { return extend(Kind::ZeroExt, target, a); }
  SymValue sign_extend(Sort target, SymValue a) { return extend(Kind::SignExt, target, a); }

  SymValue extract(unsigned hi, unsigned lo, SymValue a) {
    require_bv(a, "extract operand");
    const unsigned w = width_of(a.sort());
    if (hi >= w || lo > hi) throw SortError("extract: bad bit range");
    const unsigned out_w = hi - lo + 1;
    Sort target;
    switch (out_w) {
      case 8: target = Sort::Bv8; break;
      case 16: target = Sort::Bv16; break;
      case 64: target = Sort::Bv64; break;
      default: throw SortError("extract: unsupported result width " + std::to_string(out_w));
    }
    if (a.is_const()) return constant(target, a.const_bits() >> lo);
    return SymValue(intern(Kind::Extract, target, (uint64_t{hi} << 8) | lo, nullptr, {a.node()}, 1));
  }

  // Base select over an array node (Var or ConstArray). Store chains live in
  // SymArray and are peeled into Ite terms before this is reached.
  SymValue select(SymValue array, SymValue index) {
    require_sort(array, Sort::Array, "select array");
    require_sort(index, Sort::Bv8, "select index");
    if (array.kind() == Kind::ConstArray) return SymValue(array.node()->child[0]);
    return SymValue(intern(Kind::Select, Sort::Bv64, 0, nullptr, {array.node(), index.node()}, 2));
  }

  std::optional<bool> known_bool(SymValue v) const {
    if (v.sort() != Sort::Bool || !v.is_const()) return std::nullopt;
    return v.const_bits() != 0;
  }

  std::optional<int64_t> known_int(SymValue v) const {
    if (v.sort() == Sort::Bool || v.sort() == Sort::Array || !v.is_const()) return std::nullopt;
    return detail::sext_bits(v.const_bits(), width_of(v.sort()));
  }

 private:
  SymValue unary(Kind kind, SymValue a) {
    if (kind == Kind::Neg) require_bv(a, "neg operand");
    else if (a.sort() == Sort::Array) throw SortError("not: array operand");
    if (a.is_const()) {
      if (a.sort() == Sort::Bool) return boolean(kind == Kind::Not ? a.const_bits() == 0 : a.const_bits() != 0);
      const unsigned w = width_of(a.sort());
      const int64_t x = detail::sext_bits(a.const_bits(), w);
      const int64_t r = kind == Kind::Neg ? scalar::neg(x) : scalar::bit_not(x);
      return constant(a.sort(), scalar::to_unsigned(r));
    }
    return SymValue(intern(kind, a.sort(), 0, nullptr, {a.node()}, 1));
  }

  SymValue binary(Kind kind, SymValue a, SymValue b) {
    if (a.sort() != b.sort())
      throw SortError("binary operand sorts differ: " + sort_name(a.sort()) + " vs " + sort_name(b.sort()));
    if (a.sort() == Sort::Array) throw SortError("binary op on array sort");
    const bool boolean_sort = a.sort() == Sort::Bool;
    if (boolean_sort && kind != Kind::And && kind != Kind::Or && kind != Kind::Xor)
      throw SortError("arithmetic on bool sort");
    if (a.is_const() && b.is_const()) {
      if (boolean_sort) {
        const bool x = a.const_bits() != 0, y = b.const_bits() != 0;
        bool r = false;
        switch (kind) {
          case Kind::And: r = x && y; break;
          case Kind::Or: r = x || y; break;
          case Kind::Xor: r = x != y; break;
          default: break;
        }
        return boolean(r);
      }
      const unsigned w = width_of(a.sort());
      const int64_t x = detail::sext_bits(a.const_bits(), w);
      const int64_t y = detail::sext_bits(b.const_bits(), w);
      int64_t r = 0;
      switch (kind) {
        case Kind::Add: r = scalar::add(x, y); break;
        case Kind::Sub: r = scalar::sub(x, y); break;
        case Kind::Mul: r = scalar::mul(x, y); break;
        case Kind::Sdiv: r = scalar::sdiv(x, y); break;
        case Kind::And: r = scalar::bit_and(x, y); break;
        case Kind::Or: r = scalar::bit_or(x, y); break;
        case Kind::Xor: r = scalar::bit_xor(x, y); break;
        case Kind::Shl: case Kind::Lshr: case Kind::Ashr: {
          const uint64_t amt = detail::mask_bits(b.const_bits(), w);
          if (amt >= w) {
            r = kind == Kind::Ashr ? (x < 0 ? -1 : 0) : 0;
          } else if (kind == Kind::Shl) {
            r = scalar::shl(x, amt);
          } else if (kind == Kind::Lshr) {
            r = scalar::to_signed(detail::mask_bits(a.const_bits(), w) >> amt);
          } else {
            r = scalar::ashr(x, amt);
          }
          break;
        }
        default: break;
      }
      return constant(a.sort(), scalar::to_unsigned(r));
    }
    return SymValue(intern(kind, a.sort(), 0, nullptr, {a.node(), b.node()}, 2));
  }

  SymValue compare(Kind kind, SymValue a, SymValue b) {
    if (a.sort() != b.sort())
      throw SortError("compare operand sorts differ: " + sort_name(a.sort()) + " vs " + sort_name(b.sort()));
    if (a.sort() == Sort::Array) throw SortError("compare on array sort");
    if (kind != Kind::Eq && a.sort() == Sort::Bool) throw SortError("ordered compare on bool sort");
    if (a.is_const() && b.is_const()) {
      const unsigned w = width_of(a.sort());
      bool r = false;
      switch (kind) {
        case Kind::Eq: r = a.const_bits() == b.const_bits(); break;
        case Kind::Slt: r = detail::sext_bits(a.const_bits(), w) < detail::sext_bits(b.const_bits(), w); break;
        case Kind::Sgt: r = detail::sext_bits(a.const_bits(), w) > detail::sext_bits(b.const_bits(), w); break;
        case Kind::Ult: r = a.const_bits() < b.const_bits(); break;
        default: break;
      }
      return boolean(r);
    }
    return SymValue(intern(kind, Sort::Bool, 0, nullptr, {a.node(), b.node()}, 2));
  }

  SymValue extend(Kind kind, Sort target, SymValue a) {
    require_bv(a, "extend operand");
    const unsigned from = width_of(a.sort()), to = width_of(target);
    if (target == Sort::Array || to <= from) throw SortError("extend: target not wider than source");
    if (a.is_const()) {
      if (kind == Kind::ZeroExt) return constant(target, a.const_bits());
      return constant(target, scalar::to_unsigned(detail::sext_bits(a.const_bits(), from)));
    }
    return SymValue(intern(kind, target, 0, nullptr, {a.node()}, 1));
  }

  void require_sort(SymValue v, Sort s, const char* what) const {
    if (v.sort() != s)
      throw SortError(std::string(what) + ": expected " + sort_name(s) + ", got " + sort_name(v.sort()));
  }

  void require_bv(SymValue v, const char* what) const {
    if (v.sort() == Sort::Bool || v.sort() == Sort::Array)
      throw SortError(std::string(what) + ": expected bitvector, got " + sort_name(v.sort()));
  }

  void require_arity(Kind kind, const std::vector<SymValue>& ops, size_t n) const {
    if (ops.size() != n)
      throw SortError("apply: arity mismatch for kind " + std::to_string(static_cast<int>(kind)));
  }

  void check_var_name(const std::string& name) {
    if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0])))
      throw SortError("variable name must start with a letter: '" + name + "'");
    for (char c : name)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
        throw SortError("variable name contains invalid character: '" + name + "'");
    if (!var_names_.insert(name).second)
      throw SortError("duplicate variable name in context: '" + name + "'");
  }

  const Node* intern(Kind kind, Sort sort, uint64_t bits, const std::string* name,
                     std::array<const Node*, 3> child, uint8_t arity) {
    detail::NodeKey key{kind, sort, bits, name, child, arity};
    if (auto it = interned_.find(key); it != interned_.end()) return it->second;
    Node& n = nodes_.emplace_back();
    n.kind = kind;
    n.sort = sort;
    n.id = static_cast<uint32_t>(nodes_.size() - 1);
    n.bits = bits;
    if (name) n.name = *name;
    n.child = child;
    n.arity = arity;
    detail::NodeKey stored{kind, sort, bits, name ? &n.name : nullptr, child, arity};
    interned_.emplace(stored, &n);
    return &n;
  }

  std::deque<Node> nodes_;
  std::unordered_map<detail::NodeKey, const Node*, detail::NodeKeyHash, detail::NodeKeyEq> interned_;
  std::unordered_set<std::string> var_names_;
};

}  // namespace redfin
