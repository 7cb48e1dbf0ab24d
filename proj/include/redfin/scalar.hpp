#pragma once

// Wrap-around 64-bit scalar semantics shared by the concrete interpreter and
// the symbolic constant folder. Keeping one definition for both engines is
// deliberate: a divergence here would split the semantics in two.
//
// Conventions:
//  - All arithmetic wraps modulo 2^64; values are interpreted as signed
//    two's complement where signedness matters.
//  - sdiv follows the SMT-LIB bvsdiv definition, including division by zero
//    (x / 0 = -1 for x >= 0, +1 for x < 0) and INT64_MIN / -1 = INT64_MIN.
//  - Shifts follow SMT-LIB bvshl/bvlshr/bvashr: amounts are unsigned and an
//    amount >= 64 yields 0 (or the sign fill for ashr). Instruction-level
//    masking of shift amounts happens in the interpreter, not here.

#include <cstdint>
#include <limits>

namespace redfin::scalar {

inline constexpr int64_t min64 = std::numeric_limits<int64_t>::min();
inline constexpr int64_t max64 = std::numeric_limits<int64_t>::max();

inline constexpr int64_t to_signed(uint64_t v) { return static_cast<int64_t>(v); }
inline constexpr uint64_t to_unsigned(int64_t v) { return static_cast<uint64_t>(v); }

inline constexpr int64_t add(int64_t a, int64_t b) { return to_signed(to_unsigned(a) + to_unsigned(b)); }
inline constexpr int64_t sub(int64_t a, int64_t b) { return to_signed(to_unsigned(a) - to_unsigned(b)); }
inline constexpr int64_t mul(int64_t a, int64_t b) { return to_signed(to_unsigned(a) * to_unsigned(b)); }
inline constexpr int64_t neg(int64_t a) { return to_signed(0 - to_unsigned(a)); }
inline constexpr int64_t bit_not(int64_t a) { return to_signed(~to_unsigned(a)); }
inline constexpr int64_t bit_and(int64_t a, int64_t b) { return to_signed(to_unsigned(a) & to_unsigned(b)); }
inline constexpr int64_t bit_or(int64_t a, int64_t b) { return to_signed(to_unsigned(a) | to_unsigned(b)); }
inline constexpr int64_t bit_xor(int64_t a, int64_t b) { return to_signed(to_unsigned(a) ^ to_unsigned(b)); }

inline constexpr int64_t sdiv(int64_t a, int64_t b) {
  if (b == 0) return a >= 0 ? -1 : 1;
  if (a == min64 && b == -1) return min64;  // wraps, matching bvsdiv
  return a / b;                             // C++ division truncates, as bvsdiv does
}

inline constexpr int64_t shl(int64_t a, uint64_t amount) {
  return amount >= 64 ? 0 : to_signed(to_unsigned(a) << amount);
}

inline constexpr int64_t lshr(int64_t a, uint64_t amount) {
  return amount >= 64 ? 0 : to_signed(to_unsigned(a) >> amount);
}

inline constexpr int64_t ashr(int64_t a, uint64_t amount) {
  if (amount >= 64) return a < 0 ? -1 : 0;
  if (amount == 0) return a;
  uint64_t u = to_unsigned(a) >> amount;
  if (a < 0) u |= ~uint64_t{0} << (64 - amount);
  return to_signed(u);
}

inline constexpr bool slt(int64_t a, int64_t b) { return a < b; }
inline constexpr bool sgt(int64_t a, int64_t b) { return a > b; }
inline constexpr bool ult(int64_t a, int64_t b) { return to_unsigned(a) < to_unsigned(b); }

// Signed-overflow predicates for the sticky Overflow flag.
inline constexpr bool add_overflows(int64_t a, int64_t b, int64_t result) {
  return (a >= 0) == (b >= 0) && (result >= 0) != (a >= 0);
}

inline constexpr bool sub_overflows(int64_t a, int64_t b, int64_t result) {
  return (a >= 0) != (b >= 0) && (result >= 0) != (a >= 0);
}

// Low-64 multiply wraps iff the quotient check fails; the INT64_MIN * -1 case
// needs special handling because sdiv itself wraps there.
inline constexpr bool mul_overflows(int64_t a, int64_t b) {
  if (a == 0) return false;
  if (a == -1 && b == min64) return true;
  return sdiv(mul(a, b), a) != b;
}

}  // namespace redfin::scalar
