#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "eeq/errors.hpp"

namespace eeq {

using Nat = std::uint64_t;

inline Nat checked_add(Nat a, Nat b) {
  Nat r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("addition overflow");
  return r;
}

inline Nat checked_mul(Nat a, Nat b) {
  Nat r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("multiplication overflow");
  return r;
}

namespace detail {

// w*(w+1)/2 without an intermediate overflow: one factor is even.
inline Nat triangle(Nat w) {
  if (w % 2 == 0) return checked_mul(w / 2, checked_add(w, 1));
  return checked_mul((w + 1) / 2, w);
}

inline unsigned __int128 triangle_wide(Nat w) {
  unsigned __int128 v = w;
  return v * (v + 1) / 2;
}

}  // namespace detail

/// Diagonal pairing <x,y> = (x+y)(x+y+1)/2 + y. Bijective N^2 -> N.
inline Nat cantor_pair(Nat x, Nat y) {
  return checked_add(detail::triangle(checked_add(x, y)), y);
}

/// Inverse of cantor_pair. Total; components never exceed the input.
inline std::pair<Nat, Nat> cantor_proj(Nat z) {
  // Seed the diagonal index from a float approximation, then correct.
  long double a =
      (std::sqrt(8.0L * static_cast<long double>(z) + 1.0L) - 1.0L) / 2.0L;
  Nat w = a < 1.0L ? 0 : static_cast<Nat>(a);
  while (detail::triangle_wide(w + 1) <= z) ++w;
  while (detail::triangle_wide(w) > z) --w;
  Nat y = z - static_cast<Nat>(detail::triangle_wide(w));
  return {w - y, y};
}

inline Nat cantor_proj0(Nat z) { return cantor_proj(z).first; }
inline Nat cantor_proj1(Nat z) { return cantor_proj(z).second; }

}  // namespace eeq
