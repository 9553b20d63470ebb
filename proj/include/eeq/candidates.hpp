#pragma once

#include <random>
#include <set>
#include <vector>

#include "eeq/category.hpp"

namespace eeq {

// Seeded generation of candidate terms and morphisms. Everything here is
// deterministic in the seed, so parallel or repeated runs reproduce.

/// A random term with at most `budget` nodes. Constants stay below
/// `const_range` so candidate images remain comparable at desk scale.
inline FunPtr random_term(std::mt19937_64& rng, Nat budget,
                          Nat const_range = 10) {
  auto pick = [&](Nat m) { return static_cast<Nat>(rng() % m); };
  if (budget < 3) {
    switch (pick(9)) {
      case 0: return fn::id();
      case 1: return fn::succ();
      case 2: return fn::times_two();
      case 3: return fn::times_two_plus_one();
      case 4: return fn::half();
      case 5: return fn::proj0();
      case 6: return fn::proj1();
      case 7: return fn::mod(1 + pick(6));
      default: return fn::constant(pick(const_range));
    }
  }
  switch (pick(10)) {
    case 0: {
      Nat left = 1 + pick(budget - 2);
      return fn::compose(random_term(rng, left, const_range),
                         random_term(rng, budget - 1 - left, const_range));
    }
    case 1: {
      Nat left = 1 + pick(budget - 2);
      return fn::pair(random_term(rng, left, const_range),
                      random_term(rng, budget - 1 - left, const_range));
    }
    case 2: {
      Nat left = 1 + pick(budget - 2);
      return fn::add(random_term(rng, left, const_range),
                     random_term(rng, budget - 1 - left, const_range));
    }
    case 3: {
      Nat left = 1 + pick(budget - 2);
      return fn::mul(random_term(rng, left, const_range),
                     random_term(rng, budget - 1 - left, const_range));
    }
    case 4: {
      if (budget < 5) return random_term(rng, 2, const_range);
      return fn::if_less(fn::mod(2), fn::constant(1),
                         random_term(rng, (budget - 3) / 2, const_range),
                         random_term(rng, (budget - 3) / 2, const_range));
    }
    case 5: {
      std::map<Nat, Nat> overrides;
      Nat entries = pick(4);
      for (Nat i = 0; i < entries; ++i)
        overrides[pick(2 * const_range)] = pick(const_range);
      return fn::table(std::move(overrides),
                       random_term(rng, budget - 1, const_range));
    }
    default:
      return random_term(rng, 2, const_range);
  }
}

/// Targeted variants of a function that induce the same class map into the
/// given approximant: syntactic wrappers, plus finite patches whose new value
/// stays inside the class of the old one.
inline std::vector<FunPtr> class_preserving_mutants(const FunPtr& fun,
                                                    const Approximant& target,
                                                    std::mt19937_64& rng,
                                                    std::size_t patch_count) {
  std::vector<FunPtr> out;
  out.push_back(fn::table({}, fun));
  out.push_back(fn::compose(fn::id(), fun));
  out.push_back(fn::compose(fun, fn::id()));
  out.push_back(fn::add(fun, fn::constant(0)));

  Nat n = target.bound();
  std::vector<Nat> img = images(fun, n);
  std::size_t added = 0;
  for (std::size_t attempt = 0; attempt < 8 * patch_count && added < patch_count;
       ++attempt) {
    Nat x0 = static_cast<Nat>(rng() % n);
    Nat u = img[x0];
    if (u >= n) continue;
    const std::vector<Nat>& members = target.class_members(u);
    if (members.size() < 2) continue;
    Nat y = members[static_cast<std::size_t>(rng() % members.size())];
    if (y == u) y = members[0] == u ? members[1] : members[0];
    out.push_back(fn::table({{x0, y}}, fun));
    ++added;
  }
  return out;
}

/// A pool of small-image function templates, useful for morphisms whose
/// images must remain inside a desk-scale bound.
inline FunPtr random_small_image_fun(std::mt19937_64& rng) {
  auto pick = [&](Nat m) { return static_cast<Nat>(rng() % m); };
  switch (pick(6)) {
    case 0: return fn::constant(pick(8));
    case 1: return fn::mod(2 + pick(5));
    case 2: {
      std::map<Nat, Nat> overrides;
      Nat entries = 1 + pick(5);
      for (Nat i = 0; i < entries; ++i) overrides[i] = pick(8);
      return fn::table(std::move(overrides), fn::mod(2 + pick(5)));
    }
    case 3:
      return fn::if_less(fn::mod(2), fn::constant(1), fn::constant(pick(8)),
                         fn::constant(pick(8)));
    case 4: return fn::compose(fn::mod(2 + pick(5)), fn::half());
    default: return fn::compose(fn::mod(2 + pick(5)), fn::times_two());
  }
}

/// Draw small-image functions until one is preserving from src to tgt at
/// scope; falls back to the constant map, which always preserves.
inline FunPtr random_preserving_fun(std::mt19937_64& rng, const RelPtr& src,
                                    const RelPtr& tgt, Nat s, Nat n,
                                    EvalContext& ctx, int attempts = 40) {
  for (int i = 0; i < attempts; ++i) {
    FunPtr f = random_small_image_fun(rng);
    if (check_preserving(f, src, tgt, s, n, ctx).ok()) return f;
  }
  return fn::constant(0);
}

}  // namespace eeq
