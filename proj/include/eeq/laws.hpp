#pragma once

#include <string>
#include <vector>

#include "eeq/candidates.hpp"

namespace eeq {

// Seeded property suites for the universal-property laws. Shared between the
// CLI verify subcommands and the integration tests.

struct LawConfig {
  Nat s = 32;
  Nat n = 256;
  std::uint64_t seed = 0;
  std::size_t instances = 100;
  std::size_t candidates = 50;  // per instance, for uniqueness families
  Nat cap = 7;                  // size cap for random candidate terms
};

struct LawReport {
  std::size_t instances = 0;
  std::size_t law_checks = 0;
  std::size_t law_failures = 0;
  std::size_t uniqueness_candidates = 0;
  std::size_t uniqueness_nonvacuous = 0;
  std::size_t uniqueness_failures = 0;
  std::size_t skipped_out_of_scope = 0;
  std::vector<std::string> failure_notes;

  bool ok() const { return law_failures == 0 && uniqueness_failures == 0; }

  std::vector<std::string> lines(const std::string& prefix) const {
    std::vector<std::string> out;
    out.push_back(prefix + ".instances=" + std::to_string(instances));
    out.push_back(prefix + ".law_checks=" + std::to_string(law_checks));
    out.push_back(prefix + ".law_failures=" + std::to_string(law_failures));
    out.push_back(prefix + ".uniqueness_candidates=" +
                  std::to_string(uniqueness_candidates));
    out.push_back(prefix + ".uniqueness_nonvacuous=" +
                  std::to_string(uniqueness_nonvacuous));
    out.push_back(prefix + ".uniqueness_failures=" +
                  std::to_string(uniqueness_failures));
    out.push_back(prefix + ".skipped_out_of_scope=" +
                  std::to_string(skipped_out_of_scope));
    return out;
  }
};

/// One of: equality, two classes, three classes, or a small generated ceer.
inline RelPtr random_small_object(std::mt19937_64& rng) {
  switch (rng() % 4) {
    case 0: return rel::id_all();
    case 1: return rel::id_n(2);
    case 2: return rel::id_n(3);
    default: {
      std::vector<PairSource::StampedPair> pairs;
      Nat count = 6 + rng() % 7;
      for (Nat i = 0; i < count; ++i) {
        Nat a = rng() % 24;
        Nat b = rng() % 24;
        pairs.push_back({a, b, 0});
      }
      for (auto& p : pairs) p.stage = rng() % 9;
      std::sort(pairs.begin(), pairs.end(),
                [](const auto& l, const auto& r) { return l.stage < r.stage; });
      return rel::from_pairs(PairSource{PairSource::ExplicitList{pairs}});
    }
  }
}

namespace detail {

inline void note_failure(LawReport& rep, const std::string& what) {
  ++rep.law_failures;
  if (rep.failure_notes.size() < 8) rep.failure_notes.push_back(what);
}

inline void check_law(LawReport& rep, bool held, const std::string& what) {
  ++rep.law_checks;
  if (!held) note_failure(rep, what);
}

/// Runs one uniqueness family: every candidate that is preserving and makes
/// the given triangles commute must equal the mediator as a morphism.
template <typename CommutesFn>
inline void uniqueness_family(LawReport& rep, const Morphism& mediator,
                              const std::vector<FunPtr>& candidates,
                              CommutesFn&& commutes, Nat s, Nat n,
                              EvalContext& ctx) {
  for (const FunPtr& cand : candidates) {
    ++rep.uniqueness_candidates;
    Morphism beta{mediator.source, mediator.target, cand, std::nullopt};
    try {
      if (!check_preserving(cand, beta.source, beta.target, s, n, ctx).ok())
        continue;
      if (!commutes(beta)) continue;
      ++rep.uniqueness_nonvacuous;
      if (!morphism_eq(beta, mediator, s, n, ctx)) {
        ++rep.uniqueness_failures;
        if (rep.failure_notes.size() < 8)
          rep.failure_notes.push_back("uniqueness violated by " + print(cand));
      }
    } catch (const ScopeError&) {
      ++rep.skipped_out_of_scope;
    } catch (const std::invalid_argument&) {
      // candidate composite failed a preservation precondition; vacuous
    } catch (const OverflowError&) {
      ++rep.skipped_out_of_scope;
    }
  }
}

}  // namespace detail

/// Triangle laws and mediator uniqueness for binary products.
inline LawReport product_laws(const LawConfig& cfg) {
  LawReport rep;
  EvalContext ctx;
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = 0; i < cfg.instances; ++i) {
    RelPtr t = random_small_object(rng);
    RelPtr r = random_small_object(rng);
    RelPtr s_obj = random_small_object(rng);
    auto pr = product(r, s_obj);
    Morphism rho_left{t, r, random_preserving_fun(rng, t, r, cfg.s, cfg.n, ctx),
                      std::nullopt};
    Morphism rho_right{
        t, s_obj, random_preserving_fun(rng, t, s_obj, cfg.s, cfg.n, ctx),
        std::nullopt};
    Morphism mediator = pair_mediator(rho_left, rho_right);

    detail::check_law(
        rep,
        morphism_eq(compose_unchecked(pr.proj_left, mediator), rho_left, cfg.s,
                    cfg.n, ctx),
        "product: left projection triangle");
    detail::check_law(
        rep,
        morphism_eq(compose_unchecked(pr.proj_right, mediator), rho_right,
                    cfg.s, cfg.n, ctx),
        "product: right projection triangle");

    const Approximant& pa = ctx.cache.get(mediator.target, cfg.s, cfg.n);
    std::vector<FunPtr> cands =
        class_preserving_mutants(mediator.fun, pa, rng, 6);
    while (cands.size() < cfg.candidates)
      cands.push_back(random_term(rng, cfg.cap));
    detail::uniqueness_family(
        rep, mediator, cands,
        [&](const Morphism& beta) {
          return morphism_eq(compose_unchecked(pr.proj_left, beta), rho_left,
                             cfg.s, cfg.n, ctx) &&
                 morphism_eq(compose_unchecked(pr.proj_right, beta), rho_right,
                             cfg.s, cfg.n, ctx);
        },
        cfg.s, cfg.n, ctx);
    ++rep.instances;
  }
  return rep;
}

/// Triangle laws and mediator uniqueness for binary coproducts.
inline LawReport coproduct_laws(const LawConfig& cfg) {
  LawReport rep;
  EvalContext ctx;
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = 0; i < cfg.instances; ++i) {
    RelPtr r = random_small_object(rng);
    RelPtr s_obj = random_small_object(rng);
    RelPtr t = random_small_object(rng);
    auto cp = coproduct(r, s_obj);
    Morphism rho_left{r, t, random_preserving_fun(rng, r, t, cfg.s, cfg.n, ctx),
                      std::nullopt};
    Morphism rho_right{
        s_obj, t, random_preserving_fun(rng, s_obj, t, cfg.s, cfg.n, ctx),
        std::nullopt};
    Morphism mediator = copair_mediator(rho_left, rho_right);

    detail::check_law(
        rep,
        morphism_eq(compose_unchecked(mediator, cp.inj_left), rho_left, cfg.s,
                    cfg.n, ctx),
        "coproduct: left injection triangle");
    detail::check_law(
        rep,
        morphism_eq(compose_unchecked(mediator, cp.inj_right), rho_right,
                    cfg.s, cfg.n, ctx),
        "coproduct: right injection triangle");

    const Approximant& ta = ctx.cache.get(mediator.target, cfg.s, cfg.n);
    std::vector<FunPtr> cands =
        class_preserving_mutants(mediator.fun, ta, rng, 6);
    while (cands.size() < cfg.candidates)
      cands.push_back(random_term(rng, cfg.cap));
    detail::uniqueness_family(
        rep, mediator, cands,
        [&](const Morphism& beta) {
          return morphism_eq(compose_unchecked(beta, cp.inj_left), rho_left,
                             cfg.s, cfg.n, ctx) &&
                 morphism_eq(compose_unchecked(beta, cp.inj_right), rho_right,
                             cfg.s, cfg.n, ctx);
        },
        cfg.s, cfg.n, ctx);
    ++rep.instances;
  }
  return rep;
}

/// gamma coequalizes the pair, the coequalizer object matches the direct
/// closure of the base pairs plus the generated pairs, and the base stays
/// contained in the quotient.
inline LawReport coequalizer_laws(const LawConfig& cfg) {
  LawReport rep;
  EvalContext ctx;
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = 0; i < cfg.instances; ++i) {
    RelPtr x = random_small_object(rng);
    RelPtr y = random_small_object(rng);
    Morphism alpha{x, y, random_preserving_fun(rng, x, y, cfg.s, cfg.n, ctx),
                   std::nullopt};
    Morphism beta{x, y, random_preserving_fun(rng, x, y, cfg.s, cfg.n, ctx),
                  std::nullopt};
    auto ce = coequalizer(alpha, beta, cfg.s, cfg.n, ctx);

    detail::check_law(
        rep,
        morphism_eq(compose_unchecked(ce.quotient, alpha),
                    compose_unchecked(ce.quotient, beta), cfg.s, cfg.n, ctx),
        "coequalizer: quotient does not coequalize");

    const Approximant& ya = ctx.cache.get(y, cfg.s, cfg.n);
    const Approximant& za = ctx.cache.get(ce.object, cfg.s, cfg.n);

    // Independent route: close the materialized base pairs plus the
    // generated pairs directly.
    std::vector<std::pair<Nat, Nat>> generators;
    for (const auto& cls : ya.classes())
      for (std::size_t k = 1; k < cls.size(); ++k)
        generators.emplace_back(cls[k - 1], cls[k]);
    for (Nat v = 0; v < cfg.s; ++v) {
      Nat a = eval(alpha.fun, v);
      Nat b = eval(beta.fun, v);
      if (a < cfg.n && b < cfg.n) generators.emplace_back(a, b);
    }
    Approximant oracle = equivalence_closure(generators, cfg.n);
    detail::check_law(rep, za.same_partition(oracle),
                      "coequalizer: closure oracle mismatch");

    bool contained = true;
    for (Nat a = 0; a < cfg.n && contained; ++a)
      for (Nat b = a + 1; b < cfg.n; ++b)
        if (ya.related(a, b) && !za.related(a, b)) {
          contained = false;
          break;
        }
    detail::check_law(rep, contained, "coequalizer: base not contained");
    ++rep.instances;
  }
  return rep;
}

/// Every morphism of a generated family into the one-class relation equals
/// the canonical one.
inline LawReport terminal_uniqueness(const RelPtr& source,
                                     const LawConfig& cfg) {
  LawReport rep;
  EvalContext ctx;
  std::mt19937_64 rng(cfg.seed);
  Morphism canonical = terminal_morphism(source);
  rep.instances = 1;
  std::size_t family = cfg.candidates;
  for (std::size_t i = 0; i < family; ++i) {
    FunPtr f = random_small_image_fun(rng);
    Morphism m{source, canonical.target, f, std::nullopt};
    detail::check_law(rep, morphism_eq(canonical, m, cfg.s, cfg.n, ctx),
                      "terminal: non-unique morphism " + print(f));
  }
  return rep;
}

/// The two constant morphisms into the two-class relation stay distinct.
inline bool initial_refutation_distinct(const RelPtr& source,
                                        const LawConfig& cfg) {
  EvalContext ctx;
  auto [a, b] = initial_refutation(source);
  return !morphism_eq(a, b, cfg.s, cfg.n, ctx);
}

/// Seeded non-injective morphisms run through the separation mechanism:
/// composites through gamma agree, originals differ.
inline LawReport mono_mechanism_suite(const LawConfig& cfg) {
  LawReport rep;
  EvalContext ctx;
  std::mt19937_64 rng(cfg.seed);
  std::size_t produced = 0;
  while (produced < cfg.instances) {
    Morphism gamma;
    switch (rng() % 4) {
      case 0:
        gamma = Morphism{rel::id_n(2 * (2 + rng() % 4)), rel::id_n(2 + rng() % 4),
                         fn::id(), std::nullopt};
        break;
      case 1:
        gamma = Morphism{rel::id_all(), rel::id_all(),
                         fn::constant(rng() % 8), std::nullopt};
        break;
      case 2:
        gamma = Morphism{rel::id_all(), rel::id_all(), fn::mod(2 + rng() % 6),
                         std::nullopt};
        break;
      default:
        gamma = Morphism{rel::id_all(), rel::id_all(), fn::half(), std::nullopt};
        break;
    }
    // Templates of shape IdN(2k) -> IdN(k') may fail to preserve; skip those.
    if (!check_preserving(gamma.fun, gamma.source, gamma.target, cfg.s, cfg.n,
                          ctx)
             .ok())
      continue;
    auto pair = mono_separation_pair(gamma, cfg.s, cfg.n, ctx);
    if (!pair) continue;  // injective instance; not part of this suite
    ++produced;
    ++rep.instances;
    const auto& [a1, a2] = *pair;
    detail::check_law(
        rep,
        morphism_eq(compose_unchecked(gamma, a1), compose_unchecked(gamma, a2),
                    cfg.s, cfg.n, ctx),
        "separation: composites differ");
    detail::check_law(rep, !morphism_eq(a1, a2, cfg.s, cfg.n, ctx),
                      "separation: originals already equal");
  }
  return rep;
}

}  // namespace eeq
