#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>
#include <vector>

#include "eeq/relation.hpp"

namespace eeq {

struct Scope {
  Nat s = 0;
  Nat n = 1;
  friend bool operator==(const Scope&, const Scope&) = default;
};

/// Outcome of a scope-indexed check. No verdict ever claims a global
/// property: ok means ok at the recorded scope, unknown means the check
/// needed points past the bound and reports the minimal bound that would
/// decide it.
struct Verdict {
  enum class Status { Ok, Counterexample, Unknown };

  Status status = Status::Ok;
  Scope scope;
  std::optional<std::pair<Nat, Nat>> witness;  // violating pair
  std::vector<Nat> missed_classes;             // uncovered class reps
  Nat need_n = 0;

  bool ok() const { return status == Status::Ok; }

  std::string to_text() const {
    std::ostringstream os;
    switch (status) {
      case Status::Ok:
        os << "ok s=" << scope.s << " n=" << scope.n;
        break;
      case Status::Counterexample:
        if (witness) {
          os << "cex x=" << witness->first << " y=" << witness->second;
        } else {
          os << "cex missed=";
          for (std::size_t i = 0; i < missed_classes.size(); ++i)
            os << (i ? "," : "") << missed_classes[i];
        }
        break;
      case Status::Unknown:
        os << "unknown need_n=" << need_n;
        break;
    }
    return os.str();
  }
};

/// A computable function asserted to induce a class map between two
/// relations. Composite operations use a morphism only after its
/// preservation has been checked at their scope.
struct Morphism {
  RelPtr source;
  RelPtr target;
  FunPtr fun;
  std::optional<Scope> verified_scope;
};

/// Memo for approximants keyed by spec identity. Callers that reuse the
/// same RelPtr across checks pay for each (stage, bound) once.
class ApproxCache {
public:
  const Approximant& get(const RelPtr& spec, Nat s, Nat n) {
    Key key{spec.get(), s, n};
    auto it = memo_.find(key);
    if (it == memo_.end()) {
      it = memo_.emplace(key, approximant(spec, s, n)).first;
      keep_alive_.push_back(spec);
    }
    return it->second;
  }

private:
  using Key = std::tuple<const RelationSpec*, Nat, Nat>;
  std::map<Key, Approximant> memo_;
  std::vector<RelPtr> keep_alive_;
};

struct EvalContext {
  ApproxCache cache;
};

inline std::vector<Nat> images(const FunPtr& f, Nat n) {
  std::vector<Nat> out(static_cast<std::size_t>(n));
  for (Nat x = 0; x < n; ++x) out[x] = eval(f, x);
  return out;
}

namespace detail {

// Bounded-core variants: the source relation is approximated at n_src and the
// target at n_tgt. The public single-bound operations use n_src == n_tgt;
// stage constructions use a narrower source bound when the map of interest is
// only meaningful on a prefix of the universe.

inline Verdict check_preserving_bounds(const FunPtr& f, const RelPtr& src,
                                       const RelPtr& tgt, Nat s, Nat n_src,
                                       Nat n_tgt, EvalContext& ctx) {
  const Approximant& ra = ctx.cache.get(src, s, n_src);
  const Approximant& sa = ctx.cache.get(tgt, s, n_tgt);
  std::vector<Nat> img = images(f, n_src);
  Verdict v;
  v.scope = {s, n_tgt};
  bool unknown = false;
  Nat need = 0;
  for (const auto& cls : ra.classes()) {
    for (std::size_t i = 0; i < cls.size(); ++i) {
      for (std::size_t j = i + 1; j < cls.size(); ++j) {
        Nat u = img[cls[i]];
        Nat w = img[cls[j]];
        if (u == w) continue;  // related by reflexivity
        if (u >= n_tgt || w >= n_tgt) {
          unknown = true;
          need = std::max(need, std::max(u, w) + 1);
          continue;
        }
        if (!sa.related(u, w)) {
          v.status = Verdict::Status::Counterexample;
          v.witness = {cls[i], cls[j]};
          return v;
        }
      }
    }
  }
  if (unknown) {
    v.status = Verdict::Status::Unknown;
    v.need_n = need;
  }
  return v;
}

inline Verdict injective_at_bounds(const Morphism& alpha, Nat s, Nat n_src,
                                   Nat n_tgt, EvalContext& ctx) {
  const Approximant& ra = ctx.cache.get(alpha.source, s, n_src);
  const Approximant& sa = ctx.cache.get(alpha.target, s, n_tgt);
  std::vector<Nat> img = images(alpha.fun, n_src);
  Verdict v;
  v.scope = {s, n_tgt};
  for (Nat x = 0; x < n_src; ++x) {
    for (Nat y = x + 1; y < n_src; ++y) {
      Nat u = img[x];
      Nat w = img[y];
      bool images_related;
      if (u == w) {
        images_related = true;
      } else if (u >= n_tgt || w >= n_tgt) {
        continue;  // image pair outside scope constrains nothing here
      } else {
        images_related = sa.related(u, w);
      }
      if (images_related && !ra.related(x, y)) {
        v.status = Verdict::Status::Counterexample;
        v.witness = {x, y};
        return v;
      }
    }
  }
  return v;
}

inline Verdict surjective_at_bounds(const Morphism& alpha, Nat s, Nat n_src,
                                    Nat n_tgt, EvalContext& ctx) {
  const Approximant& sa = ctx.cache.get(alpha.target, s, n_tgt);
  std::vector<Nat> img = images(alpha.fun, n_src);
  std::set<Nat> covered;
  for (Nat x = 0; x < n_src; ++x)
    if (img[x] < n_tgt) covered.insert(sa.class_rep(img[x]));
  Verdict v;
  v.scope = {s, n_tgt};
  for (Nat repr : sa.canonical_reps())
    if (!covered.count(repr)) v.missed_classes.push_back(repr);
  if (!v.missed_classes.empty()) v.status = Verdict::Status::Counterexample;
  return v;
}

inline Verdict reduction_check_bounds(const FunPtr& f, const RelPtr& src,
                                      const RelPtr& tgt, Nat s, Nat n_src,
                                      Nat n_tgt, EvalContext& ctx) {
  Verdict forward = check_preserving_bounds(f, src, tgt, s, n_src, n_tgt, ctx);
  if (forward.status == Verdict::Status::Counterexample) return forward;
  Morphism m{src, tgt, f, std::nullopt};
  Verdict reverse = injective_at_bounds(m, s, n_src, n_tgt, ctx);
  if (reverse.status == Verdict::Status::Counterexample) return reverse;
  return forward;  // ok, or unknown from the forward direction
}

}  // namespace detail

/// Is f (src, tgt)-equivalence preserving on [0, n) at stage s? A related
/// pair whose distinct images escape the bound makes the verdict unknown and
/// reports the bound that would decide it.
inline Verdict check_preserving(const FunPtr& f, const RelPtr& src,
                                const RelPtr& tgt, Nat s, Nat n,
                                EvalContext& ctx) {
  return detail::check_preserving_bounds(f, src, tgt, s, n, n, ctx);
}

inline Verdict check_preserving(const FunPtr& f, const RelPtr& src,
                                const RelPtr& tgt, Nat s, Nat n) {
  EvalContext ctx;
  return check_preserving(f, src, tgt, s, n, ctx);
}

inline void ensure_preserving(const Morphism& m, Nat s, Nat n,
                              EvalContext& ctx) {
  if (m.verified_scope && m.verified_scope->s == s && m.verified_scope->n == n)
    return;
  Verdict v = check_preserving(m.fun, m.source, m.target, s, n, ctx);
  if (v.status == Verdict::Status::Counterexample)
    throw std::invalid_argument("morphism is not equivalence-preserving at scope: " +
                                v.to_text());
  if (v.status == Verdict::Status::Unknown)
    throw ScopeError("morphism preservation undecided at scope", v.need_n);
}

/// Build a morphism and record the scope at which preservation was checked.
inline Morphism checked_morphism(const FunPtr& f, const RelPtr& src,
                                 const RelPtr& tgt, Nat s, Nat n,
                                 EvalContext& ctx) {
  Morphism m{src, tgt, f, std::nullopt};
  ensure_preserving(m, s, n, ctx);
  m.verified_scope = Scope{s, n};
  return m;
}

/// Do two morphisms induce the same class map at scope? Distinct images past
/// the bound are a scope fault.
inline bool morphism_eq(const Morphism& a, const Morphism& b, Nat s, Nat n,
                        EvalContext& ctx) {
  if (!spec_equal(a.source, b.source) || !spec_equal(a.target, b.target))
    throw std::invalid_argument("morphism_eq: source/target mismatch");
  ensure_preserving(a, s, n, ctx);
  ensure_preserving(b, s, n, ctx);
  const Approximant& sa = ctx.cache.get(a.target, s, n);
  std::vector<Nat> ia = images(a.fun, n);
  std::vector<Nat> ib = images(b.fun, n);
  for (Nat x = 0; x < n; ++x) {
    Nat u = ia[x];
    Nat w = ib[x];
    if (u == w) continue;
    if (u >= n || w >= n)
      throw ScopeError("morphism_eq: image beyond scope",
                       std::max(u, w) + 1);
    if (!sa.related(u, w)) return false;
  }
  return true;
}

inline bool morphism_eq(const Morphism& a, const Morphism& b, Nat s, Nat n) {
  EvalContext ctx;
  return morphism_eq(a, b, s, n, ctx);
}

/// Composite morphism g of f, with both parts checked preserving at scope.
inline Morphism compose(const Morphism& g, const Morphism& f, Nat s, Nat n,
                        EvalContext& ctx) {
  if (!spec_equal(f.target, g.source))
    throw std::invalid_argument("compose: target of f differs from source of g");
  ensure_preserving(f, s, n, ctx);
  ensure_preserving(g, s, n, ctx);
  return Morphism{f.source, g.target, fn::compose(g.fun, f.fun), std::nullopt};
}

/// Composite without the scope check, for chains whose outer composite is
/// verified instead (injection-style maps escape any fixed bound on half
/// their inputs, so checking them directly is always unknown-at-scope).
inline Morphism compose_unchecked(const Morphism& g, const Morphism& f) {
  if (!spec_equal(f.target, g.source))
    throw std::invalid_argument("compose: target of f differs from source of g");
  return Morphism{f.source, g.target, fn::compose(g.fun, f.fun), std::nullopt};
}

// ---------------------------------------------------------------------------
// Products / coproducts
// ---------------------------------------------------------------------------

struct ProductResult {
  RelPtr object;
  Morphism proj_left;
  Morphism proj_right;
};

inline ProductResult product(const RelPtr& left, const RelPtr& right) {
  RelPtr object = rel::product(left, right);
  return {object, Morphism{object, left, fn::proj0(), std::nullopt},
          Morphism{object, right, fn::proj1(), std::nullopt}};
}

/// Mediating morphism T -> left x right, x -> <f_left(x), f_right(x)>.
inline Morphism pair_mediator(const Morphism& rho_left,
                              const Morphism& rho_right) {
  if (!spec_equal(rho_left.source, rho_right.source))
    throw std::invalid_argument("pair_mediator: sources differ");
  return Morphism{rho_left.source, rel::product(rho_left.target, rho_right.target),
                  fn::pair(rho_left.fun, rho_right.fun), std::nullopt};
}

struct CoproductResult {
  RelPtr object;
  Morphism inj_left;
  Morphism inj_right;
};

inline CoproductResult coproduct(const RelPtr& left, const RelPtr& right) {
  RelPtr object = rel::coproduct(left, right);
  return {object, Morphism{left, object, fn::times_two(), std::nullopt},
          Morphism{right, object, fn::times_two_plus_one(), std::nullopt}};
}

/// Mediating morphism left + right -> T: even codes through f_left, odd codes
/// through f_right, realized as a parity case split.
inline Morphism copair_mediator(const Morphism& rho_left,
                                const Morphism& rho_right) {
  if (!spec_equal(rho_left.target, rho_right.target))
    throw std::invalid_argument("copair_mediator: targets differ");
  FunPtr fun = fn::if_less(fn::mod(2), fn::constant(1),
                           fn::compose(rho_left.fun, fn::half()),
                           fn::compose(rho_right.fun, fn::half()));
  return Morphism{rel::coproduct(rho_left.source, rho_right.source),
                  rho_left.target, fun, std::nullopt};
}

// ---------------------------------------------------------------------------
// Coequalizers and equalizer refutation
// ---------------------------------------------------------------------------

struct CoequalizerResult {
  RelPtr object;
  Morphism quotient;   // induced by the identity on codes
  Nat deferred_pairs;  // generated pairs skipped at this scope
};

inline CoequalizerResult coequalizer(const Morphism& alpha,
                                     const Morphism& beta, Nat s, Nat n,
                                     EvalContext& ctx) {
  if (!spec_equal(alpha.source, beta.source) ||
      !spec_equal(alpha.target, beta.target))
    throw std::invalid_argument("coequalizer: not a parallel pair");
  ensure_preserving(alpha, s, n, ctx);
  ensure_preserving(beta, s, n, ctx);
  RelPtr object = rel::coequalizer(alpha.target, alpha.fun, beta.fun);
  Morphism quotient{alpha.target, object, fn::id(), std::nullopt};
  const Approximant& za = ctx.cache.get(object, s, n);
  return {object, quotient, za.deferred_pairs()};
}

/// For gamma_prime : Y -> W with gamma_prime coequalizing the pair, the
/// factoring morphism Z -> W reuses the same function on codes.
inline Morphism coequalizer_factor(const Morphism& gamma_prime,
                                   const RelPtr& coeq_object) {
  return Morphism{coeq_object, gamma_prime.target, gamma_prime.fun,
                  std::nullopt};
}

struct EqualizerRefutation {
  Morphism first;   // constant 0 into the two-class relation
  Morphism second;  // constant 1
};

/// The parallel pair with no equalizer: constants 0 and 1 into the
/// two-class relation never agree at any point.
inline EqualizerRefutation equalizer_refutation() {
  RelPtr two = rel::id_n(2);
  return {Morphism{rel::id_all(), two, fn::constant(0), std::nullopt},
          Morphism{rel::id_all(), two, fn::constant(1), std::nullopt}};
}

/// True iff no x < n satisfies first(x) ~ second(x) at stage s.
inline bool equalizer_agreement_absent(const EqualizerRefutation& r, Nat s,
                                       Nat n, EvalContext& ctx) {
  const Approximant& sa = ctx.cache.get(r.first.target, s, n);
  for (Nat x = 0; x < n; ++x) {
    Nat u = eval(r.first.fun, x);
    Nat w = eval(r.second.fun, x);
    if (u < n && w < n && sa.related(u, w)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Terminal / initial
// ---------------------------------------------------------------------------

inline Morphism terminal_morphism(const RelPtr& source) {
  return Morphism{source, rel::id_n(1), fn::constant(0), std::nullopt};
}

/// Two distinct morphisms into the two-class relation, witnessing that the
/// source cannot be initial.
inline std::pair<Morphism, Morphism> initial_refutation(const RelPtr& source) {
  RelPtr two = rel::id_n(2);
  return {Morphism{source, two, fn::constant(0), std::nullopt},
          Morphism{source, two, fn::constant(1), std::nullopt}};
}

// ---------------------------------------------------------------------------
// Injectivity / surjectivity / reduction
// ---------------------------------------------------------------------------

/// Ok iff distinct source classes stay distinct under the induced map at
/// scope. A counterexample carries elements of two collapsing classes.
inline Verdict injective_at(const Morphism& alpha, Nat s, Nat n,
                            EvalContext& ctx) {
  return detail::injective_at_bounds(alpha, s, n, n, ctx);
}

inline Verdict injective_at(const Morphism& alpha, Nat s, Nat n) {
  EvalContext ctx;
  return injective_at(alpha, s, n, ctx);
}

/// Ok iff every target class within the bound is hit by some image of a
/// source point within the bound. Missed class reps are the witnesses.
inline Verdict surjective_at(const Morphism& alpha, Nat s, Nat n,
                             EvalContext& ctx) {
  return detail::surjective_at_bounds(alpha, s, n, n, ctx);
}

inline Verdict surjective_at(const Morphism& alpha, Nat s, Nat n) {
  EvalContext ctx;
  return surjective_at(alpha, s, n, ctx);
}

/// When gamma collapses two classes [a1], [a2] at scope, the constant maps
/// to a1 and a2 from a chosen source give distinct morphisms with equal
/// composites through gamma. Returns nothing when gamma is injective at
/// scope. The source relation defaults to equality.
inline std::optional<std::pair<Morphism, Morphism>> mono_separation_pair(
    const Morphism& gamma, Nat s, Nat n, EvalContext& ctx,
    RelPtr separating_source = nullptr) {
  Verdict v = injective_at(gamma, s, n, ctx);
  if (v.status != Verdict::Status::Counterexample) return std::nullopt;
  RelPtr src = separating_source ? separating_source : rel::id_all();
  auto [a1, a2] = *v.witness;
  return std::make_pair(
      Morphism{src, gamma.source, fn::constant(a1), std::nullopt},
      Morphism{src, gamma.source, fn::constant(a2), std::nullopt});
}

/// Both directions of x R y <=> f(x) S f(y) on [0, n) at stage s. Ok
/// certifies a mono witness at scope.
inline Verdict reduction_check(const FunPtr& f, const RelPtr& src,
                               const RelPtr& tgt, Nat s, Nat n,
                               EvalContext& ctx) {
  return detail::reduction_check_bounds(f, src, tgt, s, n, n, ctx);
}

inline Verdict reduction_check(const FunPtr& f, const RelPtr& src,
                               const RelPtr& tgt, Nat s, Nat n) {
  EvalContext ctx;
  return reduction_check(f, src, tgt, s, n, ctx);
}

// ---------------------------------------------------------------------------
// Kernels of numberings
// ---------------------------------------------------------------------------

/// The relation x ~ y iff labels(x) = labels(y), materialized as a generated
/// ceer whose pairs link consecutive members of each label fiber on [0, n).
inline RelPtr kernel_of_numbering(const FunPtr& labels, Nat s, Nat n) {
  (void)s;  // the kernel does not vary with the stage
  std::map<Nat, Nat> last_with_label;
  std::vector<PairSource::StampedPair> links;
  for (Nat x = 0; x < n; ++x) {
    Nat label = eval(labels, x);
    auto [it, fresh] = last_with_label.try_emplace(label, x);
    if (!fresh) {
      links.push_back({it->second, x, 0});
      it->second = x;
    }
  }
  return rel::from_pairs(PairSource{PairSource::ExplicitList{std::move(links)}});
}

}  // namespace eeq
