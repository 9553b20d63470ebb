#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "eeq/funlang.hpp"
#include "eeq/union_find.hpp"

namespace eeq {

// ---------------------------------------------------------------------------
// Stage traces
// ---------------------------------------------------------------------------

/// One event of a stage construction. Merge grows a ceer, Isolate shrinks a
/// coceer by cutting an element out of its class, EnumU records an element
/// entering the enumerated set U (bookkeeping only, no partition effect).
struct StageEvent {
  enum class Kind { Merge, Isolate, EnumU };
  Kind kind = Kind::Merge;
  Nat x = 0;
  Nat y = 0;  // Merge only
  Nat stage = 0;

  friend bool operator==(const StageEvent&, const StageEvent&) = default;
};

struct StageTrace {
  std::vector<StageEvent> events;

  // Stages must be non-decreasing and no element may be isolated twice.
  void validate() const {
    Nat last = 0;
    std::set<Nat> isolated;
    for (const auto& ev : events) {
      if (ev.stage < last)
        throw std::invalid_argument("trace stages must be non-decreasing");
      last = ev.stage;
      if (ev.kind == StageEvent::Kind::Isolate && !isolated.insert(ev.x).second)
        throw std::invalid_argument("element isolated twice in trace");
    }
  }

  friend bool operator==(const StageTrace&, const StageTrace&) = default;
};

// ---------------------------------------------------------------------------
// Pair sources
// ---------------------------------------------------------------------------

/// Where a generated ceer gets its pairs from.
struct PairSource {
  struct StampedPair {
    Nat a = 0, b = 0;
    Nat stage = 0;  // pair becomes visible at stages >= stage
    friend bool operator==(const StampedPair&, const StampedPair&) = default;
  };

  struct ExplicitList {
    std::vector<StampedPair> pairs;  // stamps non-decreasing
    friend bool operator==(const ExplicitList&, const ExplicitList&) = default;
  };

  /// Pair #x appears at stage x as (proj0(fun(x)), proj1(fun(x))).
  struct FunRange {
    FunPtr fun;
  };

  struct TraceBacked {
    StageTrace trace;  // Merge and EnumU events only
    friend bool operator==(const TraceBacked&, const TraceBacked&) = default;
  };

  std::variant<ExplicitList, FunRange, TraceBacked> source;
};

// ---------------------------------------------------------------------------
// Relation specs
// ---------------------------------------------------------------------------

struct RelationSpec;
using RelPtr = std::shared_ptr<const RelationSpec>;

/// Syntactic description of an equivalence relation on N, evaluated only
/// through finite-stage approximants. Ceer-kind nodes grow as the stage
/// increases; Coceer nodes shrink.
struct RelationSpec {
  struct IdAll {};  // equality
  struct IdN {
    Nat classes;  // congruence mod classes, classes >= 1
  };
  struct FromPairs {
    PairSource source;
  };
  /// Initial partition given by finitely many listed classes plus one
  /// background class holding every unlisted number; Isolate events then
  /// split singletons off over the stages.
  struct Coceer {
    std::vector<std::vector<Nat>> seed_classes;
    StageTrace trace;  // Isolate / EnumU events only
  };
  struct Product {
    RelPtr left, right;
  };
  struct Coproduct {
    RelPtr left, right;  // left on even codes, right on odd codes
  };
  /// Closure of base plus the pairs (f1(x), f2(x)) for x below the stage
  /// budget.
  struct Coequalizer {
    RelPtr base;
    FunPtr f1, f2;
  };
  struct ClosureOf {
    RelPtr base;
    std::vector<std::pair<Nat, Nat>> pairs;
  };

  using Node = std::variant<IdAll, IdN, FromPairs, Coceer, Product, Coproduct,
                            Coequalizer, ClosureOf>;
  Node node;
};

namespace rel {

inline RelPtr make(RelationSpec::Node n) {
  return std::make_shared<const RelationSpec>(RelationSpec{std::move(n)});
}

inline RelPtr id_all() { return make(RelationSpec::IdAll{}); }

inline RelPtr id_n(Nat classes) {
  if (classes == 0) throw std::invalid_argument("idn needs classes >= 1");
  return make(RelationSpec::IdN{classes});
}

inline RelPtr from_pairs(PairSource source) {
  if (const auto* list = std::get_if<PairSource::ExplicitList>(&source.source)) {
    Nat last = 0;
    for (const auto& p : list->pairs) {
      if (p.stage < last)
        throw std::invalid_argument("pair stamps must be non-decreasing");
      last = p.stage;
    }
  }
  if (const auto* tb = std::get_if<PairSource::TraceBacked>(&source.source)) {
    tb->trace.validate();
    for (const auto& ev : tb->trace.events)
      if (ev.kind == StageEvent::Kind::Isolate)
        throw std::invalid_argument("isolate event in a ceer pair source");
  }
  return make(RelationSpec::FromPairs{std::move(source)});
}

inline RelPtr coceer(std::vector<std::vector<Nat>> seed_classes,
                     StageTrace trace) {
  std::set<Nat> seen;
  for (const auto& cls : seed_classes)
    for (Nat x : cls)
      if (!seen.insert(x).second)
        throw std::invalid_argument("overlapping coceer seed classes");
  trace.validate();
  for (const auto& ev : trace.events)
    if (ev.kind == StageEvent::Kind::Merge)
      throw std::invalid_argument("merge event in a coceer trace");
  return make(RelationSpec::Coceer{std::move(seed_classes), std::move(trace)});
}

inline RelPtr product(RelPtr left, RelPtr right) {
  return make(RelationSpec::Product{std::move(left), std::move(right)});
}

inline RelPtr coproduct(RelPtr left, RelPtr right) {
  return make(RelationSpec::Coproduct{std::move(left), std::move(right)});
}

inline RelPtr coequalizer(RelPtr base, FunPtr f1, FunPtr f2) {
  return make(
      RelationSpec::Coequalizer{std::move(base), std::move(f1), std::move(f2)});
}

inline RelPtr closure_of(RelPtr base, std::vector<std::pair<Nat, Nat>> pairs) {
  return make(RelationSpec::ClosureOf{std::move(base), std::move(pairs)});
}

}  // namespace rel

/// True when every node of the tree is a ceer-kind node, so that stage
/// approximations are inclusion-monotone in s.
inline bool is_ceer_kind(const RelationSpec& spec) {
  return std::visit(
      detail::Overload{
          [](const RelationSpec::IdAll&) { return true; },
          [](const RelationSpec::IdN&) { return true; },
          [](const RelationSpec::FromPairs&) { return true; },
          [](const RelationSpec::Coceer&) { return false; },
          [](const RelationSpec::Product& p) {
            return is_ceer_kind(*p.left) && is_ceer_kind(*p.right);
          },
          [](const RelationSpec::Coproduct& p) {
            return is_ceer_kind(*p.left) && is_ceer_kind(*p.right);
          },
          [](const RelationSpec::Coequalizer& c) {
            return is_ceer_kind(*c.base);
          },
          [](const RelationSpec::ClosureOf& c) {
            return is_ceer_kind(*c.base);
          }},
      spec.node);
}

/// Structural equality of relation specs.
inline bool spec_equal(const RelationSpec& a, const RelationSpec& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      detail::Overload{
          [&](const RelationSpec::IdAll&) { return true; },
          [&](const RelationSpec::IdN& x) {
            return x.classes == std::get<RelationSpec::IdN>(b.node).classes;
          },
          [&](const RelationSpec::FromPairs& x) {
            const auto& y = std::get<RelationSpec::FromPairs>(b.node);
            if (x.source.source.index() != y.source.source.index()) return false;
            if (const auto* xl =
                    std::get_if<PairSource::ExplicitList>(&x.source.source))
              return *xl == std::get<PairSource::ExplicitList>(y.source.source);
            if (const auto* xf =
                    std::get_if<PairSource::FunRange>(&x.source.source))
              return fun_equal(
                  xf->fun,
                  std::get<PairSource::FunRange>(y.source.source).fun);
            return std::get<PairSource::TraceBacked>(x.source.source) ==
                   std::get<PairSource::TraceBacked>(y.source.source);
          },
          [&](const RelationSpec::Coceer& x) {
            const auto& y = std::get<RelationSpec::Coceer>(b.node);
            return x.seed_classes == y.seed_classes && x.trace == y.trace;
          },
          [&](const RelationSpec::Product& x) {
            const auto& y = std::get<RelationSpec::Product>(b.node);
            return spec_equal(*x.left, *y.left) && spec_equal(*x.right, *y.right);
          },
          [&](const RelationSpec::Coproduct& x) {
            const auto& y = std::get<RelationSpec::Coproduct>(b.node);
            return spec_equal(*x.left, *y.left) && spec_equal(*x.right, *y.right);
          },
          [&](const RelationSpec::Coequalizer& x) {
            const auto& y = std::get<RelationSpec::Coequalizer>(b.node);
            return spec_equal(*x.base, *y.base) && fun_equal(x.f1, y.f1) &&
                   fun_equal(x.f2, y.f2);
          },
          [&](const RelationSpec::ClosureOf& x) {
            const auto& y = std::get<RelationSpec::ClosureOf>(b.node);
            return spec_equal(*x.base, *y.base) && x.pairs == y.pairs;
          }},
      a.node);
}

inline bool spec_equal(const RelPtr& a, const RelPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  return spec_equal(*a, *b);
}

// ---------------------------------------------------------------------------
// Approximants
// ---------------------------------------------------------------------------

/// The partition of [0, bound) induced by a relation's stage-s restriction.
/// Canonical representatives are always the least element of each class, so
/// equal partitions compare equal regardless of merge order. Immutable.
class Approximant {
public:
  Approximant(Nat bound, Nat stage, std::vector<Nat> class_of, Nat deferred,
              Nat needed_bound, std::vector<std::pair<Nat, Nat>> removed)
      : bound_(bound),
        stage_(stage),
        class_of_(std::move(class_of)),
        deferred_pairs_(deferred),
        needed_bound_(needed_bound),
        removed_pairs_(std::move(removed)) {
    std::map<Nat, std::vector<Nat>> grouped;
    for (Nat x = 0; x < bound_; ++x) grouped[class_of_[x]].push_back(x);
    for (auto& [repr, members] : grouped) {
      reps_.push_back(repr);
      classes_.push_back(std::move(members));
    }
  }

  Nat bound() const { return bound_; }
  Nat stage() const { return stage_; }

  bool related(Nat x, Nat y) const {
    check(x);
    check(y);
    return class_of_[x] == class_of_[y];
  }

  /// Least element of x's class.
  Nat class_rep(Nat x) const {
    check(x);
    return class_of_[x];
  }

  Nat classes_count() const { return static_cast<Nat>(classes_.size()); }

  /// Least elements of all classes, ascending.
  const std::vector<Nat>& canonical_reps() const { return reps_; }

  /// Classes ordered by representative; members ascending.
  const std::vector<std::vector<Nat>>& classes() const { return classes_; }

  const std::vector<Nat>& class_members(Nat x) const {
    check(x);
    auto it = std::lower_bound(reps_.begin(), reps_.end(), class_of_[x]);
    return classes_[static_cast<std::size_t>(it - reps_.begin())];
  }

  /// Generated pairs that were skipped because an endpoint fell outside the
  /// bound, and the minimal bound that would have admitted them all.
  Nat deferred_pairs() const { return deferred_pairs_; }
  Nat needed_bound() const { return needed_bound_; }

  /// Pairs cut by Isolate events, for coceer-rooted specs.
  const std::vector<std::pair<Nat, Nat>>& removed_pairs() const {
    return removed_pairs_;
  }

  bool same_partition(const Approximant& other) const {
    return bound_ == other.bound_ && class_of_ == other.class_of_;
  }

private:
  void check(Nat x) const {
    if (x >= bound_)
      throw std::out_of_range("element " + std::to_string(x) +
                              " outside bound " + std::to_string(bound_));
  }

  Nat bound_;
  Nat stage_;
  std::vector<Nat> class_of_;
  Nat deferred_pairs_;
  Nat needed_bound_;
  std::vector<std::pair<Nat, Nat>> removed_pairs_;
  std::vector<Nat> reps_;
  std::vector<std::vector<Nat>> classes_;
};

namespace detail {

struct ApproxBuild {
  Nat deferred = 0;
  Nat needed_bound = 0;
  std::vector<std::pair<Nat, Nat>> removed;
};

inline std::vector<Nat> normalize(UnionFind& uf, Nat n) {
  std::vector<Nat> rep_least(static_cast<std::size_t>(n), n);
  for (Nat x = 0; x < n; ++x) {
    Nat r = uf.find(x);
    if (rep_least[r] == n) rep_least[r] = x;
  }
  std::vector<Nat> out(static_cast<std::size_t>(n));
  for (Nat x = 0; x < n; ++x) out[x] = rep_least[uf.find(x)];
  return out;
}

inline void defer_pair(ApproxBuild& build, Nat a, Nat b) {
  ++build.deferred;
  build.needed_bound = std::max(build.needed_bound, std::max(a, b) + 1);
}

inline std::vector<Nat> approx_from_pairs(const RelationSpec::FromPairs& fp,
                                          Nat s, Nat n, ApproxBuild& build) {
  UnionFind uf(n);
  auto feed = [&](Nat a, Nat b, Nat stamp) {
    if (stamp > s) return;
    if (a < n && b < n)
      uf.unite(a, b);
    else
      defer_pair(build, a, b);
  };
  std::visit(Overload{[&](const PairSource::ExplicitList& list) {
                        for (const auto& p : list.pairs) feed(p.a, p.b, p.stage);
                      },
                      [&](const PairSource::FunRange& fr) {
                        for (Nat x = 0; x <= s; ++x) {
                          auto [a, b] = cantor_proj(eval(fr.fun, x));
                          feed(a, b, x);
                        }
                      },
                      [&](const PairSource::TraceBacked& tb) {
                        for (const auto& ev : tb.trace.events) {
                          if (ev.kind == StageEvent::Kind::Merge)
                            feed(ev.x, ev.y, ev.stage);
                        }
                      }},
             fp.source.source);
  return normalize(uf, n);
}

inline std::vector<Nat> approx_coceer(const RelationSpec::Coceer& c, Nat s,
                                      Nat n, ApproxBuild& build,
                                      bool collect_removed) {
  c.trace.validate();
  // Label 0 is the background class; listed classes get labels 1..k.
  std::vector<Nat> label(static_cast<std::size_t>(n), 0);
  Nat next_label = 1;
  for (const auto& cls : c.seed_classes) {
    for (Nat x : cls)
      if (x < n) label[x] = next_label;
    ++next_label;
  }
  for (const auto& ev : c.trace.events) {
    if (ev.kind != StageEvent::Kind::Isolate) continue;
    if (ev.stage > s || ev.x >= n) continue;
    Nat old = label[ev.x];
    label[ev.x] = next_label++;
    if (collect_removed) {
      for (Nat y = 0; y < n; ++y)
        if (y != ev.x && label[y] == old)
          build.removed.emplace_back(std::min(ev.x, y), std::max(ev.x, y));
    }
  }
  std::map<Nat, Nat> least_of;
  for (Nat x = 0; x < n; ++x) least_of.try_emplace(label[x], x);
  std::vector<Nat> out(static_cast<std::size_t>(n));
  for (Nat x = 0; x < n; ++x) out[x] = least_of[label[x]];
  return out;
}

inline std::vector<Nat> approx_node(const RelationSpec& spec, Nat s, Nat n,
                                    ApproxBuild& build, bool collect_removed) {
  return std::visit(
      Overload{
          [&](const RelationSpec::IdAll&) {
            std::vector<Nat> out(static_cast<std::size_t>(n));
            for (Nat x = 0; x < n; ++x) out[x] = x;
            return out;
          },
          [&](const RelationSpec::IdN& id) {
            std::vector<Nat> out(static_cast<std::size_t>(n));
            for (Nat x = 0; x < n; ++x) out[x] = x % id.classes;
            return out;
          },
          [&](const RelationSpec::FromPairs& fp) {
            return approx_from_pairs(fp, s, n, build);
          },
          [&](const RelationSpec::Coceer& c) {
            return approx_coceer(c, s, n, build, collect_removed);
          },
          [&](const RelationSpec::Product& p) {
            // Cantor components never exceed the code, so the child bound n
            // covers every projection of [0, n).
            auto left = approx_node(*p.left, s, n, build, false);
            auto right = approx_node(*p.right, s, n, build, false);
            std::map<std::pair<Nat, Nat>, Nat> least_of;
            std::vector<Nat> out(static_cast<std::size_t>(n));
            for (Nat z = 0; z < n; ++z) {
              auto [a, b] = cantor_proj(z);
              auto key = std::make_pair(left[a], right[b]);
              auto [it, fresh] = least_of.try_emplace(key, z);
              (void)fresh;
              out[z] = it->second;
            }
            return out;
          },
          [&](const RelationSpec::Coproduct& p) {
            Nat n_left = (n + 1) / 2;
            Nat n_right = n / 2;
            std::vector<Nat> out(static_cast<std::size_t>(n));
            auto left = approx_node(*p.left, s, n_left, build, false);
            for (Nat x = 0; x < n_left && 2 * x < n; ++x) out[2 * x] = 2 * left[x];
            if (n_right >= 1) {
              auto right = approx_node(*p.right, s, n_right, build, false);
              for (Nat x = 0; x < n_right && 2 * x + 1 < n; ++x)
                out[2 * x + 1] = 2 * right[x] + 1;
            }
            return out;
          },
          [&](const RelationSpec::Coequalizer& c) {
            auto base = approx_node(*c.base, s, n, build, false);
            UnionFind uf(n);
            for (Nat z = 0; z < n; ++z) uf.unite(z, base[z]);
            for (Nat x = 0; x < s; ++x) {
              Nat a = eval(c.f1, x);
              Nat b = eval(c.f2, x);
              if (a < n && b < n)
                uf.unite(a, b);
              else
                defer_pair(build, a, b);
            }
            return normalize(uf, n);
          },
          [&](const RelationSpec::ClosureOf& c) {
            auto base = approx_node(*c.base, s, n, build, false);
            UnionFind uf(n);
            for (Nat z = 0; z < n; ++z) uf.unite(z, base[z]);
            for (const auto& [a, b] : c.pairs) {
              if (a < n && b < n)
                uf.unite(a, b);
              else
                defer_pair(build, a, b);
            }
            return normalize(uf, n);
          }},
      spec.node);
}

}  // namespace detail

/// The stage-s partition of [0, n) induced by the spec. Deterministic;
/// composite nodes are computed from child approximants at the same stage.
inline Approximant approximant(const RelPtr& spec, Nat s, Nat n) {
  if (!spec) throw std::invalid_argument("null relation spec");
  if (n < 1) throw std::invalid_argument("approximant needs bound >= 1");
  detail::ApproxBuild build;
  bool root_coceer = std::holds_alternative<RelationSpec::Coceer>(spec->node);
  auto class_of = detail::approx_node(*spec, s, n, build, root_coceer);
  std::sort(build.removed.begin(), build.removed.end());
  build.removed.erase(std::unique(build.removed.begin(), build.removed.end()),
                      build.removed.end());
  return Approximant(n, s, std::move(class_of), build.deferred,
                     build.needed_bound, std::move(build.removed));
}

/// Least equivalence relation on [0, n) containing the pairs.
inline Approximant equivalence_closure(
    const std::vector<std::pair<Nat, Nat>>& pairs, Nat n) {
  if (n < 1) throw std::invalid_argument("equivalence_closure needs bound >= 1");
  UnionFind uf(n);
  for (const auto& [a, b] : pairs) {
    if (a >= n || b >= n)
      throw std::out_of_range("generator pair (" + std::to_string(a) + "," +
                              std::to_string(b) + ") outside bound " +
                              std::to_string(n));
    uf.unite(a, b);
  }
  auto class_of = detail::normalize(uf, n);
  return Approximant(n, 0, std::move(class_of), 0, 0, {});
}

inline bool related_at(const RelPtr& spec, Nat s, Nat n, Nat x, Nat y) {
  if (x >= n || y >= n)
    throw std::out_of_range("related_at: element outside bound");
  return approximant(spec, s, n).related(x, y);
}

inline Nat classes_count(const RelPtr& spec, Nat s, Nat n) {
  return approximant(spec, s, n).classes_count();
}

inline std::vector<Nat> canonical_reps(const RelPtr& spec, Nat s, Nat n) {
  return approximant(spec, s, n).canonical_reps();
}

/// True iff the [0, n) approximant does not change from stage s to s+1.
/// A positive answer does not certify stability at later stages.
inline bool stabilized(const RelPtr& spec, Nat s, Nat n) {
  return approximant(spec, s, n).same_partition(approximant(spec, s + 1, n));
}

}  // namespace eeq
