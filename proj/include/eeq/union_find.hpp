#pragma once

#include <numeric>
#include <utility>
#include <vector>

#include "eeq/pairing.hpp"

namespace eeq {

// Disjoint-set forest with path compression and union by size.
class UnionFind {
public:
  explicit UnionFind(Nat n)
      : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
    std::iota(parent_.begin(), parent_.end(), Nat{0});
  }

  Nat find(Nat x) {
    Nat root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      Nat next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  // Returns true when two classes were actually merged.
  bool unite(Nat x, Nat y) {
    Nat rx = find(x);
    Nat ry = find(y);
    if (rx == ry) return false;
    if (size_[rx] < size_[ry]) std::swap(rx, ry);
    parent_[ry] = rx;
    size_[rx] += size_[ry];
    return true;
  }

  bool same(Nat x, Nat y) { return find(x) == find(y); }

  Nat element_count() const { return static_cast<Nat>(parent_.size()); }

private:
  std::vector<Nat> parent_;
  std::vector<Nat> size_;
};

}  // namespace eeq
