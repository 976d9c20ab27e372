#pragma once

// Dense lookup tables for a small finite abelian group: elements are indexed
// in mixed radix, subgroups are numbered and joins are precomputed. Used by
// the enumerators, which touch the same few elements millions of times.

#include "hnp/abgroup.hpp"

#include <unordered_map>
#include <vector>

namespace hnp {

class GroupTables {
public:
  static constexpr Int kMaxOrder = 1024;

  /// Throws ResourceError if |g| > kMaxOrder or the subgroup lattice has more
  /// than max_subgroups members.
  explicit GroupTables(FinAbGroup g, std::size_t max_subgroups = 50000);

  const FinAbGroup &group() const { return group_; }
  int size() const { return static_cast<int>(elements_.size()); }
  int index_of(const Element &x) const;
  const Element &element(int idx) const { return elements_[idx]; }

  int add(int x, int y) const { return add_[x * size() + y]; }
  /// k * x with k taken modulo the exponent.
  int scale(Int k, int x) const;
  int order(int x) const { return orders_[x]; }

  int subgroup_count() const { return static_cast<int>(subgroups_.size()); }
  const Subgroup &subgroup(int id) const { return subgroups_[id]; }
  int subgroup_id(const Subgroup &h) const;
  int subgroup_order(int id) const { return subgroup_orders_[id]; }
  int join_element(int sub, int x) const { return join_[sub * size() + x]; }
  int join(int a, int b) const;
  bool contains(int sub, int x) const { return join_element(sub, x) == sub; }
  int trivial_id() const { return 0; }
  int full_id() const { return full_id_; }

private:
  FinAbGroup group_;
  std::vector<Element> elements_;
  std::vector<Int> strides_;
  std::vector<int> add_;
  std::vector<int> scale_; // exponent x size
  std::vector<int> orders_;
  std::vector<Subgroup> subgroups_;
  std::vector<int> subgroup_orders_;
  std::vector<std::vector<int>> subgroup_gens_;
  std::unordered_map<Subgroup, int> ids_;
  std::vector<int> join_;
  int full_id_ = 0;
};

} // namespace hnp
