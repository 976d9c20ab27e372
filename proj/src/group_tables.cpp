#include "hnp/group_tables.hpp"

#include "hnp/errors.hpp"

namespace hnp {

GroupTables::GroupTables(FinAbGroup g, std::size_t max_subgroups)
    : group_(std::move(g)) {
  if (group_.order() > kMaxOrder)
    throw ResourceError("group order " + std::to_string(group_.order()) +
                        " exceeds table limit " + std::to_string(kMaxOrder));
  elements_ = all_elements(group_);
  const int n = size();
  strides_.assign(group_.rank(), 1);
  for (std::size_t i = group_.rank(); i-- > 1;)
    strides_[i - 1] = strides_[i] * group_.factor(i);

  add_.resize(static_cast<std::size_t>(n) * n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      add_[x * n + y] = index_of(hnp::add(group_, elements_[x], elements_[y]));
  const Int e = group_.exponent();
  scale_.resize(static_cast<std::size_t>(e) * n);
  for (int x = 0; x < n; ++x) {
    int acc = 0;
    for (Int k = 0; k < e; ++k) {
      scale_[k * n + x] = acc;
      acc = add(acc, x);
    }
  }
  orders_.resize(n);
  for (int x = 0; x < n; ++x)
    orders_[x] = static_cast<int>(element_order(group_, elements_[x]));

  // breadth-first closure of the lattice under joining one element
  subgroups_.push_back(trivial_subgroup(group_));
  ids_.emplace(subgroups_[0], 0);
  for (std::size_t cur = 0; cur < subgroups_.size(); ++cur) {
    join_.resize(subgroups_.size() * n, -1);
    for (int x = 0; x < n; ++x) {
      const Subgroup &h = subgroups_[cur];
      int id;
      if (h.contains(elements_[x])) {
        id = static_cast<int>(cur);
      } else {
        Subgroup k = hnp::join(h, elements_[x]);
        auto it = ids_.find(k);
        if (it == ids_.end()) {
          if (subgroups_.size() >= max_subgroups)
            throw ResourceError("subgroup lattice of " + group_.to_string() +
                                " exceeds " + std::to_string(max_subgroups));
          id = static_cast<int>(subgroups_.size());
          ids_.emplace(k, id);
          subgroups_.push_back(std::move(k));
          join_.resize(subgroups_.size() * n, -1);
        } else {
          id = it->second;
        }
      }
      join_[cur * n + x] = id;
    }
  }
  for (const auto &h : subgroups_) {
    subgroup_orders_.push_back(static_cast<int>(h.order()));
    std::vector<int> gens;
    for (const auto &x : h.generators())
      gens.push_back(index_of(x));
    subgroup_gens_.push_back(std::move(gens));
  }
  full_id_ = subgroup_id(full_subgroup(group_));
}

int GroupTables::index_of(const Element &x) const {
  Int idx = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    idx += x[i] * strides_[i];
  return static_cast<int>(idx);
}

int GroupTables::scale(Int k, int x) const {
  return scale_[mod_floor(k, group_.exponent()) * size() + x];
}

int GroupTables::subgroup_id(const Subgroup &h) const {
  auto it = ids_.find(h);
  if (it == ids_.end())
    throw InvalidInput("subgroup not in table");
  return it->second;
}

int GroupTables::join(int a, int b) const {
  for (int x : subgroup_gens_[b])
    a = join_element(a, x);
  return a;
}

} // namespace hnp
