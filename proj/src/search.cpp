#include "hnp/search.hpp"

#include "hnp/arith.hpp"
#include "hnp/criterion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace hnp {

const char *to_string(Ordering o) {
  return o == Ordering::Discriminant ? "discriminant" : "radical";
}

namespace {

// p^e if it is <= limit, else 0.
UInt128 bounded_pow(Int p, Int e, UInt128 limit) {
  UInt128 r = 1;
  for (Int i = 0; i < e; ++i) {
    if (r > limit / static_cast<UInt128>(p))
      return 0;
    r *= static_cast<UInt128>(p);
  }
  return r;
}

// Largest n with n^e <= x.
Int integer_root(UInt128 x, Int e) {
  if (e == 1)
    return x > static_cast<UInt128>(INT64_MAX) ? INT64_MAX : static_cast<Int>(x);
  Int n = static_cast<Int>(std::pow(static_cast<long double>(x), 1.0L / static_cast<long double>(e)));
  while (n > 1 && bounded_pow(n, e, x) == 0)
    --n;
  while (bounded_pow(n + 1, e, x) != 0)
    ++n;
  return n;
}

// Discrete log of x^((p-1)/n) to base g^((p-1)/n), modulo n.
Int tame_coordinate(Int p, Int g, Int x, Int n) {
  if (p == 2)
    return mod_floor<Int>(x, 4) == 3 ? 1 : 0;
  x = mod_floor<Int>(x, p);
  const Int h = pow_mod(x, (p - 1) / n, p);
  if (n == 2)
    return h == 1 ? 0 : 1;
  const Int zeta = pow_mod(g, (p - 1) / n, p);
  if (n <= 64) {
    Int acc = 1;
    for (Int k = 0; k < n; ++k) {
      if (acc == h)
        return k;
      acc = mul_mod(acc, zeta, p);
    }
  }
  return log_in_cyclic(h, zeta, n, p);
}

} // namespace

// ------------------------------------------------------------------ Leaf

const GroupTables &Leaf::tables() const { return ctx_->tables(); }

bool Leaf::surjective() const { return image_ == ctx_->tables().full_id(); }

UInt128 Leaf::discriminant() const {
  UInt128 d = 1;
  for (const auto &r : places_)
    d = checked_mul(d, checked_pow(static_cast<UInt128>(r.p), r.option->disc_exponent));
  return d;
}

UInt128 Leaf::radical() const {
  UInt128 d = 1;
  for (const auto &r : places_)
    d = checked_mul(d, static_cast<UInt128>(r.p));
  return d;
}

const Ramification *Leaf::at(Int p) const {
  for (const auto &r : places_)
    if (r.p == p)
      return &r;
  return nullptr;
}

int Leaf::evaluate(std::size_t i, Int x) const {
  const auto &t = ctx_->tables();
  const Ramification &r = places_[i];
  const LocalOption &o = *r.option;
  int out = 0;
  if (o.tame_order > 1)
    out = t.scale(tame_coordinate(r.p, r.root, x, o.tame_order), o.tame);
  if (o.wild_exp > 0) {
    const Int mod = ipow(r.p, static_cast<unsigned>(o.wild_exp));
    out = t.add(out, t.scale(wild_log(r.p, o.wild_exp, mod_floor<Int>(x, mod)),
                             o.wild));
  }
  return out;
}

int Leaf::frobenius(Int p) const {
  const auto &t = ctx_->tables();
  int out = 0;
  for (std::size_t i = 0; i < places_.size(); ++i)
    if (places_[i].p != p)
      out = t.add(out, evaluate(i, p));
  return out;
}

int Leaf::conjugation() const {
  const auto &t = ctx_->tables();
  int out = 0;
  for (std::size_t i = 0; i < places_.size(); ++i)
    out = t.add(out, evaluate(i, -1));
  return out;
}

int Leaf::decomposition(std::size_t i) const {
  return ctx_->tables().join_element(places_[i].option->inertia,
                                     frobenius(places_[i].p));
}

bool Leaf::hnp() const {
  if (is_cyclic(ctx_->group()))
    return true;
  if (ctx_->wedge_tables_) {
    const auto &w = *ctx_->wedge_tables_;
    int acc = w.trivial_id();
    for (std::size_t i = 0; i < places_.size() && acc != w.full_id(); ++i)
      acc = w.join(acc, ctx_->wedge_of_subgroup_[decomposition(i)]);
    return acc == w.full_id();
  }
  std::vector<Subgroup> decomp;
  for (std::size_t i = 0; i < places_.size(); ++i)
    decomp.push_back(ctx_->tables().subgroup(decomposition(i)));
  return hnp_holds(ctx_->group(), make_family(ctx_->group(), std::move(decomp)));
}

GlobalChar Leaf::global_char() const {
  const auto &t = ctx_->tables();
  std::vector<LocalChar> locals;
  for (const auto &r : places_)
    locals.push_back(
        LocalChar{r.p, t.element(r.option->tame), t.element(r.option->wild)});
  return make_global_char(ctx_->group(), locals);
}

// -------------------------------------------------------------- context

struct SearchContext::Task {
  std::size_t index; // prime index, or npos for the root node
  const LocalOption *option;
};

struct SearchContext::Worker {
  int id;
  const Visit *visit;
  std::vector<Ramification> stack;
};

SearchContext::SearchContext(FinAbGroup a, SearchOptions opts)
    : group_(std::move(a)), opts_(std::move(opts)) {
  if (opts_.bound < 1)
    throw InvalidInput("search bound must be at least 1");
  tables_ = std::make_unique<GroupTables>(group_);
  if (!is_cyclic(group_)) {
    const WedgeSquare w = wedge_square(group_);
    if (w.structure.order() <= GroupTables::kMaxOrder) {
      wedge_tables_ = std::make_unique<GroupTables>(w.structure);
      for (int s = 0; s < tables_->subgroup_count(); ++s)
        wedge_of_subgroup_.push_back(
            wedge_tables_->subgroup_id(wedge_image(w, tables_->subgroup(s))));
    }
  }
  if (opts_.restrict_to) {
    if (opts_.restrict_to->ambient() != group_)
      throw InvalidInput("restriction subgroup lives in another group");
    restrict_id_ = tables_->subgroup_id(*opts_.restrict_to);
  }
  build_options();
  bounds_.assign(static_cast<std::size_t>(workers()), opts_.bound);
}

SearchContext::~SearchContext() = default;

int SearchContext::workers() const { return std::max(1, opts_.jobs); }

int SearchContext::element_index(const Element &x) const {
  return tables_->index_of(x);
}

LocalOption SearchContext::make_option(Int p, const LocalChar &psi) const {
  LocalOption o;
  o.tame = tables_->index_of(psi.tame);
  o.wild = tables_->index_of(psi.wild);
  o.tame_order = tables_->order(o.tame);
  if (o.wild != 0)
    o.wild_exp = valuation(tables_->order(o.wild), p) + (p == 2 ? 2 : 1);
  o.inertia = tables_->join_element(tables_->join_element(0, o.tame), o.wild);
  o.disc_exponent = local_disc_exponent(group_, psi);
  return o;
}

void SearchContext::build_options() {
  const Int n = group_.order();
  const Int e = group_.exponent();
  const auto allowed = [&](int x) {
    return restrict_id_ < 0 || tables_->contains(restrict_id_, x);
  };
  const auto by_exponent = [](const LocalOption &x, const LocalOption &y) {
    return x.disc_exponent < y.disc_exponent;
  };

  // fixed places first; they are never branched on
  fixed_options_.reserve(opts_.fixed.size());
  fixed_image_ = tables_->trivial_id();
  for (const auto &[p, psi] : opts_.fixed) {
    if (p != psi.p)
      throw InvalidInput("fixed local character keyed by the wrong prime");
    validate_local_char(group_, psi);
    if (!psi.is_ramified())
      continue;
    fixed_options_.push_back(make_option(p, psi));
    const LocalOption &o = fixed_options_.back();
    fixed_places_.push_back(Ramification{p, p == 2 ? 0 : primitive_root(p), &o});
    fixed_image_ = tables_->join(fixed_image_, o.inertia);
    const UInt128 c = opts_.ordering == Ordering::Radical
                          ? static_cast<UInt128>(p)
                          : checked_pow(static_cast<UInt128>(p), o.disc_exponent);
    fixed_value_ = checked_mul(fixed_value_, c);
  }

  // tame option sets by gcd(p-1, exponent)
  min_exponent_ = 0;
  std::vector<Int> divisors;
  for (Int g = 1; g <= e; ++g)
    if (e % g == 0)
      divisors.push_back(g);
  for (Int g : divisors) {
    std::vector<LocalOption> set;
    for (int x = 1; x < tables_->size(); ++x)
      if (g % tables_->order(x) == 0 && allowed(x)) {
        LocalOption o;
        o.tame = x;
        o.tame_order = tables_->order(x);
        o.inertia = tables_->join_element(0, x);
        o.disc_exponent = n - n / o.tame_order;
        set.push_back(o);
      }
    std::stable_sort(set.begin(), set.end(), by_exponent);
    if (!set.empty() && (min_exponent_ == 0 || set.front().disc_exponent < min_exponent_))
      min_exponent_ = set.front().disc_exponent;
    tame_set_by_gcd_[g] = static_cast<int>(option_sets_.size());
    option_sets_.push_back(std::move(set));
  }

  // wild primes: the full local space
  std::map<Int, int> wild_set;
  for (auto [p, k] : factorize(std::max<Int>(n, 1))) {
    (void)k;
    std::vector<LocalOption> set;
    for (const auto &psi : local_char_space(p, group_)) {
      if (!psi.is_ramified())
        continue;
      LocalOption o = make_option(p, psi);
      if (allowed(o.tame) && allowed(o.wild))
        set.push_back(o);
    }
    std::stable_sort(set.begin(), set.end(), by_exponent);
    if (!set.empty() && (min_exponent_ == 0 || set.front().disc_exponent < min_exponent_))
      min_exponent_ = set.front().disc_exponent;
    wild_set[p] = static_cast<int>(option_sets_.size());
    option_sets_.push_back(std::move(set));
  }

  // prime cap
  UInt128 budget = opts_.bound;
  if (!opts_.bound_excludes_fixed)
    budget = fixed_value_ > budget ? 0 : budget / fixed_value_;
  if (min_exponent_ == 0 || budget < 2)
    cap_ = 1;
  else if (opts_.ordering == Ordering::Radical)
    cap_ = budget > static_cast<UInt128>(kSieveLimit) + 1 ? kSieveLimit + 1
                                                         : static_cast<Int>(budget);
  else
    cap_ = integer_root(budget, min_exponent_);
  if (cap_ > kSieveLimit)
    throw ResourceError("prime cap " + std::to_string(cap_) +
                        " exceeds the sieve limit " + std::to_string(kSieveLimit));

  for (Int p : primes_up_to(cap_)) {
    int set = -1;
    if (opts_.fixed.count(p)) {
      set = -1;
    } else if (auto it = wild_set.find(p); it != wild_set.end()) {
      set = it->second;
    } else if (p != 2) {
      set = tame_set_by_gcd_[std::gcd(p - 1, e)];
    }
    if (set >= 0 && option_sets_[static_cast<std::size_t>(set)].empty())
      set = -1;
    if (set < 0)
      continue;
    bool need_root = false;
    for (const auto &o : option_sets_[static_cast<std::size_t>(set)])
      need_root = need_root || o.tame_order > 2;
    primes_.push_back(p);
    roots_.push_back(need_root && p != 2 ? primitive_root(p) : 0);
    option_set_.push_back(set);
  }
}

const std::vector<LocalOption> &SearchContext::options_at(std::size_t idx) const {
  return option_sets_[static_cast<std::size_t>(option_set_[idx])];
}

void SearchContext::tighten(int worker, UInt128 bound) {
  auto &b = bounds_[static_cast<std::size_t>(worker)];
  b = std::min(b, bound);
}

void SearchContext::dfs(Worker &w, std::size_t start, UInt128 value,
                        int image) const {
  if (image == tables_->full_id() || opts_.include_etale)
    (*w.visit)(w.id, Leaf(*this, w.stack, value, image));
  const bool radical = opts_.ordering == Ordering::Radical;
  for (std::size_t idx = start; idx < primes_.size(); ++idx) {
    const UInt128 limit = bounds_[static_cast<std::size_t>(w.id)] / value;
    const Int p = primes_[idx];
    if (radical ? static_cast<UInt128>(p) > limit
                : bounded_pow(p, min_exponent_, limit) == 0)
      break;
    for (const LocalOption &o : options_at(idx)) {
      const UInt128 cost =
          radical ? static_cast<UInt128>(p) : bounded_pow(p, o.disc_exponent, limit);
      if (cost == 0 || cost > limit)
        break;
      w.stack.push_back(Ramification{p, roots_[idx], &o});
      dfs(w, idx + 1, value * cost, tables_->join(image, o.inertia));
      w.stack.pop_back();
    }
  }
}

void SearchContext::run(const Visit &visit) {
  std::fill(bounds_.begin(), bounds_.end(), opts_.bound);
  const UInt128 root_value = opts_.bound_excludes_fixed ? 1 : fixed_value_;
  if (root_value > opts_.bound)
    return;
  const auto fresh = [&](int id) {
    Worker w{id, &visit, fixed_places_};
    w.stack.reserve(fixed_places_.size() + 64);
    return w;
  };
  if (workers() == 1) {
    Worker w = fresh(0);
    dfs(w, 0, root_value, fixed_image_);
    return;
  }

  // one task per (first prime, option); the root node is its own task
  std::vector<Task> tasks{{static_cast<std::size_t>(-1), nullptr}};
  const bool radical = opts_.ordering == Ordering::Radical;
  const UInt128 limit = opts_.bound / root_value;
  for (std::size_t idx = 0; idx < primes_.size(); ++idx) {
    const Int p = primes_[idx];
    if (radical ? static_cast<UInt128>(p) > limit
                : bounded_pow(p, min_exponent_, limit) == 0)
      break;
    for (const LocalOption &o : options_at(idx))
      tasks.push_back(Task{idx, &o});
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  for (int id = 0; id < workers(); ++id)
    threads.emplace_back([&, id] {
      try {
        Worker w = fresh(id);
        for (std::size_t k; (k = next.fetch_add(1)) < tasks.size();) {
          const Task &task = tasks[k];
          if (task.option == nullptr) {
            if (fixed_image_ == tables_->full_id() || opts_.include_etale)
              visit(id, Leaf(*this, w.stack, root_value, fixed_image_));
            continue;
          }
          const Int p = primes_[task.index];
          const UInt128 lim = bounds_[static_cast<std::size_t>(id)] / root_value;
          const UInt128 cost = radical ? static_cast<UInt128>(p)
                                       : bounded_pow(p, task.option->disc_exponent, lim);
          if (cost == 0 || cost > lim)
            continue;
          w.stack.push_back(Ramification{p, roots_[task.index], task.option});
          dfs(w, task.index + 1, root_value * cost,
              tables_->join(fixed_image_, task.option->inertia));
          w.stack.pop_back();
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next = tasks.size();
      }
    });
  for (auto &t : threads)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

FieldRecord SearchContext::record(const Leaf &leaf) const {
  const auto &t = *tables_;
  FieldRecord rec;
  rec.global = leaf.global_char();
  rec.discriminant = leaf.discriminant();
  rec.conductor = 1;
  std::vector<std::size_t> order(leaf.places().size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) {
    return leaf.places()[i].p < leaf.places()[j].p;
  });
  for (std::size_t i : order) {
    const Ramification &r = leaf.places()[i];
    RamifiedPlace place;
    place.local = LocalChar{r.p, t.element(r.option->tame), t.element(r.option->wild)};
    place.inertia = t.subgroup(r.option->inertia);
    const int frob = leaf.frobenius(r.p);
    place.frobenius = t.element(frob);
    place.decomposition = t.subgroup(t.join_element(r.option->inertia, frob));
    place.disc_exponent = r.option->disc_exponent;
    place.conductor_exponent = local_conductor_exponent(group_, place.local);
    rec.conductor = checked_mul(
        rec.conductor, checked_pow(static_cast<UInt128>(r.p), place.conductor_exponent));
    rec.ramified.push_back(std::move(place));
  }
  rec.hnp = leaf.hnp();
  rec.infinite_place = t.element(leaf.conjugation());
  rec.surjective = leaf.surjective();
  return rec;
}

// ------------------------------------------------------------ drivers

PartialResult::PartialResult(std::vector<FieldRecord> p, UInt128 below)
    : ResourceError("record budget exceeded; complete below " +
                    u128_to_string(below)),
      prefix(std::move(p)), complete_below(below) {}

std::vector<FieldRecord> enumerate_extensions(const FinAbGroup &a,
                                              const SearchOptions &opts,
                                              std::size_t max_records) {
  SearchContext ctx(a, opts);
  using Item = std::pair<UInt128, FieldRecord>;
  const auto less = [](const Item &x, const Item &y) {
    if (x.first != y.first)
      return x.first < y.first;
    return record_less(x.second, y.second);
  };
  std::vector<std::vector<Item>> found(static_cast<std::size_t>(ctx.workers()));
  const std::size_t keep = max_records == 0 ? 0 : max_records + 1;
  ctx.run([&](int worker, const Leaf &leaf) {
    auto &heap = found[static_cast<std::size_t>(worker)];
    Item item{leaf.value(), ctx.record(leaf)};
    if (keep == 0) {
      heap.push_back(std::move(item));
      return;
    }
    if (heap.size() == keep) {
      if (!less(item, heap.front()))
        return;
      std::pop_heap(heap.begin(), heap.end(), less);
      heap.back() = std::move(item);
    } else {
      heap.push_back(std::move(item));
    }
    std::push_heap(heap.begin(), heap.end(), less);
    if (heap.size() == keep)
      ctx.tighten(worker, heap.front().first);
  });
  std::vector<Item> all;
  for (auto &v : found)
    std::move(v.begin(), v.end(), std::back_inserter(all));
  std::sort(all.begin(), all.end(), less);
  if (keep != 0 && all.size() > max_records) {
    const UInt128 below = all[max_records].first;
    std::vector<FieldRecord> prefix;
    for (auto &[v, r] : all)
      if (v < below)
        prefix.push_back(std::move(r));
    throw PartialResult(std::move(prefix), below);
  }
  std::vector<FieldRecord> out;
  out.reserve(all.size());
  for (auto &[v, r] : all)
    out.push_back(std::move(r));
  return out;
}

std::vector<Int> count_extensions(const FinAbGroup &a,
                                  const std::vector<UInt128> &grid,
                                  SearchOptions opts) {
  if (grid.empty())
    return {};
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      std::adjacent_find(grid.begin(), grid.end()) != grid.end())
    throw InvalidInput("grid must be strictly increasing");
  opts.bound = grid.back();
  SearchContext ctx(a, opts);
  std::vector<std::vector<Int>> buckets(static_cast<std::size_t>(ctx.workers()),
                                        std::vector<Int>(grid.size(), 0));
  ctx.run([&](int worker, const Leaf &leaf) {
    const auto k = std::lower_bound(grid.begin(), grid.end(), leaf.value()) - grid.begin();
    ++buckets[static_cast<std::size_t>(worker)][static_cast<std::size_t>(k)];
  });
  std::vector<Int> out(grid.size(), 0);
  for (const auto &b : buckets)
    for (std::size_t i = 0; i < grid.size(); ++i)
      out[i] += b[i];
  std::partial_sum(out.begin(), out.end(), out.begin());
  return out;
}

} // namespace hnp
