#pragma once

// Branch-and-bound enumeration of characters G_Q -> A over their ramified
// supports. Primes are chosen in increasing order; every prime contributes at
// least p^(|A|(1 - 1/ell)) to the discriminant, which bounds the search.

#include "hnp/errors.hpp"
#include "hnp/group_tables.hpp"
#include "hnp/qfields.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace hnp {

enum class Ordering { Discriminant, Radical };

const char *to_string(Ordering o);

struct SearchOptions {
  UInt128 bound = 0;
  Ordering ordering = Ordering::Discriminant;
  bool include_etale = false;
  int jobs = 1;
  /// Forced local characters; an unramified entry keeps p unramified.
  std::map<Int, LocalChar> fixed;
  /// When set, local images at non-fixed primes must lie in this subgroup.
  std::optional<Subgroup> restrict_to;
  /// Measure the bound against the non-fixed primes only.
  bool bound_excludes_fixed = false;
};

/// One local option at one prime, in table indices.
struct LocalOption {
  int tame = 0;
  int wild = 0;
  int tame_order = 1;
  int wild_exp = 0; // modulus exponent passed to wild_log, 0 if wild = 0
  int inertia = 0;  // subgroup id of <tame, wild>
  Int disc_exponent = 0;
};

struct Ramification {
  Int p = 0;
  Int root = 0; // primitive root, 0 for p = 2
  const LocalOption *option = nullptr;
};

class SearchContext;

/// A node of the search: a character given by its ramified local data.
/// Valid only during the visit call.
class Leaf {
public:
  Leaf(const SearchContext &ctx, std::span<const Ramification> places,
       UInt128 value, int image)
      : ctx_(&ctx), places_(places), value_(value), image_(image) {}

  const GroupTables &tables() const;
  std::span<const Ramification> places() const { return places_; }
  /// The counting function: discriminant or radical (over non-fixed primes
  /// when the bound excludes them).
  UInt128 value() const { return value_; }
  int image() const { return image_; }
  bool surjective() const;

  UInt128 discriminant() const;
  UInt128 radical() const;
  const Ramification *at(Int p) const;
  /// psi_{p_i}(x) as an element index.
  int evaluate(std::size_t i, Int x) const;
  int frobenius(Int p) const;
  int conjugation() const;
  int decomposition(std::size_t i) const;
  bool hnp() const;

  GlobalChar global_char() const;

private:
  const SearchContext *ctx_;
  std::span<const Ramification> places_;
  UInt128 value_;
  int image_;
};

class SearchContext {
public:
  /// Throws ResourceError when |A| exceeds the table limit or the prime cap
  /// exceeds the sieve limit.
  SearchContext(FinAbGroup a, SearchOptions opts);
  ~SearchContext();

  static constexpr Int kSieveLimit = 200'000'000;

  const FinAbGroup &group() const { return group_; }
  const GroupTables &tables() const { return *tables_; }
  const SearchOptions &options() const { return opts_; }
  int workers() const;
  Int prime_cap() const { return cap_; }

  using Visit = std::function<void(int worker, const Leaf &leaf)>;
  /// Calls visit for every node (surjective unless include_etale). Nodes are
  /// distributed over workers; each worker calls visit from one thread.
  void run(const Visit &visit);
  /// Lowers the bound used by `worker` for the rest of the run; only call it
  /// from inside that worker's visit.
  void tighten(int worker, UInt128 bound);

  FieldRecord record(const Leaf &leaf) const;
  int element_index(const Element &x) const;
  LocalOption make_option(Int p, const LocalChar &psi) const;

private:
  friend class Leaf;
  struct Task;
  struct Worker;

  void build_options();
  void dfs(Worker &w, std::size_t start, UInt128 value, int image) const;
  const std::vector<LocalOption> &options_at(std::size_t idx) const;

  FinAbGroup group_;
  SearchOptions opts_;
  std::unique_ptr<GroupTables> tables_;
  std::unique_ptr<GroupTables> wedge_tables_;
  std::vector<int> wedge_of_subgroup_;
  int restrict_id_ = -1;
  Int min_exponent_ = 0;
  Int cap_ = 1;
  std::vector<Int> primes_;
  std::vector<Int> roots_;
  std::vector<int> option_set_; // per prime: index into option_sets_, -1 none
  std::vector<std::vector<LocalOption>> option_sets_;
  std::map<Int, int> tame_set_by_gcd_;
  std::vector<Ramification> fixed_places_;
  std::vector<LocalOption> fixed_options_;
  UInt128 fixed_value_ = 1;
  int fixed_image_ = 0;
  std::vector<UInt128> bounds_;
};

/// Thrown when a record budget is exceeded; `prefix` holds every record with
/// counting value below `complete_below`.
class PartialResult : public ResourceError {
public:
  PartialResult(std::vector<FieldRecord> prefix, UInt128 complete_below);

  std::vector<FieldRecord> prefix;
  UInt128 complete_below;
};

/// Every surjective character (all characters with include_etale) with
/// counting value <= bound, sorted by record_less. With max_records > 0 and
/// more records than that, throws PartialResult carrying the complete prefix.
std::vector<FieldRecord> enumerate_extensions(const FinAbGroup &a,
                                              const SearchOptions &opts,
                                              std::size_t max_records = 0);

/// N(X) for each X of an increasing grid.
std::vector<Int> count_extensions(const FinAbGroup &a,
                                  const std::vector<UInt128> &grid,
                                  SearchOptions opts);

} // namespace hnp
