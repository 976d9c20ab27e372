#pragma once

// The Hasse norm principle for abelian extensions, decided from the
// decomposition groups through exterior squares, together with the subgroup
// family C and the structural facts that pin down the limiting density.

#include "hnp/abgroup.hpp"

#include <optional>
#include <vector>

namespace hnp {

/// Decomposition groups of an A-extension (a multiset; order irrelevant).
struct DecompFamily {
  FinAbGroup ambient;
  std::vector<Subgroup> groups;
};

/// Validates that every member lives in `ambient`.
DecompFamily make_family(const FinAbGroup &ambient,
                         std::vector<Subgroup> groups);

/// HNP holds iff the exterior squares of the decomposition groups jointly
/// generate the exterior square of A. Dual to injectivity of
/// Hom(^2 A, Q/Z) -> prod_v Hom(^2 D_v, Q/Z).
bool hnp_holds(const FinAbGroup &a, const DecompFamily &d);

/// Independent check of hnp_holds: enumerate every alternating pairing on A
/// and look for a non-zero one vanishing on each D_v x D_v. Throws
/// ResourceError when |A| > max_order or there are too many pairings.
bool hnp_oracle_bruteforce(const FinAbGroup &a, const DecompFamily &d,
                           Int max_order = 256);

/// How the "small" generator of a member of C is constrained.
enum class SmallGenerator { OrderDividesEll, OrderEqualsEll };

struct FamilyC {
  FinAbGroup ambient;
  Int ell = 0;
  std::vector<Subgroup> members; // sorted, deduplicated
};

/// All subgroups <a, b> with ell * b = 0. ell must be the smallest prime
/// divisor of |A|; throws InvalidInput otherwise.
FamilyC enumerate_family_C(const FinAbGroup &a, Int ell,
                           SmallGenerator rule = SmallGenerator::OrderDividesEll);

bool local_map_injective(const FinAbGroup &a, const DecompFamily &fixed,
                         Int ell);
/// 1 if lifts with these fixed local conditions satisfy HNP almost surely,
/// 0 if they fail it almost surely.
int zero_one_verdict(const FinAbGroup &a, Int ell, const DecompFamily &fixed);

enum class LimitTag { One, OpenInterval };

struct LimitVerdict {
  LimitTag tag;
  Int ell;
  FinAbGroup quotient; // A / A[ell]
};

const char *to_string(LimitTag tag);

/// Throws InvalidInput for the trivial group.
LimitVerdict classify_limit(const FinAbGroup &a);

/// Brute force over all pairs (a, b): every 2-generated subgroup lies in C.
/// Requires A/A[ell] cyclic (PreconditionError otherwise).
bool verify_claim_twogen(const FinAbGroup &a);

/// Non-zero alternating pairing on A pulled back from A/A[ell]; it vanishes
/// on every member of C. Requires A/A[ell] non-cyclic.
AltPairing construct_killing_pairing(const FinAbGroup &a);

/// All abelian groups of order n (one per isomorphism class, sorted).
std::vector<FinAbGroup> abelian_groups_of_order(Int n);
std::vector<Subgroup> all_subgroups(const FinAbGroup &a);

struct GroupCheck {
  FinAbGroup group;
  Int ell = 0;
  FinAbGroup quotient;
  LimitTag tag = LimitTag::One;
  std::optional<bool> twogen_claim;    // when the quotient is cyclic
  std::optional<bool> killing_pairing; // when it is not
  bool consistency = false; // tag One <=> C alone makes the map injective
  bool passed() const;
};

struct StructureReport {
  Int bound = 0;
  Int checked_up_to = 0;
  bool truncated = false;
  std::vector<GroupCheck> groups;
  bool all_passed() const;
};

/// Runs the structural checks for every non-trivial abelian group of order
/// <= bound. Orders above max_bound are skipped and the report is marked
/// truncated.
StructureReport verify_structure(Int bound, Int max_bound = 200);

} // namespace hnp
