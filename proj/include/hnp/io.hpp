#pragma once

// Text and JSON forms of groups, families, records, curves and run
// manifests, as used by the command-line tool.

#include "hnp/criterion.hpp"
#include "hnp/density.hpp"
#include "hnp/qfields.hpp"

#include <json.hpp>

#include <chrono>
#include <iosfwd>
#include <string>
#include <vector>

namespace hnp {

using Json = nlohmann::ordered_json;

/// "2,2" or "4 x 4"; "1" is the trivial group. Throws InvalidInput.
FinAbGroup parse_group(const std::string &s);

/// "1,0", reduced into the group. Throws InvalidInput.
Element parse_element(const FinAbGroup &a, const std::string &s);

Json element_json(const Element &x);
Element element_from_json(const FinAbGroup &a, const Json &j);

/// A subgroup as the list of its generators.
Json subgroup_json(const Subgroup &h);
Subgroup subgroup_from_json(const FinAbGroup &a, const Json &j);

/// Either a list of subgroups or {"groups": [...]}; each subgroup is a list
/// of generators. An optional "group" key must agree with `a`. Throws
/// InvalidInput.
DecompFamily family_from_json(const FinAbGroup &a, const Json &j);

/// A number when it fits in 64 bits, otherwise a decimal string.
Json u128_json(UInt128 x);

Json record_json(const FieldRecord &rec);
void write_jsonl(std::ostream &os, const std::vector<FieldRecord> &records);

/// "geometric:R" (R, R^2, ... up to x, then x) or "list:X1,X2,...".
/// Throws InvalidInput.
std::vector<UInt128> parse_grid(const std::string &s, UInt128 x);

/// Local specs at one place:
///   unramified[@F]   any or a given Frobenius
///   split            unramified with trivial Frobenius
///   ramified:T[/W][@F]  tame image T, wild image W (default 0)
///   conj:C           real place, image C of complex conjugation
/// Throws InvalidInput.
LocalSpec parse_local_spec(const FinAbGroup &a, Int place, const std::string &s);
std::string format_local_hom(const LocalHom &h);

struct RunManifest {
  std::vector<std::string> command_line;
  std::string group;
  std::vector<std::pair<std::string, std::string>> bounds;
  bool deterministic = true;
  std::string version;
  std::vector<std::string> notes;
  double seconds = 0;

  Json to_json() const;
};

inline constexpr const char *kToolVersion = "1.0.0";

} // namespace hnp
