#include "hnp/io.hpp"

#include "hnp/errors.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <ostream>
#include <sstream>

namespace hnp {

namespace {

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    out.push_back(cur);
  if (!s.empty() && s.back() == sep)
    out.emplace_back();
  return out;
}

std::string strip(const std::string &s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

Int parse_int(const std::string &raw) {
  const std::string s = strip(raw);
  if (s.empty())
    throw InvalidInput("empty integer");
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception &) {
    throw InvalidInput("not an integer: '" + s + "'");
  }
  if (pos != s.size())
    throw InvalidInput("not an integer: '" + s + "'");
  return v;
}

Int reduce(Int x, Int d) { return ((x % d) + d) % d; }

} // namespace

FinAbGroup parse_group(const std::string &s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), 'x', ',');
  std::replace(t.begin(), t.end(), 'X', ',');
  const auto parts = split(t, ',');
  if (parts.empty())
    throw InvalidInput("empty group spec");
  std::vector<Int> factors;
  for (const auto &p : parts) {
    const Int d = parse_int(p);
    if (d < 1)
      throw InvalidInput("group spec '" + s + "': orders must be positive");
    if (d > 1)
      factors.push_back(d);
  }
  return factors.empty() ? FinAbGroup{} : canonicalize(factors);
}

Element parse_element(const FinAbGroup &a, const std::string &s) {
  std::vector<Int> coords;
  if (!strip(s).empty())
    for (const auto &p : split(s, ','))
      coords.push_back(parse_int(p));
  if (coords.size() != a.rank())
    throw InvalidInput("element '" + s + "' does not have " +
                       std::to_string(a.rank()) + " coordinates");
  for (std::size_t i = 0; i < coords.size(); ++i)
    coords[i] = reduce(coords[i], a.factor(i));
  return make_element(a, std::move(coords));
}

Json element_json(const Element &x) { return Json(x.coords); }

Element element_from_json(const FinAbGroup &a, const Json &j) {
  if (!j.is_array() || j.size() != a.rank())
    throw InvalidInput("element must be an array of " + std::to_string(a.rank()) +
                       " integers");
  std::vector<Int> coords;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer())
      throw InvalidInput("element coordinates must be integers");
    coords.push_back(reduce(j[i].get<Int>(), a.factor(i)));
  }
  return make_element(a, std::move(coords));
}

Json subgroup_json(const Subgroup &h) {
  Json out = Json::array();
  for (const auto &g : h.generators())
    out.push_back(element_json(g));
  return out;
}

Subgroup subgroup_from_json(const FinAbGroup &a, const Json &j) {
  if (!j.is_array())
    throw InvalidInput("subgroup must be an array of generators");
  std::vector<Element> gens;
  for (const auto &g : j)
    gens.push_back(element_from_json(a, g));
  return subgroup_from_generators(a, gens);
}

DecompFamily family_from_json(const FinAbGroup &a, const Json &j) {
  const Json *list = &j;
  if (j.is_object()) {
    if (j.contains("group")) {
      if (!j["group"].is_string() || parse_group(j["group"].get<std::string>()) != a)
        throw InvalidInput("family is for a different group");
    }
    if (!j.contains("groups"))
      throw InvalidInput("family object needs a \"groups\" key");
    list = &j["groups"];
  }
  if (!list->is_array())
    throw InvalidInput("family must be an array of subgroups");
  std::vector<Subgroup> groups;
  for (const auto &h : *list)
    groups.push_back(subgroup_from_json(a, h));
  return make_family(a, std::move(groups));
}

Json u128_json(UInt128 x) {
  if (x <= std::numeric_limits<std::uint64_t>::max())
    return Json(static_cast<std::uint64_t>(x));
  return Json(u128_to_string(x));
}

Json record_json(const FieldRecord &rec) {
  Json j;
  j["group"] = rec.global.group.to_string();
  j["disc"] = u128_json(rec.discriminant);
  j["conductor"] = u128_json(rec.conductor);
  Json ram = Json::array();
  for (const auto &r : rec.ramified) {
    Json place;
    place["p"] = r.local.p;
    place["inertia"] = subgroup_json(r.inertia);
    place["frob"] = element_json(r.frobenius);
    place["decomp"] = subgroup_json(r.decomposition);
    place["e"] = r.inertia.order();
    ram.push_back(std::move(place));
  }
  j["ramified"] = std::move(ram);
  j["conj"] = element_json(rec.infinite_place);
  j["surjective"] = rec.surjective;
  j["hnp"] = rec.hnp;
  return j;
}

void write_jsonl(std::ostream &os, const std::vector<FieldRecord> &records) {
  for (const auto &r : records)
    os << record_json(r).dump() << '\n';
}

std::vector<UInt128> parse_grid(const std::string &s, UInt128 x) {
  const auto colon = s.find(':');
  if (colon == std::string::npos)
    throw InvalidInput("grid must be geometric:R or list:X1,X2,...");
  const std::string kind = s.substr(0, colon);
  const std::string rest = s.substr(colon + 1);
  std::vector<UInt128> grid;
  if (kind == "geometric") {
    const UInt128 r = parse_u128(rest);
    if (r < 2)
      throw InvalidInput("grid ratio must be at least 2");
    grid = geometric_grid(r, x, r);
    if (grid.empty() || grid.back() != x)
      grid.push_back(x);
  } else if (kind == "list") {
    for (const auto &p : split(rest, ','))
      grid.push_back(parse_u128(strip(p)));
  } else {
    throw InvalidInput("unknown grid kind '" + kind + "'");
  }
  if (grid.empty())
    throw InvalidInput("empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw InvalidInput("grid must be strictly increasing");
  return grid;
}

LocalSpec parse_local_spec(const FinAbGroup &a, Int place, const std::string &s) {
  if (place == kInfinity) {
    if (s.rfind("conj:", 0) != 0)
      throw InvalidInput("the real place takes conj:C");
    return archimedean_spec(parse_element(a, s.substr(5)));
  }
  if (s.rfind("conj:", 0) == 0)
    throw InvalidInput("conj: applies to the real place only");
  std::string body = s;
  std::optional<Element> frob;
  if (const auto at = body.find('@'); at != std::string::npos) {
    frob = parse_element(a, body.substr(at + 1));
    body = body.substr(0, at);
  }
  if (body == "unramified")
    return unramified_spec(a, place, frob);
  if (body == "split") {
    if (frob)
      throw InvalidInput("split takes no Frobenius");
    return unramified_spec(a, place, zero_element(a));
  }
  if (body.rfind("ramified:", 0) == 0) {
    const std::string images = body.substr(9);
    const auto slash = images.find('/');
    LocalChar psi;
    psi.p = place;
    psi.tame = parse_element(a, images.substr(0, slash));
    psi.wild = slash == std::string::npos ? zero_element(a)
                                          : parse_element(a, images.substr(slash + 1));
    validate_local_char(a, psi);
    if (!psi.is_ramified())
      throw InvalidInput("ramified spec with trivial images");
    return finite_spec(std::move(psi), frob);
  }
  throw InvalidInput("unknown local spec '" + s + "'");
}

namespace {

std::string element_text(const Element &x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i)
      out += ',';
    out += std::to_string(x[i]);
  }
  return out;
}

} // namespace

std::string format_local_hom(const LocalHom &h) {
  if (h.place == kInfinity)
    return "conj:" + element_text(h.value);
  if (!h.is_ramified())
    return "unramified@" + element_text(h.value);
  std::string out = "ramified:" + element_text(h.character.tame);
  if (!h.character.wild.is_zero())
    out += "/" + element_text(h.character.wild);
  return out + "@" + element_text(h.value);
}

Json RunManifest::to_json() const {
  Json j;
  j["command_line"] = command_line;
  j["group"] = group;
  Json b = Json::object();
  for (const auto &[k, v] : bounds)
    b[k] = v;
  j["bounds"] = std::move(b);
  j["deterministic"] = deterministic;
  j["version"] = version;
  if (!notes.empty())
    j["notes"] = notes;
  j["seconds"] = seconds;
  return j;
}

} // namespace hnp
