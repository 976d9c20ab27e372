#include "commands.hpp"

#include "hnp/criterion.hpp"
#include "hnp/density.hpp"
#include "hnp/errors.hpp"
#include "hnp/io.hpp"
#include "hnp/qfields.hpp"
#include "hnp/search.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace hnp::cli {

namespace {

constexpr const char *kCountingNote =
    "records are epimorphisms G_Q -> A; a field appears #Aut(A) times";

struct Env {
  std::ostream &out;
  std::ostream &err;
  RunManifest manifest;
};

Ordering parse_ordering(const std::string &s) {
  if (s == "disc" || s == "discriminant")
    return Ordering::Discriminant;
  if (s == "radical")
    return Ordering::Radical;
  throw InvalidInput("ordering must be disc or radical");
}

Int parse_place(const std::string &s) {
  if (s == "inf" || s == "infinity")
    return kInfinity;
  const UInt128 p = parse_u128(s);
  if (p < 2 || p > static_cast<UInt128>(SearchContext::kSieveLimit))
    throw InvalidInput("place must be a prime or inf");
  return static_cast<Int>(p);
}

std::string fixed(double x, int digits = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

// ------------------------------------------------------------ group

int cmd_group(Env &env, const std::string &spec) {
  const FinAbGroup a = parse_group(spec);
  if (a.is_trivial())
    throw InvalidInput("the trivial group has no smallest prime divisor");
  const LimitVerdict v = classify_limit(a);
  std::vector<Int> torsion_factors;
  for (Int d : a.factors())
    if (d % v.ell == 0)
      torsion_factors.push_back(v.ell);
  const FinAbGroup torsion_group =
      torsion_factors.empty() ? FinAbGroup{} : canonicalize(torsion_factors);
  Json j;
  j["group"] = a.to_string();
  j["factors"] = a.factors();
  j["order"] = a.order();
  j["cyclic"] = is_cyclic(a);
  j["ell"] = v.ell;
  j["torsion"] = torsion_group.to_string();
  j["quotient"] = v.quotient.to_string();
  j["wedge"] = wedge_square(a).structure.to_string();
  j["family_C"] = enumerate_family_C(a, v.ell).members.size();
  j["verdict"] = to_string(v.tag);
  env.out << j.dump(2) << '\n';
  env.manifest.group = a.to_string();
  return kOk;
}

// ------------------------------------------------------------ hnp

int cmd_hnp(Env &env, const std::string &spec, const std::string &path) {
  const FinAbGroup a = parse_group(spec);
  env.manifest.group = a.to_string();
  std::ifstream in(path);
  if (!in)
    throw InvalidInput("cannot read " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error &e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
  const DecompFamily d = family_from_json(a, j);
  const bool holds = hnp_holds(a, d);
  env.out << (holds ? "HOLDS" : "FAILS") << '\n';
  return holds ? kOk : kFails;
}

// ------------------------------------------------------------ verify

int cmd_verify(Env &env, Int bound, Int max_bound) {
  env.manifest.bounds = {{"bound", std::to_string(bound)},
                         {"max_bound", std::to_string(max_bound)}};
  const StructureReport r = verify_structure(bound, max_bound);
  for (const auto &g : r.groups) {
    Json j;
    j["group"] = g.group.to_string();
    j["order"] = g.group.order();
    j["ell"] = g.ell;
    j["quotient"] = g.quotient.to_string();
    j["verdict"] = to_string(g.tag);
    if (g.twogen_claim)
      j["twogen_claim"] = *g.twogen_claim;
    if (g.killing_pairing)
      j["killing_pairing"] = *g.killing_pairing;
    j["consistency"] = g.consistency;
    j["passed"] = g.passed();
    env.out << j.dump() << '\n';
  }
  env.err << "verify: " << r.groups.size() << " groups up to order " << r.checked_up_to
          << (r.all_passed() ? ", all passed" : ", FAILURES") << '\n';
  if (r.truncated) {
    env.err << "verify: orders above " << max_bound << " were not checked\n";
    return kResource;
  }
  return r.all_passed() ? kOk : kFails;
}

// ------------------------------------------------------------ enumerate

struct SearchFlags {
  std::string group;
  std::string max = "";
  std::string ordering = "disc";
  bool include_etale = false;
  int jobs = 1;
};

SearchOptions search_options(Env &env, const SearchFlags &f, const FinAbGroup &a,
                             const char *bound_name) {
  SearchOptions opts;
  opts.bound = parse_u128(f.max);
  opts.ordering = parse_ordering(f.ordering);
  opts.include_etale = f.include_etale;
  opts.jobs = f.jobs;
  if (f.jobs < 1)
    throw InvalidInput("--jobs must be positive");
  env.manifest.group = a.to_string();
  env.manifest.bounds = {{bound_name, u128_to_string(opts.bound)},
                         {"ordering", to_string(opts.ordering)}};
  if (f.include_etale)
    env.manifest.bounds.emplace_back("include_etale", "true");
  env.manifest.notes.push_back(kCountingNote);
  return opts;
}

int cmd_enumerate(Env &env, const SearchFlags &f, const std::string &out_path,
                  std::size_t max_records) {
  const FinAbGroup a = parse_group(f.group);
  const SearchOptions opts = search_options(env, f, a, "max_disc");
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file)
      throw InvalidInput("cannot write " + out_path);
  }
  std::ostream &os = out_path.empty() ? env.out : file;
  try {
    write_jsonl(os, enumerate_extensions(a, opts, max_records));
  } catch (const PartialResult &p) {
    write_jsonl(os, p.prefix);
    env.err << "enumerate: record cap reached; output is complete below "
            << u128_to_string(p.complete_below) << '\n';
    env.manifest.bounds.emplace_back("complete_below", u128_to_string(p.complete_below));
    return kResource;
  }
  return kOk;
}

// ------------------------------------------------------------ counts

int cmd_counts(Env &env, SearchFlags f, const std::string &grid_spec) {
  const FinAbGroup a = parse_group(f.group);
  if (f.max.empty()) {
    if (grid_spec.rfind("list:", 0) != 0)
      throw InvalidInput("--max-disc is required with a geometric grid");
    f.max = grid_spec.substr(grid_spec.rfind(',') == std::string::npos
                                 ? 5
                                 : grid_spec.rfind(',') + 1);
  }
  const SearchOptions opts = search_options(env, f, a, "max_disc");
  const auto grid = parse_grid(grid_spec, opts.bound);
  if (grid.back() > opts.bound)
    throw InvalidInput("grid exceeds --max-disc");
  env.manifest.bounds.emplace_back("grid", grid_spec);
  const auto counts = count_extensions(a, grid, opts);
  env.out << "X,N(X)\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    env.out << u128_to_string(grid[i]) << ',' << counts[i] << '\n';
  return kOk;
}

// ------------------------------------------------------------ density

CurvePredicate parse_predicate(const std::string &s) {
  if (s == "hnp")
    return CurvePredicate::Hnp;
  if (s == "hnp-fail")
    return CurvePredicate::HnpFail;
  if (s == "local")
    return CurvePredicate::Local;
  throw InvalidInput("predicate must be hnp, hnp-fail or local");
}

int cmd_density(Env &env, const SearchFlags &f, const std::string &predicate,
                const std::string &grid_spec, const std::string &place,
                const std::vector<std::string> &specs) {
  const FinAbGroup a = parse_group(f.group);
  const SearchOptions opts = search_options(env, f, a, "max_disc");
  const CurvePredicate pred = parse_predicate(predicate);
  std::vector<LocalSpec> local;
  if (pred == CurvePredicate::Local) {
    if (place.empty() || specs.empty())
      throw InvalidInput("--predicate local needs --place and --spec");
    const Int v = parse_place(place);
    for (const auto &s : specs)
      local.push_back(parse_local_spec(a, v, s));
  } else if (!specs.empty()) {
    throw InvalidInput("--spec applies to --predicate local only");
  }
  const auto grid = parse_grid(grid_spec, opts.bound);
  if (grid.back() > opts.bound)
    throw InvalidInput("grid exceeds --max-disc");
  env.manifest.bounds.emplace_back("grid", grid_spec);
  env.manifest.bounds.emplace_back("predicate", predicate);
  env.out << density_curve(a, grid, pred, local, opts).csv();
  return kOk;
}

// ------------------------------------------------------------ wood-check

LocalSpec spec_of(const LocalHom &h) {
  if (h.place == kInfinity)
    return archimedean_spec(h.value);
  return finite_spec(h.character, h.value);
}

int cmd_wood(Env &env, SearchFlags f, const std::string &place,
             const std::string &spec) {
  const FinAbGroup a = parse_group(f.group);
  const SearchOptions opts = search_options(env, f, a, "max_radical");
  const Int v = parse_place(place);
  env.manifest.bounds.emplace_back("place", place);
  env.manifest.bounds.emplace_back("spec", spec);
  const BoxMeasure m{a, {v}, std::nullopt};

  struct Row {
    std::string label;
    Frequency freq;
    Rational model;
  };
  std::vector<Row> rows;
  if (spec == "all") {
    const auto homs = local_homs(a, v);
    const auto freqs = local_frequencies(a, v, opts.bound, opts.ordering, opts.jobs);
    for (std::size_t i = 0; i < homs.size(); ++i)
      rows.push_back({format_local_hom(homs[i]), freqs[i], box_probability(m, {spec_of(homs[i])})});
  } else {
    const LocalSpec s = parse_local_spec(a, v, spec);
    rows.push_back({spec, empirical_pr(a, {s}, opts.bound, opts.ordering, opts.jobs),
                    box_probability(m, {s})});
  }
  env.out << "spec,hits,total,empirical,model,tolerance,within\n";
  int outside = 0;
  for (const auto &r : rows) {
    const double emp = r.freq.estimate();
    const double model = r.model.convert_to<double>();
    const double tol = wood_tolerance(emp, r.freq.total);
    const bool within = std::abs(emp - model) <= tol;
    outside += !within;
    env.out << r.label << ',' << r.freq.hits << ',' << r.freq.total << ',' << fixed(emp)
            << ',' << r.model << ',' << fixed(tol) << ',' << (within ? "yes" : "no") << '\n';
  }
  env.err << "wood-check: " << rows.size() - outside << " of " << rows.size()
          << " within the band\n";
  return kOk;
}

// ------------------------------------------------------------ dichotomy

LocalChar parse_base_local(const FinAbGroup &b, const std::string &s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos)
    throw InvalidInput("--base takes P:T or P:T/W");
  LocalChar psi;
  psi.p = parse_place(s.substr(0, colon));
  if (psi.p == kInfinity)
    throw InvalidInput("--base needs a finite prime");
  const std::string images = s.substr(colon + 1);
  const auto slash = images.find('/');
  psi.tame = parse_element(b, images.substr(0, slash));
  psi.wild = slash == std::string::npos ? zero_element(b)
                                        : parse_element(b, images.substr(slash + 1));
  return psi;
}

std::string spec_text(const LocalSpec &s) {
  return format_local_hom(LocalHom{s.place, s.character, s.frobenius.value_or(Element{})});
}

int cmd_dichotomy(Env &env, const std::string &group, bool split, bool force_full,
                  std::vector<std::string> base, const std::string &max,
                  const std::string &grid_spec, int jobs, bool csv) {
  if (split == force_full)
    throw InvalidInput("give exactly one of --split and --force-full");
  const FinAbGroup a = parse_group(group);
  if (a.is_trivial())
    throw InvalidInput("the trivial group has no dichotomy");
  const Int ell = smallest_prime_divisor(a);
  const FinAbGroup b = quotient_map(a, torsion(a, ell)).group;
  if (base.empty() && !b.is_trivial()) {
    if (a != canonicalize({4, 4}))
      throw InvalidInput("--base is required for groups other than 4,4");
    base = split ? std::vector<std::string>{"13:1,0", "17:0,1"}
                 : std::vector<std::string>{"5:1,0", "13:0,1"};
  }
  std::vector<LocalChar> locals;
  for (const auto &s : base)
    locals.push_back(parse_base_local(b, s));
  const FixedBaseContext ctx = make_fixed_base_context(a, make_global_char(b, locals));
  const auto specs = split ? split_specs(ctx) : forced_full_specs(ctx);
  const UInt128 x = parse_u128(max);
  const auto grid = parse_grid(grid_spec, x);
  if (jobs < 1)
    throw InvalidInput("--jobs must be positive");

  env.manifest.group = a.to_string();
  env.manifest.bounds = {{"max_twist_disc", u128_to_string(x)}, {"grid", grid_spec}};
  std::string base_text;
  for (const auto &s : base)
    base_text += (base_text.empty() ? "" : " ") + s;
  env.manifest.bounds.emplace_back("base", base_text);
  env.manifest.notes.push_back(kCountingNote);
  env.manifest.notes.push_back("thresholds bound the discriminant part away from the fixed primes");

  const DichotomyReport r = dichotomy_check(ctx, specs, grid, jobs);
  if (csv) {
    env.out << r.curve.csv();
  } else {
    Json j;
    j["group"] = a.to_string();
    j["ell"] = ctx.ell;
    j["quotient"] = ctx.base.group.to_string();
    j["mode"] = split ? "split" : "force-full";
    Json bj = Json::array();
    for (const auto &[p, psi] : ctx.base_char.locals)
      bj.push_back({{"p", p}, {"tame", element_json(psi.tame)}, {"wild", element_json(psi.wild)}});
    j["base"] = std::move(bj);
    Json sj = Json::array();
    for (const auto &s : specs)
      sj.push_back({{"p", s.place}, {"spec", spec_text(s)}});
    j["specs"] = std::move(sj);
    Json dj = Json::array();
    for (const auto &d : r.fixed_decomposition)
      dj.push_back(subgroup_json(d));
    j["fixed_decomposition"] = std::move(dj);
    j["predicted"] = r.predicted;
    j["trend"] = to_string(r.trend);
    Json cj = Json::array();
    for (std::size_t i = 0; i < r.curve.thresholds.size(); ++i) {
      Json pt;
      pt["X"] = u128_json(r.curve.thresholds[i]);
      pt["total"] = r.curve.totals[i];
      pt["hits"] = r.curve.hits[i];
      pt["ratio"] = r.curve.totals[i] ? Json(r.curve.ratio(i)) : Json(nullptr);
      cj.push_back(std::move(pt));
    }
    j["curve"] = std::move(cj);
    env.out << j.dump(2) << '\n';
  }
  env.err << "dichotomy: predicted " << r.predicted << ", " << r.curve.totals.back()
          << " twists, trend " << to_string(r.trend) << '\n';
  return kOk;
}

void emit_manifest(Env &env, const std::string &path, const std::string &out_path) {
  std::string target = path;
  if (target.empty() && !out_path.empty())
    target = out_path + ".manifest.json";
  if (target.empty()) {
    env.err << env.manifest.to_json().dump() << '\n';
    return;
  }
  std::ofstream m(target);
  m << env.manifest.to_json().dump(2) << '\n';
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Hasse norm principle for abelian number fields: criterion, "
               "enumeration and densities",
               args.empty() ? "hnpden" : args[0]};
  app.require_subcommand(1);
  std::string manifest_path;
  app.add_option("--manifest", manifest_path, "write the run manifest here instead of stderr");

  std::string group_spec, family_path, grid_spec = "geometric:10", out_path;
  std::string predicate = "hnp", place, max = "1e30";
  std::vector<std::string> specs, base;
  std::string spec = "all";
  Int bound = 200, max_bound = 200;
  std::size_t max_records = 0;
  bool split = false, force_full = false, csv = false;
  SearchFlags sf;

  auto *group = app.add_subcommand("group", "structure of A and the limit verdict");
  group->add_option("spec", group_spec, "invariant factors, e.g. 2,2")->required();

  auto *hnp = app.add_subcommand("hnp", "decide HNP from decomposition groups");
  hnp->add_option("spec", group_spec, "the group A")->required();
  hnp->add_option("file", family_path, "JSON list of subgroups given by generators")
      ->required();

  auto *verify = app.add_subcommand("verify", "structural checks for all groups up to a bound");
  verify->add_option("--bound", bound, "largest order")->capture_default_str();
  verify->add_option("--max-bound", max_bound, "resource cap on the order")
      ->capture_default_str();

  const auto search_flags = [&](CLI::App *c, const char *max_flag) {
    c->add_option("--group", sf.group, "the group A")->required();
    c->add_option(max_flag, sf.max, "bound on the counting function");
    c->add_option("--ordering", sf.ordering, "disc or radical")->capture_default_str();
    c->add_option("--jobs", sf.jobs, "worker threads")->capture_default_str();
  };

  auto *enumerate = app.add_subcommand("enumerate", "A-extensions as JSON lines");
  search_flags(enumerate, "--max-disc");
  enumerate->get_option("--max-disc")->required();
  enumerate->add_flag("--include-etale", sf.include_etale, "also non-surjective characters");
  enumerate->add_option("--out", out_path, "write records to a file");
  enumerate->add_option("--max-records", max_records, "record cap (0 for none)");

  auto *counts = app.add_subcommand("counts", "N(X) on a grid as CSV");
  search_flags(counts, "--max-disc");
  counts->add_flag("--include-etale", sf.include_etale, "also non-surjective characters");
  counts->add_option("--grid", grid_spec, "geometric:R or list:X1,X2,...")
      ->capture_default_str();

  auto *density = app.add_subcommand("density", "density curve as CSV");
  search_flags(density, "--max-disc");
  density->get_option("--max-disc")->required();
  density->add_option("--predicate", predicate, "hnp, hnp-fail or local")
      ->capture_default_str();
  density->add_option("--grid", grid_spec, "geometric:R or list:X1,X2,...")
      ->capture_default_str();
  density->add_option("--place", place, "place of the local predicate");
  density->add_option("--spec", specs, "local spec of the local predicate");

  auto *wood = app.add_subcommand("wood-check", "local frequencies against the model");
  std::string wood_ordering = "radical";
  wood->add_option("--group", sf.group, "the group A")->required();
  wood->add_option("--max-radical", sf.max, "bound on the counting function")->required();
  wood->add_option("--ordering", wood_ordering, "radical or disc")->capture_default_str();
  wood->add_option("--jobs", sf.jobs, "worker threads")->capture_default_str();
  wood->add_option("--place", place, "a prime or inf")->required();
  wood->add_option("--spec", spec, "a local spec, or all")->capture_default_str();

  std::string dgroup;
  int djobs = 1;
  auto *dichotomy = app.add_subcommand("dichotomy", "restricted HNP ratio over a fixed base");
  dichotomy->add_option("--group", dgroup, "the group A")->required();
  dichotomy->add_flag("--split", split, "smallest decomposition groups on the fixed primes");
  dichotomy->add_flag("--force-full", force_full,
                      "a full decomposition group at one fixed prime");
  dichotomy->add_option("--base", base, "base character P:T[/W] valued in A/A[ell]");
  dichotomy->add_option("--max-disc", max, "bound on the twist discriminant")
      ->capture_default_str();
  dichotomy->add_option("--grid", grid_spec, "geometric:R or list:X1,X2,...")
      ->capture_default_str();
  dichotomy->add_option("--jobs", djobs, "worker threads")->capture_default_str();
  dichotomy->add_flag("--csv", csv, "print the curve as CSV");

  std::vector<const char *> argv;
  for (const auto &a : args)
    argv.push_back(a.c_str());
  if (argv.empty())
    argv.push_back("hnpden");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return kUsage;
  }

  Env env{out, err, {}};
  env.manifest.command_line = args;
  env.manifest.version = kToolVersion;
  const auto start = std::chrono::steady_clock::now();
  int status = kOk;
  try {
    if (*group)
      status = cmd_group(env, group_spec);
    else if (*hnp)
      status = cmd_hnp(env, group_spec, family_path);
    else if (*verify)
      status = cmd_verify(env, bound, max_bound);
    else if (*enumerate)
      status = cmd_enumerate(env, sf, out_path, max_records);
    else if (*counts)
      status = cmd_counts(env, sf, grid_spec);
    else if (*density)
      status = cmd_density(env, sf, predicate, grid_spec, place, specs);
    else if (*wood) {
      sf.ordering = wood_ordering;
      status = cmd_wood(env, sf, place, spec);
    }    else if (*dichotomy)
      status = cmd_dichotomy(env, dgroup, split, force_full, base, max, grid_spec, djobs, csv);
  } catch (const InvalidInput &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const PreconditionError &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UndefinedRatio &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ResourceError &e) {
    err << "resource cap: " << e.what() << '\n';
    return kResource;
  }
  env.manifest.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit_manifest(env, manifest_path, out_path);
  return status;
}

} // namespace hnp::cli
