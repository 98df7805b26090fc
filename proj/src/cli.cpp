#include "hamkac/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "hamkac/digest.hpp"
#include "hamkac/l0rep.hpp"
#include "hamkac/repkit.hpp"

namespace hamkac {

namespace {

using ojson = nlohmann::ordered_json;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

template <class Int>
Int parse_int(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
    throw ConfigError(what + ": not an integer: '" + s + "'");
  return v;
}

std::set<std::string> parse_checks(const std::string& csv) {
  std::set<std::string> out;
  for (const auto& raw : split(csv, ',')) {
    const std::string c = trim(raw);
    if (c == "all") {
      out.insert(kCheckNames.begin(), kCheckNames.end());
    } else if (std::find(kCheckNames.begin(), kCheckNames.end(), c) != kCheckNames.end()) {
      out.insert(c);
    } else {
      throw ConfigError("unknown check '" + c + "'");
    }
  }
  if (out.empty()) throw ConfigError("no checks requested");
  return out;
}

std::vector<Residue> lambda_range(const JobConfig& c) {
  if (c.lambdas) return *c.lambdas;
  std::vector<Residue> all(c.p);
  for (Residue l = 0; l < c.p; ++l) all[l] = l;
  return all;
}

bool wants(const JobConfig& c, const char* name) { return c.checks.count(name) > 0; }

ojson element_json(const HamAlgebra& g, std::size_t i) {
  const Monomial& m = g.label(i);
  return ojson::array({m.i1, m.i2, m.j});
}

std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

}  // namespace

// ---------------------------------------------------------------- parsing

ParseOutcome parse_args(int argc, const char* const* argv) {
  ParseOutcome res;
  JobConfig c;
  std::string t = "1,1", chi = "I", lambda = "all", checks = "classify", mode = "sampled";
  std::string cache, out;

  CLI::App app{"Builds H(2,1;t) and its Kac modules over F_p and verifies them."};
  app.set_config("--config", "", "flat key = value file; flags on the command line win");
  app.add_option("--p", c.p, "field characteristic, prime > 3");
  app.add_option("--t", t, "truncation exponents A,B");
  app.add_option("--chi", chi, "comma-separated: I, II, III, custom:key=val;...");
  app.add_option("--lambda", lambda, "all, or a comma-separated list");
  app.add_option("--checks", checks, "all, or CSV of " + [] {
    std::string s;
    for (const auto& n : kCheckNames) s += (s.empty() ? "" : ",") + n;
    return s;
  }());
  app.add_option("--mode", mode, "module law coverage: full or sampled");
  app.add_option("--samples", c.samples, "pairs per module in sampled mode");
  app.add_option("--seed", c.seed, "root seed; subsystem seeds are derived from it");
  app.add_option("--cache", cache, "cache directory (HAMKAC_CACHE overrides)");
  app.add_option("--out", out, "report file, or a directory for report-<hash>.json");
  app.add_flag("--json", c.json, "print the JSON report instead of the table");
  app.add_option("--workers", c.workers, "OpenMP threads for the cell pool");
  app.add_flag("--allow-any-height", c.allow_any_height, "accept characters of nonzero height");
  app.add_flag("--timings", c.timings, "record elapsed_ms per cell (breaks byte-identity)");

  std::ostringstream sout, serr;
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, sout, serr);
    res.exit_code = code == 0 ? 0 : 2;
    res.message = sout.str() + serr.str();
    return res;
  }

  try {
    const auto tv = split(t, ',');
    if (tv.size() != 2) throw ConfigError("--t expects A,B");
    c.t1 = parse_int<std::uint32_t>(tv[0], "--t");
    c.t2 = parse_int<std::uint32_t>(tv[1], "--t");
    c.chi.clear();
    if (trim(chi) == "all") {
      c.chi = {"I", "II", "III"};
    } else {
      for (const auto& s : split(chi, ',')) c.chi.push_back(trim(s));
    }
    if (trim(lambda) != "all") {
      std::vector<Residue> ls;
      for (const auto& s : split(lambda, ',')) ls.push_back(parse_int<Residue>(s, "--lambda"));
      c.lambdas = ls;
    }
    c.checks = parse_checks(checks);
    if (mode == "full") c.mode = LawMode::Full;
    else if (mode == "sampled") c.mode = LawMode::Sampled;
    else throw ConfigError("--mode must be full or sampled");
    if (const char* env = std::getenv("HAMKAC_CACHE"); env && *env) cache = env;
    if (!cache.empty()) c.cache = cache;
    if (!out.empty()) c.out = out;
    validate(c);
  } catch (const ConfigError& e) {
    res.exit_code = 2;
    res.message = std::string("error: ") + e.what() + "\n";
    return res;
  }
  res.config = c;
  return res;
}

void validate(const JobConfig& c) {
  if (c.p <= 3 || !is_prime(c.p)) throw ConfigError("p must be prime > 3");
  if (c.t1 < 1 || c.t2 < 1) throw ConfigError("t1, t2 must be >= 1");
  try {
    Shape s(c.p, c.t1, c.t2);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.lambdas) {
    for (auto l : *c.lambdas)
      if (l >= c.p) throw ConfigError("lambda " + std::to_string(l) + " not in [0, p)");
  }
  if (c.chi.empty()) throw ConfigError("no character given");
  for (const auto& s : c.chi)
    if (s != "I" && s != "II" && s != "III" && s.rfind("custom:", 0) != 0)
      throw ConfigError("unknown character '" + s + "'");
  for (const auto& k : c.checks)
    if (std::find(kCheckNames.begin(), kCheckNames.end(), k) == kCheckNames.end())
      throw ConfigError("unknown check '" + k + "'");
  if (c.samples == 0) throw ConfigError("--samples must be positive");
  if (c.workers < 0) throw ConfigError("--workers must be >= 0");
}

Character parse_character(const HamAlgebra& g, const std::string& spec) {
  if (spec == "I") return make_character(g, ChiType::I);
  if (spec == "II") return make_character(g, ChiType::II);
  if (spec == "III") return make_character(g, ChiType::III);
  if (spec.rfind("custom:", 0) != 0) throw ConfigError("unknown character '" + spec + "'");
  const PrimeField& F = g.field();
  std::map<std::size_t, Residue> values;
  for (const auto& raw : split(spec.substr(7), ';')) {
    const std::string item = trim(raw);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("custom character: expected key=value in '" + item + "'");
    const std::string key = trim(item.substr(0, eq));
    Residue v = F.reduce(parse_int<std::int64_t>(item.substr(eq + 1), "custom character"));
    Monomial m;
    // Keys name the abbreviations; stored values are on the D_H basis.
    if (key == "h") m = {1, 1, 0};
    else if (key == "e") m = {0, 2, 0}, v = F.neg(v);
    else if (key == "f") m = {2, 0, 0};
    else if (key == "D1") m = {0, 1, 0}, v = F.neg(v);
    else if (key == "D2") m = {1, 0, 0};
    else if (key.size() > 1 && key[0] == 'x' && key.find('_') != std::string::npos) {
      const auto us = key.find('_');
      m = {parse_int<std::uint32_t>(key.substr(1, us - 1), "custom character key"),
           parse_int<std::uint32_t>(key.substr(us + 1), "custom character key"), 0};
    } else {
      throw ConfigError("custom character: unknown key '" + key + "'");
    }
    const auto idx = g.index_of(m);
    if (!idx) throw ConfigError("custom character: '" + key + "' is not a basis element");
    values[*idx] = F.add(values[*idx], v);
  }
  try {
    return custom_character(g, values);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ojson config_json(const JobConfig& c) {
  ojson j;
  j["p"] = c.p;
  j["t"] = {c.t1, c.t2};
  j["chi"] = c.chi;
  if (c.lambdas) j["lambda"] = *c.lambdas;
  else j["lambda"] = "all";
  j["checks"] = std::vector<std::string>(c.checks.begin(), c.checks.end());
  j["mode"] = c.mode == LawMode::Full ? "full" : "sampled";
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["allow_any_height"] = c.allow_any_height;
  j["timings"] = c.timings;
  return j;
}

std::string config_hash(const JobConfig& c) { return sha256_hex(config_json(c).dump()); }

// ---------------------------------------------------------------- pipeline

RunResult run(const JobConfig& c) {
  RunResult r;
  std::ostringstream txt;
  const auto fail_config = [&](const std::string& msg) {
    r.exit_code = 2;
    r.report = ojson{{"error", msg}};
    r.summary = "error: " + msg + "\n";
    return r;
  };
  try {
    validate(c);
  } catch (const ConfigError& e) {
    return fail_config(e.what());
  }
  if (c.workers > 0) omp_set_num_threads(c.workers);

  const Shape shape(c.p, c.t1, c.t2);
  const HamAlgebra g = load_or_build(shape, c.cache);
  std::vector<Character> chis;
  try {
    for (const auto& s : c.chi) {
      chis.push_back(parse_character(g, s));
      const int h = height(chis.back(), g);
      if (h != 0 && !c.allow_any_height)
        throw ConfigError("character '" + s + "' has height " + std::to_string(h) +
                          ", expected 0 (pass --allow-any-height)");
    }
  } catch (const ConfigError& e) {
    return fail_config(e.what());
  }
  const std::vector<Residue> lambdas = lambda_range(c);

  std::vector<std::string> failures;
  ojson& rep = r.report;
  rep["tool"] = "hamkac";
  rep["report_version"] = 1;
  rep["config"] = config_json(c);
  rep["config_hash"] = config_hash(c);

  const std::uint64_t expected_dim = 2ull * shape.n1() * shape.n2() - 1;
  rep["algebra"] = {{"dim", g.dim()},
                    {"expected_dim", expected_dim},
                    {"min_grade", g.min_grade()},
                    {"max_grade", g.max_grade()},
                    {"stated_max_grade", g.stated_max_grade()},
                    {"grading_bound_matches", g.stated_max_grade() == g.max_grade()}};
  txt << "H(2,1;(" << c.t1 << "," << c.t2 << ")) over F_" << c.p << ": dim " << g.dim()
      << ", grades " << g.min_grade() << ".." << g.max_grade() << " (stated upper bound "
      << g.stated_max_grade() << ")\n";
  if (g.dim() != expected_dim) failures.push_back("algebra dimension");
  rep["notes"] = ojson::array(
      {"grading uses the enumerated bound p^t1+p^t2-3; the stated p^(t1+t2)-3 is reported "
       "as stated_max_grade",
       "the source text announces two character types and lists three; all three are run"});

  ojson checks = ojson::object();

  if (wants(c, "jacobi")) {
    const JacobiReport jr = c.mode == LawMode::Full
                                ? check_jacobi(g.structure_constants())
                                : check_jacobi_sampled(g.structure_constants(), 20000,
                                                       labeled_seed(c.seed, "jacobi"));
    ojson j{{"ok", jr.ok()}, {"triples_checked", jr.triples_checked}, {"failures", jr.failures}};
    if (jr.first_failure)
      j["witness"] = {jr.first_failure->x, jr.first_failure->y, jr.first_failure->z};
    checks["jacobi"] = j;
    txt << "jacobi: " << (jr.ok() ? "ok" : "FAIL") << " (" << jr.triples_checked
        << " triples)\n";
    if (!jr.ok()) failures.push_back("jacobi");
  }

  if (wants(c, "gr")) {
    const GRReport gr = verify_gr(g);
    ojson j{{"ok", gr.ok}, {"checked", gr.checked}, {"exponents", gr.structure.exponents}};
    if (gr.counterexample)
      j["witness"] = {{"element", element_json(g, gr.counterexample->first)},
                      {"vector", element_json(g, gr.counterexample->second)}};
    checks["gr"] = j;
    txt << "gr: " << (gr.ok ? "ok" : "FAIL") << " (" << gr.checked << " even basis elements)\n";
    if (!gr.ok) failures.push_back("gr");
  }

  if (wants(c, "osp")) {
    const OspReport o = verify_osp(g);
    ojson rels = ojson::array();
    for (const auto& rel : o.relations)
      rels.push_back({{"relation", rel.name}, {"ok", rel.ok}, {"computed", rel.actual}});
    checks["osp"] = {{"ok", o.ok()},
                     {"literal_ok", o.literal_ok()},
                     {"relations", rels},
                     {"literal_table_jacobi_failures", o.literal_jacobi_failures},
                     {"realization_ok", o.realization_ok()},
                     {"realization_pairs", o.realization_pairs},
                     {"realization_failures", o.realization_failures},
                     {"zero_component_dim", o.zero_component_dim},
                     {"span_rank", o.span_rank}};
    txt << "osp: literal relations " << (o.literal_ok() ? "ok" : "FAIL");
    for (const auto& rel : o.relations)
      if (!rel.ok) txt << " [" << rel.name << " computed " << rel.actual << "]";
    txt << "; matrix realization " << (o.realization_ok() ? "ok" : "FAIL") << " ("
        << o.realization_pairs - o.realization_failures << "/" << o.realization_pairs
        << "); dim g_[0] = " << o.zero_component_dim << "\n";
    if (!o.ok()) failures.push_back("osp");
  }

  if (wants(c, "l0")) {
    ojson rows = ojson::array();
    bool all_ok = true;
    for (auto l : lambdas) {
      const L0Module L = build_l0(g.field(), l);
      const L0Report lr = check_l0(L, g);
      const std::size_t want = l == 0 ? 1 : 2 * l + 1;
      const bool ok = lr.ok() && L.dim() == want;
      all_ok = all_ok && ok;
      ojson row{{"lambda", l},         {"dim", L.dim()},         {"expected_dim", want},
                {"ok", ok},            {"pairs_checked", lr.pairs_checked},
                {"simple", lr.simple}, {"endo_dim", lr.endo_dim}};
      if (lr.failing_pair)
        row["witness"] = {kOspNames[static_cast<int>(lr.failing_pair->first)],
                          kOspNames[static_cast<int>(lr.failing_pair->second)]};
      rows.push_back(row);
    }
    checks["l0"] = {{"ok", all_ok}, {"modules", rows}};
    txt << "l0: " << (all_ok ? "ok" : "FAIL") << " (" << lambdas.size() << " modules)\n";
    if (!all_ok) failures.push_back("l0");
  }
  rep["checks"] = checks;

  const bool kac = wants(c, "law") || wants(c, "chi_reduced") || wants(c, "meataxe") ||
                   wants(c, "hom") || wants(c, "classify");
  if (kac) {
    ClassificationOptions opt;
    opt.law_mode = c.mode;
    opt.law_samples = c.samples;
    opt.run_meataxe = wants(c, "meataxe") || wants(c, "classify");
    opt.run_hom = wants(c, "hom") || wants(c, "classify");
    opt.seed = c.seed;
    opt.timings = c.timings;
    opt.cache_dir = c.cache;
    const ClassificationReport cr = classify(g, chis, lambdas, opt);

    ojson rows = ojson::array();
    txt << "\n" << pad("chi", 8) << pad("lambda", 8) << pad("dim", 8) << pad("law", 6)
        << pad("chi-red", 9) << pad("irred", 7) << pad("End", 6) << "note\n";
    for (const auto& row : cr.rows) {
      rows.push_back({{"chi_type", row.chi_type},
                      {"lambda", row.lambda},
                      {"dim", row.dim},
                      {"irreducible", row.irreducible},
                      {"endo_dim", row.endo_dim},
                      {"weight_signature", row.weight_signature},
                      {"meataxe_seed", row.meataxe_seed},
                      {"elapsed_ms", row.elapsed_ms},
                      {"expected_dim", row.expected_dim},
                      {"height", row.height},
                      {"module_law", row.module_law},
                      {"chi_reduced", row.chi_reduced},
                      {"endo_dim_odd", row.endo_dim_odd},
                      {"witness", row.witness}});
      txt << pad(row.chi_type, 8) << pad(std::to_string(row.lambda), 8)
          << pad(std::to_string(row.dim), 8) << pad(row.module_law ? "ok" : "FAIL", 6)
          << pad(row.chi_reduced ? "ok" : "FAIL", 9)
          << pad(opt.run_meataxe ? (row.irreducible ? "yes" : "no") : "-", 7)
          << pad(opt.run_meataxe ? std::to_string(row.endo_dim) + "+" +
                                       std::to_string(row.endo_dim_odd)
                                 : "-",
                 6)
          << row.witness << "\n";
    }
    ojson homs = ojson::array();
    for (const auto& h : cr.hom_checks) {
      homs.push_back({{"chi_type", h.chi_type},
                      {"lambda", h.lambda},
                      {"mu", h.mu},
                      {"even", h.dims.even},
                      {"odd", h.dims.odd},
                      {"refused", h.refused}});
      txt << "hom " << h.chi_type << " K(" << h.lambda << ") -> K(" << h.mu << "): "
          << (h.refused ? "over budget" : std::to_string(h.dims.even) + " even + " +
                                              std::to_string(h.dims.odd) + " odd")
          << "\n";
    }
    rep["classification"] = {{"ok", cr.ok},
                             {"failing_cell", cr.failing_cell},
                             {"dims_distinct", cr.dims_distinct},
                             {"rows", rows},
                             {"hom", homs}};
    if (!cr.ok) failures.push_back("classification: " + cr.failing_cell);
  }

  rep["passed"] = failures.empty();
  rep["failures"] = failures;
  r.exit_code = failures.empty() ? 0 : 1;
  txt << "\n" << (failures.empty() ? "all requested checks passed" : "FAILED:");
  for (const auto& f : failures) txt << " " << f << ";";
  txt << "\n";

  std::filesystem::path path = c.out.value_or(".");
  if (std::filesystem::is_directory(path))
    path /= "report-" + config_hash(c).substr(0, 16) + ".json";
  if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
  {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << rep.dump(2) << '\n';
  }
  r.report_path = path;
  txt << "report: " << path.string() << "\n";
  r.summary = txt.str();
  return r;
}

}  // namespace hamkac
