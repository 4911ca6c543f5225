#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "germlab/endoscopy.hpp"
#include "germlab/experiments.hpp"
#include "germlab/parallel.hpp"
#include "germlab/presburger.hpp"
#include "germlab/rootdata.hpp"
#include "germlab/sl2germs.hpp"
#include "germlab/toml_lite.hpp"

using namespace germlab;
using nlohmann::json;

namespace {

constexpr int kPass = 0;
constexpr int kDisagree = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  int p = 5;
  std::string field = "qp";
  int depth = 3;
  int k = 5;
  int a0 = 2;
  int a_span = 3;
  std::optional<std::uint64_t> seed;
  std::string out;
  int workers = 0;
  // Command specific.
  int samples = 20;
  std::string tau = "u";
  bool negative_control = false;
  std::string type = "A1";
  std::string toml;
  bool rectangles = false;
  std::vector<std::string> expressions;
  int q = 5;
  int scan = 500;
};

// Config file values first; flags given on the command line win.
void apply_json(Config& c, const json& j) {
  static const std::set<std::string> known = {"p", "field", "depth", "k", "a0", "a_span", "seed", "out",
                                              "workers", "samples", "tau", "negative_control", "type", "toml",
                                              "rectangles", "expressions", "q", "scan", "command"};
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw UsageError("unknown config key: " + key);
  try {
    if (j.contains("p")) c.p = j["p"].get<int>();
    if (j.contains("field")) c.field = j["field"].get<std::string>();
    if (j.contains("depth")) c.depth = j["depth"].get<int>();
    if (j.contains("k")) c.k = j["k"].get<int>();
    if (j.contains("a0")) c.a0 = j["a0"].get<int>();
    if (j.contains("a_span")) c.a_span = j["a_span"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
    if (j.contains("samples")) c.samples = j["samples"].get<int>();
    if (j.contains("tau")) c.tau = j["tau"].get<std::string>();
    if (j.contains("negative_control")) c.negative_control = j["negative_control"].get<bool>();
    if (j.contains("type")) c.type = j["type"].get<std::string>();
    if (j.contains("toml")) c.toml = j["toml"].get<std::string>();
    if (j.contains("rectangles")) c.rectangles = j["rectangles"].get<bool>();
    if (j.contains("expressions")) c.expressions = j["expressions"].get<std::vector<std::string>>();
    if (j.contains("q")) c.q = j["q"].get<int>();
    if (j.contains("scan")) c.scan = j["scan"].get<int>();
  } catch (const json::type_error& e) {
    throw UsageError(std::string("config type error: ") + e.what());
  }
}

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

FieldSpec field_of(const Config& c) {
  if (!is_prime(c.p) || c.p < 5) throw UsageError("--p must be a prime >= 5");
  if (c.field == "qp") return FieldSpec::mixed(c.p, 40);
  if (c.field == "fpt") return FieldSpec::equal(c.p, 40);
  throw UsageError("--field must be qp or fpt");
}

std::uint64_t need_seed(const Config& c) {
  if (!c.seed) throw UsageError("--seed is required for sampled experiments");
  return *c.seed;
}

SquareClass tau_of(const std::string& s) {
  if (s == "u") return SquareClass::NonsquareUnit;
  if (s == "pi") return SquareClass::Uniformizer;
  if (s == "upi" || s == "u*pi") return SquareClass::NonsquareUniformizer;
  throw UsageError("--tau must be u, pi or upi");
}

// Writes name into the --out directory, or to stdout without one.
void emit(const Config& c, const std::string& name, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::filesystem::create_directories(c.out);
  std::ofstream f(std::filesystem::path(c.out) / name);
  if (!f) throw UsageError("cannot write " + name + " under " + c.out);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

void verdict(const std::string& line) { std::cerr << line << '\n'; }

int run_orbits(const Config& c) {
  FieldSpec field = field_of(c);
  std::string csv = "label,a,b,c,square_class\n";
  for (const auto& o : nilpotent_orbit_reps(field))
    csv += o.label + "," + o.rep.a.to_string() + "," + o.rep.b.to_string() + "," + o.rep.c.to_string() + "," +
           (o.cls ? to_string(*o.cls) : "zero") + "\n";
  emit(c, "orbits.csv", csv);
  ConjugationSearch search = nilpotent_conjugation_search(field, c.depth, c.seed.value_or(1));
  long bound = nilpotent_class_bound(root_datum("A1"), c.p);
  bool ok = static_cast<long>(search.classes) == bound;
  verdict("orbits: " + std::to_string(search.classes) + " classes from " + std::to_string(search.elements) +
          " sampled nilpotents, bound " + std::to_string(bound) + (ok ? " (agree)" : " (DISAGREE)"));
  return ok ? kPass : kDisagree;
}

int run_theta(const Config& c) {
  FieldSpec field = field_of(c);
  BarbaschMoyTuple t = barbasch_moy_tuple(c.k, field, c.depth);
  if (t.empty()) throw UsageError("--k must be in 1..5");
  ThetaMatrix th = theta_matrix(t, c.depth);
  if (!th.stable) throw PrecisionError("Theta entries not stable at this depth");
  emit(c, "theta.csv", th.to_csv());
  if (!c.out.empty()) {
    json j = th.to_json();
    j["tuple"] = t.to_json();
    emit(c, "theta.json", j.dump(2));
  }
  bool ok = th.upper_triangular && th.det != 0;
  verdict("theta: det " + to_string(th.det) + ", " + (th.upper_triangular ? "upper triangular" : "NOT triangular"));
  return ok ? kPass : kDisagree;
}

int run_germs(const Config& c) {
  FieldSpec field = field_of(c);
  std::uint64_t seed = need_seed(c);
  BarbaschMoyTuple t = barbasch_moy_tuple(c.k, field, c.depth);
  if (t.empty()) throw UsageError("--k must be in 1..5");
  ThetaMatrix th = theta_matrix(t, c.depth);
  GermTable table;
  table.det = th.det;
  table.a = c.a0;
  auto xs = sample_regular_semisimple(field, c.a0, c.a_span, c.samples, seed);
  table.rows.resize(xs.size(), GermRow{CharPoint{LocalElement::zero(field)}, {}, {}, {}, false, false});
  parallel_for(xs.size(), [&](std::size_t i) { table.rows[i] = shalika_germs(xs[i], t, th, c.depth); });
  std::size_t failures = 0;
  for (const auto& r : table.rows) {
    if (!r.stable) throw PrecisionError("orbital integral not stable at this depth");
    if (!r.identity_holds) ++failures;
  }
  emit(c, "germs.csv", table.to_csv());
  verdict("germs: " + std::to_string(table.rows.size() - failures) + "/" + std::to_string(table.rows.size()) +
          " rows satisfy the germ expansion");
  return failures == 0 ? kPass : kDisagree;
}

int run_kappa_match(const Config& c) {
  FieldSpec field = field_of(c);
  MatchingOptions opts;
  opts.seed = need_seed(c);
  opts.delta.wrong_sign = c.negative_control;
  EndoscopicDatum datum = EndoscopicDatum::elliptic(tau_of(c.tau));
  BarbaschMoyTuple t = barbasch_moy_tuple(c.k, field, c.depth);
  if (t.empty()) throw UsageError("--k must be in 1..5");
  MatchingReport rep = local_matching_check(t.pairs, datum, field, c.a0, c.a_span, c.depth, opts);
  emit(c, "matching.json", rep.to_json().dump(2));
  verdict(std::string("kappa-match: ") + (rep.success ? "match found" : "NO MATCH") + " for " + datum.name() +
          (c.negative_control ? " (negative control)" : ""));
  return rep.success ? kPass : kDisagree;
}

int run_ak_compare(const Config& c) {
  field_of(c);
  AkReport rep = ak_regression_family(c.p, c.depth);
  for (const auto& e : rep.entries)
    if (!e.stable) throw PrecisionError("expression not stable at this depth: " + e.name);
  emit(c, "ak_compare.csv", rep.to_csv());
  if (!c.out.empty()) emit(c, "ak_compare.json", rep.to_json().dump(2));
  verdict(std::string("ak-compare: ") + (rep.agree ? "agree" : "DISAGREE") + " at p = " + std::to_string(c.p));
  return rep.agree ? kPass : kDisagree;
}

int run_presburger(const Config& c) {
  if (c.expressions.empty()) throw UsageError("presburger needs at least one --expr");
  if (c.q < 2) throw UsageError("--q must be >= 2");
  json out = json::array();
  bool ok = true;
  for (const auto& text : c.expressions) {
    ExpPoly f;
    try {
      f = parse_exppoly(text);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("cannot parse ") + text + ": " + e.what());
    }
    bool ev = is_eventually_zero(PiecewiseExpPoly::on(PresburgerPiece::ray(0), f));
    json row = {{"expr", text}, {"canonical", f.to_string()}, {"q", c.q}, {"eventually_zero", ev}};
    std::vector<long> zeros = zero_set_bounded(f, c.q, 0, c.scan);
    row["zero_count"] = zeros.size();
    if (!ev) row["zeros_in_scan"] = zeros;
    if (!ev) {
      long a0 = uniform_tail_bound(f, c.q);
      std::vector<long> tail = zero_set_bounded(f, c.q, a0, a0 + c.scan);
      row["tail_bound"] = a0;
      row["tail_zeros"] = tail;
      ok = ok && tail.empty();
    } else {
      ok = ok && static_cast<long>(zeros.size()) == c.scan + 1;
    }
    out.push_back(row);
  }
  emit(c, "presburger.json", out.dump(2));
  verdict(std::string("presburger: ") + (ok ? "tail bounds confirmed" : "DISAGREE"));
  return ok ? kPass : kDisagree;
}

int run_parahorics(const Config& c) {
  FixedChoices fc = c.toml.empty() ? split_fixed_choices({c.type}) : load_fixed_choices(std::filesystem::path(c.toml));
  fc.validate();
  ParahoricIndexSet s = parahoric_index_set(fc, c.rectangles);
  json j = s.to_json();
  j["count"] = s.f.size();
  emit(c, "parahorics.json", j.dump(2));
  verdict("parahorics: |S| = " + std::to_string(s.s.size()) + ", |F| = " + std::to_string(s.f.size()));
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"germlab: Shalika germs and rank-1 endoscopy for sl2 over local fields"};
  app.require_subcommand(1);
  Config flags;
  std::string config_path;
  std::optional<int> p, depth, k, a0, a_span, workers, samples, q, scan;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> field, out, tau, type, toml;
  std::vector<std::string> exprs;
  bool negative = false, rectangles = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--p", p, "residue characteristic");
    sub->add_option("--field", field, "qp or fpt")->check(CLI::IsMember({"qp", "fpt"}));
    sub->add_option("--depth", depth, "digit depth")->check(CLI::PositiveNumber);
    sub->add_option("--k", k, "length of the Barbasch-Moy tuple")->check(CLI::Range(1, 5));
    sub->add_option("--a0", a0, "first truncation level");
    sub->add_option("--a-span", a_span, "truncation levels after a0")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "sampling seed");
    sub->add_option("--out", out, "output directory (stdout if absent)");
    sub->add_option("--workers", workers, "worker threads (default GERMLAB_WORKERS)")->check(CLI::PositiveNumber);
  };
  CLI::App* orbits = app.add_subcommand("orbits", "nilpotent orbits and the conjugation search");
  CLI::App* theta = app.add_subcommand("theta", "Theta matrix of the Barbasch-Moy tuple");
  CLI::App* germs = app.add_subcommand("germs", "Shalika germ table at sampled regular X");
  CLI::App* kappa = app.add_subcommand("kappa-match", "rank-1 local matching for an elliptic datum");
  CLI::App* ak = app.add_subcommand("ak-compare", "regression family over Q_p and F_p((t))");
  CLI::App* pres = app.add_subcommand("presburger", "tail logic of exponential polynomials");
  CLI::App* para = app.add_subcommand("parahorics", "parahoric index set");
  for (CLI::App* s : {orbits, theta, germs, kappa, ak, pres, para}) common(s);
  germs->add_option("--samples", samples, "samples per square class")->check(CLI::PositiveNumber);
  kappa->add_option("--tau", tau, "nonsquare class: u, pi or upi");
  kappa->add_flag("--negative-control", negative, "perturb Delta by a non-invariant sign");
  pres->add_option("--expr", exprs, "exponential polynomial in t and q, repeatable");
  pres->add_option("--q", q, "value of q");
  pres->add_option("--scan", scan, "length of the brute-force scan");
  para->add_option("--type", type, "split type, e.g. A1 or A1xA1");
  para->add_option("--toml", toml, "fixed choices file")->check(CLI::ExistingFile);
  para->add_flag("--rectangles", rectangles, "only product subsets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    Config c;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      json j;
      try {
        j = json::parse(f);
      } catch (const json::parse_error& e) {
        throw UsageError(std::string("config is not valid JSON: ") + e.what());
      }
      apply_json(c, j);
    }
    if (p) c.p = *p;
    if (field) c.field = *field;
    if (depth) c.depth = *depth;
    if (k) c.k = *k;
    if (a0) c.a0 = *a0;
    if (a_span) c.a_span = *a_span;
    if (seed) c.seed = *seed;
    if (out) c.out = *out;
    if (workers) c.workers = *workers;
    if (samples) c.samples = *samples;
    if (tau) c.tau = *tau;
    if (negative) c.negative_control = true;
    if (type) c.type = *type;
    if (toml) c.toml = *toml;
    if (rectangles) c.rectangles = true;
    if (!exprs.empty()) c.expressions = exprs;
    if (q) c.q = *q;
    if (scan) c.scan = *scan;
    if (c.workers > 0) set_worker_count(c.workers);

    if (*orbits) return run_orbits(c);
    if (*theta) return run_theta(c);
    if (*germs) return run_germs(c);
    if (*kappa) return run_kappa_match(c);
    if (*ak) return run_ak_compare(c);
    if (*pres) return run_presburger(c);
    if (*para) return run_parahorics(c);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const PrecisionError& e) {
    std::cerr << "unstable: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "unsupported input: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "degenerate input: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
