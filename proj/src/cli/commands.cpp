#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "normalis/cli.hpp"
#include "normalis/disintegration.hpp"
#include "normalis/error.hpp"
#include "normalis/fourier.hpp"
#include "normalis/normality.hpp"
#include "normalis/parallel.hpp"
#include "normalis/precision.hpp"

namespace normalis::cli {

namespace {

constexpr std::uint64_t kAutoIndex = std::numeric_limits<std::uint64_t>::max();

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> format;
  std::optional<long> precision_cap;
  bool no_timing = false;

  long n = 10;
  std::size_t depth = 0;
  double alpha = 0.01;
  int max_m = 4;
  bool corrupt = false;
  std::string word;
  std::uint64_t omega_index = kAutoIndex;
  std::size_t prefix = 20;

  std::string poly;
  std::string lambda;
  std::string lambda_poly;
  long base = 0;
  long bound = 64;
  unsigned long max_l = 10000;

  std::string xi = "1";
  double err = 1e-12;
  long bits = 0;
  long nmax = 40;
  bool control = false;
  std::size_t trials = 100;
  double lambda_value = 0.5;

  long l = 1;
  std::size_t lag = 0;
  std::size_t ndigits = 1000;
  std::size_t points = 1;
  int k = 1;
  std::string plot_csv;
  std::string frame = "normalized";
};

struct Binder {
  std::string top;
  std::string name;
  CLI::App* owner;
  CLI::Option* option;
  std::function<void(const Json&)> assign;
};

struct Context {
  RunConfig cfg;
  Options& o;
  std::string top;
  std::string action;
  unsigned workers = 1;
};

using Command = std::function<void(Context&, RunReport&)>;

std::string option_name(const std::string& flag) {
  std::string s = flag.substr(flag.find_first_not_of('-'));
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<long> parse_long_list(const std::string& text, const std::string& what) {
  std::vector<long> out;
  for (const auto& item : split(text, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stol(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(what + ": '" + item + "' is not an integer");
    }
  }
  if (out.empty()) throw InputError(what + " is empty");
  return out;
}

std::string join_digits(const std::vector<std::uint32_t>& d, const std::string& sep = "") {
  std::string out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i && !sep.empty()) out += sep;
    out += std::to_string(d[i]);
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::uint64_t require_seed(const Context& c) {
  if (c.o.seed) return *c.o.seed;
  if (c.cfg.seed) return *c.cfg.seed;
  throw InputError("'" + c.top + " " + c.action + "' is stochastic and requires --seed (or \"seed\" in the config)");
}

const IfsSpec& require_ifs(const Context& c) {
  if (!c.cfg.ifs) throw InputError("'" + c.top + " " + c.action + "' needs an IFS: pass --config with an \"ifs\" block");
  return *c.cfg.ifs;
}

long require_base(const Context& c) {
  const long b = c.o.base ? c.o.base : c.cfg.base.value_or(0);
  if (b < 2) throw InputError("'" + c.top + "' needs --base B with B >= 2 (or \"base\" in the config)");
  return b;
}

ExactNumber parse_lambda_text(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw InputError(std::string("--lambda: ") + e.what());
    }
    return parse_exact(j, "--lambda");
  }
  return parse_exact(Json(text), "--lambda");
}

// --lambda, then --lambda-poly (root in (1/2, 1), else the unique root in (0, 1)), then the config IFS.
ExactNumber resolve_lambda(const Context& c, RunReport& rep) {
  if (!c.o.lambda.empty()) return parse_lambda_text(c.o.lambda);
  if (!c.o.lambda_poly.empty()) {
    const Polynomial p = Polynomial::from_integers(parse_long_list(c.o.lambda_poly, "--lambda-poly"));
    for (const auto& [lo, hi] : {std::pair{mpq_class(1, 2), mpq_class(1)}, std::pair{mpq_class(0), mpq_class(1)}}) {
      const int count = count_real_roots(p, lo, hi) - (p.sign_at(hi) == 0 ? 1 : 0);
      if (count == 1) return ExactNumber::algebraic(p, lo, hi);
    }
    throw InputError("--lambda-poly " + p.to_string() + " has no unique root in (1/2, 1) or (0, 1)");
  }
  if (c.cfg.ifs) {
    const IfsSpec n = normalize_pipeline(*c.cfg.ifs);
    rep.provenance = n.ifs.provenance();
    return n.ifs.lambda();
  }
  throw InputError("'" + c.top + "' needs --lambda, --lambda-poly or a config IFS");
}

Json ifs_json(const IfsSpec& s) {
  Json t = Json::array(), p = Json::array();
  for (const auto& x : s.ifs.translations()) t.push_back(to_json(x));
  for (const auto& w : s.probs.weights()) p.push_back(to_json(w));
  return Json{{"lambda", to_json(s.ifs.lambda())}, {"translations", t}, {"probs", p}};
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ---------------------------------------------------------------------------
// ifs

void cmd_ifs(Context& c, RunReport& rep) {
  const IfsSpec& raw = require_ifs(c);
  const IfsSpec norm = normalize_pipeline(raw);
  rep.provenance = norm.ifs.provenance();
  if (c.action == "validate") {
    rep.results["original"] = ifs_json(raw);
    rep.results["normalized"] = ifs_json(norm);
    rep.results["frame"] = {{"scale", to_json(norm.ifs.frame_scale())}, {"shift", to_json(norm.ifs.frame_shift())}};
    rep.results["maps"] = norm.ifs.size();
    rep.results["distinct_translations"] = norm.ifs.distinct_translations();
    rep.check("normalized", norm.ifs.is_normalized());
  } else if (c.action == "hull") {
    const ExactInterval h = attractor_hull(norm.ifs);
    rep.results["hull"] = {{"lo", to_json(h.lo)}, {"hi", to_json(h.hi)}};
    if (raw.ifs.lambda() > ExactNumber(0L)) {
      const ExactInterval o = attractor_hull(raw.ifs);
      rep.results["original_hull"] = {{"lo", to_json(o.lo)}, {"hi", to_json(o.hi)}};
    }
  } else if (c.action == "separate") {
    const auto pair = find_separated_pair(norm.ifs, c.o.max_m);
    rep.results["max_m"] = c.o.max_m;
    rep.results["found"] = pair.has_value();
    if (pair) {
      rep.results["M"] = pair->M;
      rep.results["first"] = join_digits(pair->first, ",");
      rep.results["second"] = join_digits(pair->second, ",");
      const ExactInterval a = cylinder_interval(norm.ifs, pair->first), b = cylinder_interval(norm.ifs, pair->second);
      rep.results["first_interval"] = {to_json(a.lo), to_json(a.hi)};
      rep.results["second_interval"] = {to_json(b.lo), to_json(b.hi)};
    }
  } else if (c.action == "sample") {
    const std::uint64_t seed = require_seed(c);
    if (c.o.n < 1) throw InputError("--n must be positive");
    const std::size_t depth = c.o.depth ? c.o.depth : 40;
    const Bits bits = c.o.bits > 0 ? c.o.bits : kDefaultWorkingPrecision;
    const PointSampler s(norm.ifs, norm.probs, seed);
    std::vector<CertifiedPoint> pts(static_cast<std::size_t>(c.o.n));
    parallel_for(pts.size(), c.workers, [&](std::size_t i) { pts[i] = s.point(i, depth, bits); });
    Table t{{"index", "lo", "hi", "digits"}, {}};
    Json arr = Json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      t.rows.push_back({std::to_string(i), fmt(pts[i].enclosure.lo_double()), fmt(pts[i].enclosure.hi_double()),
                        join_digits(pts[i].digits, " ")});
      arr.push_back({{"index", i}, {"enclosure", to_json(pts[i].enclosure)}, {"digits", join_digits(pts[i].digits, ",")}});
    }
    rep.results["depth"] = depth;
    rep.results["points"] = arr;
    rep.table = std::move(t);
  } else {
    throw InputError("unknown ifs action '" + c.action + "'");
  }
}

// ---------------------------------------------------------------------------
// pisot / theta

void cmd_pisot(Context& c, RunReport& rep) {
  if (c.o.poly.empty()) throw InputError("pisot needs --poly c0,c1,... (constant term first)");
  const Polynomial p = Polynomial::from_integers(parse_long_list(c.o.poly, "--poly"));
  const PisotReport r = pisot_check(p);
  rep.results["poly"] = p.to_string();
  rep.results["is_algebraic_integer"] = r.is_algebraic_integer;
  rep.results["degree"] = r.degree;
  if (r.root.is_finite()) rep.results["root"] = to_json(r.root);
  rep.results["root_is_real"] = r.root_is_real;
  Json mods = Json::array();
  for (const auto& m : r.conjugate_moduli) mods.push_back(to_json(m));
  rep.results["conjugate_moduli"] = mods;
  rep.results["is_pisot"] = r.is_pisot;
  rep.results["precision_bits"] = r.precision_bits;
}

Json theta_json(const ThetaDecision& d) {
  Json j{{"verdict", to_string(d.verdict)}, {"theta", to_json(d.theta)}, {"search_bound", d.search_bound},
         {"witness", d.witness_text}};
  if (d.verdict == ThetaDecision::Verdict::Rational) {
    j["p"] = d.p;
    j["q"] = d.q;
    j["theta_exact"] = to_json(mpq_class(d.q, d.p));
  }
  if (d.witness == ThetaDecision::Witness::PisotTrace) {
    j["pisot_degree"] = d.pisot_degree;
    j["max_conjugate_modulus"] = d.max_conjugate_modulus;
    j["tail_index"] = d.tail_index;
    Json certs = Json::array();
    for (const auto& cert : d.certificates) certs.push_back({{"q", cert.q}, {"l", cert.l}, {"defect", to_json(cert.defect)}});
    j["certificates"] = certs;
  }
  return j;
}

void cmd_theta(Context& c, RunReport& rep) {
  const long b = require_base(c);
  const ExactNumber lambda = resolve_lambda(c, rep);
  rep.results["base"] = b;
  rep.results["lambda"] = to_json(lambda);
  rep.results["decision"] = theta_json(theta_decide(b, lambda, c.o.bound, c.o.max_l));
}

// ---------------------------------------------------------------------------
// disint

std::vector<mpq_class> corrupted_law(const ModelAlphabet& a, const ProbVector& p) {
  // q_pair replaced by p_{i'} alone, then renormalized.
  std::vector<mpq_class> law = a.q;
  law[ModelAlphabet::kPairBlock] = p[a.pair_first];
  mpq_class sum = 0;
  for (const auto& w : law) sum += w;
  for (auto& w : law) w /= sum;
  return law;
}

void cmd_disint(Context& c, RunReport& rep) {
  const IfsSpec norm = normalize_pipeline(require_ifs(c));
  const SeparatedModel model = build_separated_model(norm.ifs, norm.probs, c.o.max_m);
  rep.provenance = model.ifs.provenance();
  const ModelAlphabet& a = model.alphabet;
  Json blocks = Json::array(), q = Json::array();
  for (std::size_t k = 0; k < a.size(); ++k) {
    blocks.push_back(a.blocks[k]);
    q.push_back(to_json(a.q[k]));
  }
  rep.results["M"] = model.M;
  rep.results["pair"] = {a.pair_first, a.pair_second};
  rep.results["blocks"] = blocks;
  rep.results["q"] = q;

  DisintegrationOptions opt;
  opt.alpha = c.o.alpha;
  opt.depth = c.o.depth;
  opt.workers = c.workers;
  if (c.o.corrupt) {
    opt.omega_law = corrupted_law(a, model.p);
    Json law = Json::array();
    for (const auto& w : opt.omega_law) law.push_back(to_json(w));
    rep.results["corrupted_omega_law"] = law;
  }
  auto ks_json = [](const KsReport& k) {
    return Json{{"statistic", k.statistic}, {"critical", k.critical}, {"p_value", k.p_value},
                {"alpha", k.alpha},         {"n", k.n},               {"m", k.m},
                {"pass", k.pass}};
  };

  if (c.action == "build") {
    const std::uint64_t seed = require_seed(c);
    const ModelWord w(a, derive_seed(seed, 100), c.o.omega_index == kAutoIndex ? 0 : c.o.omega_index);
    const auto pre = w.prefix(c.o.prefix);
    rep.results["omega_prefix"] = pre;
    rep.results["atom_bound"] = to_json(atom_bound(pre, model.p, a));
  } else if (c.action == "verify") {
    const std::uint64_t seed = require_seed(c);
    const KsReport k = verify_disintegration(model.ifs, model.p, a, static_cast<std::size_t>(c.o.n), seed, opt);
    rep.results["ks"] = ks_json(k);
    rep.check("disintegration_ks", k.pass);
  } else if (c.action == "restrict") {
    const std::uint64_t seed = require_seed(c);
    DigitWord word;
    if (!c.o.word.empty())
      for (long d : parse_long_list(c.o.word, "--word")) {
        if (d < 0) throw InputError("--word digits must be nonnegative");
        word.push_back(static_cast<std::uint32_t>(d));
      }
    // Without --omega-index, the first model word compatible with the cylinder is used.
    auto model_word = [&](std::uint64_t index) {
      ModelWord w(a, derive_seed(seed, 100), index);
      return opt.omega_law.empty() ? w : w.with_block_law(opt.omega_law);
    };
    std::uint64_t index = c.o.omega_index == kAutoIndex ? 0 : c.o.omega_index;
    if (c.o.omega_index == kAutoIndex)
      while (!is_compatible(ModelCylinder{model_word(index), word}, a)) {
        if (++index == 100000) throw InputError("no model word among the first 100000 is compatible with --word");
      }
    const ModelWord w = model_word(index);
    rep.results["omega_index"] = index;
    const RestrictionReport r =
        verify_restriction_identity(w, word, model.ifs, model.p, a, static_cast<std::size_t>(c.o.n), seed, opt);
    rep.results["word"] = join_digits(word, ",");
    rep.results["omega_prefix"] = w.prefix(word.size() + 1);
    rep.results["mass"] = to_json(r.mass);
    rep.results["attempts"] = r.attempts;
    rep.results["prefix_mismatches"] = r.prefix_mismatches;
    rep.results["ks"] = ks_json(r.ks);
    rep.check("restriction_ks", r.ks.pass);
    rep.check("geometric_conditioning_matches_symbolic", r.prefix_mismatches == 0);
  } else {
    throw InputError("unknown disint action '" + c.action + "'");
  }
}

// ---------------------------------------------------------------------------
// fourier

Json fourier_json(const FourierValue& v) {
  return Json{{"re", to_json(v.value.re)},
              {"im", to_json(v.value.im)},
              {"modulus", to_json(v.modulus())},
              {"terms", v.truncation_terms},
              {"tail_bound", v.tail_bound}};
}

void cmd_fourier(Context& c, RunReport& rep) {
  if (c.action == "eval") {
    const IfsSpec norm = normalize_pipeline(require_ifs(c));
    rep.provenance = norm.ifs.provenance();
    const ExactNumber xi = parse_lambda_text(c.o.xi);
    FourierOptions opt;
    if (c.o.bits > 0) opt.bits = c.o.bits;
    const FourierValue v = fourier_product(norm.ifs, norm.probs, xi, c.o.err, opt);
    rep.results["xi"] = to_json(xi);
    rep.results["value"] = fourier_json(v);
    rep.check("modulus_at_most_one", !v.modulus().certainly_greater(1));
    rep.table = Table{{"xi", "re", "im", "modulus", "tail_bound"},
                      {{fmt(xi.to_double()), fmt(v.value.re.mid_double()), fmt(v.value.im.mid_double()),
                        fmt(v.modulus().mid_double()), fmt(v.tail_bound)}}};
  } else if (c.action == "erdos") {
    const ExactNumber lambda = resolve_lambda(c, rep);
    const Bits bits = c.o.bits > 0 ? c.o.bits : 1024;
    const auto scan = c.o.control ? bernoulli_scan(lambda, c.o.nmax, c.o.err, bits, c.workers)
                                  : erdos_scan(lambda, c.o.nmax, c.o.err, bits, c.workers);
    Table t{{"n", "re", "im", "modulus", "tail_bound"}, {}};
    Json arr = Json::array();
    double min_mod = std::numeric_limits<double>::infinity();
    for (const auto& e : scan) {
      const Interval m = e.value.modulus();
      if (e.n >= 1) min_mod = std::min(min_mod, m.hi_double());
      t.rows.push_back({std::to_string(e.n), fmt(e.value.value.re.mid_double()), fmt(e.value.value.im.mid_double()),
                        fmt(m.mid_double()), fmt(e.value.tail_bound)});
      arr.push_back({{"n", e.n}, {"modulus", to_json(m)}, {"tail_bound", e.value.tail_bound}});
    }
    rep.results["lambda"] = to_json(lambda);
    rep.results["pisot_gate"] = !c.o.control;
    rep.results["bits"] = bits;
    rep.results["scan"] = arr;
    if (c.o.nmax >= 1) rep.results["min_modulus_upper"] = min_mod;
    rep.table = std::move(t);
  } else if (c.action == "lemma32") {
    const std::uint64_t seed = require_seed(c);
    const Lemma32Sweep s = lemma32_sweep(c.o.trials, c.o.lambda_value, seed, c.workers);
    rep.results["measures"] = c.o.trials;
    rep.results["lambda"] = c.o.lambda_value;
    rep.results["checks"] = s.checks;
    rep.results["violations"] = s.violations;
    rep.results["max_excess"] = s.max_excess;
    rep.results["max_ratio"] = s.max_ratio;
    rep.results["evaluations"] = s.evaluations;
    rep.check("no_violations", s.violations == 0);
  } else {
    throw InputError("unknown fourier action '" + c.action + "'");
  }
}

// ---------------------------------------------------------------------------
// normal

IfsSpec sampling_system(const Context& c, RunReport& rep) {
  const IfsSpec& raw = require_ifs(c);
  if (c.o.frame == "normalized") {
    IfsSpec n = normalize_pipeline(raw);
    rep.provenance = n.ifs.provenance();
    return n;
  }
  if (c.o.frame != "original") throw InputError("--frame must be 'normalized' or 'original'");
  const IfsSpec trimmed = [&] {
    auto [ifs, p] = trim_support(raw.ifs, raw.probs);
    return IfsSpec{ifs, p};
  }();
  if (!(trimmed.ifs.lambda() > ExactNumber(0L))) throw InputError("--frame original needs lambda > 0");
  const ExactInterval h = attractor_hull(trimmed.ifs);
  if (h.lo.sign() < 0 || h.hi > ExactNumber(1L))
    throw InputError("--frame original needs the attractor hull inside [0, 1]; got [" + h.lo.to_string() + ", " +
                     h.hi.to_string() + "]");
  rep.provenance = trimmed.ifs.provenance();
  return trimmed;
}

void cmd_normal(Context& c, RunReport& rep) {
  const long b = require_base(c);
  if (c.action == "orbit") {
    const ExactNumber lambda = resolve_lambda(c, rep);
    const RotationOrbit o = rotation_orbit(b, lambda, c.o.ndigits);
    rep.results["theta"] = to_json(o.theta);
    rep.results["periodic"] = o.periodic;
    if (o.periodic) rep.results["period"] = o.period;
    rep.results["length"] = o.fractions.size();
    rep.results["discrepancy"] = o.discrepancy;
    Table t{{"n", "nprime", "frac_lo", "frac_hi"}, {}};
    for (std::size_t n = 0; n < o.fractions.size(); ++n)
      t.rows.push_back({std::to_string(n + 1), std::to_string(o.nprime[n]), fmt(o.fractions[n].lo_double()),
                        fmt(o.fractions[n].hi_double())});
    std::vector<long> head(o.nprime.begin(), o.nprime.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(20, o.nprime.size())));
    rep.results["nprime_head"] = head;
    rep.table = std::move(t);
    return;
  }
  const std::uint64_t seed = require_seed(c);
  const IfsSpec sys = sampling_system(c, rep);
  const PointSampler sampler(sys.ifs, sys.probs, seed);
  const std::size_t N = c.o.ndigits;
  const std::size_t guard = weyl_guard_digits(b) + 1;
  const bool needs_orbit = c.action == "weyl" || c.action == "discrepancy";
  const std::size_t extract = (needs_orbit ? N + guard : N) + c.o.lag;
  std::vector<DigitStream> streams(c.o.points);
  parallel_for(streams.size(), c.workers, [&](std::size_t i) {
    streams[i] = extract_sample_digits(sampler, i, b, extract);
    // Dropping k leading digits is the map x -> b^k x mod 1.
    auto& d = streams[i].digits;
    d.erase(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(std::min(c.o.lag, d.size())));
  });
  std::size_t complete = 0;
  for (const auto& s : streams)
    if (!s.boundary) ++complete;
  rep.results["base"] = b;
  rep.results["ndigits"] = N;
  rep.results["points"] = c.o.points;
  rep.results["complete_streams"] = complete;
  rep.check("all_streams_certified", complete == streams.size());
  if (complete != streams.size()) throw StatisticalFailure("a digit stream hit a cell boundary before " + std::to_string(extract) + " digits");

  Table t{{"point_id", "N", "statistic", "pass"}, {}};
  Json per = Json::array();
  auto row = [&](std::size_t i, double stat, const std::string& pass) {
    t.rows.push_back({std::to_string(i), std::to_string(N), fmt(stat), pass});
  };
  if (c.action == "digits") {
    t.header = {"point_id", "N", "digits", "boundary"};
    for (std::size_t i = 0; i < streams.size(); ++i) {
      t.rows.push_back({std::to_string(i), std::to_string(N), join_digits(streams[i].digits), streams[i].boundary ? "true" : "false"});
      std::vector<std::uint64_t> counts(static_cast<std::size_t>(b), 0);
      for (auto d : streams[i].digits) ++counts[d];
      per.push_back({{"point_id", i}, {"digit_counts", counts}, {"digits", join_digits(streams[i].digits)}});
    }
  } else if (c.action == "weyl") {
    std::vector<std::size_t> grid;
    for (std::size_t g = 1; g < N; g *= 2) grid.push_back(g);
    grid.push_back(N);
    std::ofstream plot;
    if (!c.o.plot_csv.empty()) {
      plot.open(c.o.plot_csv);
      if (!plot) throw InputError("cannot write " + c.o.plot_csv);
      plot << "point_id,N,modulus\n";
    }
    for (std::size_t i = 0; i < streams.size(); ++i) {
      const WeylSeries w = weyl_sums(streams[i], c.o.l, grid);
      const double m = std::abs(w.averages.back());
      const bool ok = m <= 4.0 / std::sqrt(static_cast<double>(N));
      row(i, m, ok ? "true" : "false");
      per.push_back({{"point_id", i}, {"modulus", m}, {"re", w.averages.back().real()}, {"im", w.averages.back().imag()}});
      if (plot) {
        std::vector<std::size_t> all(N);
        for (std::size_t n = 0; n < N; ++n) all[n] = n + 1;
        const WeylSeries full = weyl_sums(streams[i], c.o.l, all);
        for (std::size_t n = 0; n < N; ++n) plot << i << ',' << n + 1 << ',' << fmt(std::abs(full.averages[n])) << '\n';
      }
    }
    rep.results["l"] = c.o.l;
    rep.results["lag"] = c.o.lag;
  } else if (c.action == "discrepancy") {
    std::vector<double> ds;
    for (std::size_t i = 0; i < streams.size(); ++i) {
      const double d = star_discrepancy(orbit_values(streams[i], N));
      ds.push_back(d);
      row(i, d, "");
      per.push_back({{"point_id", i}, {"discrepancy", d}});
    }
    rep.results["median_discrepancy"] = median(ds);
  } else if (c.action == "kgram" || c.action == "monobit") {
    std::size_t passes = 0;
    for (std::size_t i = 0; i < streams.size(); ++i) {
      if (c.action == "kgram") {
        bool ok = true;
        Json ks = Json::array();
        double worst = 0;
        for (int k = 1; k <= c.o.k; ++k) {
          const ChiSquareReport r = kgram_test(streams[i], k);
          ok = ok && r.pass;
          worst = std::max(worst, r.statistic);
          ks.push_back({{"k", k}, {"statistic", r.statistic}, {"dof", r.dof}, {"p_value", r.p_value}, {"pass", r.pass}});
        }
        row(i, worst, ok ? "true" : "false");
        per.push_back({{"point_id", i}, {"orders", ks}, {"pass", ok}});
        passes += ok;
      } else {
        const MonobitReport r = monobit_test(streams[i]);
        row(i, r.z, r.pass ? "true" : "false");
        per.push_back({{"point_id", i}, {"z", r.z}, {"pass", r.pass}});
        passes += r.pass;
      }
    }
    rep.results["passes"] = passes;
    rep.check(c.action + "_all_points", passes == streams.size());
  } else {
    throw InputError("unknown normal action '" + c.action + "'");
  }
  rep.results["per_point"] = per;
  rep.table = std::move(t);
}

// ---------------------------------------------------------------------------
// bernoulli-pipeline

void cmd_pipeline(Context& c, RunReport& rep) {
  const long b = require_base(c);
  const ExactNumber lambda = resolve_lambda(c, rep);
  if (!(lambda > ExactNumber(0L) && lambda < ExactNumber(1L))) throw InputError("pipeline needs 0 < lambda < 1");
  rep.results["lambda"] = to_json(lambda);
  rep.results["base"] = b;

  const Polynomial inv = lambda.inverse().minimal_polynomial();
  const PisotReport pr = pisot_check(inv);
  rep.results["pisot"] = {{"poly", inv.to_string()}, {"is_algebraic_integer", pr.is_algebraic_integer},
                          {"degree", pr.degree}, {"is_pisot", pr.is_pisot}};
  if (!pr.is_pisot)
    throw InputError("pisot stage: 1/lambda is not a Pisot number (minimal polynomial " + inv.to_string() +
                     (pr.is_algebraic_integer ? ")" : " is not monic, so 1/lambda is not an algebraic integer)"));

  const ThetaDecision d = theta_decide(b, lambda, c.o.bound);
  rep.results["theta"] = theta_json(d);
  if (d.verdict != ThetaDecision::Verdict::IrrationalProven) {
    rep.results["hypothesis_met"] = false;
    rep.results["message"] = d.verdict == ThetaDecision::Verdict::Rational
                                 ? "log b / log lambda is rational; the irrationality hypothesis is unmet, no normality claim"
                                 : "irrationality of log b / log lambda was not established; no normality claim";
    return;
  }
  rep.results["hypothesis_met"] = true;

  const std::uint64_t seed = require_seed(c);
  IfsSpec sys = normalize_pipeline(IfsSpec{bernoulli_ifs(lambda), ProbVector::uniform(2)});
  rep.provenance = sys.ifs.provenance();
  const PointSampler sampler(sys.ifs, sys.probs, seed);
  const std::size_t N = c.o.ndigits;
  const std::size_t extract = N + weyl_guard_digits(b) + 1;
  std::vector<PointStatistics> stats(c.o.points);
  parallel_for(stats.size(), c.workers, [&](std::size_t i) {
    const DigitStream s = extract_sample_digits(sampler, i, b, extract);
    if (s.boundary) throw StatisticalFailure("point " + std::to_string(i) + " hit a cell boundary");
    stats[i] = analyze_stream(s, N, 3, 1);
  });

  std::size_t mono = 0, kg = 0;
  std::vector<double> ds, ws;
  Table t{{"point_id", "N", "monobit_z", "kgram_pass", "weyl_modulus", "discrepancy"}, {}};
  Json per = Json::array();
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& s = stats[i];
    mono += s.monobit.pass;
    kg += s.kgram_pass;
    ds.push_back(s.discrepancy);
    ws.push_back(s.weyl_modulus);
    Json chi = Json::array();
    for (const auto& r : s.kgram) chi.push_back({{"statistic", r.statistic}, {"p_value", r.p_value}, {"pass", r.pass}});
    per.push_back({{"point_id", i}, {"monobit_z", s.monobit.z}, {"monobit_pass", s.monobit.pass}, {"kgram", chi},
                   {"kgram_pass", s.kgram_pass}, {"weyl_modulus", s.weyl_modulus}, {"discrepancy", s.discrepancy}});
    t.rows.push_back({std::to_string(i), std::to_string(N), fmt(s.monobit.z), s.kgram_pass ? "true" : "false",
                      fmt(s.weyl_modulus), fmt(s.discrepancy)});
  }
  const double P = static_cast<double>(stats.size());
  rep.results["ensemble"] = {{"points", stats.size()},
                             {"ndigits", N},
                             {"monobit_passes", mono},
                             {"kgram_passes", kg},
                             {"median_discrepancy", median(ds)},
                             {"median_weyl_modulus", median(ws)}};
  rep.results["per_point"] = per;
  rep.check("monobit_pass_rate", static_cast<double>(mono) >= std::ceil(0.96 * P));
  rep.check("kgram_pass_rate", static_cast<double>(kg) >= std::ceil(0.90 * P));
  rep.check("median_discrepancy", median(ds) <= 0.05);
  rep.table = std::move(t);
}

std::string command_echo(const std::vector<std::string>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--workers" || a == "--no-timing") {
      if (a == "--workers") ++i;
      continue;
    }
    if (a.rfind("--workers=", 0) == 0) continue;
    out += (out.empty() ? "" : " ") + a;
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  std::vector<Binder> binders;
  CLI::App app{"self-similar measures, Pisot arithmetic and base-b normality", "normalis"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config, "JSON run configuration ('-' for stdin)");
  app.add_option("--seed", o.seed, "64-bit seed for stochastic commands");
  app.add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--precision-cap", o.precision_cap, "precision cap in bits")->check(CLI::Range(64L, 1L << 24));
  app.add_flag("--no-timing", o.no_timing, "omit wall time from the report");

  std::map<std::string, Command> commands;
  auto top_level = [&](const std::string& name, const std::string& desc, const std::vector<std::string>& actions,
                       Command cmd) {
    CLI::App* sub = app.add_subcommand(name, desc);
    if (!actions.empty()) sub->require_subcommand(1);
    commands[name] = std::move(cmd);
    std::vector<CLI::App*> targets;
    if (actions.empty()) targets.push_back(sub);
    for (const auto& a : actions) targets.push_back(sub->add_subcommand(a));
    return std::make_pair(sub, targets);
  };
  auto bind = [&](const std::string& top, CLI::App* where, const std::string& flag, auto& var, const std::string& desc) {
    using T = std::decay_t<decltype(var)>;
    CLI::Option* opt;
    if constexpr (std::is_same_v<T, bool>)
      opt = where->add_flag(flag, var, desc);
    else
      opt = where->add_option(flag, var, desc);
    binders.push_back({top, option_name(flag), where, opt, [&var](const Json& j) { var = j.get<T>(); }});
  };

  {
    auto [sub, acts] = top_level("ifs", "validate, hull, separate or sample the configured system",
                                 {"validate", "hull", "separate", "sample"}, cmd_ifs);
    bind("ifs", acts[2], "--max-m", o.max_m, "largest composition power");
    bind("ifs", acts[3], "--n", o.n, "number of points");
    bind("ifs", acts[3], "--depth", o.depth, "symbolic depth");
    bind("ifs", acts[3], "--bits", o.bits, "working precision");
  }
  {
    auto [sub, acts] = top_level("pisot", "certified Pisot test of an integer polynomial", {}, cmd_pisot);
    bind("pisot", acts[0], "--poly", o.poly, "coefficients, constant term first");
  }
  {
    auto [sub, acts] = top_level("theta", "decide rationality of -log b / log lambda", {}, cmd_theta);
    bind("theta", acts[0], "--base", o.base, "base b");
    bind("theta", acts[0], "--lambda", o.lambda, "lambda as n/d, decimal or JSON exact number");
    bind("theta", acts[0], "--lambda-poly", o.lambda_poly, "integer polynomial of lambda");
    bind("theta", acts[0], "--bound", o.bound, "search bound");
    bind("theta", acts[0], "--max-l", o.max_l, "largest l tried per q in trace certificates");
  }
  {
    auto [sub, acts] = top_level("disint", "random disintegration into model measures", {"build", "verify", "restrict"},
                                 cmd_disint);
    for (CLI::App* a : acts) {
      bind("disint", a, "--max-m", o.max_m, "largest composition power for the separated pair");
      bind("disint", a, "--corrupt-weights", o.corrupt, "use a deliberately wrong block law (control)");
      bind("disint", a, "--omega-index", o.omega_index, "model word index");
    }
    bind("disint", acts[0], "--prefix", o.prefix, "model word blocks to show");
    for (CLI::App* a : {acts[1], acts[2]}) {
      bind("disint", a, "--n", o.n, "samples per side");
      bind("disint", a, "--depth", o.depth, "symbolic depth (0: automatic)");
      bind("disint", a, "--alpha", o.alpha, "KS level");
    }
    bind("disint", acts[2], "--word", o.word, "cylinder word, comma separated");
  }
  {
    auto [sub, acts] = top_level("fourier", "Fourier transforms and related checks", {"eval", "erdos", "lemma32"},
                                 cmd_fourier);
    bind("fourier", acts[0], "--xi", o.xi, "frequency as an exact number");
    for (CLI::App* a : {acts[0], acts[1]}) {
      bind("fourier", a, "--err", o.err, "target truncation error");
      bind("fourier", a, "--bits", o.bits, "working precision");
    }
    bind("fourier", acts[1], "--nmax", o.nmax, "largest n");
    bind("fourier", acts[1], "--lambda", o.lambda, "lambda as an exact number");
    bind("fourier", acts[1], "--lambda-poly", o.lambda_poly, "integer polynomial of lambda");
    bind("fourier", acts[1], "--control", o.control, "skip the Pisot gate (same evaluator)");
    bind("fourier", acts[2], "--trials", o.trials, "random atomic measures");
    bind("fourier", acts[2], "--lambda", o.lambda_value, "contraction in (0, 1)");
  }
  {
    auto [sub, acts] = top_level("normal", "digit extraction and normality statistics",
                                 {"digits", "weyl", "discrepancy", "kgram", "monobit", "orbit"}, cmd_normal);
    for (CLI::App* a : acts) {
      bind("normal", a, "--base", o.base, "base b");
      bind("normal", a, "--ndigits", o.ndigits, "digits per point");
    }
    for (std::size_t i = 0; i + 1 < acts.size(); ++i) {
      bind("normal", acts[i], "--points", o.points, "sampled points");
      bind("normal", acts[i], "--frame", o.frame, "normalized or original coordinates");
    }
    bind("normal", acts[1], "--l", o.l, "Weyl frequency");
    bind("normal", acts[1], "--lag", o.lag, "analyse b^k x mod 1 instead of x");
    bind("normal", acts[1], "--emit-plot-csv", o.plot_csv, "write (N, |A_N|) series");
    bind("normal", acts[3], "--k", o.k, "largest k-gram order");
    bind("normal", acts[5], "--lambda", o.lambda, "lambda as an exact number");
    bind("normal", acts[5], "--lambda-poly", o.lambda_poly, "integer polynomial of lambda");
  }
  {
    auto [sub, acts] = top_level("bernoulli-pipeline", "Pisot check, theta decision and normality ensemble", {},
                                 cmd_pipeline);
    bind("bernoulli-pipeline", acts[0], "--base", o.base, "base b");
    bind("bernoulli-pipeline", acts[0], "--lambda", o.lambda, "lambda as an exact number");
    bind("bernoulli-pipeline", acts[0], "--lambda-poly", o.lambda_poly, "integer polynomial of lambda");
    bind("bernoulli-pipeline", acts[0], "--points", o.points, "sampled points");
    bind("bernoulli-pipeline", acts[0], "--ndigits", o.ndigits, "digits per point");
    bind("bernoulli-pipeline", acts[0], "--bound", o.bound, "theta search bound");
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return e.get_exit_code() == 0 ? 0 : exit_code_for(ErrorKind::Input);
  }

  const auto start = std::chrono::steady_clock::now();
  reset_precision_stats();
  try {
    Context ctx{RunConfig{}, o, "", "", 1};
    if (!o.config.empty()) ctx.cfg = load_config_file(o.config);
    for (CLI::App* sub : app.get_subcommands()) {
      ctx.top = sub->get_name();
      for (CLI::App* act : sub->get_subcommands()) ctx.action = act->get_name();
    }
    if (const auto it = ctx.cfg.params.find(ctx.top); it != ctx.cfg.params.end()) {
      for (const auto& [key, value] : it->items()) {
        bool known = false;
        for (const Binder& bnd : binders) {
          if (bnd.top != ctx.top || bnd.name != key) continue;
          known = true;
          if (!bnd.owner->parsed() || bnd.option->count() > 0) continue;
          try {
            bnd.assign(value);
          } catch (const Json::exception&) {
            throw InputError("params." + ctx.top + "." + key + ": wrong type");
          }
        }
        if (!known) throw InputError("params." + ctx.top + ": unknown option '" + key + "'");
      }
    }
    ctx.workers = o.workers.value_or(ctx.cfg.workers.value_or(1));
    set_default_workers(ctx.workers);
    static const Bits environment_cap = precision_cap();
    set_precision_cap(o.precision_cap.value_or(ctx.cfg.precision_cap.value_or(environment_cap)));
    const std::string format = o.format.value_or(ctx.cfg.format.value_or("json"));

    RunReport rep;
    rep.command = command_echo(args);
    commands.at(ctx.top)(ctx, rep);
    rep.max_precision_used = max_precision_used();
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.exit_code = rep.pass ? 0 : exit_code_for(ErrorKind::Statistical);
    out << render(rep, format, !o.no_timing);
    return rep.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_code_for(ErrorKind::Internal);
  }
}

}  // namespace normalis::cli
