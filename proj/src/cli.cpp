#include "ewl/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ewl/criticality.hpp"
#include "ewl/error.hpp"
#include "ewl/parallel.hpp"
#include "ewl/simulator.hpp"
#include "ewl/testfn.hpp"

namespace ewl {
namespace {

using json = nlohmann::json;

// Usage problems (exit 2) as opposed to domain failures (exit 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) parts.push_back(item.substr(b, e - b + 1));
  }
  return parts;
}

struct OptionSpec {
  std::string key;
  std::string help;
  bool flag = false;
};

// Flat string-valued settings: config file first, explicit flags on top.
class Settings {
 public:
  explicit Settings(std::set<std::string> allowed) : allowed_(std::move(allowed)) {}

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  void merge_json(const json& j) {
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    const json& src = (j.contains("schema_version") && j.contains("config")) ? j.at("config") : j;
    if (!src.is_object()) throw UsageError("config section must be a JSON object");
    for (const auto& [key, value] : src.items()) {
      if (!allowed_.count(key)) throw UsageError("unknown config key '" + key + "'");
      if (value.is_string())
        values_[key] = value.get<std::string>();
      else if (value.is_boolean())
        values_[key] = value.get<bool>() ? "true" : "false";
      else if (value.is_number())
        values_[key] = value.dump();
      else if (value.is_array()) {
        std::string joined;
        for (const auto& item : value) {
          if (!joined.empty()) joined += ",";
          joined += item.is_string() ? item.get<std::string>() : item.dump();
        }
        values_[key] = joined;
      } else {
        throw UsageError("config key '" + key + "' has an unsupported value");
      }
    }
  }

  const std::string& str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw UsageError("missing --" + key);
    return it->second;
  }
  std::string str(const std::string& key, const std::string& fallback) const {
    return has(key) ? str(key) : fallback;
  }

  Rational rational(const std::string& key) const {
    try {
      return parse_rational(str(key));
    } catch (const DomainError& e) {
      throw UsageError("--" + key + ": " + e.what());
    }
  }
  Rational rational(const std::string& key, const std::string& fallback) const {
    return has(key) ? rational(key) : parse_rational(fallback);
  }
  double real(const std::string& key) const { return to_double(rational(key)); }
  double real(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }

  int integer(const std::string& key) const {
    const Rational x = rational(key);
    if (denominator(x) != 1) throw UsageError("--" + key + " expects an integer");
    if (x > 1000000 || x < -1000000) throw UsageError("--" + key + " is out of range");
    return numerator(x).convert_to<int>();
  }
  int integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

  bool flag(const std::string& key) const {
    if (!has(key)) return false;
    const std::string& v = str(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw UsageError("--" + key + " expects true or false");
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(str(key))) {
      try {
        out.push_back(to_double(parse_rational(item)));
      } catch (const DomainError& e) {
        throw UsageError("--" + key + ": " + e.what());
      }
    }
    return out;
  }

  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
  }

 private:
  std::set<std::string> allowed_;
  std::map<std::string, std::string> values_;
};

const std::vector<OptionSpec> kParamOptions = {
    {"N", "space dimension"},
    {"p", "exponent p (decimal or fraction, kept exact)"},
    {"q", "exponent q"},
    {"a", "weight exponent a (default 0)"},
    {"b", "weight exponent b (default 0)"},
    {"bc", "boundary condition: dirichlet | neumann | mixed"},
    {"r0", "obstacle radius (default 1)"},
    {"If", "integral of f over the boundary"},
    {"Ig", "integral of g over the boundary"},
    {"f-sign-changing", "f is not pointwise nonnegative", true},
    {"g-sign-changing", "g is not pointwise nonnegative", true},
    {"non-ball", "obstacle is not a ball", true},
};

const std::vector<OptionSpec> kCommonOptions = {
    {"config", "JSON config file (flags override its values)"},
    {"out", "write the report to this path"},
    {"format", "csv | json"},
};

std::vector<OptionSpec> concat(std::initializer_list<std::vector<OptionSpec>> lists) {
  std::vector<OptionSpec> out;
  for (const auto& l : lists) out.insert(out.end(), l.begin(), l.end());
  return out;
}

ProblemParams problem_params(const Settings& s) {
  ProblemParams P;
  P.N = s.integer("N");
  P.set_exact(s.rational("p"), s.rational("q"), s.rational("a", "0"), s.rational("b", "0"));
  try {
    P.boundary = parse_boundary(s.str("bc", "dirichlet"));
  } catch (const DomainError& e) {
    throw UsageError(std::string("--bc: ") + e.what());
  }
  P.r0 = s.real("r0", 1.0);
  P.If = s.real("If", 0.0);
  P.Ig = s.real("Ig", 0.0);
  P.f_nonneg = !s.flag("f-sign-changing");
  P.g_nonneg = !s.flag("g-sign-changing");
  P.omega_is_ball = !s.flag("non-ball");
  return P;
}

json classification_json(const Classification& c) {
  json conds = json::array();
  for (const auto& r : c.reasons)
    conds.push_back({{"name", r.name}, {"value", r.value}, {"threshold", r.threshold}, {"pass", r.pass}});
  return {{"verdict", to_string(c.verdict)},
          {"branch", to_string(c.branch)},
          {"delta", c.exponents.delta},
          {"gamma", c.exponents.gamma},
          {"summary", c.summary},
          {"conditions", conds}};
}

json report(const std::string& command, const Settings& s, json result) {
  return {{"schema_version", kSchemaVersion}, {"command", command}, {"config", s.to_json()}, {"result", std::move(result)}};
}

std::string format_of(const Settings& s, const std::string& fallback) {
  const std::string f = s.str("format", fallback);
  if (f != "csv" && f != "json") throw UsageError("--format must be csv or json");
  return f;
}

// --- classify -------------------------------------------------------------

std::string cmd_classify(const Settings& s) {
  const ProblemParams P = problem_params(s);
  const Classification c = classify(P);
  if (format_of(s, "json") == "csv") {
    std::ostringstream os;
    os << "N,p,q,a,b,delta,gamma,verdict,branch\n"
       << P.N << ',' << fmt17(P.p) << ',' << fmt17(P.q) << ',' << fmt17(P.a) << ',' << fmt17(P.b) << ','
       << fmt17(c.exponents.delta) << ',' << fmt17(c.exponents.gamma) << ',' << to_string(c.verdict) << ','
       << to_string(c.branch) << '\n';
    return os.str();
  }
  return report("classify", s, classification_json(c)).dump(2) + "\n";
}

// --- sweep ----------------------------------------------------------------

std::vector<Rational> axis(const Settings& s, const std::string& name) {
  const Rational lo = s.rational(name + "-min");
  const Rational hi = s.rational(name + "-max");
  const Rational step = s.rational(name + "-step");
  if (step <= 0) throw DomainError("degenerate grid: " + name + "-step must be positive");
  std::vector<Rational> pts;
  for (Rational x = lo; x <= hi; x += step) pts.push_back(x);
  if (pts.size() < 2) throw DomainError("degenerate grid: fewer than 2 points along " + name);
  return pts;
}

struct SweepRow {
  double p = 0, q = 0;
  Classification c;
};

std::string cmd_sweep(const Settings& s) {
  const std::vector<Rational> ps = axis(s, "p");
  const std::vector<Rational> qs = axis(s, "q");
  Settings base = s;
  base.set("p", "2");
  base.set("q", "2");
  const ProblemParams P0 = problem_params(base);
  const Rational a = s.rational("a", "0"), b = s.rational("b", "0");

  const auto rows = parallel_map<std::vector<SweepRow>>(ps.size(), [&](std::size_t i) {
    std::vector<SweepRow> out;
    for (const auto& q : qs) {
      ProblemParams P = P0;
      P.set_exact(ps[i], q, a, b);
      out.push_back({P.p, P.q, classify(P)});
    }
    return out;
  });

  if (format_of(s, "csv") == "json") {
    json arr = json::array();
    for (const auto& line : rows)
      for (const auto& r : line)
        arr.push_back({{"p", r.p}, {"q", r.q}, {"delta", r.c.exponents.delta}, {"gamma", r.c.exponents.gamma},
                       {"verdict", to_string(r.c.verdict)}, {"branch", to_string(r.c.branch)}});
    return report("sweep", s, {{"rows", arr}}).dump(2) + "\n";
  }
  std::ostringstream os;
  os << "p,q,delta,gamma,verdict,branch\n";
  for (const auto& line : rows)
    for (const auto& r : line)
      os << fmt17(r.p) << ',' << fmt17(r.q) << ',' << fmt17(r.c.exponents.delta) << ','
         << fmt17(r.c.exponents.gamma) << ',' << to_string(r.c.verdict) << ',' << to_string(r.c.branch) << '\n';
  return os.str();
}

// --- verify-asymptotics ---------------------------------------------------

struct AsymptoticRow {
  std::string lemma, branch;
  int N = 0;
  double tau = 0, m = 0, alpha = 0, beta = 0, theta = 0;
  double predicted = 0, log_power = 0;
  double slope = NAN, residual = NAN;
  std::string status, note;
};

std::vector<double> default_scales() { return {1e2, std::pow(10.0, 2.5), 1e3, std::pow(10.0, 3.5), 1e4}; }

std::vector<double> scales(const Settings& s) {
  std::vector<double> Ts = s.has("T") ? s.reals("T") : default_scales();
  if (Ts.size() < 3) throw UsageError("--T needs at least 3 samples");
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    if (!(Ts[i] > 1.0)) throw UsageError("--T samples must exceed 1");
    if (i > 0 && !(Ts[i] > Ts[i - 1])) throw UsageError("--T samples must increase");
  }
  if (Ts.back() / Ts.front() < 100.0 * (1.0 - 1e-12)) throw UsageError("--T samples must span two decades");
  return Ts;
}

AsymptoticRow lemma_row(const LemmaCase& c, int k, const std::vector<double>& Ts, double tol) {
  AsymptoticRow row;
  row.lemma = to_string(c.id);
  row.branch = c.branch;
  row.N = c.N;
  row.tau = c.tau;
  row.m = c.m;
  row.alpha = c.alpha;
  row.beta = c.beta;
  row.theta = c.theta;
  row.predicted = c.predicted_rate;
  row.log_power = c.log_power;
  try {
    std::vector<RateSample> samples;
    for (double T : Ts) samples.push_back({T, lemma_log_integral(c, TestFunctionFamily::make(c.N, k, c.theta, T))});
    const RateFit fit = fit_log_rate(samples, c.log_power);
    row.slope = fit.slope;
    row.residual = fit.residual;
    row.status = std::abs(fit.slope - c.predicted_rate) <= tol ? "pass" : "fail";
  } catch (const std::exception& e) {
    row.status = "error";
    row.note = e.what();
  }
  return row;
}

AsymptoticRow functional_row(const Settings& s, const std::vector<double>& Ts) {
  AsymptoticRow row;
  row.lemma = "functional";
  row.branch = s.str("functional");
  try {
    const ProblemParams P = problem_params(s);
    row.N = P.N;
    FunctionalBranch br = FunctionalBranch::ViaF;
    bool known = false;
    for (auto b : {FunctionalBranch::ViaF, FunctionalBranch::ViaG, FunctionalBranch::ViaF_mixed,
                   FunctionalBranch::ViaG_mixed})
      if (to_string(b) == row.branch) br = b, known = true;
    if (!known) throw UsageError("--functional must be ViaF, ViaG, ViaF_mixed or ViaG_mixed");
    const int k = s.integer("k", default_k(P));
    row.theta = s.real("theta", default_theta(P.N));
    const TestFunctionFamily fam = TestFunctionFamily::make(P.N, k, row.theta, Ts.front());
    std::vector<RateSample> samples;
    for (double T : Ts) {
      const FunctionalValue v = contradiction_functional(P, fam.with_scale(T), br, T);
      samples.push_back({T, v.log_value});
      row.predicted = v.predicted_rate;
      row.log_power = v.log_power;
    }
    const RateFit fit = fit_log_rate(samples, row.log_power);
    row.slope = fit.slope;
    row.residual = fit.residual;
    row.status = std::abs(fit.slope - row.predicted) <= s.real("functional-tolerance", 0.2) ? "pass" : "fail";
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    row.status = "error";
    row.note = e.what();
  }
  return row;
}

std::vector<LemmaCase> selected_cases(const Settings& s, std::vector<AsymptoticRow>& failed) {
  if (!s.has("lemma")) return s.has("functional") ? std::vector<LemmaCase>{} : default_lemma_suite();
  const auto ids = split_list(s.str("lemma"));
  if (ids.empty()) throw UsageError("--lemma: empty case list");
  std::vector<LemmaCase> cases;
  for (const auto& name : ids) {
    LemmaId id;
    try {
      id = parse_lemma_id(name);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    const bool planar = id == LemmaId::LL1 || id == LemmaId::LL11 || id == LemmaId::LL18;
    const int N = s.integer("N", planar ? 2 : 3);
    try {
      if (id == LemmaId::LL1 || id == LemmaId::LL3) {
        const std::string region = s.str("region", "inner");
        if (region != "inner" && region != "annulus") throw UsageError("--region must be inner or annulus");
        cases.push_back(make_power_case(id, N, s.real("alpha", 0.0), s.real("beta", 0.0),
                                        region == "inner" ? Region::Inner : Region::Annulus));
      } else {
        const double m = s.real("m", id == LemmaId::LL16 ? 3.0 : 2.0);
        cases.push_back(make_weight_case(id, N, s.real("tau", 0.0), m, s.real("theta", default_theta(N))));
      }
    } catch (const DomainError& e) {
      AsymptoticRow row;
      row.lemma = name;
      row.N = N;
      row.status = "error";
      row.note = e.what();
      failed.push_back(row);
    }
  }
  return cases;
}

std::string cmd_verify(const Settings& s, int& exit_code) {
  const std::vector<double> Ts = scales(s);
  const int k = s.integer("k", 9);
  const double tol = s.real("tolerance", 0.15);
  std::vector<AsymptoticRow> rows;
  const std::vector<LemmaCase> cases = selected_cases(s, rows);
  const auto fitted = parallel_map<AsymptoticRow>(cases.size(), [&](std::size_t i) { return lemma_row(cases[i], k, Ts, tol); });
  rows.insert(rows.begin(), fitted.begin(), fitted.end());
  if (s.has("functional")) rows.push_back(functional_row(s, Ts));
  if (rows.empty()) throw UsageError("nothing to verify");

  for (const auto& r : rows)
    if (r.status != "pass") exit_code = 1;

  if (format_of(s, "csv") == "json") {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"lemma", r.lemma}, {"branch", r.branch}, {"N", r.N}, {"tau", r.tau}, {"m", r.m},
                     {"alpha", r.alpha}, {"beta", r.beta}, {"theta", r.theta}, {"predicted_rate", r.predicted},
                     {"log_power", r.log_power}, {"fitted_slope", r.slope}, {"residual", r.residual},
                     {"status", r.status}, {"note", r.note}});
    return report("verify-asymptotics", s, {{"rows", arr}}).dump(2) + "\n";
  }
  std::ostringstream os;
  os << "lemma,branch,N,tau,m,alpha,beta,theta,predicted_rate,log_power,fitted_slope,residual,status,note\n";
  for (const auto& r : rows)
    os << r.lemma << ',' << csv_field(r.branch) << ',' << r.N << ',' << fmt17(r.tau) << ',' << fmt17(r.m) << ','
       << fmt17(r.alpha) << ',' << fmt17(r.beta) << ',' << fmt17(r.theta) << ',' << fmt17(r.predicted) << ','
       << fmt17(r.log_power) << ',' << fmt17(r.slope) << ',' << fmt17(r.residual) << ',' << r.status << ','
       << csv_field(r.note) << '\n';
  return os.str();
}

// --- simulate -------------------------------------------------------------

SimConfig sim_config(const Settings& s) {
  SimConfig c;
  c.params = problem_params(s);
  try {
    c.initial = parse_initial_kind(s.str("initial", "zero"));
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  if (c.initial == InitialKind::Custom) throw UsageError("custom initial data are only available through the library");
  if (c.initial == InitialKind::Stationary && !s.has("f-val") && !s.has("g-val"))
    std::tie(c.f_val, c.g_val) = stationary_boundary_data(c.params);
  c.f_val = s.real("f-val", c.f_val);
  c.g_val = s.real("g-val", c.g_val);
  c.r_max = s.real("r-max", 0.0);
  c.dr = s.real("dr", c.dr);
  c.cfl = s.real("cfl", c.cfl);
  c.t_final = s.real("t-final", c.t_final);
  c.blowup_threshold = s.real("threshold", c.blowup_threshold);
  c.epsilon = s.real("epsilon", 0.0);
  c.signed_nonlinearity = s.flag("signed");
  c.confirm_blowup = !s.flag("no-confirm");
  c.sample_dt = s.real("sample-dt", 0.0);
  return c;
}

json run_json(const RunResult& r) {
  json series = {{"t", json::array()}, {"sup_u", json::array()}, {"sup_v", json::array()},
                 {"energy_proxy", json::array()}};
  if (r.has_reference) series["max_err"] = json::array();
  for (const auto& row : r.series) {
    series["t"].push_back(row.t);
    series["sup_u"].push_back(row.sup_u);
    series["sup_v"].push_back(row.sup_v);
    series["energy_proxy"].push_back(row.energy_proxy);
    if (r.has_reference) series["max_err"].push_back(row.max_err);
  }
  json j = {{"verdict", to_string(r.verdict)},
            {"steps", r.final_state.steps},
            {"dt", r.final_state.dt},
            {"t_end", r.final_state.t},
            {"relative_drift", r.relative_drift}};
  j["t_blow"] = r.verdict == SimVerdict::BoundedToHorizon ? json(nullptr) : json(r.t_blow);
  j["t_blow_confirm"] = r.t_blow_confirm ? json(*r.t_blow_confirm) : json(nullptr);
  j["max_error"] = r.has_reference ? json(r.max_error) : json(nullptr);
  j["series"] = series;
  return j;
}

std::string series_csv(const RunResult& r) {
  std::ostringstream os;
  os << "t,sup_u,sup_v,energy_proxy" << (r.has_reference ? ",max_err" : "") << '\n';
  for (const auto& row : r.series) {
    os << fmt17(row.t) << ',' << fmt17(row.sup_u) << ',' << fmt17(row.sup_v) << ',' << fmt17(row.energy_proxy);
    if (r.has_reference) os << ',' << fmt17(row.max_err);
    os << '\n';
  }
  return os.str();
}

struct SimOutput {
  std::string main;
  std::string verdict;  // JSON verdict for csv mode
};

SimOutput cmd_simulate(const Settings& s, int& exit_code) {
  const SimConfig c = sim_config(s);
  validate(c);

  if (s.flag("probe")) {
    const ProbeResult p = dichotomy_probe(c.params, c);
    json j = {{"classified", classification_json(p.classified)},
              {"agree", p.agree},
              {"vacuous", p.vacuous},
              {"note", p.note}};
    j["simulated"] = p.simulated ? json(to_string(*p.simulated)) : json(nullptr);
    j["run"] = p.run ? run_json(*p.run) : json(nullptr);
    if (!p.agree) exit_code = 1;
    return {report("simulate", s, {{"probe", j}}).dump(2) + "\n", ""};
  }

  if (s.has("refinements")) {
    const ConvergenceReport rep = convergence_order(c, s.integer("refinements"), s.real("factor", 2.0));
    json j = {{"dr", rep.dr}, {"errors", rep.errors}, {"orders", rep.orders}, {"order", rep.order},
              {"degenerate", rep.degenerate}};
    return {report("simulate", s, {{"convergence", j}}).dump(2) + "\n", ""};
  }

  const RunResult r = run(c);
  json full = run_json(r);
  if (format_of(s, "json") == "json") return {report("simulate", s, full).dump(2) + "\n", ""};
  full.erase("series");
  return {series_csv(r), report("simulate", s, full).dump(2) + "\n"};
}

// --- exponents ------------------------------------------------------------

std::string cmd_exponents(const Settings& s) {
  const int N = s.integer("N");
  const double a = s.real("a", 0.0);
  const HistoricalExponents h = historical_exponents(N, a);
  if (format_of(s, "json") == "csv") {
    std::ostringstream os;
    os << "N,a,strauss,kato,zhang\n"
       << N << ',' << fmt17(a) << ',' << fmt17(h.strauss) << ',' << fmt17(h.kato) << ','
       << (h.zhang ? fmt17(*h.zhang) : std::string("")) << '\n';
    return os.str();
  }
  json j = {{"strauss", h.strauss}, {"kato", h.kato}, {"zhang_note", h.zhang_note}};
  j["zhang"] = h.zhang ? json(*h.zhang) : json(nullptr);
  return report("exponents", s, j).dump(2) + "\n";
}

// --- plumbing -------------------------------------------------------------

struct Subcommand {
  std::string name;
  std::string help;
  std::vector<OptionSpec> options;
  CLI::App* app = nullptr;
  std::map<std::string, std::string> storage{};
  std::map<std::string, CLI::Option*> handles{};
};

std::vector<OptionSpec> simulate_options() {
  return concat({kCommonOptions, kParamOptions,
                 {{"f-val", "boundary datum for u (default 0; stationary data use the pair's trace)"},
                  {"g-val", "boundary datum for v"},
                  {"r-max", "outer radius (default r0 + t_final + 1)"},
                  {"dr", "grid spacing (default 0.02)"},
                  {"cfl", "dt / dr, in (0, 1] (default 0.5)"},
                  {"t-final", "time horizon (default 1)"},
                  {"threshold", "blow-up threshold (default 1e8)"},
                  {"initial", "zero | stationary | decay_pair"},
                  {"epsilon", "relative perturbation of stationary data"},
                  {"signed", "use |v|^(p-1) v instead of |v|^p", true},
                  {"no-confirm", "skip the dt/2 blow-up confirmation", true},
                  {"sample-dt", "time-series cadence (default every step)"},
                  {"probe", "classify and simulate the standard instance", true},
                  {"refinements", "run a convergence study on this many grids"},
                  {"factor", "refinement factor of the convergence study (default 2)"},
                  {"verdict-out", "csv format: write the JSON verdict to this path"}}});
}

void write_to(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
}

}  // namespace

std::map<std::string, std::string> report_config(const std::string& json_text) {
  const json j = json::parse(json_text);
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : j.at("config").items()) out[k] = v.get<std::string>();
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fujita-type blow-up criteria for wave systems in exterior domains", "ewl"};
  app.require_subcommand(1);

  std::vector<Subcommand> subs;
  subs.push_back({"classify", "classify a parameter tuple", concat({kCommonOptions, kParamOptions})});
  subs.push_back({"sweep", "phase diagram over a (p,q) grid",
                  concat({kCommonOptions, kParamOptions,
                          {{"p-min", "first p"}, {"p-max", "last p"}, {"p-step", "p increment"},
                           {"q-min", "first q"}, {"q-max", "last q"}, {"q-step", "q increment"}}})});
  subs.push_back({"verify-asymptotics", "fit the T-rates of the test-function integrals",
                  concat({kCommonOptions, kParamOptions,
                          {{"lemma", "comma-separated lemma ids (default: the whole suite)"},
                           {"tau", "weight exponent tau"},
                           {"m", "Holder exponent m"},
                           {"theta", "time-scaling power (default N+4)"},
                           {"alpha", "power of |x| (LL1, LL3)"},
                           {"beta", "power of the logarithmic factor (LL1, LL3)"},
                           {"region", "inner | annulus (LL1, LL3)"},
                           {"k", "cutoff power (default 9)"},
                           {"T", "comma-separated scales (default 1e2..1e4, 5 samples)"},
                           {"tolerance", "slope tolerance (default 0.15)"},
                           {"functional", "also fit the contradiction functional: ViaF | ViaG | ViaF_mixed | ViaG_mixed"},
                           {"functional-tolerance", "slope tolerance of the functional row (default 0.2)"}}})});
  subs.push_back({"simulate", "run the radial solver", simulate_options()});
  subs.push_back({"exponents", "historical critical exponents",
                  concat({kCommonOptions, {{"N", "space dimension"}, {"a", "weight exponent (default 0)"}}})});

  for (auto& sub : subs) {
    sub.app = app.add_subcommand(sub.name, sub.help);
    for (const auto& o : sub.options) {
      if (o.flag) {
        sub.handles[o.key] = sub.app->add_flag("--" + o.key, o.help);
      } else {
        sub.handles[o.key] = sub.app->add_option("--" + o.key, sub.storage[o.key], o.help);
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << "run 'ewl --help' for usage\n";
    return 2;
  }

  Subcommand* active = nullptr;
  for (auto& sub : subs)
    if (sub.app->parsed()) active = &sub;
  if (active == nullptr) {
    err << "usage error: a subcommand is required\n";
    return 2;
  }

  try {
    std::set<std::string> allowed;
    for (const auto& o : active->options)
      if (o.key != "config") allowed.insert(o.key);
    Settings settings(allowed);
    if (active->handles["config"]->count() > 0) {
      std::ifstream f(active->storage["config"]);
      if (!f) throw UsageError("cannot read config file '" + active->storage["config"] + "'");
      json j;
      try {
        j = json::parse(f);
      } catch (const json::exception& e) {
        throw UsageError(std::string("malformed config file: ") + e.what());
      }
      settings.merge_json(j);
    }
    for (const auto& o : active->options) {
      if (o.key == "config" || active->handles[o.key]->count() == 0) continue;
      settings.set(o.key, o.flag ? "true" : active->storage[o.key]);
    }

    int code = 0;
    std::string text, verdict;
    if (active->name == "classify") {
      text = cmd_classify(settings);
    } else if (active->name == "sweep") {
      text = cmd_sweep(settings);
    } else if (active->name == "verify-asymptotics") {
      text = cmd_verify(settings, code);
    } else if (active->name == "simulate") {
      SimOutput so = cmd_simulate(settings, code);
      text = so.main;
      verdict = so.verdict;
    } else {
      text = cmd_exponents(settings);
    }

    if (settings.has("out"))
      write_to(settings.str("out"), text);
    else
      out << text;
    if (!verdict.empty()) {
      if (settings.has("verdict-out"))
        write_to(settings.str("verdict-out"), verdict);
      else if (settings.has("out"))
        out << verdict;
    }
    return code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ewl
