#include "ewl/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "ewl/error.hpp"
#include "ewl/parallel.hpp"

namespace ewl {
namespace {

constexpr double kBlowupAgreement = 0.10;  // relative t_blow agreement under dt halving

std::size_t grid_intervals(const SimConfig& c) {
  const double span = effective_r_max(c) - c.params.r0;
  return static_cast<std::size_t>(std::ceil(span / c.dr - 1e-9));
}

// Per-field data. u is driven by r^a F(v) with exponent p, v by r^b G(u) with q;
// the same Field/advance path serves both so the exchange symmetry is exact.
struct Field {
  double exponent = 1.0;
  std::vector<double> weight;  // r_i^a
  bool dirichlet = true;
  double data = 0.0;
  std::vector<double> initial;
  std::function<double(double, double)> outer;  // reference trace at r_max, if any
};

class Stepper {
 public:
  Stepper(const SimConfig& config, const std::vector<double>& r, double dt,
          const std::vector<double>& u0, const std::vector<double>& v0)
      : cfg_(config), r_(r), dt_(dt) {
    const auto& P = config.params;
    const bool u_dirichlet = P.boundary != BoundaryKind::Neumann;
    const bool v_dirichlet = P.boundary == BoundaryKind::Dirichlet;
    u_ = make_field(P.p, P.a, u_dirichlet, config.f_val, u0);
    v_ = make_field(P.q, P.b, v_dirichlet, config.g_val, v0);
    if (auto ref = reference_solution(config)) {
      u_.outer = ref->u;
      v_.outer = ref->v;
    }
    radial_.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) radial_[i] = (P.N - 1) / (2.0 * config.dr * r[i]);
  }

  double source(double w, double exponent) const {
    const double mag = std::pow(std::abs(w), exponent);
    return cfg_.signed_nonlinearity ? std::copysign(mag, w) : mag;
  }

  double laplacian(const std::vector<double>& w, std::size_t i, double left) const {
    const double inv_dr2 = 1.0 / (cfg_.dr * cfg_.dr);
    return (w[i + 1] - 2.0 * w[i] + left) * inv_dr2 + radial_[i] * (w[i + 1] - left);
  }

  // Left neighbour of node 0 from the Neumann closure -w_r(r0) = data.
  double ghost(const Field& f, const std::vector<double>& w) const { return w[1] + 2.0 * cfg_.dr * f.data; }

  double outer_value(const Field& f, double t) const {
    return f.outer ? f.outer(r_.back(), t) : f.initial.back();
  }

  void advance(const Field& f, const std::vector<double>& w, const std::vector<double>& w_prev,
               const std::vector<double>& other, double t_next, std::vector<double>& out) const {
    const std::size_t M = w.size() - 1;
    const double dt2 = dt_ * dt_;
    out.resize(w.size());
    for (std::size_t i = 1; i < M; ++i)
      out[i] = 2.0 * w[i] - w_prev[i] + dt2 * (laplacian(w, i, w[i - 1]) + f.weight[i] * source(other[i], f.exponent));
    if (f.dirichlet) {
      out[0] = f.data;
    } else {
      out[0] = 2.0 * w[0] - w_prev[0] +
               dt2 * (laplacian(w, 0, ghost(f, w)) + f.weight[0] * source(other[0], f.exponent));
    }
    out[M] = outer_value(f, t_next);
  }

  // Second-order Taylor start: w(-dt) = w0 - dt w_t + dt^2/2 (Lap w0 + source).
  std::vector<double> previous_level(const Field& f, const std::vector<double>& w0, const std::vector<double>& wt0,
                                     const std::vector<double>& other0) const {
    const std::size_t M = w0.size() - 1;
    std::vector<double> prev(w0.size());
    const double half = 0.5 * dt_ * dt_;
    for (std::size_t i = 1; i < M; ++i)
      prev[i] = w0[i] - dt_ * wt0[i] + half * (laplacian(w0, i, w0[i - 1]) + f.weight[i] * source(other0[i], f.exponent));
    if (f.dirichlet) {
      prev[0] = f.data;
    } else {
      prev[0] = w0[0] - dt_ * wt0[0] +
                half * (laplacian(w0, 0, ghost(f, w0)) + f.weight[0] * source(other0[0], f.exponent));
    }
    prev[M] = outer_value(f, -dt_);
    return prev;
  }

  const Field& u() const { return u_; }
  const Field& v() const { return v_; }

 private:
  Field make_field(double exponent, double power, bool dirichlet, double data, const std::vector<double>& w0) const {
    Field f;
    f.exponent = exponent;
    f.dirichlet = dirichlet;
    f.data = data;
    f.initial = w0;
    f.weight.resize(r_.size());
    for (std::size_t i = 0; i < r_.size(); ++i) f.weight[i] = power == 0.0 ? 1.0 : std::pow(r_[i], power);
    return f;
  }

  const SimConfig& cfg_;
  const std::vector<double>& r_;
  double dt_;
  Field u_, v_;
  std::vector<double> radial_;
};

double sup_abs(const std::vector<double>& w) {
  double m = 0.0;
  for (double x : w) {
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(x));
  }
  return m;
}

long total_steps(const SimConfig& c, double dt) {
  return c.t_final == 0.0 ? 0 : std::lround(c.t_final / dt);
}

// Unit-sphere-weighted 1/2 int (w_t^2 + w_r^2) r^(N-1) dr over both fields,
// with backward time differences and forward space differences.
double energy_proxy(const RadialState& s, int N) {
  if (s.steps == 0 || s.r.size() < 2) return 0.0;
  const double dr = s.r[1] - s.r[0];
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < s.r.size(); ++i) {
    const double ut = (s.u[i] - s.u_prev[i]) / s.dt;
    const double vt = (s.v[i] - s.v_prev[i]) / s.dt;
    const double ur = (s.u[i + 1] - s.u[i]) / dr;
    const double vr = (s.v[i + 1] - s.v[i]) / dr;
    e += 0.5 * (ut * ut + vt * vt + ur * ur + vr * vr) * std::pow(s.r[i], N - 1.0) * dr;
  }
  return unit_sphere_area(N) * e;
}

void mark_blowup(RadialState& s, double threshold) {
  const double su = sup_abs(s.u);
  const double sv = sup_abs(s.v);
  if (!(su < threshold) || !(sv < threshold)) {
    s.status = StepStatus::BlownUp;
    s.t_blow = s.t;
  }
}

RadialState step_with(const Stepper& stepper, const RadialState& state, const SimConfig& config) {
  RadialState next;
  next.r = state.r;
  next.dt = state.dt;
  next.steps = state.steps + 1;
  next.t = next.steps * state.dt;
  stepper.advance(stepper.u(), state.u, state.u_prev, state.v, next.t, next.u);
  stepper.advance(stepper.v(), state.v, state.v_prev, state.u, next.t, next.v);
  next.u_prev = state.u;
  next.v_prev = state.v;
  mark_blowup(next, config.blowup_threshold);
  if (next.status == StepStatus::Running && next.steps >= total_steps(config, state.dt))
    next.status = StepStatus::Completed;
  return next;
}

std::vector<double> grid(const SimConfig& c) {
  const std::size_t M = grid_intervals(c);
  std::vector<double> r(M + 1);
  for (std::size_t i = 0; i <= M; ++i) r[i] = c.params.r0 + static_cast<double>(i) * c.dr;
  return r;
}

struct InitialData {
  std::vector<double> u, v, ut, vt;
};

InitialData initial_data(const SimConfig& c, const std::vector<double>& r) {
  const std::size_t n = r.size();
  InitialData d{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                std::vector<double>(n, 0.0)};
  switch (c.initial) {
    case InitialKind::Zero:
      break;
    case InitialKind::Stationary: {
      const StationaryPair pair = stationary_pair(c.params);
      for (std::size_t i = 0; i < n; ++i) {
        d.u[i] = (1.0 + c.epsilon) * pair.u(r[i]);
        d.v[i] = (1.0 + c.epsilon) * pair.v(r[i]);
      }
      break;
    }
    case InitialKind::DecayPair: {
      const DecayPair pair = decay_pair(c.params);
      std::fill(d.u.begin(), d.u.end(), pair.u(0.0));
      std::fill(d.v.begin(), d.v.end(), pair.v(0.0));
      std::fill(d.ut.begin(), d.ut.end(), pair.ut(0.0));
      std::fill(d.vt.begin(), d.vt.end(), pair.vt(0.0));
      break;
    }
    case InitialKind::Custom:
      for (std::size_t i = 0; i < n; ++i) {
        d.u[i] = c.custom.u(r[i]);
        d.v[i] = c.custom.v(r[i]);
        d.ut[i] = c.custom.ut(r[i]);
        d.vt[i] = c.custom.vt(r[i]);
      }
      break;
  }
  const bool u_dirichlet = c.params.boundary != BoundaryKind::Neumann;
  const bool v_dirichlet = c.params.boundary == BoundaryKind::Dirichlet;
  if (u_dirichlet) d.u[0] = c.f_val;
  if (v_dirichlet) d.v[0] = c.g_val;
  return d;
}

bool close(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)}); }

double initial_support(const SimConfig& c) {
  return c.initial == InitialKind::Custom ? c.custom.support : 0.0;
}

}  // namespace

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::Zero: return "zero";
    case InitialKind::Stationary: return "stationary";
    case InitialKind::DecayPair: return "decay_pair";
    case InitialKind::Custom: return "custom";
  }
  return "unknown";
}

InitialKind parse_initial_kind(const std::string& name) {
  for (InitialKind k : {InitialKind::Zero, InitialKind::Stationary, InitialKind::DecayPair, InitialKind::Custom})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown initial data '" + name + "' (zero, stationary, decay_pair, custom)");
}

std::string to_string(SimVerdict v) {
  switch (v) {
    case SimVerdict::BlewUp: return "BlewUp";
    case SimVerdict::BoundedToHorizon: return "BoundedToHorizon";
    case SimVerdict::NumericalInstability: return "NumericalInstability";
  }
  return "unknown";
}

double effective_r_max(const SimConfig& c) {
  if (c.r_max > 0.0) return c.r_max;
  return c.params.r0 + c.t_final + initial_support(c) + 1.0;
}

double time_step(const SimConfig& c) {
  const double dt_max = c.cfl * c.dr;
  if (c.t_final <= 0.0) return dt_max;
  const double n = std::ceil(c.t_final / dt_max - 1e-9);
  return c.t_final / n;
}

std::pair<double, double> stationary_boundary_data(const ProblemParams& params) {
  const StationaryPair pair = stationary_pair(params);
  const double r0 = params.r0;
  switch (params.boundary) {
    case BoundaryKind::Dirichlet: return {pair.u(r0), pair.v(r0)};
    case BoundaryKind::Neumann: return {-pair.du(r0), -pair.dv(r0)};
    case BoundaryKind::Mixed: return {pair.u(r0), -pair.dv(r0)};
  }
  return {0.0, 0.0};
}

void validate(const SimConfig& c) {
  const auto& P = c.params;
  if (P.N < 2) throw DomainError("simulation needs N >= 2");
  if (!(P.p > 0.0 && P.q > 0.0)) throw DomainError("simulation needs p, q > 0");
  if (!(P.r0 > 0.0) || !std::isfinite(P.r0)) throw DomainError("simulation needs r0 > 0");
  if (!std::isfinite(P.a) || !std::isfinite(P.b)) throw DomainError("weights a, b must be finite");
  if (!(c.dr > 0.0) || !std::isfinite(c.dr)) throw ConfigError("dr must be positive");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw ConfigError("CFL violation: cfl must lie in (0, 1]");
  if (!(c.t_final >= 0.0) || !std::isfinite(c.t_final)) throw ConfigError("t_final must be >= 0");
  if (!(c.blowup_threshold > 0.0)) throw ConfigError("blowup_threshold must be positive");
  if (!std::isfinite(c.f_val) || !std::isfinite(c.g_val)) throw ConfigError("boundary data must be finite");
  if (!(c.sample_dt >= 0.0)) throw ConfigError("sample_dt must be >= 0");

  switch (c.initial) {
    case InitialKind::Zero:
      break;
    case InitialKind::Stationary: {
      const auto [f, g] = stationary_boundary_data(P);
      if (!close(f, c.f_val) || !close(g, c.g_val)) {
        std::ostringstream os;
        os.precision(17);
        os << "stationary data need boundary data matching the pair's traces: f_val=" << f << ", g_val=" << g;
        throw ConfigError(os.str());
      }
      break;
    }
    case InitialKind::DecayPair:
      if (P.a != 0.0 || P.b != 0.0) throw DomainError("decay-pair data solve the PDE only for a = b = 0");
      if (P.boundary != BoundaryKind::Neumann || c.f_val != 0.0 || c.g_val != 0.0)
        throw ConfigError("decay-pair data need Neumann conditions with f_val = g_val = 0");
      decay_pair(P);
      break;
    case InitialKind::Custom:
      if (!c.custom.u || !c.custom.v || !c.custom.ut || !c.custom.vt)
        throw ConfigError("custom initial data need all four profiles");
      if (!(c.custom.support >= 0.0)) throw ConfigError("custom support radius must be >= 0");
      break;
  }

  const double r_max = effective_r_max(c);
  if (!(r_max >= P.r0 + 2.0 * c.dr)) throw ConfigError("r_max leaves fewer than two grid cells");
  const bool manufactured = c.initial == InitialKind::Stationary || c.initial == InitialKind::DecayPair;
  if (!manufactured && r_max < P.r0 + c.t_final + initial_support(c)) {
    std::ostringstream os;
    os << "r_max=" << r_max << " is reachable by the signal: need r_max >= r0 + t_final + support = "
       << P.r0 + c.t_final + initial_support(c);
    throw ConfigError(os.str());
  }
}

std::optional<Reference> reference_solution(const SimConfig& c) {
  if (c.initial == InitialKind::Stationary && c.epsilon == 0.0) {
    const StationaryPair pair = stationary_pair(c.params);
    return Reference{[pair](double r, double) { return pair.u(r); }, [pair](double r, double) { return pair.v(r); }};
  }
  if (c.initial == InitialKind::DecayPair) {
    const DecayPair pair = decay_pair(c.params);
    return Reference{[pair](double, double t) { return pair.u(t); }, [pair](double, double t) { return pair.v(t); }};
  }
  return std::nullopt;
}

RadialState initial_state(const SimConfig& c) {
  validate(c);
  RadialState s;
  s.r = grid(c);
  s.dt = time_step(c);
  const InitialData d = initial_data(c, s.r);
  const Stepper stepper(c, s.r, s.dt, d.u, d.v);
  s.u = d.u;
  s.v = d.v;
  s.u_prev = stepper.previous_level(stepper.u(), d.u, d.ut, d.v);
  s.v_prev = stepper.previous_level(stepper.v(), d.v, d.vt, d.u);
  if (total_steps(c, s.dt) == 0) s.status = StepStatus::Completed;
  mark_blowup(s, c.blowup_threshold);
  return s;
}

RadialState step(const RadialState& state, const SimConfig& config) {
  if (state.status != StepStatus::Running) throw ConfigError("step needs a running state");
  if (state.dt > config.cfl * config.dr * (1.0 + 1e-12)) throw ConfigError("CFL violation: dt > cfl * dr");
  if (state.u.size() != state.r.size() || state.v.size() != state.r.size() || state.r.size() < 3)
    throw ConfigError("state arrays do not match the grid");
  const InitialData d = initial_data(config, state.r);
  const Stepper stepper(config, state.r, state.dt, d.u, d.v);
  return step_with(stepper, state, config);
}

RunResult run(const SimConfig& config) {
  RunResult out;
  RadialState s = initial_state(config);
  const InitialData d = initial_data(config, s.r);
  const Stepper stepper(config, s.r, s.dt, d.u, d.v);
  const auto ref = reference_solution(config);
  out.has_reference = ref.has_value();

  const long stride = config.sample_dt > 0.0 ? std::max(1L, std::lround(config.sample_dt / s.dt)) : 1L;
  const double scale0 = std::max({sup_abs(s.u), sup_abs(s.v), 1e-300});
  const int N = config.params.N;

  auto error_of = [&](const RadialState& st) {
    if (!ref) return 0.0;
    double e = 0.0;
    for (std::size_t i = 0; i < st.r.size(); ++i) {
      e = std::max(e, std::abs(st.u[i] - ref->u(st.r[i], st.t)));
      e = std::max(e, std::abs(st.v[i] - ref->v(st.r[i], st.t)));
    }
    return e;
  };
  auto record = [&](const RadialState& st, double err) {
    out.series.push_back({st.t, sup_abs(st.u), sup_abs(st.v), energy_proxy(st, N), err});
  };

  record(s, error_of(s));
  while (s.status == StepStatus::Running) {
    s = step_with(stepper, s, config);
    const double err = error_of(s);
    out.max_error = std::max(out.max_error, err);
    double drift = 0.0;
    for (std::size_t i = 0; i < s.r.size(); ++i)
      drift = std::max({drift, std::abs(s.u[i] - d.u[i]), std::abs(s.v[i] - d.v[i])});
    out.relative_drift = std::max(out.relative_drift, drift / scale0);
    if (s.steps % stride == 0 || s.status != StepStatus::Running) record(s, err);
  }

  out.final_state = s;
  if (s.status != StepStatus::BlownUp) {
    out.verdict = SimVerdict::BoundedToHorizon;
    return out;
  }
  out.t_blow = s.t_blow;
  out.verdict = SimVerdict::BlewUp;
  if (config.confirm_blowup) {
    SimConfig half = config;
    half.cfl = config.cfl / 2.0;
    half.confirm_blowup = false;
    const RunResult check = run(half);
    if (check.verdict == SimVerdict::BlewUp) out.t_blow_confirm = check.t_blow;
    const bool stable = check.verdict == SimVerdict::BlewUp &&
                        std::abs(check.t_blow - out.t_blow) <= kBlowupAgreement * out.t_blow;
    if (!stable) out.verdict = SimVerdict::NumericalInstability;
  }
  return out;
}

ConvergenceReport convergence_order(const SimConfig& config, int refinements, double factor) {
  if (refinements < 2) throw ConfigError("convergence study needs at least 2 grids");
  if (!(factor >= 1.0)) throw ConfigError("refinement factor must be >= 1");
  if (!reference_solution(config)) throw ConfigError("convergence study needs manufactured initial data");

  ConvergenceReport rep;
  rep.degenerate = factor == 1.0;
  std::vector<SimConfig> configs;
  for (int i = 0; i < refinements; ++i) {
    SimConfig c = config;
    c.dr = config.dr / std::pow(factor, i);
    c.confirm_blowup = false;
    c.sample_dt = c.t_final;
    configs.push_back(c);
    rep.dr.push_back(c.dr);
  }
  const auto runs = parallel_map<RunResult>(configs.size(), [&](std::size_t i) { return run(configs[i]); });
  for (const auto& r : runs) {
    if (r.verdict != SimVerdict::BoundedToHorizon)
      throw ComputationError("manufactured run blew up during convergence study");
    rep.errors.push_back(r.max_error);
  }
  for (std::size_t i = 0; i + 1 < rep.errors.size(); ++i) {
    const double ratio = rep.errors[i] / rep.errors[i + 1];
    rep.orders.push_back(rep.degenerate ? 0.0 : std::log(ratio) / std::log(factor));
  }
  rep.order = rep.orders.back();
  return rep;
}

ProbeResult dichotomy_probe(const ProblemParams& params, const SimConfig& protocol) {
  ProbeResult out;
  out.classified = classify(params);
  SimConfig c = protocol;
  c.params = params;
  c.epsilon = 0.0;
  c.confirm_blowup = true;
  switch (out.classified.verdict) {
    case Verdict::NotCovered:
      out.agree = true;
      out.vacuous = true;
      out.note = "not covered by the classification; no simulation";
      return out;
    case Verdict::BlowUp: {
      const double area = unit_sphere_area(params.N) * std::pow(params.r0, params.N - 1.0);
      c.initial = InitialKind::Zero;
      c.f_val = params.If / area;
      c.g_val = params.Ig / area;
      out.note = "zero initial data, boundary data If/|S|, Ig/|S|";
      break;
    }
    case Verdict::GlobalCandidate: {
      c.initial = InitialKind::Stationary;
      std::tie(c.f_val, c.g_val) = stationary_boundary_data(params);
      out.note = "stationary pair with matching boundary traces";
      break;
    }
  }
  c.r_max = 0.0;
  RunResult r = run(c);
  out.simulated = r.verdict;
  out.agree = (out.classified.verdict == Verdict::BlowUp && r.verdict == SimVerdict::BlewUp) ||
              (out.classified.verdict == Verdict::GlobalCandidate && r.verdict == SimVerdict::BoundedToHorizon);
  out.run = std::move(r);
  return out;
}

}  // namespace ewl
