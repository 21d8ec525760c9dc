#include "ewl/criticality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ewl/error.hpp"

namespace ewl {
namespace {

enum class Side { Below, Critical, Above };

// Sign of x relative to the critical value N-2, for x = num/den with den > 0.
Side compare_to_threshold(const Rational& num, const Rational& den, int N, bool exact_inputs,
                          double approx) {
  const Rational lhs = num;
  const Rational rhs = Rational(N - 2) * den;
  if (lhs == rhs) return Side::Critical;
  if (!exact_inputs) {
    const double scale = std::max(1.0, static_cast<double>(N - 2));
    if (std::abs(approx - (N - 2)) <= kCriticalBand * scale) return Side::Critical;
  }
  return lhs > rhs ? Side::Above : Side::Below;
}

struct ExactScaling {
  Rational delta_num;  // a + 2 + p(b+2)
  Rational gamma_num;  // b + 2 + q(a+2)
  Rational den;        // pq - 1
};

ExactScaling exact_scaling(const ProblemParams& params) {
  const Rational p = params.exact_p(), q = params.exact_q();
  const Rational a = params.exact_a(), b = params.exact_b();
  return {a + 2 + p * (b + 2), b + 2 + q * (a + 2), p * q - 1};
}

int sgn(double x) { return (x > 0) - (x < 0); }

ConditionRecord flag(std::string name, bool pass) {
  return {std::move(name), pass ? 1.0 : 0.0, 1.0, pass};
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::BlowUp: return "BlowUp";
    case Verdict::GlobalCandidate: return "GlobalCandidate";
    case Verdict::NotCovered: return "NotCovered";
  }
  return "unknown";
}

std::string to_string(Branch b) {
  switch (b) {
    case Branch::ViaF: return "ViaF";
    case Branch::ViaG: return "ViaG";
    case Branch::DimensionTwo: return "DimensionTwo";
    case Branch::None: return "None";
  }
  return "unknown";
}

ScalingExponents scaling_exponents(const ProblemParams& params) {
  const double den = params.p * params.q - 1.0;
  if (!(den > 0.0) || params.exact_p() * params.exact_q() <= 1)
    throw DomainError("scaling exponents undefined: pq <= 1");
  return {(params.a + 2.0 + params.p * (params.b + 2.0)) / den,
          (params.b + 2.0 + params.q * (params.a + 2.0)) / den};
}

void validate_theorem_params(const ProblemParams& params) {
  auto fail = [](const std::string& what) { throw DomainError("invalid parameters: " + what); };
  for (double x : {params.p, params.q, params.a, params.b, params.r0, params.If, params.Ig})
    if (!std::isfinite(x)) fail("all parameters must be finite");
  if (params.N < 2) fail("N >= 2 required (got " + std::to_string(params.N) + ")");
  if (params.exact_p() <= 1) fail("p > 1 required");
  if (params.exact_q() <= 1) fail("q > 1 required");
  if (params.exact_a() < -2) fail("a >= -2 required");
  if (params.exact_b() < -2) fail("b >= -2 required");
  if (!(params.r0 > 0.0)) fail("r0 > 0 required");
}

bool criterion_original_form(const ProblemParams& params) {
  const Rational p = params.exact_p(), q = params.exact_q();
  const Rational a = params.exact_a(), b = params.exact_b();
  const Rational den = p * q - 1;
  if (den <= 0) throw DomainError("criterion undefined: pq <= 1");
  const Rational first = sgn(params.If) * (2 * p * (q + 1) + p * b + a) / den;
  const Rational second = sgn(params.Ig) * (2 * q * (p + 1) + q * a + b) / den;
  return std::max(first, second) > params.N;
}

bool criterion_delta_gamma_form(const ProblemParams& params) {
  const ExactScaling s = exact_scaling(params);
  if (s.den <= 0) throw DomainError("criterion undefined: pq <= 1");
  const Rational threshold = Rational(params.N - 2) * s.den;
  return (params.If > 0 && s.delta_num > threshold) || (params.Ig > 0 && s.gamma_num > threshold);
}

Classification classify(const ProblemParams& params) {
  validate_theorem_params(params);

  Classification out;
  out.exponents = scaling_exponents(params);
  const auto [delta, gamma] = out.exponents;
  const int N = params.N;
  const bool exact_inputs = params.exact.has_value();
  auto& reasons = out.reasons;

  const bool weights_ok = !(params.exact_a() == -2 && params.exact_b() == -2);
  reasons.push_back(flag("(a,b) > (-2,-2)", weights_ok));

  const bool data_ok = params.If >= 0 && params.Ig >= 0 && (params.If > 0 || params.Ig > 0);
  reasons.push_back(flag("(If,Ig) > (0,0)", data_ok));

  bool boundary_ok = true;
  switch (params.boundary) {
    case BoundaryKind::Dirichlet: {
      const bool signs = params.omega_is_ball || (params.f_nonneg && params.g_nonneg);
      reasons.push_back(flag("dirichlet: f,g >= 0 (waived for a ball)", signs));
      boundary_ok = signs;
      break;
    }
    case BoundaryKind::Neumann:
      break;
    case BoundaryKind::Mixed: {
      const bool p_ok = params.exact_p() > 2;
      reasons.push_back({"mixed: p > 2", params.p, 2.0, p_ok});
      const bool sign = params.omega_is_ball || params.f_nonneg;
      reasons.push_back(flag("mixed: f >= 0 (waived for a ball)", sign));
      boundary_ok = p_ok && sign;
      break;
    }
  }

  const ExactScaling s = exact_scaling(params);
  const Side delta_side = compare_to_threshold(s.delta_num, s.den, N, exact_inputs, delta);
  const Side gamma_side = compare_to_threshold(s.gamma_num, s.den, N, exact_inputs, gamma);

  const bool hypotheses = weights_ok && data_ok && boundary_ok;
  Branch branch = Branch::None;
  bool critical = false;

  if (N == 2) {
    reasons.push_back(flag("N = 2: criterion holds automatically", true));
    branch = Branch::DimensionTwo;
  } else {
    const bool f_above = params.If > 0 && delta_side == Side::Above;
    const bool g_above = params.Ig > 0 && gamma_side == Side::Above;
    reasons.push_back({"If > 0 and delta > N-2", delta, static_cast<double>(N - 2), f_above});
    reasons.push_back({"Ig > 0 and gamma > N-2", gamma, static_cast<double>(N - 2), g_above});
    if (f_above && g_above) {
      // Larger margin wins; keeps the branch equivariant under exchange.
      branch = s.gamma_num > s.delta_num ? Branch::ViaG : Branch::ViaF;
    } else if (f_above) {
      branch = Branch::ViaF;
    } else if (g_above) {
      branch = Branch::ViaG;
    } else {
      critical = (params.If > 0 && delta_side == Side::Critical) ||
                 (params.Ig > 0 && gamma_side == Side::Critical);
    }
  }

  if (critical) reasons.push_back(flag("critical curve — open", false));

  if (branch != Branch::None && hypotheses) {
    out.verdict = Verdict::BlowUp;
    out.branch = branch;
    out.summary = "blow-up: no global weak solution exists (" + to_string(branch) + ")";
    return out;
  }

  // Outside the theorem's hypotheses nothing is claimed either way.
  if (N >= 3 && hypotheses) {
    const bool min_ok = s.delta_num > 0 && s.gamma_num > 0;
    const bool max_ok = delta_side == Side::Below && gamma_side == Side::Below;
    reasons.push_back({"min(delta,gamma) > 0", std::min(delta, gamma), 0.0, min_ok});
    reasons.push_back({"max(delta,gamma) < N-2", std::max(delta, gamma), static_cast<double>(N - 2), max_ok});
    if (min_ok && max_ok) {
      out.verdict = Verdict::GlobalCandidate;
      out.summary =
          "global candidate: an explicit positive stationary solution exists, so the criterion is sharp here";
      return out;
    }
  }

  out.verdict = Verdict::NotCovered;
  out.summary = critical ? "not covered: parameters lie on the critical curve (open case)"
                         : "not covered: hypotheses of the nonexistence theorem fail";
  return out;
}

HistoricalExponents historical_exponents(int N, double a) {
  if (N < 2) throw DomainError("historical exponents need N >= 2");
  const double n = N;
  HistoricalExponents h;
  h.strauss = (n + 1.0 + std::sqrt(n * n + 10.0 * n - 7.0)) / (2.0 * (n - 1.0));
  h.kato = (n + 1.0) / (n - 1.0);
  if (N == 2) {
    h.zhang_note = "undefined for N = 2";
  } else if (!(a > -2.0)) {
    h.zhang_note = "undefined for a <= -2";
  } else {
    h.zhang = (n + a) / (n - 2.0);
  }
  return h;
}

double StationaryPair::u(double r) const { return Au * std::pow(r, -delta); }
double StationaryPair::v(double r) const { return Av * std::pow(r, -gamma); }
double StationaryPair::du(double r) const { return -delta * Au * std::pow(r, -delta - 1.0); }
double StationaryPair::dv(double r) const { return -gamma * Av * std::pow(r, -gamma - 1.0); }

StationaryPair stationary_pair(const ProblemParams& params) {
  const int N = params.N;
  if (N < 3) throw DomainError("stationary pair needs N >= 3");
  if (!(params.p > 0 && params.q > 0)) throw DomainError("stationary pair needs p, q > 0");
  if (!(params.p * params.q > 1)) throw DomainError("stationary pair needs pq > 1");
  const auto [delta, gamma] = scaling_exponents(params);
  const double lim = N - 2.0;
  if (!(delta > 0)) throw DomainError("condition min(delta,gamma) > 0 fails: delta <= 0");
  if (!(gamma > 0)) throw DomainError("condition min(delta,gamma) > 0 fails: gamma <= 0");
  if (!(delta < lim)) {
    std::ostringstream os;
    os << "condition max(delta,gamma) < N-2 fails: delta=" << delta << " >= N-2=" << lim;
    throw DomainError(os.str());
  }
  if (!(gamma < lim)) {
    std::ostringstream os;
    os << "condition max(delta,gamma) < N-2 fails: gamma=" << gamma << " >= N-2=" << lim;
    throw DomainError(os.str());
  }
  const double c1 = delta * (lim - delta);
  const double c2 = gamma * (lim - gamma);
  const double e = params.p * params.q - 1.0;
  StationaryPair pair;
  pair.delta = delta;
  pair.gamma = gamma;
  pair.Au = std::exp((std::log(c1) + params.p * std::log(c2)) / e);
  pair.Av = std::exp((std::log(c2) + params.q * std::log(c1)) / e);
  return pair;
}

double DecayPair::u(double t) const { return A1 * std::pow(t + 1.0, -mu); }
double DecayPair::v(double t) const { return A2 * std::pow(t + 1.0, -nu); }
double DecayPair::ut(double t) const { return -mu * A1 * std::pow(t + 1.0, -mu - 1.0); }
double DecayPair::vt(double t) const { return -nu * A2 * std::pow(t + 1.0, -nu - 1.0); }
double DecayPair::utt(double t) const { return mu * (mu + 1.0) * A1 * std::pow(t + 1.0, -mu - 2.0); }
double DecayPair::vtt(double t) const { return nu * (nu + 1.0) * A2 * std::pow(t + 1.0, -nu - 2.0); }

DecayPair decay_pair(const ProblemParams& params) {
  if (params.a > 0 || params.b > 0) throw DomainError("decay pair construction requires a, b <= 0");
  if (!(params.p > 0 && params.q > 0)) throw DomainError("decay pair needs p, q > 0");
  if (!(params.p * params.q > 1)) throw DomainError("decay pair needs pq > 1");
  if (!(params.r0 > 0)) throw DomainError("decay pair needs r0 > 0");
  const double e = params.p * params.q - 1.0;
  DecayPair pair;
  pair.mu = 2.0 * (params.p + 1.0) / e;
  pair.nu = 2.0 * (params.q + 1.0) / e;
  // A1 mu(mu+1) = r0^a A2^p, A2 nu(nu+1) = r0^b A1^q.
  const double log_c1 = std::log(pair.mu * (pair.mu + 1.0)) - params.a * std::log(params.r0);
  const double log_c2 = std::log(pair.nu * (pair.nu + 1.0)) - params.b * std::log(params.r0);
  pair.A1 = std::exp((log_c1 + params.p * log_c2) / e);
  pair.A2 = std::exp((log_c2 + params.q * log_c1) / e);
  return pair;
}

double PairResidual::relative_u() const { return std::abs(u) / std::max(std::abs(rhs_u), 1e-300); }
double PairResidual::relative_v() const { return std::abs(v) / std::max(std::abs(rhs_v), 1e-300); }

PairResidual residual_stationary(const StationaryPair& pair, const ProblemParams& params, double r) {
  if (!(r > 0)) throw DomainError("residual needs r > 0");
  const double lim = params.N - 2.0;
  const double neg_lap_u = pair.Au * pair.delta * (lim - pair.delta) * std::pow(r, -pair.delta - 2.0);
  const double neg_lap_v = pair.Av * pair.gamma * (lim - pair.gamma) * std::pow(r, -pair.gamma - 2.0);
  const double rhs_u = std::pow(r, params.a) * std::pow(pair.v(r), params.p);
  const double rhs_v = std::pow(r, params.b) * std::pow(pair.u(r), params.q);
  return {neg_lap_u - rhs_u, neg_lap_v - rhs_v, rhs_u, rhs_v};
}

PairResidual residual_decay(const DecayPair& pair, const ProblemParams& params, double t) {
  const double rhs_u = std::pow(params.r0, params.a) * std::pow(pair.v(t), params.p);
  const double rhs_v = std::pow(params.r0, params.b) * std::pow(pair.u(t), params.q);
  return {pair.utt(t) - rhs_u, pair.vtt(t) - rhs_v, rhs_u, rhs_v};
}

}  // namespace ewl
