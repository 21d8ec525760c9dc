#include "ewl/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ewl/criticality.hpp"
#include "ewl/error.hpp"
#include "ewl/quadrature.hpp"

namespace ewl {
namespace {

constexpr double kQuadTol = 1e-11;

// H at r = e^x, accurate as x -> 0.
double harmonic_from_log(int N, double x) { return N == 2 ? x : -std::expm1(-(N - 2) * x); }

bool is_time_derivative_case(LemmaId id) {
  return id == LemmaId::LL11 || id == LemmaId::LL12 || id == LemmaId::LL13 || id == LemmaId::LL16;
}

bool is_laplacian_case(LemmaId id) {
  return id == LemmaId::LL18 || id == LemmaId::LL19 || id == LemmaId::LL20 || id == LemmaId::LL23;
}

bool is_power_case(LemmaId id) { return id == LemmaId::LL1 || id == LemmaId::LL3; }

// Laplacian of H xi(r/T)^k and of xi(r/T)^k with the common factor xi^(k-2) removed.
struct ReducedLaplacians {
  double of_harmonic_weight = 0.0;
  double of_cutoff = 0.0;
};

ReducedLaplacians reduced_laplacians(int N, int k, double T, double r, const ProfileValue& xi,
                                     const ProfileValue& H) {
  const double cross = k * xi.value * xi.d1 / T;  // (xi^k)' / xi^(k-2)
  const double cutoff = k * (k - 1) * xi.d1 * xi.d1 / (T * T) + k * xi.value * xi.d2 / (T * T) +
                        (N - 1) * cross / r;
  return {2.0 * H.d1 * cross + H.value * cutoff, cutoff};
}

double space_density(const LemmaCase& c, const TestFunctionFamily& fam, double r, double H) {
  if (is_power_case(c.id)) {
    if (H <= 0.0 && c.beta < 0.0) return 0.0;
    return std::pow(r, c.alpha) * std::pow(H, c.beta);
  }
  const double e = 1.0 / (c.m - 1.0);
  const double w = c.m / (c.m - 1.0);
  const double weight = std::pow(r, -c.tau * e);
  const ProfileValue xi = spatial_cutoff(r / fam.T);
  const int k = fam.k;
  switch (c.id) {
    case LemmaId::LL11:
    case LemmaId::LL12:
      return weight * H * std::pow(xi.value, k);
    case LemmaId::LL13:
      return weight * std::pow(xi.value, k);
    case LemmaId::LL16:
      if (H <= 0.0) return 0.0;
      return weight * std::pow(H, -e) * std::pow(xi.value, k);
    default:
      break;
  }
  ProfileValue Hd = harmonic_H_derivatives(fam.N, std::max(r, 1.0));
  Hd.value = H;
  const ReducedLaplacians g = reduced_laplacians(fam.N, k, fam.T, r, xi, Hd);
  const double xi_power = std::pow(xi.value, k - 2.0 * w);
  switch (c.id) {
    case LemmaId::LL18:
    case LemmaId::LL19:
      if (g.of_harmonic_weight == 0.0 || H <= 0.0) return 0.0;
      return weight * std::pow(H, -e) * xi_power * std::pow(std::abs(g.of_harmonic_weight), w);
    case LemmaId::LL20:
      return weight * xi_power * std::pow(std::abs(g.of_cutoff), w);
    case LemmaId::LL23:
      if (g.of_cutoff == 0.0 || H <= 0.0) return 0.0;
      return weight * std::pow(H, -e) * xi_power * std::pow(std::abs(g.of_cutoff), w);
    default:
      return 0.0;
  }
}

// Time integrand in the scaled variable s = t / T^theta, without powers of T.
double scaled_time_density(const LemmaCase& c, int k, double s) {
  if (!(s > 0.0 && s < 1.0)) return 0.0;
  const double log_bump = -1.0 / (s * (1.0 - s));
  if (is_time_derivative_case(c.id)) {
    const double w = c.m / (c.m - 1.0);
    return std::exp(k * log_bump + w * temporal_log_second_factor(k, s));
  }
  return std::exp(k * log_bump);
}

void check_case_family(const LemmaCase& c, const TestFunctionFamily& fam) {
  if (c.N != fam.N) throw DomainError("lemma case and test-function family disagree on N");
  if (is_power_case(c.id)) return;
  if (c.theta != fam.theta) throw DomainError("lemma case and test-function family disagree on theta");
  if (!(fam.k > 2.0 * c.m / (c.m - 1.0)))
    throw DomainError("k must exceed 2m/(m-1) for the lemma integrand to be integrable");
}

double log_sum_exp(double x, double y) {
  const double hi = std::max(x, y);
  if (!std::isfinite(hi)) return hi;
  return hi + std::log(std::exp(x - hi) + std::exp(y - hi));
}

struct PowerTerm {
  double exponent = 0.0;
  double log_power = 0.0;
};

// alpha(T) for the pair (m, tau) = (q, b); beta(T) uses (p, a).
std::pair<PowerTerm, PowerTerm> functional_terms(int N, double m, double tau, double theta) {
  PowerTerm first;
  PowerTerm second;
  if (N == 2) {
    first = {(theta * (m - 1.0) - tau - 2.0) / m, (m - 1.0) / m};
    if (tau >= 2.0 * (m - 1.0))
      second = {-(m + 1.0) * theta / m, (2.0 * m - 2.0) / m};
    else
      second = {(2.0 * (m - 1.0) - tau - (m + 1.0) * theta) / m, (m - 1.0) / m};
  } else {
    first = {((N - 2.0 + theta) * (m - 1.0) - tau - 2.0) / m, 0.0};
    if (tau >= N * (m - 1.0))
      second = {-(m + 1.0) * theta / m, (m - 1.0) / m};
    else
      second = {(N * (m - 1.0) - tau - (m + 1.0) * theta) / m, 0.0};
  }
  return {first, second};
}

double single_threshold(int N, double m, double tau) {
  const double border = N == 2 ? 2.0 * (m - 1.0) : N * (m - 1.0);
  if (tau < border) return 1.0;
  const double shift = N == 2 ? 0.0 : (N - 2.0) * (m - 1.0);
  return (tau + 2.0 - shift) / (2.0 * m);
}

double log_two_terms(const std::pair<PowerTerm, PowerTerm>& terms, double L, double LL) {
  return log_sum_exp(terms.first.exponent * L + terms.first.log_power * LL,
                     terms.second.exponent * L + terms.second.log_power * LL);
}

}  // namespace

double harmonic_H(int N, double r) { return harmonic_H_derivatives(N, r).value; }

ProfileValue harmonic_H_derivatives(int N, double r) {
  if (N < 2) throw DomainError("harmonic lift needs N >= 2");
  if (!(r >= 1.0)) throw DomainError("harmonic lift defined for r >= 1");
  if (N == 2) return {std::log(r), 1.0 / r, -1.0 / (r * r)};
  const double n2 = N - 2.0;
  return {-std::expm1(-n2 * std::log(r)), n2 * std::pow(r, 1.0 - N), -n2 * (N - 1.0) * std::pow(r, -1.0 * N)};
}

double harmonic_normal_derivative(int N, double r0) {
  if (!(r0 > 0.0)) throw DomainError("r0 > 0 required");
  return harmonic_H_derivatives(N, 1.0).d1 / r0;
}

TestFunctionFamily TestFunctionFamily::make(int N, int k, double theta, double T) {
  if (N < 2) throw DomainError("test-function family needs N >= 2");
  if (k < 5) throw DomainError("cutoff power k >= 5 required");
  if (!(theta > 0.0)) throw DomainError("theta > 0 required");
  if (!(T > 1.0)) throw DomainError("scale T > 1 required");
  return {N, k, theta, T};
}

TestFunctionFamily TestFunctionFamily::with_scale(double T_new) const { return make(N, k, theta, T_new); }

int default_k(const ProblemParams& params) {
  if (!(params.p > 1.0 && params.q > 1.0)) throw DomainError("default k needs p, q > 1");
  const double bound = std::max(2.0 * params.p / (params.p - 1.0), 2.0 * params.q / (params.q - 1.0));
  return std::max(5, static_cast<int>(std::ceil(bound)) + 1);
}

double default_theta(int N) { return N + 4.0; }

void check_k_admissible(const TestFunctionFamily& family, const ProblemParams& params) {
  const double bound = std::max(2.0 * params.p / (params.p - 1.0), 2.0 * params.q / (params.q - 1.0));
  if (!(family.k > bound))
    throw DomainError("cutoff power k=" + std::to_string(family.k) + " must exceed max{2p/(p-1), 2q/(q-1)}=" +
                      std::to_string(bound));
}

DNValues dn_values(const TestFunctionFamily& fam, double r, double t) {
  if (!(r >= 1.0)) throw DomainError("dn_values needs r >= 1");
  if (!(t >= 0.0)) throw DomainError("dn_values needs t >= 0");
  const int k = fam.k;
  const double T = fam.T;
  const ProfileValue xi = spatial_cutoff(r / T);
  const ProfileValue H = harmonic_H_derivatives(fam.N, r);

  const double phi = std::pow(xi.value, k);
  const double xi_km2 = std::pow(xi.value, k - 2);
  const ReducedLaplacians g = reduced_laplacians(fam.N, k, T, r, xi, H);
  const double lap_phi = xi_km2 * g.of_cutoff;
  const double lap_xi_weight = xi_km2 * g.of_harmonic_weight;
  const double weight = H.value * phi;

  const double time_scale = std::pow(T, fam.theta);
  const ProfileValue th = temporal_cutoff(t / time_scale);
  const double big_theta = std::pow(th.value, k);
  const double d2_big_theta = (k * (k - 1.0) * std::pow(th.value, k - 2) * th.d1 * th.d1 +
                               k * std::pow(th.value, k - 1) * th.d2) /
                              (time_scale * time_scale);

  DNValues out;
  out.D = big_theta * weight;
  out.N = big_theta * phi;
  out.dtt_D = d2_big_theta * weight;
  out.lap_D = big_theta * lap_xi_weight;
  out.dtt_N = d2_big_theta * phi;
  out.lap_N = big_theta * lap_phi;
  out.box_D = out.dtt_D - out.lap_D;
  out.box_N = out.dtt_N - out.lap_N;
  return out;
}

std::string to_string(LemmaId id) {
  switch (id) {
    case LemmaId::LL1: return "LL1";
    case LemmaId::LL3: return "LL3";
    case LemmaId::LL11: return "LL11";
    case LemmaId::LL12: return "LL12";
    case LemmaId::LL13: return "LL13";
    case LemmaId::LL16: return "LL16";
    case LemmaId::LL18: return "LL18";
    case LemmaId::LL19: return "LL19";
    case LemmaId::LL20: return "LL20";
    case LemmaId::LL23: return "LL23";
  }
  return "unknown";
}

LemmaId parse_lemma_id(const std::string& name) {
  for (LemmaId id : {LemmaId::LL1, LemmaId::LL3, LemmaId::LL11, LemmaId::LL12, LemmaId::LL13, LemmaId::LL16,
                     LemmaId::LL18, LemmaId::LL19, LemmaId::LL20, LemmaId::LL23})
    if (to_string(id) == name) return id;
  throw DomainError("unknown lemma id '" + name + "'");
}

LemmaCase make_power_case(LemmaId id, int N, double alpha, double beta, Region region) {
  LemmaCase c;
  c.id = id;
  c.N = N;
  c.alpha = alpha;
  c.beta = beta;
  c.region = region;
  c.theta = default_theta(N);
  double dim = 0.0;
  if (id == LemmaId::LL1) {
    if (N != 2) throw DomainError("LL1 is the N = 2 power integral");
    dim = 2.0;
  } else if (id == LemmaId::LL3) {
    if (N < 3) throw DomainError("LL3 is the N >= 3 power integral");
    dim = N;
  } else {
    throw DomainError("make_power_case accepts LL1 or LL3 only");
  }
  if (region == Region::Annulus) {
    c.predicted_rate = alpha + dim;
    c.log_power = id == LemmaId::LL1 ? beta : 0.0;
    c.branch = "annulus";
    return c;
  }
  if (!(beta > -1.0)) throw DomainError("inner power integral needs beta > -1");
  if (alpha < -dim) {
    c.predicted_rate = 0.0;
    c.log_power = 0.0;
    c.branch = "alpha<-dim";
  } else if (alpha == -dim) {
    c.predicted_rate = 0.0;
    c.log_power = id == LemmaId::LL1 ? beta + 1.0 : 1.0;
    c.branch = "alpha=-dim";
  } else {
    c.predicted_rate = alpha + dim;
    c.log_power = id == LemmaId::LL1 ? beta : 0.0;
    c.branch = "alpha>-dim";
  }
  return c;
}

LemmaCase make_weight_case(LemmaId id, int N, double tau, double m, double theta) {
  if (is_power_case(id)) throw DomainError("use make_power_case for LL1/LL3");
  if (!(m > 1.0)) throw DomainError("lemma exponent m > 1 required");
  if (id == LemmaId::LL16 && !(m > 2.0)) throw DomainError("LL16 requires m > 2");
  if (!(theta > 0.0)) throw DomainError("theta > 0 required");
  const bool two_d_only = id == LemmaId::LL11 || id == LemmaId::LL18;
  const bool higher_only = id == LemmaId::LL12 || id == LemmaId::LL19;
  if (two_d_only && N != 2) throw DomainError(to_string(id) + " is stated for N = 2");
  if (higher_only && N < 3) throw DomainError(to_string(id) + " is stated for N >= 3");
  if (N < 2) throw DomainError("N >= 2 required");

  LemmaCase c;
  c.id = id;
  c.N = N;
  c.tau = tau;
  c.m = m;
  c.theta = theta;
  const double time_rate = -(m + 1.0) * theta / (m - 1.0);
  const double lap_rate = N - 2.0 + theta - (tau + 2.0) / (m - 1.0);
  switch (id) {
    case LemmaId::LL11: {
      const double border = 2.0 * (m - 1.0);
      if (tau < border) {
        c.predicted_rate = 2.0 - (tau + (m + 1.0) * theta) / (m - 1.0);
        c.log_power = 1.0;
        c.branch = "tau<2(m-1)";
      } else if (tau == border) {
        c.predicted_rate = time_rate;
        c.log_power = 2.0;
        c.branch = "tau=2(m-1)";
      } else {
        c.predicted_rate = time_rate;
        c.log_power = 0.0;
        c.branch = "tau>2(m-1)";
      }
      break;
    }
    case LemmaId::LL12: {
      const double border = N * (m - 1.0);
      if (tau < border) {
        c.predicted_rate = N - (tau + (m + 1.0) * theta) / (m - 1.0);
        c.log_power = 0.0;
        c.branch = "tau<N(m-1)";
      } else if (tau == border) {
        c.predicted_rate = time_rate;
        c.log_power = 1.0;
        c.branch = "tau=N(m-1)";
      } else {
        c.predicted_rate = time_rate;
        c.log_power = 0.0;
        c.branch = "tau>N(m-1)";
      }
      break;
    }
    case LemmaId::LL13:
    case LemmaId::LL16: {
      if (tau >= N * (m - 1.0)) {
        c.predicted_rate = time_rate;
        c.log_power = 1.0;
        c.branch = "tau>=N(m-1)";
      } else {
        c.predicted_rate = N - (tau + (m + 1.0) * theta) / (m - 1.0);
        c.log_power = 0.0;
        c.branch = "tau<N(m-1)";
      }
      break;
    }
    case LemmaId::LL18:
      c.predicted_rate = theta - (tau + 2.0) / (m - 1.0);
      c.log_power = 1.0;
      c.branch = "all tau";
      break;
    case LemmaId::LL19:
    case LemmaId::LL20:
    case LemmaId::LL23:
      c.predicted_rate = lap_rate;
      c.log_power = 0.0;
      c.branch = "all tau";
      break;
    default:
      break;
  }
  return c;
}

double lemma_space_density(const LemmaCase& c, const TestFunctionFamily& family, double r) {
  check_case_family(c, family);
  return space_density(c, family, r, harmonic_H(family.N, r));
}

double lemma_time_density(const LemmaCase& c, const TestFunctionFamily& family, double t) {
  check_case_family(c, family);
  if (is_power_case(c.id)) return 1.0;
  const double time_scale = std::pow(family.T, family.theta);
  const double s = t / time_scale;
  double value = scaled_time_density(c, family.k, s);
  if (is_time_derivative_case(c.id)) value *= std::pow(time_scale, -2.0 * c.m / (c.m - 1.0));
  return value;
}

double lemma_log_integral(const LemmaCase& c, const TestFunctionFamily& fam) {
  check_case_family(c, fam);
  const int N = fam.N;
  const double T = fam.T;
  const double L = std::log(T);
  const double omega = unit_sphere_area(N);

  double log_time = 0.0;
  if (!is_power_case(c.id)) {
    const double integral =
        quad::adaptive([&](double s) { return scaled_time_density(c, fam.k, s); }, 0.0, 1.0, kQuadTol);
    if (!(integral > 0.0)) throw ComputationError("time integral vanished");
    const double w = c.m / (c.m - 1.0);
    log_time = fam.theta * L + std::log(integral);
    if (is_time_derivative_case(c.id)) log_time -= 2.0 * w * fam.theta * L;
  }

  const bool want_inner = is_power_case(c.id) ? c.region == Region::Inner : !is_laplacian_case(c.id);
  const bool want_annulus = is_power_case(c.id) ? c.region == Region::Annulus : true;

  double inner = 0.0;
  if (want_inner) {
    inner = quad::endpoint_singular(
        [&](double x) {
          const double r = std::exp(x);
          return space_density(c, fam, r, harmonic_from_log(N, x)) * std::exp(N * x);
        },
        0.0, L, kQuadTol);
  }
  double annulus = 0.0;
  if (want_annulus) {
    // r = sT; a power case on T < |x| < 2T ignores the cutoff.
    annulus = quad::adaptive(
        [&](double s) {
          const double r = s * T;
          return space_density(c, fam, r, harmonic_from_log(N, std::log(r))) * std::pow(s, N - 1.0);
        },
        1.0, 2.0, kQuadTol);
    annulus *= std::pow(T, static_cast<double>(N));
  }
  const double space = omega * (inner + annulus);
  if (!(space > 0.0) || !std::isfinite(space))
    throw ComputationError("space integral of " + to_string(c.id) + " is not positive and finite");
  return log_time + std::log(space);
}

double lemma_integral(const LemmaCase& c, const TestFunctionFamily& family) {
  return std::exp(lemma_log_integral(c, family));
}

std::vector<LemmaCase> default_lemma_suite() {
  std::vector<LemmaCase> suite;
  // Power integrals: every branch of the inner region plus the annulus.
  suite.push_back(make_power_case(LemmaId::LL1, 2, -3.0, 1.0, Region::Inner));
  suite.push_back(make_power_case(LemmaId::LL1, 2, -2.0, 1.0, Region::Inner));
  suite.push_back(make_power_case(LemmaId::LL1, 2, 0.0, 1.0, Region::Inner));
  suite.push_back(make_power_case(LemmaId::LL1, 2, 1.0, 2.0, Region::Annulus));
  suite.push_back(make_power_case(LemmaId::LL3, 3, -4.0, 1.0, Region::Inner));
  suite.push_back(make_power_case(LemmaId::LL3, 3, -3.0, 1.0, Region::Inner));
  suite.push_back(make_power_case(LemmaId::LL3, 3, 0.0, 1.0, Region::Inner));
  suite.push_back(make_power_case(LemmaId::LL3, 3, -1.0, -2.0, Region::Annulus));

  const double th2 = default_theta(2);
  const double th3 = default_theta(3);
  suite.push_back(make_weight_case(LemmaId::LL11, 2, 0.0, 2.0, th2));
  suite.push_back(make_weight_case(LemmaId::LL11, 2, 2.0, 2.0, th2));
  suite.push_back(make_weight_case(LemmaId::LL11, 2, 4.0, 2.0, th2));
  suite.push_back(make_weight_case(LemmaId::LL12, 3, 0.0, 2.0, th3));
  suite.push_back(make_weight_case(LemmaId::LL12, 3, 3.0, 2.0, th3));
  suite.push_back(make_weight_case(LemmaId::LL12, 3, 5.0, 2.0, th3));
  // For tau > N(m-1) the N_T and mixed bounds are not attained; the border is.
  suite.push_back(make_weight_case(LemmaId::LL13, 3, 3.0, 2.0, th3));
  suite.push_back(make_weight_case(LemmaId::LL13, 3, 0.0, 2.0, th3));
  suite.push_back(make_weight_case(LemmaId::LL16, 3, 6.0, 3.0, th3));
  suite.push_back(make_weight_case(LemmaId::LL16, 3, 0.0, 3.0, th3));
  suite.push_back(make_weight_case(LemmaId::LL18, 2, 0.0, 2.0, th2));
  suite.push_back(make_weight_case(LemmaId::LL19, 3, 0.0, 2.0, th3));
  suite.push_back(make_weight_case(LemmaId::LL20, 3, 0.0, 2.0, th3));
  suite.push_back(make_weight_case(LemmaId::LL23, 3, 0.0, 2.0, th3));
  return suite;
}

RateFit fit_log_rate(std::span<const RateSample> log_samples, double log_power) {
  if (log_samples.size() < 3) throw DomainError("rate fit needs at least 3 samples");
  for (std::size_t i = 0; i < log_samples.size(); ++i) {
    if (!(log_samples[i].T > 1.0)) throw DomainError("rate fit needs T > 1");
    if (!std::isfinite(log_samples[i].value)) throw DomainError("rate fit needs finite log-values");
    if (i > 0 && !(log_samples[i].T > log_samples[i - 1].T))
      throw DomainError("rate fit needs strictly increasing T");
  }
  if (log_samples.back().T / log_samples.front().T < 100.0 * (1.0 - 1e-12))
    throw DomainError("rate fit needs samples spanning at least two decades");

  const std::size_t n = log_samples.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(log_samples[i].T);
    xs[i] = x;
    ys[i] = log_samples[i].value - log_power * std::log(x);
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < n; ++i)
    fit.residual = std::max(fit.residual, std::abs(ys[i] - (fit.intercept + fit.slope * xs[i])));
  return fit;
}

RateFit fit_rate(std::span<const RateSample> samples, double log_power) {
  std::vector<RateSample> logs;
  logs.reserve(samples.size());
  for (const auto& s : samples) {
    if (!(s.value > 0.0)) throw DomainError("rate fit needs positive values");
    logs.push_back({s.T, std::log(s.value)});
  }
  RateFit fit = fit_log_rate(logs, log_power);
  fit.samples.assign(samples.begin(), samples.end());
  return fit;
}

std::string to_string(FunctionalBranch b) {
  switch (b) {
    case FunctionalBranch::ViaF: return "ViaF";
    case FunctionalBranch::ViaG: return "ViaG";
    case FunctionalBranch::ViaF_mixed: return "ViaF_mixed";
    case FunctionalBranch::ViaG_mixed: return "ViaG_mixed";
  }
  return "unknown";
}

double theta_dominance_threshold(const ProblemParams& params) {
  return std::max(single_threshold(params.N, params.q, params.b), single_threshold(params.N, params.p, params.a));
}

FunctionalValue contradiction_functional(const ProblemParams& params, const TestFunctionFamily& family,
                                         FunctionalBranch branch, double T) {
  validate_theorem_params(params);
  if (family.N != params.N) throw DomainError("family and parameters disagree on N");
  if (!(T > 1.0)) throw DomainError("functional needs T > 1");
  check_k_admissible(family, params);
  const double theta = family.theta;
  if (!(theta > theta_dominance_threshold(params)))
    throw DomainError("θ too small for asymptotic regime (theta=" + std::to_string(theta) +
                      ", need > " + std::to_string(theta_dominance_threshold(params)) + ")");

  const int N = params.N;
  const double p = params.p, q = params.q;
  const double e = p * q - 1.0;
  const double L = std::log(T);
  const double LL = std::log(L);
  const double log_alpha = log_two_terms(functional_terms(N, q, params.b, theta), L, LL);
  const double log_beta = log_two_terms(functional_terms(N, p, params.a, theta), L, LL);
  const bool planar = N == 2;
  const auto [delta, gamma] = scaling_exponents(params);

  FunctionalValue out;
  double lv = -theta * L;
  switch (branch) {
    case FunctionalBranch::ViaF:
    case FunctionalBranch::ViaF_mixed: {
      const bool extra = planar && branch == FunctionalBranch::ViaF_mixed;
      lv += (p * q / e) * log_alpha + (p / e) * (log_beta + (extra ? LL : 0.0));
      out.predicted_rate = N - 2.0 - delta;
      out.log_power = planar ? 1.0 + (extra ? p / e : 0.0) : 0.0;
      break;
    }
    case FunctionalBranch::ViaG:
    case FunctionalBranch::ViaG_mixed: {
      const bool extra = planar && branch == FunctionalBranch::ViaG_mixed;
      lv += (q / e) * (log_alpha + (extra ? LL : 0.0)) + (p * q / e) * log_beta;
      out.predicted_rate = N - 2.0 - gamma;
      out.log_power = planar ? 1.0 + (extra ? q / e : 0.0) : 0.0;
      break;
    }
  }
  out.log_value = lv;
  out.value = std::exp(lv);
  return out;
}

double vartheta_power_integral(int k) {
  return quad::adaptive([k](double s) { return std::exp(-k / (s * (1.0 - s))); }, 0.0, 1.0, kQuadTol);
}

double boundary_term(const ProblemParams& params, const TestFunctionFamily& family, BoundaryTermKind which,
                     double T) {
  if (family.N != params.N) throw DomainError("family and parameters disagree on N");
  if (!(T > 0.0)) throw DomainError("boundary term needs T > 0");
  if (params.If == 0.0) return 0.0;
  const double time = std::pow(T, family.theta) * vartheta_power_integral(family.k);
  const double trace = std::pow(spatial_cutoff(params.r0 / T).value, family.k);
  const double base = params.If * time * trace;
  switch (which) {
    case BoundaryTermKind::DirichletFlux: return harmonic_normal_derivative(params.N, params.r0) * base;
    case BoundaryTermKind::NeumannTrace: return base;
  }
  return 0.0;
}

}  // namespace ewl
