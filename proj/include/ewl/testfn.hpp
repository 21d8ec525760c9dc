#pragma once

// Test-function apparatus on the exterior of the unit ball: the harmonic lift
// H, the composite weights D_T = vartheta_T * H * xi(r/T)^k and
// N_T = vartheta_T * xi(r/T)^k, quadrature of the lemma integrals, rate
// fitting and the contradiction functionals built from alpha(T), beta(T).

#include <span>
#include <string>
#include <vector>

#include "ewl/cutoff.hpp"
#include "ewl/params.hpp"

namespace ewl {

/// Harmonic function of the exterior of the unit ball vanishing on the sphere:
/// ln r for N = 2, 1 - r^(2-N) for N >= 3. Requires r >= 1.
double harmonic_H(int N, double r);

/// H and its first two radial derivatives.
ProfileValue harmonic_H_derivatives(int N, double r);

/// |d H_{B_r0} / d nu| on the sphere of radius r0 (normal pointing into the ball).
double harmonic_normal_derivative(int N, double r0);

struct TestFunctionFamily {
  int N = 3;
  int k = 9;
  double theta = 7.0;
  double T = 10.0;

  /// Validates N >= 2, k >= 5, theta > 0, T > 1.
  static TestFunctionFamily make(int N, int k, double theta, double T);

  [[nodiscard]] TestFunctionFamily with_scale(double T_new) const;
};

/// ceil(max{2p/(p-1), 2q/(q-1)}) + 1, raised to at least 5.
int default_k(const ProblemParams& params);

/// Default time-scaling power N + 4.
double default_theta(int N);

/// Throws DomainError unless k > max{2p/(p-1), 2q/(q-1)}.
void check_k_admissible(const TestFunctionFamily& family, const ProblemParams& params);

struct DNValues {
  double D = 0.0, N = 0.0;
  double box_D = 0.0, box_N = 0.0;
  double dtt_D = 0.0, lap_D = 0.0;
  double dtt_N = 0.0, lap_N = 0.0;
};

/// Values and analytic second derivatives of D_T and N_T at (t, |x| = r).
/// The Laplacian uses Lap phi = phi'' + (N-1) phi'/r and Lap H = 0.
DNValues dn_values(const TestFunctionFamily& family, double r, double t);

enum class LemmaId { LL1, LL3, LL11, LL12, LL13, LL16, LL18, LL19, LL20, LL23 };
enum class Region { Inner, Annulus };

std::string to_string(LemmaId id);
LemmaId parse_lemma_id(const std::string& name);

/// One tabulated branch of an integral estimate, with the predicted power of
/// T and power of ln T of its asymptotic size.
struct LemmaCase {
  LemmaId id = LemmaId::LL1;
  int N = 2;
  double tau = 0.0;
  double m = 2.0;
  double theta = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  Region region = Region::Inner;
  double predicted_rate = 0.0;
  double log_power = 0.0;
  std::string branch;
};

/// Power-weight integrals over 1<|x|<T (Inner) or T<|x|<2T (Annulus):
/// LL1 uses (ln|x|)^beta with N = 2, LL3 uses (1-|x|^(2-N))^beta with N >= 3.
LemmaCase make_power_case(LemmaId id, int N, double alpha, double beta, Region region);

/// Test-function integrals int |x|^(-tau/(m-1)) W^(-1/(m-1)) |L W'|^(m/(m-1)).
LemmaCase make_weight_case(LemmaId id, int N, double tau, double m, double theta);

/// Integrand densities per unit t and per unit volume, factored so that the
/// vanishing powers of the cutoffs cancel analytically. Their product equals
/// |x|^(-tau/(m-1)) W^(-1/(m-1)) |L W'|^(m/(m-1)) wherever W > 0.
double lemma_space_density(const LemmaCase& c, const TestFunctionFamily& family, double r);
double lemma_time_density(const LemmaCase& c, const TestFunctionFamily& family, double t);

/// Natural logarithm of the case's space-time integral over t in (0, T^theta)
/// and 1 < |x| < 2T (separable quadrature; radial axis split at T and 2T).
double lemma_log_integral(const LemmaCase& c, const TestFunctionFamily& family);
double lemma_integral(const LemmaCase& c, const TestFunctionFamily& family);

/// The default suite: every tabulated branch of every estimate, at parameters
/// where the bound is attained.
std::vector<LemmaCase> default_lemma_suite();

struct RateSample {
  double T = 0.0;
  double value = 0.0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< max |deviation| in log-log coordinates
  std::vector<RateSample> samples;
};

/// Least-squares line through (ln T, ln value - log_power ln ln T).
RateFit fit_rate(std::span<const RateSample> samples, double log_power = 0.0);

/// Same fit on values already given as logarithms.
RateFit fit_log_rate(std::span<const RateSample> log_samples, double log_power = 0.0);

enum class FunctionalBranch { ViaF, ViaG, ViaF_mixed, ViaG_mixed };
std::string to_string(FunctionalBranch b);

struct FunctionalValue {
  double value = 0.0;
  double log_value = 0.0;
  double predicted_rate = 0.0;  ///< N-2-delta (F branches) or N-2-gamma (G branches)
  double log_power = 0.0;
};

/// Smallest theta for which the leading terms of alpha(T) and beta(T) dominate.
/// Exceeding it strictly is required.
double theta_dominance_threshold(const ProblemParams& params);

/// Evaluates alpha(T), beta(T) and the branch's composite
///   ViaF: T^-theta alpha^(pq/(pq-1)) beta^(p/(pq-1)),
///   ViaG: T^-theta alpha^(q/(pq-1)) beta^(pq/(pq-1)),
/// with the extra ln T factors of the mixed problem when N = 2.
FunctionalValue contradiction_functional(const ProblemParams& params, const TestFunctionFamily& family,
                                         FunctionalBranch branch, double T);

/// int_0^1 vartheta(s)^k ds.
double vartheta_power_integral(int k);

enum class BoundaryTermKind { DirichletFlux, NeumannTrace };

/// DirichletFlux: -int_Gamma dD_T/dnu f = |dH/dnu| If T^theta int vartheta^k xi(r0/T)^k.
/// NeumannTrace:   int_Gamma N_T f       = If T^theta int vartheta^k xi(r0/T)^k.
double boundary_term(const ProblemParams& params, const TestFunctionFamily& family, BoundaryTermKind which,
                     double T);

}  // namespace ewl
