#pragma once

// Closed-form algebra of the blow-up criterion: scaling exponents, the
// Fujita-type classification, historical critical exponents and the explicit
// stationary / time-decaying solutions that show the criterion is sharp.

#include <optional>
#include <string>
#include <vector>

#include "ewl/params.hpp"

namespace ewl {

struct ScalingExponents {
  double delta = 0.0;
  double gamma = 0.0;
};

enum class Verdict { BlowUp, GlobalCandidate, NotCovered };
enum class Branch { ViaF, ViaG, DimensionTwo, None };

std::string to_string(Verdict v);
std::string to_string(Branch b);

/// One evaluated hypothesis. Booleans are encoded as value 1/0 against threshold 1.
struct ConditionRecord {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct Classification {
  Verdict verdict = Verdict::NotCovered;
  Branch branch = Branch::None;
  ScalingExponents exponents;
  std::vector<ConditionRecord> reasons;
  std::string summary;
};

/// Relative band around the critical curve inside which inexact inputs are
/// reported as NotCovered rather than placed on either side.
inline constexpr double kCriticalBand = 1e-12;

/// delta = (a+2+p(b+2))/(pq-1), gamma = (b+2+q(a+2))/(pq-1). Requires pq > 1.
ScalingExponents scaling_exponents(const ProblemParams& params);

/// Throws DomainError naming the first violated invariant among
/// N >= 2, p > 1, q > 1, a >= -2, b >= -2, r0 > 0 (and finiteness).
void validate_theorem_params(const ProblemParams& params);

Classification classify(const ProblemParams& params);

/// Criterion in its original form:
///   max{sgn(If)(2p(q+1)+pb+a)/(pq-1), sgn(Ig)(2q(p+1)+qa+b)/(pq-1)} > N,
/// evaluated exactly on the rational values of the inputs.
bool criterion_original_form(const ProblemParams& params);

/// Equivalent form (If > 0 and delta > N-2) or (Ig > 0 and gamma > N-2),
/// evaluated exactly through a different algebraic route.
bool criterion_delta_gamma_form(const ProblemParams& params);

struct HistoricalExponents {
  double strauss = 0.0;        ///< positive root of (N-1)p^2 - (N+1)p - 2
  double kato = 0.0;           ///< (N+1)/(N-1)
  std::optional<double> zhang; ///< (N+a)/(N-2), only for N >= 3 and a > -2
  std::string zhang_note;
};

HistoricalExponents historical_exponents(int N, double a);

/// u*(x) = Au |x|^-delta, v*(x) = Av |x|^-gamma solving
/// -Lap u = |x|^a v^p, -Lap v = |x|^b u^q on R^N minus the origin.
struct StationaryPair {
  double Au = 0.0;
  double Av = 0.0;
  double delta = 0.0;
  double gamma = 0.0;

  [[nodiscard]] double u(double r) const;
  [[nodiscard]] double v(double r) const;
  [[nodiscard]] double du(double r) const;
  [[nodiscard]] double dv(double r) const;
};

/// Requires N >= 3, p, q > 0, pq > 1 and 0 < min(delta,gamma) <= max(delta,gamma) < N-2.
StationaryPair stationary_pair(const ProblemParams& params);

/// u(t) = A1 (t+1)^-mu, v(t) = A2 (t+1)^-nu with utt = r0^a v^p, vtt = r0^b u^q.
struct DecayPair {
  double A1 = 0.0;
  double A2 = 0.0;
  double mu = 0.0;
  double nu = 0.0;

  [[nodiscard]] double u(double t) const;
  [[nodiscard]] double v(double t) const;
  [[nodiscard]] double ut(double t) const;
  [[nodiscard]] double vt(double t) const;
  [[nodiscard]] double utt(double t) const;
  [[nodiscard]] double vtt(double t) const;
};

/// Requires a, b <= 0, p, q > 0, pq > 1, r0 > 0.
DecayPair decay_pair(const ProblemParams& params);

/// Absolute residuals of the stationary system together with the size of the
/// right-hand sides, so callers can form relative errors.
struct PairResidual {
  double u = 0.0;
  double v = 0.0;
  double rhs_u = 0.0;
  double rhs_v = 0.0;

  [[nodiscard]] double relative_u() const;
  [[nodiscard]] double relative_v() const;
};

/// (-Lap u* - r^a v*^p, -Lap v* - r^b u*^q) at radius r, with the radial
/// identity Lap r^-d = d(d-(N-2)) r^(-d-2).
PairResidual residual_stationary(const StationaryPair& pair, const ProblemParams& params, double r);

/// (utt - r0^a v^p, vtt - r0^b u^q) at time t.
PairResidual residual_decay(const DecayPair& pair, const ProblemParams& params, double t);

}  // namespace ewl
