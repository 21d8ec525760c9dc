#pragma once

// Radial leapfrog solver for the extremal system
//   u_tt - Lap u = r^a F(v),  v_tt - Lap v = r^b G(u)
// on r0 <= r <= r_max with constant boundary data on the sphere r = r0.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ewl/criticality.hpp"
#include "ewl/params.hpp"

namespace ewl {

enum class InitialKind { Zero, Stationary, DecayPair, Custom };
std::string to_string(InitialKind kind);
InitialKind parse_initial_kind(const std::string& name);

struct CustomProfiles {
  std::function<double(double)> u, v, ut, vt;
  double support = 0.0;  ///< data vanish for r > r0 + support
};

struct SimConfig {
  ProblemParams params;
  double f_val = 0.0;
  double g_val = 0.0;
  double r_max = 0.0;  ///< 0 picks r0 + t_final + support + 1
  double dr = 0.02;
  double cfl = 0.5;
  double t_final = 1.0;
  double blowup_threshold = 1e8;
  InitialKind initial = InitialKind::Zero;
  double epsilon = 0.0;  ///< relative perturbation of the stationary data
  CustomProfiles custom;
  bool signed_nonlinearity = false;  ///< |v|^(p-1) v instead of |v|^p
  bool confirm_blowup = true;        ///< rerun at dt/2 when the threshold is hit
  double sample_dt = 0.0;            ///< time-series cadence, 0 = every step
};

enum class StepStatus { Running, BlownUp, Completed };

struct RadialState {
  double t = 0.0;
  double dt = 0.0;
  std::vector<double> r;
  std::vector<double> u, v;
  std::vector<double> u_prev, v_prev;
  StepStatus status = StepStatus::Running;
  double t_blow = 0.0;
  long steps = 0;
};

enum class SimVerdict { BlewUp, BoundedToHorizon, NumericalInstability };
std::string to_string(SimVerdict v);

struct SeriesRow {
  double t = 0.0;
  double sup_u = 0.0;
  double sup_v = 0.0;
  double energy_proxy = 0.0;
  double max_err = 0.0;  ///< only meaningful when RunResult::has_reference
};

struct RunResult {
  RadialState final_state;
  std::vector<SeriesRow> series;
  SimVerdict verdict = SimVerdict::BoundedToHorizon;
  double t_blow = 0.0;
  std::optional<double> t_blow_confirm;  ///< t_blow of the dt/2 rerun
  bool has_reference = false;
  double max_error = 0.0;       ///< max over sampled times of the sup-norm error
  double relative_drift = 0.0;  ///< max |w(t) - w(0)| / sup|w(0)| over both fields and all steps
};

/// Checks the invariants of the configuration; throws ConfigError or DomainError.
void validate(const SimConfig& config);

/// r_max actually used (resolves the automatic choice).
double effective_r_max(const SimConfig& config);

/// dt = t_final / ceil(t_final / (cfl dr)), so dt <= cfl dr and the run lands on t_final.
double time_step(const SimConfig& config);

/// Boundary data (f_val, g_val) whose traces match the stationary pair for the
/// configured boundary kind.
std::pair<double, double> stationary_boundary_data(const ProblemParams& params);

/// Exact solution the run should reproduce, when the initial data are manufactured.
struct Reference {
  std::function<double(double r, double t)> u, v;
};
std::optional<Reference> reference_solution(const SimConfig& config);

RadialState initial_state(const SimConfig& config);

/// One leapfrog step. The state must be Running.
RadialState step(const RadialState& state, const SimConfig& config);

RunResult run(const SimConfig& config);

struct ConvergenceReport {
  std::vector<double> dr;
  std::vector<double> errors;
  std::vector<double> orders;  ///< log(e_i / e_{i+1}) / log(factor)
  double order = 0.0;          ///< last entry of orders
  bool degenerate = false;     ///< factor 1: no refinement happened
};

/// Runs the manufactured case at dr, dr/factor, ... (refinements grids, fixed cfl).
ConvergenceReport convergence_order(const SimConfig& config, int refinements, double factor = 2.0);

struct ProbeResult {
  Classification classified;
  std::optional<SimVerdict> simulated;
  std::optional<RunResult> run;
  bool agree = false;
  bool vacuous = false;
  std::string note;
};

/// Classifies, then simulates the standard instance of the verdict: zero data
/// with boundary data If/|dB_r0|, Ig/|dB_r0| for BlowUp, the stationary pair
/// with matching traces for GlobalCandidate. `protocol` supplies grid and horizon.
ProbeResult dichotomy_probe(const ProblemParams& params, const SimConfig& protocol);

}  // namespace ewl
