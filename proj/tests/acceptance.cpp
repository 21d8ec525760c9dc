// Acceptance run: one PASS/FAIL line per criterion. Exit status 0 iff all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ewl/criticality.hpp"
#include "ewl/simulator.hpp"
#include "ewl/testfn.hpp"

using namespace ewl;

namespace {

struct Outcome {
  bool pass = false;
  std::string report;  // deterministic part only, no timings
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::function<Outcome()> body;
};

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return v;
}

const std::vector<double> kScales = log_spaced(1e2, 1e4, 5);

// 1. The two forms of the blow-up criterion agree on random exact tuples.
Outcome criterion_equivalence() {
  std::mt19937_64 rng(20240101);
  std::uniform_int_distribution<int> dim(2, 7), pq(1, 120), wt(0, 160), sgn(0, 2), bc(0, 2);
  std::ostringstream os;
  int disagree = 0, positive = 0;
  for (int i = 0; i < 1000; ++i) {
    ProblemParams P;
    P.N = dim(rng);
    P.set_exact(1 + Rational(pq(rng), 20), 1 + Rational(pq(rng), 20), -2 + Rational(wt(rng), 20),
                -2 + Rational(wt(rng), 20));
    P.If = sgn(rng) * 0.5;
    P.Ig = sgn(rng) * 0.5;
    P.boundary = static_cast<BoundaryKind>(bc(rng));
    const bool a = criterion_original_form(P), b = criterion_delta_gamma_form(P);
    disagree += a != b;
    positive += a;
  }
  os << "1000 tuples, " << positive << " satisfy the criterion, " << disagree << " disagreements";
  return {disagree == 0, os.str()};
}

// 2. p = q, a = b, Dirichlet: blow-up exactly when 1 < p < (N+a)/(N-2).
Outcome corollary_reduction() {
  int mismatch = 0, blow = 0, total = 0;
  for (int N : {3, 4, 5})
    for (int i = 1; i <= 10; ++i)
      for (int j = 1; j <= 10; ++j) {
        const Rational p = 1 + Rational(i, 4), a = -2 + Rational(2 * j, 5);
        ProblemParams P;
        P.N = N;
        P.set_exact(p, p, a, a);
        P.If = P.Ig = 1;
        const bool expected = p * (N - 2) < N + a;
        const bool got = classify(P).verdict == Verdict::BlowUp;
        mismatch += expected != got;
        blow += got;
        ++total;
      }
  std::ostringstream os;
  os << total << " grid points, " << blow << " blow-up, " << mismatch << " mismatches";
  return {mismatch == 0 && total == 300, os.str()};
}

// 3. Explicit solutions satisfy their equations.
Outcome explicit_residuals() {
  ProblemParams S;
  S.N = 5;
  S.set_exact(3, 3, 0, 0);
  const auto st = stationary_pair(S);
  ProblemParams D;
  D.N = 3;
  D.set_exact(3, 3, 0, 0);
  const auto dp = decay_pair(D);
  double worst_s = 0, worst_d = 0;
  for (double r : log_spaced(1.0, 1e3, 50)) {
    const auto res = residual_stationary(st, S, r);
    worst_s = std::max({worst_s, res.relative_u(), res.relative_v()});
  }
  for (int i = 0; i < 50; ++i) {
    const auto res = residual_decay(dp, D, 0.2 * i);
    worst_d = std::max({worst_d, res.relative_u(), res.relative_v()});
  }
  const double amp = std::max({std::abs(st.Au - std::sqrt(2.0)), std::abs(st.Av - std::sqrt(2.0)),
                               std::abs(dp.A1 - std::sqrt(2.0)), std::abs(dp.A2 - std::sqrt(2.0))});
  std::ostringstream os;
  os << "stationary max rel residual " << g17(worst_s) << ", decay max rel residual " << g17(worst_d)
     << ", amplitude error " << g17(amp);
  return {worst_s < 1e-12 && worst_d < 1e-12 && amp < 1e-14, os.str()};
}

// 4. Every tabulated branch of every estimate scales at its predicted rate.
Outcome asymptotics_suite() {
  const auto suite = default_lemma_suite();
  std::ostringstream os;
  int failed = 0;
  double worst = 0;
  std::vector<bool> seen(10, false);
  for (const auto& c : suite) {
    seen[static_cast<int>(c.id)] = true;
    std::vector<RateSample> samples;
    for (double T : kScales) samples.push_back({T, lemma_log_integral(c, TestFunctionFamily::make(c.N, 9, c.theta, T))});
    const double err = std::abs(fit_log_rate(samples, c.log_power).slope - c.predicted_rate);
    worst = std::max(worst, err);
    if (!(err <= 0.15)) {
      ++failed;
      os << " [" << to_string(c.id) << " " << c.branch << " off by " << g17(err) << "]";
    }
  }
  const bool all_families = std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  std::ostringstream head;
  head << suite.size() << " cases, " << failed << " outside 0.15, worst " << g17(worst)
       << (all_families ? "" : ", a family is missing") << os.str();
  return {failed == 0 && all_families, head.str()};
}

// 5. The contradiction functional decays at T^(N-2-delta) (or gamma).
Outcome functional_decay() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dim(3, 5), pq(1, 80), wt(0, 80), bc(0, 2), side(0, 2);
  int found = 0, failed = 0, tries = 0;
  double worst = 0;
  std::ostringstream os;
  while (found < 50 && tries < 100000) {
    ++tries;
    ProblemParams P;
    P.N = dim(rng);
    P.set_exact(1 + Rational(pq(rng), 20), 1 + Rational(pq(rng), 20), -2 + Rational(wt(rng), 20),
                -2 + Rational(wt(rng), 20));
    const int s = side(rng);
    P.If = s != 1 ? 1.0 : 0.0;
    P.Ig = s != 0 ? 1.0 : 0.0;
    P.boundary = static_cast<BoundaryKind>(bc(rng));
    const auto c = classify(P);
    if (c.verdict != Verdict::BlowUp) continue;
    ++found;
    const bool mixed = P.boundary == BoundaryKind::Mixed;
    const FunctionalBranch br = c.branch == Branch::ViaF ? (mixed ? FunctionalBranch::ViaF_mixed : FunctionalBranch::ViaF)
                                                         : (mixed ? FunctionalBranch::ViaG_mixed : FunctionalBranch::ViaG);
    const double theta = std::max(default_theta(P.N), theta_dominance_threshold(P) + 1.0);
    const auto fam = TestFunctionFamily::make(P.N, default_k(P), theta, kScales.front());
    std::vector<RateSample> samples;
    double predicted = 0, log_power = 0;
    for (double T : kScales) {
      const auto v = contradiction_functional(P, fam.with_scale(T), br, T);
      samples.push_back({T, v.log_value});
      predicted = v.predicted_rate;
      log_power = v.log_power;
    }
    const double slope = fit_log_rate(samples, log_power).slope;
    const double err = std::abs(slope - predicted);
    worst = std::max(worst, err);
    if (!(slope < 0 && err <= 0.2)) {
      ++failed;
      os << " [N=" << P.N << " p=" << g17(P.p) << " q=" << g17(P.q) << " a=" << g17(P.a) << " b=" << g17(P.b) << " "
         << to_string(br) << " slope " << g17(slope) << " predicted " << g17(predicted) << "]";
    }
  }
  std::ostringstream head;
  head << found << " blow-up tuples, " << failed << " failures, worst deviation " << g17(worst) << os.str();
  return {found == 50 && failed == 0, head.str()};
}

// 6. Second-order convergence on manufactured solutions; the stationary pair stays put.
Outcome simulator_verification() {
  SimConfig d;
  d.params.N = 3;
  d.params.p = d.params.q = 3;
  d.params.boundary = BoundaryKind::Neumann;
  d.initial = InitialKind::DecayPair;
  d.t_final = 5;
  d.dr = 0.05;
  const auto rd = convergence_order(d, 3);

  SimConfig s;
  s.params.N = 5;
  s.params.p = s.params.q = 3;
  s.params.boundary = BoundaryKind::Dirichlet;
  s.initial = InitialKind::Stationary;
  std::tie(s.f_val, s.g_val) = stationary_boundary_data(s.params);
  s.t_final = 5;
  s.dr = 0.1;
  const auto rs = convergence_order(s, 3);

  SimConfig steady = s;
  steady.dr = SimConfig{}.dr;
  steady.t_final = 10;
  const auto r = run(steady);
  const double drift = r.relative_drift / steady.t_final;

  auto in = [](double o) { return o >= 1.8 && o <= 2.2; };
  std::ostringstream os;
  os << "decay-pair order " << g17(rd.order) << ", stationary order " << g17(rs.order) << ", drift per unit time "
     << g17(drift) << " over t=10 at dr=" << g17(steady.dr);
  return {in(rd.order) && in(rs.order) && !rd.degenerate && !rs.degenerate && drift < 1e-3 &&
              r.verdict == SimVerdict::BoundedToHorizon,
          os.str()};
}

// 7. The two canonical probes agree with the classification.
Outcome dichotomy() {
  SimConfig protocol;
  protocol.dr = 0.05;
  protocol.t_final = 50;

  ProblemParams blow;
  blow.N = 3;
  blow.set_exact(2, 2, 0, 0);
  blow.boundary = BoundaryKind::Neumann;
  blow.If = blow.Ig = unit_sphere_area(3);
  const auto b = dichotomy_probe(blow, protocol);

  ProblemParams global;
  global.N = 5;
  global.set_exact(3, 3, 0, 0);
  global.If = global.Ig = 1;
  const auto g = dichotomy_probe(global, protocol);

  bool stable = false;
  double rel = INFINITY;
  if (b.run && b.run->t_blow_confirm) {
    rel = std::abs(*b.run->t_blow_confirm - b.run->t_blow) / b.run->t_blow;
    stable = rel <= 0.1;
  }
  std::ostringstream os;
  os << "blow-up probe " << to_string(b.classified.verdict) << "/" << (b.simulated ? to_string(*b.simulated) : "none");
  if (b.run) os << " t_blow " << g17(b.run->t_blow) << " rel change " << g17(rel);
  os << "; global probe " << to_string(g.classified.verdict) << "/"
     << (g.simulated ? to_string(*g.simulated) : "none") << " to t=" << g17(protocol.t_final);
  return {b.agree && g.agree && !b.vacuous && !g.vacuous && stable, os.str()};
}

struct Line {
  bool pass;
  std::string report;
  double seconds;
};

Line evaluate(const Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {o.pass, o.report, s};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "criterion equivalence", 1.0, criterion_equivalence},
      {2, "corollary reduction", 1.0, corollary_reduction},
      {3, "explicit-solution residuals", 1.0, explicit_residuals},
      {4, "asymptotics suite", 120.0, asymptotics_suite},
      {5, "contradiction-functional decay", 60.0, functional_decay},
      {6, "simulator verification", 120.0, simulator_verification},
      {7, "dichotomy demonstration", 300.0, dichotomy},
  };

  bool all = true;
  std::vector<std::string> first;
  for (const auto& c : criteria) {
    const Line l = evaluate(c);
    const bool ok = l.pass && l.seconds < c.limit_s;
    all = all && ok;
    first.push_back(l.report);
    std::printf("%s  %d %-32s %s (%.2f s, limit %g s)\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                l.report.c_str(), l.seconds, c.limit_s);
    std::fflush(stdout);
  }

  // 8. A second pass must reproduce every report byte for byte.
  int differing = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i)
    if (evaluate(criteria[i]).report != first[i]) ++differing;
  const bool det = differing == 0;
  all = all && det;
  std::printf("%s  8 %-32s criteria 1-7 rerun, %d reports differ\n", det ? "PASS" : "FAIL", "determinism",
              differing);

  std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
