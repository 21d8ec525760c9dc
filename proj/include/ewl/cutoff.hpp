#pragma once

namespace ewl {

/// Value and first two derivatives of a one-variable profile.
struct ProfileValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Spatial cutoff xi(s): 1 for |s| <= 1, 0 for |s| >= 2, C-infinity smooth step
/// psi(2-|s|)/(psi(2-|s|)+psi(|s|-1)) in between, psi(x) = exp(-1/x).
ProfileValue spatial_cutoff(double s);

/// Temporal bump vartheta(t) = exp(-1/(t(1-t))) on (0,1), 0 elsewhere.
ProfileValue temporal_cutoff(double t);

struct CutoffProfiles {
  double xi = 0.0, dxi = 0.0, d2xi = 0.0;
  double vartheta = 0.0, dvartheta = 0.0, d2vartheta = 0.0;
};

CutoffProfiles cutoff_profiles(double s, double t);

/// ln|k h'^2 + h''| + ln k - 4 ln u for the temporal bump written as exp(h),
/// h = -1/u, u = t(1-t), i.e. the logarithm of |(vartheta^k)''| / vartheta^k
/// up to the power k. Used by the time-derivative lemma integrands.
double temporal_log_second_factor(int k, double t);

}  // namespace ewl
