#include "ewl/cutoff.hpp"

#include <cmath>
#include <limits>

namespace ewl {
namespace {

// psi(x) = exp(-1/x) for x > 0 and its derivatives, evaluated in log form so
// that tiny arguments underflow cleanly to zero instead of producing 0 * inf.
ProfileValue psi(double x) {
  if (!(x > 0.0)) return {};
  const double lx = std::log(x);
  const double value = std::exp(-1.0 / x);
  const double d1 = std::exp(-1.0 / x - 2.0 * lx);
  const double d2 = (1.0 - 2.0 * x) * std::exp(-1.0 / x - 4.0 * lx);
  return {value, d1, d2};
}

}  // namespace

ProfileValue spatial_cutoff(double s) {
  const double sign = s < 0.0 ? -1.0 : 1.0;
  const double x = std::abs(s);
  if (x <= 1.0) return {1.0, 0.0, 0.0};
  if (x >= 2.0) return {0.0, 0.0, 0.0};

  const ProfileValue pa = psi(2.0 - x);
  const ProfileValue pb = psi(x - 1.0);
  const double A = pa.value, dA = -pa.d1, d2A = pa.d2;
  const double B = pb.value, dB = pb.d1, d2B = pb.d2;
  const double S = A + B;
  const double dS = dA + dB;
  const double num = dA * B - A * dB;
  const double dnum = d2A * B - A * d2B;

  ProfileValue out;
  out.value = A / S;
  out.d1 = sign * num / (S * S);
  out.d2 = dnum / (S * S) - 2.0 * num * dS / (S * S * S);
  return out;
}

ProfileValue temporal_cutoff(double t) {
  if (!(t > 0.0 && t < 1.0)) return {};
  const double u = t * (1.0 - t);
  const double du = 1.0 - 2.0 * t;
  const double lu = std::log(u);
  ProfileValue out;
  out.value = std::exp(-1.0 / u);
  out.d1 = du * std::exp(-1.0 / u - 2.0 * lu);
  out.d2 = (du * du * (1.0 - 2.0 * u) - 2.0 * u * u) * std::exp(-1.0 / u - 4.0 * lu);
  return out;
}

CutoffProfiles cutoff_profiles(double s, double t) {
  const ProfileValue x = spatial_cutoff(s);
  const ProfileValue v = temporal_cutoff(t);
  return {x.value, x.d1, x.d2, v.value, v.d1, v.d2};
}

double temporal_log_second_factor(int k, double t) {
  if (!(t > 0.0 && t < 1.0)) return -std::numeric_limits<double>::infinity();
  const double u = t * (1.0 - t);
  const double du = 1.0 - 2.0 * t;
  // k h'^2 + h'' = (k u'^2 - 2u^2 - 2u u'^2) / u^4, with h = -1/u
  const double poly = k * du * du - 2.0 * u * u - 2.0 * u * du * du;
  return std::log(static_cast<double>(k)) + std::log(std::abs(poly)) - 4.0 * std::log(u);
}

}  // namespace ewl
