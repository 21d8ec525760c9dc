#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ewl/rational.hpp"

namespace ewl {

enum class BoundaryKind { Dirichlet, Neumann, Mixed };

std::string to_string(BoundaryKind kind);
BoundaryKind parse_boundary(std::string_view name);

/// Exact values of the exponents and weights, when the caller supplied them
/// as decimals or fractions. Threshold comparisons then carry no rounding.
struct ExactExponents {
  Rational p, q, a, b;
};

/// The tuple (N, p, q, a, b) plus boundary kind and the two boundary-data
/// integrals. Boundary data enter only through If = int f dsigma,
/// Ig = int g dsigma and the pointwise sign flags.
struct ProblemParams {
  int N = 3;
  double p = 2.0;
  double q = 2.0;
  double a = 0.0;
  double b = 0.0;
  BoundaryKind boundary = BoundaryKind::Dirichlet;
  double r0 = 1.0;
  double If = 0.0;
  double Ig = 0.0;
  bool f_nonneg = true;
  bool g_nonneg = true;
  bool omega_is_ball = true;
  std::optional<ExactExponents> exact;

  /// Sets p, q, a, b from exact rationals and keeps the double mirror in sync.
  ProblemParams& set_exact(const Rational& p_, const Rational& q_, const Rational& a_, const Rational& b_);

  /// Exchange (p, a, If, f) with (q, b, Ig, g).
  [[nodiscard]] ProblemParams swapped() const;

  [[nodiscard]] Rational exact_p() const { return exact ? exact->p : exact_from_double(p); }
  [[nodiscard]] Rational exact_q() const { return exact ? exact->q : exact_from_double(q); }
  [[nodiscard]] Rational exact_a() const { return exact ? exact->a : exact_from_double(a); }
  [[nodiscard]] Rational exact_b() const { return exact ? exact->b : exact_from_double(b); }
};

/// Surface area of the unit sphere in R^N.
double unit_sphere_area(int N);

}  // namespace ewl
