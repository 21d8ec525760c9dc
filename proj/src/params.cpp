#include "ewl/params.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "ewl/error.hpp"

namespace ewl {

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::Dirichlet: return "dirichlet";
    case BoundaryKind::Neumann: return "neumann";
    case BoundaryKind::Mixed: return "mixed";
  }
  return "unknown";
}

BoundaryKind parse_boundary(std::string_view name) {
  if (name == "dirichlet") return BoundaryKind::Dirichlet;
  if (name == "neumann") return BoundaryKind::Neumann;
  if (name == "mixed") return BoundaryKind::Mixed;
  throw DomainError("unknown boundary kind '" + std::string(name) + "' (expected dirichlet|neumann|mixed)");
}

ProblemParams& ProblemParams::set_exact(const Rational& p_, const Rational& q_, const Rational& a_,
                                        const Rational& b_) {
  exact = ExactExponents{p_, q_, a_, b_};
  p = to_double(p_);
  q = to_double(q_);
  a = to_double(a_);
  b = to_double(b_);
  return *this;
}

ProblemParams ProblemParams::swapped() const {
  ProblemParams s = *this;
  std::swap(s.p, s.q);
  std::swap(s.a, s.b);
  std::swap(s.If, s.Ig);
  std::swap(s.f_nonneg, s.g_nonneg);
  if (s.exact) {
    std::swap(s.exact->p, s.exact->q);
    std::swap(s.exact->a, s.exact->b);
  }
  return s;
}

double unit_sphere_area(int N) {
  const double half = 0.5 * N;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

}  // namespace ewl
