#pragma once

#include <array>
#include <string>
#include <vector>

namespace fracwick {

// Closed symbolic family of scalar maps with exact derivatives:
// polynomials of degree <= 4, exp(a x), sin(a x), cos(a x), and finite
// weighted sums of those.
class SmoothFunction {
 public:
  enum class Kind { Polynomial, Exp, Sin, Cos };

  /// c[0] + c[1] x + ... (at most 5 coefficients).
  static SmoothFunction polynomial(std::vector<double> coeffs);
  static SmoothFunction constant(double c) { return polynomial({c}); }
  static SmoothFunction identity() { return polynomial({0.0, 1.0}); }
  static SmoothFunction power(int k);
  static SmoothFunction exp(double a);
  static SmoothFunction sin(double a);
  static SmoothFunction cos(double a);

  /// k-th derivative at x, k in [0, 3].
  double derivative(int k, double x) const;
  double operator()(double x) const { return derivative(0, x); }
  double d1(double x) const { return derivative(1, x); }
  double d2(double x) const { return derivative(2, x); }

  SmoothFunction operator+(const SmoothFunction& other) const;
  SmoothFunction operator*(double s) const;

  /// Largest polynomial degree among terms; -1 if any term is not a polynomial.
  int polynomial_degree() const;
  bool is_polynomial() const { return polynomial_degree() >= 0; }

  /// Exact derivative as a member of the family (polynomials only).
  SmoothFunction derivative_function() const;

  std::string describe() const;

  /// Compares derivatives against central differences at `points`;
  /// returns the worst relative discrepancy.
  double finite_difference_discrepancy(const std::vector<double>& points) const;

 private:
  struct Term {
    Kind kind;
    double weight;
    double rate;                   // a for exp/sin/cos
    std::array<double, 5> coeffs;  // polynomial only
  };
  std::vector<Term> terms_;
};

}  // namespace fracwick
