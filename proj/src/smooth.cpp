#include "fracwick/smooth.hpp"

#include <algorithm>
#include <cmath>

#include "fracwick/errors.hpp"
#include "fracwick/format.hpp"

namespace fracwick {

SmoothFunction SmoothFunction::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty() || coeffs.size() > 5) {
    throw UnsupportedCase("polynomial needs 1 to 5 coefficients (degree <= 4)");
  }
  Term t{Kind::Polynomial, 1.0, 0.0, {}};
  std::copy(coeffs.begin(), coeffs.end(), t.coeffs.begin());
  SmoothFunction f;
  f.terms_.push_back(t);
  return f;
}

SmoothFunction SmoothFunction::power(int k) {
  if (k < 0 || k > 4) throw UnsupportedCase("power must be in [0, 4]");
  std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
  c.back() = 1.0;
  return polynomial(std::move(c));
}

SmoothFunction SmoothFunction::exp(double a) {
  SmoothFunction f;
  f.terms_.push_back({Kind::Exp, 1.0, a, {}});
  return f;
}

SmoothFunction SmoothFunction::sin(double a) {
  SmoothFunction f;
  f.terms_.push_back({Kind::Sin, 1.0, a, {}});
  return f;
}

SmoothFunction SmoothFunction::cos(double a) {
  SmoothFunction f;
  f.terms_.push_back({Kind::Cos, 1.0, a, {}});
  return f;
}

namespace {

double poly_derivative(const std::array<double, 5>& c, int k, double x) {
  // Horner on the k-th derivative's coefficients.
  double acc = 0.0;
  for (int i = 4; i >= k; --i) {
    double factor = 1.0;
    for (int j = 0; j < k; ++j) factor *= static_cast<double>(i - j);
    acc = acc * x + factor * c[static_cast<std::size_t>(i)];
  }
  return acc;
}

}  // namespace

double SmoothFunction::derivative(int k, double x) const {
  if (k < 0 || k > 3) throw DomainError("derivative order must be in [0, 3]");
  double total = 0.0;
  for (const auto& t : terms_) {
    double v = 0.0;
    const double a = t.rate;
    switch (t.kind) {
      case Kind::Polynomial:
        v = poly_derivative(t.coeffs, k, x);
        break;
      case Kind::Exp:
        v = std::pow(a, k) * std::exp(a * x);
        break;
      case Kind::Sin: {
        // d^k sin(ax) = a^k sin(ax + k pi/2)
        const double s = std::sin(a * x), c = std::cos(a * x);
        const double cycle[4] = {s, c, -s, -c};
        v = std::pow(a, k) * cycle[k];
        break;
      }
      case Kind::Cos: {
        const double s = std::sin(a * x), c = std::cos(a * x);
        const double cycle[4] = {c, -s, -c, s};
        v = std::pow(a, k) * cycle[k];
        break;
      }
    }
    total += t.weight * v;
  }
  return total;
}

SmoothFunction SmoothFunction::operator+(const SmoothFunction& other) const {
  SmoothFunction f = *this;
  f.terms_.insert(f.terms_.end(), other.terms_.begin(), other.terms_.end());
  return f;
}

SmoothFunction SmoothFunction::operator*(double s) const {
  SmoothFunction f = *this;
  for (auto& t : f.terms_) t.weight *= s;
  return f;
}

int SmoothFunction::polynomial_degree() const {
  int deg = 0;
  for (const auto& t : terms_) {
    if (t.kind != Kind::Polynomial) return -1;
    for (int i = 4; i > deg; --i) {
      if (t.weight != 0.0 && t.coeffs[static_cast<std::size_t>(i)] != 0.0) {
        deg = i;
        break;
      }
    }
  }
  return deg;
}

SmoothFunction SmoothFunction::derivative_function() const {
  if (!is_polynomial()) throw UnsupportedCase("derivative_function needs a polynomial");
  std::array<double, 5> c{};
  for (const auto& t : terms_) {
    for (std::size_t i = 1; i < 5; ++i) {
      c[i - 1] += t.weight * static_cast<double>(i) * t.coeffs[i];
    }
  }
  return polynomial({c.begin(), c.end()});
}

std::string SmoothFunction::describe() const {
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += " + ";
    std::string body;
    switch (t.kind) {
      case Kind::Polynomial: {
        body = "poly(";
        for (std::size_t i = 0; i < 5; ++i) {
          body += (i ? "," : "") + format_double(t.coeffs[i]);
        }
        body += ")";
        break;
      }
      case Kind::Exp: body = "exp(" + format_double(t.rate) + "x)"; break;
      case Kind::Sin: body = "sin(" + format_double(t.rate) + "x)"; break;
      case Kind::Cos: body = "cos(" + format_double(t.rate) + "x)"; break;
    }
    out += t.weight == 1.0 ? body : format_double(t.weight) + "*" + body;
  }
  return out;
}

double SmoothFunction::finite_difference_discrepancy(
    const std::vector<double>& points) const {
  double worst = 0.0;
  for (double x : points) {
    const double h = 1e-4 * std::max(1.0, std::abs(x));
    for (int k = 0; k < 2; ++k) {
      const double fd = (derivative(k, x + h) - derivative(k, x - h)) / (2.0 * h);
      const double exact = derivative(k + 1, x);
      const double scale = std::max({1.0, std::abs(exact), std::abs(fd)});
      worst = std::max(worst, std::abs(fd - exact) / scale);
    }
  }
  return worst;
}

}  // namespace fracwick
