#pragma once

namespace fracwick {

/// Hurst exponent, validated to lie in the open interval (0, 1).
class HurstParameter {
 public:
  explicit HurstParameter(double h);

  double value() const noexcept { return h_; }
  double two_h() const noexcept { return 2.0 * h_; }

  /// True iff h > 1/2, the regime where the phi-kernel is a density.
  bool requires_long_memory() const noexcept { return h_ > 0.5; }

 private:
  double h_;
};

/// Evidence that H > 1/2 was checked. Every phi-calculus routine takes one.
class PhiContext {
 public:
  explicit PhiContext(HurstParameter h);
  explicit PhiContext(double h) : PhiContext(HurstParameter(h)) {}

  const HurstParameter& hurst() const noexcept { return h_; }
  double h() const noexcept { return h_.value(); }
  double two_h() const noexcept { return h_.two_h(); }

 private:
  HurstParameter h_;
};

}  // namespace fracwick
