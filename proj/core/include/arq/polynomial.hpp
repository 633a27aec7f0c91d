#pragma once

#include <initializer_list>
#include <vector>

#include "arq/jet.hpp"
#include "arq/types.hpp"

namespace arq {

/// Complex polynomial, coefficients in ascending degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Complex> coeffs);
  Polynomial(std::initializer_list<double> coeffs);

  /// lead * prod (s - r).
  static Polynomial from_roots(Complex lead, const std::vector<Complex>& roots);

  /// Degree after dropping exact trailing zeros; -1 for the zero polynomial.
  int degree() const;
  const std::vector<Complex>& coeffs() const noexcept { return coeffs_; }
  Complex leading() const;

  Complex operator()(Complex s) const;
  Jet operator()(const Jet& s) const;

  Polynomial derivative() const;
  /// p(alpha * s + beta).
  Polynomial compose_affine(Complex alpha, Complex beta) const;
  /// q(s)^k with q = *this, used for rational composition.
  Polynomial power(int k) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Complex c, const Polynomial& p);

  /// Zeros via companion-matrix eigenvalues followed by one Newton step each.
  /// Throws RootFindingFailure when the result is not finite.
  std::vector<Complex> roots() const;

 private:
  std::vector<Complex> coeffs_;
};

/// Denominator zeros split by half plane.
struct RootSplit {
  Complex lead;
  std::vector<Complex> right;  ///< Re > 0
  std::vector<Complex> left;   ///< Re < 0
};

/// Ratio of polynomials; represents an LST or a joint-transform factor.
class RationalLST {
 public:
  RationalLST() = default;
  RationalLST(Polynomial num, Polynomial den);

  const Polynomial& numerator() const noexcept { return num_; }
  const Polynomial& denominator() const noexcept { return den_; }

  Complex operator()(Complex s) const { return num_(s) / den_(s); }
  Jet operator()(const Jet& s) const { return num_(s) / den_(s); }

  /// True when numerator(0) == denominator(0) within tol.
  bool unit_at_zero(double tol = 1e-12) const;
  /// True when the numerator is identically zero.
  bool is_zero() const { return num_.degree() < 0; }

  /// Classifies denominator zeros; AmbiguousRoot if one lies within `axis_tol` of Re = 0.
  RootSplit split_denominator(double axis_tol = 1e-9) const;

  /// r(alpha * s + beta).
  RationalLST compose_affine(Complex alpha, Complex beta) const;

 private:
  Polynomial num_;
  Polynomial den_;
};

/// Groups numerically repeated zeros; each cluster is replaced by its mean.
struct RootCluster {
  Complex point;
  int multiplicity;
};
std::vector<RootCluster> cluster_roots(const std::vector<Complex>& roots, double rel_tol = 1e-6);

}  // namespace arq
