#pragma once

#include <array>
#include <cassert>
#include <functional>
#include <vector>

#include "arq/types.hpp"

namespace arq {

inline constexpr int kMaxJetOrder = 8;

/// Truncated Taylor expansion f(z0 + e) = sum_k c[k] e^k, k <= order.
///
/// Coefficients are stored, not derivatives: c[k] = f^(k)(z0) / k!.
/// Binary operations promote to the larger order; a plain constant has order 0.
class Jet {
 public:
  Jet() = default;
  Jet(Complex value) { c_[0] = value; }  // NOLINT(google-explicit-constructor)
  Jet(double value) { c_[0] = value; }   // NOLINT(google-explicit-constructor)
  Jet(Complex value, int order);

  /// Independent variable z0 + e truncated at the given order.
  static Jet variable(Complex at, int order);

  int order() const noexcept { return order_; }
  Complex value() const noexcept { return c_[0]; }
  Complex operator[](int k) const noexcept { return k <= order_ ? c_[k] : Complex{}; }
  Complex& coeff(int k) {
    assert(k >= 0 && k <= kMaxJetOrder);
    if (k > order_) order_ = k;
    return c_[k];
  }
  /// k-th derivative at the expansion point.
  Complex derivative(int k) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet operator-() const;

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const Jet& b) { return a *= b; }
  friend Jet operator/(Jet a, const Jet& b) { return a /= b; }

  /// Same expansion with every coefficient above `order` dropped.
  Jet truncated(int order) const;
  /// Affine re-expansion: returns g with g(e) = f(alpha * e), coefficients c[k] alpha^k.
  Jet scaled_variable(Complex alpha) const;

 private:
  std::array<Complex, kMaxJetOrder + 1> c_{};
  int order_ = 0;
};

Jet exp(const Jet& x);
Jet pow(const Jet& x, int n);
Jet reciprocal(const Jet& x);

/// Matrix with truncated Taylor coefficients: A(z0 + e) = sum_k coeff[k] e^k.
class MatrixJet {
 public:
  MatrixJet() = default;
  MatrixJet(Eigen::Index rows, Eigen::Index cols, int order);
  explicit MatrixJet(const CMatrix& constant);

  static MatrixJet identity(Eigen::Index n, int order);
  /// Builds a matrix jet entry-by-entry.
  static MatrixJet from_entries(Eigen::Index rows, Eigen::Index cols, int order,
                                const std::function<Jet(Eigen::Index, Eigen::Index)>& entry);
  static MatrixJet diagonal(const std::vector<Jet>& d);

  Eigen::Index rows() const noexcept { return rows_; }
  Eigen::Index cols() const noexcept { return cols_; }
  int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }

  const CMatrix& operator[](int k) const { return coeffs_[static_cast<std::size_t>(k)]; }
  CMatrix& operator[](int k) { return coeffs_[static_cast<std::size_t>(k)]; }
  const CMatrix& value() const { return coeffs_.front(); }

  Jet entry(Eigen::Index i, Eigen::Index j) const;
  void set_entry(Eigen::Index i, Eigen::Index j, const Jet& v);

  /// Max-abs norm over all coefficients.
  double norm() const;

  MatrixJet& operator+=(const MatrixJet& o);
  MatrixJet& operator-=(const MatrixJet& o);
  MatrixJet& operator*=(Complex s);
  friend MatrixJet operator+(MatrixJet a, const MatrixJet& b) { return a += b; }
  friend MatrixJet operator-(MatrixJet a, const MatrixJet& b) { return a -= b; }
  friend MatrixJet operator*(const MatrixJet& a, const MatrixJet& b);
  friend MatrixJet operator*(const MatrixJet& a, const CMatrix& b);
  friend MatrixJet operator*(const CMatrix& a, const MatrixJet& b);

  /// Rows scaled by diagonal jets: diag(d) * A.
  MatrixJet scale_rows(const std::vector<Jet>& d) const;
  /// Columns scaled by diagonal jets: A * diag(d).
  MatrixJet scale_cols(const std::vector<Jet>& d) const;

  MatrixJet inverse() const;
  MatrixJet truncated(int order) const;
  /// Coefficients multiplied by alpha^k (re-expansion in a scaled variable).
  MatrixJet scaled_variable(Complex alpha) const;

 private:
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<CMatrix> coeffs_;
};

}  // namespace arq
