#include "arq/jet.hpp"

#include <algorithm>
#include <cmath>

namespace arq {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

Jet::Jet(Complex value, int order) : order_(order) {
  assert(order >= 0 && order <= kMaxJetOrder);
  c_[0] = value;
}

Jet Jet::variable(Complex at, int order) {
  Jet j(at, order);
  if (order >= 1) j.c_[1] = 1.0;
  return j;
}

Complex Jet::derivative(int k) const { return (*this)[k] * factorial(k); }

Jet& Jet::operator+=(const Jet& o) {
  order_ = std::max(order_, o.order_);
  for (int k = 0; k <= o.order_; ++k) c_[k] += o.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  order_ = std::max(order_, o.order_);
  for (int k = 0; k <= o.order_; ++k) c_[k] -= o.c_[k];
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  const int n = std::max(order_, o.order_);
  std::array<Complex, kMaxJetOrder + 1> r{};
  for (int i = 0; i <= order_; ++i) {
    if (c_[i] == Complex{}) continue;
    for (int j = 0; j <= o.order_ && i + j <= n; ++j) r[i + j] += c_[i] * o.c_[j];
  }
  c_ = r;
  order_ = n;
  return *this;
}

Jet& Jet::operator/=(const Jet& o) {
  const int n = std::max(order_, o.order_);
  std::array<Complex, kMaxJetOrder + 1> q{};
  const Complex b0 = o.c_[0];
  for (int k = 0; k <= n; ++k) {
    Complex acc = k <= order_ ? c_[k] : Complex{};
    for (int j = 1; j <= std::min(k, o.order_); ++j) acc -= o.c_[j] * q[k - j];
    q[k] = acc / b0;
  }
  c_ = q;
  order_ = n;
  return *this;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (int k = 0; k <= order_; ++k) r.c_[k] = -c_[k];
  return r;
}

Jet Jet::truncated(int order) const {
  Jet r(c_[0], std::min(order, order_));
  for (int k = 1; k <= r.order_; ++k) r.c_[k] = c_[k];
  return r;
}

Jet Jet::scaled_variable(Complex alpha) const {
  Jet r = *this;
  Complex p = 1.0;
  for (int k = 1; k <= order_; ++k) {
    p *= alpha;
    r.c_[k] *= p;
  }
  return r;
}

Jet exp(const Jet& x) {
  Jet e(std::exp(x.value()), x.order());
  for (int k = 1; k <= x.order(); ++k) {
    Complex acc{};
    for (int j = 1; j <= k; ++j) acc += static_cast<double>(j) * x[j] * e[k - j];
    e.coeff(k) = acc / static_cast<double>(k);
  }
  return e;
}

Jet pow(const Jet& x, int n) {
  if (n < 0) return reciprocal(pow(x, -n));
  Jet result(1.0, x.order());
  Jet base = x;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n > 0) base *= base;
  }
  return result;
}

Jet reciprocal(const Jet& x) { return Jet(1.0, x.order()) / x; }

MatrixJet::MatrixJet(Eigen::Index rows, Eigen::Index cols, int order)
    : rows_(rows), cols_(cols), coeffs_(static_cast<std::size_t>(order + 1), CMatrix::Zero(rows, cols)) {}

MatrixJet::MatrixJet(const CMatrix& constant)
    : rows_(constant.rows()), cols_(constant.cols()), coeffs_{constant} {}

MatrixJet MatrixJet::identity(Eigen::Index n, int order) {
  MatrixJet m(n, n, order);
  m.coeffs_[0].setIdentity();
  return m;
}

MatrixJet MatrixJet::from_entries(Eigen::Index rows, Eigen::Index cols, int order,
                                  const std::function<Jet(Eigen::Index, Eigen::Index)>& entry) {
  MatrixJet m(rows, cols, order);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m.set_entry(i, j, entry(i, j));
  return m;
}

MatrixJet MatrixJet::diagonal(const std::vector<Jet>& d) {
  int order = 0;
  for (const auto& x : d) order = std::max(order, x.order());
  const auto n = static_cast<Eigen::Index>(d.size());
  MatrixJet m(n, n, order);
  for (Eigen::Index i = 0; i < n; ++i) m.set_entry(i, i, d[static_cast<std::size_t>(i)]);
  return m;
}

Jet MatrixJet::entry(Eigen::Index i, Eigen::Index j) const {
  Jet r(coeffs_[0](i, j), order());
  for (int k = 1; k <= order(); ++k) r.coeff(k) = coeffs_[static_cast<std::size_t>(k)](i, j);
  return r;
}

void MatrixJet::set_entry(Eigen::Index i, Eigen::Index j, const Jet& v) {
  for (int k = 0; k <= order(); ++k) coeffs_[static_cast<std::size_t>(k)](i, j) = v[k];
}

double MatrixJet::norm() const {
  double n = 0.0;
  for (const auto& c : coeffs_) n = std::max(n, max_abs(c));
  return n;
}

MatrixJet& MatrixJet::operator+=(const MatrixJet& o) {
  if (o.order() > order()) coeffs_.resize(o.coeffs_.size(), CMatrix::Zero(rows_, cols_));
  for (int k = 0; k <= o.order(); ++k) coeffs_[static_cast<std::size_t>(k)] += o[k];
  return *this;
}

MatrixJet& MatrixJet::operator-=(const MatrixJet& o) {
  if (o.order() > order()) coeffs_.resize(o.coeffs_.size(), CMatrix::Zero(rows_, cols_));
  for (int k = 0; k <= o.order(); ++k) coeffs_[static_cast<std::size_t>(k)] -= o[k];
  return *this;
}

MatrixJet& MatrixJet::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

MatrixJet operator*(const MatrixJet& a, const MatrixJet& b) {
  const int n = std::max(a.order(), b.order());
  MatrixJet r(a.rows(), b.cols(), n);
  for (int i = 0; i <= a.order(); ++i)
    for (int j = 0; j <= b.order() && i + j <= n; ++j) r[i + j].noalias() += a[i] * b[j];
  return r;
}

MatrixJet operator*(const MatrixJet& a, const CMatrix& b) {
  MatrixJet r(a.rows(), b.cols(), a.order());
  for (int k = 0; k <= a.order(); ++k) r[k].noalias() = a[k] * b;
  return r;
}

MatrixJet operator*(const CMatrix& a, const MatrixJet& b) {
  MatrixJet r(a.rows(), b.cols(), b.order());
  for (int k = 0; k <= b.order(); ++k) r[k].noalias() = a * b[k];
  return r;
}

MatrixJet MatrixJet::scale_rows(const std::vector<Jet>& d) const {
  int n = order();
  for (const auto& x : d) n = std::max(n, x.order());
  MatrixJet r(rows_, cols_, n);
  for (Eigen::Index i = 0; i < rows_; ++i) {
    const Jet& di = d[static_cast<std::size_t>(i)];
    for (int p = 0; p <= di.order(); ++p) {
      if (di[p] == Complex{}) continue;
      for (int q = 0; q <= order() && p + q <= n; ++q) r[p + q].row(i) += di[p] * coeffs_[static_cast<std::size_t>(q)].row(i);
    }
  }
  return r;
}

MatrixJet MatrixJet::scale_cols(const std::vector<Jet>& d) const {
  int n = order();
  for (const auto& x : d) n = std::max(n, x.order());
  MatrixJet r(rows_, cols_, n);
  for (Eigen::Index j = 0; j < cols_; ++j) {
    const Jet& dj = d[static_cast<std::size_t>(j)];
    for (int p = 0; p <= dj.order(); ++p) {
      if (dj[p] == Complex{}) continue;
      for (int q = 0; q <= order() && p + q <= n; ++q) r[p + q].col(j) += dj[p] * coeffs_[static_cast<std::size_t>(q)].col(j);
    }
  }
  return r;
}

MatrixJet MatrixJet::inverse() const {
  Eigen::PartialPivLU<CMatrix> lu(coeffs_[0]);
  MatrixJet x(rows_, cols_, order());
  x[0] = lu.inverse();
  for (int k = 1; k <= order(); ++k) {
    CMatrix acc = CMatrix::Zero(rows_, cols_);
    for (int j = 1; j <= k; ++j) acc.noalias() += coeffs_[static_cast<std::size_t>(j)] * x[k - j];
    x[k] = -x[0] * acc;
  }
  return x;
}

MatrixJet MatrixJet::truncated(int order) const {
  MatrixJet r = *this;
  r.coeffs_.resize(static_cast<std::size_t>(std::min(order, this->order()) + 1));
  return r;
}

MatrixJet MatrixJet::scaled_variable(Complex alpha) const {
  MatrixJet r = *this;
  Complex p = 1.0;
  for (int k = 1; k <= order(); ++k) {
    p *= alpha;
    r.coeffs_[static_cast<std::size_t>(k)] *= p;
  }
  return r;
}

}  // namespace arq
