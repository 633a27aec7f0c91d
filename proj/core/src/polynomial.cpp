#include "arq/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace arq {

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {}

Polynomial::Polynomial(std::initializer_list<double> coeffs) {
  for (double c : coeffs) coeffs_.emplace_back(c);
}

Polynomial Polynomial::from_roots(Complex lead, const std::vector<Complex>& roots) {
  Polynomial p(std::vector<Complex>{lead});
  for (const auto& r : roots) p = p * Polynomial(std::vector<Complex>{-r, 1.0});
  return p;
}

int Polynomial::degree() const {
  for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 0; --k)
    if (coeffs_[static_cast<std::size_t>(k)] != Complex{}) return k;
  return -1;
}

Complex Polynomial::leading() const {
  const int d = degree();
  return d < 0 ? Complex{} : coeffs_[static_cast<std::size_t>(d)];
}

Complex Polynomial::operator()(Complex s) const {
  Complex acc{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

Jet Polynomial::operator()(const Jet& s) const {
  Jet acc(0.0, s.order());
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= s;
    acc += Jet(*it);
  }
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial(std::vector<Complex>{0.0});
  std::vector<Complex> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<double>(k);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::compose_affine(Complex alpha, Complex beta) const {
  const Polynomial inner(std::vector<Complex>{beta, alpha});
  Polynomial acc(std::vector<Complex>{0.0});
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
    acc = acc * inner + Polynomial(std::vector<Complex>{*it});
  return acc;
}

Polynomial Polynomial::power(int k) const {
  Polynomial r(std::vector<Complex>{1.0});
  for (int i = 0; i < k; ++i) r = r * *this;
  return r;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<Complex> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t k = 0; k < a.coeffs_.size(); ++k) c[k] += a.coeffs_[k];
  for (std::size_t k = 0; k < b.coeffs_.size(); ++k) c[k] += b.coeffs_[k];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + Complex(-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.coeffs_.empty() || b.coeffs_.empty()) return Polynomial(std::vector<Complex>{0.0});
  std::vector<Complex> c(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(c));
}

Polynomial operator*(Complex c, const Polynomial& p) {
  std::vector<Complex> r = p.coeffs_;
  for (auto& x : r) x *= c;
  return Polynomial(std::move(r));
}

std::vector<Complex> Polynomial::roots() const {
  const int d = degree();
  if (d <= 0) return {};
  const Complex lead = coeffs_[static_cast<std::size_t>(d)];
  CMatrix companion = CMatrix::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -coeffs_[static_cast<std::size_t>(i)] / lead;
  Eigen::ComplexEigenSolver<CMatrix> solver(companion, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::RootFindingFailure, "companion eigenvalues did not converge");
  const Polynomial dp = derivative();
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    Complex z = solver.eigenvalues()(i);
    const Complex slope = dp(z);
    if (std::abs(slope) > 1e-14 * std::max(1.0, std::abs(lead))) {
      const Complex step = (*this)(z) / slope;
      if (std::isfinite(step.real()) && std::isfinite(step.imag()) && std::abs(step) < 1e-3 * std::max(1.0, std::abs(z)))
        z -= step;
    }
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(ErrorCode::RootFindingFailure, "non-finite polynomial zero");
    out.push_back(z);
  }
  return out;
}

RationalLST::RationalLST(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.degree() < 0) throw Error(ErrorCode::InvalidSpec, "rational transform with zero denominator");
}

bool RationalLST::unit_at_zero(double tol) const {
  return std::abs(num_(Complex{}) - den_(Complex{})) <= tol * std::max(1.0, std::abs(den_(Complex{})));
}

RootSplit RationalLST::split_denominator(double axis_tol) const {
  RootSplit split{den_.leading(), {}, {}};
  for (const auto& z : den_.roots()) {
    if (std::abs(z.real()) <= axis_tol)
      throw Error(ErrorCode::AmbiguousRoot, "denominator zero on the imaginary axis");
    (z.real() > 0 ? split.right : split.left).push_back(z);
  }
  return split;
}

RationalLST RationalLST::compose_affine(Complex alpha, Complex beta) const {
  return RationalLST(num_.compose_affine(alpha, beta), den_.compose_affine(alpha, beta));
}

std::vector<RootCluster> cluster_roots(const std::vector<Complex>& roots, double rel_tol) {
  std::vector<RootCluster> clusters;
  std::vector<Complex> sums;
  for (const auto& r : roots) {
    bool merged = false;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (std::abs(clusters[c].point - r) <= rel_tol * std::max(1.0, std::abs(r))) {
        sums[c] += r;
        ++clusters[c].multiplicity;
        clusters[c].point = sums[c] / static_cast<double>(clusters[c].multiplicity);
        merged = true;
        break;
      }
    }
    if (!merged) {
      clusters.push_back({r, 1});
      sums.push_back(r);
    }
  }
  return clusters;
}

}  // namespace arq
