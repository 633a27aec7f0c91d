#include "boundary.hpp"

#include <algorithm>
#include <sstream>

namespace arq::detail {

namespace {

Jet root_product(const Jet& s, const std::vector<Complex>& roots) {
  Jet acc(1.0, s.order());
  for (const auto& r : roots) acc *= s - Jet(r);
  return acc;
}

}  // namespace

Jet FactoredEntry::value(const Jet& s) const {
  Jet den = Jet(lead) * root_product(s, right) * root_product(s, left);
  return num(s) / den;
}

Jet FactoredEntry::cleared(const Jet& s, const std::vector<Complex>& row_roots) const {
  std::vector<Complex> rest = row_roots;
  for (const auto& r : right) {
    auto it = std::find(rest.begin(), rest.end(), r);
    if (it == rest.end()) throw Error(ErrorCode::RootFindingFailure, "kernel pole missing from its row factor");
    rest.erase(it);
  }
  return num(s) * root_product(s, rest) / (Jet(lead) * root_product(s, left));
}

FactoredEntry factor_entry(const RationalLST& r, std::vector<Complex>& anchors) {
  RootSplit split = r.split_denominator();
  FactoredEntry e;
  e.num = r.numerator();
  e.lead = split.lead;
  e.left = split.left;
  for (const auto& z : split.right) {
    auto it = std::find_if(anchors.begin(), anchors.end(),
                           [&](Complex a) { return std::abs(a - z) <= 1e-6 * std::max(1.0, std::abs(z)); });
    if (it == anchors.end()) {
      anchors.push_back(z);
      e.right.push_back(z);
    } else {
      e.right.push_back(*it);
    }
  }
  return e;
}

BoundaryResult solve_boundary(const BoundarySetup& setup, const TruncationPolicy& policy) {
  const auto n = static_cast<Eigen::Index>(setup.roots.size());
  BoundaryResult out;
  out.offsets.resize(static_cast<std::size_t>(n));
  Eigen::Index total = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    out.offsets[static_cast<std::size_t>(j)] = total;
    total += static_cast<Eigen::Index>(setup.roots[static_cast<std::size_t>(j)].size());
  }

  FixedPointProblem aug;
  aug.H = setup.H;
  aug.shift = setup.shift;
  aug.poles = setup.kernel_poles;
  for (const auto& row : setup.roots) aug.poles.insert(aug.poles.end(), row.begin(), row.end());
  {
    auto roots = setup.roots;
    auto offsets = out.offsets;
    auto forcing = setup.forcing;
    aug.V = [roots, offsets, forcing, n, total](const Jet& s) {
      MatrixJet v(n, total + 1, s.order());
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto& rj = roots[static_cast<std::size_t>(j)];
        if (rj.empty()) continue;
        const Jet inv = reciprocal(root_product(s, rj));
        Jet p = s;
        for (std::size_t l = 1; l <= rj.size(); ++l) {
          v.set_entry(j, offsets[static_cast<std::size_t>(j)] + static_cast<Eigen::Index>(l) - 1, p * inv);
          p *= s;
        }
      }
      if (forcing) {
        const MatrixJet f = forcing(s);
        for (Eigen::Index j = 0; j < n; ++j) v.set_entry(j, total, f.entry(j, 0));
      }
      return v;
    };
  }
  if (setup.tail.size() > 0) {
    aug.tail = CMatrix::Zero(n, total + 1);
    aug.tail.col(total) = setup.tail;
  }

  CMatrix system = CMatrix::Zero(total, total);
  CVector rhs = CVector::Zero(total);
  Eigen::Index row = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& rj = setup.roots[static_cast<std::size_t>(j)];
    const Eigen::Index deg = static_cast<Eigen::Index>(rj.size());
    for (const auto& cluster : cluster_roots(rj, 1e-12)) {
      const int order = cluster.multiplicity - 1;
      if (order > kMaxJetOrder) throw Error(ErrorCode::AmbiguousRoot, "zero multiplicity exceeds jet order");
      const Jet sv = Jet::variable(cluster.point, order);
      BlockResult block = iterate_block(aug, setup.shift(sv), policy);
      MatrixJet phi = setup.cleared_row(sv, j) * block.value;
      Jet p = sv;
      for (Eigen::Index l = 1; l <= deg; ++l) {
        const Eigen::Index col = out.offsets[static_cast<std::size_t>(j)] + l - 1;
        phi.set_entry(0, col, phi.entry(0, col) + p);
        p *= sv;
      }
      for (int q = 0; q <= order; ++q) {
        system.row(row) = phi[q].block(0, 0, 1, total);
        rhs(row) = -phi[q](0, total);
        ++row;
      }
      std::ostringstream label;
      label << "row " << j << " zero (" << cluster.point.real() << "," << cluster.point.imag() << ")";
      out.diagnostics.push_back({label.str(), block.terms, block.residual});
    }
  }

  LinearSolve sol = solve_linear(system, rhs);
  out.coefficients = sol.x;
  out.condition_number = sol.condition_number;
  out.residual = sol.residual;
  out.problem = resolve_problem(aug, sol.x);

  const CVector z0 = iterate_block(out.problem, Jet(0.0), policy).value.value().col(0);
  CVector f0 = CVector::Zero(n);
  if (setup.forcing) f0 = setup.forcing(Jet(0.0)).value().col(0);
  out.constant_terms.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Complex d{1.0};
    for (const auto& r : setup.roots[static_cast<std::size_t>(j)]) d *= -r;
    out.constant_terms(j) = d * (z0(j) - f0(j)) - (setup.cleared_row(Jet(0.0), j).value() * z0)(0, 0);
  }
  return out;
}

}  // namespace arq::detail
