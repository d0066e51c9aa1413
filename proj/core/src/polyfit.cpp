#include "jnt/polyfit.hpp"

#include <cmath>
#include <string>

#include "jnt/error.hpp"

namespace jnt {

namespace {

// Column-equilibrated design: entry (j, i) = sqrt(w_j) x_j^i / scale_i with
// every column scaled to unit 2-norm.
struct ScaledDesign {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd scale;
};

ScaledDesign make_design(std::span<const double> frequencies, double f0, int terms,
                         std::span<const double> sqrt_w) {
  const auto n = static_cast<Eigen::Index>(frequencies.size());
  ScaledDesign d{Eigen::MatrixXd(n, terms), Eigen::VectorXd(terms)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const double r = frequencies[static_cast<std::size_t>(j)] / f0;
    const double x = r * r;
    double p = sqrt_w.empty() ? 1.0 : sqrt_w[static_cast<std::size_t>(j)];
    for (int i = 0; i < terms; ++i) {
      d.matrix(j, i) = p;
      p *= x;
    }
  }
  for (int i = 0; i < terms; ++i) {
    const double norm = d.matrix.col(i).norm();
    d.scale(i) = norm;
    if (norm > 0.0) d.matrix.col(i) /= norm;
  }
  return d;
}

int leading_rank(const Eigen::MatrixXd& r, int terms) {
  double max_diag = 0.0;
  for (int i = 0; i < terms; ++i) max_diag = std::max(max_diag, std::abs(r(i, i)));
  for (int i = 0; i < terms; ++i) {
    if (!(std::abs(r(i, i)) > kRankTolerance * max_diag)) return i;
  }
  return terms;
}

}  // namespace

void PolyModel::validate() const {
  if (order < 2 || order % 2 != 0) {
    throw ArgumentError("polynomial order must be even and >= 2, got " + std::to_string(order));
  }
  if (!(f0 > 0.0)) throw ArgumentError("reference frequency must be positive");
}

PolyFit fit(const PolyModel& model, const RatioSpectrum& spectrum, double fmax, std::span<const double> weights) {
  model.validate();
  const std::size_t n = blocks_up_to(spectrum.frequencies, fmax);
  const int terms = model.terms();
  if (n < static_cast<std::size_t>(terms)) {
    throw UnderdeterminedError("order " + std::to_string(model.order) + " needs " + std::to_string(terms) +
                               " blocks below fmax, have " + std::to_string(n));
  }

  std::vector<double> sqrt_w;
  if (!weights.empty()) {
    if (weights.size() != spectrum.size()) throw ArgumentError("fit: one weight per spectrum block required");
    sqrt_w.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (!(weights[j] > 0.0) || !std::isfinite(weights[j])) throw ArgumentError("fit: weights must be positive");
      sqrt_w[j] = std::sqrt(weights[j]);
    }
  }

  const std::span<const double> freqs(spectrum.frequencies.data(), n);
  const ScaledDesign design = make_design(freqs, model.f0, terms, sqrt_w);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    y(static_cast<Eigen::Index>(j)) = spectrum.ratios[j] * (sqrt_w.empty() ? 1.0 : sqrt_w[j]);
  }

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(design.matrix);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(terms, terms).triangularView<Eigen::Upper>();
  for (int i = 0; i < terms; ++i) {
    if (!(design.scale(i) > 0.0)) throw SingularFitError("fit: design column " + std::to_string(i) + " is zero");
  }
  if (leading_rank(r, terms) < terms) {
    throw SingularFitError("fit: rank-deficient design for order " + std::to_string(model.order));
  }

  const Eigen::VectorXd qty = qr.householderQ().transpose() * y;
  const Eigen::VectorXd b = r.triangularView<Eigen::Upper>().solve(qty.head(terms));

  // Residual sum of squares from the orthogonal complement of Q^T y.
  const double ssr = qty.tail(static_cast<Eigen::Index>(n) - terms).squaredNorm();
  const std::size_t dof = n - static_cast<std::size_t>(terms);

  PolyFit out;
  out.model = model;
  out.n_points = n;
  out.fmax = fmax;
  out.weighted = !sqrt_w.empty();
  out.residual_variance = dof > 0 ? ssr / static_cast<double>(dof) : 0.0;
  out.coeffs.resize(static_cast<std::size_t>(terms));
  for (int i = 0; i < terms; ++i) out.coeffs[static_cast<std::size_t>(i)] = b(i) / design.scale(i);

  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(terms, terms));
  Eigen::MatrixXd cov = out.residual_variance * (r_inv * r_inv.transpose());
  const Eigen::VectorXd inv_scale = design.scale.cwiseInverse();
  cov = inv_scale.asDiagonal() * cov * inv_scale.asDiagonal();
  out.coeff_cov = 0.5 * (cov + cov.transpose());
  out.sigma_a0_ran = std::sqrt(std::max(0.0, out.coeff_cov(0, 0)));
  return out;
}

double evaluate(std::span<const double> coeffs, double f0, double frequency) noexcept {
  const double r = frequency / f0;
  const double x = r * r;
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<double> predict(const PolyFit& fit, std::span<const double> frequencies) {
  std::vector<double> out;
  out.reserve(frequencies.size());
  for (double f : frequencies) out.push_back(evaluate(fit.coeffs, fit.model.f0, f));
  return out;
}

std::vector<double> residuals(const PolyFit& fit, const RatioSpectrum& spectrum, double fmax) {
  const std::size_t n = blocks_up_to(spectrum.frequencies, fmax);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = spectrum.ratios[j] - evaluate(fit.coeffs, fit.model.f0, spectrum.frequencies[j]);
  }
  return out;
}

NestedEvenBasis::NestedEvenBasis(std::span<const double> frequencies, double f0, int max_terms) {
  if (max_terms < 1) throw ArgumentError("NestedEvenBasis: need at least one term");
  const auto n = static_cast<Eigen::Index>(frequencies.size());
  const int cols = static_cast<int>(std::min<Eigen::Index>(max_terms, n));
  if (cols == 0) throw UnderdeterminedError("NestedEvenBasis: no blocks");
  const ScaledDesign design = make_design(frequencies, f0, cols, {});
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(design.matrix);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(cols, cols).triangularView<Eigen::Upper>();
  usable_terms_ = leading_rank(r, cols);
  for (int i = 0; i < usable_terms_; ++i) {
    if (!(design.scale(i) > 0.0)) {
      usable_terms_ = i;
      break;
    }
  }
  q_ = qr.householderQ() * Eigen::MatrixXd::Identity(n, cols);
}

}  // namespace jnt
