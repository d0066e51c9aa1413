#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "jnt/data_model.hpp"

namespace jnt {

inline constexpr double kDefaultReferenceFrequency = 1.0e6;

// Even polynomial r(f) = sum_{i=0}^{d/2} a_{2i} (f/f0)^{2i}.
struct PolyModel {
  int order = 2;
  double f0 = kDefaultReferenceFrequency;

  int terms() const noexcept { return order / 2 + 1; }
  // Throws ArgumentError unless order is even and >= 2 and f0 > 0.
  void validate() const;
};

struct PolyFit {
  PolyModel model;
  std::vector<double> coeffs;  // a_0, a_2, ..., a_d
  Eigen::MatrixXd coeff_cov;   // terms x terms
  double sigma_a0_ran = 0.0;   // sqrt(coeff_cov(0,0))
  double residual_variance = 0.0;
  std::size_t n_points = 0;
  double fmax = 0.0;
  bool weighted = false;

  double a0() const { return coeffs.front(); }
};

// Least-squares fit of `model` to the blocks of `spectrum` with f <= fmax.
// Optional weights (one per spectrum block, all positive) give weighted LS.
// Solved by Householder QR on the column-equilibrated design; the residual
// variance uses n - terms degrees of freedom and is 0 for a saturated fit.
// Throws UnderdeterminedError (too few blocks) or SingularFitError.
PolyFit fit(const PolyModel& model, const RatioSpectrum& spectrum, double fmax,
            std::span<const double> weights = {});

double evaluate(std::span<const double> coeffs, double f0, double frequency) noexcept;
std::vector<double> predict(const PolyFit& fit, std::span<const double> frequencies);

// Observed minus predicted for the blocks with f <= fmax.
std::vector<double> residuals(const PolyFit& fit, const RatioSpectrum& spectrum, double fmax);

// Orthonormal basis of the nested even-power columns 1, x, x^2, ... with
// x = (f/f0)^2 over a fixed set of blocks. Because Householder QR without
// pivoting preserves column order, the first k basis vectors span exactly the
// design of the model with k terms, so LS predictions for every nested model
// come from one factorization.
class NestedEvenBasis {
 public:
  NestedEvenBasis(std::span<const double> frequencies, double f0, int max_terms);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(q_.rows()); }
  int max_terms() const noexcept { return static_cast<int>(q_.cols()); }
  // Leading columns that are numerically independent.
  int usable_terms() const noexcept { return usable_terms_; }
  const Eigen::MatrixXd& q() const noexcept { return q_; }

 private:
  Eigen::MatrixXd q_;
  int usable_terms_ = 0;
};

// Relative threshold on |R_jj| (unit-norm columns) below which a design is
// treated as rank deficient.
inline constexpr double kRankTolerance = 1e-11;

}  // namespace jnt
