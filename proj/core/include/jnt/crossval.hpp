#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "jnt/data_model.hpp"
#include "jnt/polyfit.hpp"
#include "jnt/random.hpp"

namespace jnt {

inline constexpr int kFolds = 5;

struct CvConfig {
  std::size_t n_splits = 20000;
  int folds = kFolds;
  std::vector<int> candidate_orders{2, 4, 6, 8, 10, 12, 14};
  std::uint64_t seed = 1;
  double f0 = kDefaultReferenceFrequency;
  // Pool validation runs from corrected spectra (true) or from the raw
  // observed resistor spectra (false). Training always uses corrected spectra.
  bool validation_corrected = true;
  unsigned threads = 1;

  // Throws ConfigError on n_splits == 0, folds != 5, or orders that are not
  // even, distinct and ascending.
  void validate() const;
};

struct SelectionFractions {
  double fmax = 0.0;
  std::map<int, double> p;             // order -> fraction; sums to 1
  std::map<int, std::size_t> tally;    // order -> number of splits that chose it
  std::size_t n_splits = 0;
  std::vector<int> dropped_orders;     // candidates not fittable at this fmax
  std::vector<std::string> warnings;

  // Order with the largest fraction; smaller order wins ties.
  int most_selected() const;
};

// Subsets of run indices (positions in Dataset::runs()).
using Split = std::vector<std::vector<std::size_t>>;

// Slices a permutation into kFolds consecutive chunks; the first
// (n mod 5) chunks get ceil(n/5) runs and the rest floor(n/5).
Split chunk_permutation(std::span<const std::size_t> permutation);

// Random five-way split of n_runs runs. Throws ArgumentError if n_runs < 5.
Split five_way_split(std::size_t n_runs, Rng& rng);

// Split used for split `index` at bandwidth fmax under `seed`.
Split split_for(std::size_t n_runs, std::uint64_t seed, double fmax, std::size_t index);

// Mean over the five folds of the mean squared deviation between the order-d
// fit to pooled training runs and the pooled validation runs (blocks <= fmax).
// Reference implementation built from pool_ratio/fit/predict.
double cv_statistic(const Dataset& training, const Dataset& validation, const Split& split,
                    const PolyModel& model, double fmax);
double cv_statistic(const Dataset& corrected, const Split& split, const PolyModel& model, double fmax);

// Evaluates CV(d) for all candidate orders of one split at one bandwidth.
// The LS prediction of each nested model is the projection onto the leading
// columns of one shared orthonormal basis, so all orders cost about as much
// as a single fit.
class CvEngine {
 public:
  CvEngine(const Dataset& training, const Dataset& validation, double fmax, std::span<const int> orders,
           double f0 = kDefaultReferenceFrequency);

  // Orders that are fittable on this bandwidth, ascending.
  const std::vector<int>& orders() const noexcept { return orders_; }
  const std::vector<int>& dropped_orders() const noexcept { return dropped_; }
  std::size_t blocks() const noexcept { return n_; }

  // CV value for each of orders(), written to cv (size orders().size()).
  void evaluate(const Split& split, std::span<double> cv) const;

  // Index into orders() of the minimizing order; near-ties (see
  // kCvTieRelative/kCvTieAbsolute) go to the smaller order.
  std::size_t select(std::span<const double> cv) const;

 private:
  std::size_t n_ = 0;
  std::size_t runs_ = 0;
  std::vector<double> train_r_;  // runs x n, row-major
  std::vector<double> valid_r_;  // empty when validation == training
  std::vector<double> s_q_;
  NestedEvenBasis basis_;
  std::vector<int> orders_;
  std::vector<int> dropped_;
  double tie_floor_ = 0.0;
};

// Relative and (ratio-squared scaled) absolute tolerance under which two CV
// values count as tied. Only reachable with noiseless data.
inline constexpr double kCvTieRelative = 1e-10;
inline constexpr double kCvTieAbsolute = 1e-24;

// Model-selection fractions at one bandwidth over cfg.n_splits random
// five-way splits. The raw dataset is corrected internally before the splits.
// Throws UnderdeterminedError if no candidate order is fittable.
SelectionFractions selection_fractions(const Dataset& dataset, const CvConfig& cfg, double fmax);

}  // namespace jnt
