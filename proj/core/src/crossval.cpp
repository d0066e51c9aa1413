#include "jnt/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jnt/error.hpp"
#include "jnt/parallel.hpp"
#include "jnt/tabular.hpp"

namespace jnt {

void CvConfig::validate() const {
  if (n_splits < 1) throw ConfigError("n_splits must be >= 1");
  if (folds != kFolds) throw ConfigError("fold count is fixed at 5");
  if (candidate_orders.empty()) throw ConfigError("no candidate orders");
  for (std::size_t i = 0; i < candidate_orders.size(); ++i) {
    const int d = candidate_orders[i];
    if (d < 2 || d % 2 != 0) throw ConfigError("candidate orders must be even and >= 2");
    if (i > 0 && d <= candidate_orders[i - 1]) throw ConfigError("candidate orders must be distinct and ascending");
  }
  if (!(f0 > 0.0)) throw ConfigError("reference frequency must be positive");
}

int SelectionFractions::most_selected() const {
  int best = 0;
  double best_p = -1.0;
  for (const auto& [d, frac] : p) {
    if (frac > best_p) {
      best = d;
      best_p = frac;
    }
  }
  return best;
}

Split chunk_permutation(std::span<const std::size_t> permutation) {
  const std::size_t n = permutation.size();
  const std::size_t base = n / kFolds;
  const std::size_t extra = n % kFolds;
  Split split(kFolds);
  std::size_t pos = 0;
  for (std::size_t k = 0; k < static_cast<std::size_t>(kFolds); ++k) {
    const std::size_t size = base + (k < extra ? 1 : 0);
    split[k].assign(permutation.begin() + static_cast<std::ptrdiff_t>(pos),
                    permutation.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return split;
}

Split five_way_split(std::size_t n_runs, Rng& rng) {
  if (n_runs < static_cast<std::size_t>(kFolds)) {
    throw ArgumentError("five_way_split: need at least 5 runs, have " + std::to_string(n_runs));
  }
  std::vector<std::size_t> perm(n_runs);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  return chunk_permutation(perm);
}

Split split_for(std::size_t n_runs, std::uint64_t seed, double fmax, std::size_t index) {
  Rng rng = make_rng(seed, stream::cv_split ^ (static_cast<std::uint64_t>(std::llround(fmax)) << 20), index);
  return five_way_split(n_runs, rng);
}

namespace {

std::vector<int> ids_of(const Dataset& ds, const std::vector<std::size_t>& indices) {
  std::vector<int> ids;
  ids.reserve(indices.size());
  for (auto i : indices) ids.push_back(ds.runs().at(i).run_id);
  return ids;
}

}  // namespace

double cv_statistic(const Dataset& training, const Dataset& validation, const Split& split, const PolyModel& model,
                    double fmax) {
  if (split.size() != static_cast<std::size_t>(kFolds)) throw ArgumentError("cv_statistic: split must have 5 subsets");
  double total = 0.0;
  for (std::size_t k = 0; k < split.size(); ++k) {
    std::vector<std::size_t> train_idx;
    for (std::size_t m = 0; m < split.size(); ++m) {
      if (m != k) train_idx.insert(train_idx.end(), split[m].begin(), split[m].end());
    }
    const auto train_ids = ids_of(training, train_idx);
    const auto valid_ids = ids_of(validation, split[k]);
    const RatioSpectrum train = pool_ratio(training, train_ids, fmax);
    const RatioSpectrum valid = pool_ratio(validation, valid_ids, fmax);
    const PolyFit f = fit(model, train, fmax);
    const auto pred = predict(f, valid.frequencies);
    double ss = 0.0;
    for (std::size_t j = 0; j < valid.size(); ++j) {
      const double e = valid.ratios[j] - pred[j];
      ss += e * e;
    }
    total += ss / static_cast<double>(valid.size());
  }
  return total / static_cast<double>(split.size());
}

double cv_statistic(const Dataset& corrected, const Split& split, const PolyModel& model, double fmax) {
  return cv_statistic(corrected, corrected, split, model, fmax);
}

CvEngine::CvEngine(const Dataset& training, const Dataset& validation, double fmax, std::span<const int> orders,
                   double f0)
    : n_(blocks_up_to(training.frequencies(), fmax)),
      runs_(training.run_count()),
      basis_(std::span<const double>(training.frequencies().data(), n_),
             f0, orders.empty() ? 1 : orders.back() / 2 + 1) {
  if (validation.run_count() != runs_ || validation.frequencies() != training.frequencies()) {
    throw ArgumentError("CvEngine: training and validation datasets must share runs and grid");
  }
  const bool separate = &training != &validation;
  train_r_.resize(runs_ * n_);
  s_q_.resize(runs_ * n_);
  if (separate) valid_r_.resize(runs_ * n_);
  for (std::size_t i = 0; i < runs_; ++i) {
    const auto& tr = training.runs()[i];
    std::copy_n(tr.s_r.begin(), n_, train_r_.begin() + static_cast<std::ptrdiff_t>(i * n_));
    std::copy_n(tr.s_q.begin(), n_, s_q_.begin() + static_cast<std::ptrdiff_t>(i * n_));
    if (separate) {
      std::copy_n(validation.runs()[i].s_r.begin(), n_, valid_r_.begin() + static_cast<std::ptrdiff_t>(i * n_));
    }
  }
  for (int d : orders) {
    if (d / 2 + 1 <= basis_.usable_terms() && static_cast<std::size_t>(d / 2 + 1) <= n_) {
      orders_.push_back(d);
    } else {
      dropped_.push_back(d);
    }
  }
  double scale = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < runs_; ++i) {
      num += train_r_[i * n_ + j];
      den += s_q_[i * n_ + j];
    }
    scale += (num / den) * (num / den);
  }
  tie_floor_ = n_ > 0 ? kCvTieAbsolute * scale / static_cast<double>(n_) : 0.0;
}

void CvEngine::evaluate(const Split& split, std::span<double> cv) const {
  if (cv.size() != orders_.size()) throw ArgumentError("CvEngine::evaluate: output size mismatch");
  std::fill(cv.begin(), cv.end(), 0.0);
  if (orders_.empty()) return;
  const std::size_t folds = split.size();
  const bool separate = !valid_r_.empty();

  // Per-subset blockwise sums.
  std::vector<double> sub_r(folds * n_, 0.0);
  std::vector<double> sub_q(folds * n_, 0.0);
  std::vector<double> sub_v(separate ? folds * n_ : 0, 0.0);
  std::vector<double> tot_r(n_, 0.0);
  std::vector<double> tot_q(n_, 0.0);
  for (std::size_t k = 0; k < folds; ++k) {
    double* sr = sub_r.data() + k * n_;
    double* sq = sub_q.data() + k * n_;
    for (std::size_t i : split[k]) {
      const double* tr = train_r_.data() + i * n_;
      const double* q = s_q_.data() + i * n_;
      for (std::size_t j = 0; j < n_; ++j) {
        sr[j] += tr[j];
        sq[j] += q[j];
      }
      if (separate) {
        double* sv = sub_v.data() + k * n_;
        const double* vr = valid_r_.data() + i * n_;
        for (std::size_t j = 0; j < n_; ++j) sv[j] += vr[j];
      }
    }
    for (std::size_t j = 0; j < n_; ++j) {
      tot_r[j] += sr[j];
      tot_q[j] += sq[j];
    }
  }

  const int max_terms = orders_.back() / 2 + 1;
  const auto& q = basis_.q();
  std::vector<double> y(n_);
  std::vector<double> v(n_);
  std::vector<double> pred(n_);
  std::vector<double> coef(static_cast<std::size_t>(max_terms));
  for (std::size_t k = 0; k < folds; ++k) {
    const double* sr = sub_r.data() + k * n_;
    const double* sq = sub_q.data() + k * n_;
    const double* sv = separate ? sub_v.data() + k * n_ : sr;
    for (std::size_t j = 0; j < n_; ++j) {
      y[j] = (tot_r[j] - sr[j]) / (tot_q[j] - sq[j]);
      v[j] = sv[j] / sq[j];
    }
    for (int t = 0; t < max_terms; ++t) {
      const double* col = q.col(t).data();
      double c = 0.0;
      for (std::size_t j = 0; j < n_; ++j) c += col[j] * y[j];
      coef[static_cast<std::size_t>(t)] = c;
    }
    std::fill(pred.begin(), pred.end(), 0.0);
    std::size_t next_order = 0;
    for (int t = 0; t < max_terms && next_order < orders_.size(); ++t) {
      const double* col = q.col(t).data();
      const double c = coef[static_cast<std::size_t>(t)];
      for (std::size_t j = 0; j < n_; ++j) pred[j] += c * col[j];
      if (orders_[next_order] / 2 + 1 == t + 1) {
        double ss = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
          const double e = v[j] - pred[j];
          ss += e * e;
        }
        cv[next_order] += ss / static_cast<double>(n_);
        ++next_order;
      }
    }
  }
  for (auto& c : cv) c /= static_cast<double>(folds);
}

std::size_t CvEngine::select(std::span<const double> cv) const {
  const double best = *std::min_element(cv.begin(), cv.end());
  const double tol = kCvTieRelative * best + tie_floor_;
  for (std::size_t i = 0; i < cv.size(); ++i) {
    if (cv[i] <= best + tol) return i;
  }
  return 0;
}

SelectionFractions selection_fractions(const Dataset& dataset, const CvConfig& cfg, double fmax) {
  cfg.validate();
  if (dataset.run_count() < static_cast<std::size_t>(kFolds)) {
    throw ArgumentError("selection_fractions: need at least 5 runs");
  }
  const Dataset corrected = dataset.corrected() ? dataset : correct_spectra(dataset);
  const Dataset& validation = cfg.validation_corrected ? corrected : dataset;
  const CvEngine engine(corrected, validation, fmax, cfg.candidate_orders, cfg.f0);

  SelectionFractions out;
  out.fmax = fmax;
  out.n_splits = cfg.n_splits;
  out.dropped_orders = engine.dropped_orders();
  for (int d : engine.dropped_orders()) {
    out.warnings.push_back("fmax " + format_double(fmax) + " Hz: order " + std::to_string(d) +
                           " not fittable on " + std::to_string(engine.blocks()) + " blocks; dropped");
  }
  if (engine.orders().empty()) {
    throw UnderdeterminedError("no candidate order fittable at fmax " + format_double(fmax) + " Hz");
  }

  std::vector<std::size_t> choice(cfg.n_splits);
  parallel_for(cfg.n_splits, cfg.threads, [&](std::size_t s) {
    const Split split = split_for(dataset.run_count(), cfg.seed, fmax, s);
    std::vector<double> cv(engine.orders().size());
    engine.evaluate(split, cv);
    for (double c : cv) {
      if (!std::isfinite(c)) {
        throw InconsistencyError("non-finite CV statistic at fmax " + format_double(fmax) + " Hz, split " +
                                 std::to_string(s));
      }
    }
    choice[s] = engine.select(cv);
  });

  for (int d : engine.orders()) out.tally[d] = 0;
  for (std::size_t c : choice) ++out.tally[engine.orders()[c]];
  for (int d : cfg.candidate_orders) {
    const auto it = out.tally.find(d);
    const std::size_t count = it == out.tally.end() ? 0 : it->second;
    out.p[d] = static_cast<double>(count) / static_cast<double>(cfg.n_splits);
  }
  return out;
}

}  // namespace jnt
