#include "jnt/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "jnt/error.hpp"
#include "jnt/tabular.hpp"

namespace jnt {

const char* to_string(RatioKind kind) noexcept {
  switch (kind) {
    case RatioKind::pooled_raw:
      return "pooled_raw";
    case RatioKind::pooled_corrected:
      return "pooled_corrected";
    case RatioKind::single_run:
      return "single_run";
  }
  return "unknown";
}

Dataset Dataset::create(std::vector<RunSpectrum> runs, std::vector<CalibrationRecord> calibrations) {
  if (runs.empty()) throw ArgumentError("dataset has no runs");

  std::set<int> ids;
  for (const auto& run : runs) {
    const std::string tag = "run " + std::to_string(run.run_id);
    if (run.run_id <= 0) throw DomainError(tag + ": run_id must be positive");
    if (!ids.insert(run.run_id).second) throw ArgumentError(tag + ": duplicate run_id");
    if (run.frequencies.empty()) throw GridError(tag + ": empty spectrum");
    if (run.s_r.size() != run.frequencies.size() || run.s_q.size() != run.frequencies.size()) {
      throw GridError(tag + ": s_r/s_q length differs from frequency grid");
    }
    for (std::size_t j = 1; j < run.frequencies.size(); ++j) {
      if (!(run.frequencies[j] > run.frequencies[j - 1])) {
        throw GridError(tag + ": frequencies not strictly increasing");
      }
    }
    for (std::size_t j = 0; j < run.frequencies.size(); ++j) {
      if (!std::isfinite(run.s_r[j]) || !std::isfinite(run.s_q[j])) {
        throw DomainError(tag + ": non-finite PSD value");
      }
      if (!(run.s_q[j] > 0.0)) {
        throw DomainError(tag + ": s_q must be positive (block " + std::to_string(j) + ")");
      }
    }
    if (!(run.acquisition_time > 0.0)) throw DomainError(tag + ": acquisition_time must be positive");
    // Pooling is blockwise, so grids must match exactly.
    if (run.frequencies != runs.front().frequencies) {
      throw GridError(tag + ": frequency grid differs from run " + std::to_string(runs.front().run_id));
    }
  }

  std::map<int, CalibrationRecord> by_id;
  for (const auto& c : calibrations) {
    if (!ids.count(c.run_id)) {
      throw ReferenceError("calibration for unknown run " + std::to_string(c.run_id));
    }
    if (!by_id.emplace(c.run_id, c).second) {
      throw ReferenceError("duplicate calibration for run " + std::to_string(c.run_id));
    }
    if (!(c.a0_calc > 0.0) || !std::isfinite(c.a0_calc)) {
      throw DomainError("run " + std::to_string(c.run_id) + ": a0_calc must be positive");
    }
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
      throw DomainError("run " + std::to_string(c.run_id) + ": calibration weight must be positive");
    }
  }

  Dataset ds;
  ds.calibrations_.reserve(runs.size());
  for (const auto& run : runs) {
    const auto it = by_id.find(run.run_id);
    if (it == by_id.end()) throw ReferenceError("missing calibration for run " + std::to_string(run.run_id));
    ds.calibrations_.push_back(it->second);
  }
  double total = 0.0;
  for (const auto& c : ds.calibrations_) total += c.weight;
  double bar = 0.0;
  for (auto& c : ds.calibrations_) {
    c.weight /= total;
    bar += c.weight * c.a0_calc;
  }
  ds.a0_calc_bar_ = bar;
  ds.runs_ = std::move(runs);
  return ds;
}

std::size_t Dataset::index_of(int run_id) const {
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    if (runs_[i].run_id == run_id) return i;
  }
  throw ReferenceError("unknown run " + std::to_string(run_id));
}

std::vector<int> Dataset::run_ids() const {
  std::vector<int> ids;
  ids.reserve(runs_.size());
  for (const auto& r : runs_) ids.push_back(r.run_id);
  return ids;
}

Dataset load_dataset(std::istream& spectra, std::istream& calibrations) {
  const Table st = read_table(spectra, "spectra");
  const Table ct = read_table(calibrations, "calibrations");

  const auto c_run = st.column("run_id");
  const auto c_f = st.column("frequency_hz");
  const auto c_sr = st.column("s_r");
  const auto c_sq = st.column("s_q");

  struct Row {
    double f, sr, sq;
  };
  std::map<int, std::vector<Row>> rows_by_run;
  for (std::size_t k = 0; k < st.rows.size(); ++k) {
    const auto& row = st.rows[k];
    const std::string where = "spectra:" + std::to_string(st.line_numbers[k]);
    const long long id = parse_integer(row[c_run], where);
    if (id <= 0 || id > std::numeric_limits<int>::max()) throw DomainError(where + ": run_id must be positive");
    rows_by_run[static_cast<int>(id)].push_back(
        {parse_double(row[c_f], where), parse_double(row[c_sr], where), parse_double(row[c_sq], where)});
  }

  const auto k_run = ct.column("run_id");
  const auto k_a0 = ct.column("a0_calc");
  const auto k_hours = ct.column("acquisition_hours");
  const auto k_day = ct.column("day_offset");
  const long k_weight = ct.find_column("weight");

  struct Calib {
    double a0, hours, day, weight;
  };
  std::map<int, Calib> calib_by_run;
  for (std::size_t k = 0; k < ct.rows.size(); ++k) {
    const auto& row = ct.rows[k];
    const std::string where = "calibrations:" + std::to_string(ct.line_numbers[k]);
    const long long id = parse_integer(row[k_run], where);
    if (id <= 0 || id > std::numeric_limits<int>::max()) throw DomainError(where + ": run_id must be positive");
    Calib c{parse_double(row[k_a0], where), parse_double(row[k_hours], where), parse_double(row[k_day], where), 0.0};
    c.weight = k_weight >= 0 ? parse_double(row[static_cast<std::size_t>(k_weight)], where) : c.hours;
    if (!calib_by_run.emplace(static_cast<int>(id), c).second) {
      throw ReferenceError(where + ": duplicate calibration for run " + std::to_string(id));
    }
  }

  std::vector<RunSpectrum> runs;
  std::vector<CalibrationRecord> calibs;
  for (auto& [id, rows] : rows_by_run) {
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.f < b.f; });
    RunSpectrum run;
    run.run_id = id;
    for (const auto& r : rows) {
      run.frequencies.push_back(r.f);
      run.s_r.push_back(r.sr);
      run.s_q.push_back(r.sq);
    }
    const auto it = calib_by_run.find(id);
    if (it == calib_by_run.end()) throw ReferenceError("missing calibration for run " + std::to_string(id));
    run.acquisition_time = it->second.hours;
    run.timestamp = it->second.day;
    calibs.push_back({id, it->second.a0, it->second.weight});
    runs.push_back(std::move(run));
  }
  for (const auto& [id, c] : calib_by_run) {
    if (!rows_by_run.count(id)) throw ReferenceError("calibration for run " + std::to_string(id) + " has no spectrum");
  }
  return Dataset::create(std::move(runs), std::move(calibs));
}

Dataset load_dataset_files(const std::string& spectra_path, const std::string& calibration_path) {
  std::ifstream s(spectra_path);
  if (!s) throw IoError("cannot open '" + spectra_path + "'");
  std::ifstream c(calibration_path);
  if (!c) throw IoError("cannot open '" + calibration_path + "'");
  return load_dataset(s, c);
}

void write_spectra(std::ostream& out, const Dataset& dataset) {
  out << "run_id,frequency_hz,s_r,s_q\n";
  for (const auto& run : dataset.runs()) {
    for (std::size_t j = 0; j < run.frequencies.size(); ++j) {
      out << run.run_id << ',' << format_double(run.frequencies[j]) << ',' << format_double(run.s_r[j]) << ','
          << format_double(run.s_q[j]) << '\n';
    }
  }
}

void write_calibrations(std::ostream& out, const Dataset& dataset) {
  out << "run_id,a0_calc,acquisition_hours,day_offset\n";
  for (std::size_t i = 0; i < dataset.run_count(); ++i) {
    const auto& run = dataset.runs()[i];
    out << run.run_id << ',' << format_double(dataset.calibrations()[i].a0_calc) << ','
        << format_double(run.acquisition_time) << ',' << format_double(run.timestamp) << '\n';
  }
}

std::size_t blocks_up_to(std::span<const double> frequencies, double fmax) {
  return static_cast<std::size_t>(std::upper_bound(frequencies.begin(), frequencies.end(), fmax) -
                                  frequencies.begin());
}

RatioSpectrum pool_ratio(const Dataset& dataset, std::span<const int> run_ids, double fmax) {
  if (run_ids.empty()) throw ArgumentError("pool_ratio: empty run subset");
  const auto& grid = dataset.frequencies();
  if (fmax < grid.front()) throw ArgumentError("pool_ratio: fmax below first grid frequency");
  const std::size_t n = blocks_up_to(grid, fmax);

  std::vector<double> num(n, 0.0);
  std::vector<double> den(n, 0.0);
  for (int id : run_ids) {
    const auto& run = dataset.runs()[dataset.index_of(id)];
    for (std::size_t j = 0; j < n; ++j) {
      num[j] += run.s_r[j];
      den[j] += run.s_q[j];
    }
  }
  RatioSpectrum out;
  out.frequencies.assign(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(n));
  out.ratios.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.ratios[j] = num[j] / den[j];
  out.kind = dataset.corrected() ? RatioKind::pooled_corrected : RatioKind::pooled_raw;
  return out;
}

RatioSpectrum pool_ratio(const Dataset& dataset, double fmax) {
  const auto ids = dataset.run_ids();
  return pool_ratio(dataset, ids, fmax);
}

RatioSpectrum single_run_ratio(const Dataset& dataset, int run_id, double fmax) {
  const int ids[] = {run_id};
  RatioSpectrum out = pool_ratio(dataset, ids, fmax);
  out.kind = RatioKind::single_run;
  return out;
}

Dataset correct_spectra(const Dataset& dataset) {
  Dataset out = dataset;
  const double bar = dataset.a0_calc_bar();
  for (std::size_t i = 0; i < out.runs_.size(); ++i) {
    const double shift = dataset.calibrations_[i].a0_calc - bar;
    auto& run = out.runs_[i];
    if (shift != 0.0) {
      for (std::size_t j = 0; j < run.s_r.size(); ++j) run.s_r[j] -= shift * run.s_q[j];
    }
    out.calibrations_[i].a0_calc = bar;
  }
  out.corrected_ = true;
  return out;
}

double spread_a0_calc(const Dataset& dataset) {
  const auto [lo, hi] = std::minmax_element(
      dataset.calibrations().begin(), dataset.calibrations().end(),
      [](const CalibrationRecord& a, const CalibrationRecord& b) { return a.a0_calc < b.a0_calc; });
  return hi->a0_calc - lo->a0_calc;
}

void write_ratio_spectrum(std::ostream& out, const RatioSpectrum& spectrum) {
  out << "frequency_hz,ratio\n";
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    out << format_double(spectrum.frequencies[j]) << ',' << format_double(spectrum.ratios[j]) << '\n';
  }
}

}  // namespace jnt
