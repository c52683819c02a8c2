#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hdmr/data.hpp"
#include "hdmr/model.hpp"

namespace hdmr {

double rmse(const Vector& pred, const Vector& actual);
/// Throws NumericError when either input has zero variance.
double pearson_corr(const Vector& pred, const Vector& actual);

struct TermImportance {
  Subset term;
  double std = 0.0;
};

/// Population standard deviation of each term's contribution over `xtrain`,
/// sorted descending (ties keep term order).
std::vector<TermImportance> importance(const HdmrModel& model, const Matrix& xtrain);
/// Same, over the scaled training features stored in the model.
std::vector<TermImportance> importance(const HdmrModel& model);

/// One neuron activation function sampled on a uniform grid over [0, 1] of
/// its scaled input.
struct ComponentCurve {
  std::size_t feature = 0;
  std::string label;
  Subset term;
  std::vector<double> grid;
  std::vector<double> values;
  double std = 0.0;  // over the training set
};

std::vector<ComponentCurve> component_curves(const HdmrModel& model, int grid_size = 201);

/// Columns: term,grid,value. `comment` becomes a leading '#' line.
void write_component_csv(const std::filesystem::path& path,
                         const std::vector<ComponentCurve>& curves,
                         const std::string& comment = {});

struct SweepConfig {
  std::vector<int> orders;
  std::vector<int> neurons;
  int repeats = 1;
  std::size_t train_size = 0;
  std::optional<std::size_t> test_size;
  double length_scale = 0.0;
  double noise = kDefaultNoise;
  std::uint64_t seed = 0;  // repeat r uses split seed seed + r
  std::uint64_t sobol_skip = 0;
  int jobs = 1;
  /// When false wall_s is written as 0 so CSVs are byte-reproducible.
  bool record_timing = true;
};

struct SweepRecord {
  int order = 0;
  int neurons = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
  double train_rmse = 0.0;
  double test_rmse = 0.0;
  double train_corr = 0.0;
  double test_corr = 0.0;
  double wall_s = 0.0;
  std::string status;   // ok | jitter | failed
  std::string message;  // failure detail, not written to CSV
};

struct SweepCell {
  int order = 0;
  int neurons = 0;
  std::size_t coupling_terms = 0;
  int ok_repeats = 0;
  double best_test_rmse = 0.0;  // NaN when every repeat failed
  int best_repeat = -1;
};

struct SweepResult {
  std::vector<SweepRecord> records;  // ordered by (d, N, repeat)
  std::vector<SweepCell> cells;      // min over repeats per (d, N)
  std::vector<SweepCell> best_by_order;  // min over N per d
};

/// One fit per (d, N, repeat). A failing cell is recorded and the sweep
/// continues. Output order does not depend on `jobs`.
SweepResult sweep(const Dataset& data, const SweepConfig& config);

/// Columns: d,N,repeat,seed,train_rmse,test_rmse,train_corr,test_corr,wall_s,status
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRecord>& records,
                     const std::string& comment = {});
/// Columns: d,N,coupling_terms,ok_repeats,best_test_rmse,best_repeat
void write_summary_csv(const std::filesystem::path& path, const std::vector<SweepCell>& cells,
                       const std::string& comment = {});

struct LengthScaleSearch {
  double best = 0.0;
  std::vector<std::pair<double, double>> validation_rmse;  // (l, rmse), input order
};

/// Holds out `validation_fraction` of `train` (seeded), fits every candidate
/// on the rest and returns the candidate with the lowest validation rmse;
/// ties go to the larger l. Failed fits score +inf.
LengthScaleSearch grid_search_l(const Dataset& train, const HdmrFitOptions& options,
                                const std::vector<double>& candidates, std::uint64_t seed,
                                double validation_fraction = 0.2);

/// Splits off M training rows first (seed), then searches as above.
LengthScaleSearch grid_search_l(const Dataset& data, int order, int neurons_per_term,
                                const std::vector<double>& candidates, std::size_t train_size,
                                std::uint64_t seed, double noise = kDefaultNoise);

}  // namespace hdmr
