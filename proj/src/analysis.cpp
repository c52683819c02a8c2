#include "hdmr/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "hdmr/errors.hpp"
#include "hdmr/textio.hpp"

namespace hdmr {
namespace {

void check_pair(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) throw ShapeError(std::string(what) + ": length mismatch");
  if (a.size() == 0) throw InvalidArgument(std::string(what) + ": empty input");
}

double population_std(const Eigen::Ref<const Vector>& v) {
  if (v.size() == 0) return 0.0;
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().mean());
}

std::vector<TermImportance> rank_terms(const std::vector<Subset>& terms, const Matrix& values) {
  std::vector<TermImportance> out;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    out.push_back({terms[k], population_std(values.col(static_cast<Eigen::Index>(k)))});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const TermImportance& a, const TermImportance& b) { return a.std > b.std; });
  return out;
}

std::ofstream open_csv(const std::filesystem::path& path, const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  if (!comment.empty()) out << "# " << comment << '\n';
  return out;
}

std::string num(double v) { return std::isfinite(v) ? format_double(v) : std::string("nan"); }

}  // namespace

double rmse(const Vector& pred, const Vector& actual) {
  check_pair(pred, actual, "rmse");
  return std::sqrt((pred - actual).array().square().mean());
}

double pearson_corr(const Vector& pred, const Vector& actual) {
  check_pair(pred, actual, "pearson_corr");
  const Eigen::ArrayXd a = pred.array() - pred.mean();
  const Eigen::ArrayXd b = actual.array() - actual.mean();
  const double saa = a.square().sum();
  const double sbb = b.square().sum();
  if (!(saa > 0.0) || !(sbb > 0.0)) {
    throw NumericError("pearson_corr: undefined for zero-variance input");
  }
  const double r = (a * b).sum() / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

std::vector<TermImportance> importance(const HdmrModel& model, const Matrix& xtrain) {
  const TermValues tv = model.term_values(xtrain);
  return rank_terms(tv.terms, tv.values);
}

std::vector<TermImportance> importance(const HdmrModel& model) {
  const Matrix per_feature = model.gpr().components(model.gpr().ytrain());
  Matrix values = Matrix::Zero(per_feature.rows(), static_cast<Eigen::Index>(model.terms().size()));
  const auto& ft = model.feature_terms();
  for (Eigen::Index n = 0; n < per_feature.rows(); ++n) {
    for (std::size_t j = 0; j < ft.size(); ++j) {
      values(n, static_cast<Eigen::Index>(ft[j])) += per_feature(n, static_cast<Eigen::Index>(j));
    }
  }
  return rank_terms(model.terms(), values);
}

std::vector<ComponentCurve> component_curves(const HdmrModel& model, int grid_size) {
  if (grid_size < 2) throw InvalidArgument("component_curves: grid size must be >= 2");
  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  for (int g = 0; g < grid_size; ++g) grid[g] = static_cast<double>(g) / (grid_size - 1);

  const auto& gpr = model.gpr();
  std::vector<ComponentCurve> curves;
  for (std::size_t j = 0; j < model.feature_count(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    ComponentCurve c;
    c.feature = j;
    c.label = feature_label(model.feature_map(), j);
    c.term = model.feature_map().row(j).subset;
    c.grid = grid;
    const Vector v = gpr.component(col, grid);
    c.values.assign(v.data(), v.data() + v.size());
    const Vector train_col = gpr.ytrain().col(col);
    c.std = population_std(gpr.component(col, std::span<const double>(train_col.data(),
                                                                     train_col.size())));
    curves.push_back(std::move(c));
  }
  return curves;
}

void write_component_csv(const std::filesystem::path& path,
                         const std::vector<ComponentCurve>& curves, const std::string& comment) {
  auto out = open_csv(path, comment);
  out << "term,grid,value\n";
  for (const auto& c : curves) {
    for (std::size_t g = 0; g < c.grid.size(); ++g) {
      out << c.label << ',' << num(c.grid[g]) << ',' << num(c.values[g]) << '\n';
    }
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

SweepResult sweep(const Dataset& data, const SweepConfig& config) {
  if (config.orders.empty() || config.neurons.empty()) {
    throw InvalidArgument("sweep: order and neuron lists must be non-empty");
  }
  if (config.repeats < 1) throw InvalidArgument("sweep: repeats must be >= 1");
  if (config.jobs < 1) throw InvalidArgument("sweep: jobs must be >= 1");
  for (int d : config.orders) {
    if (d < 1 || d > data.dimension()) {
      throw InvalidOrder("sweep: order d=" + std::to_string(d) + " must lie in [1, D=" +
                         std::to_string(data.dimension()) + "]");
    }
  }
  for (int n : config.neurons) {
    if (n < 0) throw InvalidArgument("sweep: neuron counts must be >= 0");
  }

  SweepResult result;
  for (int d : config.orders)
    for (int n : config.neurons)
      for (int r = 0; r < config.repeats; ++r) {
        SweepRecord rec;
        rec.order = d;
        rec.neurons = n;
        rec.repeat = r;
        rec.seed = config.seed + static_cast<std::uint64_t>(r);
        result.records.push_back(rec);
      }

  // Splits are shared by every cell with the same repeat index.
  std::vector<Split> splits;
  for (int r = 0; r < config.repeats; ++r) {
    splits.push_back(split(data, config.train_size, config.seed + static_cast<std::uint64_t>(r),
                           config.test_size));
  }

  auto run_cell = [&](SweepRecord& rec) {
    const auto start = std::chrono::steady_clock::now();
    const Split& s = splits[static_cast<std::size_t>(rec.repeat)];
    try {
      HdmrFitOptions opt;
      opt.order = rec.order;
      opt.neurons_per_term = rec.neurons;
      opt.length_scale = config.length_scale;
      opt.noise = config.noise;
      opt.sobol_skip = config.sobol_skip;
      opt.split_seed = rec.seed;
      const HdmrModel model = hdmr_fit(s.train, opt);
      const Vector ptrain = model.predict(s.train.x);
      const Vector ptest = model.predict(s.test.x);
      rec.train_rmse = rmse(ptrain, s.train.t);
      rec.test_rmse = rmse(ptest, s.test.t);
      auto corr = [](const Vector& p, const Vector& a) {
        try {
          return pearson_corr(p, a);
        } catch (const NumericError&) {
          return std::numeric_limits<double>::quiet_NaN();
        }
      };
      rec.train_corr = corr(ptrain, s.train.t);
      rec.test_corr = corr(ptest, s.test.t);
      rec.status = model.gpr().jitter_escalated() ? "jitter" : "ok";
    } catch (const std::exception& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      rec.train_rmse = rec.test_rmse = rec.train_corr = rec.test_corr = nan;
      rec.status = "failed";
      rec.message = e.what();
    }
    if (config.record_timing) {
      rec.wall_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < result.records.size(); i = next++) run_cell(result.records[i]);
  };
  const auto nthreads = std::min<std::size_t>(static_cast<std::size_t>(config.jobs),
                                              result.records.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  auto summarize = [&](int d, int n, auto&& include) {
    SweepCell cell;
    cell.order = d;
    cell.neurons = n;
    cell.coupling_terms = binomial(data.dimension(), d);
    cell.best_test_rmse = std::numeric_limits<double>::quiet_NaN();
    for (const auto& rec : result.records) {
      if (rec.order != d || !include(rec) || rec.status == "failed") continue;
      ++cell.ok_repeats;
      if (cell.best_repeat < 0 || rec.test_rmse < cell.best_test_rmse) {
        cell.best_test_rmse = rec.test_rmse;
        cell.best_repeat = rec.repeat;
        cell.neurons = rec.neurons;
      }
    }
    return cell;
  };
  for (int d : config.orders) {
    for (int n : config.neurons) {
      result.cells.push_back(summarize(d, n, [n](const SweepRecord& r) { return r.neurons == n; }));
    }
    result.best_by_order.push_back(summarize(d, config.neurons.front(),
                                             [](const SweepRecord&) { return true; }));
  }
  return result;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRecord>& records,
                     const std::string& comment) {
  auto out = open_csv(path, comment);
  out << "d,N,repeat,seed,train_rmse,test_rmse,train_corr,test_corr,wall_s,status\n";
  for (const auto& r : records) {
    out << r.order << ',' << r.neurons << ',' << r.repeat << ',' << r.seed << ','
        << num(r.train_rmse) << ',' << num(r.test_rmse) << ',' << num(r.train_corr) << ','
        << num(r.test_corr) << ',' << num(r.wall_s) << ',' << r.status << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<SweepCell>& cells,
                       const std::string& comment) {
  auto out = open_csv(path, comment);
  out << "d,N,coupling_terms,ok_repeats,best_test_rmse,best_repeat\n";
  for (const auto& c : cells) {
    out << c.order << ',' << c.neurons << ',' << c.coupling_terms << ',' << c.ok_repeats << ','
        << num(c.best_test_rmse) << ',' << c.best_repeat << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

LengthScaleSearch grid_search_l(const Dataset& train, const HdmrFitOptions& options,
                                const std::vector<double>& candidates, std::uint64_t seed,
                                double validation_fraction) {
  if (candidates.empty()) throw InvalidArgument("grid_search_l: no length-scale candidates");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw InvalidArgument("grid_search_l: validation fraction must lie in (0, 1)");
  }
  const auto n = static_cast<std::size_t>(train.size());
  const auto nval = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(n))), 1,
      n >= 3 ? n - 2 : 1);
  if (n < 3) throw InvalidArgument("grid_search_l: need at least 3 training rows");
  const Split inner = split(train, n - nval, seed);

  LengthScaleSearch out;
  double best_rmse = std::numeric_limits<double>::infinity();
  for (double l : candidates) {
    double score = std::numeric_limits<double>::infinity();
    try {
      HdmrFitOptions opt = options;
      opt.length_scale = l;
      const HdmrModel model = hdmr_fit(inner.train, opt);
      score = rmse(model.predict(inner.test.x), inner.test.t);
      if (!std::isfinite(score)) score = std::numeric_limits<double>::infinity();
    } catch (const InvalidArgument&) {
      throw;
    } catch (const NumericError&) {
    }
    out.validation_rmse.emplace_back(l, score);
    if (out.validation_rmse.size() == 1 || score < best_rmse ||
        (score == best_rmse && l > out.best)) {
      best_rmse = score;
      out.best = l;
    }
  }
  return out;
}

LengthScaleSearch grid_search_l(const Dataset& data, int order, int neurons_per_term,
                                const std::vector<double>& candidates, std::size_t train_size,
                                std::uint64_t seed, double noise) {
  const Split outer = split(data, train_size, seed);
  HdmrFitOptions opt;
  opt.order = order;
  opt.neurons_per_term = neurons_per_term;
  opt.noise = noise;
  return grid_search_l(outer.train, opt, candidates, seed + 1);
}

}  // namespace hdmr
