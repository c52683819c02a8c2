#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hdmr/analysis.hpp"
#include "hdmr/errors.hpp"

using namespace hdmr;
namespace fs = std::filesystem;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

HdmrFitOptions options(int d, int n, double l) {
  HdmrFitOptions o;
  o.order = d;
  o.neurons_per_term = n;
  o.length_scale = l;
  return o;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "hdmr_test_analysis";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("rmse and correlation") {
  CHECK(rmse(vec({0, 1}), vec({1, 0})) == 1.0);
  CHECK(pearson_corr(vec({0, 1}), vec({1, 0})) == -1.0);
  CHECK(rmse(vec({1, 2, 3}), vec({1, 2, 3})) == 0.0);
  CHECK(pearson_corr(vec({1, 2, 3}), vec({2, 4, 6})) == doctest::Approx(1.0));
  CHECK(rmse(vec({0, 0, 0, 0}), vec({1, -1, 1, -1})) == 1.0);
  CHECK_THROWS_AS(pearson_corr(vec({1, 1, 1}), vec({1, 2, 3})), NumericError);
  CHECK_THROWS_AS(rmse(vec({1, 2}), vec({1, 2, 3})), ShapeError);
}

TEST_CASE("importance ranks the terms that carry the signal") {
  Dataset d = synth(SynthKind::kAdditive, 3, 300, 3);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    d.t[i] = 5.0 * std::sin(3.0 * d.x(i, 0)) + 0.5 * d.x(i, 2) * d.x(i, 2);
  }
  const auto first = importance(hdmr_fit(d, options(1, 0, 0.3)), d.x);
  REQUIRE(first.size() == 3);
  CHECK(first[0].term == Subset{0});
  CHECK(first[1].term == Subset{2});
  CHECK(first[0].std >= 5.0 * first[1].std);
  CHECK(first[2].std <= 1e-3 * first[1].std);

  // with coupling the split between overlapping terms is not unique, but the
  // dominant direction still leads and the order is descending
  const HdmrModel m = hdmr_fit(d, options(2, 3, 0.3));
  const auto imp = importance(m, d.x);
  REQUIRE(imp.size() == m.terms().size());
  CHECK(imp[0].term == Subset{0});
  for (std::size_t i = 1; i < imp.size(); ++i) CHECK(imp[i - 1].std >= imp[i].std);

  Dataset shifted = d;
  shifted.t.array() += 1000.0;
  const auto imp2 = importance(hdmr_fit(shifted, options(2, 3, 0.3)), d.x);
  for (std::size_t i = 0; i < imp.size(); ++i) {
    CHECK(imp2[i].term == imp[i].term);
    CHECK(imp2[i].std == doctest::Approx(imp[i].std).epsilon(1e-6));
  }

  const auto stored = importance(m);
  REQUIRE(stored.size() == imp.size());
  for (std::size_t i = 0; i < imp.size(); ++i) {
    CHECK(stored[i].term == imp[i].term);
    CHECK(stored[i].std == doctest::Approx(imp[i].std).epsilon(1e-9));
  }
}

TEST_CASE("additive target: singleton terms dominate") {
  const Dataset d = synth(SynthKind::kAdditive, 4, 400, 5);
  const HdmrModel m = hdmr_fit(d, options(2, 4, 0.3));
  const auto imp = importance(m, d.x);
  double min_single = 1e300, max_coupled = 0.0;
  for (const auto& ti : imp) {
    if (ti.term.size() == 1) min_single = std::min(min_single, ti.std);
    else max_coupled = std::max(max_coupled, ti.std);
  }
  CHECK(min_single >= 5.0 * max_coupled);
}

TEST_CASE("component curves") {
  const Dataset d = synth(SynthKind::kMorseLike, 3, 150, 7);
  const HdmrModel m = hdmr_fit(d, options(2, 3, 0.45));
  const auto curves = component_curves(m, 101);
  REQUIRE(curves.size() == m.feature_count());
  for (const auto& c : curves) {
    REQUIRE(c.grid.size() == 101);
    CHECK(c.grid.front() == 0.0);
    CHECK(c.grid.back() == 1.0);
    // second differences of a sum of Gaussians of width l on step h are bounded
    // by h^2 * max|f''| <= h^2 * sum|alpha| / l^2
    const double h = 0.01, l = 0.45;
    const double bound = h * h * m.gpr().alpha().cwiseAbs().sum() / (l * l);
    for (std::size_t i = 1; i + 1 < c.values.size(); ++i) {
      CHECK(std::abs(c.values[i + 1] - 2 * c.values[i] + c.values[i - 1]) <= bound);
    }
  }
  CHECK(curves[0].label == "x0");
  CHECK(curves[3].term.size() == 2);

  // sampling a curve at a training feature value matches gpr_component
  const auto& y = m.gpr().ytrain();
  for (std::size_t j = 0; j < m.feature_count(); ++j) {
    const double u = y(0, static_cast<Eigen::Index>(j));
    const std::vector<double> at{u};
    const Vector direct = m.gpr().component(j, at);
    const Vector all = m.gpr().components(y.topRows(1)).row(0).transpose();
    CHECK(direct[0] == doctest::Approx(all[static_cast<Eigen::Index>(j)]).epsilon(1e-12));
  }

  const fs::path p = temp_dir() / "components.csv";
  write_component_csv(p, curves, "config={}");
  const std::string text = read_file(p);
  CHECK(text.rfind("# config={}\nterm,grid,value\n", 0) == 0);
}

TEST_CASE("zero weights give zero curves") {
  const Dataset d = synth(SynthKind::kAdditive, 2, 20, 9);
  const HdmrModel m = hdmr_fit(d, options(1, 0, 0.3));
  const AdditiveGprModel zero(m.gpr().ytrain(), Vector::Zero(m.gpr().train_size()), 0.3, 1e-6,
                              1e-6, 0.0);
  const HdmrModel z(m.feature_map(), m.scaler(), zero, m.metadata());
  for (const auto& c : component_curves(z, 11)) {
    for (double v : c.values) CHECK(v == 0.0);
    CHECK(c.std == 0.0);
  }
}

TEST_CASE("sweep bookkeeping") {
  const Dataset d = synth(SynthKind::kPairwise, 3, 260, 11);
  SweepConfig cfg;
  cfg.orders = {1, 2};
  cfg.neurons = {0, 3};
  cfg.repeats = 2;
  cfg.train_size = 60;
  cfg.test_size = 100;
  cfg.length_scale = 0.45;
  cfg.seed = 100;
  cfg.record_timing = false;
  const SweepResult r = sweep(d, cfg);
  REQUIRE(r.records.size() == 8);
  CHECK(r.records[0].order == 1);
  CHECK(r.records[0].seed == 100);
  CHECK(r.records[1].seed == 101);
  CHECK(r.records.back().order == 2);
  CHECK(r.records.back().neurons == 3);

  REQUIRE(r.cells.size() == 4);
  for (const auto& cell : r.cells) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& rec : r.records) {
      if (rec.order == cell.order && rec.neurons == cell.neurons) best = std::min(best, rec.test_rmse);
    }
    CHECK(cell.best_test_rmse == best);
    CHECK(cell.ok_repeats == 2);
  }
  CHECK(r.cells[3].coupling_terms == 3);
  REQUIRE(r.best_by_order.size() == 2);
  CHECK(r.best_by_order[1].best_test_rmse == std::min(r.cells[2].best_test_rmse, r.cells[3].best_test_rmse));
  CHECK(r.best_by_order[1].best_test_rmse < r.best_by_order[0].best_test_rmse);

  SweepConfig parallel = cfg;
  parallel.jobs = 3;
  const SweepResult p = sweep(d, parallel);
  const fs::path a = temp_dir() / "serial.csv", b = temp_dir() / "parallel.csv";
  write_sweep_csv(a, r.records);
  write_sweep_csv(b, p.records);
  CHECK(read_file(a) == read_file(b));
  CHECK(read_file(a).rfind("d,N,repeat,seed,train_rmse,test_rmse,train_corr,test_corr,wall_s,status\n", 0) == 0);

  const fs::path s = temp_dir() / "summary.csv";
  write_summary_csv(s, r.cells, "x");
  CHECK(read_file(s).rfind("# x\nd,N,coupling_terms,ok_repeats,best_test_rmse,best_repeat\n", 0) == 0);
}

TEST_CASE("sweep with one repeat and failing cells") {
  const Dataset d = synth(SynthKind::kAdditive, 3, 50, 13);
  SweepConfig cfg;
  cfg.orders = {1};
  cfg.neurons = {0};
  cfg.train_size = 20;
  cfg.length_scale = 0.3;
  const SweepResult one = sweep(d, cfg);
  CHECK(one.records.size() == 1);
  CHECK(one.records[0].status == "ok");

  cfg.train_size = 1;  // too few rows to fit: every cell fails, sweep still returns
  cfg.orders = {1, 2};
  const SweepResult bad = sweep(d, cfg);
  REQUIRE(bad.records.size() == 2);
  for (const auto& rec : bad.records) {
    CHECK(rec.status == "failed");
    CHECK(!rec.message.empty());
  }
  CHECK(std::isnan(bad.cells[0].best_test_rmse));
  CHECK(bad.cells[0].ok_repeats == 0);

  cfg.orders = {4};
  CHECK_THROWS_AS(sweep(d, cfg), InvalidOrder);
}

TEST_CASE("length-scale grid search") {
  const Dataset d = synth(SynthKind::kAdditive, 3, 300, 15);
  const HdmrFitOptions o = options(1, 0, 1.0);

  const auto single = grid_search_l(d, o, {0.7}, 1);
  CHECK(single.best == 0.7);
  REQUIRE(single.validation_rmse.size() == 1);

  const auto g = grid_search_l(d, o, {1e9, 0.05, 0.2, 0.5}, 1);
  CHECK(g.best != 1e9);
  CHECK(g.validation_rmse[0].first == 1e9);

  // identical candidates tie; the larger one wins only when strictly equal
  const auto tie = grid_search_l(d, o, {0.3, 0.3}, 1);
  CHECK(tie.best == 0.3);

  const Dataset morse = synth(SynthKind::kMorseLike, 3, 800, 17);
  const auto flat = grid_search_l(morse, 1, 0, {0.3, 0.45, 0.6}, 300, 18);
  double lo = 1e300, hi = 0;
  for (const auto& [l, e] : flat.validation_rmse) {
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  CHECK(hi <= 3.0 * lo);

  CHECK_THROWS_AS(grid_search_l(d, o, {}, 1), InvalidArgument);
}
