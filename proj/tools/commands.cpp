#include "commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "hdmr/analysis.hpp"
#include "hdmr/errors.hpp"
#include "hdmr/textio.hpp"

namespace hdmr::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return 2;
    case ErrorKind::kIo: return 3;
    case ErrorKind::kNumeric: return 4;
    case ErrorKind::kDimension: return 5;
  }
  return kExitFailure;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double safe_corr(const Vector& p, const Vector& a) {
  if (p.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  try {
    return pearson_corr(p, a);
  } catch (const NumericError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

void write_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out.flush()) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "'");
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory '" + dir.string() + "'");
}

std::string config_comment(const RunConfig& cfg) { return "config=" + cfg.dump(); }

// Option values as typed, in declaration order; absent optionals are left out.
RunConfig capture(const CLI::App& sub) {
  RunConfig cfg;
  cfg.command = sub.get_name();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string key = opt->get_single_name();
    if (key == "help") continue;
    if (opt->get_expected_min() == 0) {
      cfg.args[key] = opt->count() > 0;
      continue;
    }
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
      if (value.empty()) continue;
    }
    cfg.args[key] = value;
  }
  return cfg;
}

struct Metrics {
  std::size_t size = 0;
  double rmse = std::numeric_limits<double>::quiet_NaN();
  double corr = std::numeric_limits<double>::quiet_NaN();
};

Metrics evaluate(const HdmrModel& model, const Dataset& data) {
  Metrics m;
  m.size = data.size();
  if (m.size == 0) return m;
  const Vector p = model.predict(data.x);
  m.rmse = rmse(p, data.t);
  m.corr = safe_corr(p, data.t);
  return m;
}

void put_metrics(Json& report, const Metrics& train, const Metrics& test) {
  report["train_size"] = train.size;
  report["test_size"] = test.size;
  report["train_rmse"] = number_or_null(train.rmse);
  report["test_rmse"] = number_or_null(test.rmse);
  report["train_corr"] = number_or_null(train.corr);
  report["test_corr"] = number_or_null(test.corr);
}

void print_metrics(const Metrics& train, const Metrics& test) {
  auto show = [](const char* name, const Metrics& m) {
    if (m.size == 0) return;
    std::cout << name << ": n=" << m.size << " rmse=" << format_double(m.rmse)
              << " corr=" << format_double(m.corr) << '\n';
  };
  show("train", train);
  show("test", test);
}

void check_dimension(const HdmrModel& model, Eigen::Index columns, const std::string& path) {
  if (columns != model.dimension()) {
    throw ShapeError("'" + path + "' has " + std::to_string(columns) +
                     " coordinate columns, model expects " + std::to_string(model.dimension()));
  }
}

std::string file_label(const Subset& term) {
  std::string s = "term";
  for (int i : term) s += "_x" + std::to_string(i);
  return s;
}

// ---- commands --------------------------------------------------------------

struct FitArgs {
  std::string data, target, out, report;
  int order = 1, neurons = 0;
  double length_scale = 0.0, noise = kDefaultNoise;
  std::size_t train = 0;
  std::optional<std::size_t> test;
  std::uint64_t seed = 0, sobol_skip = 0;
  bool no_timing = false;
};

void cmd_fit(const FitArgs& a, const RunConfig& cfg) {
  const Dataset data = load_csv(a.data, a.target);
  if (a.order < 1 || a.order > data.dimension()) {
    throw InvalidOrder("--d " + std::to_string(a.order) + " must lie in [1, " +
                       std::to_string(data.dimension()) + "] for '" + a.data + "'");
  }
  const Split s = split(data, a.train, a.seed, a.test);

  HdmrFitOptions o;
  o.order = a.order;
  o.neurons_per_term = a.neurons;
  o.length_scale = a.length_scale;
  o.noise = a.noise;
  o.sobol_skip = a.sobol_skip;
  o.split_seed = a.seed;
  o.run_config = cfg.dump();

  const auto t0 = Clock::now();
  const HdmrModel model = hdmr_fit(s.train, o);
  const double fit_s = seconds_since(t0);
  const auto t1 = Clock::now();
  const Metrics train = evaluate(model, s.train);
  const Metrics test = evaluate(model, s.test);
  const double predict_s = seconds_since(t1);

  save_model(model, a.out);

  Json report;
  report["config"] = cfg.to_json();
  report["model"] = a.out;
  report["feature_count"] = model.feature_count();
  report["noise_used"] = model.gpr().noise_used();
  report["jitter_escalated"] = model.gpr().jitter_escalated();
  put_metrics(report, train, test);
  report["timing"] = a.no_timing ? Json(nullptr) : Json{{"fit_s", fit_s}, {"predict_s", predict_s}};
  const std::string report_path = a.report.empty() ? a.out + ".report.json" : a.report;
  write_atomic(report_path, report.dump(2) + "\n");

  std::cout << "model: " << a.out << " (F=" << model.feature_count() << ")\n";
  if (model.gpr().jitter_escalated()) {
    std::cout << "jitter escalated to " << format_double(model.gpr().noise_used()) << '\n';
  }
  print_metrics(train, test);
  if (!a.no_timing) std::cout << "fit_s: " << format_double(fit_s) << '\n';
  std::cout << "report: " << report_path << '\n';
}

struct EvalArgs {
  std::string model, data, target, report;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> train, test;
};

void cmd_eval(const EvalArgs& a, const RunConfig& cfg) {
  const HdmrModel model = load_model(a.model);
  const Dataset data = load_csv(a.data, a.target);
  check_dimension(model, data.dimension(), a.data);

  Metrics train, test;
  if (a.seed) {
    const std::size_t m = a.train.value_or(model.metadata().dataset.rows);
    const Split s = split(data, m, *a.seed, a.test);
    train = evaluate(model, s.train);
    test = evaluate(model, s.test);
  } else {
    test = evaluate(model, data);
  }

  Json report;
  report["config"] = cfg.to_json();
  put_metrics(report, train, test);
  if (!a.report.empty()) write_atomic(a.report, report.dump(2) + "\n");
  print_metrics(train, test);
}

struct PredictArgs {
  std::string model, data, target, out;
};

void cmd_predict(const PredictArgs& a, const RunConfig& cfg) {
  const HdmrModel model = load_model(a.model);
  std::vector<std::string> names;
  Matrix x = load_csv_features(a.data, &names, a.target);
  if (x.cols() == model.dimension() + 1 && a.target.empty()) {
    // trailing column is taken as the target, as in fit
    x = Matrix(x.leftCols(model.dimension()));
  }
  if (!(x.rows() == 0 && x.cols() == 0)) check_dimension(model, x.cols(), a.data);

  std::ostringstream out;
  out << "# " << config_comment(cfg) << "\nprediction\n";
  if (x.rows() > 0) {
    const Vector p = model.predict(x);
    for (Eigen::Index i = 0; i < p.size(); ++i) out << format_double(p[i]) << '\n';
  }
  write_atomic(a.out, out.str());
  std::cout << x.rows() << " predictions -> " << a.out << '\n';
}

struct SweepArgs {
  std::string data, target, out;
  std::vector<int> orders, neurons;
  int repeats = 1, jobs = 1;
  std::size_t train = 0;
  std::optional<std::size_t> test;
  double length_scale = 0.0, noise = kDefaultNoise;
  std::uint64_t seed = 0, sobol_skip = 0;
  bool no_timing = false;
};

void cmd_sweep(const SweepArgs& a, const RunConfig& cfg) {
  const Dataset data = load_csv(a.data, a.target);
  SweepConfig sc;
  sc.orders = a.orders;
  sc.neurons = a.neurons;
  sc.repeats = a.repeats;
  sc.train_size = a.train;
  sc.test_size = a.test;
  sc.length_scale = a.length_scale;
  sc.noise = a.noise;
  sc.seed = a.seed;
  sc.sobol_skip = a.sobol_skip;
  sc.jobs = a.jobs;
  sc.record_timing = !a.no_timing;
  const SweepResult r = sweep(data, sc);

  const fs::path dir = a.out;
  ensure_dir(dir);
  const std::string comment = config_comment(cfg);
  write_sweep_csv(dir / "sweep.csv", r.records, comment);
  write_summary_csv(dir / "summary.csv", r.cells, comment);
  write_summary_csv(dir / "best_by_order.csv", r.best_by_order, comment);
  Json meta;
  meta["config"] = cfg.to_json();
  meta["dataset"] = {{"rows", data.size()}, {"columns", data.dimension()}, {"target", data.target_name}};
  write_atomic(dir / "config.json", meta.dump(2) + "\n");

  for (const auto& rec : r.records) {
    if (rec.status == "failed") {
      std::cerr << "d=" << rec.order << " N=" << rec.neurons << " repeat=" << rec.repeat
                << " failed: " << rec.message << '\n';
    }
  }
  std::cout << "d\tbest_N\tbest_test_rmse\n";
  for (const auto& c : r.best_by_order) {
    std::cout << c.order << '\t' << c.neurons << '\t' << format_double(c.best_test_rmse) << '\n';
  }
  std::cout << "results in " << dir.string() << '\n';
}

struct ComponentsArgs {
  std::string model, out;
  int grid = 201;
};

void cmd_components(const ComponentsArgs& a, const RunConfig& cfg) {
  const HdmrModel model = load_model(a.model);
  if (a.grid < 2) throw InvalidArgument("--grid must be >= 2");
  const auto curves = component_curves(model, a.grid);
  const fs::path dir = a.out;
  ensure_dir(dir);
  const std::string comment = config_comment(cfg);

  for (const Subset& term : model.terms()) {
    std::vector<ComponentCurve> mine;
    for (const auto& c : curves) {
      if (c.term == term) mine.push_back(c);
    }
    write_component_csv(dir / (file_label(term) + ".csv"), mine, comment);
  }
  write_component_csv(dir / "components.csv", curves, comment);

  std::ostringstream imp;
  imp << "# " << comment << "\nterm,std\n";
  for (const auto& ti : importance(model)) {
    imp << term_label(ti.term) << ',' << format_double(ti.std) << '\n';
  }
  write_atomic(dir / "importance.csv", imp.str());
  std::cout << model.terms().size() << " terms, " << curves.size() << " curves -> "
            << dir.string() << '\n';
}

struct SynthArgs {
  std::string kind, out;
  int dim = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double noise_std = 0.0;
};

void cmd_synth(const SynthArgs& a, const RunConfig& cfg) {
  const Dataset d = synth(parse_synth_kind(a.kind), a.dim, a.n, a.seed, a.noise_std);
  fs::path tmp = a.out;
  tmp += ".tmp";
  write_csv(tmp, d, config_comment(cfg));
  std::error_code ec;
  fs::rename(tmp, a.out, ec);
  if (ec) throw IoError("cannot write '" + a.out + "'");
  std::cout << d.size() << " rows -> " << a.out << '\n';
}

struct GridArgs {
  std::string data, target, out;
  int order = 1, neurons = 0;
  std::vector<double> candidates;
  std::size_t train = 0;
  std::uint64_t seed = 0;
  double noise = kDefaultNoise;
};

void cmd_grid(const GridArgs& a, const RunConfig& cfg) {
  const Dataset data = load_csv(a.data, a.target);
  const auto g = grid_search_l(data, a.order, a.neurons, a.candidates, a.train, a.seed, a.noise);
  std::ostringstream out;
  out << "# " << config_comment(cfg) << "\nl,validation_rmse\n";
  for (const auto& [l, e] : g.validation_rmse) {
    out << format_double(l) << ',' << format_double(e) << '\n';
  }
  if (!a.out.empty()) write_atomic(a.out, out.str());
  for (const auto& [l, e] : g.validation_rmse) {
    std::cout << "l=" << format_double(l) << " validation_rmse=" << format_double(e) << '\n';
  }
  std::cout << "best l: " << format_double(g.best) << '\n';
}

void print_required(const CLI::App& app) {
  for (const CLI::App* sub : app.get_subcommands()) {
    std::string flags;
    for (const CLI::Option* opt : sub->get_options()) {
      if (opt->get_required()) flags += " " + opt->get_name();
    }
    if (!flags.empty()) std::cerr << "required flags for '" << sub->get_name() << "':" << flags << '\n';
  }
}

}  // namespace

Json RunConfig::to_json() const {
  Json j;
  j["command"] = command;
  j["args"] = args;
  return j;
}

RunConfig RunConfig::from_json(const Json& j) {
  RunConfig cfg;
  try {
    cfg.command = j.at("command").get<std::string>();
    cfg.args = j.at("args");
  } catch (const Json::exception& e) {
    throw ParseError("config", std::string("malformed run config: ") + e.what());
  }
  if (!cfg.args.is_object()) throw ParseError("config", "run config 'args' must be an object");
  return cfg;
}

std::vector<std::string> RunConfig::argv() const {
  std::vector<std::string> out{command};
  for (const auto& [key, value] : args.items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back("--" + key);
    } else {
      out.push_back("--" + key);
      out.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  return out;
}

RunConfig read_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string first;
  std::getline(in, first);
  const std::string marker = "# config=";
  if (first.rfind(marker, 0) == 0) {
    const Json j = Json::parse(first.substr(marker.size()), nullptr, false);
    if (j.is_discarded()) throw ParseError("config", "'" + path + "': unreadable config line");
    return RunConfig::from_json(j);
  }
  in.clear();
  in.seekg(0);
  const Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ParseError("config", "'" + path + "' carries no run config");
  }
  if (j.contains("run_config") && !j["run_config"].is_null()) {
    return RunConfig::from_json(j["run_config"]);
  }
  if (j.contains("metadata") && j["metadata"].contains("run_config") &&
      !j["metadata"]["run_config"].is_null()) {
    return RunConfig::from_json(j["metadata"]["run_config"]);
  }
  if (j.contains("config")) return RunConfig::from_json(j["config"]);
  throw ParseError("config", "'" + path + "' carries no run config");
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Orders-of-coupling HDMR neural network with additive GPR neurons", "hdmrnn"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit a model on a seeded train split");
  f->add_option("--data", fit.data, "CSV dataset")->required();
  f->add_option("--target", fit.target, "Target column (default: last)");
  f->add_option("--d", fit.order, "Coupling order")->required();
  f->add_option("--n-per-term", fit.neurons, "Neurons per coupling term")->required();
  f->add_option("--l", fit.length_scale, "Kernel length scale")->required();
  f->add_option("--noise", fit.noise, "GPR noise variance");
  f->add_option("--train", fit.train, "Training set size M")->required();
  f->add_option("--test", fit.test, "Test set size (default: remaining rows)");
  f->add_option("--seed", fit.seed, "Split seed")->required();
  f->add_option("--sobol-skip", fit.sobol_skip, "Initial Sobol points to skip");
  f->add_option("--out", fit.out, "Model file")->required();
  f->add_option("--report", fit.report, "Report path (default: <out>.report.json)");
  f->add_flag("--no-timing", fit.no_timing, "Leave timings out of the report");

  PredictArgs pred;
  auto* p = app.add_subcommand("predict", "Predict targets for coordinate rows");
  p->add_option("--model", pred.model, "Model file")->required();
  p->add_option("--data", pred.data, "CSV of coordinates")->required();
  p->add_option("--target", pred.target, "Column to ignore");
  p->add_option("--out", pred.out, "Predictions CSV")->required();

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Score a model against a labelled dataset");
  e->add_option("--model", ev.model, "Model file")->required();
  e->add_option("--data", ev.data, "CSV dataset")->required();
  e->add_option("--target", ev.target, "Target column (default: last)");
  e->add_option("--seed", ev.seed, "Re-create the fit split with this seed");
  e->add_option("--train", ev.train, "Training size for the split (default: model's)");
  e->add_option("--test", ev.test, "Test size for the split");
  e->add_option("--report", ev.report, "Report path");

  SweepArgs sw;
  auto* s = app.add_subcommand("sweep", "Grid over coupling order and neurons per term");
  s->add_option("--data", sw.data, "CSV dataset")->required();
  s->add_option("--target", sw.target, "Target column (default: last)");
  s->add_option("--d", sw.orders, "Coupling orders, comma separated")->required()->delimiter(',');
  s->add_option("--n-per-term", sw.neurons, "Neurons per term, comma separated")
      ->required()
      ->delimiter(',');
  s->add_option("--repeats", sw.repeats, "Splits per cell (seeds seed, seed+1, ...)");
  s->add_option("--train", sw.train, "Training set size M")->required();
  s->add_option("--test", sw.test, "Test set size (default: remaining rows)");
  s->add_option("--l", sw.length_scale, "Kernel length scale")->required();
  s->add_option("--noise", sw.noise, "GPR noise variance");
  s->add_option("--seed", sw.seed, "Base split seed")->required();
  s->add_option("--sobol-skip", sw.sobol_skip, "Initial Sobol points to skip");
  s->add_option("--jobs", sw.jobs, "Worker threads");
  s->add_option("--out", sw.out, "Output directory")->required();
  s->add_flag("--no-timing", sw.no_timing, "Write wall_s as 0");

  ComponentsArgs comp;
  auto* c = app.add_subcommand("components", "Write component curves and term importance");
  c->add_option("--model", comp.model, "Model file")->required();
  c->add_option("--grid", comp.grid, "Grid points on [0, 1]");
  c->add_option("--out", comp.out, "Output directory")->required();

  SynthArgs sy;
  auto* y = app.add_subcommand("synth", "Generate a synthetic dataset");
  y->add_option("--kind", sy.kind, "additive | pairwise | product | morse_like")->required();
  y->add_option("--dim", sy.dim, "Number of coordinates")->required();
  y->add_option("--n", sy.n, "Number of rows")->required();
  y->add_option("--seed", sy.seed, "Random seed")->required();
  y->add_option("--noise-std", sy.noise_std, "Gaussian noise added to targets");
  y->add_option("--out", sy.out, "CSV path")->required();

  GridArgs gr;
  auto* g = app.add_subcommand("grid-l", "Pick a length scale on a held-out part of the train split");
  g->add_option("--data", gr.data, "CSV dataset")->required();
  g->add_option("--target", gr.target, "Target column (default: last)");
  g->add_option("--d", gr.order, "Coupling order")->required();
  g->add_option("--n-per-term", gr.neurons, "Neurons per coupling term")->required();
  g->add_option("--l", gr.candidates, "Candidate length scales, comma separated")
      ->required()
      ->delimiter(',');
  g->add_option("--train", gr.train, "Training set size M")->required();
  g->add_option("--seed", gr.seed, "Split seed")->required();
  g->add_option("--noise", gr.noise, "GPR noise variance");
  g->add_option("--out", gr.out, "CSV of validation rmse per candidate");

  std::string artifact;
  auto* r = app.add_subcommand("rerun", "Repeat the command recorded in an output file");
  r->add_option("artifact", artifact, "Model, report, config.json or CSV output")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    if (err.get_exit_code() == 0) return 0;
    if (dynamic_cast<const CLI::RequiredError*>(&err)) print_required(app);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (r->parsed()) return run(read_run_config(artifact).argv());
    const CLI::App* sub = app.get_subcommands().front();
    const RunConfig cfg = capture(*sub);
    if (f->parsed()) cmd_fit(fit, cfg);
    else if (p->parsed()) cmd_predict(pred, cfg);
    else if (e->parsed()) cmd_eval(ev, cfg);
    else if (s->parsed()) cmd_sweep(sw, cfg);
    else if (c->parsed()) cmd_components(comp, cfg);
    else if (y->parsed()) cmd_synth(sy, cfg);
    else if (g->parsed()) cmd_grid(gr, cfg);
    return 0;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return exit_code(err.kind());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace hdmr::cli
