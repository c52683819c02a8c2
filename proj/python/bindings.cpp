#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hdmr/analysis.hpp"
#include "hdmr/errors.hpp"
#include "hdmr/sobol.hpp"

namespace py = pybind11;
using namespace hdmr;

namespace {

py::dict record_dict(const SweepRecord& r) {
  py::dict d;
  d["d"] = r.order;
  d["N"] = r.neurons;
  d["repeat"] = r.repeat;
  d["seed"] = r.seed;
  d["train_rmse"] = r.train_rmse;
  d["test_rmse"] = r.test_rmse;
  d["train_corr"] = r.train_corr;
  d["test_corr"] = r.test_corr;
  d["wall_s"] = r.wall_s;
  d["status"] = r.status;
  d["message"] = r.message;
  return d;
}

py::dict cell_dict(const SweepCell& c) {
  py::dict d;
  d["d"] = c.order;
  d["N"] = c.neurons;
  d["coupling_terms"] = c.coupling_terms;
  d["ok_repeats"] = c.ok_repeats;
  d["best_test_rmse"] = c.best_test_rmse;
  d["best_repeat"] = c.best_repeat;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Orders-of-coupling HDMR neural network with additive GPR neurons";

  // Base classes first: later registrations are tried first.
  static py::exception<Error> base(m, "HdmrError", PyExc_RuntimeError);
  static py::exception<InvalidArgument> invalid(m, "InvalidArgument", PyExc_ValueError);
  static py::exception<InvalidOrder> order(m, "InvalidOrder", invalid.ptr());
  static py::exception<ShapeError> shape(m, "ShapeError", PyExc_ValueError);
  static py::exception<IoError> io(m, "IoError", PyExc_OSError);
  static py::exception<ParseError> parse(m, "ParseError", io.ptr());
  static py::exception<NumericError> numeric(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NumericError& e) {
      py::set_error(numeric, e.what());
    } catch (const ParseError& e) {
      py::set_error(parse, e.what());
    } catch (const IoError& e) {
      py::set_error(io, e.what());
    } catch (const ShapeError& e) {
      py::set_error(shape, e.what());
    } catch (const InvalidOrder& e) {
      py::set_error(order, e.what());
    } catch (const InvalidArgument& e) {
      py::set_error(invalid, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  m.def("sobol_points", &sobol_points, py::arg("dimension"), py::arg("count"),
        py::arg("skip") = 0, "Unscrambled Sobol points; index 0 is never emitted.");
  m.def("enumerate_subsets", &enumerate_subsets, py::arg("dimension"), py::arg("order"));

  py::class_<FeatureMap>(m, "FeatureMap")
      .def_property_readonly("dimension", &FeatureMap::dimension)
      .def_property_readonly("order", &FeatureMap::order)
      .def_property_readonly("neurons_per_term", &FeatureMap::neurons_per_term)
      .def_property_readonly("feature_count", &FeatureMap::feature_count)
      .def_property_readonly("subsets",
                             [](const FeatureMap& fm) {
                               std::vector<Subset> out;
                               for (const auto& r : fm.rows()) out.push_back(r.subset);
                               return out;
                             })
      .def("dense_weights", &FeatureMap::dense_weights)
      .def("map", &FeatureMap::map, py::arg("x"));
  m.def("build_feature_map",
        py::overload_cast<int, int, int, std::uint64_t>(&build_feature_map),
        py::arg("dimension"), py::arg("order"), py::arg("neurons_per_term"),
        py::arg("sobol_skip") = 0);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](Matrix x, Vector t) {
             Dataset d;
             d.x = std::move(x);
             d.t = std::move(t);
             d.validate();
             return d;
           }),
           py::arg("x"), py::arg("t"))
      .def_readwrite("x", &Dataset::x)
      .def_readwrite("t", &Dataset::t)
      .def_readwrite("column_names", &Dataset::column_names)
      .def_readwrite("target_name", &Dataset::target_name)
      .def_property_readonly("size", &Dataset::size)
      .def_property_readonly("dimension", &Dataset::dimension)
      .def("__len__", &Dataset::size);

  m.def("load_csv", &load_csv, py::arg("path"), py::arg("target") = "");
  m.def("write_csv", &write_csv, py::arg("path"), py::arg("data"), py::arg("comment") = "");
  m.def(
      "split",
      [](const Dataset& data, std::size_t train_size, std::uint64_t seed,
         std::optional<std::size_t> test_size) {
        Split s = split(data, train_size, seed, test_size);
        return py::make_tuple(std::move(s.train), std::move(s.test));
      },
      py::arg("data"), py::arg("train_size"), py::arg("seed"), py::arg("test_size") = py::none());
  m.def(
      "synth",
      [](const std::string& kind, int dimension, std::size_t n, std::uint64_t seed,
         double noise_std) { return synth(parse_synth_kind(kind), dimension, n, seed, noise_std); },
      py::arg("kind"), py::arg("dimension"), py::arg("n"), py::arg("seed"),
      py::arg("noise_std") = 0.0);

  py::class_<HdmrModel>(m, "Model")
      .def_property_readonly("dimension", &HdmrModel::dimension)
      .def_property_readonly("feature_count", &HdmrModel::feature_count)
      .def_property_readonly("order", [](const HdmrModel& h) { return h.metadata().order; })
      .def_property_readonly("length_scale",
                             [](const HdmrModel& h) { return h.gpr().length_scale(); })
      .def_property_readonly("noise_used", [](const HdmrModel& h) { return h.gpr().noise_used(); })
      .def_property_readonly("jitter_escalated",
                             [](const HdmrModel& h) { return h.gpr().jitter_escalated(); })
      .def_property_readonly("offset", [](const HdmrModel& h) { return h.gpr().target_offset(); })
      .def_property_readonly("alpha", [](const HdmrModel& h) { return h.gpr().alpha(); })
      .def_property_readonly("terms", &HdmrModel::terms)
      .def_property_readonly("feature_map", &HdmrModel::feature_map,
                             py::return_value_policy::reference_internal)
      .def("features", &HdmrModel::features, py::arg("x"))
      .def("predict", &HdmrModel::predict, py::arg("x"))
      .def(
          "term_values",
          [](const HdmrModel& h, const Matrix& x) {
            TermValues tv = h.term_values(x);
            return py::make_tuple(tv.terms, tv.values, tv.offset);
          },
          py::arg("x"), "Returns (terms, values[n, T], offset).")
      .def("save", [](const HdmrModel& h, const std::filesystem::path& p) { save_model(h, p); })
      .def("to_json", &serialize_model)
      .def_static("load", &load_model, py::arg("path"))
      .def_static("from_json", &deserialize_model, py::arg("text"));

  m.def(
      "fit",
      [](const Dataset& train, int order, int neurons_per_term, double length_scale, double noise,
         std::uint64_t sobol_skip) {
        HdmrFitOptions o;
        o.order = order;
        o.neurons_per_term = neurons_per_term;
        o.length_scale = length_scale;
        o.noise = noise;
        o.sobol_skip = sobol_skip;
        py::gil_scoped_release release;
        return hdmr_fit(train, o);
      },
      py::arg("train"), py::arg("order"), py::arg("neurons_per_term"), py::arg("length_scale"),
      py::arg("noise") = kDefaultNoise, py::arg("sobol_skip") = 0);
  m.def("load_model", &load_model, py::arg("path"));
  m.def("save_model", &save_model, py::arg("model"), py::arg("path"));

  m.def("rmse", &rmse, py::arg("pred"), py::arg("actual"));
  m.def("pearson_corr", &pearson_corr, py::arg("pred"), py::arg("actual"));
  m.def(
      "importance",
      [](const HdmrModel& h, std::optional<Matrix> x) {
        const auto imp = x ? importance(h, *x) : importance(h);
        std::vector<std::pair<Subset, double>> out;
        for (const auto& ti : imp) out.emplace_back(ti.term, ti.std);
        return out;
      },
      py::arg("model"), py::arg("x") = py::none(),
      "[(term, std)] sorted by decreasing std; x defaults to the training inputs.");
  m.def(
      "components",
      [](const HdmrModel& h, int grid_size) {
        py::list out;
        for (const auto& c : component_curves(h, grid_size)) {
          py::dict d;
          d["feature"] = c.feature;
          d["label"] = c.label;
          d["term"] = c.term;
          d["grid"] = c.grid;
          d["values"] = c.values;
          d["std"] = c.std;
          out.append(d);
        }
        return out;
      },
      py::arg("model"), py::arg("grid_size") = 201);

  m.def(
      "sweep",
      [](const Dataset& data, std::vector<int> orders, std::vector<int> neurons, std::size_t train_size,
         double length_scale, std::uint64_t seed, int repeats, std::optional<std::size_t> test_size,
         double noise, std::uint64_t sobol_skip, int jobs, bool record_timing) {
        SweepConfig c;
        c.orders = std::move(orders);
        c.neurons = std::move(neurons);
        c.repeats = repeats;
        c.train_size = train_size;
        c.test_size = test_size;
        c.length_scale = length_scale;
        c.noise = noise;
        c.seed = seed;
        c.sobol_skip = sobol_skip;
        c.jobs = jobs;
        c.record_timing = record_timing;
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = sweep(data, c);
        }
        py::list records, cells, best;
        for (const auto& x : r.records) records.append(record_dict(x));
        for (const auto& x : r.cells) cells.append(cell_dict(x));
        for (const auto& x : r.best_by_order) best.append(cell_dict(x));
        py::dict out;
        out["records"] = records;
        out["cells"] = cells;
        out["best_by_order"] = best;
        return out;
      },
      py::arg("data"), py::arg("orders"), py::arg("neurons"), py::arg("train_size"),
      py::arg("length_scale"), py::arg("seed"), py::arg("repeats") = 1,
      py::arg("test_size") = py::none(), py::arg("noise") = kDefaultNoise,
      py::arg("sobol_skip") = 0, py::arg("jobs") = 1, py::arg("record_timing") = true);

  m.def(
      "grid_search_l",
      [](const Dataset& data, int order, int neurons_per_term, std::vector<double> candidates,
         std::size_t train_size, std::uint64_t seed, double noise) {
        const auto g =
            grid_search_l(data, order, neurons_per_term, candidates, train_size, seed, noise);
        return py::make_tuple(g.best, g.validation_rmse);
      },
      py::arg("data"), py::arg("order"), py::arg("neurons_per_term"), py::arg("candidates"),
      py::arg("train_size"), py::arg("seed"), py::arg("noise") = kDefaultNoise);
}
