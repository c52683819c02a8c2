#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hdmr/errors.hpp"
#include "hdmr/model.hpp"
#include "hdmr/textio.hpp"

namespace hdmr {
namespace {

using nlohmann::json;

constexpr const char* kFormatName = "hdmrnn-model";
constexpr const char* kSections[] = {"metadata", "feature_map", "scaler", "gpr"};

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Vector vector_from(const json& a) {
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

Matrix matrix_from(const json& rows, Eigen::Index cols) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (static_cast<Eigen::Index>(r.size()) != cols) throw ShapeError("ragged matrix row");
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), j) = r[static_cast<std::size_t>(j)].get<double>();
    }
  }
  return m;
}

std::string section_hash(const json& section) {
  Fnv1a h;
  h.update(section.dump());
  return h.hex();
}

json metadata_json(const BuildMetadata& m) {
  json j;
  j["dimension"] = m.dimension;
  j["order"] = m.order;
  j["neurons_per_term"] = m.neurons_per_term;
  j["length_scale"] = m.length_scale;
  j["noise"] = m.noise;
  j["noise_used"] = m.noise_used;
  j["sobol_skip"] = m.sobol_skip;
  j["split_seed"] = m.split_seed ? json(*m.split_seed) : json(nullptr);
  j["dataset"] = {{"rows", m.dataset.rows},
                  {"columns", m.dataset.columns},
                  {"target", m.dataset.target},
                  {"hash", m.dataset.hash}};
  j["run_config"] = m.run_config.empty() ? json(nullptr) : json::parse(m.run_config);
  return j;
}

BuildMetadata metadata_from(const json& j) {
  BuildMetadata m;
  m.dimension = j.at("dimension").get<int>();
  m.order = j.at("order").get<int>();
  m.neurons_per_term = j.at("neurons_per_term").get<int>();
  m.length_scale = j.at("length_scale").get<double>();
  m.noise = j.at("noise").get<double>();
  m.noise_used = j.at("noise_used").get<double>();
  m.sobol_skip = j.at("sobol_skip").get<std::uint64_t>();
  if (!j.at("split_seed").is_null()) m.split_seed = j["split_seed"].get<std::uint64_t>();
  const auto& ds = j.at("dataset");
  m.dataset.rows = ds.at("rows").get<std::int64_t>();
  m.dataset.columns = ds.at("columns").get<std::vector<std::string>>();
  m.dataset.target = ds.at("target").get<std::string>();
  m.dataset.hash = ds.at("hash").get<std::string>();
  if (!j.at("run_config").is_null()) m.run_config = j["run_config"].dump();
  return m;
}

json feature_map_json(const FeatureMap& map) {
  const auto& c = map.config();
  json j;
  j["dimension"] = c.dimension;
  j["order"] = c.order;
  j["neurons_per_term"] = c.neurons_per_term;
  j["sobol_skip"] = c.sobol_skip;
  j["excluded"] = c.excluded;
  json overrides = json::array();
  for (const auto& [subset, n] : c.neurons_override) {
    overrides.push_back({{"subset", subset}, {"neurons", n}});
  }
  j["neurons_override"] = std::move(overrides);
  json rows = json::array();
  for (const auto& r : map.rows()) {
    json row;
    row["kind"] = r.kind == FeatureKind::kOriginal ? "original" : "coupled";
    row["subset"] = r.subset;
    row["weights"] = r.weights;
    row["sobol_index"] = r.sobol_index ? json(*r.sobol_index) : json(nullptr);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

FeatureMap feature_map_from(const json& j) {
  FeatureMapConfig c;
  c.dimension = j.at("dimension").get<int>();
  c.order = j.at("order").get<int>();
  c.neurons_per_term = j.at("neurons_per_term").get<int>();
  c.sobol_skip = j.at("sobol_skip").get<std::uint64_t>();
  c.excluded = j.at("excluded").get<std::vector<Subset>>();
  for (const auto& o : j.at("neurons_override")) {
    c.neurons_override[o.at("subset").get<Subset>()] = o.at("neurons").get<int>();
  }
  std::vector<FeatureRow> rows;
  for (const auto& r : j.at("rows")) {
    FeatureRow row;
    const auto kind = r.at("kind").get<std::string>();
    if (kind == "original") {
      row.kind = FeatureKind::kOriginal;
    } else if (kind == "coupled") {
      row.kind = FeatureKind::kCoupled;
    } else {
      throw InvalidArgument("unknown row kind '" + kind + "'");
    }
    row.subset = r.at("subset").get<Subset>();
    row.weights = r.at("weights").get<std::vector<double>>();
    if (!r.at("sobol_index").is_null()) row.sobol_index = r["sobol_index"].get<std::uint64_t>();
    rows.push_back(std::move(row));
  }
  return FeatureMap(std::move(c), std::move(rows));
}

json scaler_json(const Scaler& s) { return {{"min", vector_json(s.min)}, {"max", vector_json(s.max)}}; }

Scaler scaler_from(const json& j) {
  Scaler s;
  s.min = vector_from(j.at("min"));
  s.max = vector_from(j.at("max"));
  if (s.min.size() != s.max.size()) throw ShapeError("min/max lengths differ");
  return s;
}

json gpr_json(const AdditiveGprModel& g) {
  json j;
  j["length_scale"] = g.length_scale();
  j["noise"] = g.noise();
  j["noise_used"] = g.noise_used();
  j["target_offset"] = g.target_offset();
  j["feature_count"] = g.feature_count();
  j["alpha"] = vector_json(g.alpha());
  j["ytrain"] = matrix_json(g.ytrain());
  return j;
}

AdditiveGprModel gpr_from(const json& j) {
  const auto f = j.at("feature_count").get<Eigen::Index>();
  return AdditiveGprModel(matrix_from(j.at("ytrain"), f), vector_from(j.at("alpha")),
                          j.at("length_scale").get<double>(), j.at("noise").get<double>(),
                          j.at("noise_used").get<double>(), j.at("target_offset").get<double>());
}

template <typename F>
auto parse_section(const json& doc, const char* name, F&& parse) {
  try {
    return parse(doc.at(name));
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(name, std::string("model file: section '") + name + "' invalid: " + e.what());
  }
}

}  // namespace

std::string serialize_model(const HdmrModel& model) {
  json doc;
  doc["format"] = kFormatName;
  doc["format_version"] = kModelFormatVersion;
  doc["metadata"] = metadata_json(model.metadata());
  doc["feature_map"] = feature_map_json(model.feature_map());
  doc["scaler"] = scaler_json(model.scaler());
  doc["gpr"] = gpr_json(model.gpr());
  json sums;
  for (const char* s : kSections) sums[s] = section_hash(doc[s]);
  doc["checksums"] = std::move(sums);
  return doc.dump() + "\n";
}

HdmrModel deserialize_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("document", std::string("model file: parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("format") || doc["format"] != kFormatName) {
    throw ParseError("format", "model file: not an hdmrnn model document");
  }
  if (!doc.contains("format_version") || !doc["format_version"].is_number_integer()) {
    throw ParseError("format_version", "model file: missing format_version");
  }
  const int version = doc["format_version"].get<int>();
  if (version > kModelFormatVersion) {
    throw VersionError("format_version", "model file: format version " + std::to_string(version) +
                                             " is newer than supported version " +
                                             std::to_string(kModelFormatVersion));
  }
  if (version < 1) throw VersionError("format_version", "model file: invalid format version");
  if (!doc.contains("checksums")) throw ParseError("checksums", "model file: missing checksums");
  for (const char* s : kSections) {
    if (!doc.contains(s)) {
      throw ParseError(s, std::string("model file: missing section '") + s + "'");
    }
    if (!doc["checksums"].contains(s) || doc["checksums"][s] != section_hash(doc[s])) {
      throw ParseError(s, std::string("model file: checksum mismatch in section '") + s + "'");
    }
  }

  auto meta = parse_section(doc, "metadata", metadata_from);
  auto map = parse_section(doc, "feature_map", feature_map_from);
  auto scaler = parse_section(doc, "scaler", scaler_from);
  auto gpr = parse_section(doc, "gpr", gpr_from);
  try {
    return HdmrModel(std::move(map), std::move(scaler), std::move(gpr), std::move(meta));
  } catch (const std::exception& e) {
    throw ParseError("model", std::string("model file: inconsistent sections: ") + e.what());
  }
}

void save_model(const HdmrModel& model, const std::filesystem::path& path) {
  const std::string text = serialize_model(model);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write model file '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw IoError("write failed for model file '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move model file into place at '" + path.string() + "': " + ec.message());
  }
}

HdmrModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

}  // namespace hdmr
