#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hdmr/coupling.hpp"
#include "hdmr/data.hpp"
#include "hdmr/gpr.hpp"
#include "hdmr/types.hpp"

namespace hdmr {

inline constexpr int kModelFormatVersion = 1;

/// Per-feature min/max map onto the unit cube. A constant feature maps to 0.5.
/// No clipping: test values outside the training range extrapolate.
struct Scaler {
  Vector min;
  Vector max;

  Eigen::Index size() const noexcept { return min.size(); }
  Matrix apply(const Matrix& y) const;
};

Scaler fit_scaler(const Matrix& ytrain);
inline Matrix apply_scaler(const Scaler& scaler, const Matrix& y) { return scaler.apply(y); }

struct HdmrFitOptions {
  int order = 1;
  int neurons_per_term = 0;
  double length_scale = 0.0;
  double noise = kDefaultNoise;
  std::uint64_t sobol_skip = 0;
  std::vector<Subset> excluded;
  std::map<Subset, int> neurons_override;

  // Provenance, stored in the model file only.
  std::optional<std::uint64_t> split_seed;
  std::string run_config;  // JSON text echoed from the caller, may be empty
};

struct BuildMetadata {
  int dimension = 0;
  int order = 1;
  int neurons_per_term = 0;
  double length_scale = 0.0;
  double noise = kDefaultNoise;
  double noise_used = kDefaultNoise;
  std::uint64_t sobol_skip = 0;
  std::optional<std::uint64_t> split_seed;
  DatasetFingerprint dataset;
  std::string run_config;
};

/// Contribution of each coupling term: column k of `values` is the sum of the
/// activation functions of every neuron assigned to `terms[k]`. Original
/// coordinate neurons are reported as singleton terms.
struct TermValues {
  std::vector<Subset> terms;
  Matrix values;  // n x terms.size()
  double offset = 0.0;
};

/// Single-hidden-layer network y = Wx with activation functions from a
/// first-order additive GPR on the unit-cube-scaled y:
///   f(x) = f0 + sum_j f_j(scale_j(w_j . x)).
class HdmrModel {
 public:
  HdmrModel() = default;
  HdmrModel(FeatureMap feature_map, Scaler scaler, AdditiveGprModel gpr,
            BuildMetadata metadata);

  const FeatureMap& feature_map() const noexcept { return feature_map_; }
  const Scaler& scaler() const noexcept { return scaler_; }
  const AdditiveGprModel& gpr() const noexcept { return gpr_; }
  const BuildMetadata& metadata() const noexcept { return metadata_; }

  int dimension() const noexcept { return feature_map_.dimension(); }
  std::size_t feature_count() const noexcept { return feature_map_.feature_count(); }

  /// Scaled hidden-layer inputs for X (n x D) -> n x F.
  Matrix features(const Matrix& x) const;

  Vector predict(const Matrix& x) const;

  /// Distinct terms in reporting order: the D singletons, then the coupled
  /// subsets that own at least one neuron, lexicographically.
  const std::vector<Subset>& terms() const noexcept { return terms_; }
  /// Index into terms() for each feature.
  const std::vector<std::size_t>& feature_terms() const noexcept { return feature_terms_; }

  TermValues term_values(const Matrix& x) const;

 private:
  void index_terms();

  FeatureMap feature_map_;
  Scaler scaler_;
  AdditiveGprModel gpr_;
  BuildMetadata metadata_;
  std::vector<Subset> terms_;
  std::vector<std::size_t> feature_terms_;
};

/// build_feature_map -> map_features -> fit_scaler/apply_scaler -> gpr_fit.
HdmrModel hdmr_fit(const Dataset& train, const HdmrFitOptions& options);

inline Vector hdmr_predict(const HdmrModel& model, const Matrix& x) { return model.predict(x); }
inline TermValues term_values(const HdmrModel& model, const Matrix& x) {
  return model.term_values(x);
}

/// Human-readable label, e.g. "x2" or "x0*x3".
std::string term_label(const Subset& term);
/// Label of one neuron, e.g. "x1" (original) or "y7[x0*x2]" (coupled).
std::string feature_label(const FeatureMap& map, std::size_t feature);

// Model file: one JSON document
//   { "format": "hdmrnn-model", "format_version": 1,
//     "metadata": {...}, "feature_map": {...}, "scaler": {...}, "gpr": {...},
//     "checksums": { <section>: fnv1a-64 hex of the section's compact dump } }
// Doubles are written as shortest round-trip decimals, so a reload is
// bit-exact.
std::string serialize_model(const HdmrModel& model);
HdmrModel deserialize_model(const std::string& text);

/// Writes to a temporary sibling and renames, so a failed save never leaves a
/// partial model at `path`.
void save_model(const HdmrModel& model, const std::filesystem::path& path);
HdmrModel load_model(const std::filesystem::path& path);

}  // namespace hdmr
