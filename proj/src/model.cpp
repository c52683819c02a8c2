#include "hdmr/model.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "hdmr/errors.hpp"

namespace hdmr {

Matrix Scaler::apply(const Matrix& y) const {
  if (y.cols() != min.size()) {
    throw ShapeError("scaler: input has " + std::to_string(y.cols()) + " features, scaler has " +
                     std::to_string(min.size()));
  }
  Matrix out(y.rows(), y.cols());
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    const double lo = min[j];
    const double range = max[j] - lo;
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      out(i, j) = range > 0.0 ? (y(i, j) - lo) / range : 0.5;
    }
  }
  return out;
}

Scaler fit_scaler(const Matrix& ytrain) {
  if (ytrain.rows() < 1) throw InvalidArgument("fit_scaler: empty training matrix");
  Scaler s;
  s.min = ytrain.colwise().minCoeff().transpose();
  s.max = ytrain.colwise().maxCoeff().transpose();
  return s;
}

HdmrModel::HdmrModel(FeatureMap feature_map, Scaler scaler, AdditiveGprModel gpr,
                     BuildMetadata metadata)
    : feature_map_(std::move(feature_map)),
      scaler_(std::move(scaler)),
      gpr_(std::move(gpr)),
      metadata_(std::move(metadata)) {
  const auto f = static_cast<Eigen::Index>(feature_map_.feature_count());
  if (scaler_.size() != f || gpr_.feature_count() != f || scaler_.max.size() != f) {
    throw ShapeError("hdmr model: feature map, scaler and GPR disagree on feature count");
  }
  index_terms();
}

void HdmrModel::index_terms() {
  terms_.clear();
  feature_terms_.clear();
  std::map<Subset, std::size_t> coupled;
  for (int i = 0; i < feature_map_.dimension(); ++i) terms_.push_back({i});
  for (const auto& row : feature_map_.rows()) {
    if (row.kind == FeatureKind::kCoupled) coupled.emplace(row.subset, 0);
  }
  for (auto& [subset, index] : coupled) {
    index = terms_.size();
    terms_.push_back(subset);
  }
  for (const auto& row : feature_map_.rows()) {
    feature_terms_.push_back(row.kind == FeatureKind::kOriginal
                                 ? static_cast<std::size_t>(row.subset.front())
                                 : coupled.at(row.subset));
  }
}

Matrix HdmrModel::features(const Matrix& x) const {
  return scaler_.apply(feature_map_.map(x));
}

Vector HdmrModel::predict(const Matrix& x) const { return gpr_.predict(features(x)); }

TermValues HdmrModel::term_values(const Matrix& x) const {
  const Matrix per_feature = gpr_.components(features(x));
  TermValues out;
  out.terms = terms_;
  out.offset = gpr_.target_offset();
  out.values = Matrix::Zero(x.rows(), static_cast<Eigen::Index>(terms_.size()));
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    for (std::size_t j = 0; j < feature_terms_.size(); ++j) {
      out.values(n, static_cast<Eigen::Index>(feature_terms_[j])) +=
          per_feature(n, static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

HdmrModel hdmr_fit(const Dataset& train, const HdmrFitOptions& options) {
  train.validate();
  if (train.size() < 2) throw InvalidArgument("hdmr_fit: need at least 2 training rows");

  FeatureMapConfig config;
  config.dimension = train.dimension();
  config.order = options.order;
  config.neurons_per_term = options.neurons_per_term;
  config.sobol_skip = options.sobol_skip;
  config.excluded = options.excluded;
  config.neurons_override = options.neurons_override;
  FeatureMap map = build_feature_map(config);

  const Matrix y = map.map(train.x);
  Scaler scaler = fit_scaler(y);
  AdditiveGprModel gpr = gpr_fit(scaler.apply(y), train.t, options.length_scale, options.noise);

  BuildMetadata meta;
  meta.dimension = train.dimension();
  meta.order = options.order;
  meta.neurons_per_term = options.neurons_per_term;
  meta.length_scale = options.length_scale;
  meta.noise = options.noise;
  meta.noise_used = gpr.noise_used();
  meta.sobol_skip = options.sobol_skip;
  meta.split_seed = options.split_seed;
  meta.dataset = fingerprint(train);
  meta.run_config = options.run_config;
  return HdmrModel(std::move(map), std::move(scaler), std::move(gpr), std::move(meta));
}

std::string term_label(const Subset& term) {
  std::string s;
  for (std::size_t k = 0; k < term.size(); ++k) {
    if (k) s += '*';
    s += 'x' + std::to_string(term[k]);
  }
  return s;
}

std::string feature_label(const FeatureMap& map, std::size_t feature) {
  const auto& row = map.row(feature);
  if (row.kind == FeatureKind::kOriginal) return term_label(row.subset);
  return "y" + std::to_string(feature) + "[" + term_label(row.subset) + "]";
}

}  // namespace hdmr
