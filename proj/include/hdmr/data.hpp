#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdmr/types.hpp"

namespace hdmr {

/// Coordinates X (n x D) and targets t (n).
struct Dataset {
  Matrix x;
  Vector t;
  std::vector<std::string> column_names;
  std::string target_name;

  Eigen::Index size() const noexcept { return x.rows(); }
  int dimension() const noexcept { return static_cast<int>(x.cols()); }

  /// Rows selected by `indices`, in that order.
  Dataset subset(const std::vector<std::size_t>& indices) const;

  /// Throws unless n >= 1, D >= 1, shapes agree and every value is finite.
  void validate() const;
};

/// Row count, column names and a 64-bit FNV-1a hash of the raw values.
struct DatasetFingerprint {
  std::int64_t rows = 0;
  std::vector<std::string> columns;
  std::string target;
  std::string hash;  // 16 hex digits

  bool operator==(const DatasetFingerprint&) const = default;
};

DatasetFingerprint fingerprint(const Dataset& data);

/// Comma-separated numeric table. Lines starting with '#' and blank lines are
/// skipped; the first remaining line is a header if any cell is non-numeric.
struct CsvTable {
  std::vector<std::string> header;  // generated as x0, x1, ... when absent
  bool has_header = false;
  Matrix values;
};

CsvTable read_csv_table(const std::filesystem::path& path);

/// All non-target columns become coordinates in file order. An empty
/// `target_column` selects the last column.
Dataset load_csv(const std::filesystem::path& path, std::string_view target_column = {});

/// Coordinates only (no target). Zero data rows are allowed. When
/// `drop_column` names a header column, that column is removed.
Matrix load_csv_features(const std::filesystem::path& path,
                         std::vector<std::string>* column_names = nullptr,
                         std::string_view drop_column = {});

/// Writes a dataset with a header row. `comment`, when set, becomes a leading
/// '#' line.
void write_csv(const std::filesystem::path& path, const Dataset& data,
               std::string_view comment = {});

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Uniform sampling without replacement: a seeded Fisher-Yates permutation
/// (xoshiro256**) whose first M entries form the training set and the next
/// `test_size` entries (or the remainder) the test set.
Split split(const Dataset& data, std::size_t train_size, std::uint64_t seed,
            std::optional<std::size_t> test_size = std::nullopt);

enum class SynthKind { kAdditive, kPairwise, kProduct, kMorseLike };

SynthKind parse_synth_kind(std::string_view name);
std::string_view to_string(SynthKind kind);

/// Closed-form target for one point.
double synth_target(SynthKind kind, std::span<const double> x);

/// X uniform on [0,1]^D, targets from the named closed form plus optional
/// Gaussian noise of standard deviation `noise_std`.
Dataset synth(SynthKind kind, int dimension, std::size_t n, std::uint64_t seed,
              double noise_std = 0.0);

}  // namespace hdmr
