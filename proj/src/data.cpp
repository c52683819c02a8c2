#include "hdmr/data.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <numbers>
#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hdmr/errors.hpp"
#include "hdmr/random.hpp"
#include "hdmr/textio.hpp"

namespace hdmr {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

// Accepts what from_chars accepts plus a leading '+'; rejects trailing junk.
// Non-finite spellings parse (so they can be reported as non-finite).
std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    if (ec == std::errc::result_out_of_range) return std::nullopt;
    return std::nullopt;
  }
  return value;
}

std::string cell_error(const std::filesystem::path& path, std::size_t line, std::size_t col,
                       std::string_view cell, std::string_view why) {
  std::ostringstream os;
  os << path.string() << ": row " << line << ", column " << col + 1 << ": " << why << " '"
     << cell << "'";
  return os.str();
}

}  // namespace

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.column_names = column_names;
  out.target_name = target_name;
  out.x.resize(static_cast<Eigen::Index>(indices.size()), x.cols());
  out.t.resize(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = static_cast<Eigen::Index>(indices[i]);
    if (src < 0 || src >= x.rows()) throw InvalidArgument("dataset subset: index out of range");
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(src);
    out.t[static_cast<Eigen::Index>(i)] = t[src];
  }
  return out;
}

void Dataset::validate() const {
  if (x.rows() < 1) throw InvalidArgument("dataset: no rows");
  if (x.cols() < 1) throw InvalidArgument("dataset: no coordinate columns");
  if (t.size() != x.rows()) throw ShapeError("dataset: target length differs from row count");
  if (!column_names.empty() && static_cast<Eigen::Index>(column_names.size()) != x.cols()) {
    throw ShapeError("dataset: column name count differs from coordinate count");
  }
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (!x.row(i).allFinite() || !std::isfinite(t[i])) {
      throw InvalidArgument("dataset: non-finite value in row " + std::to_string(i + 1));
    }
  }
}

DatasetFingerprint fingerprint(const Dataset& data) {
  Fnv1a h;
  const auto cols = static_cast<std::uint64_t>(data.x.cols());
  h.update(&cols, sizeof cols);
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
      const double v = data.x(i, j);
      h.update(&v, sizeof v);
    }
    const double v = data.t[i];
    h.update(&v, sizeof v);
  }
  DatasetFingerprint fp;
  fp.rows = data.x.rows();
  fp.columns = data.column_names;
  fp.target = data.target_name;
  fp.hash = h.hex();
  return fp;
}

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  CsvTable table;
  std::vector<double> flat;
  std::size_t ncols = 0;
  std::size_t nrows = 0;
  bool first = true;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto cells = split_cells(view);
    if (first) {
      first = false;
      ncols = cells.size();
      bool numeric = true;
      for (auto c : cells) numeric = numeric && parse_number(c).has_value();
      if (!numeric) {
        table.has_header = true;
        for (auto c : cells) table.header.emplace_back(c);
        continue;
      }
      for (std::size_t j = 0; j < ncols; ++j) table.header.push_back("x" + std::to_string(j));
    }
    if (cells.size() != ncols) {
      std::ostringstream os;
      os << path.string() << ": row " << lineno << ": expected " << ncols << " cells, found "
         << cells.size();
      throw ParseError("", os.str());
    }
    for (std::size_t j = 0; j < ncols; ++j) {
      const auto v = parse_number(cells[j]);
      if (!v) throw ParseError("", cell_error(path, lineno, j, cells[j], "unparseable cell"));
      if (!std::isfinite(*v)) {
        throw ParseError("", cell_error(path, lineno, j, cells[j], "non-finite value"));
      }
      flat.push_back(*v);
    }
    ++nrows;
  }
  if (first) throw ParseError("", path.string() + ": file contains no header or data");
  table.values = Eigen::Map<Matrix>(flat.data(), static_cast<Eigen::Index>(nrows),
                                    static_cast<Eigen::Index>(ncols));
  return table;
}

Dataset load_csv(const std::filesystem::path& path, std::string_view target_column) {
  CsvTable table = read_csv_table(path);
  const auto ncols = static_cast<Eigen::Index>(table.header.size());
  if (ncols < 2) {
    throw ParseError("", path.string() + ": need at least 2 columns (coordinates + target)");
  }
  Eigen::Index target = ncols - 1;
  if (!target_column.empty()) {
    const auto it = std::find(table.header.begin(), table.header.end(), target_column);
    if (it == table.header.end()) {
      throw InvalidArgument(path.string() + ": target column '" + std::string(target_column) +
                            "' not found");
    }
    target = it - table.header.begin();
  }
  if (table.values.rows() < 1) throw ParseError("", path.string() + ": no data rows");

  Dataset data;
  data.target_name = table.header[static_cast<std::size_t>(target)];
  data.t = table.values.col(target);
  data.x.resize(table.values.rows(), ncols - 1);
  for (Eigen::Index j = 0, out = 0; j < ncols; ++j) {
    if (j == target) continue;
    data.x.col(out++) = table.values.col(j);
    data.column_names.push_back(table.header[static_cast<std::size_t>(j)]);
  }
  data.validate();
  return data;
}

Matrix load_csv_features(const std::filesystem::path& path,
                         std::vector<std::string>* column_names, std::string_view drop_column) {
  CsvTable table = read_csv_table(path);
  Eigen::Index drop = -1;
  if (!drop_column.empty()) {
    const auto it = std::find(table.header.begin(), table.header.end(), drop_column);
    if (it == table.header.end()) {
      throw InvalidArgument(path.string() + ": column '" + std::string(drop_column) +
                            "' not found");
    }
    drop = it - table.header.begin();
  }
  const auto ncols = static_cast<Eigen::Index>(table.header.size());
  Matrix x(table.values.rows(), ncols - (drop >= 0 ? 1 : 0));
  std::vector<std::string> names;
  for (Eigen::Index j = 0, out = 0; j < ncols; ++j) {
    if (j == drop) continue;
    x.col(out++) = table.values.col(j);
    names.push_back(table.header[static_cast<std::size_t>(j)]);
  }
  if (column_names) *column_names = std::move(names);
  return x;
}

void write_csv(const std::filesystem::path& path, const Dataset& data, std::string_view comment) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  if (!comment.empty()) out << "# " << comment << '\n';
  for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
    out << (data.column_names.empty() ? "x" + std::to_string(j)
                                      : data.column_names[static_cast<std::size_t>(j)])
        << ',';
  }
  out << (data.target_name.empty() ? "t" : data.target_name) << '\n';
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) out << format_double(data.x(i, j)) << ',';
    out << format_double(data.t[i]) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Split split(const Dataset& data, std::size_t train_size, std::uint64_t seed,
            std::optional<std::size_t> test_size) {
  const auto n = static_cast<std::size_t>(data.size());
  if (train_size < 1 || train_size >= n) {
    throw InvalidArgument("split: train size M=" + std::to_string(train_size) +
                          " must satisfy 1 <= M < n=" + std::to_string(n));
  }
  const std::size_t remainder = n - train_size;
  const std::size_t ntest = test_size.value_or(remainder);
  if (ntest > remainder) {
    throw InvalidArgument("split: test size " + std::to_string(ntest) + " exceeds the " +
                          std::to_string(remainder) + " rows left after training");
  }
  const auto perm = random_permutation(n, seed);
  Split s;
  s.train_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(train_size));
  s.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(train_size),
                        perm.begin() + static_cast<std::ptrdiff_t>(train_size + ntest));
  s.train = data.subset(s.train_indices);
  s.test = data.subset(s.test_indices);
  return s;
}

SynthKind parse_synth_kind(std::string_view name) {
  if (name == "additive") return SynthKind::kAdditive;
  if (name == "pairwise") return SynthKind::kPairwise;
  if (name == "product") return SynthKind::kProduct;
  if (name == "morse_like") return SynthKind::kMorseLike;
  throw InvalidArgument("synth: unknown kind '" + std::string(name) +
                        "' (expected additive, pairwise, product, morse_like)");
}

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::kAdditive: return "additive";
    case SynthKind::kPairwise: return "pairwise";
    case SynthKind::kProduct: return "product";
    case SynthKind::kMorseLike: return "morse_like";
  }
  return "unknown";
}

double synth_target(SynthKind kind, std::span<const double> x) {
  const std::size_t d = x.size();
  switch (kind) {
    case SynthKind::kAdditive: {
      double s = 0.0;
      for (double v : x) s += std::sin(2.0 * std::numbers::pi * v);
      return s;
    }
    case SynthKind::kPairwise: {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) s += x[i] * x[j];
      return s;
    }
    case SynthKind::kProduct: {
      double p = 1.0;
      for (double v : x) p *= 1.0 + v;
      return p;
    }
    case SynthKind::kMorseLike: {
      double s = 0.0;
      for (double v : x) {
        const double m = 1.0 - std::exp(-(v - 0.3));
        s += m * m;
      }
      double c = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) c += (x[i] - 0.3) * (x[j] - 0.3);
      return s + 0.5 * c;
    }
  }
  throw InvalidArgument("synth: unknown kind");
}

Dataset synth(SynthKind kind, int dimension, std::size_t n, std::uint64_t seed, double noise_std) {
  if (dimension < 1) throw InvalidArgument("synth: dimension must be >= 1");
  if (n < 1) throw InvalidArgument("synth: need at least one point");
  if (!(noise_std >= 0.0)) throw InvalidArgument("synth: noise std must be >= 0");
  Xoshiro256 rng(seed);
  Dataset data;
  data.x.resize(static_cast<Eigen::Index>(n), dimension);
  data.t.resize(static_cast<Eigen::Index>(n));
  for (int j = 0; j < dimension; ++j) data.column_names.push_back("x" + std::to_string(j));
  data.target_name = "t";
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (int j = 0; j < dimension; ++j) data.x(r, j) = rng.uniform();
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    data.t[r] = synth_target(kind, std::span<const double>(data.x.row(r).data(), dimension));
    if (noise_std > 0.0) data.t[r] += noise_std * rng.normal();
  }
  return data;
}

}  // namespace hdmr
