#include "core/data.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace rpnb {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_cell(const std::string& cell, double& out) {
  std::size_t begin = 0;
  std::size_t end = cell.size();
  while (begin < end && (cell[begin] == ' ' || cell[begin] == '\t')) ++begin;
  while (end > begin && (cell[end - 1] == ' ' || cell[end - 1] == '\t')) --end;
  if (begin == end) return false;
  const char* first = cell.data() + begin;
  const char* last = cell.data() + end;
  // std::from_chars accepts a leading '-' but not '+'.
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string dataset_name_from_path(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

Dataset parse_csv(std::istream& in, const std::string& origin, bool has_header) {
  Dataset ds;
  std::vector<double> values;
  std::unordered_map<std::string, int> label_index;

  std::string line;
  std::size_t line_no = 0;
  std::size_t n_cols = 0;
  bool header_pending = has_header;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const std::vector<std::string> cells = split_line(line);
    if (n_cols == 0) {
      n_cols = cells.size();
      if (n_cols < 2)
        fail(Status::ParseError,
             origin + ": row " + std::to_string(line_no) + " needs at least one feature column");
    } else if (cells.size() != n_cols) {
      fail(Status::ParseError, origin + ": row " + std::to_string(line_no) + " has " +
                                   std::to_string(cells.size()) + " cells, expected " +
                                   std::to_string(n_cols));
    }
    for (std::size_t c = 0; c + 1 < n_cols; ++c) {
      double v = 0.0;
      if (!parse_cell(cells[c], v))
        fail(Status::ParseError, origin + ": row " + std::to_string(line_no) + ", column " +
                                     std::to_string(c + 1) + ": not a finite number: '" +
                                     cells[c] + "'");
      values.push_back(v);
    }
    const std::string& label = cells.back();
    auto it = label_index.find(label);
    if (it == label_index.end()) {
      it = label_index.emplace(label, static_cast<int>(ds.label_names.size())).first;
      ds.label_names.push_back(label);
    }
    ds.y.push_back(it->second);
  }

  if (ds.y.empty()) fail(Status::InvalidDataset, origin + ": no data rows");
  if (ds.label_names.size() < 2)
    fail(Status::InvalidDataset, origin + ": only one class present");

  ds.num_classes = ds.label_names.size();
  ds.X.rows = ds.y.size();
  ds.X.cols = n_cols - 1;
  ds.X.data = std::move(values);
  return ds;
}

}  // namespace

Dataset load_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) fail(Status::IoError, "cannot open '" + path + "'");
  Dataset ds = parse_csv(in, path, has_header);
  ds.name = dataset_name_from_path(path);
  return ds;
}

Dataset load_csv_auto(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Status::IoError, "cannot open '" + path + "'");
  bool has_header = false;
  std::string first;
  while (std::getline(in, first)) {
    if (!first.empty() && first.back() == '\r') first.pop_back();
    if (first.empty()) continue;
    const std::vector<std::string> cells = split_line(first);
    double v = 0.0;
    for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
      if (!parse_cell(cells[c], v)) {
        has_header = true;
        break;
      }
    }
    break;
  }
  return load_csv(path, has_header);
}

void save_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // '\n' line endings everywhere
  if (!out) fail(Status::IoError, "cannot open '" + path + "' for writing");
  std::string line;
  for (std::size_t r = 0; r < dataset.n(); ++r) {
    line.clear();
    for (std::size_t c = 0; c < dataset.p(); ++c) {
      line += format_double(dataset.X.at(r, c));
      line += ',';
    }
    line += dataset.label_names[static_cast<std::size_t>(dataset.y[r])];
    line += '\n';
    out << line;
  }
  out.flush();
  if (!out) fail(Status::IoError, "write failed for '" + path + "'");
}

Dataset generate_gm(std::uint64_t seed) {
  constexpr std::size_t kDim = 1000;
  constexpr std::size_t kSizes[3] = {334, 333, 333};
  constexpr double kMeans[3] = {0.5, 0.0, -0.5};
  constexpr double kStds[3] = {1.0, 2.0, 3.0};

  Dataset ds;
  ds.name = "gm";
  ds.num_classes = 3;
  ds.label_names = {"0", "1", "2"};
  ds.X = Matrix(kSizes[0] + kSizes[1] + kSizes[2], kDim);
  ds.y.reserve(ds.X.rows);

  Rng rng(seed);
  std::size_t row = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < kSizes[c]; ++i, ++row) {
      std::span<double> x = ds.X.row(row);
      for (std::size_t j = 0; j < kDim; ++j) x[j] = kMeans[c] + kStds[c] * rng.normal();
      ds.y.push_back(static_cast<int>(c));
    }
  }
  return ds;
}

std::size_t down_dim(std::size_t p) {
  if (p == 0) fail(Status::InvalidArgument, "dimension must be positive");
  if (p < 5) return p;
  // Smallest q with 2^q >= p^2, i.e. ceil(2*log2(p)) without float rounding.
  const unsigned __int128 target = static_cast<unsigned __int128>(p) * p;
  std::size_t q = 0;
  unsigned __int128 pow = 1;
  while (pow < target) {
    pow <<= 1;
    ++q;
  }
  return q;
}

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
  if (n == 0) fail(Status::InvalidArgument, "permutation length must be positive");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

}  // namespace rpnb
