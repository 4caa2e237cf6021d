#include "bshift/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "bshift/error.hpp"
#include "bshift/rng.hpp"

namespace bshift {

Eigen::MatrixXd Dataset::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& [idx, val] : rows[i])
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(idx - 1)) = val;
  return m;
}

namespace {

double parse_double(std::string_view token, std::size_t line_no) {
  // strtod accepts a leading '+', which LIBSVM labels commonly carry.
  std::string buf(token);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(v))
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": bad number '" + buf + "'");
  return v;
}

std::size_t parse_index(std::string_view token, std::size_t line_no) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || v == 0)
    throw Error(ErrorCode::kParse,
                "line " + std::to_string(line_no) + ": bad index '" + std::string(token) + "'");
  return v;
}

}  // namespace

Dataset parse_libsvm(std::istream& in) {
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string label_tok;
    if (!(tokens >> label_tok)) continue;

    const double label = parse_double(label_tok, line_no);
    SparseRow row;
    std::string tok;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected idx:val, got '" + tok + "'");
      const std::size_t idx = parse_index(std::string_view(tok).substr(0, colon), line_no);
      const double val = parse_double(std::string_view(tok).substr(colon + 1), line_no);
      if (!row.empty() && idx <= row.back().first)
        throw Error(ErrorCode::kFormat, "line " + std::to_string(line_no) + ": indices must be strictly increasing");
      row.emplace_back(idx, val);
      ds.d = std::max(ds.d, idx);
    }
    ds.rows.push_back(std::move(row));
    ds.labels.push_back(label);
  }

  bool zero_one = !ds.labels.empty();
  for (double y : ds.labels) zero_one = zero_one && (y == 0.0 || y == 1.0);
  if (zero_one)
    for (double& y : ds.labels) y = (y == 0.0) ? -1.0 : 1.0;
  return ds;
}

Dataset parse_libsvm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return parse_libsvm(in);
}

void write_libsvm(std::ostream& out, const Dataset& ds) {
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    out << ds.labels[i];
    for (const auto& [idx, val] : ds.rows[i]) out << ' ' << idx << ':' << val;
    out << '\n';
  }
  out.precision(old_precision);
}

Dataset preprocess(const Dataset& ds) {
  if (ds.preprocessed) throw Error(ErrorCode::kInvalidArgument, "dataset is already preprocessed");
  if (ds.n() == 0) throw Error(ErrorCode::kInvalidArgument, "cannot preprocess an empty dataset");

  Dataset out;
  out.d = ds.d + 1;
  out.labels = ds.labels;
  out.preprocessed = true;
  out.rows.reserve(ds.n());
  for (const SparseRow& row : ds.rows) {
    SparseRow r = row;
    r.emplace_back(out.d, 1.0);
    double sq = 0.0;
    for (const auto& e : r) sq += e.second * e.second;
    const double norm = std::sqrt(sq);
    for (auto& e : r) e.second /= norm;
    out.rows.push_back(std::move(r));
  }
  return out;
}

namespace {

Eigen::MatrixXd gaussian_rows(std::uint64_t seed, std::size_t n, std::size_t d) {
  Rng rng(seed, Stream::kSyntheticRows);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
  return a;
}

}  // namespace

PlantedModel synth_planted_model(std::uint64_t seed, std::size_t n, std::size_t d) {
  if (n == 0 || d == 0) throw Error(ErrorCode::kInvalidArgument, "synthetic dataset needs n >= 1 and d >= 1");
  const Eigen::MatrixXd a = gaussian_rows(seed, n, d);
  Rng rng(seed, Stream::kSyntheticLabels);
  PlantedModel model;
  model.weights.resize(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < model.weights.size(); ++j) model.weights(j) = rng.normal();
  const Eigen::VectorXd margins = a * model.weights;
  model.clean_labels.resize(n);
  model.flipped.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    model.clean_labels[i] = margins(static_cast<Eigen::Index>(i)) >= 0.0 ? 1.0 : -1.0;
    model.flipped[i] = rng.uniform01() < 0.1;
  }
  return model;
}

Dataset synth_dataset(std::uint64_t seed, std::size_t n, std::size_t d, Task /*task*/) {
  // Both tasks share the +-1 labelling; ridge regression in the experiments
  // is fit to binary targets.
  const PlantedModel model = synth_planted_model(seed, n, d);
  const Eigen::MatrixXd a = gaussian_rows(seed, n, d);

  Dataset raw;
  raw.d = d;
  raw.rows.resize(n);
  raw.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    SparseRow& row = raw.rows[i];
    row.reserve(d);
    for (std::size_t j = 0; j < d; ++j)
      row.emplace_back(j + 1, a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    raw.labels[i] = model.flipped[i] ? -model.clean_labels[i] : model.clean_labels[i];
  }
  return preprocess(raw);
}

}  // namespace bshift
