#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bshift {

/// One sparse row: (1-based feature index, value), indices strictly increasing.
using SparseRow = std::vector<std::pair<std::size_t, double>>;

enum class Task { kClassification, kRegression };

struct Dataset {
  std::vector<SparseRow> rows;
  std::vector<double> labels;
  std::size_t d = 0;
  bool preprocessed = false;

  std::size_t n() const { return rows.size(); }

  /// Dense n x d matrix, row i holding a_i.
  Eigen::MatrixXd dense() const;
};

/// Parses LIBSVM text. Blank lines and '#' comments are skipped; labels that
/// are all in {0, 1} are remapped to {-1, +1}.
Dataset parse_libsvm(std::istream& in);
Dataset parse_libsvm_file(const std::string& path);

/// Writes LIBSVM text with 17 significant digits, one row per line.
void write_libsvm(std::ostream& out, const Dataset& ds);

/// Appends a bias coordinate equal to 1, then scales each row to unit norm.
Dataset preprocess(const Dataset& ds);

/// Seeded Gaussian rows (then preprocessed). Classification labels are the
/// sign of a planted predictor with 10% flips; regression labels are the
/// same +-1 signs, matching binary ridge regression.
Dataset synth_dataset(std::uint64_t seed, std::size_t n, std::size_t d, Task task);

/// Planted predictor and pre-flip labels used by synth_dataset, exposed so
/// tests can recompute the labelling independently.
struct PlantedModel {
  Eigen::VectorXd weights;
  std::vector<double> clean_labels;
  std::vector<bool> flipped;
};
PlantedModel synth_planted_model(std::uint64_t seed, std::size_t n, std::size_t d);

}  // namespace bshift
