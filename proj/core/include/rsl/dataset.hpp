#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "rsl/tensor.hpp"

namespace rsl {

/// n regression pairs with unit-norm, delta-separated features. Construction
/// goes through the factories below, which certify the separation invariant
/// exhaustively; a Dataset never violates it.
struct Dataset {
  std::size_t n = 0;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::vector<Vector> features;
  std::vector<Vector> targets;
  /// Certified minimum pairwise feature distance; +inf when n == 1.
  double delta = std::numeric_limits<double>::infinity();

  void write_csv(std::ostream& out) const;
};

/// Thrown when rejection sampling cannot place delta-separated points or a
/// constructed dataset would violate the separation assumption.
struct DatasetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unit-sphere features resampled until pairwise separation >= delta holds,
/// Gaussian targets of the given scale. Rejection budget of 1e5 candidate
/// draws; exhaustion raises DatasetError naming the offending pair count.
Dataset gen_separated_dataset(std::size_t n, std::size_t p, std::size_t d,
                              double delta, double target_scale,
                              const SeedSpec& seed);

/// Raw IDX pair as stored on disk (big-endian headers already decoded).
struct RawIdx {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count*rows*cols, row-major per image
  std::vector<std::uint8_t> labels;  // count
};

/// Reads an IDX image/label pair (magic 0x00000803 / 0x00000801). Throws
/// std::runtime_error on magic mismatch, truncation, or count mismatch.
RawIdx load_idx(const std::string& images_path, const std::string& labels_path);

struct NormalizeInfo {
  std::vector<std::size_t> dropped_columns;  // zero-variance features
};

/// Per-feature standardization over the (sub)set, zero-variance columns
/// dropped, then per-sample rescaling to unit norm. Targets are one-hot of
/// dimension d. subset_n == 0 keeps every sample. delta is the measured
/// minimum pairwise distance; duplicates are rejected.
Dataset normalize_features(const RawIdx& raw, std::size_t d,
                           std::size_t subset_n = 0, NormalizeInfo* info = nullptr);

}  // namespace rsl
