#include "rsl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace rsl {

namespace {

double pairwise_min_distance(const std::vector<Vector>& xs) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      best = std::min(best, norm(xs[i] - xs[j]));
  return best;
}

void certify(const Dataset& ds) {
  for (const auto& x : ds.features) {
    if (std::abs(norm(x) - 1.0) > 1e-12)
      throw DatasetError("dataset: feature not unit norm");
  }
  if (ds.n >= 2) {
    const double measured = pairwise_min_distance(ds.features);
    if (!(measured >= ds.delta))
      throw DatasetError("dataset: separation below certified delta");
    if (measured == 0.0) throw DatasetError("dataset: duplicate features");
  }
}

}  // namespace

Dataset gen_separated_dataset(std::size_t n, std::size_t p, std::size_t d,
                              double delta, double target_scale,
                              const SeedSpec& seed) {
  if (n == 0) throw std::invalid_argument("gen_separated_dataset: n must be >= 1");
  if (p == 0 || d == 0) throw ShapeError("gen_separated_dataset: empty dims");

  constexpr std::size_t kBudget = 100000;
  std::vector<Vector> xs;
  xs.reserve(n);
  std::size_t attempts = 0;
  const SeedSpec feature_seed = seed.child(0);
  while (xs.size() < n) {
    if (attempts >= kBudget) {
      const std::size_t total_pairs = n * (n - 1) / 2;
      const std::size_t satisfied = xs.size() * (xs.size() - 1) / 2;
      std::ostringstream msg;
      msg << "gen_separated_dataset: rejection budget exhausted after " << attempts
          << " draws; " << (total_pairs - satisfied) << " of " << total_pairs
          << " pair(s) still unseparated at delta=" << delta;
      throw DatasetError(msg.str());
    }
    Vector cand = unit_vector(p, feature_seed.child(attempts));
    ++attempts;
    bool ok = true;
    for (const auto& x : xs) {
      if (norm(cand - x) < delta) {
        ok = false;
        break;
      }
    }
    if (ok) xs.push_back(std::move(cand));
  }

  Dataset ds;
  ds.n = n;
  ds.input_dim = p;
  ds.output_dim = d;
  ds.features = std::move(xs);
  ds.targets.reserve(n);
  const SeedSpec target_seed = seed.child(1);
  for (std::size_t i = 0; i < n; ++i) {
    Vector y(d);
    if (target_scale > 0.0) {
      y = gaussian_vector(d, target_scale * target_scale, target_seed.child(i));
    }
    ds.targets.push_back(std::move(y));
  }
  ds.delta = n >= 2 ? delta : std::numeric_limits<double>::infinity();
  certify(ds);
  return ds;
}

// ---- IDX ------------------------------------------------------------------

namespace {

std::uint32_t read_be32(std::istream& in, const char* what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error(std::string("idx: truncated ") + what);
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

}  // namespace

RawIdx load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw std::runtime_error("idx: cannot open " + images_path);
  if (read_be32(img, "image magic") != 0x00000803u)
    throw std::runtime_error("idx: image magic mismatch in " + images_path);
  RawIdx raw;
  raw.count = read_be32(img, "image count");
  raw.rows = read_be32(img, "image rows");
  raw.cols = read_be32(img, "image cols");
  raw.pixels.resize(raw.count * raw.rows * raw.cols);
  img.read(reinterpret_cast<char*>(raw.pixels.data()),
           static_cast<std::streamsize>(raw.pixels.size()));
  if (static_cast<std::size_t>(img.gcount()) != raw.pixels.size())
    throw std::runtime_error("idx: truncated image payload in " + images_path);

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw std::runtime_error("idx: cannot open " + labels_path);
  if (read_be32(lab, "label magic") != 0x00000801u)
    throw std::runtime_error("idx: label magic mismatch in " + labels_path);
  const std::size_t label_count = read_be32(lab, "label count");
  if (label_count != raw.count)
    throw std::runtime_error("idx: image/label count mismatch");
  raw.labels.resize(label_count);
  lab.read(reinterpret_cast<char*>(raw.labels.data()),
           static_cast<std::streamsize>(label_count));
  if (static_cast<std::size_t>(lab.gcount()) != label_count)
    throw std::runtime_error("idx: truncated label payload in " + labels_path);
  return raw;
}

Dataset normalize_features(const RawIdx& raw, std::size_t d, std::size_t subset_n,
                           NormalizeInfo* info) {
  const std::size_t n = (subset_n == 0 || subset_n > raw.count) ? raw.count : subset_n;
  if (n == 0) throw std::invalid_argument("normalize_features: empty input");
  const std::size_t p = raw.rows * raw.cols;

  // column statistics over the subset (population variance)
  std::vector<double> mean(p, 0.0), var(p, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t j = 0; j < p; ++j)
      mean[j] += static_cast<double>(raw.pixels[s * p + j]);
  for (std::size_t j = 0; j < p; ++j) mean[j] /= static_cast<double>(n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t j = 0; j < p; ++j) {
      const double c = static_cast<double>(raw.pixels[s * p + j]) - mean[j];
      var[j] += c * c;
    }
  for (std::size_t j = 0; j < p; ++j) var[j] /= static_cast<double>(n);

  std::vector<std::size_t> keep;
  keep.reserve(p);
  for (std::size_t j = 0; j < p; ++j) {
    if (var[j] > 0.0)
      keep.push_back(j);
    else if (info)
      info->dropped_columns.push_back(j);
  }
  if (keep.empty()) throw DatasetError("normalize_features: all feature columns have zero variance");

  Dataset ds;
  ds.n = n;
  ds.input_dim = keep.size();
  ds.output_dim = d;
  ds.features.reserve(n);
  ds.targets.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    Vector x(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
      const std::size_t j = keep[k];
      x[k] = (static_cast<double>(raw.pixels[s * p + j]) - mean[j]) / std::sqrt(var[j]);
    }
    const double nn = norm(x);
    if (nn == 0.0) throw DatasetError("normalize_features: sample standardizes to zero vector");
    const double inv = 1.0 / nn;
    for (std::size_t k = 0; k < x.dim(); ++k) x[k] *= inv;
    ds.features.push_back(std::move(x));

    Vector y(d);
    const std::size_t label = raw.labels[s];
    if (label >= d)
      throw DatasetError("normalize_features: label exceeds output dimension");
    y[label] = 1.0;
    ds.targets.push_back(std::move(y));
  }

  if (n >= 2) {
    ds.delta = pairwise_min_distance(ds.features);
    if (ds.delta == 0.0)
      throw DatasetError("normalize_features: duplicate samples violate separation assumption");
  }
  certify(ds);
  return ds;
}

void Dataset::write_csv(std::ostream& out) const {
  for (std::size_t j = 0; j < input_dim; ++j) out << "x" << j << ",";
  for (std::size_t j = 0; j < output_dim; ++j)
    out << "y" << j << (j + 1 == output_dim ? "" : ",");
  out << "\n";
  out.precision(17);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < input_dim; ++j) out << features[i][j] << ",";
    for (std::size_t j = 0; j < output_dim; ++j)
      out << targets[i][j] << (j + 1 == output_dim ? "" : ",");
    out << "\n";
  }
}

}  // namespace rsl
