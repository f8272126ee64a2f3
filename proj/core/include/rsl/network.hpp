#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsl/tensor.hpp"

namespace rsl {

enum class Arch { resnet, feedforward };

struct NetworkConfig {
  std::size_t depth = 2;      // L
  std::size_t width = 1;      // m
  std::size_t input_dim = 1;  // p
  std::size_t output_dim = 1; // d
  double tau = 0.0;
  Arch arch = Arch::resnet;

  /// Throws ShapeError / invalid_argument on L < 2, zero dims, tau < 0.
  void validate() const;
};

/// A (m×p), W_1..W_L (m×m), B (d×m). Immutable by convention after init;
/// training replaces the W list only.
struct NetworkParams {
  NetworkConfig config;
  Matrix input_map;            // A
  std::vector<Matrix> layers;  // W_1..W_L, index l-1
  Matrix output_map;           // B

  const Matrix& layer(std::size_t l) const { return layers[l - 1]; }
  Matrix& layer(std::size_t l) { return layers[l - 1]; }
};

/// Full per-layer state of one forward pass: h_0..h_L, g_0..g_L, sign masks
/// D_0..D_L, and the output y = B h_L.
struct ForwardTrace {
  std::vector<Vector> h;
  std::vector<Vector> g;
  std::vector<BitVec> masks;
  Vector output;

  std::size_t depth() const { return h.empty() ? 0 : h.size() - 1; }
};

/// Layer-synchronous traces for a batch; column s of every matrix equals the
/// per-sample trace of input s, bit for bit.
struct BatchTrace {
  std::vector<Matrix> h;          // (L+1) of m×n
  std::vector<Matrix> g;
  std::vector<std::vector<BitVec>> masks;  // [layer][sample]
  Matrix outputs;                 // d×n

  ForwardTrace sample(std::size_t s) const;
  std::size_t batch_size() const { return outputs.cols(); }
};

/// Stream labels used for the per-matrix draws inside init_network.
namespace seed_labels {
inline constexpr std::uint64_t kInputMap = 0;    // A
inline constexpr std::uint64_t kLayerBase = 1;   // W_l gets label l
inline std::uint64_t output_map(std::size_t depth) { return depth + 1; }  // B
}  // namespace seed_labels

/// A and W_l entrywise N(0, 2/m), B entrywise N(0, 2/d); every matrix drawn
/// from its own stream labeled by its position.
NetworkParams init_network(const NetworkConfig& config, const SeedSpec& seed);

/// g_0 = Ax, g_l = (I + tau W_l) h_{l-1} for l < L, g_L = W_L h_{L-1},
/// h_l = relu(g_l), y = B h_L.
ForwardTrace forward(const NetworkParams& params, const Vector& x);

/// Feedforward baseline: g_l = W_l h_{l-1} for every l >= 1.
ForwardTrace forward_feedforward(const NetworkParams& params, const Vector& x);

/// Batched evaluation of the architecture selected by params.config.arch.
BatchTrace forward_batch(const NetworkParams& params, const std::vector<Vector>& xs);

/// Copies of D_l for l in [first, last], inclusive. Throws on out-of-range.
std::vector<BitVec> extract_masks(const ForwardTrace& trace, std::size_t first,
                                  std::size_t last);

// ---- snapshot serialization ----------------------------------------------
// Flat binary container: magic "RSLB1", then L, m, p, d as 64-bit
// little-endian unsigned, tau as 64-bit float, then row-major f64 payloads
// in order A, W_1..W_L, B.

void save_snapshot(const NetworkParams& params, std::ostream& out);
NetworkParams load_snapshot(std::istream& in);
void save_snapshot_file(const NetworkParams& params, const std::string& path);
NetworkParams load_snapshot_file(const std::string& path);

}  // namespace rsl
