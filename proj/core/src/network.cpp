#include "rsl/network.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace rsl {

namespace {

void relu_masked(const Vector& g, Vector& h, BitVec& mask) {
  for (std::size_t i = 0; i < g.dim(); ++i) {
    const bool on = g[i] >= 0.0;
    mask.set(i, on);
    h[i] = on ? g[i] : 0.0;
  }
}

}  // namespace

void NetworkConfig::validate() const {
  if (depth < 2) throw std::invalid_argument("NetworkConfig: depth must be >= 2");
  if (width == 0 || input_dim == 0 || output_dim == 0)
    throw ShapeError("NetworkConfig: all dimensions must be >= 1");
  if (!(tau >= 0.0)) throw std::invalid_argument("NetworkConfig: tau must be >= 0");
}

NetworkParams init_network(const NetworkConfig& config, const SeedSpec& seed) {
  config.validate();
  NetworkParams p;
  p.config = config;
  const double wvar = 2.0 / static_cast<double>(config.width);
  p.input_map = gaussian_matrix(config.width, config.input_dim, wvar,
                                seed.child(seed_labels::kInputMap));
  p.layers.reserve(config.depth);
  for (std::size_t l = 1; l <= config.depth; ++l)
    p.layers.push_back(gaussian_matrix(config.width, config.width, wvar,
                                       seed.child(seed_labels::kLayerBase - 1 + l)));
  p.output_map = gaussian_matrix(config.output_dim, config.width,
                                 2.0 / static_cast<double>(config.output_dim),
                                 seed.child(seed_labels::output_map(config.depth)));
  return p;
}

static ForwardTrace run_forward(const NetworkParams& params, const Vector& x,
                                bool residual) {
  const auto& cfg = params.config;
  if (x.dim() != cfg.input_dim) throw ShapeError("forward: input dimension mismatch");
  const std::size_t L = cfg.depth;
  const std::size_t m = cfg.width;

  ForwardTrace t;
  t.h.assign(L + 1, Vector(m));
  t.g.assign(L + 1, Vector(m));
  t.masks.assign(L + 1, BitVec(m));

  t.g[0] = matvec(params.input_map, x);
  relu_masked(t.g[0], t.h[0], t.masks[0]);

  for (std::size_t l = 1; l <= L; ++l) {
    const Vector wh = matvec(params.layer(l), t.h[l - 1]);
    if (residual && l < L) {
      for (std::size_t i = 0; i < m; ++i) t.g[l][i] = t.h[l - 1][i] + cfg.tau * wh[i];
    } else if (residual) {
      t.g[l] = wh;  // top layer carries no skip term
    } else {
      t.g[l] = wh;
    }
    relu_masked(t.g[l], t.h[l], t.masks[l]);
  }

  t.output = matvec(params.output_map, t.h[L]);
  return t;
}

ForwardTrace forward(const NetworkParams& params, const Vector& x) {
  if (params.config.arch != Arch::resnet)
    throw std::invalid_argument("forward: params are not a resnet");
  return run_forward(params, x, true);
}

ForwardTrace forward_feedforward(const NetworkParams& params, const Vector& x) {
  if (params.config.arch != Arch::feedforward)
    throw std::invalid_argument("forward_feedforward: params are not feedforward");
  return run_forward(params, x, false);
}

BatchTrace forward_batch(const NetworkParams& params, const std::vector<Vector>& xs) {
  const auto& cfg = params.config;
  const std::size_t n = xs.size();
  if (n == 0) throw ShapeError("forward_batch: empty batch");
  for (const auto& x : xs)
    if (x.dim() != cfg.input_dim) throw ShapeError("forward_batch: input dimension mismatch");
  const std::size_t L = cfg.depth;
  const std::size_t m = cfg.width;
  const bool residual = cfg.arch == Arch::resnet;

  Matrix X(cfg.input_dim, n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t i = 0; i < cfg.input_dim; ++i) X(i, s) = xs[s][i];

  BatchTrace t;
  t.h.assign(L + 1, Matrix(m, n));
  t.g.assign(L + 1, Matrix(m, n));
  t.masks.assign(L + 1, std::vector<BitVec>(n, BitVec(m)));

  auto relu_layer = [&](std::size_t l) {
    const Matrix& g = t.g[l];
    Matrix& h = t.h[l];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t s = 0; s < n; ++s) {
        const double v = g(i, s);
        const bool on = v >= 0.0;
        t.masks[l][s].set(i, on);
        h(i, s) = on ? v : 0.0;
      }
  };

  t.g[0] = matmul(params.input_map, X);
  relu_layer(0);

  for (std::size_t l = 1; l <= L; ++l) {
    Matrix wh = matmul(params.layer(l), t.h[l - 1]);
    if (residual && l < L) {
      Matrix& g = t.g[l];
      const Matrix& hp = t.h[l - 1];
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t s = 0; s < n; ++s) g(i, s) = hp(i, s) + cfg.tau * wh(i, s);
    } else {
      t.g[l] = std::move(wh);
    }
    relu_layer(l);
  }

  t.outputs = matmul(params.output_map, t.h[L]);
  return t;
}

ForwardTrace BatchTrace::sample(std::size_t s) const {
  ForwardTrace t;
  const std::size_t layers = h.size();
  t.h.assign(layers, Vector(h[0].rows()));
  t.g.assign(layers, Vector(h[0].rows()));
  t.masks.assign(layers, BitVec(h[0].rows()));
  for (std::size_t l = 0; l < layers; ++l) {
    for (std::size_t i = 0; i < h[l].rows(); ++i) {
      t.h[l][i] = h[l](i, s);
      t.g[l][i] = g[l](i, s);
    }
    t.masks[l] = masks[l][s];
  }
  t.output = Vector(outputs.rows());
  for (std::size_t i = 0; i < outputs.rows(); ++i) t.output[i] = outputs(i, s);
  return t;
}

std::vector<BitVec> extract_masks(const ForwardTrace& trace, std::size_t first,
                                  std::size_t last) {
  if (first > last) return {};
  if (last >= trace.masks.size()) throw std::out_of_range("extract_masks: layer out of range");
  return {trace.masks.begin() + static_cast<std::ptrdiff_t>(first),
          trace.masks.begin() + static_cast<std::ptrdiff_t>(last) + 1};
}

// ---- snapshot io ----------------------------------------------------------

namespace {

constexpr char kMagic[5] = {'R', 'S', 'L', 'B', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("snapshot: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_doubles(std::ostream& out, const double* p, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i)
    put_u64(out, std::bit_cast<std::uint64_t>(p[i]));
}

void get_doubles(std::istream& in, double* p, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error("snapshot: truncated payload");
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    p[i] = std::bit_cast<double>(v);
  }
}

}  // namespace

void save_snapshot(const NetworkParams& params, std::ostream& out) {
  const auto& c = params.config;
  out.write(kMagic, sizeof(kMagic));
  put_u64(out, c.depth);
  put_u64(out, c.width);
  put_u64(out, c.input_dim);
  put_u64(out, c.output_dim);
  put_u64(out, std::bit_cast<std::uint64_t>(c.tau));
  put_doubles(out, params.input_map.data(), c.width * c.input_dim);
  for (const auto& w : params.layers) put_doubles(out, w.data(), c.width * c.width);
  put_doubles(out, params.output_map.data(), c.output_dim * c.width);
  if (!out) throw std::runtime_error("snapshot: write failed");
}

NetworkParams load_snapshot(std::istream& in) {
  char magic[5];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("snapshot: bad magic");
  NetworkParams p;
  p.config.depth = get_u64(in);
  p.config.width = get_u64(in);
  p.config.input_dim = get_u64(in);
  p.config.output_dim = get_u64(in);
  p.config.tau = std::bit_cast<double>(get_u64(in));
  p.config.validate();
  p.input_map = Matrix(p.config.width, p.config.input_dim);
  get_doubles(in, p.input_map.data(), p.config.width * p.config.input_dim);
  p.layers.assign(p.config.depth, Matrix(p.config.width, p.config.width));
  for (auto& w : p.layers) get_doubles(in, w.data(), p.config.width * p.config.width);
  p.output_map = Matrix(p.config.output_dim, p.config.width);
  get_doubles(in, p.output_map.data(), p.config.output_dim * p.config.width);
  return p;
}

void save_snapshot_file(const NetworkParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("snapshot: cannot open " + path);
  save_snapshot(params, out);
}

NetworkParams load_snapshot_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("snapshot: cannot open " + path);
  return load_snapshot(in);
}

}  // namespace rsl
