#include "rsl/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace rsl {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer; full-avalanche 64-bit mixer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double to_unit(std::uint64_t bits) {
  // 53-bit mantissa -> [0, 1)
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Box-Muller pair addressed by pair index; parity selects cos/sin branch.
double gaussian_at(std::uint64_t key, std::uint64_t index) {
  const std::uint64_t pair = index >> 1;
  const double u1 = 1.0 - to_unit(mix64(key + (2 * pair) * kGolden));  // (0, 1]
  const double u2 = to_unit(mix64(key + (2 * pair + 1) * kGolden));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = kTwoPi * u2;
  return (index & 1) ? r * std::sin(theta) : r * std::cos(theta);
}

}  // namespace

std::uint64_t SeedSpec::key() const {
  std::uint64_t k = mix64(master_seed + kGolden);
  for (std::uint64_t label : stream_labels) {
    k = mix64(k ^ mix64(label + kGolden));
  }
  return k;
}

std::uint64_t RandomStream::bits(std::uint64_t index) const {
  return mix64(key_ + index * kGolden);
}

double RandomStream::uniform(std::uint64_t index) const {
  return to_unit(bits(index));
}

double RandomStream::gaussian(std::uint64_t index) const {
  return gaussian_at(key_, index);
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::size_t BitVec::count() const {
  std::size_t c = 0;
  for (std::uint64_t w : w_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::size_t hamming_distance(const BitVec& a, const BitVec& b) {
  if (a.n_ != b.n_) throw ShapeError("hamming_distance: size mismatch");
  std::size_t c = 0;
  for (std::size_t i = 0; i < a.w_.size(); ++i)
    c += static_cast<std::size_t>(std::popcount(a.w_[i] ^ b.w_[i]));
  return c;
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double variance,
                       const SeedSpec& seed) {
  if (rows == 0 || cols == 0) throw ShapeError("gaussian_matrix: empty shape");
  if (!(variance > 0.0)) throw std::invalid_argument("gaussian_matrix: variance must be positive");
  Matrix m(rows, cols);
  RandomStream rs(seed);
  const double s = std::sqrt(variance);
  double* e = m.data();
  const std::size_t count = rows * cols;
  for (std::size_t i = 0; i < count; ++i) e[i] = s * rs.gaussian(i);
  return m;
}

Vector gaussian_vector(std::size_t dim, double variance, const SeedSpec& seed) {
  if (dim == 0) throw ShapeError("gaussian_vector: empty shape");
  if (!(variance > 0.0)) throw std::invalid_argument("gaussian_vector: variance must be positive");
  Vector v(dim);
  RandomStream rs(seed);
  const double s = std::sqrt(variance);
  for (std::size_t i = 0; i < dim; ++i) v[i] = s * rs.gaussian(i);
  return v;
}

Vector unit_vector(std::size_t dim, const SeedSpec& seed) {
  Vector v = gaussian_vector(dim, 1.0, seed);
  const double n = norm(v);
  if (n == 0.0) {  // astronomically unlikely; fall back to e_0
    v[0] = 1.0;
    return v;
  }
  const double inv = 1.0 / n;
  for (std::size_t i = 0; i < dim; ++i) v[i] *= inv;
  return v;
}

double dot(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) throw ShapeError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(const Vector& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.dim(); ++i) s += v[i] * v[i];
  return s;
}

double norm(const Vector& v) { return std::sqrt(squared_norm(v)); }

Vector operator-(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) throw ShapeError("vector subtraction: dimension mismatch");
  Vector r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vector operator+(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) throw ShapeError("vector addition: dimension mismatch");
  Vector r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vector operator*(double s, const Vector& v) {
  Vector r(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) r[i] = s * v[i];
  return r;
}

Vector matvec(const Matrix& m, const Vector& v) {
  if (m.cols() != v.dim()) throw ShapeError("matvec: dimension mismatch");
  Vector y(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* r = m.row(i);
    double s = 0.0;
    for (std::size_t k = 0; k < m.cols(); ++k) s += r[k] * v[k];
    y[i] = s;
  }
  return y;
}

Vector matvec_transposed(const Matrix& m, const Vector& v) {
  if (m.rows() != v.dim()) throw ShapeError("matvec_transposed: dimension mismatch");
  Vector y(m.cols());
  // k-outer keeps row-major access and ascending-k accumulation per entry.
  for (std::size_t k = 0; k < m.rows(); ++k) {
    const double* r = m.row(k);
    const double vk = v[k];
    for (std::size_t j = 0; j < m.cols(); ++j) y[j] += vk * r[j];
  }
  return y;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul: dimension mismatch");
  Matrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ar = a.row(i);
    double* cr = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = ar[k];
      const double* br = b.row(k);
      for (std::size_t j = 0; j < n; ++j) cr[j] += aik * br[j];
    }
  }
  return c;
}

Matrix matmul_transposed(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("matmul_transposed: dimension mismatch");
  Matrix c(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* ar = a.row(k);
    const double* br = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = ar[i];
      double* cr = c.row(i);
      for (std::size_t j = 0; j < n; ++j) cr[j] += aki * br[j];
    }
  }
  return c;
}

void add_outer(Matrix& m, double alpha, const Vector& u, const Vector& v) {
  if (m.rows() != u.dim() || m.cols() != v.dim())
    throw ShapeError("add_outer: dimension mismatch");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double au = alpha * u[i];
    double* r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) r[j] += au * v[j];
  }
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("matrix subtraction: shape mismatch");
  Matrix c(a.rows(), a.cols());
  const std::size_t count = a.rows() * a.cols();
  for (std::size_t i = 0; i < count; ++i) c.data()[i] = a.data()[i] - b.data()[i];
  return c;
}

Matrix operator*(double s, const Matrix& m) {
  Matrix c(m.rows(), m.cols());
  const std::size_t count = m.rows() * m.cols();
  for (std::size_t i = 0; i < count; ++i) c.data()[i] = s * m.data()[i];
  return c;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  const std::size_t count = m.rows() * m.cols();
  for (std::size_t i = 0; i < count; ++i) s += m.data()[i] * m.data()[i];
  return std::sqrt(s);
}

double frobenius_dot(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("frobenius_dot: shape mismatch");
  double s = 0.0;
  const std::size_t count = a.rows() * a.cols();
  for (std::size_t i = 0; i < count; ++i) s += a.data()[i] * b.data()[i];
  return s;
}

bool all_finite(const Matrix& m) {
  const std::size_t count = m.rows() * m.cols();
  for (std::size_t i = 0; i < count; ++i)
    if (!std::isfinite(m.data()[i])) return false;
  return true;
}

bool all_finite(const Vector& v) {
  for (std::size_t i = 0; i < v.dim(); ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

SpectralResult operator_spectral_norm(const LinearOperator& op, double tol,
                                      std::size_t max_iter) {
  if (op.dim_in == 0 || op.dim_out == 0)
    throw ShapeError("operator_spectral_norm: empty operator");
  // Start vector from a stream keyed by the operator shape only, so the
  // estimate is a pure function of the operator and tolerances.
  SeedSpec start{0x5eedu, {op.dim_out, op.dim_in}};
  Vector v = unit_vector(op.dim_in, start);
  double sigma = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    Vector w = op.apply(v);
    const double wn = norm(w);
    if (wn == 0.0) {
      // v in the kernel; restart once from a shifted stream, else report 0.
      if (it == 1) {
        v = unit_vector(op.dim_in, start.child(1));
        continue;
      }
      return {0.0, true, it};
    }
    Vector z = op.apply_adjoint(w);
    const double zn = norm(z);
    if (zn == 0.0) return {wn, true, it};
    const double inv = 1.0 / zn;
    for (std::size_t i = 0; i < z.dim(); ++i) z[i] *= inv;
    v = std::move(z);
    // v is unit: sigma estimate is ||op v|| from this iterate.
    const double prev = sigma;
    sigma = wn;
    if (it > 1 && std::abs(sigma - prev) <= tol * std::max(sigma, 1e-300))
      return {sigma, true, it};
  }
  return {sigma, false, max_iter};
}

SpectralResult spectral_norm(const Matrix& m, double tol, std::size_t max_iter) {
  if (m.empty()) throw ShapeError("spectral_norm: empty matrix");
  if (frobenius_norm(m) == 0.0) return {0.0, true, 0};
  LinearOperator op{
      m.cols(), m.rows(),
      [&m](const Vector& v) { return matvec(m, v); },
      [&m](const Vector& u) { return matvec_transposed(m, u); }};
  return operator_spectral_norm(op, tol, max_iter);
}

}  // namespace rsl
