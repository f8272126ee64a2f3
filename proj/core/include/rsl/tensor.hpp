#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace rsl {

/// Identifies one reproducible random stream. Identical (master_seed,
/// stream_labels) always yields the identical stream, independent of
/// evaluation order or threading.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> stream_labels;

  /// New spec with one more label appended.
  SeedSpec child(std::uint64_t label) const {
    SeedSpec s = *this;
    s.stream_labels.push_back(label);
    return s;
  }

  /// 64-bit mixing of master seed and labels.
  std::uint64_t key() const;

  bool operator==(const SeedSpec&) const = default;
};

/// Counter-based random stream: entry i is a pure function of (key, i).
class RandomStream {
 public:
  explicit RandomStream(const SeedSpec& seed) : key_(seed.key()) {}

  /// Uniform in [0, 1).
  double uniform(std::uint64_t index) const;
  /// Standard normal, Box-Muller over counter pairs.
  double gaussian(std::uint64_t index) const;
  std::uint64_t bits(std::uint64_t index) const;

 private:
  std::uint64_t key_;
};

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim) : e_(dim, 0.0) {}
  Vector(std::initializer_list<double> init) : e_(init) {}

  std::size_t dim() const { return e_.size(); }
  double& operator[](std::size_t i) { return e_[i]; }
  double operator[](std::size_t i) const { return e_[i]; }
  double* data() { return e_.data(); }
  const double* data() const { return e_.data(); }

  bool operator==(const Vector&) const = default;

 private:
  std::vector<double> e_;
};

/// Dense row-major matrix of 64-bit floats.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), e_(rows * cols, 0.0) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return e_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }
  double* data() { return e_.data(); }
  const double* data() const { return e_.data(); }
  double* row(std::size_t i) { return e_.data() + i * cols_; }
  const double* row(std::size_t i) const { return e_.data() + i * cols_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> e_;
};

/// Packed 0/1 diagonal sign mask.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  void set(std::size_t i, bool v) {
    const std::uint64_t bit = std::uint64_t{1} << (i % 64);
    if (v)
      w_[i / 64] |= bit;
    else
      w_[i / 64] &= ~bit;
  }
  bool test(std::size_t i) const { return (w_[i / 64] >> (i % 64)) & 1; }
  std::size_t count() const;

  bool operator==(const BitVec&) const = default;

  friend std::size_t hamming_distance(const BitVec& a, const BitVec& b);

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

/// Number of positions where the two masks differ (|D ⊕ D'|₀).
std::size_t hamming_distance(const BitVec& a, const BitVec& b);

// ---- sampling ----------------------------------------------------------

/// Entries i.i.d. N(0, variance), entry (i,j) addressed by counter i*cols+j.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double variance,
                       const SeedSpec& seed);
Vector gaussian_vector(std::size_t dim, double variance, const SeedSpec& seed);
/// Gaussian direction normalized to unit Euclidean norm.
Vector unit_vector(std::size_t dim, const SeedSpec& seed);

// ---- vector/matrix arithmetic ------------------------------------------
// All accumulations run in ascending index order; results are bit-stable
// across runs and thread counts.

double dot(const Vector& a, const Vector& b);
double norm(const Vector& v);
double squared_norm(const Vector& v);
Vector operator-(const Vector& a, const Vector& b);
Vector operator+(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& v);

/// y = M v.
Vector matvec(const Matrix& m, const Vector& v);
/// y = Mᵀ v.
Vector matvec_transposed(const Matrix& m, const Vector& v);
/// C = A B. Inner accumulation over k ascending, so column j equals
/// matvec(A, column j of B) bit for bit.
Matrix matmul(const Matrix& a, const Matrix& b);
/// C = Aᵀ B, same ordering guarantee.
Matrix matmul_transposed(const Matrix& a, const Matrix& b);
/// M += alpha * u vᵀ.
void add_outer(Matrix& m, double alpha, const Vector& u, const Vector& v);

Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& m);

double frobenius_norm(const Matrix& m);
/// Frobenius inner product Σ_ij A_ij B_ij.
double frobenius_dot(const Matrix& a, const Matrix& b);
bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);

// ---- spectral norm ------------------------------------------------------

struct SpectralResult {
  double value = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Largest singular value by power iteration on MᵀM. Zero matrix returns 0
/// immediately. Non-convergence within max_iter is flagged, never thrown.
SpectralResult spectral_norm(const Matrix& m, double tol = 1e-8,
                             std::size_t max_iter = 1000);

/// Linear operator given by matching apply/apply_adjoint callbacks; lets the
/// chained-product checks run power iteration without materializing products.
struct LinearOperator {
  std::size_t dim_in = 0;
  std::size_t dim_out = 0;
  std::function<Vector(const Vector&)> apply;
  std::function<Vector(const Vector&)> apply_adjoint;
};

SpectralResult operator_spectral_norm(const LinearOperator& op, double tol = 1e-8,
                                      std::size_t max_iter = 1000);

// ---- errors -------------------------------------------------------------

/// Thrown on shape/contract violations (empty shapes, dimension mismatch).
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace rsl
