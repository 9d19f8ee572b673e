#ifndef DEFSTACK_LINALG_HPP
#define DEFSTACK_LINALG_HPP

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "defstack/field.hpp"

namespace defstack {

using Vec = std::vector<Rat>;

struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<Rat> a;  // row-major

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, Rat(0)) {}

  Rat& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const Rat& at(int i, int j) const {
    return a[static_cast<size_t>(i) * cols + j];
  }

  static Mat identity(int n);
  static Mat from_rows(const std::vector<Vec>& rows, int cols);
  static Mat from_cols(const std::vector<Vec>& cols, int rows);
  Vec row(int i) const;
  Vec col(int j) const;
  bool operator==(const Mat& o) const {
    return rows == o.rows && cols == o.cols && a == o.a;
  }
};

namespace linalg {

Vec vec_add(const Field& F, const Vec& x, const Vec& y);
Vec vec_sub(const Field& F, const Vec& x, const Vec& y);
Vec vec_scale(const Field& F, const Rat& c, const Vec& x);
bool vec_is_zero(const Vec& x);
Vec zero_vec(int n);
Vec unit_vec(int n, int i);

Mat mul(const Field& F, const Mat& A, const Mat& B);
Vec apply(const Field& F, const Mat& A, const Vec& x);
Mat add(const Field& F, const Mat& A, const Mat& B);
Mat sub(const Field& F, const Mat& A, const Mat& B);
Mat scale(const Field& F, const Rat& c, const Mat& A);
Mat transpose(const Mat& A);
Mat hstack(const Mat& A, const Mat& B);
Mat vstack(const Mat& A, const Mat& B);

// Reduced row echelon form in place; returns rank, records pivot columns.
int rref(const Field& F, Mat& A, std::vector<int>* pivot_cols = nullptr);
int rank(const Field& F, Mat A);
// Basis of {x : Ax = 0}, as columns.
Mat nullspace(const Field& F, const Mat& A);
// One solution of Ax = b, if any.
std::optional<Vec> solve(const Field& F, const Mat& A, const Vec& b);
std::optional<Mat> inverse(const Field& F, const Mat& A);

// Row-space membership oracle with incremental insertion (reduced echelon).
class Subspace {
 public:
  Subspace(const Field& F, int n) : F_(F), n_(n) {}
  // Returns true if v enlarged the span.
  bool insert(Vec v);
  bool contains(Vec v) const;
  int dim() const { return static_cast<int>(rows_.size()); }
  int ambient() const { return n_; }
  const std::vector<Vec>& basis() const { return rows_; }
  // Coordinates of v in the echelon basis, if v lies in the span.
  std::optional<Vec> coordinates(Vec v) const;
  // Pivot column of each basis row.
  const std::vector<int>& pivots() const { return pivots_; }

 private:
  Field F_;
  int n_;
  std::vector<Vec> rows_;
  std::vector<int> pivots_;
};

// Span with expression tracking: writes inserted generators' coefficients.
class SpanSolver {
 public:
  SpanSolver(const Field& F, int n) : F_(F), n_(n) {}
  void add_generator(const Vec& v);
  int dim() const;
  // Expresses v as a combination of the generators, if possible; returns
  // coefficients indexed by insertion order.
  std::optional<Vec> express(const Vec& v) const;

 private:
  Field F_;
  int n_;
  int gens_ = 0;
  // rows of [v | coeffs]
  std::vector<Vec> rows_;
  std::vector<int> pivots_;
};

// Sparse vectors (sorted by index) for cochain-scale elimination.
struct SparseVec {
  std::vector<std::pair<int, Rat>> nz;
  bool empty() const { return nz.empty(); }
  int lead() const { return nz.front().first; }
};

SparseVec sparse_from_dense(const Vec& v);
Vec sparse_to_dense(const SparseVec& v, int n);
SparseVec sparse_axpy(const Field& F, const Rat& c, const SparseVec& x,
                      const SparseVec& y);  // c*x + y

class SparseEchelon {
 public:
  explicit SparseEchelon(const Field& F) : F_(F) {}
  bool insert(SparseVec v);          // true if rank grew
  SparseVec reduce(SparseVec v) const;
  bool contains(const SparseVec& v) const { return reduce(v).empty(); }
  int rank() const { return static_cast<int>(rows_.size()); }
  const std::map<int, SparseVec>& rows() const { return rows_; }

 private:
  Field F_;
  std::map<int, SparseVec> rows_;  // lead index -> row (lead coeff 1)
};

// Kernel basis of the linear map with the given constraint rows acting on
// k^n (each row is one linear functional). Sparse output.
std::vector<SparseVec> sparse_kernel(const Field& F,
                                     const std::vector<SparseVec>& constraints,
                                     int n);

}  // namespace linalg
}  // namespace defstack

#endif
