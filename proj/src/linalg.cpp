#include "defstack/linalg.hpp"

#include <algorithm>

namespace defstack {

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = Rat(1);
  return m;
}

Mat Mat::from_rows(const std::vector<Vec>& rows, int cols) {
  Mat m(static_cast<int>(rows.size()), cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < cols; ++j) m.at(i, j) = rows[i][j];
  return m;
}

Mat Mat::from_cols(const std::vector<Vec>& cols, int rows) {
  Mat m(rows, static_cast<int>(cols.size()));
  for (int j = 0; j < m.cols; ++j)
    for (int i = 0; i < rows; ++i) m.at(i, j) = cols[j][i];
  return m;
}

Vec Mat::row(int i) const {
  Vec v(cols);
  for (int j = 0; j < cols; ++j) v[j] = at(i, j);
  return v;
}

Vec Mat::col(int j) const {
  Vec v(rows);
  for (int i = 0; i < rows; ++i) v[i] = at(i, j);
  return v;
}

namespace linalg {

Vec vec_add(const Field& F, const Vec& x, const Vec& y) {
  Vec z(x.size());
  for (size_t i = 0; i < x.size(); ++i) z[i] = F.add(x[i], y[i]);
  return z;
}

Vec vec_sub(const Field& F, const Vec& x, const Vec& y) {
  Vec z(x.size());
  for (size_t i = 0; i < x.size(); ++i) z[i] = F.sub(x[i], y[i]);
  return z;
}

Vec vec_scale(const Field& F, const Rat& c, const Vec& x) {
  Vec z(x.size());
  for (size_t i = 0; i < x.size(); ++i) z[i] = F.mul(c, x[i]);
  return z;
}

bool vec_is_zero(const Vec& x) {
  for (const auto& v : x)
    if (!v.is_zero()) return false;
  return true;
}

Vec zero_vec(int n) { return Vec(static_cast<size_t>(n), Rat(0)); }

Vec unit_vec(int n, int i) {
  Vec v = zero_vec(n);
  v[static_cast<size_t>(i)] = Rat(1);
  return v;
}

Mat mul(const Field& F, const Mat& A, const Mat& B) {
  Mat C(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      const Rat& aik = A.at(i, k);
      if (aik.is_zero()) continue;
      for (int j = 0; j < B.cols; ++j) {
        const Rat& bkj = B.at(k, j);
        if (bkj.is_zero()) continue;
        C.at(i, j) = F.add(C.at(i, j), F.mul(aik, bkj));
      }
    }
  return C;
}

Vec apply(const Field& F, const Mat& A, const Vec& x) {
  Vec y(static_cast<size_t>(A.rows), Rat(0));
  for (int i = 0; i < A.rows; ++i) {
    Rat s(0);
    for (int j = 0; j < A.cols; ++j) {
      const Rat& aij = A.at(i, j);
      if (aij.is_zero() || x[j].is_zero()) continue;
      s = F.add(s, F.mul(aij, x[j]));
    }
    y[i] = s;
  }
  return y;
}

Mat add(const Field& F, const Mat& A, const Mat& B) {
  Mat C(A.rows, A.cols);
  for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = F.add(A.a[i], B.a[i]);
  return C;
}

Mat sub(const Field& F, const Mat& A, const Mat& B) {
  Mat C(A.rows, A.cols);
  for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = F.sub(A.a[i], B.a[i]);
  return C;
}

Mat scale(const Field& F, const Rat& c, const Mat& A) {
  Mat C(A.rows, A.cols);
  for (size_t i = 0; i < A.a.size(); ++i) C.a[i] = F.mul(c, A.a[i]);
  return C;
}

Mat transpose(const Mat& A) {
  Mat C(A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) C.at(j, i) = A.at(i, j);
  return C;
}

Mat hstack(const Mat& A, const Mat& B) {
  Mat C(A.rows, A.cols + B.cols);
  for (int i = 0; i < A.rows; ++i) {
    for (int j = 0; j < A.cols; ++j) C.at(i, j) = A.at(i, j);
    for (int j = 0; j < B.cols; ++j) C.at(i, A.cols + j) = B.at(i, j);
  }
  return C;
}

Mat vstack(const Mat& A, const Mat& B) {
  Mat C(A.rows + B.rows, A.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) C.at(i, j) = A.at(i, j);
  for (int i = 0; i < B.rows; ++i)
    for (int j = 0; j < A.cols; ++j) C.at(A.rows + i, j) = B.at(i, j);
  return C;
}

int rref(const Field& F, Mat& A, std::vector<int>* pivot_cols) {
  int rank = 0;
  if (pivot_cols) pivot_cols->clear();
  for (int col = 0; col < A.cols && rank < A.rows; ++col) {
    int piv = -1;
    for (int i = rank; i < A.rows; ++i)
      if (!A.at(i, col).is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != rank)
      for (int j = 0; j < A.cols; ++j) std::swap(A.at(piv, j), A.at(rank, j));
    Rat inv = F.inv(A.at(rank, col));
    for (int j = col; j < A.cols; ++j)
      A.at(rank, j) = F.mul(inv, A.at(rank, j));
    for (int i = 0; i < A.rows; ++i) {
      if (i == rank) continue;
      Rat f = A.at(i, col);
      if (f.is_zero()) continue;
      for (int j = col; j < A.cols; ++j)
        A.at(i, j) = F.sub(A.at(i, j), F.mul(f, A.at(rank, j)));
    }
    if (pivot_cols) pivot_cols->push_back(col);
    ++rank;
  }
  return rank;
}

int rank(const Field& F, Mat A) { return rref(F, A, nullptr); }

Mat nullspace(const Field& F, const Mat& A) {
  Mat R = A;
  std::vector<int> piv;
  int r = rref(F, R, &piv);
  std::vector<bool> is_piv(static_cast<size_t>(A.cols), false);
  for (int c : piv) is_piv[static_cast<size_t>(c)] = true;
  std::vector<Vec> cols;
  for (int free = 0; free < A.cols; ++free) {
    if (is_piv[static_cast<size_t>(free)]) continue;
    Vec v = zero_vec(A.cols);
    v[static_cast<size_t>(free)] = Rat(1);
    for (int i = 0; i < r; ++i)
      v[static_cast<size_t>(piv[static_cast<size_t>(i)])] =
          F.neg(R.at(i, free));
    cols.push_back(std::move(v));
  }
  return Mat::from_cols(cols, A.cols);
}

std::optional<Vec> solve(const Field& F, const Mat& A, const Vec& b) {
  Mat Ab = hstack(A, Mat::from_cols({b}, A.rows));
  std::vector<int> piv;
  int r = rref(F, Ab, &piv);
  for (int i = 0; i < r; ++i)
    if (piv[static_cast<size_t>(i)] == A.cols) return std::nullopt;
  Vec x = zero_vec(A.cols);
  for (int i = 0; i < r; ++i)
    x[static_cast<size_t>(piv[static_cast<size_t>(i)])] = Ab.at(i, A.cols);
  return x;
}

std::optional<Mat> inverse(const Field& F, const Mat& A) {
  if (A.rows != A.cols) return std::nullopt;
  Mat AI = hstack(A, Mat::identity(A.rows));
  std::vector<int> piv;
  int r = rref(F, AI, &piv);
  if (r < A.rows) return std::nullopt;
  for (int i = 0; i < r; ++i)
    if (piv[static_cast<size_t>(i)] >= A.cols) return std::nullopt;
  Mat inv(A.rows, A.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) inv.at(i, j) = AI.at(i, A.cols + j);
  return inv;
}

bool Subspace::insert(Vec v) {
  for (size_t k = 0; k < rows_.size(); ++k) {
    const Rat& c = v[static_cast<size_t>(pivots_[k])];
    if (!c.is_zero()) v = vec_sub(F_, v, vec_scale(F_, c, rows_[k]));
  }
  int lead = -1;
  for (int j = 0; j < n_; ++j)
    if (!v[static_cast<size_t>(j)].is_zero()) {
      lead = j;
      break;
    }
  if (lead < 0) return false;
  v = vec_scale(F_, F_.inv(v[static_cast<size_t>(lead)]), v);
  // back-substitute into earlier rows
  for (size_t k = 0; k < rows_.size(); ++k) {
    const Rat& c = rows_[k][static_cast<size_t>(lead)];
    if (!c.is_zero()) rows_[k] = vec_sub(F_, rows_[k], vec_scale(F_, c, v));
  }
  size_t pos = 0;
  while (pos < pivots_.size() && pivots_[pos] < lead) ++pos;
  rows_.insert(rows_.begin() + static_cast<long>(pos), std::move(v));
  pivots_.insert(pivots_.begin() + static_cast<long>(pos), lead);
  return true;
}

bool Subspace::contains(Vec v) const {
  for (size_t k = 0; k < rows_.size(); ++k) {
    const Rat& c = v[static_cast<size_t>(pivots_[k])];
    if (!c.is_zero()) v = vec_sub(F_, v, vec_scale(F_, c, rows_[k]));
  }
  return vec_is_zero(v);
}

std::optional<Vec> Subspace::coordinates(Vec v) const {
  Vec coeff(rows_.size(), Rat(0));
  for (size_t k = 0; k < rows_.size(); ++k) {
    const Rat& c = v[static_cast<size_t>(pivots_[k])];
    if (!c.is_zero()) {
      coeff[k] = c;
      v = vec_sub(F_, v, vec_scale(F_, c, rows_[k]));
    }
  }
  if (!vec_is_zero(v)) return std::nullopt;
  return coeff;
}

void SpanSolver::add_generator(const Vec& v) {
  Vec row(static_cast<size_t>(n_) + gens_ + 1, Rat(0));
  for (int j = 0; j < n_; ++j) row[static_cast<size_t>(j)] = v[static_cast<size_t>(j)];
  row[static_cast<size_t>(n_) + gens_] = Rat(1);
  // widen existing rows
  for (auto& r : rows_) r.resize(row.size(), Rat(0));
  ++gens_;
  // reduce against existing rows (on the main block only)
  for (size_t k = 0; k < rows_.size(); ++k) {
    const Rat& c = row[static_cast<size_t>(pivots_[k])];
    if (!c.is_zero()) row = vec_sub(F_, row, vec_scale(F_, c, rows_[k]));
  }
  int lead = -1;
  for (int j = 0; j < n_; ++j)
    if (!row[static_cast<size_t>(j)].is_zero()) {
      lead = j;
      break;
    }
  if (lead < 0) return;  // dependent; coefficients recorded but row dropped
  row = vec_scale(F_, F_.inv(row[static_cast<size_t>(lead)]), row);
  for (size_t k = 0; k < rows_.size(); ++k) {
    const Rat& c = rows_[k][static_cast<size_t>(lead)];
    if (!c.is_zero()) rows_[k] = vec_sub(F_, rows_[k], vec_scale(F_, c, row));
  }
  size_t pos = 0;
  while (pos < pivots_.size() && pivots_[pos] < lead) ++pos;
  rows_.insert(rows_.begin() + static_cast<long>(pos), std::move(row));
  pivots_.insert(pivots_.begin() + static_cast<long>(pos), lead);
}

int SpanSolver::dim() const { return static_cast<int>(rows_.size()); }

std::optional<Vec> SpanSolver::express(const Vec& v) const {
  Vec row(static_cast<size_t>(n_) + gens_ + 1, Rat(0));
  for (int j = 0; j < n_; ++j) row[static_cast<size_t>(j)] = v[static_cast<size_t>(j)];
  row[static_cast<size_t>(n_) + gens_] = Rat(1);
  for (size_t k = 0; k < rows_.size(); ++k) {
    Vec r = rows_[k];
    r.resize(row.size(), Rat(0));
    const Rat& c = row[static_cast<size_t>(pivots_[k])];
    if (!c.is_zero()) row = vec_sub(F_, row, vec_scale(F_, c, r));
  }
  for (int j = 0; j < n_; ++j)
    if (!row[static_cast<size_t>(j)].is_zero()) return std::nullopt;
  // row now reads: 0 = v - sum(coeff_i * gen_i), tail holds -coeffs and 1.
  Vec coeffs(static_cast<size_t>(gens_), Rat(0));
  for (int g = 0; g < gens_; ++g)
    coeffs[static_cast<size_t>(g)] =
        F_.neg(row[static_cast<size_t>(n_) + g]);
  return coeffs;
}

SparseVec sparse_from_dense(const Vec& v) {
  SparseVec s;
  for (size_t i = 0; i < v.size(); ++i)
    if (!v[i].is_zero()) s.nz.emplace_back(static_cast<int>(i), v[i]);
  return s;
}

Vec sparse_to_dense(const SparseVec& v, int n) {
  Vec d = zero_vec(n);
  for (const auto& [i, c] : v.nz) d[static_cast<size_t>(i)] = c;
  return d;
}

SparseVec sparse_axpy(const Field& F, const Rat& c, const SparseVec& x,
                      const SparseVec& y) {
  SparseVec z;
  z.nz.reserve(x.nz.size() + y.nz.size());
  size_t i = 0, j = 0;
  while (i < x.nz.size() || j < y.nz.size()) {
    if (j >= y.nz.size() || (i < x.nz.size() && x.nz[i].first < y.nz[j].first)) {
      Rat v = F.mul(c, x.nz[i].second);
      if (!v.is_zero()) z.nz.emplace_back(x.nz[i].first, v);
      ++i;
    } else if (i >= x.nz.size() || y.nz[j].first < x.nz[i].first) {
      z.nz.push_back(y.nz[j]);
      ++j;
    } else {
      Rat v = F.add(F.mul(c, x.nz[i].second), y.nz[j].second);
      if (!v.is_zero()) z.nz.emplace_back(x.nz[i].first, v);
      ++i;
      ++j;
    }
  }
  return z;
}

SparseVec SparseEchelon::reduce(SparseVec v) const {
  // Row entries sit at indices >= the row's lead, so eliminating the entry
  // at position k never disturbs earlier entries.
  size_t k = 0;
  while (k < v.nz.size()) {
    auto it = rows_.find(v.nz[k].first);
    if (it == rows_.end()) {
      ++k;
      continue;
    }
    v = sparse_axpy(F_, F_.neg(v.nz[k].second), it->second, v);
  }
  return v;
}

bool SparseEchelon::insert(SparseVec v) {
  v = reduce(std::move(v));
  if (v.empty()) return false;
  Rat inv = F_.inv(v.nz.front().second);
  for (auto& [i, c] : v.nz) c = F_.mul(inv, c);
  int lead = v.lead();
  // reduce existing rows against the new one
  for (auto& [l, row] : rows_) {
    Rat c(0);
    for (const auto& [i, cc] : row.nz)
      if (i == lead) {
        c = cc;
        break;
      }
    if (!c.is_zero()) row = sparse_axpy(F_, F_.neg(c), v, row);
  }
  rows_.emplace(lead, std::move(v));
  return true;
}

std::vector<SparseVec> sparse_kernel(const Field& F,
                                     const std::vector<SparseVec>& constraints,
                                     int n) {
  SparseEchelon ech(F);
  for (const auto& c : constraints) ech.insert(c);
  std::vector<bool> is_piv(static_cast<size_t>(n), false);
  for (const auto& [lead, row] : ech.rows()) is_piv[static_cast<size_t>(lead)] = true;
  std::vector<SparseVec> kernel;
  for (int free = 0; free < n; ++free) {
    if (is_piv[static_cast<size_t>(free)]) continue;
    SparseVec v;
    std::vector<std::pair<int, Rat>> entries;
    entries.emplace_back(free, Rat(1));
    for (const auto& [lead, row] : ech.rows()) {
      for (const auto& [i, c] : row.nz)
        if (i == free) {
          entries.emplace_back(lead, F.neg(c));
          break;
        }
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    v.nz = std::move(entries);
    kernel.push_back(std::move(v));
  }
  return kernel;
}

}  // namespace linalg
}  // namespace defstack
