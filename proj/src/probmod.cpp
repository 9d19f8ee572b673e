#include "defstack/probmod.hpp"

#include <algorithm>
#include <set>

namespace defstack::probmod {

using linalg::unit_vec;
using linalg::vec_add;
using linalg::vec_is_zero;
using linalg::vec_scale;
using linalg::vec_sub;
using linalg::zero_vec;

namespace {

// r x c matrix with entries in a local algebra (each entry a coord vector).
struct AMat {
  int rows = 0, cols = 0;
  std::vector<Vec> e;
  AMat() = default;
  AMat(int r, int c, int adim)
      : rows(r), cols(c), e(static_cast<size_t>(r) * c, zero_vec(adim)) {}
  Vec& at(int i, int j) { return e[static_cast<size_t>(i) * cols + j]; }
  const Vec& at(int i, int j) const {
    return e[static_cast<size_t>(i) * cols + j];
  }
};

AMat amat_identity(const AlgebraPtr& A, int n) {
  AMat m(n, n, A->dim);
  for (int i = 0; i < n; ++i) m.at(i, i) = A->unit();
  return m;
}

AMat amat_embed(const AlgebraPtr& A, const Mat& M) {
  AMat m(M.rows, M.cols, A->dim);
  for (int i = 0; i < M.rows; ++i)
    for (int j = 0; j < M.cols; ++j) {
      Vec v = zero_vec(A->dim);
      v[0] = A->field.reduce(M.at(i, j));
      m.at(i, j) = std::move(v);
    }
  return m;
}

AMat amat_mul(const AlgebraPtr& A, const AMat& X, const AMat& Y) {
  AMat Z(X.rows, Y.cols, A->dim);
  for (int i = 0; i < X.rows; ++i)
    for (int k = 0; k < X.cols; ++k) {
      if (vec_is_zero(X.at(i, k))) continue;
      for (int j = 0; j < Y.cols; ++j) {
        if (vec_is_zero(Y.at(k, j))) continue;
        Z.at(i, j) =
            vec_add(A->field, Z.at(i, j), A->mul(X.at(i, k), Y.at(k, j)));
      }
    }
  return Z;
}

AMat amat_add(const AlgebraPtr& A, const AMat& X, const AMat& Y) {
  AMat Z(X.rows, X.cols, A->dim);
  for (size_t i = 0; i < X.e.size(); ++i)
    Z.e[i] = vec_add(A->field, X.e[i], Y.e[i]);
  return Z;
}

AMat amat_sub(const AlgebraPtr& A, const AMat& X, const AMat& Y) {
  AMat Z(X.rows, X.cols, A->dim);
  for (size_t i = 0; i < X.e.size(); ++i)
    Z.e[i] = vec_sub(A->field, X.e[i], Y.e[i]);
  return Z;
}

bool amat_equal(const AMat& X, const AMat& Y) { return X.e == Y.e; }

bool amat_is_zero(const AMat& X) {
  for (const Vec& v : X.e)
    if (!vec_is_zero(v)) return false;
  return true;
}

// Inverse of a matrix congruent to the identity modulo the maximal ideal.
AMat amat_invert_unipotent(const AlgebraPtr& A, const AMat& X) {
  AMat I = amat_identity(A, X.rows);
  AMat N = amat_sub(A, I, X);
  AMat acc = I;
  AMat pw = N;
  int guard = A->dim * X.rows + 2;
  while (!amat_is_zero(pw) && guard-- > 0) {
    acc = amat_add(A, acc, pw);
    pw = amat_mul(A, pw, N);
  }
  if (!amat_is_zero(pw))
    throw DefstackError(Errc::BadInput, "matrix is not unipotent");
  return acc;
}

AMat amat_map(const artin::AlgebraHom& f, const AMat& X) {
  AMat Y(X.rows, X.cols, f.target->dim);
  for (size_t i = 0; i < X.e.size(); ++i) Y.e[i] = f.apply(X.e[i]);
  return Y;
}

Mat hom_section(const artin::AlgebraHom& f) {
  const Field& F = f.source->field;
  Mat sec(f.source->dim, f.target->dim);
  for (int j = 0; j < f.target->dim; ++j) {
    auto s = linalg::solve(F, f.matrix, unit_vec(f.target->dim, j));
    if (!s) throw DefstackError(Errc::BadInput, "section of a non-surjection");
    for (int i = 0; i < f.source->dim; ++i) sec.at(i, j) = (*s)[i];
  }
  return sec;
}

AMat amat_lift(const Mat& sec, const Field& F, const AMat& X, int tdim) {
  AMat Y(X.rows, X.cols, tdim);
  for (size_t i = 0; i < X.e.size(); ++i)
    Y.e[i] = linalg::apply(F, sec, X.e[i]);
  return Y;
}

Vec pair_coords(const DescentSquare& sq, const Vec& x, const Vec& y) {
  const Field& F = sq.fp.algebra->field;
  Mat stacked = linalg::vstack(sq.fp.to_first.matrix, sq.fp.to_second.matrix);
  Vec rhs;
  rhs.reserve(x.size() + y.size());
  rhs.insert(rhs.end(), x.begin(), x.end());
  rhs.insert(rhs.end(), y.begin(), y.end());
  auto c = linalg::solve(F, stacked, rhs);
  if (!c)
    throw DefstackError(Errc::RestrictionMismatch,
                        "pair does not descend to the fiber product");
  return *c;
}

AMat amat_pair(const DescentSquare& sq, const AMat& X, const AMat& Y) {
  AMat Z(X.rows, X.cols, sq.fp.algebra->dim);
  for (size_t i = 0; i < X.e.size(); ++i)
    Z.e[i] = pair_coords(sq, X.e[i], Y.e[i]);
  return Z;
}

struct Odometer {
  long p;
  std::vector<long> digits;
  bool done = false;
  Odometer(long p_, int k) : p(p_), digits(std::max(k, 0), 0) {}
  bool next() {
    size_t i = 0;
    while (i < digits.size()) {
      if (++digits[i] < p) return true;
      digits[i] = 0;
      ++i;
    }
    done = true;
    return false;
  }
};

// module descriptor layout: for base index i = 1..nB-1, row s, col t: the
// entry's coordinate vector in A
std::vector<AMat> module_amats(const AlgebraPtr& A, int nB, int r,
                               const Vec& data) {
  std::vector<AMat> mats;
  size_t pos = 0;
  for (int i = 1; i < nB; ++i) {
    AMat m(r, r, A->dim);
    for (int s = 0; s < r; ++s)
      for (int t = 0; t < r; ++t) {
        Vec v(data.begin() + pos, data.begin() + pos + A->dim);
        m.at(s, t) = std::move(v);
        pos += A->dim;
      }
    mats.push_back(std::move(m));
  }
  if (pos != data.size())
    throw DefstackError(Errc::BadInput, "module descriptor length mismatch");
  return mats;
}

Obj module_obj(const std::vector<AMat>& mats) {
  Obj o;
  for (const AMat& m : mats)
    for (const Vec& v : m.e) o.data.insert(o.data.end(), v.begin(), v.end());
  return o;
}

AMat module_mor_amat(const AlgebraPtr& A, int r, const Vec& data) {
  AMat g(r, r, A->dim);
  size_t pos = 0;
  for (int s = 0; s < r; ++s)
    for (int t = 0; t < r; ++t) {
      Vec v(data.begin() + pos, data.begin() + pos + A->dim);
      g.at(s, t) = std::move(v);
      pos += A->dim;
    }
  if (pos != data.size())
    throw DefstackError(Errc::BadInput, "module morphism length mismatch");
  return g;
}

Mor module_mor(const AMat& g) {
  Mor m;
  for (const Vec& v : g.e) m.data.insert(m.data.end(), v.begin(), v.end());
  return m;
}

}  // namespace

Vec BaseAlgebra::basis_mul(int i, int j) const {
  Vec v = zero_vec(dim);
  for (int m = 0; m < dim; ++m) v[m] = c(i, j, m);
  return v;
}

BasePtr make_base_algebra(const Field& field, std::vector<std::string> labels,
                          std::vector<Rat> table) {
  int n = static_cast<int>(labels.size());
  if (table.size() != static_cast<size_t>(n) * n * n)
    throw DefstackError(Errc::BadInput, "base algebra table size");
  for (auto& v : table) v = field.reduce(v);
  BaseAlgebra B{field, n, std::move(labels), std::move(table)};
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < n; ++m) {
      Rat want = (j == m) ? field.one() : field.zero();
      if (B.c(0, j, m) != want || B.c(j, 0, m) != want)
        throw DefstackError(Errc::BadInput, "base algebra has no unit at e0");
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m)
        if (B.c(i, j, m) != B.c(j, i, m))
          throw DefstackError(Errc::BadInput, "base algebra not commutative");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        Vec left = zero_vec(n), right = zero_vec(n);
        Vec ij = B.basis_mul(i, j);
        for (int m = 0; m < n; ++m)
          if (!ij[m].is_zero())
            left =
                vec_add(field, left, vec_scale(field, ij[m], B.basis_mul(m, l)));
        Vec jl = B.basis_mul(j, l);
        for (int m = 0; m < n; ++m)
          if (!jl[m].is_zero())
            right =
                vec_add(field, right, vec_scale(field, jl[m], B.basis_mul(i, m)));
        if (left != right)
          throw DefstackError(Errc::BadInput, "base algebra not associative");
      }
  return std::make_shared<const BaseAlgebra>(std::move(B));
}

BasePtr base_from_local(const AlgebraPtr& A) {
  return make_base_algebra(A->field, A->labels, A->mult);
}

ModuleProblem::ModuleProblem(BasePtr B, std::vector<Mat> action)
    : B_(std::move(B)), action_(std::move(action)) {
  if (action_.size() != static_cast<size_t>(B_->dim))
    throw DefstackError(Errc::InvalidModule,
                        "need one action matrix per base basis element");
  r_ = action_[0].rows;
  const Field& F = B_->field;
  for (auto& m : action_) {
    if (m.rows != r_ || m.cols != r_)
      throw DefstackError(Errc::InvalidModule, "action matrices must be r x r");
    for (auto& v : m.a) v = F.reduce(v);
  }
  if (!(action_[0] == Mat::identity(r_)))
    throw DefstackError(Errc::InvalidModule, "unit must act as the identity");
  for (int i = 0; i < B_->dim; ++i)
    for (int j = 0; j < B_->dim; ++j) {
      Mat lhs = linalg::mul(F, action_[i], action_[j]);
      Mat rhs(r_, r_);
      for (int m = 0; m < B_->dim; ++m) {
        const Rat& c = B_->c(i, j, m);
        if (!c.is_zero())
          rhs = linalg::add(F, rhs, linalg::scale(F, c, action_[m]));
      }
      if (!(lhs == rhs))
        throw DefstackError(Errc::InvalidModule,
                            "action does not respect the base relations");
    }
}

std::vector<Obj> ModuleProblem::objects(const AlgebraPtr& A, long cap) const {
  const Field& F = A->field;
  int nB = B_->dim;
  int cells = (nB - 1) * r_ * r_ * (A->dim - 1);
  if (cells > 0 && !F.is_finite())
    throw DefstackError(Errc::UnsupportedField,
                        "object enumeration requires a finite field");
  std::vector<Obj> out;
  long p = F.is_finite() ? *F.size() : 2;
  Odometer od(p, cells);
  while (true) {
    std::vector<AMat> mats;
    int digit = 0;
    for (int i = 1; i < nB; ++i) {
      AMat m = amat_embed(A, action_[i]);
      for (int s = 0; s < r_; ++s)
        for (int t = 0; t < r_; ++t)
          for (int l = 1; l < A->dim; ++l)
            m.at(s, t)[l] = F.from_int(od.digits[digit++]);
      mats.push_back(std::move(m));
    }
    auto act = [&](int i) -> AMat {
      if (i == 0) return amat_identity(A, r_);
      return mats[i - 1];
    };
    bool ok = true;
    for (int i = 1; i < nB && ok; ++i)
      for (int j = i; j < nB && ok; ++j) {
        AMat lhs = amat_mul(A, act(i), act(j));
        AMat rhs(r_, r_, A->dim);
        for (int m = 0; m < nB; ++m) {
          const Rat& c = B_->c(i, j, m);
          if (c.is_zero()) continue;
          AMat scaled = act(m);
          for (auto& v : scaled.e) v = vec_scale(F, c, v);
          rhs = amat_add(A, rhs, scaled);
        }
        if (!amat_equal(lhs, rhs)) ok = false;
      }
    if (ok) {
      out.push_back(module_obj(mats));
      if (static_cast<long>(out.size()) > cap)
        throw DefstackError(Errc::EnumerationBudgetExceeded,
                            "module objects exceed cap");
    }
    if (cells == 0) break;
    if (!od.next()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Mor> ModuleProblem::morphisms(const AlgebraPtr& A, const Obj& a,
                                          const Obj& b, long cap) const {
  const Field& F = A->field;
  int cells = r_ * r_ * (A->dim - 1);
  if (cells > 0 && !F.is_finite())
    throw DefstackError(Errc::UnsupportedField,
                        "morphism enumeration requires a finite field");
  std::vector<AMat> ma = module_amats(A, B_->dim, r_, a.data);
  std::vector<AMat> mb = module_amats(A, B_->dim, r_, b.data);
  std::vector<Mor> out;
  long p = F.is_finite() ? *F.size() : 2;
  Odometer od(p, cells);
  while (true) {
    AMat g = amat_identity(A, r_);
    int digit = 0;
    for (int s = 0; s < r_; ++s)
      for (int t = 0; t < r_; ++t)
        for (int l = 1; l < A->dim; ++l)
          g.at(s, t)[l] = F.from_int(od.digits[digit++]);
    bool ok = true;
    for (size_t i = 0; i < ma.size() && ok; ++i)
      if (!amat_equal(amat_mul(A, g, ma[i]), amat_mul(A, mb[i], g))) ok = false;
    if (ok) {
      out.push_back(module_mor(g));
      if (static_cast<long>(out.size()) > cap)
        throw DefstackError(Errc::EnumerationBudgetExceeded,
                            "module morphisms exceed cap");
    }
    if (cells == 0) break;
    if (!od.next()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

Mor ModuleProblem::compose(const AlgebraPtr& A, const Mor& second,
                           const Mor& first) const {
  AMat g2 = module_mor_amat(A, r_, second.data);
  AMat g1 = module_mor_amat(A, r_, first.data);
  return module_mor(amat_mul(A, g2, g1));
}

Mor ModuleProblem::identity_mor(const AlgebraPtr& A, const Obj&) const {
  return module_mor(amat_identity(A, r_));
}

Mor ModuleProblem::invert(const AlgebraPtr& A, const Mor& m) const {
  return module_mor(amat_invert_unipotent(A, module_mor_amat(A, r_, m.data)));
}

Obj ModuleProblem::pushforward(const artin::AlgebraHom& f, const Obj& o) const {
  std::vector<AMat> mats = module_amats(f.source, B_->dim, r_, o.data);
  std::vector<AMat> out;
  out.reserve(mats.size());
  for (const AMat& m : mats) out.push_back(amat_map(f, m));
  return module_obj(out);
}

Mor ModuleProblem::pushforward_mor(const artin::AlgebraHom& f,
                                   const Mor& m) const {
  return module_mor(amat_map(f, module_mor_amat(f.source, r_, m.data)));
}

Obj ModuleProblem::base_object() const {
  AlgebraPtr k_alg = artin::base_field_algebra(B_->field);
  std::vector<AMat> mats;
  for (int i = 1; i < B_->dim; ++i)
    mats.push_back(amat_embed(k_alg, action_[i]));
  return module_obj(mats);
}

Obj ModuleProblem::glue(const DescentSquare& sq, const Obj& o1, const Obj& o2,
                        const Mor& iso) const {
  const AlgebraPtr& A1 = sq.p1.source;
  const AlgebraPtr& A2 = sq.p2.source;
  const AlgebraPtr& A = sq.p1.target;
  const Field& F = A->field;
  int nB = B_->dim;
  if (sq.p2.is_surjective()) {
    std::vector<AMat> m1 = module_amats(A1, nB, r_, o1.data);
    std::vector<AMat> m2 = module_amats(A2, nB, r_, o2.data);
    AMat g = module_mor_amat(A, r_, iso.data);
    Mat sec = hom_section(sq.p2);
    AMat U = amat_lift(sec, F, g, A2->dim);
    AMat Uinv = amat_invert_unipotent(A2, U);
    std::vector<AMat> glued;
    for (int i = 0; i < nB - 1; ++i) {
      AMat conj = amat_mul(A2, Uinv, amat_mul(A2, m2[i], U));
      glued.push_back(amat_pair(sq, m1[i], conj));
    }
    Obj out = module_obj(glued);
    if (!(pushforward(sq.fp.to_first, out) == o1))
      throw DefstackError(Errc::GluingUnavailable,
                          "glued object fails the first restriction");
    return out;
  }
  if (sq.p1.is_surjective()) {
    std::vector<AMat> m1 = module_amats(A1, nB, r_, o1.data);
    std::vector<AMat> m2 = module_amats(A2, nB, r_, o2.data);
    AMat g = module_mor_amat(A, r_, iso.data);
    AMat ginv = amat_invert_unipotent(A, g);
    Mat sec = hom_section(sq.p1);
    AMat U = amat_lift(sec, F, ginv, A1->dim);
    AMat Uinv = amat_invert_unipotent(A1, U);
    std::vector<AMat> glued;
    for (int i = 0; i < nB - 1; ++i) {
      AMat conj = amat_mul(A1, Uinv, amat_mul(A1, m1[i], U));
      glued.push_back(amat_pair(sq, conj, m2[i]));
    }
    Obj out = module_obj(glued);
    if (!(pushforward(sq.fp.to_second, out) == o2))
      throw DefstackError(Errc::GluingUnavailable,
                          "glued object fails the second restriction");
    return out;
  }
  throw DefstackError(Errc::GluingUnavailable,
                      "descent square has no surjective leg");
}

Mor ModuleProblem::glue_mor(const DescentSquare& sq, const Obj& src1,
                            const Obj& src2, const Mor& src_iso,
                            const Obj& dst1, const Obj& dst2,
                            const Mor& dst_iso, const Mor& mm1,
                            const Mor& mm2) const {
  const AlgebraPtr& A1 = sq.p1.source;
  const AlgebraPtr& A2 = sq.p2.source;
  const AlgebraPtr& A = sq.p1.target;
  const Field& F = A->field;
  (void)src1;
  (void)src2;
  (void)dst1;
  (void)dst2;
  if (sq.p2.is_surjective()) {
    AMat gs = module_mor_amat(A, r_, src_iso.data);
    AMat gd = module_mor_amat(A, r_, dst_iso.data);
    Mat sec = hom_section(sq.p2);
    AMat Us = amat_lift(sec, F, gs, A2->dim);
    AMat Ud = amat_lift(sec, F, gd, A2->dim);
    AMat Udinv = amat_invert_unipotent(A2, Ud);
    AMat g1 = module_mor_amat(A1, r_, mm1.data);
    AMat g2 = module_mor_amat(A2, r_, mm2.data);
    AMat second = amat_mul(A2, Udinv, amat_mul(A2, g2, Us));
    return module_mor(amat_pair(sq, g1, second));
  }
  if (sq.p1.is_surjective()) {
    AMat gs = module_mor_amat(A, r_, src_iso.data);
    AMat gd = module_mor_amat(A, r_, dst_iso.data);
    AMat gs_inv = amat_invert_unipotent(A, gs);
    AMat gd_inv = amat_invert_unipotent(A, gd);
    Mat sec = hom_section(sq.p1);
    AMat Us = amat_lift(sec, F, gs_inv, A1->dim);
    AMat Ud = amat_lift(sec, F, gd_inv, A1->dim);
    AMat Udinv = amat_invert_unipotent(A1, Ud);
    AMat g1 = module_mor_amat(A1, r_, mm1.data);
    AMat g2 = module_mor_amat(A2, r_, mm2.data);
    AMat first = amat_mul(A1, Udinv, amat_mul(A1, g1, Us));
    return module_mor(amat_pair(sq, first, g2));
  }
  throw DefstackError(Errc::GluingUnavailable,
                      "descent square has no surjective leg");
}

ModuleGlueResult module_fiber_product(const ModuleProblem& P,
                                      const AlgebraHom& p1,
                                      const AlgebraHom& p2, const Obj& o1,
                                      const Obj& o2, const Mor& iso) {
  DescentSquare sq = defun::make_descent_square(p1, p2);
  // the identification must really identify the two restrictions
  Obj r1 = P.pushforward(p1, o1);
  Obj r2 = P.pushforward(p2, o2);
  bool found = false;
  for (const Mor& m : P.morphisms(p1.target, r1, r2, 100000))
    if (m == iso) found = true;
  if (!found)
    throw DefstackError(Errc::RestrictionMismatch,
                        "supplied identification is not an isomorphism of the "
                        "restrictions");
  Obj glued = P.glue(sq, o1, o2, iso);
  return ModuleGlueResult{std::move(sq), std::move(glued)};
}

// ---- quotient problem ----

QuotientProblem::QuotientProblem(BasePtr B, std::vector<Mat> e_action, Mat proj)
    : B_(std::move(B)), e_action_(std::move(e_action)), proj_(std::move(proj)) {
  const Field& F = B_->field;
  if (e_action_.size() != static_cast<size_t>(B_->dim))
    throw DefstackError(Errc::InvalidQuotient,
                        "need one ambient action matrix per base element");
  e_ = e_action_[0].rows;
  s_ = proj_.rows;
  if (proj_.cols != e_)
    throw DefstackError(Errc::InvalidQuotient, "projection shape mismatch");
  for (auto& m : e_action_)
    for (auto& v : m.a) v = F.reduce(v);
  for (auto& v : proj_.a) v = F.reduce(v);
  if (linalg::rank(F, proj_) != s_)
    throw DefstackError(Errc::InvalidQuotient, "projection not surjective");
  ModuleProblem validate_ambient(B_, e_action_);
  Mat N = linalg::nullspace(F, proj_);
  g_ = N.cols;
  g_basis_ = N;
  pivot_rows_.clear();
  for (int j = 0; j < g_; ++j) {
    for (int i = 0; i < e_; ++i) {
      if (g_basis_.at(i, j) == Rat(1)) {
        bool clean = true;
        for (int j2 = 0; j2 < g_; ++j2)
          if (j2 != j && !g_basis_.at(i, j2).is_zero()) clean = false;
        if (clean) {
          pivot_rows_.push_back(i);
          break;
        }
      }
    }
  }
  if (static_cast<int>(pivot_rows_.size()) != g_)
    throw DefstackError(Errc::InvalidQuotient,
                        "kernel basis lacks an identity pattern");
  for (int b = 1; b < B_->dim; ++b) {
    Mat W = linalg::mul(F, e_action_[b], g_basis_);
    for (int j = 0; j < g_; ++j)
      if (!linalg::solve(F, g_basis_, W.col(j)))
        throw DefstackError(Errc::InvalidQuotient,
                            "kernel is not stable under the base action");
  }
}

namespace {

AMat quotient_amat(const AlgebraPtr& A, int e, int g, const Vec& data) {
  AMat K(e, g, A->dim);
  size_t pos = 0;
  for (int i = 0; i < e; ++i)
    for (int j = 0; j < g; ++j) {
      Vec v(data.begin() + pos, data.begin() + pos + A->dim);
      K.at(i, j) = std::move(v);
      pos += A->dim;
    }
  if (pos != data.size())
    throw DefstackError(Errc::BadInput, "quotient descriptor length mismatch");
  return K;
}

Obj quotient_obj(const AMat& K) {
  Obj o;
  for (const Vec& v : K.e) o.data.insert(o.data.end(), v.begin(), v.end());
  return o;
}

}  // namespace

std::vector<Obj> QuotientProblem::objects(const AlgebraPtr& A, long cap) const {
  const Field& F = A->field;
  int cells = (e_ - g_) * g_ * (A->dim - 1);
  if (cells > 0 && !F.is_finite())
    throw DefstackError(Errc::UnsupportedField,
                        "object enumeration requires a finite field");
  std::vector<bool> is_pivot(e_, false);
  for (int i : pivot_rows_) is_pivot[i] = true;
  std::vector<Obj> out;
  long p = F.is_finite() ? *F.size() : 2;
  Odometer od(p, cells);
  while (true) {
    AMat K = amat_embed(A, g_basis_);
    int digit = 0;
    for (int i = 0; i < e_; ++i) {
      if (is_pivot[i]) continue;
      for (int j = 0; j < g_; ++j)
        for (int l = 1; l < A->dim; ++l)
          K.at(i, j)[l] = F.from_int(od.digits[digit++]);
    }
    bool ok = true;
    for (int b = 1; b < B_->dim && ok; ++b) {
      AMat Eb = amat_embed(A, e_action_[b]);
      AMat W = amat_mul(A, Eb, K);
      AMat Lam(g_, g_, A->dim);
      for (int j = 0; j < g_; ++j)
        for (int i = 0; i < g_; ++i) Lam.at(i, j) = W.at(pivot_rows_[i], j);
      if (!amat_equal(W, amat_mul(A, K, Lam))) ok = false;
    }
    if (ok) {
      out.push_back(quotient_obj(K));
      if (static_cast<long>(out.size()) > cap)
        throw DefstackError(Errc::EnumerationBudgetExceeded,
                            "quotient objects exceed cap");
    }
    if (cells == 0) break;
    if (!od.next()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Mor> QuotientProblem::morphisms(const AlgebraPtr&, const Obj& a,
                                            const Obj& b, long) const {
  if (a == b) return {Mor{}};
  return {};
}

Mor QuotientProblem::compose(const AlgebraPtr&, const Mor&, const Mor&) const {
  return Mor{};
}

Mor QuotientProblem::identity_mor(const AlgebraPtr&, const Obj&) const {
  return Mor{};
}

Mor QuotientProblem::invert(const AlgebraPtr&, const Mor&) const {
  return Mor{};
}

Obj QuotientProblem::pushforward(const artin::AlgebraHom& f,
                                 const Obj& o) const {
  AMat K = quotient_amat(f.source, e_, g_, o.data);
  AMat moved = amat_map(f, K);
  AMat Lam(g_, g_, f.target->dim);
  for (int j = 0; j < g_; ++j)
    for (int i = 0; i < g_; ++i) Lam.at(i, j) = moved.at(pivot_rows_[i], j);
  AMat fixed = amat_mul(f.target, moved, amat_invert_unipotent(f.target, Lam));
  return quotient_obj(fixed);
}

Mor QuotientProblem::pushforward_mor(const artin::AlgebraHom&,
                                     const Mor&) const {
  return Mor{};
}

Obj QuotientProblem::base_object() const {
  AlgebraPtr k_alg = artin::base_field_algebra(B_->field);
  return quotient_obj(amat_embed(k_alg, g_basis_));
}

Obj QuotientProblem::glue(const DescentSquare& sq, const Obj& o1, const Obj& o2,
                          const Mor&) const {
  AMat K1 = quotient_amat(sq.p1.source, e_, g_, o1.data);
  AMat K2 = quotient_amat(sq.p2.source, e_, g_, o2.data);
  if (!(pushforward(sq.p1, o1) == pushforward(sq.p2, o2)))
    throw DefstackError(Errc::RestrictionMismatch,
                        "quotient restrictions disagree over the base");
  return quotient_obj(amat_pair(sq, K1, K2));
}

Mor QuotientProblem::glue_mor(const DescentSquare&, const Obj&, const Obj&,
                              const Mor&, const Obj&, const Obj&, const Mor&,
                              const Mor&, const Mor&) const {
  return Mor{};
}

// ---- oracles ----

int ext1_dimension_bruteforce(const BasePtr& B,
                              const std::vector<Mat>& action) {
  const Field& F = B->field;
  if (!F.is_finite())
    throw DefstackError(Errc::UnsupportedField, "oracle needs a finite field");
  long p = *F.size();
  int r = action[0].rows;
  int nB = B->dim;
  auto block = [&](const Mat& rho, const Mat& X) {
    Mat M(2 * r, 2 * r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        M.at(i, j) = rho.at(i, j);
        M.at(r + i, r + j) = rho.at(i, j);
        M.at(i, r + j) = X.at(i, j);
      }
    return M;
  };
  int cells = (nB - 1) * r * r;
  std::set<Vec> cocycles;
  Odometer od(p, cells);
  while (true) {
    std::vector<Mat> X;
    int digit = 0;
    for (int i = 1; i < nB; ++i) {
      Mat x(r, r);
      for (int s = 0; s < r; ++s)
        for (int t = 0; t < r; ++t) x.at(s, t) = F.from_int(od.digits[digit++]);
      X.push_back(std::move(x));
    }
    auto blk = [&](int i) {
      if (i == 0) return Mat::identity(2 * r);
      return block(action[i], X[i - 1]);
    };
    bool ok = true;
    for (int i = 0; i < nB && ok; ++i)
      for (int j = i; j < nB && ok; ++j) {
        Mat lhs = linalg::mul(F, blk(i), blk(j));
        Mat rhs(2 * r, 2 * r);
        for (int m = 0; m < nB; ++m) {
          const Rat& c = B->c(i, j, m);
          if (!c.is_zero())
            rhs = linalg::add(F, rhs, linalg::scale(F, c, blk(m)));
        }
        if (!(lhs == rhs)) ok = false;
      }
    if (ok) {
      Vec flat;
      for (const Mat& x : X) flat.insert(flat.end(), x.a.begin(), x.a.end());
      cocycles.insert(flat);
    }
    if (cells == 0) break;
    if (!od.next()) break;
  }
  std::set<Vec> boundaries;
  Odometer ody(p, r * r);
  while (true) {
    Mat Y(r, r);
    int digit = 0;
    for (int s = 0; s < r; ++s)
      for (int t = 0; t < r; ++t) Y.at(s, t) = F.from_int(ody.digits[digit++]);
    Vec flat;
    for (int i = 1; i < nB; ++i) {
      Mat d = linalg::sub(F, linalg::mul(F, action[i], Y),
                          linalg::mul(F, Y, action[i]));
      flat.insert(flat.end(), d.a.begin(), d.a.end());
    }
    boundaries.insert(flat);
    if (r == 0) break;
    if (!ody.next()) break;
  }
  auto logp = [&](size_t n) {
    int d = 0;
    size_t acc = 1;
    while (acc < n) {
      acc *= static_cast<size_t>(p);
      ++d;
    }
    if (acc != n)
      throw DefstackError(Errc::BadInput, "cardinality is not a p power");
    return d;
  };
  return logp(cocycles.size()) - logp(boundaries.size());
}

int hom_dimension(const BasePtr& B, const std::vector<Mat>& m_action,
                  const std::vector<Mat>& n_action) {
  const Field& F = B->field;
  int rm = m_action[0].rows, rn = n_action[0].rows;
  int vars = rn * rm;
  std::vector<Vec> rows;
  for (int b = 1; b < B->dim; ++b)
    for (int i = 0; i < rn; ++i)
      for (int j = 0; j < rm; ++j) {
        Vec row = zero_vec(vars);
        for (int t = 0; t < rm; ++t)
          row[i * rm + t] = F.add(row[i * rm + t], m_action[b].at(t, j));
        for (int t = 0; t < rn; ++t)
          row[t * rm + j] = F.sub(row[t * rm + j], n_action[b].at(i, t));
        rows.push_back(std::move(row));
      }
  if (rows.empty()) return vars;
  return vars - linalg::rank(F, Mat::from_rows(rows, vars));
}

int module_tangent_dim_linear(const BasePtr& B,
                              const std::vector<Mat>& action) {
  const Field& F = B->field;
  int r = action[0].rows;
  int nB = B->dim;
  int vars = (nB - 1) * r * r;
  if (vars == 0) return 0;
  auto var = [&](int i, int s, int t) { return (i - 1) * r * r + s * r + t; };
  std::vector<Vec> rows;
  for (int i = 1; i < nB; ++i)
    for (int j = i; j < nB; ++j)
      for (int s = 0; s < r; ++s)
        for (int t = 0; t < r; ++t) {
          Vec row = zero_vec(vars);
          for (int u = 0; u < r; ++u) {
            row[var(j, u, t)] = F.add(row[var(j, u, t)], action[i].at(s, u));
            row[var(i, s, u)] = F.add(row[var(i, s, u)], action[j].at(u, t));
          }
          for (int m = 1; m < nB; ++m) {
            const Rat& c = B->c(i, j, m);
            if (!c.is_zero()) row[var(m, s, t)] = F.sub(row[var(m, s, t)], c);
          }
          rows.push_back(std::move(row));
        }
  int z = vars - linalg::rank(F, Mat::from_rows(rows, vars));
  std::vector<Vec> cob;
  for (int ys = 0; ys < r; ++ys)
    for (int yt = 0; yt < r; ++yt) {
      Vec img = zero_vec(vars);
      for (int i = 1; i < nB; ++i)
        for (int s = 0; s < r; ++s)
          for (int t = 0; t < r; ++t) {
            Rat val = F.zero();
            if (s == ys) val = F.add(val, action[i].at(yt, t));
            if (t == yt) val = F.sub(val, action[i].at(s, ys));
            img[var(i, s, t)] = val;
          }
      cob.push_back(std::move(img));
    }
  return z - linalg::rank(F, Mat::from_rows(cob, vars));
}

int module_aut_dim_linear(const BasePtr& B, const std::vector<Mat>& action) {
  return hom_dimension(B, action, action);
}

int quotient_tangent_dim_oracle(const BasePtr& B,
                                const std::vector<Mat>& e_action,
                                const Mat& proj) {
  const Field& F = B->field;
  Mat G = linalg::nullspace(F, proj);
  int e = e_action[0].rows;
  int g = G.cols, s = proj.rows;
  std::vector<Mat> g_action, f_action;
  Mat sec(e, s);
  for (int j = 0; j < s; ++j) {
    auto sol = linalg::solve(F, proj, unit_vec(s, j));
    if (!sol) throw DefstackError(Errc::InvalidQuotient, "proj not surjective");
    for (int i = 0; i < e; ++i) sec.at(i, j) = (*sol)[i];
  }
  for (int b = 0; b < B->dim; ++b) {
    Mat W = linalg::mul(F, e_action[b], G);
    Mat rg(g, g);
    for (int j = 0; j < g; ++j) {
      auto sol = linalg::solve(F, G, W.col(j));
      if (!sol)
        throw DefstackError(Errc::InvalidQuotient, "kernel not stable");
      for (int i = 0; i < g; ++i) rg.at(i, j) = (*sol)[i];
    }
    g_action.push_back(std::move(rg));
    f_action.push_back(linalg::mul(F, proj, linalg::mul(F, e_action[b], sec)));
  }
  return hom_dimension(B, g_action, f_action);
}

}  // namespace defstack::probmod
