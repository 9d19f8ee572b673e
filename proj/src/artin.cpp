#include "defstack/artin.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace defstack::artin {

using linalg::Subspace;
using linalg::unit_vec;
using linalg::vec_add;
using linalg::vec_is_zero;
using linalg::vec_scale;
using linalg::vec_sub;
using linalg::zero_vec;

Vec LocalAlgebra::basis_mul(int i, int j) const {
  Vec v = zero_vec(dim);
  for (int m = 0; m < dim; ++m) v[m] = c(i, j, m);
  return v;
}

Vec LocalAlgebra::mul(const Vec& x, const Vec& y) const {
  Vec v = zero_vec(dim);
  for (int i = 0; i < dim; ++i) {
    if (x[i].is_zero()) continue;
    for (int j = 0; j < dim; ++j) {
      if (y[j].is_zero()) continue;
      Rat xy = field.mul(x[i], y[j]);
      for (int m = 0; m < dim; ++m) {
        const Rat& cm = c(i, j, m);
        if (cm.is_zero()) continue;
        v[m] = field.add(v[m], field.mul(xy, cm));
      }
    }
  }
  return v;
}

Vec LocalAlgebra::pow(const Vec& x, int e) const {
  Vec r = unit();
  for (int i = 0; i < e; ++i) r = mul(r, x);
  return r;
}

std::vector<Vec> LocalAlgebra::max_ideal_power(int t) const {
  Subspace cur(field, dim);
  for (int i = 1; i < dim; ++i) cur.insert(unit_vec(dim, i));
  for (int step = 1; step < t; ++step) {
    Subspace next(field, dim);
    for (const Vec& b : cur.basis())
      for (int i = 1; i < dim; ++i) next.insert(mul(b, unit_vec(dim, i)));
    cur = next;
    if (cur.dim() == 0) break;
  }
  return cur.basis();
}

std::vector<Vec> LocalAlgebra::socle_basis() const {
  std::vector<Vec> rows;
  rows.push_back(unit_vec(dim, 0));  // residue 0
  for (int j = 1; j < dim; ++j)
    for (int m = 0; m < dim; ++m) {
      Vec row = zero_vec(dim);
      for (int i = 0; i < dim; ++i) row[i] = c(i, j, m);
      rows.push_back(std::move(row));
    }
  Mat A = Mat::from_rows(rows, dim);
  Mat N = linalg::nullspace(field, A);
  std::vector<Vec> out;
  for (int j = 0; j < N.cols; ++j) out.push_back(N.col(j));
  return out;
}

std::string LocalAlgebra::show(const Vec& x) const {
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < dim; ++i) {
    if (x[i].is_zero()) continue;
    if (!first) os << " + ";
    if (x[i] != Rat(1) || i == 0) os << x[i] << "*";
    os << labels[i];
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

namespace {

std::optional<int> nilpotency_of_table(const LocalAlgebra& A) {
  Subspace cur(A.field, A.dim);
  for (int i = 1; i < A.dim; ++i) cur.insert(unit_vec(A.dim, i));
  int t = 1;
  while (cur.dim() > 0) {
    if (t > A.dim + 1) return std::nullopt;
    Subspace next(A.field, A.dim);
    for (const Vec& b : cur.basis())
      for (int i = 1; i < A.dim; ++i) next.insert(A.mul(b, unit_vec(A.dim, i)));
    cur = next;
    ++t;
  }
  return t;
}

}  // namespace

std::variant<AlgebraPtr, AlgebraFailure> make_algebra(
    const Field& field, std::vector<std::string> labels,
    std::vector<Rat> mult_table) {
  int n = static_cast<int>(labels.size());
  if (n <= 0 || mult_table.size() != static_cast<size_t>(n) * n * n)
    return AlgebraFailure{Errc::BadInput, {}, "table size must be dim^3"};
  for (auto& v : mult_table) v = field.reduce(v);
  LocalAlgebra A(field, n, std::move(labels), std::move(mult_table));
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < n; ++m) {
      Rat want = (j == m) ? field.one() : field.zero();
      if (A.c(0, j, m) != want)
        return AlgebraFailure{Errc::NoUnit, {0, j, m}, "e0*e_j != e_j"};
      if (A.c(j, 0, m) != want)
        return AlgebraFailure{Errc::NoUnit, {j, 0, m}, "e_j*e0 != e_j"};
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int m = 0; m < n; ++m)
        if (A.c(i, j, m) != A.c(j, i, m))
          return AlgebraFailure{Errc::NotCommutative, {i, j, m},
                                "e_i*e_j != e_j*e_i"};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        Vec left = A.mul(A.basis_mul(i, j), unit_vec(n, l));
        Vec right = A.mul(unit_vec(n, i), A.basis_mul(j, l));
        if (left != right)
          return AlgebraFailure{Errc::NotAssociative, {i, j, l},
                                "(e_i e_j) e_l != e_i (e_j e_l)"};
      }
  auto deg = nilpotency_of_table(A);
  if (!deg)
    return AlgebraFailure{Errc::MaximalIdealNotNilpotent, {},
                          "span(e_1..) has non-vanishing powers"};
  A.nilpotency_degree = *deg;
  return std::make_shared<const LocalAlgebra>(std::move(A));
}

AlgebraPtr make_algebra_or_throw(const Field& field,
                                 std::vector<std::string> labels,
                                 std::vector<Rat> mult_table) {
  auto r = make_algebra(field, std::move(labels), std::move(mult_table));
  if (auto* fail = std::get_if<AlgebraFailure>(&r))
    throw DefstackError(fail->kind, fail->detail);
  return std::get<AlgebraPtr>(r);
}

AlgebraPtr base_field_algebra(const Field& field) {
  return make_algebra_or_throw(field, {"1"}, {field.one()});
}

AlgebraPtr k_of_V(const Field& field, int d) {
  if (d < 0) throw DefstackError(Errc::BadInput, "k[V] needs d >= 0");
  int n = d + 1;
  std::vector<std::string> labels = {"1"};
  for (int i = 1; i <= d; ++i) labels.push_back("v" + std::to_string(i));
  std::vector<Rat> table(static_cast<size_t>(n) * n * n, Rat(0));
  auto idx = [n](int i, int j, int m) {
    return (static_cast<size_t>(i) * n + j) * n + m;
  };
  for (int j = 0; j < n; ++j) {
    table[idx(0, j, j)] = field.one();
    table[idx(j, 0, j)] = field.one();
  }
  return make_algebra_or_throw(field, std::move(labels), std::move(table));
}

namespace {

struct Monomial {
  std::vector<int> exp;
  int degree() const {
    int d = 0;
    for (int e : exp) d += e;
    return d;
  }
  bool operator<(const Monomial& o) const {
    if (degree() != o.degree()) return degree() < o.degree();
    return exp > o.exp;
  }
  bool operator==(const Monomial& o) const { return exp == o.exp; }
};

bool divides(const Monomial& a, const Monomial& b) {
  for (size_t i = 0; i < a.exp.size(); ++i)
    if (a.exp[i] > b.exp[i]) return false;
  return true;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial c = a;
  for (size_t i = 0; i < a.exp.size(); ++i) c.exp[i] += b.exp[i];
  return c;
}

Monomial parse_monomial(const std::string& s,
                        const std::vector<std::string>& vars) {
  Monomial m;
  m.exp.assign(vars.size(), 0);
  std::vector<std::string> tokens;
  std::string token;
  for (char ch : s) {
    if (ch == '*') {
      if (!token.empty()) tokens.push_back(token);
      token.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      token.push_back(ch);
    }
  }
  if (!token.empty()) tokens.push_back(token);
  for (const std::string& t : tokens) {
    if (t == "1") continue;
    std::string name = t;
    int e = 1;
    auto caret = t.find('^');
    if (caret != std::string::npos) {
      name = t.substr(0, caret);
      e = std::stoi(t.substr(caret + 1));
    }
    auto it = std::find(vars.begin(), vars.end(), name);
    if (it == vars.end())
      throw DefstackError(Errc::BadInput, "unknown variable '" + name + "'");
    m.exp[it - vars.begin()] += e;
  }
  return m;
}

std::string mono_label(const Monomial& m,
                       const std::vector<std::string>& vars) {
  std::string s;
  for (size_t i = 0; i < m.exp.size(); ++i) {
    if (m.exp[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += vars[i];
    if (m.exp[i] > 1) s += "^" + std::to_string(m.exp[i]);
  }
  return s.empty() ? "1" : s;
}

}  // namespace

AlgebraPtr monomial_quotient(const Field& field,
                             const std::vector<std::string>& vars,
                             const std::vector<std::string>& relations,
                             int dim_cap) {
  std::vector<Monomial> rel;
  for (const auto& r : relations) rel.push_back(parse_monomial(r, vars));
  for (const auto& m : rel)
    if (m.degree() == 0)
      throw DefstackError(Errc::BadInput, "relation 1 = 0 is not allowed");
  auto standard = [&](const Monomial& m) {
    for (const auto& r : rel)
      if (divides(r, m)) return false;
    return true;
  };
  std::vector<Monomial> basis;
  Monomial one;
  one.exp.assign(vars.size(), 0);
  basis.push_back(one);
  std::vector<Monomial> frontier = {one};
  while (!frontier.empty()) {
    std::vector<Monomial> next;
    for (const auto& m : frontier)
      for (size_t v = 0; v < vars.size(); ++v) {
        Monomial m2 = m;
        m2.exp[v] += 1;
        if (!standard(m2)) continue;
        if (std::find(basis.begin(), basis.end(), m2) != basis.end()) continue;
        basis.push_back(m2);
        next.push_back(m2);
        if (static_cast<int>(basis.size()) > dim_cap)
          throw DefstackError(
              Errc::InfiniteDimensional,
              "standard monomials exceed cap " + std::to_string(dim_cap));
      }
    frontier = std::move(next);
  }
  std::sort(basis.begin(), basis.end());
  int n = static_cast<int>(basis.size());
  std::vector<std::string> labels;
  for (const auto& m : basis) labels.push_back(mono_label(m, vars));
  std::vector<Rat> table(static_cast<size_t>(n) * n * n, Rat(0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Monomial p = mono_mul(basis[i], basis[j]);
      if (!standard(p)) continue;
      auto it = std::find(basis.begin(), basis.end(), p);
      if (it == basis.end())
        throw DefstackError(Errc::BadInput, "monomial closure failure");
      int m = static_cast<int>(it - basis.begin());
      table[(static_cast<size_t>(i) * n + j) * n + m] = field.one();
    }
  return make_algebra_or_throw(field, std::move(labels), std::move(table));
}

AlgebraHom::AlgebraHom(AlgebraPtr src, AlgebraPtr dst, Mat m)
    : source(std::move(src)), target(std::move(dst)), matrix(std::move(m)) {
  if (matrix.rows != target->dim || matrix.cols != source->dim)
    throw DefstackError(Errc::BadInput, "hom matrix shape mismatch");
  if (source->field != target->field)
    throw DefstackError(Errc::BadInput, "hom endpoints over different fields");
}

AlgebraHom AlgebraHom::identity(const AlgebraPtr& a) {
  return AlgebraHom(a, a, Mat::identity(a->dim));
}

AlgebraHom AlgebraHom::compose(const AlgebraHom& first) const {
  if (first.target->dim != source->dim)
    throw DefstackError(Errc::BadInput, "composition mismatch");
  return AlgebraHom(first.source, target,
                    linalg::mul(source->field, matrix, first.matrix));
}

bool AlgebraHom::is_surjective() const {
  return linalg::rank(source->field, matrix) == target->dim;
}

bool AlgebraHom::is_injective() const {
  return linalg::rank(source->field, matrix) == source->dim;
}

std::vector<Vec> AlgebraHom::kernel_basis() const {
  Mat N = linalg::nullspace(source->field, matrix);
  std::vector<Vec> out;
  for (int j = 0; j < N.cols; ++j) out.push_back(N.col(j));
  return out;
}

bool AlgebraHom::is_valid_hom(std::string* why) const {
  if (apply(source->unit()) != target->unit()) {
    if (why) *why = "not unital";
    return false;
  }
  for (int i = 0; i < source->dim; ++i)
    for (int j = i; j < source->dim; ++j) {
      Vec lhs = apply(source->basis_mul(i, j));
      Vec rhs = target->mul(apply(unit_vec(source->dim, i)),
                            apply(unit_vec(source->dim, j)));
      if (lhs != rhs) {
        if (why)
          *why = "not multiplicative on basis pair (" + std::to_string(i) +
                 "," + std::to_string(j) + ")";
        return false;
      }
    }
  return true;
}

void AlgebraHom::validate() const {
  std::string why;
  if (!is_valid_hom(&why)) throw DefstackError(Errc::BadInput, why);
}

AlgebraHom residue_hom(const AlgebraPtr& a) {
  Mat m(1, a->dim);
  m.at(0, 0) = a->field.one();
  return AlgebraHom(a, base_field_algebra(a->field), std::move(m));
}

AlgebraHom hom_from_basis_images(const AlgebraPtr& src, const AlgebraPtr& dst,
                                 const std::vector<Vec>& images) {
  AlgebraHom h(src, dst, Mat::from_cols(images, dst->dim));
  h.validate();
  return h;
}

FiberProduct fiber_product(const AlgebraHom& p1, const AlgebraHom& p2) {
  if (p1.target->dim != p2.target->dim || !(p1.target->mult == p2.target->mult))
    throw DefstackError(Errc::BadInput, "fiber product targets differ");
  const Field& F = p1.source->field;
  if (!p1.is_surjective() && !p2.is_surjective())
    throw DefstackError(Errc::NeitherMapSurjective,
                        "fiber product needs a surjective leg");
  const LocalAlgebra& A1 = *p1.source;
  const LocalAlgebra& A2 = *p2.source;
  int n1 = A1.dim, n2 = A2.dim;
  Mat D(p1.target->dim, n1 + n2);
  for (int i = 0; i < p1.target->dim; ++i) {
    for (int j = 0; j < n1; ++j) D.at(i, j) = p1.matrix.at(i, j);
    for (int j = 0; j < n2; ++j) D.at(i, n1 + j) = F.neg(p2.matrix.at(i, j));
  }
  Mat N = linalg::nullspace(F, D);
  Vec unit_pair = zero_vec(n1 + n2);
  unit_pair[0] = F.one();
  unit_pair[n1] = F.one();
  Subspace span(F, n1 + n2);
  std::vector<Vec> basis;
  span.insert(unit_pair);
  basis.push_back(unit_pair);
  for (int j = 0; j < N.cols; ++j) {
    Vec v = N.col(j);
    // normalize to residue zero so span(b_1..) is the maximal ideal
    Rat res = v[0];
    if (!res.is_zero()) v = vec_sub(F, v, vec_scale(F, res, unit_pair));
    if (span.insert(v)) basis.push_back(v);
  }
  int nb = static_cast<int>(basis.size());
  Mat basis_cols = Mat::from_cols(basis, n1 + n2);
  auto coords_of = [&](const Vec& v) {
    auto x = linalg::solve(F, basis_cols, v);
    if (!x)
      throw DefstackError(Errc::BadInput,
                          "fiber product: product escapes the subalgebra");
    return *x;
  };
  auto pair_mul = [&](const Vec& u, const Vec& v) {
    Vec u1(u.begin(), u.begin() + n1), u2(u.begin() + n1, u.end());
    Vec v1(v.begin(), v.begin() + n1), v2(v.begin() + n1, v.end());
    Vec w1 = A1.mul(u1, v1);
    Vec w2 = A2.mul(u2, v2);
    Vec w = zero_vec(n1 + n2);
    for (int t = 0; t < n1; ++t) w[t] = w1[t];
    for (int t = 0; t < n2; ++t) w[n1 + t] = w2[t];
    return w;
  };
  std::vector<std::string> labels = {"1"};
  for (int i = 1; i < nb; ++i) labels.push_back("b" + std::to_string(i));
  std::vector<Rat> table(static_cast<size_t>(nb) * nb * nb, Rat(0));
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) {
      Vec co = coords_of(pair_mul(basis[i], basis[j]));
      for (int m = 0; m < nb; ++m)
        table[(static_cast<size_t>(i) * nb + j) * nb + m] = co[m];
    }
  AlgebraPtr B = make_algebra_or_throw(F, std::move(labels), std::move(table));
  Mat m1(n1, nb), m2(n2, nb);
  for (int j = 0; j < nb; ++j) {
    for (int i = 0; i < n1; ++i) m1.at(i, j) = basis[j][i];
    for (int i = 0; i < n2; ++i) m2.at(i, j) = basis[j][n1 + i];
  }
  AlgebraHom to1(B, p1.source, std::move(m1));
  AlgebraHom to2(B, p2.source, std::move(m2));
  to1.validate();
  to2.validate();
  return FiberProduct{B, std::move(to1), std::move(to2)};
}

std::vector<Vec> ideal_closure(const LocalAlgebra& A, std::vector<Vec> gens) {
  Subspace span(A.field, A.dim);
  std::vector<Vec> frontier;
  for (auto& g : gens)
    if (span.insert(g)) frontier.push_back(g);
  while (!frontier.empty()) {
    std::vector<Vec> next;
    for (const Vec& v : frontier)
      for (int i = 1; i < A.dim; ++i) {
        Vec w = A.mul(v, unit_vec(A.dim, i));
        if (span.insert(w)) next.push_back(w);
      }
    frontier = std::move(next);
  }
  return span.basis();
}

Quotient quotient_by_ideal(const AlgebraPtr& A, const std::vector<Vec>& gens) {
  const Field& F = A->field;
  for (const Vec& g : gens)
    if (!A->in_max_ideal(g))
      throw DefstackError(Errc::BadInput,
                          "ideal generators must lie in the maximal ideal");
  std::vector<Vec> J = ideal_closure(*A, gens);
  Subspace ideal(F, A->dim);
  for (const Vec& v : J) ideal.insert(v);
  std::vector<bool> is_piv(A->dim, false);
  for (int p : ideal.pivots()) is_piv[p] = true;
  std::vector<int> keep;
  for (int i = 0; i < A->dim; ++i)
    if (!is_piv[i]) keep.push_back(i);
  int nq = static_cast<int>(keep.size());
  auto project = [&](Vec v) {
    const auto& rows = ideal.basis();
    const auto& pivs = ideal.pivots();
    for (size_t k = 0; k < rows.size(); ++k) {
      const Rat& c = v[pivs[k]];
      if (!c.is_zero()) v = vec_sub(F, v, vec_scale(F, c, rows[k]));
    }
    Vec q = zero_vec(nq);
    for (int t = 0; t < nq; ++t) q[t] = v[keep[t]];
    return q;
  };
  std::vector<std::string> labels;
  for (int t = 0; t < nq; ++t) labels.push_back(A->labels[keep[t]]);
  std::vector<Rat> table(static_cast<size_t>(nq) * nq * nq, Rat(0));
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < nq; ++j) {
      Vec q = project(A->basis_mul(keep[i], keep[j]));
      for (int m = 0; m < nq; ++m)
        table[(static_cast<size_t>(i) * nq + j) * nq + m] = q[m];
    }
  AlgebraPtr Q = make_algebra_or_throw(F, std::move(labels), std::move(table));
  Mat pm(nq, A->dim);
  for (int j = 0; j < A->dim; ++j) {
    Vec q = project(unit_vec(A->dim, j));
    for (int i = 0; i < nq; ++i) pm.at(i, j) = q[i];
  }
  AlgebraHom proj(A, Q, std::move(pm));
  proj.validate();
  return Quotient{Q, std::move(proj)};
}

TensorProduct tensor_over(const AlgebraHom& p1, const AlgebraHom& p2) {
  if (p1.source->dim != p2.source->dim ||
      !(p1.source->mult == p2.source->mult))
    throw DefstackError(Errc::BadInput, "tensor legs must share a source");
  if (!p1.is_surjective())
    throw DefstackError(Errc::FirstMapNotSurjective,
                        "tensor_over needs a surjective first leg");
  const Field& F = p1.source->field;
  std::vector<Vec> gens;
  for (const Vec& k : p1.kernel_basis()) gens.push_back(p2.apply(k));
  Quotient q = quotient_by_ideal(p2.target, gens);
  Mat sec(p1.source->dim, p1.target->dim);
  for (int j = 0; j < p1.target->dim; ++j) {
    auto s = linalg::solve(F, p1.matrix, unit_vec(p1.target->dim, j));
    if (!s) throw DefstackError(Errc::BadInput, "section failure");
    for (int i = 0; i < p1.source->dim; ++i) sec.at(i, j) = (*s)[i];
  }
  Mat from1 =
      linalg::mul(F, q.projection.matrix, linalg::mul(F, p2.matrix, sec));
  AlgebraHom h1(p1.target, q.algebra, std::move(from1));
  h1.validate();
  return TensorProduct{q.algebra, std::move(h1), q.projection};
}

TensorProduct tensor_pair(const AlgebraHom& p1, const AlgebraHom& p2) {
  if (p1.is_surjective()) return tensor_over(p1, p2);
  if (p2.is_surjective()) {
    TensorProduct t = tensor_over(p2, p1);
    return TensorProduct{t.algebra, t.from_second, t.from_first};
  }
  throw DefstackError(Errc::LegNotSurjective,
                      "neither map of the tensor pair is surjective");
}

SquareVerdict is_schlessinger_square(const Square& sq) {
  const Field& F = sq.p1.source->field;
  if (sq.p1.source->dim != sq.p2.source->dim ||
      !(sq.p1.source->mult == sq.p2.source->mult))
    throw DefstackError(Errc::BadInput, "square legs must share a source");
  SquareVerdict v;
  Mat stacked = linalg::vstack(sq.p1.matrix, sq.p2.matrix);
  Mat N = linalg::nullspace(F, stacked);
  if (N.cols > 0) {
    v.failed_clause = 1;
    v.witness = N.col(0);
    v.detail = "A -> A' + A'' kills " + sq.p1.source->show(N.col(0));
    return v;
  }
  if (!sq.p1.is_surjective()) {
    Subspace img(F, sq.p1.target->dim);
    for (int j = 0; j < sq.p1.matrix.cols; ++j) img.insert(sq.p1.matrix.col(j));
    for (int i = 0; i < sq.p1.target->dim; ++i) {
      Vec e = unit_vec(sq.p1.target->dim, i);
      if (!img.contains(e)) {
        v.failed_clause = 2;
        v.witness = e;
        v.detail = "A -> A' misses " + sq.p1.target->show(e);
        return v;
      }
    }
  }
  std::vector<Vec> ker = sq.p1.kernel_basis();
  Subspace image(F, sq.p2.target->dim);
  std::vector<Vec> img_basis;
  for (const Vec& k : ker) {
    Vec w = sq.p2.apply(k);
    if (image.insert(w)) img_basis.push_back(w);
  }
  for (size_t i = 0; i < img_basis.size(); ++i)
    for (size_t j = i; j < img_basis.size(); ++j) {
      Vec prod = sq.p2.target->mul(img_basis[i], img_basis[j]);
      if (!image.contains(prod)) {
        v.failed_clause = 3;
        v.witness = prod;
        v.detail =
            "product " + sq.p2.target->show(prod) + " escapes p''(ker p')";
        return v;
      }
    }
  v.ok = true;
  return v;
}

Square pushforward_square(const Square& sq, const AlgebraHom& f) {
  if (f.source->dim != sq.p1.source->dim ||
      !(f.source->mult == sq.p1.source->mult))
    throw DefstackError(Errc::BadInput,
                        "pushforward map must start at the square source");
  TensorProduct t1 = tensor_pair(sq.p1, f);
  TensorProduct t2 = tensor_pair(sq.p2, f);
  return Square{t1.from_second, t2.from_second};
}

Extension classify_extension(const AlgebraHom& p) {
  if (!p.is_surjective())
    throw DefstackError(Errc::NotSurjective, "extension map must surject");
  Extension e{p, p.kernel_basis(), false, false};
  const LocalAlgebra& A = *p.source;
  bool small = true;
  for (const Vec& k : e.kernel) {
    for (int i = 1; i < A.dim && small; ++i)
      if (!vec_is_zero(A.mul(k, unit_vec(A.dim, i)))) small = false;
    if (!small) break;
  }
  e.small = small;
  e.tiny = small && e.kernel.size() == 1;
  return e;
}

std::vector<Extension> factor_into_tiny(const AlgebraHom& p) {
  if (!p.is_surjective())
    throw DefstackError(Errc::NotSurjective, "can only factor surjections");
  const Field& F = p.source->field;
  std::vector<Extension> chain;
  AlgebraPtr cur = p.source;
  AlgebraHom to_A = p;
  while (true) {
    std::vector<Vec> K = to_A.kernel_basis();
    if (K.empty()) break;
    // largest t with K ∩ m^t != 0; that intersection is killed by m
    std::vector<Vec> best;
    for (int t = 1; t <= cur->nilpotency_degree; ++t) {
      std::vector<Vec> mt = cur->max_ideal_power(t);
      if (mt.empty()) break;
      Mat big(cur->dim, static_cast<int>(K.size() + mt.size()));
      for (int i = 0; i < cur->dim; ++i) {
        for (size_t j = 0; j < K.size(); ++j) big.at(i, static_cast<int>(j)) = K[j][i];
        for (size_t j = 0; j < mt.size(); ++j)
          big.at(i, static_cast<int>(K.size() + j)) = F.neg(mt[j][i]);
      }
      Mat N = linalg::nullspace(F, big);
      Subspace inter(F, cur->dim);
      for (int c = 0; c < N.cols; ++c) {
        Vec coeff = N.col(c);
        Vec v = zero_vec(cur->dim);
        for (size_t j = 0; j < K.size(); ++j)
          v = vec_add(F, v, vec_scale(F, coeff[j], K[j]));
        inter.insert(v);
      }
      if (inter.dim() > 0) best = inter.basis();
    }
    Vec line = best.front();  // lexicographically least echelon row
    Quotient q = quotient_by_ideal(cur, {line});
    Extension step = classify_extension(q.projection);
    if (!step.tiny)
      throw DefstackError(Errc::BadInput, "devissage step is not tiny");
    chain.push_back(step);
    Mat sec(cur->dim, q.algebra->dim);
    for (int j = 0; j < q.algebra->dim; ++j) {
      auto s =
          linalg::solve(F, q.projection.matrix, unit_vec(q.algebra->dim, j));
      if (!s) throw DefstackError(Errc::BadInput, "quotient section failure");
      for (int i = 0; i < cur->dim; ++i) sec.at(i, j) = (*s)[i];
    }
    Mat ind = linalg::mul(F, to_A.matrix, sec);
    cur = q.algebra;
    to_A = AlgebraHom(cur, p.target, std::move(ind));
    to_A.validate();
  }
  if (!chain.empty()) {
    Extension& last = chain.back();
    last = classify_extension(to_A.compose(last.map));
  }
  return chain;
}

AlgebraHom sigma_from_product(const FiberProduct& fp, const AlgebraPtr& Aprime,
                              const std::vector<Vec>& I_basis) {
  const Field& F = Aprime->field;
  int d = static_cast<int>(I_basis.size());
  Mat m(Aprime->dim, fp.algebra->dim);
  for (int j = 0; j < fp.algebra->dim; ++j) {
    Vec b = unit_vec(fp.algebra->dim, j);
    Vec x = fp.to_first.apply(b);
    Vec y = fp.to_second.apply(b);
    Vec img = x;
    for (int l = 1; l <= d; ++l)
      img = vec_add(F, img, vec_scale(F, y[l], I_basis[l - 1]));
    for (int i = 0; i < Aprime->dim; ++i) m.at(i, j) = img[i];
  }
  AlgebraHom sig(fp.algebra, Aprime, std::move(m));
  sig.validate();
  return sig;
}

SigmaData sigma_map(const AlgebraPtr& Aprime, const std::vector<Vec>& I_basis) {
  const Field& F = Aprime->field;
  int d = static_cast<int>(I_basis.size());
  if (d < 1) throw DefstackError(Errc::BadInput, "sigma needs dim I >= 1");
  for (const Vec& v : I_basis) {
    if (!Aprime->in_max_ideal(v))
      throw DefstackError(Errc::BadInput, "I must lie in the maximal ideal");
    for (int i = 1; i < Aprime->dim; ++i)
      if (!vec_is_zero(Aprime->mul(v, unit_vec(Aprime->dim, i))))
        throw DefstackError(Errc::BadInput,
                            "I must be a small-extension kernel (I*m = 0)");
  }
  AlgebraPtr kV = k_of_V(F, d);
  FiberProduct fp = fiber_product(residue_hom(Aprime), residue_hom(kV));
  AlgebraHom sig = sigma_from_product(fp, Aprime, I_basis);
  return SigmaData{std::move(fp), std::move(sig)};
}

AlgebraHom m_lambda(const Field& field, const Rat& lambda, int d) {
  AlgebraPtr kV = k_of_V(field, d);
  Mat m(d + 1, d + 1);
  m.at(0, 0) = field.one();
  for (int i = 1; i <= d; ++i) m.at(i, i) = field.reduce(lambda);
  AlgebraHom h(kV, kV, std::move(m));
  h.validate();
  return h;
}

AlgebraHom phi_v(const Field& field, int d, const Vec& v_coords) {
  AlgebraPtr keps = k_of_V(field, 1);
  AlgebraPtr kV = k_of_V(field, d);
  Mat m(d + 1, 2);
  m.at(0, 0) = field.one();
  for (int i = 1; i <= d; ++i) m.at(i, 1) = field.reduce(v_coords[i - 1]);
  AlgebraHom h(keps, kV, std::move(m));
  h.validate();
  return h;
}

bool is_isomorphism(const AlgebraHom& h) {
  if (h.source->dim != h.target->dim) return false;
  if (!h.is_valid_hom()) return false;
  return h.is_injective();
}

std::optional<AlgebraHom> find_isomorphism(const AlgebraPtr& A,
                                           const AlgebraPtr& B,
                                           long attempt_cap) {
  if (A->dim != B->dim) return std::nullopt;
  if (A->nilpotency_degree != B->nilpotency_degree) return std::nullopt;
  const Field& F = A->field;
  if (!F.is_finite())
    throw DefstackError(Errc::UnsupportedField,
                        "isomorphism search requires a finite field");
  long p = *F.size();
  int n = A->dim;
  int cells = (n - 1) * (n - 1);
  std::vector<long> digits(cells, 0);
  long attempts = 0;
  while (true) {
    if (++attempts > attempt_cap)
      throw DefstackError(Errc::EnumerationBudgetExceeded,
                          "isomorphism search exceeded cap");
    Mat m(n, n);
    m.at(0, 0) = F.one();
    for (int j = 1; j < n; ++j)
      for (int i = 1; i < n; ++i)
        m.at(i, j) = F.from_int(digits[(j - 1) * (n - 1) + (i - 1)]);
    AlgebraHom h(A, B, m);
    if (h.is_valid_hom() && h.is_injective()) return h;
    int k = 0;
    while (k < cells) {
      if (++digits[k] < p) break;
      digits[k] = 0;
      ++k;
    }
    if (k == cells) return std::nullopt;
  }
}

AlgebraPtr RandomAlgebraSource::algebra() {
  static const std::vector<
      std::pair<std::vector<std::string>, std::vector<std::string>>>
      seeds = {
          {{"x"}, {"x^2"}},
          {{"x"}, {"x^3"}},
          {{"x"}, {"x^4"}},
          {{"x"}, {"x^5"}},
          {{"x", "y"}, {"x^2", "x*y", "y^2"}},
          {{"x", "y"}, {"x^2", "y^2"}},
          {{"x", "y"}, {"x^3", "x*y", "y^2"}},
          {{"x", "y"}, {"x^2", "x*y", "y^3"}},
          {{"x", "y", "z"}, {"x^2", "y^2", "z^2", "x*y", "x*z", "y*z"}},
      };
  std::uniform_int_distribution<size_t> pick(0, seeds.size() - 1);
  size_t s = pick(rng);
  AlgebraPtr A = monomial_quotient(field, seeds[s].first, seeds[s].second);
  std::uniform_int_distribution<int> coin(0, 3);
  if (coin(rng) == 0 && A->dim > 2) {
    std::vector<Vec> m2 = A->max_ideal_power(2);
    if (!m2.empty()) {
      Vec g = zero_vec(A->dim);
      std::uniform_int_distribution<long> fe(0, *field.size() - 1);
      for (const Vec& b : m2)
        g = vec_add(field, g, vec_scale(field, field.from_int(fe(rng)), b));
      if (!vec_is_zero(g)) A = quotient_by_ideal(A, {g}).algebra;
    }
  }
  while (A->dim > max_dim) {
    std::vector<Vec> top = A->max_ideal_power(A->nilpotency_degree - 1);
    if (top.empty()) break;
    A = quotient_by_ideal(A, {top.front()}).algebra;
  }
  return A;
}

AlgebraHom RandomAlgebraSource::surjection() {
  AlgebraPtr B1 = algebra();
  std::uniform_int_distribution<int> howmany(0, 2);
  int g = howmany(rng);
  std::vector<Vec> gens;
  std::uniform_int_distribution<long> fe(0, *field.size() - 1);
  for (int t = 0; t < g; ++t) {
    Vec v = zero_vec(B1->dim);
    for (int i = 1; i < B1->dim; ++i) v[i] = field.from_int(fe(rng));
    if (!vec_is_zero(v)) gens.push_back(v);
  }
  if (gens.empty() && B1->dim > 1) {
    std::vector<Vec> top =
        B1->max_ideal_power(std::max(1, B1->nilpotency_degree - 1));
    if (!top.empty()) gens.push_back(top.front());
  }
  if (gens.empty()) return AlgebraHom::identity(B1);
  return quotient_by_ideal(B1, gens).projection;
}

}  // namespace defstack::artin
