#include "defstack/defun.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace defstack::defun {

using artin::base_field_algebra;
using artin::k_of_V;
using artin::m_lambda;
using artin::phi_v;
using artin::residue_hom;
using artin::sigma_from_product;
using linalg::unit_vec;
using linalg::zero_vec;

namespace {

struct DSU {
  std::vector<int> parent;
  explicit DSU(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

AlgebraHom structure_map(const AlgebraPtr& A) {
  Mat m(A->dim, 1);
  m.at(0, 0) = A->field.one();
  return AlgebraHom(base_field_algebra(A->field), A, std::move(m));
}

}  // namespace

DescentSquare make_descent_square(const AlgebraHom& p1, const AlgebraHom& p2) {
  return DescentSquare{artin::fiber_product(p1, p2), p1, p2};
}

int IsoClasses::class_of_object(const Obj& o) const {
  for (size_t i = 0; i < objects.size(); ++i)
    if (objects[i] == o) return class_of[i];
  return -1;
}

IsoClasses iso_classes(const DeformationProblem& P, const AlgebraPtr& A,
                       const Budget& budget) {
  if (A->dim > budget.max_dim)
    throw DefstackError(Errc::EnumerationBudgetExceeded,
                        "algebra dimension " + std::to_string(A->dim) +
                            " exceeds budget " + std::to_string(budget.max_dim));
  IsoClasses out;
  out.objects = P.objects(A, budget.max_objects);
  std::sort(out.objects.begin(), out.objects.end());
  int n = static_cast<int>(out.objects.size());
  out.budget_used = n;
  DSU dsu(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (dsu.find(i) == dsu.find(j)) continue;
      if (!P.morphisms(A, out.objects[i], out.objects[j], budget.max_objects)
               .empty())
        dsu.unite(i, j);
    }
  std::map<int, int> root_to_class;
  out.class_of.resize(n);
  for (int i = 0; i < n; ++i) {
    int r = dsu.find(i);
    auto it = root_to_class.find(r);
    if (it == root_to_class.end()) {
      int c = static_cast<int>(out.reps.size());
      root_to_class.emplace(r, c);
      out.reps.push_back(out.objects[i]);  // objects sorted: least member
      out.class_of[i] = c;
    } else {
      out.class_of[i] = it->second;
    }
  }
  return out;
}

int locate_class(const DeformationProblem& P, const AlgebraPtr& A,
                 const IsoClasses& cls, const Obj& o, const Budget& budget) {
  int direct = cls.class_of_object(o);
  if (direct >= 0) return direct;
  for (size_t c = 0; c < cls.reps.size(); ++c)
    if (!P.morphisms(A, o, cls.reps[c], budget.max_objects).empty())
      return static_cast<int>(c);
  throw DefstackError(Errc::BadInput, "object not found in any class");
}

namespace {

struct SquareClasses {
  DescentSquare sq;
  IsoClasses clsB, cls1, cls2, clsA;
  std::vector<std::pair<int, int>> image;
  std::set<std::pair<int, int>> rhs;

  SquareClasses(const DeformationProblem& P, const AlgebraHom& p1,
                const AlgebraHom& p2, const Budget& budget)
      : sq(make_descent_square(p1, p2)),
        clsB(iso_classes(P, sq.fp.algebra, budget)),
        cls1(iso_classes(P, p1.source, budget)),
        cls2(iso_classes(P, p2.source, budget)),
        clsA(iso_classes(P, p1.target, budget)) {
    for (const Obj& rep : clsB.reps) {
      Obj r1 = P.pushforward(sq.fp.to_first, rep);
      Obj r2 = P.pushforward(sq.fp.to_second, rep);
      image.emplace_back(locate_class(P, p1.source, cls1, r1, budget),
                         locate_class(P, p2.source, cls2, r2, budget));
    }
    std::vector<int> down1, down2;
    for (const Obj& rep : cls1.reps)
      down1.push_back(
          locate_class(P, p1.target, clsA, P.pushforward(p1, rep), budget));
    for (const Obj& rep : cls2.reps)
      down2.push_back(
          locate_class(P, p2.target, clsA, P.pushforward(p2, rep), budget));
    for (int c1 = 0; c1 < cls1.count(); ++c1)
      for (int c2 = 0; c2 < cls2.count(); ++c2)
        if (down1[c1] == down2[c2]) rhs.emplace(c1, c2);
  }

  bool surjective(std::string* witness) const {
    std::set<std::pair<int, int>> hit(image.begin(), image.end());
    for (const auto& pr : rhs)
      if (!hit.count(pr)) {
        if (witness) {
          std::ostringstream os;
          os << "unhit pair (class " << pr.first << ", class " << pr.second
             << ")";
          *witness = os.str();
        }
        return false;
      }
    return true;
  }

  bool injective(std::string* witness) const {
    std::map<std::pair<int, int>, int> seen;
    for (size_t i = 0; i < image.size(); ++i) {
      auto [it, fresh] = seen.emplace(image[i], static_cast<int>(i));
      if (!fresh) {
        if (witness) {
          std::ostringstream os;
          os << "classes " << it->second << " and " << i
             << " over the fiber product restrict to the same pair";
          *witness = os.str();
        }
        return false;
      }
    }
    return true;
  }
};

}  // namespace

CheckReport check_h1(const DeformationProblem& P, const AlgebraHom& p1,
                     const AlgebraHom& p2, const Budget& budget) {
  CheckReport rep;
  rep.check = "H1";
  artin::Extension e2 = artin::classify_extension(p2);
  if (!e2.tiny)
    throw DefstackError(Errc::BadInput, "H1 requires a tiny second leg");
  SquareClasses sc(P, p1, p2, budget);
  rep.lhs_classes = sc.clsB.count();
  rep.rhs_pairs = static_cast<long>(sc.rhs.size());
  rep.budget_used = sc.clsB.budget_used;
  rep.ok = sc.surjective(&rep.witness);
  return rep;
}

CheckReport check_h2(const DeformationProblem& P, const AlgebraPtr& Aprime,
                     const Budget& budget) {
  CheckReport rep;
  rep.check = "H2";
  AlgebraHom p1 = residue_hom(Aprime);
  AlgebraHom p2 = residue_hom(k_of_V(P.field(), 1));
  SquareClasses sc(P, p1, p2, budget);
  rep.lhs_classes = sc.clsB.count();
  rep.rhs_pairs = static_cast<long>(sc.rhs.size());
  rep.budget_used = sc.clsB.budget_used;
  std::string w1, w2;
  bool s = sc.surjective(&w1), i = sc.injective(&w2);
  rep.ok = s && i;
  rep.witness = s ? w2 : w1;
  return rep;
}

CheckReport check_h4(const DeformationProblem& P, const Extension& tiny,
                     const Budget& budget) {
  CheckReport rep;
  rep.check = "H4";
  if (!tiny.tiny) throw DefstackError(Errc::BadInput, "extension is not tiny");
  SquareClasses sc(P, tiny.map, tiny.map, budget);
  rep.lhs_classes = sc.clsB.count();
  rep.rhs_pairs = static_cast<long>(sc.rhs.size());
  rep.budget_used = sc.clsB.budget_used;
  std::string w1, w2;
  bool s = sc.surjective(&w1), i = sc.injective(&w2);
  rep.ok = s && i;
  rep.witness = s ? w2 : w1;
  return rep;
}

CheckReport h4_via_aut(const DeformationProblem& P, const Extension& tiny,
                       const Budget& budget) {
  CheckReport rep;
  rep.check = "H4-aut";
  if (!tiny.tiny) throw DefstackError(Errc::BadInput, "extension is not tiny");
  const AlgebraPtr& Ap = tiny.map.source;
  const AlgebraPtr& A = tiny.map.target;
  IsoClasses cls = iso_classes(P, Ap, budget);
  rep.budget_used = cls.budget_used;
  rep.lhs_classes = cls.count();
  for (const Obj& etap : cls.reps) {
    Obj eta = P.pushforward(tiny.map, etap);
    std::vector<Mor> up = P.morphisms(Ap, etap, etap, budget.max_objects);
    std::vector<Mor> down = P.morphisms(A, eta, eta, budget.max_objects);
    std::set<Mor> hit;
    for (const Mor& m : up) hit.insert(P.pushforward_mor(tiny.map, m));
    for (const Mor& m : down)
      if (!hit.count(m)) {
        rep.ok = false;
        rep.witness = "automorphism downstairs with no lift";
        return rep;
      }
  }
  rep.ok = true;
  return rep;
}

AstResult ast2(const DeformationProblem& P, const AlgebraHom& q1,
               const AlgebraHom& q2, const Obj& o1, const Obj& o2,
               const Budget& budget) {
  DescentSquare sq = make_descent_square(q1, q2);
  Obj r1 = P.pushforward(q1, o1);
  Obj r2 = P.pushforward(q2, o2);
  std::vector<Mor> isos = P.morphisms(q1.target, r1, r2, budget.max_objects);
  if (isos.empty())
    throw DefstackError(Errc::RestrictionMismatch,
                        "restrictions are not isomorphic; cannot glue");
  std::sort(isos.begin(), isos.end());
  Obj glued = P.glue(sq, o1, o2, isos.front());
  return AstResult{std::move(sq), std::move(glued)};
}

namespace {

Mor unique_base_morphism(const DeformationProblem& P, const AlgebraPtr& k_alg,
                         const Obj& a, const Obj& b, const Budget& budget) {
  std::vector<Mor> ms = P.morphisms(k_alg, a, b, budget.max_objects);
  if (ms.size() != 1)
    throw DefstackError(Errc::NotADeformationFunctor,
                        "base fiber is not the trivial groupoid");
  return ms.front();
}

}  // namespace

int TangentSpace::class_of_coords(const Vec& c) const {
  for (size_t i = 0; i < coords.size(); ++i)
    if (coords[i] == c) return static_cast<int>(i);
  return -1;
}

TangentSpace tangent_space(const DeformationProblem& P, int d,
                           const Budget& budget) {
  const Field& F = P.field();
  TangentSpace T;
  T.d = d;
  T.kI = k_of_V(F, d);
  if (d == 0) {
    T.classes = iso_classes(P, T.kI, budget);
    if (T.classes.count() != 1)
      throw DefstackError(Errc::NotADeformationFunctor,
                          "base fiber has more than one class");
    T.zero_class = 0;
    T.add = {{0}};
    T.scalar.assign(F.is_finite() ? *F.size() : 1, {0});
    T.dim = 0;
    T.coords = {Vec{}};
    return T;
  }
  if (!F.is_finite())
    throw DefstackError(Errc::UnsupportedField,
                        "tangent enumeration requires a finite field");
  CheckReport h2 = check_h2(P, T.kI, budget);
  if (!h2.ok)
    throw DefstackError(Errc::NotADeformationFunctor,
                        "H2 fails over k[I]: " + h2.witness);
  T.classes = iso_classes(P, T.kI, budget);
  int n = T.classes.count();
  Obj zeta = P.pushforward(structure_map(T.kI), P.base_object());
  T.zero_class = locate_class(P, T.kI, T.classes, zeta, budget);
  DescentSquare sq = make_descent_square(residue_hom(T.kI), residue_hom(T.kI));
  std::vector<Vec> I_basis;
  for (int l = 1; l <= d; ++l) I_basis.push_back(unit_vec(T.kI->dim, l));
  AlgebraHom sigma = sigma_from_product(sq.fp, T.kI, I_basis);
  AlgebraPtr k_alg = sq.p1.target;
  T.add.assign(n, std::vector<int>(n, -1));
  for (int c1 = 0; c1 < n; ++c1)
    for (int c2 = 0; c2 < n; ++c2) {
      const Obj& a = T.classes.reps[c1];
      const Obj& b = T.classes.reps[c2];
      Mor iso = unique_base_morphism(P, k_alg, P.pushforward(sq.p1, a),
                                     P.pushforward(sq.p2, b), budget);
      Obj glued = P.glue(sq, a, b, iso);
      Obj sum = P.pushforward(sigma, glued);
      T.add[c1][c2] = locate_class(P, T.kI, T.classes, sum, budget);
    }
  long p = *F.size();
  T.scalar.assign(p, std::vector<int>(n, -1));
  for (long lam = 0; lam < p; ++lam) {
    AlgebraHom ml = m_lambda(F, Rat(lam), d);
    for (int c = 0; c < n; ++c)
      T.scalar[lam][c] = locate_class(
          P, T.kI, T.classes, P.pushforward(ml, T.classes.reps[c]), budget);
  }
  auto fail = [&](const std::string& what) {
    throw DefstackError(Errc::NotADeformationFunctor,
                        "tangent structure violates " + what);
  };
  for (int a = 0; a < n; ++a) {
    if (T.add[a][T.zero_class] != a) fail("identity");
    for (int b = 0; b < n; ++b) {
      if (T.add[a][b] != T.add[b][a]) fail("commutativity");
      for (int c = 0; c < n; ++c)
        if (T.add[T.add[a][b]][c] != T.add[a][T.add[b][c]])
          fail("associativity");
    }
    bool has_inverse = false;
    for (int b = 0; b < n; ++b)
      if (T.add[a][b] == T.zero_class) has_inverse = true;
    if (!has_inverse) fail("inverses");
    if (T.scalar[1][a] != a) fail("unit scalar");
    for (long lam = 0; lam < p; ++lam)
      for (long mu = 0; mu < p; ++mu) {
        if (T.scalar[lam][T.scalar[mu][a]] != T.scalar[(lam * mu) % p][a])
          fail("scalar associativity");
        if (T.add[T.scalar[lam][a]][T.scalar[mu][a]] !=
            T.scalar[(lam + mu) % p][a])
          fail("distributivity over scalars");
      }
    for (long lam = 0; lam < p; ++lam)
      for (int b = 0; b < n; ++b)
        if (T.scalar[lam][T.add[a][b]] !=
            T.add[T.scalar[lam][a]][T.scalar[lam][b]])
          fail("distributivity over vectors");
  }
  std::map<int, Vec> span;
  span[T.zero_class] = Vec{};
  for (int c = 0; c < n; ++c) {
    if (span.count(c)) continue;
    T.basis_classes.push_back(c);
    std::map<int, Vec> grown;
    for (const auto& [cls, co] : span)
      for (long t = 0; t < p; ++t) {
        int shifted = T.add[cls][T.scalar[t][c]];
        Vec co2 = co;
        co2.push_back(Rat(t));
        grown.emplace(shifted, std::move(co2));
      }
    span = std::move(grown);
  }
  T.dim = static_cast<int>(T.basis_classes.size());
  long expect = 1;
  for (int i = 0; i < T.dim; ++i) expect *= p;
  if (expect != n) fail("cardinality p^dim");
  T.coords.resize(n);
  for (const auto& [cls, co] : span) T.coords[cls] = co;
  return T;
}

int AutSpace::index_of(const Mor& m) const {
  for (size_t i = 0; i < elements.size(); ++i)
    if (elements[i] == m) return static_cast<int>(i);
  return -1;
}

Mor add_aut_to_identity(const DeformationProblem& P, const AlgebraPtr& Aprime,
                        const std::vector<Vec>& I_basis, const Obj& etap,
                        const Mor& a, const Budget& budget) {
  const Field& F = P.field();
  int d = static_cast<int>(I_basis.size());
  AlgebraPtr kI = k_of_V(F, d);
  DescentSquare sq = make_descent_square(residue_hom(Aprime), residue_hom(kI));
  AlgebraHom sigma = sigma_from_product(sq.fp, Aprime, I_basis);
  Obj zeta = P.pushforward(structure_map(kI), P.base_object());
  AlgebraPtr k_alg = sq.p1.target;
  Mor iso = unique_base_morphism(P, k_alg, P.pushforward(sq.p1, etap),
                                 P.pushforward(sq.p2, zeta), budget);
  Obj glued = P.glue(sq, etap, zeta, iso);
  Obj back = P.pushforward(sigma, glued);
  if (!(back == etap))
    throw DefstackError(Errc::GluingUnavailable,
                        "sigma pushforward did not return the object");
  Mor idm = P.identity_mor(Aprime, etap);
  Mor g = P.glue_mor(sq, etap, zeta, iso, etap, zeta, iso, idm, a);
  return P.pushforward_mor(sigma, g);
}

AutSpace aut_space(const DeformationProblem& P, int d, const Budget& budget) {
  const Field& F = P.field();
  if (!F.is_finite())
    throw DefstackError(Errc::UnsupportedField,
                        "aut enumeration requires a finite field");
  AutSpace A;
  A.d = d;
  A.kI = k_of_V(F, d);
  CheckReport h2 = check_h2(P, A.kI, budget);
  if (!h2.ok)
    throw DefstackError(Errc::NotADeformationFunctor,
                        "H2 fails over k[I]: " + h2.witness);
  A.zeta = P.pushforward(structure_map(A.kI), P.base_object());
  A.elements = P.morphisms(A.kI, A.zeta, A.zeta, budget.max_objects);
  std::sort(A.elements.begin(), A.elements.end());
  int n = static_cast<int>(A.elements.size());
  Mor idm = P.identity_mor(A.kI, A.zeta);
  A.identity_index = A.index_of(idm);
  if (A.identity_index < 0)
    throw DefstackError(Errc::BadInput, "identity missing from Aut");
  A.comp.assign(n, std::vector<int>(n, -1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mor c = P.compose(A.kI, A.elements[i], A.elements[j]);
      A.comp[i][j] = A.index_of(c);
      if (A.comp[i][j] < 0)
        throw DefstackError(Errc::BadInput, "Aut not closed under composition");
    }
  std::vector<Vec> I_basis;
  for (int l = 1; l <= d; ++l) I_basis.push_back(unit_vec(A.kI->dim, l));
  DescentSquare sq = make_descent_square(residue_hom(A.kI), residue_hom(A.kI));
  AlgebraHom sigma = sigma_from_product(sq.fp, A.kI, I_basis);
  AlgebraPtr k_alg = sq.p1.target;
  Mor iso = unique_base_morphism(P, k_alg, P.pushforward(sq.p1, A.zeta),
                                 P.pushforward(sq.p2, A.zeta), budget);
  Obj glued = P.glue(sq, A.zeta, A.zeta, iso);
  Obj back = P.pushforward(sigma, glued);
  std::optional<Mor> transport;
  if (!(back == A.zeta)) {
    std::vector<Mor> t = P.morphisms(A.kI, back, A.zeta, budget.max_objects);
    if (t.empty())
      throw DefstackError(Errc::GluingUnavailable,
                          "sigma image not isomorphic to zeta");
    std::sort(t.begin(), t.end());
    transport = t.front();
  }
  A.add.assign(n, std::vector<int>(n, -1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mor g = P.glue_mor(sq, A.zeta, A.zeta, iso, A.zeta, A.zeta, iso,
                         A.elements[i], A.elements[j]);
      Mor sum = P.pushforward_mor(sigma, g);
      if (transport)
        sum = P.compose(A.kI, *transport,
                        P.compose(A.kI, sum, P.invert(A.kI, *transport)));
      A.add[i][j] = A.index_of(sum);
      if (A.add[i][j] < 0)
        throw DefstackError(Errc::BadInput, "sigma sum left Aut");
    }
  long p = *F.size();
  A.scalar.assign(p, std::vector<int>(n, -1));
  for (long lam = 0; lam < p; ++lam) {
    AlgebraHom ml = m_lambda(F, Rat(lam), d);
    Obj moved = P.pushforward(ml, A.zeta);
    std::optional<Mor> tr;
    if (!(moved == A.zeta)) {
      std::vector<Mor> t = P.morphisms(A.kI, moved, A.zeta, budget.max_objects);
      if (t.empty())
        throw DefstackError(Errc::BadInput, "m_lambda image escaped");
      std::sort(t.begin(), t.end());
      tr = t.front();
    }
    for (int i = 0; i < n; ++i) {
      Mor m = P.pushforward_mor(ml, A.elements[i]);
      if (tr)
        m = P.compose(A.kI, *tr, P.compose(A.kI, m, P.invert(A.kI, *tr)));
      A.scalar[lam][i] = A.index_of(m);
      if (A.scalar[lam][i] < 0)
        throw DefstackError(Errc::BadInput, "scalar left Aut");
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (A.comp[i][j] != A.add[i][j])
        throw DefstackError(Errc::NotADeformationFunctor,
                            "composition disagrees with sigma addition");
      if (A.comp[i][j] != A.comp[j][i])
        throw DefstackError(Errc::NotADeformationFunctor,
                            "Aut(zeta_I) is not abelian");
    }
  std::map<int, Vec> span;
  span[A.identity_index] = Vec{};
  for (int c = 0; c < n; ++c) {
    if (span.count(c)) continue;
    A.basis_elements.push_back(c);
    std::map<int, Vec> grown;
    for (const auto& [el, co] : span)
      for (long t = 0; t < p; ++t) {
        int shifted = A.add[el][A.scalar[t][c]];
        Vec co2 = co;
        co2.push_back(Rat(t));
        grown.emplace(shifted, std::move(co2));
      }
    span = std::move(grown);
  }
  A.dim = static_cast<int>(A.basis_elements.size());
  long expect = 1;
  for (int i = 0; i < A.dim; ++i) expect *= p;
  if (expect != n)
    throw DefstackError(Errc::NotADeformationFunctor,
                        "Aut cardinality is not p^dim");
  A.coords.resize(n);
  for (const auto& [el, co] : span) A.coords[el] = co;
  return A;
}

TensorCheckReport tensor_decomposition_check(const DeformationProblem& P,
                                             int d, const Budget& budget) {
  TensorCheckReport rep;
  const Field& F = P.field();
  long p = *F.size();
  TangentSpace T1 = tangent_space(P, 1, budget);
  TangentSpace Td = tangent_space(P, d, budget);
  int t = T1.classes.count();
  long expect = 1;
  for (int i = 0; i < d; ++i) expect *= t;
  rep.t_card_lhs = expect;
  rep.t_card_rhs = Td.classes.count();
  if (expect != Td.classes.count()) {
    rep.ok = false;
    rep.detail = "|T_V| != |T|^d";
    return rep;
  }
  std::vector<AlgebraHom> phis;
  for (int i = 1; i <= d; ++i) {
    Vec v = zero_vec(d);
    v[i - 1] = F.one();
    phis.push_back(phi_v(F, d, v));
  }
  auto theta = [&](const std::vector<int>& tuple) {
    int acc = Td.zero_class;
    for (int i = 0; i < d; ++i) {
      Obj moved = P.pushforward(phis[i], T1.classes.reps[tuple[i]]);
      int c = locate_class(P, Td.kI, Td.classes, moved, budget);
      acc = Td.add[acc][c];
    }
    return acc;
  };
  std::vector<int> tuple(d, 0);
  std::map<std::vector<int>, int> theta_of;
  std::set<int> hit;
  bool inj = true;
  while (true) {
    int img = theta(tuple);
    theta_of[tuple] = img;
    if (!hit.insert(img).second) inj = false;
    int k = 0;
    while (k < d) {
      if (++tuple[k] < t) break;
      tuple[k] = 0;
      ++k;
    }
    if (k == d) break;
  }
  if (!inj || static_cast<long>(hit.size()) != rep.t_card_rhs) {
    rep.ok = false;
    rep.detail = "phi_v map on T is not bijective";
    return rep;
  }
  for (const auto& [x, tx] : theta_of)
    for (const auto& [y, ty] : theta_of) {
      std::vector<int> s(d);
      for (int i = 0; i < d; ++i) s[i] = T1.add[x[i]][y[i]];
      if (theta_of.at(s) != Td.add[tx][ty]) {
        rep.ok = false;
        rep.detail = "phi_v map on T is not additive";
        return rep;
      }
    }
  for (long lam = 0; lam < p; ++lam)
    for (const auto& [x, tx] : theta_of) {
      std::vector<int> s(d);
      for (int i = 0; i < d; ++i) s[i] = T1.scalar[lam][x[i]];
      if (theta_of.at(s) != Td.scalar[lam][tx]) {
        rep.ok = false;
        rep.detail = "phi_v map on T is not homogeneous";
        return rep;
      }
    }
  AutSpace A1 = aut_space(P, 1, budget);
  AutSpace Ad = aut_space(P, d, budget);
  int a = static_cast<int>(A1.elements.size());
  long expect_a = 1;
  for (int i = 0; i < d; ++i) expect_a *= a;
  rep.a_card_lhs = expect_a;
  rep.a_card_rhs = static_cast<long>(Ad.elements.size());
  if (expect_a != rep.a_card_rhs) {
    rep.ok = false;
    rep.detail = "|A_V| != |A|^d";
    return rep;
  }
  auto iota = [&](int i, const Mor& m) {
    Mor moved = P.pushforward_mor(phis[i], m);
    Obj img_obj = P.pushforward(phis[i], A1.zeta);
    if (!(img_obj == Ad.zeta)) {
      std::vector<Mor> tr =
          P.morphisms(Ad.kI, img_obj, Ad.zeta, budget.max_objects);
      if (tr.empty())
        throw DefstackError(Errc::BadInput, "phi_v image escaped");
      std::sort(tr.begin(), tr.end());
      moved = P.compose(Ad.kI, tr.front(),
                        P.compose(Ad.kI, moved, P.invert(Ad.kI, tr.front())));
    }
    return Ad.index_of(moved);
  };
  std::vector<int> atup(d, 0);
  std::set<int> ahit;
  bool ainj = true;
  while (true) {
    int acc = Ad.identity_index;
    for (int i = 0; i < d; ++i) {
      int idx = iota(i, A1.elements[atup[i]]);
      if (idx < 0) {
        rep.ok = false;
        rep.detail = "phi_v image of an automorphism left A_V";
        return rep;
      }
      acc = Ad.add[acc][idx];
    }
    if (!ahit.insert(acc).second) ainj = false;
    int k = 0;
    while (k < d) {
      if (++atup[k] < a) break;
      atup[k] = 0;
      ++k;
    }
    if (k == d) break;
  }
  if (!ainj || static_cast<long>(ahit.size()) != rep.a_card_rhs) {
    rep.ok = false;
    rep.detail = "phi_v map on A is not bijective";
    return rep;
  }
  rep.ok = true;
  return rep;
}

LiftTorsor lift_torsor(const DeformationProblem& P, const Obj& eta,
                       const Extension& ext, const TangentSpace& T,
                       const Budget& budget) {
  if (!ext.small)
    throw DefstackError(Errc::BadInput, "lift torsor needs a small extension");
  const AlgebraPtr& Ap = ext.map.source;
  const AlgebraPtr& A = ext.map.target;
  int d = static_cast<int>(ext.kernel.size());
  if (T.d != d)
    throw DefstackError(Errc::BadInput, "tangent space dimension mismatch");
  LiftTorsor out{eta, ext, {}, {}};
  struct Pair {
    Obj lift;
    Mor marking;
    bool operator<(const Pair& o) const {
      if (!(lift == o.lift)) return lift < o.lift;
      return marking < o.marking;
    }
  };
  std::vector<Pair> pairs;
  for (const Obj& cand : P.objects(Ap, budget.max_objects)) {
    Obj down = P.pushforward(ext.map, cand);
    for (const Mor& phi : P.morphisms(A, eta, down, budget.max_objects))
      pairs.push_back({cand, phi});
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<int> cls(pairs.size(), -1);
  int nclasses = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (cls[i] >= 0) continue;
    cls[i] = nclasses;
    out.elements.push_back({pairs[i].lift, pairs[i].marking});
    for (size_t j = i + 1; j < pairs.size(); ++j) {
      if (cls[j] >= 0) continue;
      for (const Mor& psi :
           P.morphisms(Ap, pairs[i].lift, pairs[j].lift, budget.max_objects)) {
        Mor moved =
            P.compose(A, P.pushforward_mor(ext.map, psi), pairs[i].marking);
        if (moved == pairs[j].marking) {
          cls[j] = nclasses;
          break;
        }
      }
    }
    ++nclasses;
  }
  if (d == 0 || out.elements.empty()) {
    out.action.assign(std::max(T.classes.count(), 1),
                      std::vector<int>(out.elements.size()));
    for (auto& row : out.action)
      for (size_t e = 0; e < out.elements.size(); ++e)
        row[e] = static_cast<int>(e);
    return out;
  }
  auto element_class = [&](const Obj& lift, const Mor& marking) {
    for (size_t e = 0; e < out.elements.size(); ++e)
      if (out.elements[e].lift == lift && out.elements[e].marking == marking)
        return static_cast<int>(e);
    for (size_t e = 0; e < out.elements.size(); ++e)
      for (const Mor& psi :
           P.morphisms(Ap, lift, out.elements[e].lift, budget.max_objects)) {
        Mor moved = P.compose(A, P.pushforward_mor(ext.map, psi), marking);
        if (moved == out.elements[e].marking) return static_cast<int>(e);
      }
    throw DefstackError(Errc::BadInput, "torsor element escaped enumeration");
  };
  DescentSquare sq = make_descent_square(residue_hom(Ap), residue_hom(T.kI));
  AlgebraHom sigma = sigma_from_product(sq.fp, Ap, ext.kernel);
  AlgebraPtr k_alg = sq.p1.target;
  out.action.assign(T.classes.count(),
                    std::vector<int>(out.elements.size(), -1));
  for (int tc = 0; tc < T.classes.count(); ++tc) {
    const Obj& tau = T.classes.reps[tc];
    for (size_t e = 0; e < out.elements.size(); ++e) {
      const Obj& lift = out.elements[e].lift;
      Mor iso = unique_base_morphism(P, k_alg, P.pushforward(sq.p1, lift),
                                     P.pushforward(sq.p2, tau), budget);
      Obj glued = P.glue(sq, lift, tau, iso);
      Obj shifted = P.pushforward(sigma, glued);
      // p ∘ sigma = p ∘ pr1: the old marking still marks the shifted lift
      out.action[tc][e] = element_class(shifted, out.elements[e].marking);
    }
  }
  return out;
}

bool is_pseudotorsor(const LiftTorsor& t, const TangentSpace& T) {
  if (t.elements.empty()) return true;
  size_t n = t.elements.size();
  for (size_t e = 0; e < n; ++e)
    if (t.action[T.zero_class][e] != static_cast<int>(e)) return false;
  for (int a = 0; a < T.classes.count(); ++a)
    for (int b = 0; b < T.classes.count(); ++b)
      for (size_t e = 0; e < n; ++e)
        if (t.action[T.add[a][b]][e] !=
            t.action[a][static_cast<size_t>(t.action[b][e])])
          return false;
  for (size_t e = 0; e < n; ++e) {
    std::set<int> orbit;
    for (int a = 0; a < T.classes.count(); ++a) {
      if (t.action[a][e] == static_cast<int>(e) && a != T.zero_class)
        return false;
      orbit.insert(t.action[a][e]);
    }
    if (orbit.size() != n) return false;
  }
  return true;
}

AutTorsor aut_torsor(const DeformationProblem& P, const Obj& lift,
                     const Mor& base_aut, const Extension& ext,
                     const AutSpace& A_I, const Budget& budget) {
  if (!ext.small)
    throw DefstackError(Errc::BadInput, "aut torsor needs a small extension");
  const AlgebraPtr& Ap = ext.map.source;
  AutTorsor out{lift, base_aut, {}, {}};
  for (const Mor& m : P.morphisms(Ap, lift, lift, budget.max_objects))
    if (P.pushforward_mor(ext.map, m) == base_aut) out.elements.push_back(m);
  std::sort(out.elements.begin(), out.elements.end());
  int n = static_cast<int>(out.elements.size());
  int na = static_cast<int>(A_I.elements.size());
  out.action.assign(na, std::vector<int>(n, -1));
  if (n == 0) return out;
  for (int a = 0; a < na; ++a) {
    Mor shift =
        add_aut_to_identity(P, Ap, ext.kernel, lift, A_I.elements[a], budget);
    for (int e = 0; e < n; ++e) {
      Mor moved = P.compose(Ap, out.elements[e], shift);
      for (int f = 0; f < n; ++f)
        if (out.elements[f] == moved) out.action[a][e] = f;
      if (out.action[a][e] < 0)
        throw DefstackError(Errc::BadInput, "aut torsor action escaped");
    }
  }
  return out;
}

bool is_pseudotorsor(const AutTorsor& t, const AutSpace& A_I) {
  size_t n = t.elements.size();
  if (n == 0) return true;
  for (size_t e = 0; e < n; ++e)
    if (t.action[A_I.identity_index][e] != static_cast<int>(e)) return false;
  int na = static_cast<int>(A_I.elements.size());
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < na; ++b)
      for (size_t e = 0; e < n; ++e)
        if (t.action[A_I.add[a][b]][e] !=
            t.action[a][static_cast<size_t>(t.action[b][e])])
          return false;
  for (size_t e = 0; e < n; ++e) {
    std::set<int> orbit;
    for (int a = 0; a < na; ++a) {
      if (t.action[a][e] == static_cast<int>(e) && a != A_I.identity_index)
        return false;
      orbit.insert(t.action[a][e]);
    }
    if (orbit.size() != n) return false;
  }
  return true;
}

Mor aut_difference(const DeformationProblem& P, const AlgebraPtr& Aprime,
                   const std::vector<Vec>& I_basis, const Obj& etap,
                   const Mor& phi, const AutSpace& A_I, const Budget& budget) {
  for (const Mor& a : A_I.elements)
    if (add_aut_to_identity(P, Aprime, I_basis, etap, a, budget) == phi)
      return a;
  throw DefstackError(Errc::BadInput,
                      "automorphism is not of the form id + a");
}

std::vector<AlgebraHom> prorep_evaluate(const ProRep& R, const AlgebraPtr& A,
                                        const Budget& budget) {
  const Field& F = A->field;
  if (!F.is_finite())
    throw DefstackError(Errc::UnsupportedField,
                        "hom enumeration requires a finite field");
  if (R.trunc_level < A->nilpotency_degree)
    throw DefstackError(Errc::TruncationTooShallow,
                        "truncation level " + std::to_string(R.trunc_level) +
                            " < nilpotency degree " +
                            std::to_string(A->nilpotency_degree));
  long p = *F.size();
  int cells = (R.R->dim - 1) * (A->dim - 1);
  double count = 1;
  for (int i = 0; i < cells; ++i) {
    count *= double(p);
    if (count > double(budget.max_objects) * 4096)
      throw DefstackError(Errc::EnumerationBudgetExceeded,
                          "hom search space too large");
  }
  std::vector<AlgebraHom> out;
  std::vector<long> digits(std::max(cells, 1), 0);
  while (true) {
    Mat m(A->dim, R.R->dim);
    m.at(0, 0) = F.one();
    for (int j = 1; j < R.R->dim; ++j)
      for (int i = 1; i < A->dim; ++i)
        m.at(i, j) = F.from_int(digits[(j - 1) * (A->dim - 1) + (i - 1)]);
    AlgebraHom h(R.R, A, m);
    if (h.is_valid_hom()) out.push_back(h);
    int k = 0;
    while (k < cells) {
      if (++digits[k] < p) break;
      digits[k] = 0;
      ++k;
    }
    if (k >= cells) break;
  }
  return out;
}

DimBoundsReport dim_bounds_report(int t_dim, const std::vector<int>& v_dims,
                                  const ProRep& R) {
  DimBoundsReport rep;
  rep.t_dim = t_dim;
  rep.obstruction_total = 0;
  for (int v : v_dims) rep.obstruction_total += v;
  rep.krull_dim = R.krull_dim;
  rep.lower = t_dim - rep.obstruction_total;
  rep.upper = t_dim;
  rep.lower_ok = rep.lower <= rep.krull_dim;
  rep.upper_ok = rep.krull_dim <= rep.upper;
  rep.violated = !(rep.lower_ok && rep.upper_ok);
  rep.lci_equality = rep.lower_ok && rep.upper_ok && rep.krull_dim == rep.lower;
  rep.smooth_criterion = rep.obstruction_total == 0 && !rep.violated;
  std::ostringstream os;
  os << rep.lower << " <= dim R - dim Lambda = " << rep.krull_dim
     << " <= " << rep.upper << (rep.violated ? " VIOLATED" : " holds");
  if (rep.lci_equality) os << "; local complete intersection ring";
  if (rep.smooth_criterion) os << "; R smooth over Lambda";
  rep.summary = os.str();
  return rep;
}

bool lift_exists(const DeformationProblem& P, const Obj& eta,
                 const Extension& ext, const Budget& budget) {
  const AlgebraPtr& Ap = ext.map.source;
  const AlgebraPtr& A = ext.map.target;
  for (const Obj& cand : P.objects(Ap, budget.max_objects)) {
    Obj down = P.pushforward(ext.map, cand);
    if (down == eta) return true;
    if (!P.morphisms(A, down, eta, budget.max_objects).empty()) return true;
  }
  return false;
}

ObstructionTheory brute_force_theory() {
  ObstructionTheory t;
  t.n = 1;
  t.v_dims = {1};
  t.eval = [](const DeformationProblem& P, const Obj& eta,
              const Extension& ext) {
    Budget b;
    int d = static_cast<int>(ext.kernel.size());
    Vec value = zero_vec(std::max(d, 1));
    if (!lift_exists(P, eta, ext, b)) value[0] = Rat(1);
    return std::pair<int, Vec>(1, value);
  };
  return t;
}

std::pair<int, Vec> obstruction_evaluate(const DeformationProblem& P,
                                         const ObstructionTheory& theory,
                                         const Obj& eta, const Extension& ext,
                                         const Budget& budget) {
  if (!ext.small)
    throw DefstackError(Errc::BadInput, "obstructions need a small extension");
  auto [m, value] = theory.eval(P, eta, ext);
  bool vanish = linalg::vec_is_zero(value);
  if (m < 1 || m > theory.n)
    throw DefstackError(Errc::FunctorialityViolation,
                        "obstruction index out of range");
  if (vanish && m != theory.n)
    throw DefstackError(Errc::FunctorialityViolation,
                        "vanishing obstruction must sit at the last index");
  bool exists = lift_exists(P, eta, ext, budget);
  if (exists != (vanish && m == theory.n))
    throw DefstackError(Errc::FunctorialityViolation,
                        "theory disagrees with the lift-existence oracle");
  // functoriality along the devissage chain of the extension
  if (ext.kernel.size() > 1) {
    const Field& F = P.field();
    std::vector<Extension> chain = artin::factor_into_tiny(ext.map);
    AlgebraHom down = AlgebraHom::identity(ext.map.source);
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
      down = chain[i].map.compose(down);
      Mat sec(ext.map.source->dim, down.target->dim);
      bool ok = true;
      for (int j = 0; j < down.target->dim; ++j) {
        auto s = linalg::solve(F, down.matrix, unit_vec(down.target->dim, j));
        if (!s) {
          ok = false;
          break;
        }
        for (int r = 0; r < ext.map.source->dim; ++r) sec.at(r, j) = (*s)[r];
      }
      if (!ok) continue;
      AlgebraHom mid(down.target, ext.map.target,
                     linalg::mul(F, ext.map.matrix, sec));
      if (!mid.is_valid_hom()) continue;
      Extension mid_ext = artin::classify_extension(mid);
      if (!mid_ext.small) continue;
      auto [m2, v2] = theory.eval(P, eta, mid_ext);
      bool v2zero = linalg::vec_is_zero(v2);
      if (vanish && m == theory.n && !(v2zero && m2 == theory.n))
        throw DefstackError(Errc::FunctorialityViolation,
                            "devissage image of a vanishing obstruction");
      if (!vanish && m2 < m)
        throw DefstackError(Errc::FunctorialityViolation,
                            "obstruction index decreased along devissage");
    }
  }
  return {m, value};
}

ProblemAudit audit_problem(const DeformationProblem& P,
                           const std::vector<AlgebraPtr>& test_algebras,
                           const Budget& budget) {
  ProblemAudit audit;
  auto fail = [&](const std::string& s) {
    audit.ok = false;
    audit.failures.push_back(s);
  };
  AlgebraPtr k_alg = base_field_algebra(P.field());
  std::vector<Obj> base_objs = P.objects(k_alg, budget.max_objects);
  IsoClasses base_cls = iso_classes(P, k_alg, budget);
  if (base_cls.count() != 1) fail("base fiber has more than one class");
  for (const Obj& a : base_objs)
    for (const Obj& b : base_objs)
      if (P.morphisms(k_alg, a, b, budget.max_objects).size() != 1)
        fail("base fiber is not the trivial groupoid");
  for (const AlgebraPtr& A : test_algebras) {
    std::vector<Obj> objs = P.objects(A, budget.max_objects);
    for (const Obj& o : objs) {
      Mor id = P.identity_mor(A, o);
      for (const Mor& m : P.morphisms(A, o, o, budget.max_objects)) {
        Mor inv = P.invert(A, m);
        if (!(P.compose(A, inv, m) == id)) fail("morphism not invertible");
      }
    }
    AlgebraHom res = residue_hom(A);
    AlgebraHom st = structure_map(A);
    for (const Obj& o : objs) {
      Obj same = P.pushforward(AlgebraHom::identity(A), o);
      if (!(same == o)) fail("identity pushforward changed the object");
      Obj down = P.pushforward(res, o);
      Obj around = P.pushforward(st, down);
      Obj direct = P.pushforward(st.compose(res), o);
      if (!(around == direct)) fail("pushforward is not functorial");
    }
  }
  return audit;
}

}  // namespace defstack::defun
