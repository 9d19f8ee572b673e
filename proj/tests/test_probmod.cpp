#include <doctest.h>

#include "defstack/probmod.hpp"

using namespace defstack;
using namespace defstack::probmod;
using defstack::Budget;
using defun::iso_classes;

namespace {

Field F2() { return Field::prime(2); }

BasePtr dual_base(const Field& F) {
  // F[u]/(u^2)
  return base_from_local(artin::monomial_quotient(F, {"u"}, {"u^2"}));
}

BasePtr plane_base(const Field& F) {
  // F[u,v]/(u,v)^2
  return base_from_local(
      artin::monomial_quotient(F, {"u", "v"}, {"u^2", "u*v", "v^2"}));
}

ModuleProblem residue_module(const BasePtr& B) {
  // M = k with every maximal-ideal element acting by zero
  std::vector<Mat> action;
  action.push_back(Mat::identity(1));
  for (int i = 1; i < B->dim; ++i) action.push_back(Mat(1, 1));
  return ModuleProblem(B, action);
}

QuotientProblem line_in_plane(const Field& F) {
  // B = k, E = k^2 ->> F = k by the first coordinate
  BasePtr B = make_base_algebra(F, {"1"}, {F.one()});
  Mat proj(1, 2);
  proj.at(0, 0) = F.one();
  return QuotientProblem(B, {Mat::identity(2)}, proj);
}

}  // namespace

TEST_CASE("module problem objects over the base and dual numbers") {
  Field F = F2();
  ModuleProblem P = residue_module(dual_base(F));
  Budget budget;
  AlgebraPtr k_alg = artin::base_field_algebra(F);
  CHECK(P.objects(k_alg, 100).size() == 1);
  AlgebraPtr keps = artin::k_of_V(F, 1);
  // u |-> 0 or u |-> eps: two objects and two classes
  auto cls = iso_classes(P, keps, budget);
  CHECK(cls.objects.size() == 2);
  CHECK(cls.count() == 2);
}

TEST_CASE("trivial base gives a single object over every algebra") {
  Field F = F2();
  BasePtr B = make_base_algebra(F, {"1"}, {F.one()});
  std::vector<Mat> act = {Mat::identity(1)};
  ModuleProblem P(B, act);
  for (const char* rel : {"x^2", "x^3"}) {
    AlgebraPtr A = artin::monomial_quotient(F, {"x"}, {rel});
    CHECK(P.objects(A, 100).size() == 1);
  }
}

TEST_CASE("module problem validates its input") {
  Field F = F2();
  BasePtr B = dual_base(F);
  // u acting by an idempotent that breaks u^2 = 0
  std::vector<Mat> bad = {Mat::identity(1), Mat::identity(1)};
  CHECK_THROWS_AS(ModuleProblem(B, bad), DefstackError);
}

TEST_CASE("oracle dimensions for the worked fixtures") {
  Field F = F2();
  // B = F2[u]/(u^2), M = k: Ext^1 = 1, Hom = 1
  BasePtr B1 = dual_base(F);
  std::vector<Mat> M1 = {Mat::identity(1), Mat(1, 1)};
  CHECK(ext1_dimension_bruteforce(B1, M1) == 1);
  CHECK(hom_dimension(B1, M1, M1) == 1);
  CHECK(module_tangent_dim_linear(B1, M1) == 1);
  CHECK(module_aut_dim_linear(B1, M1) == 1);

  // B = F2[u,v]/(u,v)^2, M = k: Ext^1 = 2
  BasePtr B2 = plane_base(F);
  std::vector<Mat> M2 = {Mat::identity(1), Mat(1, 1), Mat(1, 1)};
  CHECK(ext1_dimension_bruteforce(B2, M2) == 2);
  CHECK(module_tangent_dim_linear(B2, M2) == 2);

  // B = k, M = k^r: tangent zero, aut r^2
  BasePtr Bk = make_base_algebra(F, {"1"}, {F.one()});
  std::vector<Mat> Mk = {Mat::identity(2)};
  CHECK(module_tangent_dim_linear(Bk, Mk) == 0);
  CHECK(module_aut_dim_linear(Bk, Mk) == 4);

  // linear path agrees over Q
  Field Q = Field::rationals();
  BasePtr B1q = base_from_local(artin::monomial_quotient(Q, {"u"}, {"u^2"}));
  std::vector<Mat> M1q = {Mat::identity(1), Mat(1, 1)};
  CHECK(module_tangent_dim_linear(B1q, M1q) == 1);
  CHECK(module_aut_dim_linear(B1q, M1q) == 1);
}

TEST_CASE("quotient problem: lines lifting a line") {
  Field F = F2();
  QuotientProblem P = line_in_plane(F);
  Budget budget;
  AlgebraPtr keps = artin::k_of_V(F, 1);
  auto cls = iso_classes(P, keps, budget);
  // kernel G = span(e2); lifts parametrized by one maximal-ideal entry
  CHECK(cls.objects.size() == 2);
  CHECK(cls.count() == 2);  // discrete groupoid
  // tangent dimension oracle: Hom(G, F) = Hom(k, k) = k
  Mat proj(1, 2);
  proj.at(0, 0) = F.one();
  BasePtr B = make_base_algebra(F, {"1"}, {F.one()});
  CHECK(quotient_tangent_dim_oracle(B, {Mat::identity(2)}, proj) == 1);
  // all automorphisms trivial
  for (const auto& o : cls.objects)
    CHECK(P.morphisms(keps, o, o, 100).size() == 1);
}

TEST_CASE("quotient problem: F = E deforms trivially") {
  Field F = F2();
  BasePtr B = make_base_algebra(F, {"1"}, {F.one()});
  QuotientProblem P(B, {Mat::identity(2)}, Mat::identity(2));
  AlgebraPtr keps = artin::k_of_V(F, 1);
  CHECK(P.objects(keps, 100).size() == 1);
}

TEST_CASE("module glue restricts to its inputs") {
  Field F = F2();
  ModuleProblem P = residue_module(dual_base(F));
  AlgebraPtr keps = artin::k_of_V(F, 1);
  artin::AlgebraHom res = artin::residue_hom(keps);
  auto objs = P.objects(keps, 100);
  REQUIRE(objs.size() == 2);
  Budget budget;
  for (const auto& o1 : objs)
    for (const auto& o2 : objs) {
      auto ast = defun::ast2(P, res, res, o1, o2, budget);
      CHECK(P.pushforward(ast.square.fp.to_first, ast.obj) == o1);
      // second restriction isomorphic to o2
      Obj r2 = P.pushforward(ast.square.fp.to_second, ast.obj);
      CHECK(!P.morphisms(keps, r2, o2, 100).empty());
    }
}

TEST_CASE("module glue over k[eps] x_k k[eps] counts H2 pairs") {
  Field F = F2();
  ModuleProblem P = residue_module(dual_base(F));
  Budget budget;
  AlgebraPtr keps = artin::k_of_V(F, 1);
  artin::AlgebraHom res = artin::residue_hom(keps);
  auto sq = defun::make_descent_square(res, res);
  auto cls_eps = iso_classes(P, keps, budget);
  auto cls_fp = iso_classes(P, sq.fp.algebra, budget);
  CHECK(cls_fp.count() == cls_eps.count() * cls_eps.count());
}

TEST_CASE("glued object is independent of the chosen identification") {
  Field F = F2();
  ModuleProblem P = residue_module(dual_base(F));
  Budget budget;
  AlgebraPtr keps = artin::k_of_V(F, 1);
  artin::AlgebraHom res = artin::residue_hom(keps);
  auto sq = defun::make_descent_square(res, res);
  auto objs = P.objects(keps, 100);
  AlgebraPtr k_alg = res.target;
  for (const auto& o1 : objs)
    for (const auto& o2 : objs) {
      Obj r1 = P.pushforward(sq.p1, o1);
      Obj r2 = P.pushforward(sq.p2, o2);
      std::vector<Obj> glued;
      for (const Mor& iso : P.morphisms(k_alg, r1, r2, 100))
        glued.push_back(P.glue(sq, o1, o2, iso));
      for (size_t i = 1; i < glued.size(); ++i)
        CHECK(!P.morphisms(sq.fp.algebra, glued[0], glued[i], 1000).empty());
    }
}

TEST_CASE("module_fiber_product rejects a bogus identification") {
  Field F = F2();
  ModuleProblem P = residue_module(dual_base(F));
  AlgebraPtr keps = artin::k_of_V(F, 1);
  artin::AlgebraHom res = artin::residue_hom(keps);
  auto objs = P.objects(keps, 100);
  Mor bogus;
  bogus.data = Vec{Rat(0)};  // not the identity over k
  CHECK_THROWS_AS(
      module_fiber_product(P, res, res, objs[0], objs[0], bogus),
      DefstackError);
  // and accepts the genuine one
  Mor good;
  good.data = Vec{Rat(1)};
  auto result = module_fiber_product(P, res, res, objs[0], objs[0], good);
  CHECK(P.pushforward(result.square.fp.to_first, result.glued) == objs[0]);
}

TEST_CASE("problem audits pass for the built-ins") {
  Field F = F2();
  Budget budget;
  std::vector<AlgebraPtr> algebras = {
      artin::k_of_V(F, 1),
      artin::monomial_quotient(F, {"x"}, {"x^3"}),
      artin::monomial_quotient(F, {"x", "y"}, {"x^2", "x*y", "y^2"}),
  };
  ModuleProblem P1 = residue_module(dual_base(F));
  auto a1 = defun::audit_problem(P1, algebras, budget);
  CHECK(a1.ok);
  QuotientProblem P2 = line_in_plane(F);
  auto a2 = defun::audit_problem(P2, algebras, budget);
  CHECK(a2.ok);
}
