#ifndef DEFSTACK_PROBMOD_HPP
#define DEFSTACK_PROBMOD_HPP

#include <memory>

#include "defstack/defun.hpp"

namespace defstack::probmod {

using artin::AlgebraHom;
using artin::AlgebraPtr;
using defun::DeformationProblem;
using defun::DescentSquare;
using defun::Mor;
using defun::Obj;

// A finite-dimensional associative commutative unital k-algebra (not
// necessarily local), the base ring of the module problems.
struct BaseAlgebra {
  Field field;
  int dim;
  std::vector<std::string> labels;
  std::vector<Rat> mult;  // c[i][j][m]

  const Rat& c(int i, int j, int m) const {
    return mult[(static_cast<size_t>(i) * dim + j) * dim + m];
  }
  Vec basis_mul(int i, int j) const;
};

using BasePtr = std::shared_ptr<const BaseAlgebra>;

BasePtr make_base_algebra(const Field& field, std::vector<std::string> labels,
                          std::vector<Rat> table);
BasePtr base_from_local(const AlgebraPtr& A);

// Flat deformations of a fixed B-module M = k^r. Objects over A are tuples
// of action matrices over A reducing to M on the nose; morphisms are
// A-linear isomorphisms congruent to the identity that commute with the
// action. Descent data glue through the Appendix-A module fiber product.
class ModuleProblem : public DeformationProblem {
 public:
  // action[i]: r x r matrix over k for basis element e_i of B (e_0 = 1).
  ModuleProblem(BasePtr B, std::vector<Mat> action);

  std::string name() const override { return "module"; }
  const Field& field() const override { return B_->field; }
  std::vector<Obj> objects(const AlgebraPtr& A, long cap) const override;
  std::vector<Mor> morphisms(const AlgebraPtr& A, const Obj& a, const Obj& b,
                             long cap) const override;
  Mor compose(const AlgebraPtr& A, const Mor& second,
              const Mor& first) const override;
  Mor identity_mor(const AlgebraPtr& A, const Obj& o) const override;
  Mor invert(const AlgebraPtr& A, const Mor& m) const override;
  Obj pushforward(const AlgebraHom& f, const Obj& o) const override;
  Mor pushforward_mor(const AlgebraHom& f, const Mor& m) const override;
  Obj base_object() const override;
  Obj glue(const DescentSquare& sq, const Obj& o1, const Obj& o2,
           const Mor& iso) const override;
  Mor glue_mor(const DescentSquare& sq, const Obj& src1, const Obj& src2,
               const Mor& src_iso, const Obj& dst1, const Obj& dst2,
               const Mor& dst_iso, const Mor& m1, const Mor& m2) const override;

  int rank() const { return r_; }
  const BasePtr& base() const { return B_; }
  const std::vector<Mat>& base_action() const { return action_; }

 private:
  BasePtr B_;
  std::vector<Mat> action_;
  int r_;
};

// Deformations of a quotient module E ->> F over B: objects over A are
// B-stable free direct summands K of E ⊗ A lifting G = ker(E ->> F), in a
// normal form pinned by the identity rows of G. Groupoids are discrete.
class QuotientProblem : public DeformationProblem {
 public:
  // e_action: action matrices of B on k^e; proj: s x e presenting E ->> F.
  QuotientProblem(BasePtr B, std::vector<Mat> e_action, Mat proj);

  std::string name() const override { return "quotient"; }
  const Field& field() const override { return B_->field; }
  std::vector<Obj> objects(const AlgebraPtr& A, long cap) const override;
  std::vector<Mor> morphisms(const AlgebraPtr& A, const Obj& a, const Obj& b,
                             long cap) const override;
  Mor compose(const AlgebraPtr& A, const Mor& second,
              const Mor& first) const override;
  Mor identity_mor(const AlgebraPtr& A, const Obj& o) const override;
  Mor invert(const AlgebraPtr& A, const Mor& m) const override;
  Obj pushforward(const AlgebraHom& f, const Obj& o) const override;
  Mor pushforward_mor(const AlgebraHom& f, const Mor& m) const override;
  Obj base_object() const override;
  Obj glue(const DescentSquare& sq, const Obj& o1, const Obj& o2,
           const Mor& iso) const override;
  Mor glue_mor(const DescentSquare& sq, const Obj& src1, const Obj& src2,
               const Mor& src_iso, const Obj& dst1, const Obj& dst2,
               const Mor& dst_iso, const Mor& m1, const Mor& m2) const override;

  int ambient_rank() const { return e_; }
  int kernel_rank() const { return g_; }

 private:
  BasePtr B_;
  std::vector<Mat> e_action_;
  Mat proj_;
  int e_ = 0, s_ = 0, g_ = 0;
  Mat g_basis_;                 // e x g over k
  std::vector<int> pivot_rows_; // identity-pattern rows of g_basis_
};

// The Appendix-A fiber product of module structures, as an operation:
// glues o1 over A' and o2 over A'' along an identification of their
// restrictions over A.
struct ModuleGlueResult {
  DescentSquare square;
  Obj glued;
};
ModuleGlueResult module_fiber_product(const ModuleProblem& P,
                                      const AlgebraHom& p1,
                                      const AlgebraHom& p2, const Obj& o1,
                                      const Obj& o2, const Mor& iso);

// ---- independent oracles ----

// dim Ext^1_B(M, M) by brute-force enumeration of extension modules on
// M ⊕ M, partitioned by unipotent block conjugation. Finite fields only.
int ext1_dimension_bruteforce(const BasePtr& B, const std::vector<Mat>& action);
// dim Hom_B(M, N) by linear solving (any field).
int hom_dimension(const BasePtr& B, const std::vector<Mat>& m_action,
                  const std::vector<Mat>& n_action);
// Tangent/automorphism dimensions of the module problem by linear algebra
// only; valid over Q as well.
int module_tangent_dim_linear(const BasePtr& B, const std::vector<Mat>& action);
int module_aut_dim_linear(const BasePtr& B, const std::vector<Mat>& action);
// Tangent dimension of the quotient problem: dim Hom_B(G, F).
int quotient_tangent_dim_oracle(const BasePtr& B,
                                const std::vector<Mat>& e_action,
                                const Mat& proj);

}  // namespace defstack::probmod

#endif
