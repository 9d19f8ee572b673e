#ifndef DEFSTACK_DEFUN_HPP
#define DEFSTACK_DEFUN_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "defstack/artin.hpp"

namespace defstack::defun {

using artin::AlgebraHom;
using artin::AlgebraPtr;
using artin::Extension;
using artin::FiberProduct;

// Canonical object/morphism descriptors. An object's descriptor is its
// normal form over a fixed algebra; comparing descriptors compares objects
// on the nose, while isomorphism classes come from explicit morphism search.
struct Obj {
  Vec data;
  bool operator==(const Obj& o) const { return data == o.data; }
  bool operator<(const Obj& o) const { return data < o.data; }
};

struct Mor {
  Vec data;
  bool operator==(const Mor& o) const { return data == o.data; }
  bool operator<(const Mor& o) const { return data < o.data; }
};

// The descent square a deformation problem glues along: B = A' x_A A''.
struct DescentSquare {
  FiberProduct fp;
  AlgebraHom p1;  // A' -> A
  AlgebraHom p2;  // A'' -> A
};

DescentSquare make_descent_square(const AlgebraHom& p1, const AlgebraHom& p2);

// A pluggable groupoid-valued deformation problem.
class DeformationProblem {
 public:
  virtual ~DeformationProblem() = default;
  virtual std::string name() const = 0;
  virtual const Field& field() const = 0;

  // All objects over A, canonical enumeration order. Throws
  // EnumerationBudgetExceeded past the cap.
  virtual std::vector<Obj> objects(const AlgebraPtr& A, long cap) const = 0;
  // Morphisms a -> b over id_A.
  virtual std::vector<Mor> morphisms(const AlgebraPtr& A, const Obj& a,
                                     const Obj& b, long cap) const = 0;
  virtual Mor compose(const AlgebraPtr& A, const Mor& second,
                      const Mor& first) const = 0;
  virtual Mor identity_mor(const AlgebraPtr& A, const Obj& o) const = 0;
  virtual Mor invert(const AlgebraPtr& A, const Mor& m) const = 0;
  // Covariant transport along a ring map f: A -> A2.
  virtual Obj pushforward(const AlgebraHom& f, const Obj& o) const = 0;
  virtual Mor pushforward_mor(const AlgebraHom& f, const Mor& m) const = 0;
  virtual Obj base_object() const = 0;

  virtual bool has_glue() const { return true; }
  // Effective descent: object over B restricting to o1 and o2, where iso
  // identifies the two restrictions over A.
  virtual Obj glue(const DescentSquare& sq, const Obj& o1, const Obj& o2,
                   const Mor& iso) const = 0;
  // The unique morphism of glued objects restricting to m1 and m2.
  virtual Mor glue_mor(const DescentSquare& sq, const Obj& src1,
                       const Obj& src2, const Mor& src_iso, const Obj& dst1,
                       const Obj& dst2, const Mor& dst_iso, const Mor& m1,
                       const Mor& m2) const = 0;
};

// ---- isomorphism classes ----

struct IsoClasses {
  std::vector<Obj> objects;
  std::vector<int> class_of;  // objects[i] lies in class class_of[i]
  std::vector<Obj> reps;      // lexicographically least member per class
  long budget_used = 0;

  int count() const { return static_cast<int>(reps.size()); }
  int class_of_object(const Obj& o) const;
};

IsoClasses iso_classes(const DeformationProblem& P, const AlgebraPtr& A,
                       const Budget& budget);
// Class index of an arbitrary object (searches an isomorphism to a rep).
int locate_class(const DeformationProblem& P, const AlgebraPtr& A,
                 const IsoClasses& cls, const Obj& o, const Budget& budget);

// ---- Schlessinger-type checks ----

struct CheckReport {
  std::string check;
  bool ok = true;
  std::string witness;
  long budget_used = 0;
  long lhs_classes = 0;
  long rhs_pairs = 0;
};

// (H1): F(A' x_A A'') -> F(A') x_{F(A)} F(A'') surjective, p2 tiny.
CheckReport check_h1(const DeformationProblem& P, const AlgebraHom& p1,
                     const AlgebraHom& p2, const Budget& budget);
// (H2): bijective for A = k, A'' = k[eps]; Aprime is the other corner.
CheckReport check_h2(const DeformationProblem& P, const AlgebraPtr& Aprime,
                     const Budget& budget);
// (H4): bijective for A'' = A' over a tiny extension.
CheckReport check_h4(const DeformationProblem& P, const Extension& tiny,
                     const Budget& budget);
// Automorphism-lifting criterion, equivalent to (H4).
CheckReport h4_via_aut(const DeformationProblem& P, const Extension& tiny,
                       const Budget& budget);

// ---- the * operation ----

struct AstResult {
  DescentSquare square;
  Obj obj;  // over square.fp.algebra
};

// Object over A'1 x_A1 A'2 restricting to o1, o2; restrictions over A1 are
// identified by the lexicographically least isomorphism.
AstResult ast2(const DeformationProblem& P, const AlgebraHom& q1,
               const AlgebraHom& q2, const Obj& o1, const Obj& o2,
               const Budget& budget);

// ---- tangent and automorphism structure ----

struct TangentSpace {
  AlgebraPtr kI;
  int d = 1;
  IsoClasses classes;
  int zero_class = 0;
  std::vector<std::vector<int>> add;     // class x class
  std::vector<std::vector<int>> scalar;  // field element index x class
  int dim = 0;
  std::vector<int> basis_classes;
  std::vector<Vec> coords;  // class -> coordinates in basis (length dim)
  int class_of_coords(const Vec& c) const;
};

TangentSpace tangent_space(const DeformationProblem& P, int d,
                           const Budget& budget);

struct AutSpace {
  AlgebraPtr kI;
  int d = 1;
  Obj zeta;
  std::vector<Mor> elements;
  int identity_index = 0;
  std::vector<std::vector<int>> comp;
  std::vector<std::vector<int>> add;
  std::vector<std::vector<int>> scalar;
  int dim = 0;
  std::vector<int> basis_elements;
  std::vector<Vec> coords;
  int index_of(const Mor& m) const;
};

AutSpace aut_space(const DeformationProblem& P, int d, const Budget& budget);

struct TensorCheckReport {
  bool ok = true;
  std::string detail;
  long t_card_lhs = 0, t_card_rhs = 0;
  long a_card_lhs = 0, a_card_rhs = 0;
};

// Prop tensors at dim V = d: T_S ⊗ V -> T_V and A_S ⊗ V -> A_V are linear
// bijections (via the phi_v maps).
TensorCheckReport tensor_decomposition_check(const DeformationProblem& P,
                                             int d, const Budget& budget);

// ---- lifting torsors ----

struct LiftTorsor {
  Obj base;       // eta over A
  Extension ext;  // p: A' -> A, small
  // elements: canonical representatives (object over A', marking iso class)
  struct Element {
    Obj lift;
    Mor marking;  // iso: eta -> p_*(lift) over A
  };
  std::vector<Element> elements;
  std::vector<std::vector<int>> action;  // tangent class x element -> element
  bool empty() const { return elements.empty(); }
};

LiftTorsor lift_torsor(const DeformationProblem& P, const Obj& eta,
                       const Extension& ext, const TangentSpace& T,
                       const Budget& budget);
// Free + transitive (or empty) verdict.
bool is_pseudotorsor(const LiftTorsor& t, const TangentSpace& T);

struct AutTorsor {
  Obj lift;       // eta' over A'
  Mor base_aut;   // phi in Aut(eta'|_A)
  std::vector<Mor> elements;  // lifts of phi in Aut(eta')
  std::vector<std::vector<int>> action;  // A_I element x lift -> lift
};

AutTorsor aut_torsor(const DeformationProblem& P, const Obj& lift,
                     const Mor& base_aut, const Extension& ext,
                     const AutSpace& A_I, const Budget& budget);
bool is_pseudotorsor(const AutTorsor& t, const AutSpace& A_I);

// id_{eta'} + a for a in Aut(zeta_I): the canonical A_I -> Aut(eta') map.
Mor add_aut_to_identity(const DeformationProblem& P, const AlgebraPtr& Aprime,
                        const std::vector<Vec>& I_basis, const Obj& etap,
                        const Mor& a, const Budget& budget);
// Inverse of the above (searches A_I).
Mor aut_difference(const DeformationProblem& P, const AlgebraPtr& Aprime,
                   const std::vector<Vec>& I_basis, const Obj& etap,
                   const Mor& phi, const AutSpace& A_I, const Budget& budget);

// ---- prorepresentability helpers ----

struct ProRep {
  AlgebraPtr R;      // truncation R/m^trunc_level
  int trunc_level;   // must dominate the nilpotency degree of the test algebra
  int krull_dim;     // of the untruncated ring, user supplied
};

std::vector<AlgebraHom> prorep_evaluate(const ProRep& R, const AlgebraPtr& A,
                                        const Budget& budget);

struct DimBoundsReport {
  int t_dim = 0;
  int obstruction_total = 0;
  int krull_dim = 0;
  int lower = 0;  // t_dim - sum V_i
  int upper = 0;  // t_dim
  bool lower_ok = false, upper_ok = false;
  bool violated = false;
  bool lci_equality = false;  // lower bound met with equality
  bool smooth_criterion = false;
  std::string summary;
};

DimBoundsReport dim_bounds_report(int t_dim, const std::vector<int>& v_dims,
                                  const ProRep& R);

// ---- obstruction theories ----

struct ObstructionTheory {
  int n = 1;
  std::vector<int> v_dims;  // dim V_1..V_n
  // returns (index m in 1..n, element of V_m ⊗ I by coordinates)
  std::function<std::pair<int, Vec>(const DeformationProblem&, const Obj&,
                                    const Extension&)>
      eval;
};

// n = 1 indicator theory: 0 iff a lift exists.
ObstructionTheory brute_force_theory();

bool lift_exists(const DeformationProblem& P, const Obj& eta,
                 const Extension& ext, const Budget& budget);

// Evaluates a theory; cross-checks plug-ins against the brute-force lift
// oracle and the functoriality condition along factor_into_tiny chains.
std::pair<int, Vec> obstruction_evaluate(const DeformationProblem& P,
                                         const ObstructionTheory& theory,
                                         const Obj& eta, const Extension& ext,
                                         const Budget& budget);

// ---- problem sanity suite ----

struct ProblemAudit {
  bool ok = true;
  std::vector<std::string> failures;
};

// Trivial base fiber, invertible fiber morphisms, functorial pushforward.
ProblemAudit audit_problem(const DeformationProblem& P,
                           const std::vector<AlgebraPtr>& test_algebras,
                           const Budget& budget);

}  // namespace defstack::defun

#endif
