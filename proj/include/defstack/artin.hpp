#ifndef DEFSTACK_ARTIN_HPP
#define DEFSTACK_ARTIN_HPP

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "defstack/linalg.hpp"

namespace defstack::artin {

// Validation failures are values; callers need machine-readable witnesses.
struct AlgebraFailure {
  Errc kind = Errc::BadInput;
  std::vector<int> witness;  // offending basis indices
  std::string detail;
};

// A finite-dimensional local commutative k-algebra with residue field k,
// presented by a basis (label 0 is the unit) and a multiplication table.
// The span of e_1..e_{n-1} is the maximal ideal.
class LocalAlgebra {
 public:
  Field field;
  int dim = 0;
  std::vector<std::string> labels;
  std::vector<Rat> mult;  // c[i][j][m] at ((i*dim)+j)*dim+m
  int nilpotency_degree = 1;  // smallest e with m^e = 0

  LocalAlgebra(Field f, int d, std::vector<std::string> lab,
               std::vector<Rat> table)
      : field(std::move(f)), dim(d), labels(std::move(lab)),
        mult(std::move(table)) {}

  const Rat& c(int i, int j, int m) const {
    return mult[(static_cast<size_t>(i) * dim + j) * dim + m];
  }
  Rat& c(int i, int j, int m) {
    return mult[(static_cast<size_t>(i) * dim + j) * dim + m];
  }

  Vec unit() const { return linalg::unit_vec(dim, 0); }
  Vec basis_mul(int i, int j) const;
  Vec mul(const Vec& x, const Vec& y) const;
  Vec pow(const Vec& x, int e) const;
  Rat residue(const Vec& x) const { return x[0]; }
  bool in_max_ideal(const Vec& x) const { return x[0].is_zero(); }
  // Basis of m^t (t >= 1); m^0 is the whole algebra.
  std::vector<Vec> max_ideal_power(int t) const;
  std::vector<Vec> max_ideal_basis() const { return max_ideal_power(1); }
  // Socle = annihilator of m inside m.
  std::vector<Vec> socle_basis() const;
  std::string show(const Vec& x) const;
};

using AlgebraPtr = std::shared_ptr<const LocalAlgebra>;

std::variant<AlgebraPtr, AlgebraFailure> make_algebra(
    const Field& field, std::vector<std::string> labels,
    std::vector<Rat> mult_table);
AlgebraPtr make_algebra_or_throw(const Field& field,
                                 std::vector<std::string> labels,
                                 std::vector<Rat> mult_table);

// k itself as an algebra.
AlgebraPtr base_field_algebra(const Field& field);

// k[V]: basis {1, v_1..v_d} with v_i v_j = 0.
AlgebraPtr k_of_V(const Field& field, int d);

// Quotient of a polynomial ring by monomial relations; basis = standard
// monomials. Throws InfiniteDimensional past the cap.
AlgebraPtr monomial_quotient(const Field& field,
                             const std::vector<std::string>& vars,
                             const std::vector<std::string>& relations,
                             int dim_cap = 4096);

class AlgebraHom {
 public:
  AlgebraPtr source;
  AlgebraPtr target;
  Mat matrix;  // target.dim x source.dim

  AlgebraHom(AlgebraPtr src, AlgebraPtr dst, Mat m);

  Vec apply(const Vec& x) const {
    return linalg::apply(source->field, matrix, x);
  }
  static AlgebraHom identity(const AlgebraPtr& a);
  AlgebraHom compose(const AlgebraHom& first) const;  // this ∘ first
  bool is_surjective() const;
  bool is_injective() const;
  std::vector<Vec> kernel_basis() const;
  // Unital + multiplicative on all basis pairs; throws BadInput otherwise.
  void validate() const;
  bool is_valid_hom(std::string* why = nullptr) const;
};

// Residue map A -> k.
AlgebraHom residue_hom(const AlgebraPtr& a);
// Hom determined by images of all basis elements (validated).
AlgebraHom hom_from_basis_images(const AlgebraPtr& src, const AlgebraPtr& dst,
                                 const std::vector<Vec>& images);

struct FiberProduct {
  AlgebraPtr algebra;      // B = A' x_A A''
  AlgebraHom to_first;     // B -> A'
  AlgebraHom to_second;    // B -> A''
};

// p1: A'->A, p2: A''->A; at least one surjective.
FiberProduct fiber_product(const AlgebraHom& p1, const AlgebraHom& p2);

struct TensorProduct {
  AlgebraPtr algebra;       // A' ⊗_A A''
  AlgebraHom from_first;    // A' -> T
  AlgebraHom from_second;   // A'' -> T
};

// p1: A->A' surjective, p2: A->A''; computes A''/(ideal gen by p2(ker p1)).
TensorProduct tensor_over(const AlgebraHom& p1, const AlgebraHom& p2);
// Symmetric wrapper: picks whichever map is surjective (first preferred).
TensorProduct tensor_pair(const AlgebraHom& p1, const AlgebraHom& p2);

// Smallest subspace containing gens and closed under multiplication by A.
std::vector<Vec> ideal_closure(const LocalAlgebra& A, std::vector<Vec> gens);

struct Quotient {
  AlgebraPtr algebra;
  AlgebraHom projection;
};
// Quotient by the ideal generated by gens (gens must lie in m).
Quotient quotient_by_ideal(const AlgebraPtr& A, const std::vector<Vec>& gens);

struct Square {
  AlgebraHom p1;  // A -> A'
  AlgebraHom p2;  // A -> A''
};

struct SquareVerdict {
  bool ok = false;
  int failed_clause = 0;  // 1: injectivity, 2: first leg surjectivity,
                          // 3: multiplicative closure
  std::vector<Rat> witness;
  std::string detail;
};

SquareVerdict is_schlessinger_square(const Square& sq);
Square pushforward_square(const Square& sq, const AlgebraHom& f);

struct Extension {
  AlgebraHom map;  // A' -> A, surjective
  std::vector<Vec> kernel;
  bool small = false;
  bool tiny = false;
};

Extension classify_extension(const AlgebraHom& p);
// Chain A' = C_0 -> C_1 -> ... -> C_r = A of tiny extensions composing to p.
std::vector<Extension> factor_into_tiny(const AlgebraHom& p);

// sigma_{A',I}: A' x_k k[I] -> A', (x, pi(x)+i) |-> x+i, for a small-extension
// kernel I in m_{A'} given by a basis. Returns the fiber product and the map.
struct SigmaData {
  FiberProduct product;  // A' x_k k[I]
  AlgebraHom map;        // product.algebra -> A'
};
SigmaData sigma_map(const AlgebraPtr& Aprime, const std::vector<Vec>& I_basis);
// Same map on an already-computed product A' x_k k[V] with dim V = |I_basis|.
AlgebraHom sigma_from_product(const FiberProduct& fp, const AlgebraPtr& Aprime,
                              const std::vector<Vec>& I_basis);

// m_lambda: k[V] -> k[V], a + v |-> a + lambda v.
AlgebraHom m_lambda(const Field& field, const Rat& lambda, int d);
// phi_v: k[eps] -> k[V], eps |-> v.
AlgebraHom phi_v(const Field& field, int d, const Vec& v_coords);

// Explicit unital algebra isomorphism search/verification helpers.
bool is_isomorphism(const AlgebraHom& h);
// Finds an isomorphism by enumeration (finite fields, small dims).
std::optional<AlgebraHom> find_isomorphism(const AlgebraPtr& A,
                                           const AlgebraPtr& B,
                                           long attempt_cap = 2000000);

// Deterministic random generators for the property suites.
struct RandomAlgebraSource {
  Field field;
  std::mt19937 rng;
  int max_dim = 5;
  explicit RandomAlgebraSource(const Field& f, unsigned seed)
      : field(f), rng(seed) {}
  AlgebraPtr algebra();
  // A surjection B' ->> B with both sides of dim <= max_dim.
  AlgebraHom surjection();
};

}  // namespace defstack::artin

#endif
