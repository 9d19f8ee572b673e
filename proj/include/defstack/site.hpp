#ifndef DEFSTACK_SITE_HPP
#define DEFSTACK_SITE_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "defstack/linalg.hpp"

namespace defstack::site {

// Opens are bitmasks over the points (up-closed subsets).
using Open = std::uint32_t;

class FiniteSpace {
 public:
  // pairs (a, b) declare a <= b; opens are the up-closed subsets, the
  // minimal open of x is the up-set of x.
  static std::shared_ptr<const FiniteSpace> from_order(
      std::vector<std::string> names,
      const std::vector<std::pair<int, int>>& pairs);

  int points() const { return n_; }
  const std::string& name(int x) const { return names_[x]; }
  int index_of(const std::string& name) const;
  bool leq(int x, int y) const { return leq_[x][y]; }
  Open minimal_open(int x) const { return up_[x]; }
  Open whole() const { return (n_ == 32) ? ~Open(0) : ((Open(1) << n_) - 1); }
  bool is_open(Open u) const;
  std::vector<Open> all_opens() const;
  std::vector<int> members(Open u) const;
  // minimal elements of U: their minimal opens generate U
  std::vector<int> minimal_points(Open u) const;
  int component_count(Open u) const;

 private:
  int n_ = 0;
  std::vector<std::string> names_;
  std::vector<std::vector<bool>> leq_;
  std::vector<Open> up_;
};

using SpacePtr = std::shared_ptr<const FiniteSpace>;

struct SectionSpace {
  int dim = 0;
  // columns: basis of the compatible families inside ⊕_{x in U} stalk_x
  Mat basis;
  std::vector<int> offsets;  // per member point, offset into the big vector
  std::vector<int> pts;      // members of U in ascending order
};

class VectorSheaf {
 public:
  VectorSheaf(Field f, SpacePtr X, std::vector<int> stalk_dims,
              std::map<std::pair<int, int>, Mat> gen_maps);

  const Field& field() const { return field_; }
  const SpacePtr& space() const { return X_; }
  int stalk_dim(int x) const { return stalk_dims_[x]; }
  // generization map stalk_x -> stalk_y for x <= y
  const Mat& gen(int x, int y) const;
  const SectionSpace& sections(Open u) const;  // cached
  // sections(U) -> sections(V) for open V ⊆ U
  Mat restriction(Open u, Open v) const;
  // evaluate a section (coefficients in the section basis) at a point
  Vec stalk_value(Open u, const Vec& coeffs, int x) const;

  static VectorSheaf constant(const Field& f, const SpacePtr& X, int dim);
  static VectorSheaf skyscraper(const Field& f, const SpacePtr& X, int x,
                                int dim);
  static VectorSheaf zero(const Field& f, const SpacePtr& X);

 private:
  Field field_;
  SpacePtr X_;
  std::vector<int> stalk_dims_;
  std::map<std::pair<int, int>, Mat> gen_;
  mutable std::map<Open, SectionSpace> section_cache_;
};

// map of sheaves, stalkwise
struct SheafMorphism {
  std::vector<Mat> at_point;
  // induced map sections(U) -> sections(U)
  Mat on_sections(const VectorSheaf& src, const VectorSheaf& dst,
                  Open u) const;
};

class Presheaf {
 public:
  Presheaf(Field f, SpacePtr X, std::map<Open, int> dims,
           std::map<std::pair<Open, Open>, Mat> res);
  const Field& field() const { return field_; }
  const SpacePtr& space() const { return X_; }
  int dim(Open u) const;
  // restriction P(U) -> P(V) for V ⊆ U
  Mat restriction(Open u, Open v) const;
  void validate() const;

 private:
  Field field_;
  SpacePtr X_;
  std::map<Open, int> dims_;
  std::map<std::pair<Open, Open>, Mat> res_;
};

struct Sheafification {
  VectorSheaf sheaf;
  // natural map P(U) -> sections(U) for every open
  std::map<Open, Mat> comparison;
};

Sheafification sheafify(const Presheaf& P);

// ---- Godement resolution and derived-functor cohomology ----

struct GodementData {
  SpacePtr X;
  VectorSheaf F;
  std::vector<VectorSheaf> C;     // C0..C3, flasque
  SheafMorphism augmentation;     // F -> C0
  std::vector<SheafMorphism> d;   // C0->C1, C1->C2, C2->C3
  // compressed global complex: Γ(C^n) ≅ ⊕_x Q^n_x
  std::vector<std::vector<int>> q_dims;     // per degree, per point
  std::vector<std::vector<int>> q_offsets;  // per degree, per point
  std::vector<Mat> gamma_d;                 // d0..d2 in compressed coords
  std::vector<int> h;                       // h0, h1, h2
  std::vector<Vec> h2_reps;                 // compressed Γ(C2) coords
  linalg::SpanSolver h2_solver;             // im(d1) then the reps

  // compressed coords of a global section of C^n given as a compatible
  // family (coefficients in C[n].sections(whole) basis)
  Vec compress(int degree, const Vec& section_coeffs) const;
  // class coordinates of a compressed 2-cocycle in the h2_reps basis
  Vec h2_class(const Vec& compressed) const;
};

GodementData godement_cohomology(const VectorSheaf& F);

// ---- plain unordered Cech cohomology of a cover ----

struct CechData {
  std::vector<Open> cover;
  std::vector<int> dims;  // h0..h_degree
};

CechData cech_h(const VectorSheaf& F, const std::vector<Open>& cover,
                int degree);

// ---- covers of level 2 and the hypercover H^2 ----

struct Cover2 {
  SpacePtr X;
  std::vector<Open> opens;  // level 1
  // level 2 for i0 < i1; the shared index convention covers i1 < i0, and
  // the self-intersection cover of U_i is the single set U_i
  std::map<std::pair<int, int>, std::vector<Open>> second;

  const std::vector<Open>& second_opens(int i0, int i1) const;
  void validate() const;
};

// level 1 = all minimal opens; level 2 = minimal opens of the minimal
// points of each pairwise intersection
Cover2 minimal_cover2(const SpacePtr& X);
// level 2 = the full pairwise intersections (recovers plain Cech)
Cover2 trivial_cover2(const SpacePtr& X, const std::vector<Open>& opens);

struct Cochain2Layout {
  // C^1 blocks: (i0, i1, j) with section space of F(U_{i0,i1,j});
  // C^2 blocks: (i0,i1,i2),(j12,j02,j01) with F(U_{i,j})
  struct Block {
    std::vector<int> index;
    Open open = 0;
    int offset = 0;
    int dim = 0;
  };
  std::vector<Block> c1, c2;
  int c1_dim = 0, c2_dim = 0;
  int c1_block(int i0, int i1, int j) const;
  int c2_block(int i0, int i1, int i2, int j12, int j02, int j01) const;
};

struct HyperH2 {
  Cover2 cover;
  Cochain2Layout layout;
  std::vector<linalg::SparseVec> z2_basis;
  int z2_dim = 0;
  int b2_dim = 0;
  int h2_dim = 0;
  std::vector<linalg::SparseVec> h2_reps;
  // class coordinates of a 2-cocycle in the chosen representatives
  Vec class_coords(const linalg::SparseVec& z) const;

  // internals used by class_coords and the comparison map
  std::shared_ptr<linalg::SpanSolver> quotient_solver;
  int b2_generators = 0;
};

HyperH2 hyper_h2(const VectorSheaf& F, const Cover2& cover);

// coboundary of a 1-cochain (for the d∘d = 0 property and tests)
linalg::SparseVec hyper_d1(const VectorSheaf& F, const Cover2& cover,
                           const Cochain2Layout& layout,
                           const linalg::SparseVec& rho1);
// checks the full cocycle condition
bool hyper_is_cocycle(const VectorSheaf& F, const Cover2& cover,
                      const Cochain2Layout& layout,
                      const linalg::SparseVec& rho2);

// ---- comparison with derived-functor cohomology ----

// image of a hypercover 2-cocycle in Godement H^2, by the flasque chase
Vec comparison_to_h2(const VectorSheaf& F, const Cover2& cover,
                     const Cochain2Layout& layout,
                     const linalg::SparseVec& z, const GodementData& gd);

// ---- refinement ----

struct Cover2Refinement {
  std::vector<int> pi;  // fine level-1 index -> coarse level-1 index
  // (i0', i1') with i0' < i1' -> map J'_{i0',i1'} -> J_{pi(i0'),pi(i1')}
  std::map<std::pair<int, int>, std::vector<int>> pi2;
};

// pulls a 2-cochain back along a refinement; throws NotARefinement if the
// inclusion conditions fail
linalg::SparseVec refine_cochain2(const VectorSheaf& F, const Cover2& coarse,
                                  const Cochain2Layout& coarse_layout,
                                  const Cover2& fine,
                                  const Cochain2Layout& fine_layout,
                                  const Cover2Refinement& r,
                                  const linalg::SparseVec& rho);

// ---- simple helpers ----

Open intersect(Open a, Open b);

}  // namespace defstack::site

#endif
