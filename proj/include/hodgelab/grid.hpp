#ifndef HODGELAB_GRID_HPP_
#define HODGELAB_GRID_HPP_

#include <array>
#include <functional>

#include "hodgelab/complex.hpp"
#include "hodgelab/operator.hpp"

namespace hodgelab {

enum class Topology { Box, Torus };

/// Face order: x-min, x-max, y-min, y-max, z-min, z-max.
enum class FaceBc { Tangential, Normal };  // Gamma_t / Gamma_n

struct GridSpec {
  std::array<Index, 3> cells{1, 1, 1};
  std::array<double, 3> lengths{1.0, 1.0, 1.0};
  Topology topology = Topology::Box;
  std::array<FaceBc, 6> bc{FaceBc::Tangential, FaceBc::Tangential, FaceBc::Tangential,
                           FaceBc::Tangential, FaceBc::Tangential, FaceBc::Tangential};

  double h(int axis) const { return lengths[axis] / static_cast<double>(cells[axis]); }
  bool tangential(int axis, bool upper) const {
    return bc[2 * axis + (upper ? 1 : 0)] == FaceBc::Tangential;
  }
  void validate() const;
};

using ScalarField = std::function<double(double, double, double)>;

/// Diagonal (per-axis) material tensors, sampled at entity barycenters:
/// eps on 1-form dofs, mu on 2-form dofs.
struct MaterialField {
  std::array<ScalarField, 3> eps;
  std::array<ScalarField, 3> mu;

  MaterialField();
  static MaterialField constants(double eps_value, double mu_value);
};

/// Index maps from grid entities to dof indices, with Gamma_t-constrained
/// entities removed.  An entity is constrained iff it lies in the closure
/// of any Gamma_t face.
class DofLayout {
 public:
  explicit DofLayout(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }

  Index n_vertex_dofs() const { return n_vert_; }
  Index n_edge_dofs() const { return n_edge_; }
  Index n_face_dofs() const { return n_face_; }
  Index n_cell_dofs() const { return n_cell_; }

  // Lattice extents per family (vertex-type: N+1 on a box, N on a torus).
  Index vert_extent(int axis) const;
  Index cell_extent(int axis) const { return spec_.cells[axis]; }

  // -1 when the entity is Gamma_t-constrained.
  Index vertex_dof(Index i, Index j, Index k) const;
  Index edge_dof(int axis, Index i, Index j, Index k) const;  // (i,j,k) lattice coords
  Index face_dof(int axis, Index i, Index j, Index k) const;
  Index cell_dof(Index i, Index j, Index k) const;

  bool vertex_constrained(Index i, Index j, Index k) const;
  bool edge_constrained(int axis, Index i, Index j, Index k) const;
  bool face_constrained(int axis, Index i, Index j, Index k) const;

  /// V - E + F - C over kept dofs, and the combinatorial expectation
  /// chi(box) - chi(closure of Gamma_t) (0 for the torus).
  struct EulerCheck {
    Index alternating_sum = 0;
    Index expected = 0;
  };
  EulerCheck euler_check() const;

  // Entity barycenters.
  std::array<double, 3> vertex_pos(Index i, Index j, Index k) const;
  std::array<double, 3> edge_mid(int axis, Index i, Index j, Index k) const;
  std::array<double, 3> face_center(int axis, Index i, Index j, Index k) const;
  std::array<double, 3> cell_center(Index i, Index j, Index k) const;

  // Along-axis extent of the edge/face families.
  Index edge_extent(int axis, int dir) const;
  Index face_extent(int axis, int dir) const;

 private:
  GridSpec spec_;
  // dof id per lattice site, -1 for constrained
  std::vector<Index> vert_ids_;
  std::array<std::vector<Index>, 3> edge_ids_;
  std::array<std::vector<Index>, 3> face_ids_;
  Index n_vert_ = 0, n_edge_ = 0, n_face_ = 0, n_cell_ = 0;
};

/// The full staggered-grid de Rham chain with its spaces and operators.
struct GridComplex {
  GridSpec spec;
  DofLayout layout;
  SpacePtr h0, h1, h2, h3;
  ComplexOperator grad, curl, div;

  HilbertComplex chain() const { return HilbertComplex({h0, h1, h2, h3}, {grad, curl, div}); }
};

/// H_0 -> H_1 -> H_2 -> H_3 with 0/1/2/3-form dofs on
/// vertices/edges/faces/cells, operators scaled by 1/h per axis,
/// Gamma_t dofs removed, diagonal mass matrices weighted by eps/mu.
GridComplex build_derham(const GridSpec& spec, const MaterialField& mat = MaterialField());

using VectorField = std::function<std::array<double, 3>(double, double, double)>;

Vec sample_scalar(const DofLayout& layout, const ScalarField& f);
Vec sample_vector_h1(const DofLayout& layout, const VectorField& f);
Vec sample_vector_h2(const DofLayout& layout, const VectorField& f);

struct BoundaryTrace {
  double gamma_t_residual = 0.0;
};

/// Maximal magnitude of x on Gamma_t edges.  Accepts a vector in the
/// constrained layout (residual 0 by construction, the dofs are absent)
/// or in the unconstrained layout of the same grid.
BoundaryTrace boundary_trace_check(const GridSpec& spec, const Vec& x);

}  // namespace hodgelab

#endif  // HODGELAB_GRID_HPP_
