#include "hodgelab/grid.hpp"

#include <cmath>

namespace hodgelab {

void GridSpec::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (cells[a] <= 0)
      throw StructuralError("GridSpec: zero cells on axis " + std::to_string(a));
    if (!(lengths[a] > 0.0))
      throw StructuralError("GridSpec: non-positive length on axis " + std::to_string(a));
  }
}

MaterialField::MaterialField() {
  for (int a = 0; a < 3; ++a) {
    eps[a] = [](double, double, double) { return 1.0; };
    mu[a] = [](double, double, double) { return 1.0; };
  }
}

MaterialField MaterialField::constants(double eps_value, double mu_value) {
  MaterialField m;
  for (int a = 0; a < 3; ++a) {
    m.eps[a] = [eps_value](double, double, double) { return eps_value; };
    m.mu[a] = [mu_value](double, double, double) { return mu_value; };
  }
  return m;
}

namespace {

inline int other1(int a) { return a == 0 ? 1 : 0; }
inline int other2(int a) { return a == 2 ? 1 : 2; }

}  // namespace

Index DofLayout::vert_extent(int axis) const {
  return spec_.topology == Topology::Torus ? spec_.cells[axis] : spec_.cells[axis] + 1;
}

Index DofLayout::edge_extent(int axis, int dir) const {
  // along-axis direction is cell-type, transverse vertex-type
  return dir == axis ? spec_.cells[dir] : vert_extent(dir);
}

Index DofLayout::face_extent(int axis, int dir) const {
  return dir == axis ? vert_extent(dir) : spec_.cells[dir];
}

DofLayout::DofLayout(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  const bool torus = spec_.topology == Topology::Torus;

  const auto on_tangential = [&](int axis, Index pos, Index vmax) {
    if (torus) return false;
    return (pos == 0 && spec_.tangential(axis, false)) ||
           (pos == vmax && spec_.tangential(axis, true));
  };

  // vertices: constrained when on the closure of any Gamma_t face
  vert_ids_.assign(vert_extent(0) * vert_extent(1) * vert_extent(2), -1);
  {
    Index next = 0;
    for (Index k = 0; k < vert_extent(2); ++k)
      for (Index j = 0; j < vert_extent(1); ++j)
        for (Index i = 0; i < vert_extent(0); ++i) {
          const bool c = on_tangential(0, i, spec_.cells[0]) ||
                         on_tangential(1, j, spec_.cells[1]) ||
                         on_tangential(2, k, spec_.cells[2]);
          if (!c) vert_ids_[(k * vert_extent(1) + j) * vert_extent(0) + i] = next++;
        }
    n_vert_ = next;
  }

  // edges: constrained when a transverse coordinate pins them into a
  // Gamma_t face
  for (int a = 0; a < 3; ++a) {
    const Index e0 = edge_extent(a, 0), e1 = edge_extent(a, 1), e2 = edge_extent(a, 2);
    edge_ids_[a].assign(e0 * e1 * e2, -1);
  }
  {
    Index next = 0;
    for (int a = 0; a < 3; ++a) {
      const Index e0 = edge_extent(a, 0), e1 = edge_extent(a, 1), e2 = edge_extent(a, 2);
      const int b = other1(a), c = other2(a);
      for (Index k = 0; k < e2; ++k)
        for (Index j = 0; j < e1; ++j)
          for (Index i = 0; i < e0; ++i) {
            const Index pos[3] = {i, j, k};
            const bool con = on_tangential(b, pos[b], spec_.cells[b]) ||
                             on_tangential(c, pos[c], spec_.cells[c]);
            if (!con) edge_ids_[a][(k * e1 + j) * e0 + i] = next++;
          }
    }
    n_edge_ = next;
  }

  // faces: constrained when lying inside a Gamma_t boundary face
  for (int a = 0; a < 3; ++a) {
    const Index f0 = face_extent(a, 0), f1 = face_extent(a, 1), f2 = face_extent(a, 2);
    face_ids_[a].assign(f0 * f1 * f2, -1);
  }
  {
    Index next = 0;
    for (int a = 0; a < 3; ++a) {
      const Index f0 = face_extent(a, 0), f1 = face_extent(a, 1), f2 = face_extent(a, 2);
      for (Index k = 0; k < f2; ++k)
        for (Index j = 0; j < f1; ++j)
          for (Index i = 0; i < f0; ++i) {
            const Index pos[3] = {i, j, k};
            const bool con = on_tangential(a, pos[a], spec_.cells[a]);
            if (!con) face_ids_[a][(k * f1 + j) * f0 + i] = next++;
          }
    }
    n_face_ = next;
  }

  n_cell_ = spec_.cells[0] * spec_.cells[1] * spec_.cells[2];
}

Index DofLayout::vertex_dof(Index i, Index j, Index k) const {
  return vert_ids_[(k * vert_extent(1) + j) * vert_extent(0) + i];
}

Index DofLayout::edge_dof(int axis, Index i, Index j, Index k) const {
  const Index e0 = edge_extent(axis, 0), e1 = edge_extent(axis, 1);
  return edge_ids_[axis][(k * e1 + j) * e0 + i];
}

Index DofLayout::face_dof(int axis, Index i, Index j, Index k) const {
  const Index f0 = face_extent(axis, 0), f1 = face_extent(axis, 1);
  return face_ids_[axis][(k * f1 + j) * f0 + i];
}

Index DofLayout::cell_dof(Index i, Index j, Index k) const {
  return (k * spec_.cells[1] + j) * spec_.cells[0] + i;
}

bool DofLayout::vertex_constrained(Index i, Index j, Index k) const {
  return vertex_dof(i, j, k) < 0;
}
bool DofLayout::edge_constrained(int axis, Index i, Index j, Index k) const {
  return edge_dof(axis, i, j, k) < 0;
}
bool DofLayout::face_constrained(int axis, Index i, Index j, Index k) const {
  return face_dof(axis, i, j, k) < 0;
}

DofLayout::EulerCheck DofLayout::euler_check() const {
  EulerCheck out;
  out.alternating_sum = n_vert_ - n_edge_ + n_face_ - n_cell_;
  if (spec_.topology == Topology::Torus) {
    out.expected = 0;
    return out;
  }
  // chi(box) - chi(closure of Gamma_t), the closure counted entity by entity.
  Index vr = 0, er = 0, fr = 0;
  for (Index k = 0; k < vert_extent(2); ++k)
    for (Index j = 0; j < vert_extent(1); ++j)
      for (Index i = 0; i < vert_extent(0); ++i)
        if (vertex_constrained(i, j, k)) ++vr;
  for (int a = 0; a < 3; ++a)
    for (Index k = 0; k < edge_extent(a, 2); ++k)
      for (Index j = 0; j < edge_extent(a, 1); ++j)
        for (Index i = 0; i < edge_extent(a, 0); ++i)
          if (edge_constrained(a, i, j, k)) ++er;
  for (int a = 0; a < 3; ++a)
    for (Index k = 0; k < face_extent(a, 2); ++k)
      for (Index j = 0; j < face_extent(a, 1); ++j)
        for (Index i = 0; i < face_extent(a, 0); ++i)
          if (face_constrained(a, i, j, k)) ++fr;
  out.expected = 1 - (vr - er + fr);
  return out;
}

std::array<double, 3> DofLayout::vertex_pos(Index i, Index j, Index k) const {
  return {i * spec_.h(0), j * spec_.h(1), k * spec_.h(2)};
}

std::array<double, 3> DofLayout::edge_mid(int axis, Index i, Index j, Index k) const {
  const Index pos[3] = {i, j, k};
  std::array<double, 3> p;
  for (int d = 0; d < 3; ++d)
    p[d] = (pos[d] + (d == axis ? 0.5 : 0.0)) * spec_.h(d);
  return p;
}

std::array<double, 3> DofLayout::face_center(int axis, Index i, Index j, Index k) const {
  const Index pos[3] = {i, j, k};
  std::array<double, 3> p;
  for (int d = 0; d < 3; ++d)
    p[d] = (pos[d] + (d == axis ? 0.0 : 0.5)) * spec_.h(d);
  return p;
}

std::array<double, 3> DofLayout::cell_center(Index i, Index j, Index k) const {
  return {(i + 0.5) * spec_.h(0), (j + 0.5) * spec_.h(1), (k + 0.5) * spec_.h(2)};
}

namespace {

// Dual length of a vertex-type lattice position: h inside, h/2 on a box
// boundary.
double dual_len(const GridSpec& spec, int axis, Index pos) {
  if (spec.topology == Topology::Torus) return spec.h(axis);
  if (pos == 0 || pos == spec.cells[axis]) return 0.5 * spec.h(axis);
  return spec.h(axis);
}

double positive_weight(const ScalarField& w, const std::array<double, 3>& p,
                       const char* what) {
  const double v = w(p[0], p[1], p[2]);
  if (!(v > 0.0) || !std::isfinite(v))
    throw StructuralError(std::string(what) + ": material weight must be positive");
  return v;
}

}  // namespace

GridComplex build_derham(const GridSpec& spec, const MaterialField& mat) {
  spec.validate();
  DofLayout layout(spec);
  const bool torus = spec.topology == Topology::Torus;

  // --- mass matrices ---
  Vec m0(layout.n_vertex_dofs());
  for (Index k = 0; k < layout.vert_extent(2); ++k)
    for (Index j = 0; j < layout.vert_extent(1); ++j)
      for (Index i = 0; i < layout.vert_extent(0); ++i) {
        const Index d = layout.vertex_dof(i, j, k);
        if (d < 0) continue;
        m0(d) = dual_len(spec, 0, i) * dual_len(spec, 1, j) * dual_len(spec, 2, k);
      }

  Vec m1(layout.n_edge_dofs());
  for (int a = 0; a < 3; ++a) {
    const int b = other1(a), c = other2(a);
    for (Index k = 0; k < layout.edge_extent(a, 2); ++k)
      for (Index j = 0; j < layout.edge_extent(a, 1); ++j)
        for (Index i = 0; i < layout.edge_extent(a, 0); ++i) {
          const Index d = layout.edge_dof(a, i, j, k);
          if (d < 0) continue;
          const Index pos[3] = {i, j, k};
          const double vol = spec.h(a) * dual_len(spec, b, pos[b]) * dual_len(spec, c, pos[c]);
          m1(d) = vol * positive_weight(mat.eps[a], layout.edge_mid(a, i, j, k), "eps");
        }
  }

  Vec m2(layout.n_face_dofs());
  for (int a = 0; a < 3; ++a) {
    const int b = other1(a), c = other2(a);
    for (Index k = 0; k < layout.face_extent(a, 2); ++k)
      for (Index j = 0; j < layout.face_extent(a, 1); ++j)
        for (Index i = 0; i < layout.face_extent(a, 0); ++i) {
          const Index d = layout.face_dof(a, i, j, k);
          if (d < 0) continue;
          const Index pos[3] = {i, j, k};
          const double vol = dual_len(spec, a, pos[a]) * spec.h(b) * spec.h(c);
          m2(d) = vol * positive_weight(mat.mu[a], layout.face_center(a, i, j, k), "mu");
        }
  }

  Vec m3 = Vec::Constant(layout.n_cell_dofs(), spec.h(0) * spec.h(1) * spec.h(2));

  SpacePtr h0 = make_diagonal(std::move(m0));
  SpacePtr h1 = make_diagonal(std::move(m1));
  SpacePtr h2 = make_diagonal(std::move(m2));
  SpacePtr h3 = make_diagonal(std::move(m3));

  // --- grad: rows = edges, cols = vertices ---
  const auto vwrap = [&](int axis, Index p) {
    return torus ? (p % layout.vert_extent(axis)) : p;
  };
  std::vector<Triplet> tg;
  tg.reserve(2 * layout.n_edge_dofs());
  for (int a = 0; a < 3; ++a) {
    for (Index k = 0; k < layout.edge_extent(a, 2); ++k)
      for (Index j = 0; j < layout.edge_extent(a, 1); ++j)
        for (Index i = 0; i < layout.edge_extent(a, 0); ++i) {
          const Index row = layout.edge_dof(a, i, j, k);
          if (row < 0) continue;
          Index lo[3] = {i, j, k};
          Index hi[3] = {i, j, k};
          hi[a] = vwrap(a, hi[a] + 1);
          const double inv_h = 1.0 / spec.h(a);
          const Index v0 = layout.vertex_dof(lo[0], lo[1], lo[2]);
          const Index v1 = layout.vertex_dof(hi[0], hi[1], hi[2]);
          if (v1 >= 0) tg.emplace_back(row, v1, inv_h);
          if (v0 >= 0) tg.emplace_back(row, v0, -inv_h);
        }
  }
  SpMat gmat(layout.n_edge_dofs(), layout.n_vertex_dofs());
  gmat.setFromTriplets(tg.begin(), tg.end());

  // --- curl: rows = faces, cols = edges ---
  // (curl E)_a = dE_c/dx_b - dE_b/dx_c on the face normal to axis a.
  std::vector<Triplet> tc;
  tc.reserve(4 * layout.n_face_dofs());
  const auto ewrap = [&](int edge_axis, int dir, Index p) {
    return torus ? (p % layout.edge_extent(edge_axis, dir)) : p;
  };
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;  // cyclic, fixes orientation
    for (Index k = 0; k < layout.face_extent(a, 2); ++k)
      for (Index j = 0; j < layout.face_extent(a, 1); ++j)
        for (Index i = 0; i < layout.face_extent(a, 0); ++i) {
          const Index row = layout.face_dof(a, i, j, k);
          if (row < 0) continue;
          const Index pos[3] = {i, j, k};
          // E_c edges at b-offsets 0 and 1
          {
            Index e[3] = {pos[0], pos[1], pos[2]};
            const double inv_hb = 1.0 / spec.h(b);
            const Index elo = layout.edge_dof(c, e[0], e[1], e[2]);
            e[b] = ewrap(c, b, e[b] + 1);
            const Index ehi = layout.edge_dof(c, e[0], e[1], e[2]);
            if (ehi >= 0) tc.emplace_back(row, ehi, inv_hb);
            if (elo >= 0) tc.emplace_back(row, elo, -inv_hb);
          }
          // E_b edges at c-offsets 0 and 1, with the opposite sign
          {
            Index e[3] = {pos[0], pos[1], pos[2]};
            const double inv_hc = 1.0 / spec.h(c);
            const Index elo = layout.edge_dof(b, e[0], e[1], e[2]);
            e[c] = ewrap(b, c, e[c] + 1);
            const Index ehi = layout.edge_dof(b, e[0], e[1], e[2]);
            if (ehi >= 0) tc.emplace_back(row, ehi, -inv_hc);
            if (elo >= 0) tc.emplace_back(row, elo, inv_hc);
          }
        }
  }
  SpMat cmat(layout.n_face_dofs(), layout.n_edge_dofs());
  cmat.setFromTriplets(tc.begin(), tc.end());

  // --- div: rows = cells, cols = faces ---
  std::vector<Triplet> td;
  td.reserve(6 * layout.n_cell_dofs());
  const auto fwrap = [&](int face_axis, int dir, Index p) {
    return torus ? (p % layout.face_extent(face_axis, dir)) : p;
  };
  for (Index k = 0; k < spec.cells[2]; ++k)
    for (Index j = 0; j < spec.cells[1]; ++j)
      for (Index i = 0; i < spec.cells[0]; ++i) {
        const Index row = layout.cell_dof(i, j, k);
        for (int a = 0; a < 3; ++a) {
          Index f[3] = {i, j, k};
          const double inv_h = 1.0 / spec.h(a);
          const Index flo = layout.face_dof(a, f[0], f[1], f[2]);
          f[a] = fwrap(a, a, f[a] + 1);
          const Index fhi = layout.face_dof(a, f[0], f[1], f[2]);
          if (fhi >= 0) td.emplace_back(row, fhi, inv_h);
          if (flo >= 0) td.emplace_back(row, flo, -inv_h);
        }
      }
  SpMat dmat(layout.n_cell_dofs(), layout.n_face_dofs());
  dmat.setFromTriplets(td.begin(), td.end());

  return GridComplex{spec,
                     layout,
                     h0,
                     h1,
                     h2,
                     h3,
                     ComplexOperator(std::move(gmat), h0, h1),
                     ComplexOperator(std::move(cmat), h1, h2),
                     ComplexOperator(std::move(dmat), h2, h3)};
}

Vec sample_scalar(const DofLayout& layout, const ScalarField& f) {
  Vec out(layout.n_vertex_dofs());
  for (Index k = 0; k < layout.vert_extent(2); ++k)
    for (Index j = 0; j < layout.vert_extent(1); ++j)
      for (Index i = 0; i < layout.vert_extent(0); ++i) {
        const Index d = layout.vertex_dof(i, j, k);
        if (d < 0) continue;
        const auto p = layout.vertex_pos(i, j, k);
        out(d) = f(p[0], p[1], p[2]);
      }
  return out;
}

Vec sample_vector_h1(const DofLayout& layout, const VectorField& f) {
  Vec out(layout.n_edge_dofs());
  for (int a = 0; a < 3; ++a)
    for (Index k = 0; k < layout.edge_extent(a, 2); ++k)
      for (Index j = 0; j < layout.edge_extent(a, 1); ++j)
        for (Index i = 0; i < layout.edge_extent(a, 0); ++i) {
          const Index d = layout.edge_dof(a, i, j, k);
          if (d < 0) continue;
          const auto p = layout.edge_mid(a, i, j, k);
          out(d) = f(p[0], p[1], p[2])[a];
        }
  return out;
}

Vec sample_vector_h2(const DofLayout& layout, const VectorField& f) {
  Vec out(layout.n_face_dofs());
  for (int a = 0; a < 3; ++a)
    for (Index k = 0; k < layout.face_extent(a, 2); ++k)
      for (Index j = 0; j < layout.face_extent(a, 1); ++j)
        for (Index i = 0; i < layout.face_extent(a, 0); ++i) {
          const Index d = layout.face_dof(a, i, j, k);
          if (d < 0) continue;
          const auto p = layout.face_center(a, i, j, k);
          out(d) = f(p[0], p[1], p[2])[a];
        }
  return out;
}

BoundaryTrace boundary_trace_check(const GridSpec& spec, const Vec& x) {
  if (spec.topology == Topology::Torus)
    throw StructuralError("boundary_trace_check: no boundary on a torus");
  DofLayout constrained(spec);
  if (x.size() == constrained.n_edge_dofs()) return BoundaryTrace{0.0};

  GridSpec free = spec;
  free.bc.fill(FaceBc::Normal);
  DofLayout unconstrained(free);
  if (x.size() != unconstrained.n_edge_dofs())
    throw StructuralError("boundary_trace_check: vector matches neither layout");
  double worst = 0.0;
  for (int a = 0; a < 3; ++a)
    for (Index k = 0; k < unconstrained.edge_extent(a, 2); ++k)
      for (Index j = 0; j < unconstrained.edge_extent(a, 1); ++j)
        for (Index i = 0; i < unconstrained.edge_extent(a, 0); ++i)
          if (constrained.edge_constrained(a, i, j, k)) {
            const Index d = unconstrained.edge_dof(a, i, j, k);
            worst = std::max(worst, std::abs(x(d)));
          }
  return BoundaryTrace{worst};
}

}  // namespace hodgelab
