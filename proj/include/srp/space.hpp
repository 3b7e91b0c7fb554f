// space.hpp: continuous Lagrange P1/P2 spaces (scalar or 2-vector) over a
// TriMesh, with global dof numbering, nodal interpolation, field evaluation
// and Dirichlet bookkeeping.
//
// Scalar dofs are vertex values (P1) or vertex plus edge-midpoint values
// (P2). Vector dofs interleave components: global = scalar_dof * d + comp.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>

#include "srp/csr.hpp"
#include "srp/mesh.hpp"
#include "srp/quadrature.hpp"

namespace srp {

struct CellGeometry {
    std::array<std::array<double, 2>, 2> jac;      // reference -> physical
    std::array<std::array<double, 2>, 2> inv_jt;   // J^{-T}
    double det = 0.0;                              // 2 * area
    Point2 origin{};

    Point2 map(const std::array<double, 3>& bary) const {
        return {origin[0] + jac[0][0] * bary[1] + jac[0][1] * bary[2],
                origin[1] + jac[1][0] * bary[1] + jac[1][1] * bary[2]};
    }
};

namespace basis {

inline int count(int degree) { return degree == 1 ? 3 : 6; }

inline void values(int degree, const std::array<double, 3>& L, double* N) {
    if (degree == 1) {
        N[0] = L[0];
        N[1] = L[1];
        N[2] = L[2];
    } else {
        N[0] = L[0] * (2 * L[0] - 1);
        N[1] = L[1] * (2 * L[1] - 1);
        N[2] = L[2] * (2 * L[2] - 1);
        N[3] = 4 * L[0] * L[1];
        N[4] = 4 * L[1] * L[2];
        N[5] = 4 * L[2] * L[0];
    }
}

// Gradients with respect to the reference coordinates (xi, eta) where
// L = (1 - xi - eta, xi, eta).
inline void ref_gradients(int degree, const std::array<double, 3>& L, double (*dN)[2]) {
    static constexpr double dL[3][2] = {{-1, -1}, {1, 0}, {0, 1}};
    if (degree == 1) {
        for (int i = 0; i < 3; ++i) {
            dN[i][0] = dL[i][0];
            dN[i][1] = dL[i][1];
        }
    } else {
        for (int i = 0; i < 3; ++i) {
            dN[i][0] = (4 * L[i] - 1) * dL[i][0];
            dN[i][1] = (4 * L[i] - 1) * dL[i][1];
        }
        static constexpr int ea[3] = {0, 1, 2}, eb[3] = {1, 2, 0};
        for (int e = 0; e < 3; ++e) {
            int a = ea[e], b = eb[e];
            dN[3 + e][0] = 4 * (L[a] * dL[b][0] + L[b] * dL[a][0]);
            dN[3 + e][1] = 4 * (L[a] * dL[b][1] + L[b] * dL[a][1]);
        }
    }
}

}  // namespace basis

// Basis values and reference gradients tabulated at the points of a rule.
struct BasisTable {
    int degree = 1;
    int nb = 3;
    std::vector<std::array<double, 6>> N;                  // [q][basis]
    std::vector<std::array<std::array<double, 2>, 6>> dN;  // [q][basis][dim]

    BasisTable() = default;
    BasisTable(int deg, const QuadratureRule& rule) : degree(deg), nb(basis::count(deg)) {
        N.resize(rule.size());
        dN.resize(rule.size());
        for (int q = 0; q < rule.size(); ++q) {
            double vals[6];
            double grads[6][2];
            basis::values(degree, rule.points[q].bary, vals);
            basis::ref_gradients(degree, rule.points[q].bary, grads);
            for (int i = 0; i < nb; ++i) {
                N[q][i] = vals[i];
                dN[q][i] = {grads[i][0], grads[i][1]};
            }
        }
    }
};

struct DirichletEntry {
    int global_dof;
    int scalar_dof;
    int component;
};

class FESpace {
public:
    FESpace() = default;

    FESpace(const TriMesh& mesh, int degree, int components) : mesh_(&mesh), degree_(degree), components_(components) {
        if (degree != 1 && degree != 2) throw std::invalid_argument("FESpace: degree must be 1 or 2");
        if (components != 1 && components != 2) throw std::invalid_argument("FESpace: components must be 1 or 2");
        build();
    }

    const TriMesh& mesh() const { return *mesh_; }
    int degree() const { return degree_; }
    int components() const { return components_; }
    int n_scalar_dofs() const { return n_scalar_; }
    int n_dofs() const { return n_scalar_ * components_; }
    int n_basis() const { return basis::count(degree_); }
    int n_cell_dofs() const { return n_basis() * components_; }
    int n_edges() const { return static_cast<int>(edge_nodes_.size()); }

    int global_dof(int scalar_dof, int comp) const { return scalar_dof * components_ + comp; }

    const std::array<int, 6>& cell_scalar_dofs(int cell) const { return cell_dofs_[cell]; }

    // Expanded (component-interleaved) dof list for a cell, component-major
    // within each basis function: [b0c0, b0c1, b1c0, ...].
    void cell_dofs(int cell, int* out) const {
        const auto& sd = cell_dofs_[cell];
        int k = 0;
        for (int b = 0; b < n_basis(); ++b)
            for (int c = 0; c < components_; ++c) out[k++] = global_dof(sd[b], c);
    }

    const Point2& dof_point(int scalar_dof) const { return dof_points_[scalar_dof]; }

    CellGeometry cell_geometry(int cell) const {
        const auto& c = mesh_->cells[cell];
        const Point2& p0 = mesh_->nodes[c[0]];
        const Point2& p1 = mesh_->nodes[c[1]];
        const Point2& p2 = mesh_->nodes[c[2]];
        CellGeometry g;
        g.origin = p0;
        g.jac = {{{p1[0] - p0[0], p2[0] - p0[0]}, {p1[1] - p0[1], p2[1] - p0[1]}}};
        g.det = g.jac[0][0] * g.jac[1][1] - g.jac[0][1] * g.jac[1][0];
        const double inv_det = 1.0 / g.det;
        // J^{-1} = (1/det) [[j11, -j01], [-j10, j00]]; transpose stored.
        g.inv_jt = {{{g.jac[1][1] * inv_det, -g.jac[1][0] * inv_det},
                     {-g.jac[0][1] * inv_det, g.jac[0][0] * inv_det}}};
        return g;
    }

    // --- Dirichlet bookkeeping -------------------------------------------

    // Marks the dofs lying on boundary edges with the given tags for the
    // masked components. May be called repeatedly (union of constraints).
    void add_dirichlet(const std::set<int>& tags, std::array<bool, 2> comp_mask = {true, true}) {
        for (int t : tags)
            if (!mesh_->tag_names.count(t))
                throw std::invalid_argument("add_dirichlet: unknown tag " + std::to_string(t));
        for (const auto& be : mesh_->boundary_edges) {
            if (!tags.count(be.tag)) continue;
            std::vector<int> sdofs = {be.a, be.b};
            if (degree_ == 2) sdofs.push_back(mesh_->n_nodes() + edge_id(be.a, be.b));
            for (int s : sdofs)
                for (int c = 0; c < components_; ++c)
                    if (comp_mask[c]) mark_dirichlet(s, c);
        }
    }

    const std::vector<DirichletEntry>& dirichlet() const { return dirichlet_; }
    bool is_dirichlet(int global_dof) const { return is_dirichlet_[global_dof] != 0; }

    // Evaluates g(point, component) at the constrained dofs.
    Vector dirichlet_values(const std::function<double(const Point2&, int)>& g) const {
        Vector vals(dirichlet_.size());
        for (size_t i = 0; i < dirichlet_.size(); ++i)
            vals[i] = g(dof_points_[dirichlet_[i].scalar_dof], dirichlet_[i].component);
        return vals;
    }

    int edge_id(int a, int b) const {
        auto it = std::lower_bound(edge_nodes_.begin(), edge_nodes_.end(),
                                   std::make_pair(std::min(a, b), std::max(a, b)));
        if (it == edge_nodes_.end() || *it != std::make_pair(std::min(a, b), std::max(a, b)))
            throw std::runtime_error("FESpace: unknown edge");
        return static_cast<int>(it - edge_nodes_.begin());
    }

private:
    void build() {
        const auto& cells = mesh_->cells;
        edge_nodes_.reserve(cells.size() * 3 / 2);
        for (const auto& c : cells)
            for (int k = 0; k < 3; ++k)
                edge_nodes_.emplace_back(std::min(c[k], c[(k + 1) % 3]), std::max(c[k], c[(k + 1) % 3]));
        std::sort(edge_nodes_.begin(), edge_nodes_.end());
        edge_nodes_.erase(std::unique(edge_nodes_.begin(), edge_nodes_.end()), edge_nodes_.end());

        n_scalar_ = mesh_->n_nodes() + (degree_ == 2 ? n_edges() : 0);
        cell_dofs_.resize(cells.size());
        for (size_t c = 0; c < cells.size(); ++c) {
            const auto& cell = cells[c];
            cell_dofs_[c] = {cell[0], cell[1], cell[2], -1, -1, -1};
            if (degree_ == 2)
                for (int e = 0; e < 3; ++e)
                    cell_dofs_[c][3 + e] = mesh_->n_nodes() + edge_id(cell[e], cell[(e + 1) % 3]);
        }
        dof_points_.resize(n_scalar_);
        for (int i = 0; i < mesh_->n_nodes(); ++i) dof_points_[i] = mesh_->nodes[i];
        if (degree_ == 2)
            for (int e = 0; e < n_edges(); ++e) {
                auto [a, b] = edge_nodes_[e];
                dof_points_[mesh_->n_nodes() + e] = {0.5 * (mesh_->nodes[a][0] + mesh_->nodes[b][0]),
                                                     0.5 * (mesh_->nodes[a][1] + mesh_->nodes[b][1])};
            }
        is_dirichlet_.assign(n_dofs(), 0);
    }

    void mark_dirichlet(int scalar_dof, int comp) {
        int g = global_dof(scalar_dof, comp);
        if (is_dirichlet_[g]) return;
        is_dirichlet_[g] = 1;
        dirichlet_.push_back({g, scalar_dof, comp});
    }

    const TriMesh* mesh_ = nullptr;
    int degree_ = 1;
    int components_ = 1;
    int n_scalar_ = 0;
    std::vector<std::pair<int, int>> edge_nodes_;
    std::vector<std::array<int, 6>> cell_dofs_;
    std::vector<Point2> dof_points_;
    std::vector<DirichletEntry> dirichlet_;
    std::vector<std::uint8_t> is_dirichlet_;
};

struct FEField {
    const FESpace* space = nullptr;
    Vector coeffs;

    FEField() = default;
    explicit FEField(const FESpace& s) : space(&s), coeffs(s.n_dofs(), 0.0) {}
    FEField(const FESpace& s, Vector c) : space(&s), coeffs(std::move(c)) {
        if (static_cast<int>(coeffs.size()) != s.n_dofs())
            throw std::invalid_argument("FEField: coefficient length does not match space");
    }

    // Value of each component at a barycentric point of a cell.
    std::array<double, 2> value(int cell, const std::array<double, 3>& bary) const {
        double N[6];
        basis::values(space->degree(), bary, N);
        const auto& sd = space->cell_scalar_dofs(cell);
        std::array<double, 2> v = {0.0, 0.0};
        for (int b = 0; b < space->n_basis(); ++b)
            for (int c = 0; c < space->components(); ++c) v[c] += N[b] * coeffs[space->global_dof(sd[b], c)];
        return v;
    }

    // Physical gradient: grad[c][d] = d u_c / d x_d.
    std::array<std::array<double, 2>, 2> gradient(int cell, const std::array<double, 3>& bary,
                                                  const CellGeometry& geom) const {
        double dN[6][2];
        basis::ref_gradients(space->degree(), bary, dN);
        std::array<std::array<double, 2>, 2> g = {{{0, 0}, {0, 0}}};
        const auto& sd = space->cell_scalar_dofs(cell);
        for (int b = 0; b < space->n_basis(); ++b) {
            const double gx = geom.inv_jt[0][0] * dN[b][0] + geom.inv_jt[0][1] * dN[b][1];
            const double gy = geom.inv_jt[1][0] * dN[b][0] + geom.inv_jt[1][1] * dN[b][1];
            for (int c = 0; c < space->components(); ++c) {
                const double u = coeffs[space->global_dof(sd[b], c)];
                g[c][0] += gx * u;
                g[c][1] += gy * u;
            }
        }
        return g;
    }
};

// Nodal interpolation of a callable f(point, component).
inline FEField interpolate(const FESpace& space, const std::function<double(const Point2&, int)>& f) {
    FEField field(space);
    for (int s = 0; s < space.n_scalar_dofs(); ++s)
        for (int c = 0; c < space.components(); ++c)
            field.coeffs[space.global_dof(s, c)] = f(space.dof_point(s), c);
    return field;
}

// Uniform-grid accelerated point location with barycentric tolerance.
class PointLocator {
public:
    explicit PointLocator(const TriMesh& mesh, int bins_per_axis = 64) : mesh_(&mesh) {
        lo_ = hi_ = mesh.nodes.at(0);
        for (const auto& p : mesh.nodes) {
            lo_[0] = std::min(lo_[0], p[0]);
            lo_[1] = std::min(lo_[1], p[1]);
            hi_[0] = std::max(hi_[0], p[0]);
            hi_[1] = std::max(hi_[1], p[1]);
        }
        nb_ = bins_per_axis;
        bins_.resize(static_cast<size_t>(nb_) * nb_);
        for (int c = 0; c < mesh.n_cells(); ++c) {
            Point2 clo = mesh.nodes[mesh.cells[c][0]], chi = clo;
            for (int k = 1; k < 3; ++k) {
                const auto& p = mesh.nodes[mesh.cells[c][k]];
                clo[0] = std::min(clo[0], p[0]);
                clo[1] = std::min(clo[1], p[1]);
                chi[0] = std::max(chi[0], p[0]);
                chi[1] = std::max(chi[1], p[1]);
            }
            for (int by = bin(clo[1], 1); by <= bin(chi[1], 1); ++by)
                for (int bx = bin(clo[0], 0); bx <= bin(chi[0], 0); ++bx)
                    bins_[static_cast<size_t>(by) * nb_ + bx].push_back(c);
        }
    }

    // Returns the containing cell and barycentric coordinates, or nullopt.
    std::optional<std::pair<int, std::array<double, 3>>> locate(const Point2& x, double tol = 1e-10) const {
        int bx = bin(x[0], 0), by = bin(x[1], 1);
        for (int c : bins_[static_cast<size_t>(by) * nb_ + bx]) {
            auto bary = barycentric(c, x);
            if (bary[0] >= -tol && bary[1] >= -tol && bary[2] >= -tol) return std::make_pair(c, bary);
        }
        return std::nullopt;
    }

    std::array<double, 3> barycentric(int cell, const Point2& x) const {
        const auto& c = mesh_->cells[cell];
        const Point2& p0 = mesh_->nodes[c[0]];
        const Point2& p1 = mesh_->nodes[c[1]];
        const Point2& p2 = mesh_->nodes[c[2]];
        const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        const double l1 = ((x[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (x[1] - p0[1])) / det;
        const double l2 = ((p1[0] - p0[0]) * (x[1] - p0[1]) - (x[0] - p0[0]) * (p1[1] - p0[1])) / det;
        return {1.0 - l1 - l2, l1, l2};
    }

private:
    int bin(double v, int axis) const {
        const double span = hi_[axis] - lo_[axis];
        int b = span > 0 ? static_cast<int>((v - lo_[axis]) / span * nb_) : 0;
        return std::clamp(b, 0, nb_ - 1);
    }

    const TriMesh* mesh_;
    Point2 lo_{}, hi_{};
    int nb_ = 1;
    std::vector<std::vector<int>> bins_;
};

}  // namespace srp
