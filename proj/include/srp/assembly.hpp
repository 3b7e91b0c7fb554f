// assembly.hpp: Galerkin assembly of the mass, diffusion, convection and
// Poisson forms, load vectors, L2 projection and Dirichlet elimination.
//
// All forms integrate with a single quadrature rule (degree 4 by default,
// exact for the P2 x P2 mass matrix). Viscosity enters the diffusion form as
// values at quadrature points computed from the current velocity gradient,
// never as an interpolated nodal field.

#pragma once

#include <cassert>
#include <tuple>

#include "srp/csr.hpp"
#include "srp/rheology.hpp"
#include "srp/solver.hpp"
#include "srp/space.hpp"

namespace srp {

inline constexpr int kAssemblyQuadratureDegree = 4;

inline std::shared_ptr<CsrPattern> build_pattern(const FESpace& rows, const FESpace& cols) {
    if (&rows.mesh() != &cols.mesh()) throw std::invalid_argument("build_pattern: spaces on different meshes");
    std::vector<std::vector<int>> row_cols(rows.n_dofs());
    std::vector<int> rd(rows.n_cell_dofs()), cd(cols.n_cell_dofs());
    for (int c = 0; c < rows.mesh().n_cells(); ++c) {
        rows.cell_dofs(c, rd.data());
        cols.cell_dofs(c, cd.data());
        for (int i : rd)
            for (int j : cd) row_cols[i].push_back(j);
    }
    auto p = std::make_shared<CsrPattern>();
    p->rows = rows.n_dofs();
    p->cols = cols.n_dofs();
    p->row_ptr.resize(p->rows + 1, 0);
    for (int r = 0; r < p->rows; ++r) {
        auto& rc = row_cols[r];
        std::sort(rc.begin(), rc.end());
        rc.erase(std::unique(rc.begin(), rc.end()), rc.end());
        p->row_ptr[r + 1] = p->row_ptr[r] + static_cast<int>(rc.size());
    }
    p->col_idx.reserve(p->row_ptr.back());
    for (auto& rc : row_cols) p->col_idx.insert(p->col_idx.end(), rc.begin(), rc.end());
    return p;
}

inline std::shared_ptr<CsrPattern> build_pattern(const FESpace& space) { return build_pattern(space, space); }

namespace detail {

// Per-cell assembly scratch: physical gradients and quadrature points.
struct CellContext {
    const FESpace* space;
    const QuadratureRule* rule;
    const BasisTable* table;
    CellGeometry geom;
    int cell = -1;
    std::vector<std::array<std::array<double, 2>, 6>> grad;  // [q][basis][dim]
    std::vector<Point2> xq;

    CellContext(const FESpace& s, const QuadratureRule& r, const BasisTable& t) : space(&s), rule(&r), table(&t) {
        grad.resize(r.size());
        xq.resize(r.size());
    }

    void bind(int c) {
        cell = c;
        geom = space->cell_geometry(c);
        for (int q = 0; q < rule->size(); ++q) {
            for (int b = 0; b < space->n_basis(); ++b) {
                const auto& dn = table->dN[q][b];
                grad[q][b] = {geom.inv_jt[0][0] * dn[0] + geom.inv_jt[0][1] * dn[1],
                              geom.inv_jt[1][0] * dn[0] + geom.inv_jt[1][1] * dn[1]};
            }
            xq[q] = geom.map(rule->points[q].bary);
        }
    }

    double jxw(int q) const { return rule->points[q].weight * geom.det; }
};

inline const BasisTable& basis_table(int degree, const QuadratureRule& rule) {
    static BasisTable tables[2][7];
    BasisTable& t = tables[degree - 1][rule.degree];
    if (t.N.empty()) t = BasisTable(degree, rule);
    return t;
}

}  // namespace detail

// --- matrices -------------------------------------------------------------

inline CsrMatrix assemble_mass(const FESpace& space, std::shared_ptr<const CsrPattern> pattern = nullptr,
                               int quad_degree = kAssemblyQuadratureDegree) {
    if (!pattern) pattern = build_pattern(space);
    CsrMatrix M(pattern);
    const auto& rule = triangle_rule(quad_degree);
    const auto& table = detail::basis_table(space.degree(), rule);
    detail::CellContext ctx(space, rule, table);
    const int nb = space.n_basis(), d = space.components();
    std::vector<int> dofs(space.n_cell_dofs());
    for (int c = 0; c < space.mesh().n_cells(); ++c) {
        ctx.bind(c);
        space.cell_dofs(c, dofs.data());
        for (int q = 0; q < rule.size(); ++q) {
            const double w = ctx.jxw(q);
            for (int i = 0; i < nb; ++i)
                for (int j = 0; j < nb; ++j) {
                    const double v = w * table.N[q][i] * table.N[q][j];
                    for (int comp = 0; comp < d; ++comp) M.add(dofs[i * d + comp], dofs[j * d + comp], v);
                }
        }
    }
    return M;
}

inline CsrMatrix assemble_poisson(const FESpace& space, std::shared_ptr<const CsrPattern> pattern = nullptr,
                                  int quad_degree = kAssemblyQuadratureDegree) {
    if (space.components() != 1) throw std::invalid_argument("assemble_poisson: scalar space required");
    if (!pattern) pattern = build_pattern(space);
    CsrMatrix K(pattern);
    const auto& rule = triangle_rule(quad_degree);
    const auto& table = detail::basis_table(space.degree(), rule);
    detail::CellContext ctx(space, rule, table);
    const int nb = space.n_basis();
    std::vector<int> dofs(space.n_cell_dofs());
    for (int c = 0; c < space.mesh().n_cells(); ++c) {
        ctx.bind(c);
        space.cell_dofs(c, dofs.data());
        for (int q = 0; q < rule.size(); ++q) {
            const double w = ctx.jxw(q);
            for (int i = 0; i < nb; ++i)
                for (int j = 0; j < nb; ++j)
                    K.add(dofs[i], dofs[j],
                          w * (ctx.grad[q][i][0] * ctx.grad[q][j][0] + ctx.grad[q][i][1] * ctx.grad[q][j][1]));
        }
    }
    return K;
}

// Evaluates the viscosity at every quadrature point from the shear rate of
// the given velocity field. Layout: [cell * nq + q].
inline Vector viscosity_at_qp(const GeneralizedNewtonianLaw& law, const FEField& u,
                              int quad_degree = kAssemblyQuadratureDegree) {
    const FESpace& space = *u.space;
    const auto& rule = triangle_rule(quad_degree);
    const int nq = rule.size();
    Vector nu(static_cast<size_t>(space.mesh().n_cells()) * nq);
    for (int c = 0; c < space.mesh().n_cells(); ++c) {
        const auto geom = space.cell_geometry(c);
        for (int q = 0; q < nq; ++q) {
            const auto g = u.gradient(c, rule.points[q].bary, geom);
            nu[static_cast<size_t>(c) * nq + q] = viscosity(law, shear_tensor(g));
        }
    }
    return nu;
}

// Adds the symmetric-gradient diffusion form  int 2 nu D(u):D(v).
inline void add_diffusion(CsrMatrix& A, const FESpace& space, const Vector& nu_at_qp,
                          int quad_degree = kAssemblyQuadratureDegree) {
    if (space.components() != 2) throw std::invalid_argument("add_diffusion: vector space required");
    const auto& rule = triangle_rule(quad_degree);
    const auto& table = detail::basis_table(space.degree(), rule);
    detail::CellContext ctx(space, rule, table);
    const int nb = space.n_basis(), nq = rule.size();
    std::vector<int> dofs(space.n_cell_dofs());
    for (int c = 0; c < space.mesh().n_cells(); ++c) {
        ctx.bind(c);
        space.cell_dofs(c, dofs.data());
        for (int q = 0; q < nq; ++q) {
            const double nu = nu_at_qp[static_cast<size_t>(c) * nq + q];
            if (!(nu > 0.0))
                throw std::runtime_error("add_diffusion: nonpositive viscosity in cell " + std::to_string(c));
            const double w = ctx.jxw(q) * nu;
            for (int i = 0; i < nb; ++i)
                for (int j = 0; j < nb; ++j) {
                    const double gg = ctx.grad[q][i][0] * ctx.grad[q][j][0] + ctx.grad[q][i][1] * ctx.grad[q][j][1];
                    // nu * (delta_cd grad_i . grad_j + d_c phi_j d_d phi_i)
                    for (int cc = 0; cc < 2; ++cc)
                        for (int dd = 0; dd < 2; ++dd) {
                            double v = w * ctx.grad[q][j][cc] * ctx.grad[q][i][dd];
                            if (cc == dd) v += w * gg;
                            A.add(dofs[i * 2 + cc], dofs[j * 2 + dd], v);
                        }
                }
        }
    }
}

inline void add_scaled_mass(CsrMatrix& A, const FESpace& space, double scale,
                            int quad_degree = kAssemblyQuadratureDegree) {
    const auto& rule = triangle_rule(quad_degree);
    const auto& table = detail::basis_table(space.degree(), rule);
    detail::CellContext ctx(space, rule, table);
    const int nb = space.n_basis(), d = space.components();
    std::vector<int> dofs(space.n_cell_dofs());
    for (int c = 0; c < space.mesh().n_cells(); ++c) {
        ctx.bind(c);
        space.cell_dofs(c, dofs.data());
        for (int q = 0; q < rule.size(); ++q) {
            const double w = ctx.jxw(q) * scale;
            for (int i = 0; i < nb; ++i)
                for (int j = 0; j < nb; ++j) {
                    const double v = w * table.N[q][i] * table.N[q][j];
                    for (int comp = 0; comp < d; ++comp) A.add(dofs[i * d + comp], dofs[j * d + comp], v);
                }
        }
    }
}

// Adds the convection form  int rho (w . grad u) . v  for a given wind field.
inline void add_convection(CsrMatrix& A, const FESpace& space, const FEField& wind, double rho,
                           int quad_degree = kAssemblyQuadratureDegree) {
    if (space.components() != 2) throw std::invalid_argument("add_convection: vector space required");
    if (&wind.space->mesh() != &space.mesh()) throw std::invalid_argument("add_convection: mesh mismatch");
    const auto& rule = triangle_rule(quad_degree);
    const auto& table = detail::basis_table(space.degree(), rule);
    detail::CellContext ctx(space, rule, table);
    const int nb = space.n_basis(), nq = rule.size();
    std::vector<int> dofs(space.n_cell_dofs());
    for (int c = 0; c < space.mesh().n_cells(); ++c) {
        ctx.bind(c);
        space.cell_dofs(c, dofs.data());
        for (int q = 0; q < nq; ++q) {
            const auto w = wind.value(c, rule.points[q].bary);
            const double jw = ctx.jxw(q) * rho;
            for (int j = 0; j < nb; ++j) {
                const double conv_j = w[0] * ctx.grad[q][j][0] + w[1] * ctx.grad[q][j][1];
                for (int i = 0; i < nb; ++i) {
                    const double v = jw * table.N[q][i] * conv_j;
                    A.add(dofs[i * 2 + 0], dofs[j * 2 + 0], v);
                    A.add(dofs[i * 2 + 1], dofs[j * 2 + 1], v);
                }
            }
        }
    }
}

// Adds the Newton reaction term  int rho (u . grad) w . v  with w frozen.
inline void add_newton_convection(CsrMatrix& A, const FESpace& space, const FEField& w_field, double rho,
                                  int quad_degree = kAssemblyQuadratureDegree) {
    const auto& rule = triangle_rule(quad_degree);
    const auto& table = detail::basis_table(space.degree(), rule);
    detail::CellContext ctx(space, rule, table);
    const int nb = space.n_basis(), nq = rule.size();
    std::vector<int> dofs(space.n_cell_dofs());
    for (int c = 0; c < space.mesh().n_cells(); ++c) {
        ctx.bind(c);
        space.cell_dofs(c, dofs.data());
        for (int q = 0; q < nq; ++q) {
            const auto gw = w_field.gradient(c, rule.points[q].bary, ctx.geom);  // gw[c][d] = d w_c / d x_d
            const double jw = ctx.jxw(q) * rho;
            for (int i = 0; i < nb; ++i)
                for (int j = 0; j < nb; ++j) {
                    const double nn = jw * table.N[q][i] * table.N[q][j];
                    for (int cc = 0; cc < 2; ++cc)
                        for (int dd = 0; dd < 2; ++dd) A.add(dofs[i * 2 + cc], dofs[j * 2 + dd], nn * gw[cc][dd]);
                }
        }
    }
}

// Adds the Newton viscosity coupling. LHS gains
//   int 2 (G : D(u)) D(w) : D(v),
// and rhs gains the same expression with u replaced by w, where G is the
// Gateaux derivative of nu at D(w). Using the symmetry of G and D(w) this
// reduces to rank-one products of (G grad phi_j) and (D(w) grad phi_i).
inline void add_newton_viscosity(CsrMatrix& A, Vector& rhs, const FESpace& space, const FEField& w_field,
                                 const GeneralizedNewtonianLaw& law, int quad_degree = kAssemblyQuadratureDegree) {
    const auto& rule = triangle_rule(quad_degree);
    const auto& table = detail::basis_table(space.degree(), rule);
    detail::CellContext ctx(space, rule, table);
    const int nb = space.n_basis(), nq = rule.size();
    std::vector<int> dofs(space.n_cell_dofs());
    for (int c = 0; c < space.mesh().n_cells(); ++c) {
        ctx.bind(c);
        space.cell_dofs(c, dofs.data());
        for (int q = 0; q < nq; ++q) {
            const auto gw = w_field.gradient(c, rule.points[q].bary, ctx.geom);
            const ShearTensor Dw = shear_tensor(gw);
            const ShearTensor G = viscosity_gateaux(law, Dw);
            const double jw = 2.0 * ctx.jxw(q);
            const double gdotd = ddot(G, Dw);
            for (int i = 0; i < nb; ++i) {
                const std::array<double, 2> dwi = {Dw.xx * ctx.grad[q][i][0] + Dw.xy * ctx.grad[q][i][1],
                                                   Dw.xy * ctx.grad[q][i][0] + Dw.yy * ctx.grad[q][i][1]};
                for (int j = 0; j < nb; ++j) {
                    const std::array<double, 2> gj = {G.xx * ctx.grad[q][j][0] + G.xy * ctx.grad[q][j][1],
                                                      G.xy * ctx.grad[q][j][0] + G.yy * ctx.grad[q][j][1]};
                    for (int cc = 0; cc < 2; ++cc)
                        for (int dd = 0; dd < 2; ++dd)
                            A.add(dofs[i * 2 + cc], dofs[j * 2 + dd], jw * gj[dd] * dwi[cc]);
                }
                // rhs: 2 (G : D(w)) (D(w) grad phi_i)_c
                for (int cc = 0; cc < 2; ++cc) rhs[dofs[i * 2 + cc]] += jw * gdotd * dwi[cc];
            }
        }
    }
}

// Divergence coupling B[q][(j,d)] = int q_i d_d phi_j (pressure rows,
// velocity columns).
inline CsrMatrix assemble_divergence(const FESpace& pressure, const FESpace& velocity,
                                     int quad_degree = kAssemblyQuadratureDegree) {
    auto pattern = build_pattern(pressure, velocity);
    CsrMatrix B(pattern);
    const auto& rule = triangle_rule(quad_degree);
    const auto& ptab = detail::basis_table(pressure.degree(), rule);
    const auto& vtab = detail::basis_table(velocity.degree(), rule);
    detail::CellContext vctx(velocity, rule, vtab);
    const int npb = pressure.n_basis(), nvb = velocity.n_basis(), nq = rule.size();
    std::vector<int> pdofs(pressure.n_cell_dofs()), vdofs(velocity.n_cell_dofs());
    for (int c = 0; c < pressure.mesh().n_cells(); ++c) {
        vctx.bind(c);
        pressure.cell_dofs(c, pdofs.data());
        velocity.cell_dofs(c, vdofs.data());
        for (int q = 0; q < nq; ++q) {
            const double w = vctx.jxw(q);
            for (int i = 0; i < npb; ++i)
                for (int j = 0; j < nvb; ++j)
                    for (int dd = 0; dd < 2; ++dd)
                        B.add(pdofs[i], vdofs[j * 2 + dd], w * ptab.N[q][i] * vctx.grad[q][j][dd]);
        }
    }
    return B;
}

// --- vectors ---------------------------------------------------------------

// Load vector  int f . phi_i  with f(point) returning one value per component.
template <class F>
Vector assemble_load(const FESpace& space, F&& f, int quad_degree = kAssemblyQuadratureDegree) {
    const auto& rule = triangle_rule(quad_degree);
    const auto& table = detail::basis_table(space.degree(), rule);
    detail::CellContext ctx(space, rule, table);
    Vector out(space.n_dofs(), 0.0);
    const int nb = space.n_basis(), d = space.components();
    std::vector<int> dofs(space.n_cell_dofs());
    for (int c = 0; c < space.mesh().n_cells(); ++c) {
        ctx.bind(c);
        space.cell_dofs(c, dofs.data());
        for (int q = 0; q < rule.size(); ++q) {
            const auto fv = f(ctx.xq[q]);
            const double w = ctx.jxw(q);
            for (int i = 0; i < nb; ++i)
                for (int comp = 0; comp < d; ++comp) out[dofs[i * d + comp]] += w * table.N[q][i] * fv[comp];
        }
    }
    return out;
}

// Gradient-type load  int g . grad zeta_i  on a scalar space.
template <class G>
Vector assemble_grad_rhs(const FESpace& space, G&& g, int quad_degree = kAssemblyQuadratureDegree) {
    if (space.components() != 1) throw std::invalid_argument("assemble_grad_rhs: scalar space required");
    const auto& rule = triangle_rule(quad_degree);
    const auto& table = detail::basis_table(space.degree(), rule);
    detail::CellContext ctx(space, rule, table);
    Vector out(space.n_dofs(), 0.0);
    const int nb = space.n_basis();
    std::vector<int> dofs(space.n_cell_dofs());
    for (int c = 0; c < space.mesh().n_cells(); ++c) {
        ctx.bind(c);
        space.cell_dofs(c, dofs.data());
        for (int q = 0; q < rule.size(); ++q) {
            const auto gv = g(c, q, ctx.xq[q]);
            const double w = ctx.jxw(q);
            for (int i = 0; i < nb; ++i)
                out[dofs[i]] += w * (gv[0] * ctx.grad[q][i][0] + gv[1] * ctx.grad[q][i][1]);
        }
    }
    return out;
}

// Tensor-type load  int S : grad v  on a vector space.
template <class S>
Vector assemble_tensor_grad_rhs(const FESpace& space, S&& s, int quad_degree = kAssemblyQuadratureDegree) {
    if (space.components() != 2) throw std::invalid_argument("assemble_tensor_grad_rhs: vector space required");
    const auto& rule = triangle_rule(quad_degree);
    const auto& table = detail::basis_table(space.degree(), rule);
    detail::CellContext ctx(space, rule, table);
    Vector out(space.n_dofs(), 0.0);
    const int nb = space.n_basis();
    std::vector<int> dofs(space.n_cell_dofs());
    for (int c = 0; c < space.mesh().n_cells(); ++c) {
        ctx.bind(c);
        space.cell_dofs(c, dofs.data());
        for (int q = 0; q < rule.size(); ++q) {
            const auto sv = s(ctx.xq[q]);  // sv[c][d]
            const double w = ctx.jxw(q);
            for (int i = 0; i < nb; ++i)
                for (int cc = 0; cc < 2; ++cc)
                    out[dofs[i * 2 + cc]] +=
                        w * (sv[cc][0] * ctx.grad[q][i][0] + sv[cc][1] * ctx.grad[q][i][1]);
        }
    }
    return out;
}

// --- Dirichlet elimination --------------------------------------------------

// Symmetric elimination of constrained rows and columns. The eliminated
// column entries are retained so right-hand sides can be corrected for any
// boundary values without touching the matrix again.
class DirichletOperator {
public:
    DirichletOperator() = default;

    DirichletOperator(CsrMatrix& A, const FESpace& space) : space_(&space) {
        const auto& pat = A.pattern();
        auto& vals = A.values();
        ordinal_.assign(space.n_dofs(), -1);
        const auto& entries = space.dirichlet();
        for (size_t k = 0; k < entries.size(); ++k) ordinal_[entries[k].global_dof] = static_cast<int>(k);
        kept_diag_.assign(entries.size(), 1.0);
        for (int r = 0; r < pat.rows; ++r) {
            const bool row_bc = ordinal_[r] >= 0;
            for (int k = pat.row_ptr[r]; k < pat.row_ptr[r + 1]; ++k) {
                const int c = pat.col_idx[k];
                const bool col_bc = ordinal_[c] >= 0;
                if (row_bc) {
                    if (c == r) {
                        double d = vals[k] != 0.0 ? vals[k] : 1.0;
                        kept_diag_[ordinal_[r]] = d;
                        vals[k] = d;
                    } else {
                        vals[k] = 0.0;
                    }
                } else if (col_bc) {
                    if (vals[k] != 0.0) col_entries_.emplace_back(r, ordinal_[c], vals[k]);
                    vals[k] = 0.0;
                }
            }
        }
    }

    // b_free -= A_col * g ; b_constrained = kept_diag * g.
    void correct_rhs(Vector& b, const Vector& values) const {
        for (const auto& [row, ord, val] : col_entries_) b[row] -= val * values[ord];
        const auto& entries = space_->dirichlet();
        for (size_t k = 0; k < entries.size(); ++k) b[entries[k].global_dof] = kept_diag_[k] * values[k];
    }

    // Zeroes constrained entries (projector onto free dofs).
    void zero_constrained(Vector& v) const {
        for (const auto& e : space_->dirichlet()) v[e.global_dof] = 0.0;
    }

    void set_constrained(Vector& v, const Vector& values) const {
        const auto& entries = space_->dirichlet();
        for (size_t k = 0; k < entries.size(); ++k) v[entries[k].global_dof] = values[k];
    }

private:
    const FESpace* space_ = nullptr;
    std::vector<int> ordinal_;
    std::vector<double> kept_diag_;
    std::vector<std::tuple<int, int, double>> col_entries_;
};

// One-shot convenience form.
inline void apply_dirichlet(CsrMatrix& A, Vector& b, const FESpace& space, const Vector& values) {
    DirichletOperator op(A, space);
    op.correct_rhs(b, values);
}

// --- L2 projection -----------------------------------------------------------

template <class F>
FEField project_L2(const FESpace& space, F&& f, double rtol = 1e-12, int quad_degree = kAssemblyQuadratureDegree) {
    CsrMatrix M = assemble_mass(space, nullptr, quad_degree);
    Vector rhs = assemble_load(space, std::forward<F>(f), quad_degree);
    SolverConfig cfg;
    cfg.method = SolverConfig::Method::cg;
    cfg.precond = SolverConfig::Precond::jacobi;
    cfg.rtol = rtol;
    cfg.max_iter = 500;
    FEField out(space);
    auto res = solve_spd(M, rhs, out.coeffs, cfg);
    if (!res.converged) throw std::runtime_error("project_L2: mass solve failed");
    return out;
}

// Integrals of the scalar basis functions (the mass weights used for
// mean-zero shifts); their sum is the mesh area.
inline Vector basis_integrals(const FESpace& space, int quad_degree = kAssemblyQuadratureDegree) {
    if (space.components() != 1) throw std::invalid_argument("basis_integrals: scalar space required");
    return assemble_load(space, [](const Point2&) { return std::array<double, 1>{1.0}; }, quad_degree);
}

}  // namespace srp
