// solver.hpp: Krylov solvers (CG, BiCGSTAB, restarted GMRES) with Jacobi and
// ILU(0) preconditioning, and the pure-Neumann Poisson wrapper that works in
// the complement of the constant null space.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "srp/csr.hpp"

namespace srp {

struct SolverConfig {
    enum class Method { cg, bicgstab, gmres };
    enum class Precond { none, jacobi, ilu0 };

    Method method = Method::cg;
    Precond precond = Precond::ilu0;
    double rtol = 1e-10;
    int max_iter = 2000;
    int gmres_restart = 30;

    void validate() const {
        if (!(rtol > 0.0 && rtol < 1.0)) throw std::invalid_argument("SolverConfig: rtol must be in (0,1)");
        if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
    }
};

struct SolveResult {
    int iterations = 0;
    double residual = 0.0;  // recomputed true relative residual
    bool converged = false;
    bool breakdown = false;
};

class Preconditioner {
public:
    virtual ~Preconditioner() = default;
    virtual void apply(const Vector& r, Vector& z) const = 0;
};

class IdentityPrecond final : public Preconditioner {
public:
    void apply(const Vector& r, Vector& z) const override { z = r; }
};

class JacobiPrecond final : public Preconditioner {
public:
    explicit JacobiPrecond(const CsrMatrix& A) : inv_diag_(A.diagonal()) {
        for (auto& d : inv_diag_) d = (d != 0.0) ? 1.0 / d : 1.0;
    }
    void apply(const Vector& r, Vector& z) const override {
        z.resize(r.size());
        for (size_t i = 0; i < r.size(); ++i) z[i] = inv_diag_[i] * r[i];
    }

private:
    Vector inv_diag_;
};

// ILU(0): incomplete factorization on the matrix pattern. For a symmetric
// positive definite input this coincides with IC(0) up to scaling, so it is
// also used as the CG preconditioner. diag_shift regularizes singular
// (pure-Neumann) matrices; it only affects the preconditioner.
class Ilu0Precond final : public Preconditioner {
public:
    explicit Ilu0Precond(const CsrMatrix& A, double diag_shift = 0.0)
        : pattern_(&A.pattern()), values_(A.values()) {
        const auto& p = *pattern_;
        const int n = p.rows;
        diag_pos_.resize(n, -1);
        double diag_scale = 0.0;
        for (int r = 0; r < n; ++r) {
            for (int k = p.row_ptr[r]; k < p.row_ptr[r + 1]; ++k)
                if (p.col_idx[k] == r) diag_pos_[r] = k;
            if (diag_pos_[r] < 0) throw std::runtime_error("Ilu0Precond: missing diagonal entry");
            diag_scale += std::abs(values_[diag_pos_[r]]);
        }
        if (diag_shift != 0.0 && n > 0) {
            const double shift = diag_shift * diag_scale / n;
            for (int r = 0; r < n; ++r) values_[diag_pos_[r]] += shift;
        }
        for (int i = 0; i < n; ++i) {
            for (int kk = p.row_ptr[i]; kk < p.row_ptr[i + 1] && p.col_idx[kk] < i; ++kk) {
                const int k = p.col_idx[kk];
                double piv = values_[diag_pos_[k]];
                if (piv == 0.0) throw std::runtime_error("Ilu0Precond: zero pivot at row " + std::to_string(k));
                const double lik = values_[kk] / piv;
                values_[kk] = lik;
                // subtract lik * row k from row i, within the pattern, cols > k
                for (int jj = kk + 1; jj < p.row_ptr[i + 1]; ++jj) {
                    const int j = p.col_idx[jj];
                    int pos = find_in_row(k, j);
                    if (pos >= 0 && p.col_idx[pos] > k) values_[jj] -= lik * values_[pos];
                }
            }
        }
    }

    void apply(const Vector& r, Vector& z) const override {
        const auto& p = *pattern_;
        const int n = p.rows;
        z.resize(n);
        // L y = r (unit lower triangular)
        for (int i = 0; i < n; ++i) {
            double s = r[i];
            for (int k = p.row_ptr[i]; k < p.row_ptr[i + 1] && p.col_idx[k] < i; ++k)
                s -= values_[k] * z[p.col_idx[k]];
            z[i] = s;
        }
        // U z = y
        for (int i = n - 1; i >= 0; --i) {
            double s = z[i];
            for (int k = diag_pos_[i] + 1; k < p.row_ptr[i + 1]; ++k) s -= values_[k] * z[p.col_idx[k]];
            z[i] = s / values_[diag_pos_[i]];
        }
    }

private:
    int find_in_row(int row, int col) const {
        const auto& p = *pattern_;
        const int* lo = p.col_idx.data() + p.row_ptr[row];
        const int* hi = p.col_idx.data() + p.row_ptr[row + 1];
        const int* it = std::lower_bound(lo, hi, col);
        if (it == hi || *it != col) return -1;
        return static_cast<int>(it - p.col_idx.data());
    }

    const CsrPattern* pattern_;
    std::vector<double> values_;
    std::vector<int> diag_pos_;
};

inline std::unique_ptr<Preconditioner> make_preconditioner(const CsrMatrix& A, SolverConfig::Precond kind,
                                                           double diag_shift = 0.0) {
    switch (kind) {
        case SolverConfig::Precond::none: return std::make_unique<IdentityPrecond>();
        case SolverConfig::Precond::jacobi: return std::make_unique<JacobiPrecond>(A);
        case SolverConfig::Precond::ilu0: return std::make_unique<Ilu0Precond>(A, diag_shift);
    }
    return std::make_unique<IdentityPrecond>();
}

namespace detail {

inline bool has_nan(const Vector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return true;
    return false;
}

}  // namespace detail

// Generic operators: anything exposing rows() and mul(x, y). Used with
// CsrMatrix directly and with matrix-free operators (Schur complements).

template <class Op>
SolveResult cg_solve(const Op& A, const Vector& b, Vector& x, const Preconditioner& M, double rtol, int max_iter,
                     const std::function<void(const Vector&)>& iterate_hook = nullptr,
                     const std::function<void(Vector&)>& project = nullptr) {
    const int n = static_cast<int>(b.size());
    SolveResult res;
    const double bnorm = norm2(b);
    x.assign(n, 0.0);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    Vector r = b;
    if (project) project(r);
    Vector z(n), p(n), Ap(n);
    M.apply(r, z);
    if (project) project(z);
    p = z;
    double rz = dot(r, z);
    double rnorm = norm2(r);
    for (int it = 0; it < max_iter && rnorm / bnorm > rtol; ++it) {
        A.mul(p, Ap);
        double pAp = dot(p, Ap);
        if (pAp <= 0.0 || !std::isfinite(pAp)) {
            res.breakdown = !(pAp > 0.0);
            break;
        }
        double alpha = rz / pAp;
        axpy(alpha, p, x);
        axpy(-alpha, Ap, r);
        if (project) project(r);
        M.apply(r, z);
        if (project) project(z);
        double rz_new = dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        rnorm = norm2(r);
        res.iterations = it + 1;
        if (iterate_hook) iterate_hook(x);
        if (detail::has_nan(x)) {
            res.breakdown = true;
            break;
        }
    }
    A.mul(x, Ap);
    Vector true_r(n);
    for (int i = 0; i < n; ++i) true_r[i] = b[i] - Ap[i];
    if (project) project(true_r);
    res.residual = norm2(true_r) / bnorm;
    res.converged = res.residual <= rtol && !res.breakdown;
    return res;
}

template <class Op>
SolveResult bicgstab_solve(const Op& A, const Vector& b, Vector& x, const Preconditioner& M, double rtol,
                           int max_iter) {
    const int n = static_cast<int>(b.size());
    SolveResult res;
    const double bnorm = norm2(b);
    x.assign(n, 0.0);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    Vector r = b, r0 = b;
    Vector p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    double rnorm = norm2(r);
    for (int it = 0; it < max_iter && rnorm / bnorm > rtol; ++it) {
        double rho_new = dot(r0, r);
        if (rho_new == 0.0 || !std::isfinite(rho_new)) {
            res.breakdown = true;
            break;
        }
        if (it == 0) {
            p = r;
        } else {
            double beta = (rho_new / rho) * (alpha / omega);
            for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        rho = rho_new;
        M.apply(p, phat);
        A.mul(phat, v);
        double r0v = dot(r0, v);
        if (r0v == 0.0 || !std::isfinite(r0v)) {
            res.breakdown = true;
            break;
        }
        alpha = rho / r0v;
        for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (norm2(s) / bnorm <= rtol) {
            axpy(alpha, phat, x);
            res.iterations = it + 1;
            break;
        }
        M.apply(s, shat);
        A.mul(shat, t);
        double tt = dot(t, t);
        if (tt == 0.0 || !std::isfinite(tt)) {
            res.breakdown = true;
            break;
        }
        omega = dot(t, s) / tt;
        for (int i = 0; i < n; ++i) x[i] += alpha * phat[i] + omega * shat[i];
        for (int i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
        rnorm = norm2(r);
        res.iterations = it + 1;
        if (omega == 0.0 || detail::has_nan(x)) {
            res.breakdown = true;
            break;
        }
    }
    Vector Ax(n);
    A.mul(x, Ax);
    Vector true_r(n);
    for (int i = 0; i < n; ++i) true_r[i] = b[i] - Ax[i];
    res.residual = norm2(true_r) / bnorm;
    res.converged = res.residual <= rtol && !res.breakdown;
    return res;
}

// Right-preconditioned GMRES(m) with modified Gram-Schmidt and Givens
// rotations; the recurrence residual is the true residual.
template <class Op>
SolveResult gmres_solve(const Op& A, const Vector& b, Vector& x, const Preconditioner& M, double rtol, int max_iter,
                        int restart) {
    const int n = static_cast<int>(b.size());
    SolveResult res;
    const double bnorm = norm2(b);
    x.assign(n, 0.0);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    const int m = std::max(1, restart);
    std::vector<Vector> V(m + 1, Vector(n));
    std::vector<Vector> H(m + 1, Vector(m, 0.0));
    Vector cs(m, 0.0), sn(m, 0.0), g(m + 1, 0.0), w(n), z(n);
    Vector r = b;
    int total_it = 0;
    double rnorm = norm2(r);
    while (total_it < max_iter && rnorm / bnorm > rtol) {
        for (auto& h : H) std::fill(h.begin(), h.end(), 0.0);
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = rnorm;
        for (int i = 0; i < n; ++i) V[0][i] = r[i] / rnorm;
        int k = 0;
        for (; k < m && total_it < max_iter; ++k, ++total_it) {
            M.apply(V[k], z);
            A.mul(z, w);
            for (int j = 0; j <= k; ++j) {
                H[j][k] = dot(w, V[j]);
                axpy(-H[j][k], V[j], w);
            }
            H[k + 1][k] = norm2(w);
            if (H[k + 1][k] > 0.0)
                for (int i = 0; i < n; ++i) V[k + 1][i] = w[i] / H[k + 1][k];
            // apply accumulated rotations
            for (int j = 0; j < k; ++j) {
                double t = cs[j] * H[j][k] + sn[j] * H[j + 1][k];
                H[j + 1][k] = -sn[j] * H[j][k] + cs[j] * H[j + 1][k];
                H[j][k] = t;
            }
            double denom = std::hypot(H[k][k], H[k + 1][k]);
            if (denom == 0.0 || !std::isfinite(denom)) {
                res.breakdown = true;
                break;
            }
            cs[k] = H[k][k] / denom;
            sn[k] = H[k + 1][k] / denom;
            H[k][k] = denom;
            H[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            if (std::abs(g[k + 1]) / bnorm <= rtol) {
                ++k;
                ++total_it;
                break;
            }
        }
        // back substitution for y, then x += M^{-1} (V y)
        Vector y(k, 0.0);
        for (int i = k - 1; i >= 0; --i) {
            double s = g[i];
            for (int j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
            y[i] = s / H[i][i];
        }
        Vector vy(n, 0.0);
        for (int j = 0; j < k; ++j) axpy(y[j], V[j], vy);
        M.apply(vy, z);
        axpy(1.0, z, x);
        A.mul(x, w);
        for (int i = 0; i < n; ++i) r[i] = b[i] - w[i];
        rnorm = norm2(r);
        if (res.breakdown || detail::has_nan(x)) {
            res.breakdown = true;
            break;
        }
    }
    res.iterations = total_it;
    res.residual = rnorm / bnorm;
    res.converged = res.residual <= rtol && !res.breakdown;
    return res;
}

inline SolveResult solve_spd(const CsrMatrix& A, const Vector& b, Vector& x, const SolverConfig& cfg) {
    cfg.validate();
    auto M = make_preconditioner(A, cfg.precond);
    return cg_solve(A, b, x, *M, cfg.rtol, cfg.max_iter);
}

inline SolveResult solve_nonsymmetric(const CsrMatrix& A, const Vector& b, Vector& x, const SolverConfig& cfg) {
    cfg.validate();
    auto M = make_preconditioner(A, cfg.precond);
    if (cfg.method == SolverConfig::Method::gmres)
        return gmres_solve(A, b, x, *M, cfg.rtol, cfg.max_iter, cfg.gmres_restart);
    return bicgstab_solve(A, b, x, *M, cfg.rtol, cfg.max_iter);
}

// Pure-Neumann Poisson solve. The right-hand side is projected onto the
// complement of the constant vector (the discrete compatibility condition),
// CG runs with per-iteration re-projection, and the solution is shifted to
// zero mass-weighted mean: sum_i w_i x_i = 0 with w_i the integrals of the
// basis functions (sum_i w_i = |Omega|).
inline SolveResult solve_neumann_poisson(const CsrMatrix& K, const Vector& b, Vector& x, const Vector& mass_weights,
                                         const SolverConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(b.size());
    auto project = [n](Vector& v) {
        double mean = 0.0;
        for (double vi : v) mean += vi;
        mean /= n;
        for (double& vi : v) vi -= mean;
    };
    Vector b_proj = b;
    project(b_proj);
    auto M = make_preconditioner(K, cfg.precond, 1e-8);
    auto res = cg_solve(K, b_proj, x, *M, cfg.rtol, cfg.max_iter, nullptr, project);
    double domain = 0.0, integral = 0.0;
    for (int i = 0; i < n; ++i) {
        domain += mass_weights[i];
        integral += mass_weights[i] * x[i];
    }
    const double shift = integral / domain;
    for (double& xi : x) xi -= shift;
    return res;
}

}  // namespace srp
