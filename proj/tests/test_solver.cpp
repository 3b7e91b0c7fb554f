#include "srp/solver.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

#include "srp/assembly.hpp"
#include "srp/mesh.hpp"
#include "test_util.hpp"

using namespace srp;

namespace {

CsrMatrix make_csr(int rows, int cols, const std::map<std::pair<int, int>, double>& entries) {
    std::vector<std::set<int>> row_sets(rows);
    for (const auto& [rc, v] : entries) row_sets[rc.first].insert(rc.second);
    auto pattern = std::make_shared<CsrPattern>(CsrPattern::from_sets(rows, cols, row_sets));
    CsrMatrix A(pattern);
    for (const auto& [rc, v] : entries) A.add(rc.first, rc.second, v);
    return A;
}

CsrMatrix identity(int n) {
    std::map<std::pair<int, int>, double> e;
    for (int i = 0; i < n; ++i) e[{i, i}] = 1.0;
    return make_csr(n, n, e);
}

CsrMatrix laplacian_1d(int n) {
    std::map<std::pair<int, int>, double> e;
    for (int i = 0; i < n; ++i) {
        e[{i, i}] = 2.0;
        if (i > 0) e[{i, i - 1}] = -1.0;
        if (i + 1 < n) e[{i, i + 1}] = -1.0;
    }
    return make_csr(n, n, e);
}

}  // namespace

TEST(SolverConfigChecks, Validation) {
    SolverConfig cfg;
    cfg.rtol = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg.rtol = 1e-8;
    cfg.max_iter = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(SolveSpd, IdentityConvergesImmediately) {
    auto A = identity(7);
    Vector b = {1, -2, 3, 0, 5, -1, 2}, x;
    SolverConfig cfg;
    cfg.precond = SolverConfig::Precond::none;
    auto res = solve_spd(A, b, x, cfg);
    EXPECT_TRUE(res.converged);
    EXPECT_LE(res.iterations, 1);
    EXPECT_LT(oracle::max_abs_diff(x, b), 1e-14);
}

TEST(SolveSpd, TridiagonalMatchesDenseOracle) {
    auto A = laplacian_1d(10);
    Vector b(10, 0.0);
    b[0] = 1.0;
    Vector x;
    SolverConfig cfg;
    cfg.rtol = 1e-13;
    auto res = solve_spd(A, b, x, cfg);
    EXPECT_TRUE(res.converged);
    auto xd = oracle::dense_solve(oracle::to_dense(A), b);
    EXPECT_LT(oracle::max_abs_diff(x, xd), 1e-10);
}

TEST(SolveSpd, ZeroRhsGivesZero) {
    auto A = laplacian_1d(5);
    Vector b(5, 0.0), x;
    SolverConfig cfg;
    auto res = solve_spd(A, b, x, cfg);
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.iterations, 0);
    for (double v : x) EXPECT_EQ(v, 0.0);
}

TEST(SolveSpd, ReportedResidualIsTrueResidual) {
    auto A = laplacian_1d(30);
    Vector b(30, 1.0), x;
    SolverConfig cfg;
    cfg.rtol = 1e-11;
    auto res = solve_spd(A, b, x, cfg);
    Vector Ax = A.mul(x);
    for (size_t i = 0; i < Ax.size(); ++i) Ax[i] = b[i] - Ax[i];
    EXPECT_NEAR(res.residual, norm2(Ax) / norm2(b), 1e-13);
}

TEST(SolveSpd, CgErrorIsMonotoneInEnergyNorm) {
    auto A = laplacian_1d(12);
    Vector b(12);
    for (int i = 0; i < 12; ++i) b[i] = std::sin(1.0 + i);
    auto exact = oracle::dense_solve(oracle::to_dense(A), b);
    std::vector<double> energy_errors;
    auto M = make_preconditioner(A, SolverConfig::Precond::none);
    Vector x;
    cg_solve(A, b, x, *M, 1e-14, 100, [&](const Vector& xk) {
        Vector e(xk.size());
        for (size_t i = 0; i < e.size(); ++i) e[i] = xk[i] - exact[i];
        energy_errors.push_back(std::sqrt(dot(e, A.mul(e))));
    });
    ASSERT_GE(energy_errors.size(), 3u);
    for (size_t k = 1; k < energy_errors.size(); ++k)
        EXPECT_LE(energy_errors[k], energy_errors[k - 1] * (1.0 + 1e-12));
}

TEST(SolveNonsymmetric, UpperBidiagonalBackSubstitution) {
    std::map<std::pair<int, int>, double> e;
    const int n = 8;
    for (int i = 0; i < n; ++i) {
        e[{i, i}] = 2.0;
        if (i + 1 < n) e[{i, i + 1}] = -1.0;
    }
    auto A = make_csr(n, n, e);
    Vector b(n, 1.0), x;
    SolverConfig cfg;
    cfg.method = SolverConfig::Method::gmres;
    cfg.rtol = 1e-13;
    auto res = solve_nonsymmetric(A, b, x, cfg);
    EXPECT_TRUE(res.converged);
    auto xd = oracle::dense_solve(oracle::to_dense(A), b);
    EXPECT_LT(oracle::max_abs_diff(x, xd), 1e-10);
}

TEST(SolveNonsymmetric, IdentityImmediate) {
    auto A = identity(5);
    Vector b = {1, 2, 3, 4, 5}, x;
    SolverConfig cfg;
    cfg.method = SolverConfig::Method::bicgstab;
    cfg.precond = SolverConfig::Precond::none;
    auto res = solve_nonsymmetric(A, b, x, cfg);
    EXPECT_TRUE(res.converged);
    EXPECT_LE(res.iterations, 1);
    EXPECT_LT(oracle::max_abs_diff(x, b), 1e-14);
}

TEST(SolveNonsymmetric, GmresRestartsAgree) {
    const int n = 100;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::map<std::pair<int, int>, double> e;
    for (int i = 0; i < n; ++i) {
        e[{i, i}] = 8.0 + dist(rng);
        for (int k = 0; k < 4; ++k) {
            int j = rng() % n;
            e[{i, j}] += 0.5 * dist(rng);  // nonsymmetric perturbation
        }
    }
    auto A = make_csr(n, n, e);
    Vector b(n);
    for (int i = 0; i < n; ++i) b[i] = dist(rng);
    SolverConfig c30, c60;
    c30.method = c60.method = SolverConfig::Method::gmres;
    c30.rtol = c60.rtol = 1e-12;
    c30.gmres_restart = 30;
    c60.gmres_restart = 60;
    Vector x30, x60;
    EXPECT_TRUE(solve_nonsymmetric(A, b, x30, c30).converged);
    EXPECT_TRUE(solve_nonsymmetric(A, b, x60, c60).converged);
    EXPECT_LT(oracle::max_abs_diff(x30, x60), 1e-8);
}

TEST(NeumannPoisson, ConstantRhsGivesZero) {
    // Singular Neumann-like matrix: 1D Laplacian with Neumann ends.
    std::map<std::pair<int, int>, double> e;
    const int n = 9;
    for (int i = 0; i < n; ++i) {
        double d = 2.0;
        if (i == 0 || i == n - 1) d = 1.0;
        e[{i, i}] = d;
        if (i > 0) e[{i, i - 1}] = -1.0;
        if (i + 1 < n) e[{i, i + 1}] = -1.0;
    }
    auto K = make_csr(n, n, e);
    Vector b(n, 3.14), x;
    Vector w(n, 1.0);
    SolverConfig cfg;
    auto res = solve_neumann_poisson(K, b, x, w, cfg);
    EXPECT_TRUE(res.converged);
    for (double v : x) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(NeumannPoisson, ShiftInvariance) {
    std::map<std::pair<int, int>, double> e;
    const int n = 9;
    for (int i = 0; i < n; ++i) {
        double d = (i == 0 || i == n - 1) ? 1.0 : 2.0;
        e[{i, i}] = d;
        if (i > 0) e[{i, i - 1}] = -1.0;
        if (i + 1 < n) e[{i, i + 1}] = -1.0;
    }
    auto K = make_csr(n, n, e);
    Vector b(n);
    for (int i = 0; i < n; ++i) b[i] = std::sin(2.0 * i);
    Vector w(n, 1.0), x1, x2;
    SolverConfig cfg;
    cfg.rtol = 1e-12;
    solve_neumann_poisson(K, b, x1, w, cfg);
    // Adding a constant to the compatible part of b must not change x.
    Vector b2 = b;
    for (double& v : b2) v += 42.0;
    solve_neumann_poisson(K, b2, x2, w, cfg);
    EXPECT_LT(oracle::max_abs_diff(x1, x2), 1e-9);
}

TEST(NeumannPoisson, MeanZeroAndManufacturedConvergence) {
    // -Laplace u = f with u = cos(pi x) cos(pi y) on the unit square, pure
    // Neumann (compatible). P1 errors should shrink by about 4 per
    // refinement.
    auto run = [](int n) {
        auto mesh = generate_unit_square(n);
        FESpace space(mesh, 1, 1);
        auto K = assemble_poisson(space);
        const double pi = 3.14159265358979323846;
        auto rhs = assemble_load(space, [&](const Point2& p) {
            return std::array<double, 1>{2.0 * pi * pi * std::cos(pi * p[0]) * std::cos(pi * p[1])};
        });
        Vector x;
        auto weights = basis_integrals(space);
        SolverConfig cfg;
        cfg.rtol = 1e-12;
        cfg.max_iter = 4000;
        auto res = solve_neumann_poisson(K, rhs, x, weights, cfg);
        EXPECT_TRUE(res.converged);
        // mass-weighted mean must vanish
        double mean = 0.0;
        for (size_t i = 0; i < x.size(); ++i) mean += weights[i] * x[i];
        EXPECT_NEAR(mean, 0.0, 1e-12);
        // L2 error by degree-6 quadrature
        const auto& rule = triangle_rule(6);
        FEField uh(space, x);
        double err2 = 0.0;
        for (int c = 0; c < mesh.n_cells(); ++c) {
            auto geom = space.cell_geometry(c);
            for (const auto& qp : rule.points) {
                Point2 xq = geom.map(qp.bary);
                double ue = std::cos(pi * xq[0]) * std::cos(pi * xq[1]);
                double diff = uh.value(c, qp.bary)[0] - ue;
                err2 += qp.weight * geom.det * diff * diff;
            }
        }
        return std::sqrt(err2);
    };
    double e16 = run(16), e32 = run(32);
    EXPECT_NEAR(e16 / e32, 4.0, 0.5);
}

TEST(Preconditioners, Ilu0EqualsExactLuForTriangularPattern) {
    // On a lower-triangular-plus-diagonal pattern ILU(0) is exact.
    std::map<std::pair<int, int>, double> e;
    e[{0, 0}] = 4;
    e[{1, 0}] = -1;
    e[{1, 1}] = 4;
    e[{2, 1}] = -2;
    e[{2, 2}] = 5;
    auto A = make_csr(3, 3, e);
    Ilu0Precond M(A);
    Vector r = {1, 2, 3}, z;
    M.apply(r, z);
    auto zd = oracle::dense_solve(oracle::to_dense(A), r);
    EXPECT_LT(oracle::max_abs_diff(z, zd), 1e-14);
}
