#include "srp/space.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace srp;

TEST(FESpaceDofs, CountsP1AndP2) {
    auto mesh = generate_unit_square(2);
    FESpace p1(mesh, 1, 1), p2(mesh, 2, 1), v2(mesh, 2, 2);
    EXPECT_EQ(p1.n_dofs(), 9);
    // edges: 3n^2 + 2n = 16 for n = 2
    EXPECT_EQ(p2.n_scalar_dofs(), 9 + 16);
    EXPECT_EQ(p2.n_dofs(), 25);  // (2n+1)^2
    EXPECT_EQ(v2.n_dofs(), 50);
}

TEST(FESpaceDofs, CellDofIndicesInRange) {
    auto mesh = generate_unit_square(3);
    FESpace space(mesh, 2, 2);
    std::vector<int> dofs(space.n_cell_dofs());
    for (int c = 0; c < mesh.n_cells(); ++c) {
        space.cell_dofs(c, dofs.data());
        for (int d : dofs) {
            EXPECT_GE(d, 0);
            EXPECT_LT(d, space.n_dofs());
        }
    }
}

TEST(FEFieldChecks, CoefficientLengthEnforced) {
    auto mesh = generate_unit_square(1);
    FESpace space(mesh, 1, 1);
    EXPECT_THROW(FEField(space, Vector(3, 0.0)), std::invalid_argument);
    EXPECT_NO_THROW(FEField(space, Vector(4, 0.0)));
}

TEST(Interpolation, P2ReproducesQuadraticsExactly) {
    auto mesh = generate_unit_square(3);
    FESpace space(mesh, 2, 1);
    auto f = [](const Point2& p, int) { return 1.0 + 2.0 * p[0] - p[1] + p[0] * p[0] + 3.0 * p[0] * p[1] - 0.5 * p[1] * p[1]; };
    auto field = interpolate(space, f);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    PointLocator locator(mesh);
    for (int k = 0; k < 50; ++k) {
        Point2 x = {dist(rng), dist(rng)};
        auto hit = locator.locate(x);
        ASSERT_TRUE(hit.has_value());
        double v = field.value(hit->first, hit->second)[0];
        EXPECT_NEAR(v, f(x, 0), 1e-12);
    }
}

TEST(FieldGradient, LinearFieldHasExactGradient) {
    auto mesh = generate_unit_square(2);
    FESpace space(mesh, 1, 2);
    auto field = interpolate(space, [](const Point2& p, int c) { return c == 0 ? 2.0 * p[0] - p[1] : 0.5 * p[1]; });
    auto geom = space.cell_geometry(0);
    auto g = field.gradient(0, {1.0 / 3, 1.0 / 3, 1.0 / 3}, geom);
    EXPECT_NEAR(g[0][0], 2.0, 1e-13);
    EXPECT_NEAR(g[0][1], -1.0, 1e-13);
    EXPECT_NEAR(g[1][0], 0.0, 1e-13);
    EXPECT_NEAR(g[1][1], 0.5, 1e-13);
}

TEST(DirichletMarking, ComponentMaskAndTags) {
    auto mesh = generate_unit_square(2);
    retag_boundary(mesh, [](const Point2& mid) { return mid[1] == 0.0; }, 4, "GammaT");
    FESpace space(mesh, 2, 2);
    space.add_dirichlet({4}, {false, true});  // y component only on the bottom
    for (const auto& e : space.dirichlet()) {
        EXPECT_EQ(e.component, 1);
        EXPECT_DOUBLE_EQ(space.dof_point(e.scalar_dof)[1], 0.0);
    }
    // bottom: 3 vertices + 2 midpoints
    EXPECT_EQ(space.dirichlet().size(), 5u);
    EXPECT_THROW(space.add_dirichlet({99}), std::invalid_argument);
}

TEST(Locator, FindsPointsInGradedMesh) {
    auto mesh = generate_unit_square(5);
    // shear the mesh to make cells irregular
    for (auto& p : mesh.nodes) p[0] += 0.1 * p[1] * p[1];
    PointLocator locator(mesh);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(0.01, 0.99);
    for (int k = 0; k < 200; ++k) {
        Point2 x = {dist(rng) + 0.1 * 0.25, dist(rng)};
        auto hit = locator.locate({x[0], x[1]});
        if (!hit) continue;  // point may fall outside the sheared domain
        const auto& bary = hit->second;
        EXPECT_GE(bary[0], -1e-10);
        EXPECT_GE(bary[1], -1e-10);
        EXPECT_GE(bary[2], -1e-10);
    }
}
