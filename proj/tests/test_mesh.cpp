#include "srp/mesh.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <sstream>

using namespace srp;

TEST(UnitSquare, CountsMatchFormulas) {
    auto m1 = generate_unit_square(1);
    EXPECT_EQ(m1.n_nodes(), 4);
    EXPECT_EQ(m1.n_cells(), 2);
    auto m2 = generate_unit_square(2);
    EXPECT_EQ(m2.n_nodes(), 9);
    EXPECT_EQ(m2.n_cells(), 8);
    auto m200 = generate_unit_square(200);
    EXPECT_EQ(m200.n_nodes(), 40401);
    EXPECT_EQ(m200.n_cells(), 80000);
}

TEST(UnitSquare, AreaAndValidity) {
    for (int n : {1, 3, 17}) {
        auto m = generate_unit_square(n);
        EXPECT_NO_THROW(validate_mesh(m));
        EXPECT_NEAR(mesh_area(m), 1.0, 1e-12);
    }
}

TEST(UnitSquare, EulerFormula) {
    for (int n : {1, 2, 5, 12}) {
        auto m = generate_unit_square(n);
        std::set<std::pair<int, int>> edges;
        for (const auto& c : m.cells)
            for (int k = 0; k < 3; ++k)
                edges.insert({std::min(c[k], c[(k + 1) % 3]), std::max(c[k], c[(k + 1) % 3])});
        const int V = m.n_nodes(), E = static_cast<int>(edges.size()), F = m.n_cells();
        EXPECT_EQ(V - E + F, 1) << "n = " << n;
    }
}

TEST(UnitSquare, RejectsBadSize) { EXPECT_THROW(generate_unit_square(0), std::invalid_argument); }

TEST(BoundaryNodes, AllTagsOnSmallestSquare) {
    auto m = generate_unit_square(1);
    auto nodes = boundary_nodes(m, {1});
    EXPECT_EQ(nodes.size(), 4u);
}

TEST(BoundaryNodes, EmptyTagSet) {
    auto m = generate_unit_square(2);
    EXPECT_TRUE(boundary_nodes(m, {}).empty());
}

TEST(BoundaryNodes, BottomEdgeOnly) {
    auto m = generate_unit_square(2);
    retag_boundary(m, [](const Point2& mid) { return mid[1] == 0.0; }, 7, "Bottom");
    auto nodes = boundary_nodes(m, {7});
    ASSERT_EQ(nodes.size(), 3u);
    for (int v : nodes) EXPECT_DOUBLE_EQ(m.nodes[v][1], 0.0);
}

TEST(BoundaryNodes, UnknownTagThrows) {
    auto m = generate_unit_square(2);
    EXPECT_THROW(boundary_nodes(m, {42}), std::invalid_argument);
}

TEST(MeshIO, RoundTripIsIdentity) {
    auto m = generate_unit_square(3);
    retag_boundary(m, [](const Point2& mid) { return mid[0] == 1.0; }, 3, "GammaO");
    std::ostringstream first;
    write_mesh(m, first);
    std::istringstream in(first.str());
    auto m2 = read_mesh(in);
    std::ostringstream second;
    write_mesh(m2, second);
    EXPECT_EQ(first.str(), second.str());
}

TEST(MeshIO, TwoTriangleFileReserializesByteIdentically) {
    const std::string file =
        "srpmesh 1\n"
        "4 2 4\n"
        "0 0\n"
        "1 0\n"
        "1 1\n"
        "0 1\n"
        "0 1 2\n"
        "0 2 3\n"
        "0 1 1\n"
        "1 2 1\n"
        "2 3 1\n"
        "3 0 1\n"
        "tags\n"
        "1 GammaD\n";
    std::istringstream in(file);
    auto m = read_mesh(in);
    std::ostringstream out;
    write_mesh(m, out);
    EXPECT_EQ(out.str(), file);
}

TEST(MeshIO, ShortNodeSectionReportsLine) {
    const std::string file =
        "srpmesh 1\n"
        "5 2 4\n"
        "0 0\n"
        "1 0\n"
        "1 1\n"
        "0 1\n";  // header says 5 nodes, only 4 given
    std::istringstream in(file);
    try {
        read_mesh(in);
        FAIL() << "expected parse error";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
    }
}

TEST(MeshIO, CommentsAndWhitespaceAccepted) {
    const std::string file =
        "# a comment\n"
        "srpmesh 1\n"
        "3 1 3   # counts\n"
        "0 0\n1 0\n0 1\n"
        "0 1 2\n"
        "0 1 1\n1 2 1\n2 0 1\n"
        "tags\n1 GammaD\n";
    std::istringstream in(file);
    auto m = read_mesh(in);
    EXPECT_EQ(m.n_cells(), 1);
}

TEST(MeshValidation, RejectsClockwiseCell) {
    TriMesh m;
    m.nodes = {{0, 0}, {1, 0}, {0, 1}};
    m.cells = {{0, 2, 1}};  // negative area
    m.tag_names[1] = "GammaD";
    m.boundary_edges = {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}};
    EXPECT_THROW(validate_mesh(m), std::runtime_error);
}

TEST(MeshValidation, RejectsInteriorTaggedEdge) {
    auto m = generate_unit_square(1);
    m.boundary_edges.push_back({0, 3, 1});  // the diagonal, interior
    EXPECT_THROW(validate_mesh(m), std::runtime_error);
}

TEST(MeshValidation, RejectsMissingBoundaryEdge) {
    auto m = generate_unit_square(1);
    m.boundary_edges.pop_back();
    EXPECT_THROW(validate_mesh(m), std::runtime_error);
}

TEST(CylinderGeometryChecks, Invariants) {
    CylinderGeometry g;
    EXPECT_NO_THROW(g.validate());
    g.diameter = -1.0;
    EXPECT_THROW(g.validate(), std::invalid_argument);
    g = CylinderGeometry{1.0, 0.5, 20.0, 40.0};
    EXPECT_THROW(g.validate(), std::invalid_argument);
}

TEST(ShippedCylinderMesh, HeaderCountsMatchContent) {
    const std::string path = std::string(SRP_DATA_DIR) + "/cylinder_h40.msh";
    if (!std::filesystem::exists(path)) GTEST_SKIP() << "shipped mesh not present";
    std::ifstream in(path);
    std::string magic;
    int version, nn, nc, nb;
    in >> magic >> version >> nn >> nc >> nb;
    auto m = read_mesh(path);  // validates invariants
    EXPECT_EQ(m.n_nodes(), nn);
    EXPECT_EQ(m.n_cells(), nc);
    EXPECT_EQ(m.n_boundary_edges(), nb);
    for (const char* label : {"GammaI", "GammaO", "GammaT", "GammaC"}) {
        bool found = false;
        for (const auto& [tag, name] : m.tag_names) found |= (name == label);
        EXPECT_TRUE(found) << label;
    }
}
