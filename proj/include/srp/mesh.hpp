// mesh.hpp: conforming triangular meshes with tagged boundary edges.
//
// Meshes are immutable once built. Cells are counterclockwise triples of
// node indices; every boundary edge carries an integer tag resolved to a
// label through tag_names.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace srp {

using Point2 = std::array<double, 2>;

struct BoundaryEdge {
    int a = -1;
    int b = -1;
    int tag = 0;
};

struct TriMesh {
    std::vector<Point2> nodes;
    std::vector<std::array<int, 3>> cells;  // counterclockwise
    std::vector<BoundaryEdge> boundary_edges;
    std::map<int, std::string> tag_names;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_cells() const { return static_cast<int>(cells.size()); }
    int n_boundary_edges() const { return static_cast<int>(boundary_edges.size()); }
};

struct CylinderGeometry {
    double diameter = 1.0;
    double upstream = 20.0;
    double downstream = 20.0;
    double height = 40.0;

    void validate() const {
        if (diameter <= 0.0) throw std::invalid_argument("CylinderGeometry: diameter must be positive");
        if (upstream <= diameter || downstream <= diameter || height <= diameter)
            throw std::invalid_argument("CylinderGeometry: domain extents must exceed the diameter");
    }
};

inline double signed_cell_area(const TriMesh& mesh, int cell) {
    const auto& c = mesh.cells[cell];
    const Point2& p0 = mesh.nodes[c[0]];
    const Point2& p1 = mesh.nodes[c[1]];
    const Point2& p2 = mesh.nodes[c[2]];
    return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

inline double mesh_area(const TriMesh& mesh) {
    double area = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c) area += signed_cell_area(mesh, c);
    return area;
}

// Validates all structural invariants; throws naming the failed check.
inline void validate_mesh(const TriMesh& mesh) {
    const int nn = mesh.n_nodes();
    for (int c = 0; c < mesh.n_cells(); ++c) {
        for (int k = 0; k < 3; ++k) {
            int v = mesh.cells[c][k];
            if (v < 0 || v >= nn)
                throw std::runtime_error("mesh invariant violated: cell node index out of range (cell " +
                                         std::to_string(c) + ")");
        }
        if (signed_cell_area(mesh, c) <= 0.0)
            throw std::runtime_error("mesh invariant violated: nonpositive cell area (cell " + std::to_string(c) +
                                     ")");
    }
    // Edge incidence counts over the whole complex.
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& cell : mesh.cells) {
        for (int k = 0; k < 3; ++k) {
            int a = cell[k], b = cell[(k + 1) % 3];
            edge_count[{std::min(a, b), std::max(a, b)}] += 1;
        }
    }
    std::set<std::pair<int, int>> topological_boundary;
    for (const auto& [e, cnt] : edge_count) {
        if (cnt == 1) topological_boundary.insert(e);
        if (cnt > 2)
            throw std::runtime_error("mesh invariant violated: edge shared by more than two cells");
    }
    std::set<std::pair<int, int>> tagged;
    for (const auto& be : mesh.boundary_edges) {
        if (be.a < 0 || be.a >= nn || be.b < 0 || be.b >= nn)
            throw std::runtime_error("mesh invariant violated: boundary edge node index out of range");
        auto key = std::make_pair(std::min(be.a, be.b), std::max(be.a, be.b));
        if (!topological_boundary.count(key))
            throw std::runtime_error("mesh invariant violated: boundary edge not on the topological boundary");
        if (!tagged.insert(key).second)
            throw std::runtime_error("mesh invariant violated: duplicate boundary edge");
        if (!mesh.tag_names.count(be.tag))
            throw std::runtime_error("mesh invariant violated: boundary edge tag " + std::to_string(be.tag) +
                                     " missing from tag_names");
    }
    if (tagged.size() != topological_boundary.size())
        throw std::runtime_error("mesh invariant violated: boundary edge list does not cover the topological boundary");
}

// Regular n-by-n triangulation of the unit square, all diagonals running
// lower-left to upper-right. Every boundary edge starts tagged 1 ("GammaD").
inline TriMesh generate_unit_square(int n) {
    if (n < 1) throw std::invalid_argument("generate_unit_square: n must be >= 1");
    TriMesh mesh;
    const int np = n + 1;
    mesh.nodes.reserve(static_cast<size_t>(np) * np);
    for (int j = 0; j < np; ++j)
        for (int i = 0; i < np; ++i)
            mesh.nodes.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    auto id = [np](int i, int j) { return j * np + i; };
    mesh.cells.reserve(2u * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
            mesh.cells.push_back({v00, v10, v11});
            mesh.cells.push_back({v00, v11, v01});
        }
    }
    mesh.tag_names[1] = "GammaD";
    for (int i = 0; i < n; ++i) {
        mesh.boundary_edges.push_back({id(i, 0), id(i + 1, 0), 1});
        mesh.boundary_edges.push_back({id(i, n), id(i + 1, n), 1});
        mesh.boundary_edges.push_back({id(0, i), id(0, i + 1), 1});
        mesh.boundary_edges.push_back({id(n, i), id(n, i + 1), 1});
    }
    return mesh;
}

// Reassigns tags on boundary edges whose midpoint satisfies the predicate.
template <class Pred>
inline void retag_boundary(TriMesh& mesh, Pred&& predicate, int tag, const std::string& label) {
    mesh.tag_names[tag] = label;
    for (auto& be : mesh.boundary_edges) {
        Point2 mid = {0.5 * (mesh.nodes[be.a][0] + mesh.nodes[be.b][0]),
                      0.5 * (mesh.nodes[be.a][1] + mesh.nodes[be.b][1])};
        if (predicate(mid)) be.tag = tag;
    }
}

inline std::set<int> boundary_nodes(const TriMesh& mesh, const std::set<int>& tags) {
    for (int t : tags)
        if (!mesh.tag_names.count(t))
            throw std::invalid_argument("boundary_nodes: unknown tag " + std::to_string(t));
    std::set<int> out;
    for (const auto& be : mesh.boundary_edges) {
        if (tags.count(be.tag)) {
            out.insert(be.a);
            out.insert(be.b);
        }
    }
    return out;
}

namespace detail {

inline std::string format_coord(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct MeshTokenizer {
    std::istream& in;
    int line_no = 0;
    std::vector<std::string> pending;

    explicit MeshTokenizer(std::istream& s) : in(s) {}

    bool refill() {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) pending.push_back(tok);
            if (!pending.empty()) {
                std::reverse(pending.begin(), pending.end());
                return true;
            }
        }
        return false;
    }

    bool next(std::string& tok) {
        if (pending.empty() && !refill()) return false;
        tok = pending.back();
        pending.pop_back();
        return true;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("mesh parse error at line " + std::to_string(line_no) + ": " + what);
    }

    std::string expect(const std::string& what) {
        std::string tok;
        if (!next(tok)) fail("unexpected end of file, expected " + what);
        return tok;
    }

    double expect_double(const std::string& what) {
        std::string tok = expect(what);
        try {
            size_t pos = 0;
            double v = std::stod(tok, &pos);
            if (pos != tok.size()) fail("invalid number '" + tok + "' for " + what);
            return v;
        } catch (const std::logic_error&) {
            fail("invalid number '" + tok + "' for " + what);
        }
    }

    long expect_int(const std::string& what) {
        std::string tok = expect(what);
        try {
            size_t pos = 0;
            long v = std::stol(tok, &pos);
            if (pos != tok.size()) fail("invalid integer '" + tok + "' for " + what);
            return v;
        } catch (const std::logic_error&) {
            fail("invalid integer '" + tok + "' for " + what);
        }
    }
};

}  // namespace detail

inline TriMesh read_mesh(std::istream& in) {
    detail::MeshTokenizer tk(in);
    if (tk.expect("magic") != "srpmesh") tk.fail("bad magic, expected 'srpmesh'");
    if (tk.expect_int("format version") != 1) tk.fail("unsupported format version");
    long nn = tk.expect_int("node count");
    long nc = tk.expect_int("cell count");
    long nb = tk.expect_int("boundary edge count");
    if (nn < 0 || nc < 0 || nb < 0) tk.fail("negative count in header");
    TriMesh mesh;
    mesh.nodes.resize(nn);
    for (long i = 0; i < nn; ++i) {
        mesh.nodes[i][0] = tk.expect_double("node x (node section short?)");
        mesh.nodes[i][1] = tk.expect_double("node y");
    }
    mesh.cells.resize(nc);
    for (long c = 0; c < nc; ++c)
        for (int k = 0; k < 3; ++k)
            mesh.cells[c][k] = static_cast<int>(tk.expect_int("cell node index (cell section short?)"));
    mesh.boundary_edges.resize(nb);
    for (long e = 0; e < nb; ++e) {
        mesh.boundary_edges[e].a = static_cast<int>(tk.expect_int("edge node index (edge section short?)"));
        mesh.boundary_edges[e].b = static_cast<int>(tk.expect_int("edge node index"));
        mesh.boundary_edges[e].tag = static_cast<int>(tk.expect_int("edge tag"));
    }
    if (tk.expect("tags keyword") != "tags") tk.fail("expected 'tags' section");
    std::string tok;
    while (tk.next(tok)) {
        int tag;
        try {
            tag = std::stoi(tok);
        } catch (const std::logic_error&) {
            tk.fail("invalid tag id '" + tok + "'");
        }
        mesh.tag_names[tag] = tk.expect("tag label");
    }
    validate_mesh(mesh);
    return mesh;
}

inline TriMesh read_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_mesh: cannot open '" + path + "'");
    return read_mesh(in);
}

inline void write_mesh(const TriMesh& mesh, std::ostream& out) {
    out << "srpmesh 1\n";
    out << mesh.n_nodes() << ' ' << mesh.n_cells() << ' ' << mesh.n_boundary_edges() << '\n';
    for (const auto& p : mesh.nodes)
        out << detail::format_coord(p[0]) << ' ' << detail::format_coord(p[1]) << '\n';
    for (const auto& c : mesh.cells) out << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
    for (const auto& e : mesh.boundary_edges) out << e.a << ' ' << e.b << ' ' << e.tag << '\n';
    out << "tags\n";
    for (const auto& [tag, label] : mesh.tag_names) out << tag << ' ' << label << '\n';
}

inline void write_mesh(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_mesh: cannot open '" + path + "'");
    write_mesh(mesh, out);
}

// Owning cell of each boundary edge (the unique incident cell) and the edge's
// local position in that cell's counterclockwise cycle.
struct BoundaryEdgeRef {
    int cell = -1;
    int local = -1;  // edge (cells[cell][local], cells[cell][(local+1)%3])
};

inline std::vector<BoundaryEdgeRef> boundary_edge_cells(const TriMesh& mesh) {
    std::map<std::pair<int, int>, std::pair<int, int>> cell_of_edge;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        for (int k = 0; k < 3; ++k) {
            int a = mesh.cells[c][k], b = mesh.cells[c][(k + 1) % 3];
            cell_of_edge[{std::min(a, b), std::max(a, b)}] = {c, k};
        }
    }
    std::vector<BoundaryEdgeRef> refs(mesh.boundary_edges.size());
    for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
        const auto& be = mesh.boundary_edges[e];
        auto it = cell_of_edge.find({std::min(be.a, be.b), std::max(be.a, be.b)});
        if (it == cell_of_edge.end())
            throw std::runtime_error("boundary_edge_cells: edge not found in any cell");
        refs[e] = {it->second.first, it->second.second};
    }
    return refs;
}

}  // namespace srp
