// quadrature.hpp: symmetric Gauss rules on the reference triangle
// {(x,y): x,y >= 0, x+y <= 1}, stored in barycentric coordinates.

#pragma once

#include <array>
#include <stdexcept>
#include <vector>

namespace srp {

struct QuadraturePoint {
    std::array<double, 3> bary;  // (l0, l1, l2), sums to 1
    double weight;               // weights sum to 1/2 (reference area)
};

struct QuadratureRule {
    int degree = 0;  // integrates polynomials up to this degree exactly
    std::vector<QuadraturePoint> points;
    int size() const { return static_cast<int>(points.size()); }
};

// Dunavant rules; weights below are normalized to sum to 1 and scaled by the
// reference area 1/2 on construction.
inline const QuadratureRule& triangle_rule(int degree) {
    static const auto make = [](int deg, std::vector<std::array<double, 4>> rows) {
        QuadratureRule r;
        r.degree = deg;
        for (auto& row : rows) r.points.push_back({{row[0], row[1], row[2]}, 0.5 * row[3]});
        return r;
    };
    static const QuadratureRule deg1 = make(1, {{1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0}});
    static const QuadratureRule deg2 = make(2, {
        {2.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3},
        {1.0 / 6, 2.0 / 3, 1.0 / 6, 1.0 / 3},
        {1.0 / 6, 1.0 / 6, 2.0 / 3, 1.0 / 3},
    });
    static const QuadratureRule deg4 = [] {
        const double a1 = 0.445948490915965, w1 = 0.223381589678011;
        const double a2 = 0.091576213509771, w2 = 0.109951743655322;
        std::vector<std::array<double, 4>> rows;
        for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
            rows.push_back({1 - 2 * a, a, a, w});
            rows.push_back({a, 1 - 2 * a, a, w});
            rows.push_back({a, a, 1 - 2 * a, w});
        }
        return make(4, rows);
    }();
    static const QuadratureRule deg6 = [] {
        const double a1 = 0.249286745170910, w1 = 0.116786275726379;
        const double a2 = 0.063089014491502, w2 = 0.050844906370207;
        const double b = 0.310352451033785, c = 0.636502499121399, w3 = 0.082851075618374;
        std::vector<std::array<double, 4>> rows;
        for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
            rows.push_back({1 - 2 * a, a, a, w});
            rows.push_back({a, 1 - 2 * a, a, w});
            rows.push_back({a, a, 1 - 2 * a, w});
        }
        const double d = 1.0 - b - c;
        rows.push_back({b, c, d, w3});
        rows.push_back({c, d, b, w3});
        rows.push_back({d, b, c, w3});
        rows.push_back({b, d, c, w3});
        rows.push_back({c, b, d, w3});
        rows.push_back({d, c, b, w3});
        return make(6, rows);
    }();
    switch (degree) {
        case 1: return deg1;
        case 2: return deg2;
        case 3:
        case 4: return deg4;
        case 5:
        case 6: return deg6;
        default: throw std::invalid_argument("triangle_rule: no rule of degree " + std::to_string(degree));
    }
}

// 1D Gauss-Legendre on [0,1] for boundary-edge integrals.
struct EdgeRule {
    std::vector<double> points;   // in (0,1)
    std::vector<double> weights;  // sum to 1
};

inline const EdgeRule& edge_rule3() {
    static const EdgeRule r = [] {
        EdgeRule e;
        const double s = 0.774596669241483 / 2.0;  // sqrt(3/5)/2
        e.points = {0.5 - s, 0.5, 0.5 + s};
        e.weights = {5.0 / 18, 8.0 / 18, 5.0 / 18};
        return e;
    }();
    return r;
}

}  // namespace srp
