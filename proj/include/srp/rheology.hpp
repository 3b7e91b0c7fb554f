// rheology.hpp: generalized Newtonian viscosity laws of the form
//
//   nu(D) = nu_inf + (nu0 - nu_inf) * (c0 + a * lambda^2 * |D|^2)^((m-1)/2)
//
// with |D| the Frobenius norm of the shear-rate tensor. The shear
// coefficient a distinguishes the plain form (a = 1) from the Carreau
// convention (a = 2). Includes the Gateaux derivative with respect to D
// (used by Newton linearizations) and a sampling check of the monotonicity
// property (nu(F)F - nu(G)G) : (F - G) >= 0.

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace srp {

// Symmetric 2x2 tensor; stores the three independent components.
struct ShearTensor {
    double xx = 0.0;
    double yy = 0.0;
    double xy = 0.0;

    double norm2() const { return xx * xx + yy * yy + 2.0 * xy * xy; }  // Frobenius

    ShearTensor operator-(const ShearTensor& o) const { return {xx - o.xx, yy - o.yy, xy - o.xy}; }
    ShearTensor operator*(double s) const { return {xx * s, yy * s, xy * s}; }
};

inline double ddot(const ShearTensor& a, const ShearTensor& b) {
    return a.xx * b.xx + a.yy * b.yy + 2.0 * a.xy * b.xy;
}

inline ShearTensor shear_tensor(const std::array<std::array<double, 2>, 2>& grad_u) {
    return {grad_u[0][0], grad_u[1][1], 0.5 * (grad_u[0][1] + grad_u[1][0])};
}

struct GeneralizedNewtonianLaw {
    double nu0 = 1.0;
    double nu_inf = 0.0;
    double c0 = 1.0;
    double lambda = 1.0;
    double shear_coeff = 1.0;  // a
    double m = 1.0;

    void validate() const {
        if (!(nu0 >= nu_inf)) throw std::invalid_argument("law: nu0 must be >= nu_inf");
        if (!(nu_inf >= 0.0)) throw std::invalid_argument("law: nu_inf must be >= 0");
        if (!(c0 >= 0.0)) throw std::invalid_argument("law: c0 must be >= 0");
        if (!(lambda >= 0.0)) throw std::invalid_argument("law: lambda must be >= 0");
        if (!(m > 0.0)) throw std::invalid_argument("law: m must be > 0");
        if (!(shear_coeff > 0.0)) throw std::invalid_argument("law: shear_coeff must be > 0");
    }

    bool is_newtonian() const { return m == 1.0 || nu0 == nu_inf; }
};

// nu as a function of |D|^2.
inline double viscosity_from_norm2(const GeneralizedNewtonianLaw& law, double d2) {
    const double base = law.c0 + law.shear_coeff * law.lambda * law.lambda * d2;
    const double nu = law.nu_inf + (law.nu0 - law.nu_inf) * std::pow(base, 0.5 * (law.m - 1.0));
    if (!std::isfinite(nu))
        throw std::domain_error("viscosity: non-finite value (|D|^2 = " + std::to_string(d2) + ")");
    return nu;
}

inline double viscosity(const GeneralizedNewtonianLaw& law, const ShearTensor& D) {
    return viscosity_from_norm2(law, D.norm2());
}

// d nu / d(|D|^2).
inline double dviscosity_dnorm2(const GeneralizedNewtonianLaw& law, double d2) {
    const double al2 = law.shear_coeff * law.lambda * law.lambda;
    const double base = law.c0 + al2 * d2;
    if (base <= 0.0)
        throw std::domain_error("viscosity derivative: singular point (c0 + a lambda^2 |D|^2 = 0)");
    return (law.nu0 - law.nu_inf) * 0.5 * (law.m - 1.0) * al2 * std::pow(base, 0.5 * (law.m - 3.0));
}

// Gateaux derivative of nu with respect to D: the tensor
//   (m-1)(nu0-nu_inf) a lambda^2 (c0 + a lambda^2 |D|^2)^((m-3)/2) D
// so that d nu[W] = gateaux : W for a symmetric direction W.
inline ShearTensor viscosity_gateaux(const GeneralizedNewtonianLaw& law, const ShearTensor& D) {
    if (law.m == 1.0 || law.nu0 == law.nu_inf) return {0.0, 0.0, 0.0};
    const double d2 = D.norm2();
    if (law.c0 + law.shear_coeff * law.lambda * law.lambda * d2 <= 0.0 && law.m < 3.0)
        throw std::domain_error("viscosity_gateaux: singular at D = 0 with c0 = 0");
    return D * (2.0 * dviscosity_dnorm2(law, d2));
}

struct MonotonicityReport {
    double min_pair_value = 0.0;
    int samples = 0;
    bool passed = false;
};

// Samples random symmetric tensor pairs (F, G) and evaluates the
// monotonicity form. Deterministic for a fixed seed.
inline MonotonicityReport check_monotonicity(const GeneralizedNewtonianLaw& law, int sample_count,
                                             unsigned seed = 20230517u, double tensor_scale = 3.0) {
    if (sample_count < 1) throw std::invalid_argument("check_monotonicity: sample_count must be >= 1");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-tensor_scale, tensor_scale);
    MonotonicityReport report;
    report.samples = sample_count;
    report.min_pair_value = std::numeric_limits<double>::infinity();
    for (int s = 0; s < sample_count; ++s) {
        ShearTensor F{dist(rng), dist(rng), dist(rng)};
        ShearTensor G{dist(rng), dist(rng), dist(rng)};
        const double nf = viscosity(law, F);
        const double ng = viscosity(law, G);
        ShearTensor diff = F - G;
        const double value = ddot({nf * F.xx - ng * G.xx, nf * F.yy - ng * G.yy, nf * F.xy - ng * G.xy}, diff);
        report.min_pair_value = std::min(report.min_pair_value, value);
    }
    report.passed = report.min_pair_value >= -1e-12;
    return report;
}

// The two laws exercised by the experiments.
inline GeneralizedNewtonianLaw mms_law(double m = 0.5, double nu0 = 1.0) {
    return {nu0, 0.0, 1.0, 1.0, 1.0, m};
}

inline GeneralizedNewtonianLaw carreau_law(double m, double lambda, double nu0 = 1.0, double nu_inf = 0.001) {
    return {nu0, nu_inf, 1.0, lambda, 2.0, m};
}

}  // namespace srp
