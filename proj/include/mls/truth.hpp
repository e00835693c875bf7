#pragma once

#include <array>
#include <vector>

#include "mls/common.hpp"
#include "mls/density.hpp"
#include "mls/geometry.hpp"
#include "mls/setops.hpp"

namespace mls::truth {

using density::DensityField;
using geometry::EvaluationGrid;
using geometry::Sym2;

enum class LawKind { Wishart2, MultivariateVonMises, VonMisesFisher, Mixture };

std::string law_kind_name(LawKind k);
LawKind law_kind_from_name(const std::string& name);

// Flat parameter record; only the fields of the active kind are read.
struct TargetLaw {
    LawKind kind = LawKind::VonMisesFisher;

    Sym2 sigma{0.5, 0.0, 0.5};  // Wishart scale
    int dof = 10;               // Wishart degrees of freedom

    std::array<double, 2> mvm_mu{0.0, 0.0};
    std::array<double, 2> mvm_kappa{0.0, 0.0};
    double mvm_delta12 = 0.0;  // off-diagonal of the sine-coupling matrix

    Vec3 vmf_mu{1.0, 0.0, 0.0};
    double vmf_kappa = 0.0;

    std::vector<double> weights;       // mixture weights, sum to 1
    std::vector<TargetLaw> components;  // no nested mixtures

    void validate() const;  // throws config_error naming the violated field
};

// Spherical density C(kappa) exp(kappa mu.x); C(0) = 1/(4 pi).
double vmf_density(const Vec3& x, const Vec3& mu, double kappa);

// Torus angle-space normalizer by periodic trapezoidal quadrature, doubling
// the per-angle resolution until the relative change drops below 1e-6.
double mvm_normalizer(const std::array<double, 2>& kappa, double delta12, int resolution = 128);

// Sine-model density on angles, w.r.t. d(theta1) d(theta2); Z precomputed.
double mvm_density(const std::array<double, 2>& theta, const std::array<double, 2>& mu,
                   const std::array<double, 2>& kappa, double delta12, double Z);

// Wishart density w.r.t. Lebesgue measure on (a, b, c).
double wishart_density(const Sym2& S, const Sym2& sigma, int m);

// Evaluates the law over a grid. Torus laws are angle densities; they are
// divided by the torus area element so the field is per unit surface area,
// matching the units of the kernel estimates.
DensityField true_density_field(const TargetLaw& law, const EvaluationGrid& grid);

setops::GridSubset true_level_set(const DensityField& field, double lambda);

}  // namespace mls::truth
