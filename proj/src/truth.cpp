#include "mls/truth.hpp"

#include <algorithm>
#include <cmath>

namespace mls::truth {

using geometry::ManifoldKind;

std::string law_kind_name(LawKind k) {
    switch (k) {
        case LawKind::Wishart2: return "wishart";
        case LawKind::MultivariateVonMises: return "mvm";
        case LawKind::VonMisesFisher: return "vmf";
        case LawKind::Mixture: return "mixture";
    }
    throw domain_error("unknown law kind");
}

LawKind law_kind_from_name(const std::string& name) {
    if (name == "wishart") return LawKind::Wishart2;
    if (name == "mvm") return LawKind::MultivariateVonMises;
    if (name == "vmf") return LawKind::VonMisesFisher;
    if (name == "mixture") return LawKind::Mixture;
    throw config_error("law.kind: unknown value '" + name + "'");
}

void TargetLaw::validate() const {
    switch (kind) {
        case LawKind::Wishart2:
            if (!geometry::sym2_is_spd(sigma)) throw config_error("law.sigma: must be symmetric positive definite");
            if (dof < 2) throw config_error("law.dof: must be at least 2");
            return;
        case LawKind::MultivariateVonMises:
            if (mvm_kappa[0] < 0.0 || mvm_kappa[1] < 0.0)
                throw config_error("law.kappa: concentrations must be nonnegative");
            return;
        case LawKind::VonMisesFisher:
            if (norm(vmf_mu) == 0.0) throw config_error("law.mu: mean direction must be nonzero");
            if (vmf_kappa < 0.0) throw config_error("law.kappa: concentration must be nonnegative");
            return;
        case LawKind::Mixture: {
            if (components.empty()) throw config_error("law.components: mixture needs at least one component");
            if (weights.size() != components.size())
                throw config_error("law.weights: count must match law.components");
            double total = 0.0;
            for (std::size_t i = 0; i < weights.size(); ++i) {
                if (weights[i] < 0.0)
                    throw config_error("law.weights[" + std::to_string(i) + "]: must be nonnegative");
                total += weights[i];
            }
            if (std::fabs(total - 1.0) > 1e-12)
                throw config_error("law.weights: must sum to 1 (got " + fmt_g17(total) + ")");
            for (std::size_t i = 0; i < components.size(); ++i) {
                if (components[i].kind == LawKind::Mixture)
                    throw config_error("law.components[" + std::to_string(i) + "]: nested mixtures are not supported");
                if (components[i].kind != components[0].kind)
                    throw config_error("law.components[" + std::to_string(i) + "]: mixture components must share a kind");
                components[i].validate();
            }
            return;
        }
    }
    throw domain_error("unknown law kind");
}

double vmf_density(const Vec3& x, const Vec3& mu, double kappa) {
    if (std::fabs(norm(x) - 1.0) > 1e-9) throw domain_error("vmf_density requires a unit-norm point");
    if (kappa < 0.0) throw domain_error("vmf concentration must be nonnegative");
    Vec3 m = normalized(mu);
    if (kappa == 0.0) return 1.0 / (4.0 * kPi);
    double t = dot(m, x);
    // kappa/(4 pi sinh kappa) e^{kappa t}, arranged to avoid overflow of sinh.
    return kappa / (2.0 * kPi) * std::exp(kappa * (t - 1.0)) / (1.0 - std::exp(-2.0 * kappa));
}

namespace {

double mvm_exponent(double t1, double t2, const std::array<double, 2>& kappa, double delta12) {
    // Reduction to [-pi, pi] keeps the density exactly 2pi-periodic.
    double a = std::remainder(t1, 2.0 * kPi);
    double b = std::remainder(t2, 2.0 * kPi);
    // quadratic form s' Delta s / 2 with zero diagonal reduces to d12 s1 s2
    return kappa[0] * std::cos(a) + kappa[1] * std::cos(b) + delta12 * std::sin(a) * std::sin(b);
}

double mvm_quadrature(const std::array<double, 2>& kappa, double delta12, int res) {
    // periodic trapezoid; scale by the exponent's maximum to keep terms <= 1
    double peak = kappa[0] + kappa[1] + std::fabs(delta12);
    double acc = 0.0;
    double step = 2.0 * kPi / res;
    for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j)
            acc += std::exp(mvm_exponent(i * step, j * step, kappa, delta12) - peak);
    return std::exp(peak) * acc * step * step;
}

}  // namespace

double mvm_normalizer(const std::array<double, 2>& kappa, double delta12, int resolution) {
    if (resolution < 128) throw domain_error("mvm_normalizer needs at least 128 quadrature nodes per angle");
    constexpr int kMaxResolution = 8192;
    double prev = mvm_quadrature(kappa, delta12, resolution);
    for (int res = resolution * 2; res <= kMaxResolution; res *= 2) {
        double next = mvm_quadrature(kappa, delta12, res);
        if (std::fabs(next - prev) <= 1e-6 * std::fabs(next)) return next;
        prev = next;
    }
    throw domain_error("mvm normalizer quadrature did not converge by resolution " +
                       std::to_string(kMaxResolution));
}

double mvm_density(const std::array<double, 2>& theta, const std::array<double, 2>& mu,
                   const std::array<double, 2>& kappa, double delta12, double Z) {
    if (!(Z > 0.0)) throw domain_error("mvm normalizer must be positive");
    return std::exp(mvm_exponent(theta[0] - mu[0], theta[1] - mu[1], kappa, delta12)) / Z;
}

double wishart_density(const Sym2& S, const Sym2& sigma, int m) {
    if (m <= 1) throw domain_error("wishart degrees of freedom must exceed 1");
    if (!geometry::sym2_is_spd(sigma)) throw domain_error("wishart scale must be SPD");
    if (!geometry::sym2_is_spd(S)) throw domain_error("wishart density requires an SPD argument");
    double det_s = S.det();
    double det_sigma = sigma.det();
    double tr = (sigma.c * S.a - 2.0 * sigma.b * S.b + sigma.a * S.c) / det_sigma;
    double u = 0.5 * m;
    double log_gamma2 = 0.5 * std::log(kPi) + std::lgamma(u) + std::lgamma(u - 0.5);
    double logf = 0.5 * (m - 3) * std::log(det_s) - 0.5 * tr - m * std::log(2.0) -
                  0.5 * m * std::log(det_sigma) - log_gamma2;
    return std::exp(logf);
}

namespace {

struct MvmPrecomp {
    const TargetLaw* law;
    double Z;
};

double law_density_sphere(const TargetLaw& law, const Vec3& x) {
    if (law.kind == LawKind::VonMisesFisher) return vmf_density(x, law.vmf_mu, law.vmf_kappa);
    if (law.kind == LawKind::Mixture) {
        double acc = 0.0;
        for (std::size_t i = 0; i < law.components.size(); ++i)
            acc += law.weights[i] * law_density_sphere(law.components[i], x);
        return acc;
    }
    throw config_error("law.kind: not a spherical law");
}

}  // namespace

DensityField true_density_field(const TargetLaw& law, const EvaluationGrid& grid) {
    law.validate();
    DensityField f;
    f.grid = &grid;
    f.provenance = density::Provenance::TrueDensity;
    f.values.resize(grid.size());

    switch (grid.spec.kind) {
        case ManifoldKind::Sphere:
        case ManifoldKind::Hemisphere: {
            if (law.kind != LawKind::VonMisesFisher &&
                !(law.kind == LawKind::Mixture && law.components[0].kind == LawKind::VonMisesFisher))
                throw config_error("law.kind: sphere grids take vmf laws");
            for (std::size_t i = 0; i < grid.size(); ++i)
                f.values[i] = law_density_sphere(law, grid.points[i]);
            return f;
        }
        case ManifoldKind::EmbeddedTorus: {
            std::vector<MvmPrecomp> comps;
            std::vector<double> wts;
            if (law.kind == LawKind::MultivariateVonMises) {
                comps.push_back({&law, mvm_normalizer(law.mvm_kappa, law.mvm_delta12)});
                wts.push_back(1.0);
            } else if (law.kind == LawKind::Mixture &&
                       law.components[0].kind == LawKind::MultivariateVonMises) {
                for (std::size_t i = 0; i < law.components.size(); ++i) {
                    const TargetLaw& c = law.components[i];
                    comps.push_back({&c, mvm_normalizer(c.mvm_kappa, c.mvm_delta12)});
                    wts.push_back(law.weights[i]);
                }
            } else {
                throw config_error("law.kind: torus grids take mvm laws");
            }
            double R = grid.spec.torus_R, r = grid.spec.torus_r;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                std::array<double, 2> th{grid.intrinsic[i][0], grid.intrinsic[i][1]};
                double acc = 0.0;
                for (std::size_t c = 0; c < comps.size(); ++c) {
                    const TargetLaw& L = *comps[c].law;
                    acc += wts[c] * mvm_density(th, L.mvm_mu, L.mvm_kappa, L.mvm_delta12, comps[c].Z);
                }
                // angle density over the area element gives a surface density
                f.values[i] = acc / (r * (R + r * std::cos(th[1])));
            }
            return f;
        }
        case ManifoldKind::SpdCone2: {
            if (law.kind != LawKind::Wishart2) throw config_error("law.kind: spd grids take the wishart law");
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const Vec3& p = grid.points[i];
                f.values[i] = wishart_density(Sym2{p[0], p[1], p[2]}, law.sigma, law.dof);
            }
            return f;
        }
    }
    throw domain_error("unknown manifold kind");
}

setops::GridSubset true_level_set(const DensityField& field, double lambda) {
    return setops::level_set(field, lambda);
}

}  // namespace mls::truth
