#include "mls/samplers.hpp"

#include <cmath>

namespace mls::samplers {

using geometry::ManifoldKind;
using truth::LawKind;

namespace {

struct Chol2 {
    double l11, l21, l22;
};

Chol2 cholesky2(const Sym2& sigma) {
    if (!geometry::sym2_is_spd(sigma)) throw domain_error("wishart scale must be SPD");
    double l11 = std::sqrt(sigma.a);
    double l21 = sigma.b / l11;
    double l22 = std::sqrt(sigma.c - l21 * l21);
    return {l11, l21, l22};
}

Vec3 draw_wishart(Rng& rng, const Chol2& L, int m) {
    double a = 0.0, b = 0.0, c = 0.0;
    for (int k = 0; k < m; ++k) {
        double z1 = rng.gaussian();
        double z2 = rng.gaussian();
        double x = L.l11 * z1;
        double y = L.l21 * z1 + L.l22 * z2;
        a += x * x;
        b += x * y;
        c += y * y;
    }
    return {a, b, c};
}

double mvm_exponent(double t1, double t2, const std::array<double, 2>& kappa, double delta12) {
    return kappa[0] * std::cos(t1) + kappa[1] * std::cos(t2) + delta12 * std::sin(t1) * std::sin(t2);
}

std::array<double, 2> draw_mvm(Rng& rng, const std::array<double, 2>& mu, const std::array<double, 2>& kappa,
                               double delta12, std::uint64_t& proposals, std::uint64_t& accepted) {
    const double envelope = kappa[0] + kappa[1] + std::fabs(delta12);
    for (;;) {
        double t1 = 2.0 * kPi * rng.uniform();
        double t2 = 2.0 * kPi * rng.uniform();
        double u = rng.uniform();
        ++proposals;
        if (u < std::exp(mvm_exponent(t1 - mu[0], t2 - mu[1], kappa, delta12) - envelope)) {
            ++accepted;
            double w1 = std::fmod(t1, 2.0 * kPi);
            double w2 = std::fmod(t2, 2.0 * kPi);
            return {w1 < 0.0 ? w1 + 2.0 * kPi : w1, w2 < 0.0 ? w2 + 2.0 * kPi : w2};
        }
        // trial-batch guard against parameters that starve the sampler
        if (proposals >= 2000000 && accepted == 0)
            throw error("mvm rejection sampler acceptance rate is below 1e-6; check kappa and delta");
    }
}

Vec3 draw_vmf(Rng& rng, const Vec3& mu, double kappa) {
    double u = rng.uniform_pos();
    double w;
    if (kappa == 0.0) {
        w = 2.0 * u - 1.0;
    } else {
        w = 1.0 + std::log(u + (1.0 - u) * std::exp(-2.0 * kappa)) / kappa;
    }
    double v = 2.0 * kPi * rng.uniform();
    double s = std::sqrt(std::max(0.0, 1.0 - w * w));

    Vec3 m = normalized(mu);
    Vec3 ref = std::fabs(m[0]) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
    Vec3 e1 = normalized(cross(m, ref));
    Vec3 e2 = cross(m, e1);
    return (s * std::cos(v)) * e1 + (s * std::sin(v)) * e2 + w * m;
}

}  // namespace

SamplePointSet sample_wishart(const Sym2& sigma, int m, std::size_t n, std::uint64_t seed) {
    if (m < 2) throw domain_error("wishart sampler needs at least 2 degrees of freedom");
    Chol2 L = cholesky2(sigma);
    SamplePointSet out;
    out.law.kind = LawKind::Wishart2;
    out.law.sigma = sigma;
    out.law.dof = m;
    out.seed = seed;
    out.n = n;
    out.points.reserve(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) out.points.push_back(draw_wishart(rng, L, m));
    return out;
}

SamplePointSet sample_mvm(const std::array<double, 2>& mu, const std::array<double, 2>& kappa,
                          double delta12, std::size_t n, std::uint64_t seed, const ManifoldSpec& torus) {
    if (kappa[0] < 0.0 || kappa[1] < 0.0) throw domain_error("mvm concentrations must be nonnegative");
    if (torus.kind != ManifoldKind::EmbeddedTorus) throw domain_error("mvm samples live on the torus");
    SamplePointSet out;
    out.law.kind = LawKind::MultivariateVonMises;
    out.law.mvm_mu = mu;
    out.law.mvm_kappa = kappa;
    out.law.mvm_delta12 = delta12;
    out.seed = seed;
    out.n = n;
    out.points.reserve(n);
    out.angles.reserve(n);
    Rng rng(seed);
    std::uint64_t proposals = 0, accepted = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, 2> th = draw_mvm(rng, mu, kappa, delta12, proposals, accepted);
        out.angles.push_back(th);
        out.points.push_back(geometry::embed(torus, {th[0], th[1], 0.0}));
    }
    return out;
}

SamplePointSet sample_vmf(const Vec3& mu, double kappa, std::size_t n, std::uint64_t seed) {
    if (kappa < 0.0) throw domain_error("vmf concentration must be nonnegative");
    SamplePointSet out;
    out.law.kind = LawKind::VonMisesFisher;
    out.law.vmf_mu = normalized(mu);
    out.law.vmf_kappa = kappa;
    out.seed = seed;
    out.n = n;
    out.points.reserve(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) out.points.push_back(draw_vmf(rng, mu, kappa));
    return out;
}

SamplePointSet sample_mixture(const std::vector<double>& weights, const std::vector<TargetLaw>& components,
                              std::size_t n, std::uint64_t seed, const ManifoldSpec& spec) {
    TargetLaw law;
    law.kind = LawKind::Mixture;
    law.weights = weights;
    law.components = components;
    law.validate();

    SamplePointSet out;
    out.law = law;
    out.seed = seed;
    out.n = n;
    out.points.reserve(n);
    const bool torus = components[0].kind == LawKind::MultivariateVonMises;
    if (torus) out.angles.reserve(n);

    Rng rng(seed);
    std::uint64_t proposals = 0, accepted = 0;
    std::vector<Chol2> chols;
    if (components[0].kind == LawKind::Wishart2)
        for (const TargetLaw& c : components) chols.push_back(cholesky2(c.sigma));

    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.uniform();
        std::size_t idx = 0;
        double acc = 0.0;
        for (std::size_t c = 0; c < weights.size(); ++c) {
            acc += weights[c];
            if (u < acc) {
                idx = c;
                break;
            }
            idx = c;  // rounding at the top end falls into the last component
        }
        const TargetLaw& comp = components[idx];
        switch (comp.kind) {
            case LawKind::VonMisesFisher:
                out.points.push_back(draw_vmf(rng, comp.vmf_mu, comp.vmf_kappa));
                break;
            case LawKind::MultivariateVonMises: {
                std::array<double, 2> th =
                    draw_mvm(rng, comp.mvm_mu, comp.mvm_kappa, comp.mvm_delta12, proposals, accepted);
                out.angles.push_back(th);
                out.points.push_back(geometry::embed(spec, {th[0], th[1], 0.0}));
                break;
            }
            case LawKind::Wishart2:
                out.points.push_back(draw_wishart(rng, chols[idx], comp.dof));
                break;
            case LawKind::Mixture:
                throw domain_error("nested mixtures are not supported");
        }
    }
    return out;
}

SamplePointSet sample_law(const TargetLaw& law, std::size_t n, std::uint64_t seed, const ManifoldSpec& spec) {
    law.validate();
    switch (law.kind) {
        case LawKind::Wishart2: return sample_wishart(law.sigma, law.dof, n, seed);
        case LawKind::MultivariateVonMises:
            return sample_mvm(law.mvm_mu, law.mvm_kappa, law.mvm_delta12, n, seed, spec);
        case LawKind::VonMisesFisher: return sample_vmf(law.vmf_mu, law.vmf_kappa, n, seed);
        case LawKind::Mixture: return sample_mixture(law.weights, law.components, n, seed, spec);
    }
    throw domain_error("unknown law kind");
}

}  // namespace mls::samplers
