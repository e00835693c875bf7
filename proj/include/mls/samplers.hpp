#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mls/common.hpp"
#include "mls/geometry.hpp"
#include "mls/rng.hpp"
#include "mls/truth.hpp"

namespace mls::samplers {

using geometry::ManifoldSpec;
using geometry::Sym2;
using truth::TargetLaw;

struct SamplePointSet {
    std::vector<Vec3> points;                   // ambient coordinates
    std::vector<std::array<double, 2>> angles;  // intrinsic angles, torus laws only
    TargetLaw law;
    std::uint64_t seed = 0;
    std::size_t n = 0;
};

// Sum of m outer products of iid N(0, sigma) vectors, emitted as (a, b, c).
SamplePointSet sample_wishart(const Sym2& sigma, int m, std::size_t n, std::uint64_t seed);

// Rejection sampler on [0, 2pi)^2 with the crude envelope
// exp(kappa1 + kappa2 + |delta12|); accepted angles embedded into the torus.
SamplePointSet sample_mvm(const std::array<double, 2>& mu, const std::array<double, 2>& kappa,
                          double delta12, std::size_t n, std::uint64_t seed, const ManifoldSpec& torus);

// Inversion sampler: w = 1 + ln(u + (1-u) e^{-2 kappa}) / kappa, tangential
// angle uniform, frame rotated to mu.
SamplePointSet sample_vmf(const Vec3& mu, double kappa, std::size_t n, std::uint64_t seed);

// Categorical component choice followed by the component draw, all on one
// sequential stream.
SamplePointSet sample_mixture(const std::vector<double>& weights, const std::vector<TargetLaw>& components,
                              std::size_t n, std::uint64_t seed, const ManifoldSpec& spec);

// Dispatch on law.kind.
SamplePointSet sample_law(const TargetLaw& law, std::size_t n, std::uint64_t seed, const ManifoldSpec& spec);

}  // namespace mls::samplers
