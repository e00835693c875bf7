#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mls/common.hpp"

namespace mls::geometry {

enum class ManifoldKind { Sphere, EmbeddedTorus, SpdCone2, Hemisphere };

std::string kind_name(ManifoldKind k);
ManifoldKind kind_from_name(const std::string& name);

struct ManifoldSpec {
    ManifoldKind kind = ManifoldKind::Sphere;
    double torus_R = 2.0;      // major radius
    double torus_r = 1.0;      // minor radius, 0 < r < R
    double cap_angle = kPi / 2;  // hemisphere polar cap angle

    int ambient_dim() const { return 3; }
    int intrinsic_dim() const { return kind == ManifoldKind::SpdCone2 ? 3 : 2; }
    bool has_boundary() const { return kind == ManifoldKind::Hemisphere; }
    void check() const;
};

// Symmetric 2x2 matrix [[a,b],[b,c]] stored as (a,b,c); shared by the SPD
// cone geometry and the Wishart law.
struct Sym2 {
    double a = 1.0, b = 0.0, c = 1.0;
    double det() const { return a * c - b * b; }
    double trace() const { return a + c; }
};

// Eigenvalues (ascending) and the rotation angle of the eigenbasis.
struct Sym2Eig {
    double l1, l2;     // l1 <= l2
    double cs, sn;     // eigenvector of l1 is (cs, sn)
};
Sym2Eig sym2_eigen(const Sym2& s);
Sym2 sym2_sqrt_inverse(const Sym2& s);  // s^{-1/2}
bool sym2_is_spd(const Sym2& s);

// Intrinsic chart coordinates; entries past intrinsic_dim are ignored.
using Intrinsic = std::array<double, 3>;

Vec3 embed(const ManifoldSpec& spec, const Intrinsic& u);
double on_manifold_residual(const ManifoldSpec& spec, const Vec3& x);
void require_on_manifold(const ManifoldSpec& spec, const Vec3& x, double tol = 1e-9);

// Closed-form geodesics: sphere/hemisphere great-circle arc, SPD cone
// affine-invariant metric. The embedded torus has no closed form; use the
// grid graph (graph.hpp) instead.
double geodesic_distance(const ManifoldSpec& spec, const Vec3& x, const Vec3& y);

// Affine-invariant distance ||ln(A^{-1/2} B A^{-1/2})||_F on SPD(2).
double spd_distance(const Sym2& A, const Sym2& B);

// Geodesic distance to the manifold boundary; +inf on boundaryless manifolds.
double boundary_distance(const ManifoldSpec& spec, const Vec3& x);

// Projection from `pole` onto the plane through the origin orthogonal to it.
// Returns 2-d coordinates in a fixed orthonormal basis of that plane.
std::array<double, 2> stereographic_project(const Vec3& x, const Vec3& pole);

enum class SphereGridKind { LatLong, Fibonacci };

struct GridOptions {
    // Lattice resolutions (angles for sphere/torus/hemisphere, axes for SPD).
    int res_u = 64;
    int res_v = 64;
    SphereGridKind sphere_kind = SphereGridKind::Fibonacci;
    int fibonacci_n = 2000;
    // SPD bounding box in (a, b, c); the (a, c) axes share range and count.
    double spd_ac_min = 0.16, spd_ac_max = 4.0;
    double spd_b_min = -1.76, spd_b_max = 1.76;
    int spd_ac_count = 25, spd_b_count = 23;
};

struct EvaluationGrid {
    ManifoldSpec spec;
    std::vector<Vec3> points;
    std::vector<Intrinsic> intrinsic;
    std::vector<double> weights;
    std::vector<std::vector<int>> adjacency;
    double spacing = 0.0;  // representative ambient neighbor spacing

    std::size_t size() const { return points.size(); }
    double total_volume() const;
};

EvaluationGrid make_grid(const ManifoldSpec& spec, const GridOptions& opt);

// CSV exports: grid rows are idx,u1..ud',x1,x2,x3,weight; adjacency rows are
// undirected edges listed once as from,to.
void write_grid_csv(const EvaluationGrid& grid, const std::string& path);
void write_adjacency_csv(const EvaluationGrid& grid, const std::string& path);

}  // namespace mls::geometry
