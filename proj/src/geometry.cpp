#include "mls/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace mls::geometry {

std::string kind_name(ManifoldKind k) {
    switch (k) {
        case ManifoldKind::Sphere: return "sphere";
        case ManifoldKind::EmbeddedTorus: return "torus";
        case ManifoldKind::SpdCone2: return "spd";
        case ManifoldKind::Hemisphere: return "hemisphere";
    }
    throw domain_error("unknown manifold kind");
}

ManifoldKind kind_from_name(const std::string& name) {
    if (name == "sphere") return ManifoldKind::Sphere;
    if (name == "torus") return ManifoldKind::EmbeddedTorus;
    if (name == "spd") return ManifoldKind::SpdCone2;
    if (name == "hemisphere") return ManifoldKind::Hemisphere;
    throw config_error("unknown manifold kind: " + name);
}

void ManifoldSpec::check() const {
    if (kind == ManifoldKind::EmbeddedTorus && !(torus_r > 0.0 && torus_r < torus_R))
        throw config_error("torus requires 0 < r < R");
    if (kind == ManifoldKind::Hemisphere && !(cap_angle > 0.0 && cap_angle <= kPi / 2))
        throw config_error("hemisphere cap angle must lie in (0, pi/2]");
}

Sym2Eig sym2_eigen(const Sym2& s) {
    double half_tr = 0.5 * (s.a + s.c);
    double diff = 0.5 * (s.a - s.c);
    double rad = std::sqrt(diff * diff + s.b * s.b);
    Sym2Eig e;
    e.l1 = half_tr - rad;
    e.l2 = half_tr + rad;
    if (rad < 1e-300) {
        e.cs = 1.0;
        e.sn = 0.0;
        return e;
    }
    // Eigenvector for l1 solves (a - l1) v1 + b v2 = 0.
    double vx, vy;
    if (std::fabs(s.b) > std::fabs(s.a - e.l1)) {
        vx = -s.b;
        vy = s.a - e.l1;
    } else {
        vx = s.c - e.l1;
        vy = -s.b;
    }
    double n = std::sqrt(vx * vx + vy * vy);
    if (n < 1e-300) {
        e.cs = 1.0;
        e.sn = 0.0;
    } else {
        e.cs = vx / n;
        e.sn = vy / n;
    }
    return e;
}

bool sym2_is_spd(const Sym2& s) { return s.a > 0.0 && s.det() > 0.0; }

static Sym2 sym2_apply(const Sym2& s, double (*f)(double)) {
    Sym2Eig e = sym2_eigen(s);
    if (e.l1 < 1e-12) throw domain_error("matrix is not positive definite within the eigenvalue floor 1e-12");
    double f1 = f(e.l1), f2 = f(e.l2);
    // Reconstruct V diag(f1,f2) V^T with V = [(cs,sn), (-sn,cs)].
    Sym2 out;
    out.a = f1 * e.cs * e.cs + f2 * e.sn * e.sn;
    out.b = (f1 - f2) * e.cs * e.sn;
    out.c = f1 * e.sn * e.sn + f2 * e.cs * e.cs;
    return out;
}

Sym2 sym2_sqrt_inverse(const Sym2& s) {
    return sym2_apply(s, [](double x) { return 1.0 / std::sqrt(x); });
}

double spd_distance(const Sym2& A, const Sym2& B) {
    if (!sym2_is_spd(A) || !sym2_is_spd(B)) throw domain_error("spd_distance requires positive-definite operands");
    // Canonical operand order makes the computed value exactly symmetric.
    auto key = [](const Sym2& s) { return std::array<double, 3>{s.a, s.b, s.c}; };
    if (key(B) < key(A)) return spd_distance(B, A);
    Sym2 W = sym2_sqrt_inverse(A);
    // M = W B W (symmetric since W is symmetric).
    double m11 = W.a * B.a + W.b * B.b;
    double m12 = W.a * B.b + W.b * B.c;
    double m21 = W.b * B.a + W.c * B.b;
    double m22 = W.b * B.b + W.c * B.c;
    Sym2 M;
    M.a = m11 * W.a + m12 * W.b;
    M.b = m11 * W.b + m12 * W.c;
    M.c = m21 * W.b + m22 * W.c;
    Sym2Eig e = sym2_eigen(M);
    if (e.l1 < 1e-12) throw domain_error("matrix is not positive definite within the eigenvalue floor 1e-12");
    double u = std::log(e.l1), v = std::log(e.l2);
    return std::sqrt(u * u + v * v);
}

Vec3 embed(const ManifoldSpec& spec, const Intrinsic& u) {
    switch (spec.kind) {
        case ManifoldKind::Sphere:
        case ManifoldKind::Hemisphere: {
            double theta = u[0], phi = u[1];
            if (spec.kind == ManifoldKind::Hemisphere && (phi < -1e-12 || phi > spec.cap_angle + 1e-12))
                throw domain_error("polar angle outside hemisphere cap");
            return {std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi)};
        }
        case ManifoldKind::EmbeddedTorus: {
            double theta = u[0], phi = u[1];
            double ring = spec.torus_R + spec.torus_r * std::cos(phi);
            return {ring * std::cos(theta), ring * std::sin(theta), spec.torus_r * std::sin(phi)};
        }
        case ManifoldKind::SpdCone2: {
            Sym2 s{u[0], u[1], u[2]};
            if (!sym2_is_spd(s)) throw domain_error("(a,b,c) is outside the SPD cone");
            return {u[0], u[1], u[2]};
        }
    }
    throw domain_error("unknown manifold kind");
}

double on_manifold_residual(const ManifoldSpec& spec, const Vec3& x) {
    switch (spec.kind) {
        case ManifoldKind::Sphere:
            return std::fabs(norm(x) - 1.0);
        case ManifoldKind::Hemisphere: {
            double res = std::fabs(norm(x) - 1.0);
            double polar = std::acos(std::clamp(x[2], -1.0, 1.0));
            return std::max(res, std::max(0.0, polar - spec.cap_angle));
        }
        case ManifoldKind::EmbeddedTorus: {
            double ring = std::sqrt(x[0] * x[0] + x[1] * x[1]) - spec.torus_R;
            return std::fabs(ring * ring + x[2] * x[2] - spec.torus_r * spec.torus_r);
        }
        case ManifoldKind::SpdCone2: {
            Sym2 s{x[0], x[1], x[2]};
            return sym2_is_spd(s) ? 0.0 : kInf;
        }
    }
    throw domain_error("unknown manifold kind");
}

void require_on_manifold(const ManifoldSpec& spec, const Vec3& x, double tol) {
    if (!(on_manifold_residual(spec, x) <= tol))
        throw domain_error("point is not on the " + kind_name(spec.kind) + " within tolerance");
}

double geodesic_distance(const ManifoldSpec& spec, const Vec3& x, const Vec3& y) {
    switch (spec.kind) {
        case ManifoldKind::Sphere:
        case ManifoldKind::Hemisphere: {
            // On a cap of angle <= pi/2 the minor great-circle arc stays
            // inside the cap, so the sphere formula is exact there too.
            require_on_manifold(spec, x);
            require_on_manifold(spec, y);
            // acos resolves coincident points only to ~sqrt(eps); identity
            // of indiscernibles needs the shortcut
            if (x == y) return 0.0;
            return std::acos(std::clamp(dot(x, y), -1.0, 1.0));
        }
        case ManifoldKind::SpdCone2:
            return spd_distance(Sym2{x[0], x[1], x[2]}, Sym2{y[0], y[1], y[2]});
        case ManifoldKind::EmbeddedTorus:
            throw domain_error("the embedded torus has no closed-form geodesic; build a grid graph");
    }
    throw domain_error("unknown manifold kind");
}

double boundary_distance(const ManifoldSpec& spec, const Vec3& x) {
    if (spec.kind != ManifoldKind::Hemisphere) return kInf;
    require_on_manifold(spec, x);
    double polar = std::acos(std::clamp(x[2], -1.0, 1.0));
    return std::max(0.0, spec.cap_angle - polar);
}

std::array<double, 2> stereographic_project(const Vec3& x, const Vec3& pole) {
    Vec3 p = normalized(pole);
    // Fixed orthonormal basis of the projection plane.
    Vec3 seed = std::fabs(p[0]) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
    Vec3 e1 = normalized(seed - dot(seed, p) * p);
    Vec3 e2 = cross(p, e1);
    double denom = 1.0 - dot(x, p);
    if (denom < 1e-12) throw domain_error("stereographic projection undefined at the pole");
    double s = 1.0 / denom;
    Vec3 q = s * (x - dot(x, p) * p);
    return {dot(q, e1), dot(q, e2)};
}

double EvaluationGrid::total_volume() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

namespace {

void require_resolution(int res) {
    if (res < 8) throw config_error("grid resolution must be at least 8 per intrinsic dimension");
}

// Mean nearest-neighbor distance over the adjacency lists.
double mean_edge_length(const EvaluationGrid& g) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (int j : g.adjacency[i]) {
            total += dist(g.points[i], g.points[static_cast<std::size_t>(j)]);
            ++count;
        }
    }
    return count ? total / static_cast<double>(count) : 0.0;
}

EvaluationGrid make_angle_lattice(const ManifoldSpec& spec, int n_theta, int n_phi) {
    require_resolution(n_theta);
    require_resolution(n_phi);
    EvaluationGrid g;
    g.spec = spec;
    const double dtheta = 2.0 * kPi / n_theta;
    const bool torus = spec.kind == ManifoldKind::EmbeddedTorus;
    const double phi_span = torus ? 2.0 * kPi
                                  : (spec.kind == ManifoldKind::Hemisphere ? spec.cap_angle : kPi);
    const double dphi = phi_span / n_phi;
    g.points.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    for (int i = 0; i < n_theta; ++i) {
        for (int j = 0; j < n_phi; ++j) {
            double theta = i * dtheta;
            // Cell-centered polar angle; keeps lat-long weights positive and
            // the total area within tolerance without special pole nodes.
            double phi = torus ? j * dphi : (j + 0.5) * dphi;
            Intrinsic u{theta, phi, 0.0};
            g.intrinsic.push_back(u);
            g.points.push_back(embed(spec, u));
            double w = torus ? spec.torus_r * (spec.torus_R + spec.torus_r * std::cos(phi)) * dtheta * dphi
                             : std::sin(phi) * dtheta * dphi;
            g.weights.push_back(w);
        }
    }
    auto idx = [&](int i, int j) { return i * n_phi + j; };
    g.adjacency.assign(g.size(), {});
    for (int i = 0; i < n_theta; ++i) {
        for (int j = 0; j < n_phi; ++j) {
            auto& adj = g.adjacency[static_cast<std::size_t>(idx(i, j))];
            adj.push_back(idx((i + 1) % n_theta, j));
            adj.push_back(idx((i + n_theta - 1) % n_theta, j));
            if (torus) {
                adj.push_back(idx(i, (j + 1) % n_phi));
                adj.push_back(idx(i, (j + n_phi - 1) % n_phi));
            } else {
                if (j + 1 < n_phi) adj.push_back(idx(i, j + 1));
                if (j > 0) adj.push_back(idx(i, j - 1));
            }
        }
    }
    g.spacing = mean_edge_length(g);
    return g;
}

EvaluationGrid make_fibonacci_sphere(const ManifoldSpec& spec, int n) {
    if (n < 64) throw config_error("fibonacci grid needs at least 64 points");
    EvaluationGrid g;
    g.spec = spec;
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    g.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double z = 1.0 - (2.0 * i + 1.0) / n;
        double phi = std::acos(std::clamp(z, -1.0, 1.0));
        double theta = std::fmod(2.0 * kPi * i / golden, 2.0 * kPi);
        if (theta < 0) theta += 2.0 * kPi;
        Intrinsic u{theta, phi, 0.0};
        g.intrinsic.push_back(u);
        g.points.push_back(embed(spec, u));
        g.weights.push_back(4.0 * kPi / n);
    }
    // Symmetrized 6-nearest-neighbor adjacency.
    const int k = 6;
    g.adjacency.assign(g.size(), {});
    std::vector<std::pair<double, int>> cand;
    for (int i = 0; i < n; ++i) {
        cand.clear();
        cand.reserve(static_cast<std::size_t>(n) - 1);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            cand.emplace_back(norm2(g.points[static_cast<std::size_t>(i)] - g.points[static_cast<std::size_t>(j)]), j);
        }
        std::nth_element(cand.begin(), cand.begin() + k, cand.end());
        for (int t = 0; t < k; ++t) g.adjacency[static_cast<std::size_t>(i)].push_back(cand[static_cast<std::size_t>(t)].second);
    }
    for (int i = 0; i < n; ++i) {
        for (int j : g.adjacency[static_cast<std::size_t>(i)]) {
            auto& back = g.adjacency[static_cast<std::size_t>(j)];
            if (std::find(back.begin(), back.end(), i) == back.end()) back.push_back(i);
        }
    }
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
    g.spacing = mean_edge_length(g);
    return g;
}

EvaluationGrid make_spd_grid(const ManifoldSpec& spec, const GridOptions& opt) {
    require_resolution(opt.spd_ac_count);
    require_resolution(opt.spd_b_count);
    if (!(opt.spd_ac_min > 0.0 && opt.spd_ac_max > opt.spd_ac_min) || !(opt.spd_b_max > opt.spd_b_min))
        throw config_error("invalid SPD bounding box");
    EvaluationGrid g;
    g.spec = spec;
    const int na = opt.spd_ac_count, nb = opt.spd_b_count;
    const double da = na > 1 ? (opt.spd_ac_max - opt.spd_ac_min) / (na - 1) : 0.0;
    const double db = nb > 1 ? (opt.spd_b_max - opt.spd_b_min) / (nb - 1) : 0.0;
    const double cell = da * db * da;
    std::vector<int> index(static_cast<std::size_t>(na) * nb * na, -1);
    auto flat = [&](int i, int j, int k) { return (static_cast<std::size_t>(i) * nb + j) * na + k; };
    for (int i = 0; i < na; ++i) {
        for (int j = 0; j < nb; ++j) {
            for (int k = 0; k < na; ++k) {
                double a = opt.spd_ac_min + i * da;
                double b = opt.spd_b_min + j * db;
                double c = opt.spd_ac_min + k * da;
                // keep the node only when clear of the metric's eigenvalue
                // floor; lattices can land exactly on the cone boundary
                if (!(a * c - b * b > 0.0) || sym2_eigen({a, b, c}).l1 < 1e-9) continue;
                index[flat(i, j, k)] = static_cast<int>(g.points.size());
                g.intrinsic.push_back({a, b, c});
                g.points.push_back({a, b, c});
                g.weights.push_back(cell);
            }
        }
    }
    if (g.points.empty()) throw config_error("SPD grid is empty after the cone restriction");
    g.adjacency.assign(g.size(), {});
    for (int i = 0; i < na; ++i) {
        for (int j = 0; j < nb; ++j) {
            for (int k = 0; k < na; ++k) {
                int self = index[flat(i, j, k)];
                if (self < 0) continue;
                auto link = [&](int ii, int jj, int kk) {
                    if (ii < 0 || ii >= na || jj < 0 || jj >= nb || kk < 0 || kk >= na) return;
                    int other = index[flat(ii, jj, kk)];
                    if (other >= 0) g.adjacency[static_cast<std::size_t>(self)].push_back(other);
                };
                link(i - 1, j, k);
                link(i + 1, j, k);
                link(i, j - 1, k);
                link(i, j + 1, k);
                link(i, j, k - 1);
                link(i, j, k + 1);
            }
        }
    }
    g.spacing = mean_edge_length(g);
    return g;
}

}  // namespace

EvaluationGrid make_grid(const ManifoldSpec& spec, const GridOptions& opt) {
    spec.check();
    switch (spec.kind) {
        case ManifoldKind::EmbeddedTorus:
        case ManifoldKind::Hemisphere:
            return make_angle_lattice(spec, opt.res_u, opt.res_v);
        case ManifoldKind::Sphere:
            return opt.sphere_kind == SphereGridKind::Fibonacci
                       ? make_fibonacci_sphere(spec, opt.fibonacci_n)
                       : make_angle_lattice(spec, opt.res_u, opt.res_v);
        case ManifoldKind::SpdCone2:
            return make_spd_grid(spec, opt);
    }
    throw domain_error("unknown manifold kind");
}

void write_grid_csv(const EvaluationGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write '" + path + "'");
    const int dp = grid.spec.intrinsic_dim();
    out << "idx";
    for (int d = 0; d < dp; ++d) out << ",u" << (d + 1);
    out << ",x1,x2,x3,weight\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << i;
        for (int d = 0; d < dp; ++d) out << "," << fmt_g17(grid.intrinsic[i][static_cast<std::size_t>(d)]);
        out << "," << fmt_g17(grid.points[i][0]) << "," << fmt_g17(grid.points[i][1]) << ","
            << fmt_g17(grid.points[i][2]) << "," << fmt_g17(grid.weights[i]) << "\n";
    }
    if (!out) throw error("write failed for '" + path + "'");
}

void write_adjacency_csv(const EvaluationGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot write '" + path + "'");
    out << "from,to\n";
    for (std::size_t i = 0; i < grid.adjacency.size(); ++i)
        for (int j : grid.adjacency[i])
            if (static_cast<std::size_t>(j) > i) out << i << "," << j << "\n";
    if (!out) throw error("write failed for '" + path + "'");
}

}  // namespace mls::geometry
