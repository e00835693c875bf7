#include "mls/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "mls/stats.hpp"

namespace mls::experiment {

using geometry::ManifoldKind;
using setops::FinitePointSet;
using setops::GridSubset;

Workspace build_workspace(const ExperimentConfig& cfg) {
    cfg.validate();
    Workspace ws;
    ws.grid = geometry::make_grid(cfg.manifold, cfg.grid);
    ws.truth_field = truth::true_density_field(cfg.law, ws.grid);
    ws.true_mask = setops::level_set(ws.truth_field, cfg.lambda);
    ws.true_boundary = setops::boundary_of(ws.true_mask);
    return ws;
}

namespace {

FinitePointSet as_point_set(const GridSubset& subset) {
    FinitePointSet fps;
    fps.points = subset.points();
    return fps;
}

FinitePointSet project_points(const std::vector<Vec3>& pts, const Vec3& pole) {
    FinitePointSet fps;
    fps.points.reserve(pts.size());
    for (const Vec3& p : pts) {
        std::array<double, 2> uv = geometry::stereographic_project(p, pole);
        fps.points.push_back({uv[0], uv[1], 0.0});
    }
    return fps;
}

}  // namespace

ReplicationArtifacts run_replication(const ExperimentConfig& cfg, const Workspace& ws, std::uint64_t seed) {
    ReplicationArtifacts arts;
    arts.sample = samplers::sample_law(cfg.law, cfg.n, seed, cfg.manifold);
    arts.bandwidth = cfg.h > 0.0
                         ? cfg.h
                         : density::default_bandwidth(arts.sample.points, cfg.manifold.intrinsic_dim());
    arts.estimate = density::evaluate_field(arts.sample.points, arts.bandwidth, ws.grid, cfg.corrected, 1);
    arts.est_mask = setops::level_set(arts.estimate, cfg.lambda);
    arts.est_boundary = setops::boundary_of(arts.est_mask);

    switch (cfg.convention) {
        case DistanceConvention::Regions:
            arts.d_H = setops::hausdorff(as_point_set(ws.true_mask), as_point_set(arts.est_mask));
            arts.d_mu = setops::distance_in_measure(ws.true_mask, arts.est_mask);
            break;
        case DistanceConvention::Boundaries: {
            FinitePointSet a, b;
            if (cfg.projection.enabled) {
                a = project_points(ws.true_boundary.points(), cfg.projection.pole);
                b = project_points(arts.est_boundary.points(), cfg.projection.pole);
            } else {
                a = as_point_set(ws.true_boundary);
                b = as_point_set(arts.est_boundary);
            }
            arts.d_H = setops::hausdorff(a, b);
            arts.d_mu = setops::distance_in_measure(ws.true_mask, arts.est_mask);
            break;
        }
        case DistanceConvention::HullVsLevelset: {
            const std::vector<Vec3>& pts = arts.sample.points;
            const double h = arts.bandwidth;
            auto evaluator = [&](const Vec3& x) {
                return cfg.corrected ? density::kde_corrected(x, pts, h, cfg.manifold)
                                     : density::kde_uncorrected(x, pts, h, cfg.manifold);
            };
            FinitePointSet filtered = setops::sample_filter(pts, evaluator, cfg.lambda);
            arts.hull = setops::r_convex_hull(filtered, ws.grid, cfg.hull_r, &arts.hull_warning);
            arts.d_H = setops::hausdorff(as_point_set(arts.hull), as_point_set(ws.true_mask));
            arts.d_mu = setops::distance_in_measure(arts.hull, ws.true_mask);
            break;
        }
    }

    std::vector<std::uint8_t> all(ws.grid.size(), 1);
    arts.sup_err = density::sup_error(arts.estimate, ws.truth_field, all);
    return arts;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    Workspace ws = build_workspace(cfg);
    return run_experiment(cfg, ws);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Workspace& ws) {
    cfg.validate();
    ExperimentResult result;
    result.config = cfg;
    result.rows.resize(static_cast<std::size_t>(cfg.replications));

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= cfg.replications) return;
            ReplicationRow& row = result.rows[static_cast<std::size_t>(i)];
            row.replication = i;
            row.seed = replication_seed(cfg.base_seed, static_cast<std::uint64_t>(i));
            auto t0 = std::chrono::steady_clock::now();
            try {
                ReplicationArtifacts arts = run_replication(cfg, ws, row.seed);
                row.d_H = arts.d_H;
                row.d_mu = arts.d_mu;
                row.sup_err = arts.sup_err;
            } catch (const std::exception& e) {
                row.failed = true;
                row.message = e.what();
                row.d_H = row.d_mu = row.sup_err = std::numeric_limits<double>::quiet_NaN();
            }
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };

    int threads = std::min(cfg.threads, cfg.replications);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<double> dh, dmu, sup;
    for (const ReplicationRow& row : result.rows) {
        if (row.failed) {
            ++result.failures;
            continue;
        }
        dh.push_back(row.d_H);
        dmu.push_back(row.d_mu);
        sup.push_back(row.sup_err);
    }
    if (2 * result.failures > result.rows.size()) {
        std::string first;
        for (const ReplicationRow& row : result.rows)
            if (row.failed) {
                first = row.message;
                break;
            }
        throw error("more than half the replications failed; first failure: " + first);
    }
    result.d_H = {mean_of(dh), stddev_of(dh)};
    result.d_mu = {mean_of(dmu), stddev_of(dmu)};
    result.sup_err = {mean_of(sup), stddev_of(sup)};
    return result;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary keeps line endings fixed across platforms
    if (!out) throw error("cannot write '" + path + "'");
    return out;
}

void write_point_csv(const std::string& path, const std::vector<Vec3>& pts,
                     const std::vector<std::array<double, 2>>* angles,
                     const ProjectionSettings& projection) {
    std::ofstream out = open_out(path);
    out << "x,y,z";
    if (angles) out << ",theta1,theta2";
    if (projection.enabled) out << ",u,v";
    out << "\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec3& p = pts[i];
        out << fmt_g17(p[0]) << "," << fmt_g17(p[1]) << "," << fmt_g17(p[2]);
        if (angles) out << "," << fmt_g17((*angles)[i][0]) << "," << fmt_g17((*angles)[i][1]);
        if (projection.enabled) {
            std::array<double, 2> uv = geometry::stereographic_project(p, projection.pole);
            out << "," << fmt_g17(uv[0]) << "," << fmt_g17(uv[1]);
        }
        out << "\n";
    }
    if (!out) throw error("write failed for '" + path + "'");
}

}  // namespace

void write_results_csv(const ExperimentResult& result, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "replication,seed,d_H,d_mu,sup_error,seconds\n";
    for (const ReplicationRow& row : result.rows) {
        out << row.replication << "," << row.seed << "," << fmt_g17(row.d_H) << "," << fmt_g17(row.d_mu)
            << "," << fmt_g17(row.sup_err) << "," << fmt_g17(row.seconds) << "\n";
    }
    if (!out) throw error("write failed for '" + path + "'");
}

void emit_plot_data(const ExperimentConfig& cfg, const Workspace& ws, const ReplicationArtifacts& arts,
                    const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw error("cannot create output directory '" + dir + "': " + ec.message());

    const auto* angles = arts.sample.angles.empty() ? nullptr : &arts.sample.angles;
    write_point_csv(dir + "/samples.csv", arts.sample.points, angles, cfg.projection);
    write_point_csv(dir + "/true_boundary.csv", ws.true_boundary.points(), nullptr, cfg.projection);
    write_point_csv(dir + "/est_boundary.csv", arts.est_boundary.points(), nullptr, cfg.projection);
    std::vector<Vec3> hull_pts;
    if (!arts.hull.mask.empty()) hull_pts = arts.hull.points();
    write_point_csv(dir + "/hull.csv", hull_pts, nullptr, cfg.projection);
}

}  // namespace mls::experiment
