#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mls/common.hpp"
#include "mls/density.hpp"
#include "mls/geometry.hpp"
#include "mls/samplers.hpp"
#include "mls/setops.hpp"
#include "mls/truth.hpp"

namespace mls::experiment {

enum class DistanceConvention { Regions, Boundaries, HullVsLevelset };

std::string convention_name(DistanceConvention c);
DistanceConvention convention_from_name(const std::string& name);

struct ProjectionSettings {
    bool enabled = false;
    Vec3 pole{1.0, 0.0, 0.0};
};

struct ExperimentConfig {
    std::string name = "custom";
    geometry::ManifoldSpec manifold;
    geometry::GridOptions grid;
    truth::TargetLaw law;
    std::size_t n = 1000;
    double h = 0.0;  // 0 selects the rule-of-thumb bandwidth
    double lambda = 0.1;
    double hull_r = 0.0;  // 0 disables the hull stage
    int replications = 20;
    std::uint64_t base_seed = 20260814;
    DistanceConvention convention = DistanceConvention::Regions;
    ProjectionSettings projection;
    bool corrected = true;
    int threads = 1;
    std::string out_dir;

    // Every violated invariant, each prefixed with its field path.
    std::vector<std::string> diagnostics() const;
    void validate() const;  // throws config_error listing the violations
};

struct ReplicationRow {
    int replication = 0;
    std::uint64_t seed = 0;
    double d_H = 0.0;
    double d_mu = 0.0;
    double sup_err = 0.0;
    double seconds = 0.0;
    bool failed = false;
    std::string message;
};

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ReplicationRow> rows;
    Aggregate d_H, d_mu, sup_err;
    std::size_t failures = 0;
};

// Grid, truth field, and true level set are shared across replications.
struct Workspace {
    geometry::EvaluationGrid grid;
    density::DensityField truth_field;
    setops::GridSubset true_mask;
    setops::GridSubset true_boundary;
};

Workspace build_workspace(const ExperimentConfig& cfg);

struct ReplicationArtifacts {
    samplers::SamplePointSet sample;
    density::DensityField estimate;
    double bandwidth = 0.0;
    setops::GridSubset est_mask;
    setops::GridSubset est_boundary;
    setops::GridSubset hull;  // empty mask when the hull stage is disabled
    std::string hull_warning;
    double d_H = 0.0;
    double d_mu = 0.0;
    double sup_err = 0.0;
};

ReplicationArtifacts run_replication(const ExperimentConfig& cfg, const Workspace& ws, std::uint64_t seed);

// Runs all replications (optionally across threads; results are ordered by
// replication index, so parallelism never changes outputs).
ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Workspace& ws);

// CSV emitters. Plot data covers one replication at the base seed.
void write_results_csv(const ExperimentResult& result, const std::string& path);
void emit_plot_data(const ExperimentConfig& cfg, const Workspace& ws, const ReplicationArtifacts& arts,
                    const std::string& dir);

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

// Strict JSON: unknown keys are rejected with their field path.
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);
std::string law_to_json_text(const truth::TargetLaw& law);

}  // namespace mls::experiment
