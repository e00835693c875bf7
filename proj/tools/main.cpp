#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "mls/experiment.hpp"

namespace {

using mls::fmt_g17;
using mls::Vec3;
namespace exp = mls::experiment;

struct CommonOpts {
    std::string config_path;
    std::string preset_name;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    int replications = 0;
    int threads = 0;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* repl_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

void attach_common(CLI::App* sub, CommonOpts& o, bool with_replications) {
    sub->add_option("--config", o.config_path, "experiment config JSON path")->envname("MLS_CONFIG");
    sub->add_option("--preset", o.preset_name, "named preset")->envname("MLS_PRESET");
    o.seed_opt = sub->add_option("--seed", o.seed, "base seed override")->envname("MLS_SEED");
    o.out_opt = sub->add_option("--out", o.out_dir, "output directory")->envname("MLS_OUT");
    if (with_replications)
        o.repl_opt =
            sub->add_option("--replications", o.replications, "replication count override")
                ->envname("MLS_REPLICATIONS");
    o.threads_opt = sub->add_option("--threads", o.threads, "worker thread count")->envname("MLS_THREADS");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw mls::config_error("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

exp::ExperimentConfig resolve_config(const CommonOpts& o, bool validate = true) {
    if (!o.config_path.empty() && !o.preset_name.empty())
        throw mls::config_error("give either --preset or --config, not both");
    exp::ExperimentConfig cfg;
    if (!o.config_path.empty())
        cfg = exp::config_from_json_text(read_file(o.config_path));
    else if (!o.preset_name.empty())
        cfg = exp::preset(o.preset_name);
    else
        throw mls::config_error("a --preset name or --config path is required");
    if (o.seed_opt && o.seed_opt->count()) cfg.base_seed = o.seed;
    if (o.repl_opt && o.repl_opt->count()) cfg.replications = o.replications;
    if (o.threads_opt && o.threads_opt->count()) cfg.threads = o.threads;
    if (o.out_opt && o.out_opt->count()) cfg.out_dir = o.out_dir;
    if (cfg.out_dir.empty()) cfg.out_dir = ".";
    if (validate) cfg.validate();
    return cfg;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw mls::error("cannot create output directory '" + dir + "': " + ec.message());
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mls::error("cannot write '" + path + "'");
    return out;
}

void cmd_presets(const std::string& dump_name) {
    if (!dump_name.empty()) {
        std::cout << exp::config_to_json_text(exp::preset(dump_name));
        return;
    }
    for (const std::string& name : exp::preset_names()) {
        exp::ExperimentConfig cfg = exp::preset(name);
        std::printf("%-22s n=%-6zu h=%-5g lambda=%-6g convention=%s\n", name.c_str(), cfg.n, cfg.h,
                    cfg.lambda, exp::convention_name(cfg.convention).c_str());
    }
}

int cmd_validate(const std::string& path) {
    if (path.empty()) throw mls::config_error("validate requires --config PATH");
    exp::ExperimentConfig cfg;
    try {
        cfg = exp::config_from_json_text(read_file(path));
    } catch (const mls::config_error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    std::vector<std::string> diags = cfg.diagnostics();
    if (!diags.empty()) {
        for (const std::string& d : diags) std::cerr << d << "\n";
        return 1;
    }
    std::cout << "configuration valid\n";
    return 0;
}

void cmd_sample(const exp::ExperimentConfig& cfg, std::uint64_t seed) {
    auto sample = mls::samplers::sample_law(cfg.law, cfg.n, seed, cfg.manifold);
    ensure_dir(cfg.out_dir);
    std::ofstream out = open_out(cfg.out_dir + "/samples.csv");
    bool torus = !sample.angles.empty();
    out << (torus ? "x,y,z,theta1,theta2\n" : "x,y,z\n");
    for (std::size_t i = 0; i < sample.points.size(); ++i) {
        const Vec3& p = sample.points[i];
        out << fmt_g17(p[0]) << "," << fmt_g17(p[1]) << "," << fmt_g17(p[2]);
        if (torus) out << "," << fmt_g17(sample.angles[i][0]) << "," << fmt_g17(sample.angles[i][1]);
        out << "\n";
    }
    std::ofstream meta = open_out(cfg.out_dir + "/samples_meta.json");
    meta << "{\n  \"law\": " << exp::law_to_json_text(cfg.law).substr(0, exp::law_to_json_text(cfg.law).size() - 1)
         << ",\n  \"n\": " << cfg.n << ",\n  \"seed\": " << seed << "\n}\n";
    std::cout << "wrote " << cfg.out_dir << "/samples.csv (" << sample.points.size() << " points)\n";
}

void write_field_csv(const std::string& path, const std::vector<double>& values) {
    std::ofstream out = open_out(path);
    out << "idx,value\n";
    for (std::size_t i = 0; i < values.size(); ++i) out << i << "," << fmt_g17(values[i]) << "\n";
}

void cmd_estimate(const exp::ExperimentConfig& cfg, std::uint64_t seed) {
    exp::Workspace ws = exp::build_workspace(cfg);
    exp::ReplicationArtifacts arts = exp::run_replication(cfg, ws, seed);
    ensure_dir(cfg.out_dir);
    mls::geometry::write_grid_csv(ws.grid, cfg.out_dir + "/grid.csv");
    mls::geometry::write_adjacency_csv(ws.grid, cfg.out_dir + "/adjacency.csv");
    write_field_csv(cfg.out_dir + "/field.csv", arts.estimate.values);
    write_field_csv(cfg.out_dir + "/truth.csv", ws.truth_field.values);
    std::ofstream meta = open_out(cfg.out_dir + "/field_meta.json");
    meta << "{\n  \"h\": " << fmt_g17(arts.bandwidth) << ",\n  \"n\": " << cfg.n << ",\n  \"seed\": " << seed
         << ",\n  \"estimator\": \"" << (cfg.corrected ? "kde-corrected" : "kde-uncorrected") << "\"\n}\n";
    std::cout << "wrote " << cfg.out_dir << "/field.csv (bandwidth " << fmt_g17(arts.bandwidth) << ")\n";
}

void write_mask_csv(const std::string& path, const mls::setops::GridSubset& subset) {
    std::ofstream out = open_out(path);
    out << "index\n";
    for (std::size_t i : subset.indices()) out << i << "\n";
}

void cmd_levelset(const exp::ExperimentConfig& cfg, std::uint64_t seed) {
    exp::Workspace ws = exp::build_workspace(cfg);
    exp::ReplicationArtifacts arts = exp::run_replication(cfg, ws, seed);
    ensure_dir(cfg.out_dir);
    write_mask_csv(cfg.out_dir + "/true_mask.csv", ws.true_mask);
    write_mask_csv(cfg.out_dir + "/est_mask.csv", arts.est_mask);
    std::cout << "true level set: " << ws.true_mask.count() << " grid points; estimated: "
              << arts.est_mask.count() << "\n";
}

void cmd_distance(const exp::ExperimentConfig& cfg, std::uint64_t seed) {
    exp::Workspace ws = exp::build_workspace(cfg);
    exp::ReplicationArtifacts arts = exp::run_replication(cfg, ws, seed);
    std::cout << "d_H,d_mu,sup_error\n"
              << fmt_g17(arts.d_H) << "," << fmt_g17(arts.d_mu) << "," << fmt_g17(arts.sup_err) << "\n";
}

void cmd_hull(exp::ExperimentConfig cfg, std::uint64_t seed, double r_override) {
    if (r_override > 0.0) cfg.hull_r = r_override;
    cfg.convention = exp::DistanceConvention::HullVsLevelset;
    cfg.validate();
    exp::Workspace ws = exp::build_workspace(cfg);
    exp::ReplicationArtifacts arts = exp::run_replication(cfg, ws, seed);
    if (!arts.hull_warning.empty()) std::cerr << "warning: " << arts.hull_warning << "\n";
    ensure_dir(cfg.out_dir);
    std::ofstream out = open_out(cfg.out_dir + "/hull.csv");
    out << "x,y,z\n";
    for (const Vec3& p : arts.hull.points())
        out << fmt_g17(p[0]) << "," << fmt_g17(p[1]) << "," << fmt_g17(p[2]) << "\n";
    std::cout << "hull keeps " << arts.hull.count() << " of " << ws.grid.size() << " grid points; d_H to true level set "
              << fmt_g17(arts.d_H) << "\n";
}

void cmd_experiment(const exp::ExperimentConfig& cfg) {
    exp::Workspace ws = exp::build_workspace(cfg);
    exp::ExperimentResult result = exp::run_experiment(cfg, ws);
    ensure_dir(cfg.out_dir);
    exp::write_results_csv(result, cfg.out_dir + "/results.csv");
    {
        std::ofstream out = open_out(cfg.out_dir + "/config.json");
        out << exp::config_to_json_text(cfg);
    }
    exp::ReplicationArtifacts arts = exp::run_replication(cfg, ws, cfg.base_seed);
    exp::emit_plot_data(cfg, ws, arts, cfg.out_dir);
    if (!arts.hull_warning.empty()) std::cerr << "warning: " << arts.hull_warning << "\n";

    for (const exp::ReplicationRow& row : result.rows)
        if (row.failed)
            std::cerr << "replication " << row.replication << " failed: " << row.message << "\n";
    std::printf("%s: replications=%zu failures=%zu\n", cfg.name.c_str(), result.rows.size(),
                result.failures);
    std::printf("d_H       mean=%.6g std=%.6g\n", result.d_H.mean, result.d_H.stddev);
    std::printf("d_mu      mean=%.6g std=%.6g\n", result.d_mu.mean, result.d_mu.stddev);
    std::printf("sup_error mean=%.6g std=%.6g\n", result.sup_err.mean, result.sup_err.stddev);
    std::printf("results in %s\n", cfg.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"level-set estimation on compact manifolds"};
    app.require_subcommand(1);

    CommonOpts sample_o, estimate_o, levelset_o, distance_o, hull_o, experiment_o;
    std::string dump_name, validate_path;
    double hull_r_override = 0.0;

    CLI::App* presets_cmd = app.add_subcommand("presets", "list shipped presets");
    presets_cmd->add_option("--dump", dump_name, "print one preset as config JSON");

    CLI::App* validate_cmd = app.add_subcommand("validate", "check a config file");
    validate_cmd->add_option("--config", validate_path, "experiment config JSON path")->envname("MLS_CONFIG");

    CLI::App* sample_cmd = app.add_subcommand("sample", "draw a sample and write CSV");
    attach_common(sample_cmd, sample_o, false);
    CLI::App* estimate_cmd = app.add_subcommand("estimate", "evaluate the density estimate on the grid");
    attach_common(estimate_cmd, estimate_o, false);
    CLI::App* levelset_cmd = app.add_subcommand("levelset", "extract true and estimated level-set masks");
    attach_common(levelset_cmd, levelset_o, false);
    CLI::App* distance_cmd = app.add_subcommand("distance", "distances for a single replication");
    attach_common(distance_cmd, distance_o, false);
    CLI::App* hull_cmd = app.add_subcommand("hull", "geodesic r-convex hull of the filtered sample");
    attach_common(hull_cmd, hull_o, false);
    hull_cmd->add_option("--r", hull_r_override, "hull radius override");
    CLI::App* experiment_cmd = app.add_subcommand("experiment", "run all replications and emit artifacts");
    attach_common(experiment_cmd, experiment_o, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (presets_cmd->parsed()) {
            cmd_presets(dump_name);
        } else if (validate_cmd->parsed()) {
            return cmd_validate(validate_path);
        } else if (sample_cmd->parsed()) {
            exp::ExperimentConfig cfg = resolve_config(sample_o);
            cmd_sample(cfg, sample_o.seed_opt->count() ? sample_o.seed : cfg.base_seed);
        } else if (estimate_cmd->parsed()) {
            exp::ExperimentConfig cfg = resolve_config(estimate_o);
            cmd_estimate(cfg, cfg.base_seed);
        } else if (levelset_cmd->parsed()) {
            exp::ExperimentConfig cfg = resolve_config(levelset_o);
            cmd_levelset(cfg, cfg.base_seed);
        } else if (distance_cmd->parsed()) {
            exp::ExperimentConfig cfg = resolve_config(distance_o);
            cmd_distance(cfg, cfg.base_seed);
        } else if (hull_cmd->parsed()) {
            exp::ExperimentConfig cfg = resolve_config(hull_o, false);
            cmd_hull(cfg, cfg.base_seed, hull_r_override);
        } else if (experiment_cmd->parsed()) {
            exp::ExperimentConfig cfg = resolve_config(experiment_o);
            cmd_experiment(cfg);
        }
    } catch (const mls::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
