#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "mls/experiment.hpp"

namespace py = pybind11;
namespace mex = mls::experiment;

namespace {

mex::ExperimentConfig parse(const std::string& config_json) {
    mex::ExperimentConfig cfg = mex::config_from_json_text(config_json);
    cfg.validate();
    return cfg;
}

py::dict row_dict(const mex::ReplicationRow& row) {
    py::dict d;
    d["replication"] = row.replication;
    d["seed"] = row.seed;
    d["d_H"] = row.d_H;
    d["d_mu"] = row.d_mu;
    d["sup_error"] = row.sup_err;
    d["seconds"] = row.seconds;
    d["failed"] = row.failed;
    if (row.failed) d["message"] = row.message;
    return d;
}

py::dict aggregate_dict(const mex::Aggregate& a) {
    py::dict d;
    d["mean"] = a.mean;
    d["std"] = a.stddev;
    return d;
}

py::list points_list(const std::vector<mls::Vec3>& pts) {
    py::list out;
    for (const mls::Vec3& p : pts) out.append(py::make_tuple(p[0], p[1], p[2]));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "level-set estimation on compact manifolds";

    m.def("version", [] { return std::string("1.0.0"); });

    m.def("preset_names", [] { return mex::preset_names(); });
    m.def("preset_json", [](const std::string& name) { return mex::config_to_json_text(mex::preset(name)); },
          py::arg("name"));
    m.def(
        "validate_config",
        [](const std::string& config_json) {
            try {
                return mex::config_from_json_text(config_json).diagnostics();
            } catch (const mls::config_error& e) {
                return std::vector<std::string>{e.what()};
            }
        },
        py::arg("config_json"), "list of invariant violations; empty when valid");

    m.def(
        "sample",
        [](const std::string& config_json, std::optional<std::uint64_t> seed) {
            mex::ExperimentConfig cfg = parse(config_json);
            auto s = mls::samplers::sample_law(cfg.law, cfg.n, seed.value_or(cfg.base_seed), cfg.manifold);
            return points_list(s.points);
        },
        py::arg("config_json"), py::arg("seed") = std::nullopt);

    m.def(
        "run_replication",
        [](const std::string& config_json, std::optional<std::uint64_t> seed) {
            mex::ExperimentConfig cfg = parse(config_json);
            mex::Workspace ws = mex::build_workspace(cfg);
            mex::ReplicationArtifacts arts = mex::run_replication(cfg, ws, seed.value_or(cfg.base_seed));
            py::dict d;
            d["d_H"] = arts.d_H;
            d["d_mu"] = arts.d_mu;
            d["sup_error"] = arts.sup_err;
            d["bandwidth"] = arts.bandwidth;
            d["true_count"] = ws.true_mask.count();
            d["est_count"] = arts.est_mask.count();
            if (!arts.hull_warning.empty()) d["hull_warning"] = arts.hull_warning;
            return d;
        },
        py::arg("config_json"), py::arg("seed") = std::nullopt);

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            mex::ExperimentConfig cfg = parse(config_json);
            mex::ExperimentResult res = mex::run_experiment(cfg);
            py::dict d;
            d["name"] = cfg.name;
            py::list rows;
            for (const mex::ReplicationRow& row : res.rows) rows.append(row_dict(row));
            d["rows"] = rows;
            d["d_H"] = aggregate_dict(res.d_H);
            d["d_mu"] = aggregate_dict(res.d_mu);
            d["sup_error"] = aggregate_dict(res.sup_err);
            d["failures"] = res.failures;
            return d;
        },
        py::arg("config_json"));

    m.def(
        "vmf_density",
        [](const mls::Vec3& x, const mls::Vec3& mu, double kappa) {
            return mls::truth::vmf_density(x, mu, kappa);
        },
        py::arg("x"), py::arg("mu"), py::arg("kappa"));
    m.def("mvm_normalizer",
          [](const std::array<double, 2>& kappa, double delta12) {
              return mls::truth::mvm_normalizer(kappa, delta12);
          },
          py::arg("kappa"), py::arg("delta12"));
    m.def(
        "mvm_density",
        [](const std::array<double, 2>& theta, const std::array<double, 2>& mu,
           const std::array<double, 2>& kappa, double delta12) {
            double Z = mls::truth::mvm_normalizer(kappa, delta12);
            return mls::truth::mvm_density(theta, mu, kappa, delta12, Z);
        },
        py::arg("theta"), py::arg("mu"), py::arg("kappa"), py::arg("delta12"));
    m.def(
        "wishart_density",
        [](const std::array<double, 3>& s, const std::array<double, 3>& sigma, int dof) {
            return mls::truth::wishart_density({s[0], s[1], s[2]}, {sigma[0], sigma[1], sigma[2]}, dof);
        },
        py::arg("s"), py::arg("sigma"), py::arg("dof"));
    m.def("kernel_m0", &mls::density::m0, py::arg("boundary_dist"), py::arg("h"));

    py::register_exception<mls::config_error>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<mls::domain_error>(m, "DomainError", PyExc_ValueError);
}
