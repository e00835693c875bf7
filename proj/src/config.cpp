#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "mls/experiment.hpp"

namespace mls::experiment {

using geometry::ManifoldKind;
using geometry::SphereGridKind;
using nlohmann::json;
using truth::LawKind;
using truth::TargetLaw;

std::string convention_name(DistanceConvention c) {
    switch (c) {
        case DistanceConvention::Regions: return "regions";
        case DistanceConvention::Boundaries: return "boundaries";
        case DistanceConvention::HullVsLevelset: return "hull-vs-levelset";
    }
    throw domain_error("unknown distance convention");
}

DistanceConvention convention_from_name(const std::string& name) {
    if (name == "regions") return DistanceConvention::Regions;
    if (name == "boundaries") return DistanceConvention::Boundaries;
    if (name == "hull-vs-levelset") return DistanceConvention::HullVsLevelset;
    throw config_error("convention: unknown value '" + name + "'");
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& path) {
    if (!j.is_object()) throw config_error(path + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw config_error(path + ": unknown key '" + it.key() + "'");
}

double get_num(const json& j, const std::string& path) {
    if (!j.is_number()) throw config_error(path + ": expected a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw config_error(path + ": expected an integer");
    return j.get<int>();
}

std::vector<double> get_array(const json& j, std::size_t len, const std::string& path) {
    if (!j.is_array() || j.size() != len)
        throw config_error(path + ": expected an array of " + std::to_string(len) + " numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < len; ++i) out.push_back(get_num(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

geometry::ManifoldSpec parse_manifold(const json& j, const std::string& path) {
    check_keys(j, {"kind", "torus_R", "torus_r", "cap_angle"}, path);
    geometry::ManifoldSpec spec;
    if (!j.contains("kind")) throw config_error(path + ".kind: required");
    spec.kind = geometry::kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("torus_R")) spec.torus_R = get_num(j.at("torus_R"), path + ".torus_R");
    if (j.contains("torus_r")) spec.torus_r = get_num(j.at("torus_r"), path + ".torus_r");
    if (j.contains("cap_angle")) spec.cap_angle = get_num(j.at("cap_angle"), path + ".cap_angle");
    return spec;
}

geometry::GridOptions parse_grid(const json& j, const std::string& path) {
    check_keys(j,
               {"res_u", "res_v", "sphere_kind", "fibonacci_n", "spd_ac_min", "spd_ac_max", "spd_b_min",
                "spd_b_max", "spd_ac_count", "spd_b_count"},
               path);
    geometry::GridOptions g;
    if (j.contains("res_u")) g.res_u = get_int(j.at("res_u"), path + ".res_u");
    if (j.contains("res_v")) g.res_v = get_int(j.at("res_v"), path + ".res_v");
    if (j.contains("sphere_kind")) {
        std::string k = j.at("sphere_kind").get<std::string>();
        if (k == "latlong")
            g.sphere_kind = SphereGridKind::LatLong;
        else if (k == "fibonacci")
            g.sphere_kind = SphereGridKind::Fibonacci;
        else
            throw config_error(path + ".sphere_kind: unknown value '" + k + "'");
    }
    if (j.contains("fibonacci_n")) g.fibonacci_n = get_int(j.at("fibonacci_n"), path + ".fibonacci_n");
    if (j.contains("spd_ac_min")) g.spd_ac_min = get_num(j.at("spd_ac_min"), path + ".spd_ac_min");
    if (j.contains("spd_ac_max")) g.spd_ac_max = get_num(j.at("spd_ac_max"), path + ".spd_ac_max");
    if (j.contains("spd_b_min")) g.spd_b_min = get_num(j.at("spd_b_min"), path + ".spd_b_min");
    if (j.contains("spd_b_max")) g.spd_b_max = get_num(j.at("spd_b_max"), path + ".spd_b_max");
    if (j.contains("spd_ac_count")) g.spd_ac_count = get_int(j.at("spd_ac_count"), path + ".spd_ac_count");
    if (j.contains("spd_b_count")) g.spd_b_count = get_int(j.at("spd_b_count"), path + ".spd_b_count");
    return g;
}

TargetLaw parse_law(const json& j, const std::string& path) {
    check_keys(j, {"kind", "sigma", "dof", "mu", "kappa", "delta12", "weights", "components"}, path);
    TargetLaw law;
    if (!j.contains("kind")) throw config_error(path + ".kind: required");
    law.kind = truth::law_kind_from_name(j.at("kind").get<std::string>());
    switch (law.kind) {
        case LawKind::Wishart2: {
            if (j.contains("sigma")) {
                auto s = get_array(j.at("sigma"), 3, path + ".sigma");
                law.sigma = {s[0], s[1], s[2]};
            }
            if (j.contains("dof")) law.dof = get_int(j.at("dof"), path + ".dof");
            break;
        }
        case LawKind::MultivariateVonMises: {
            if (j.contains("mu")) {
                auto m = get_array(j.at("mu"), 2, path + ".mu");
                law.mvm_mu = {m[0], m[1]};
            }
            if (j.contains("kappa")) {
                auto k = get_array(j.at("kappa"), 2, path + ".kappa");
                law.mvm_kappa = {k[0], k[1]};
            }
            if (j.contains("delta12")) law.mvm_delta12 = get_num(j.at("delta12"), path + ".delta12");
            break;
        }
        case LawKind::VonMisesFisher: {
            if (j.contains("mu")) {
                auto m = get_array(j.at("mu"), 3, path + ".mu");
                law.vmf_mu = {m[0], m[1], m[2]};
            }
            if (j.contains("kappa")) law.vmf_kappa = get_num(j.at("kappa"), path + ".kappa");
            break;
        }
        case LawKind::Mixture: {
            if (!j.contains("weights") || !j.contains("components"))
                throw config_error(path + ": mixture requires 'weights' and 'components'");
            const json& w = j.at("weights");
            if (!w.is_array()) throw config_error(path + ".weights: expected an array");
            for (std::size_t i = 0; i < w.size(); ++i)
                law.weights.push_back(get_num(w[i], path + ".weights[" + std::to_string(i) + "]"));
            const json& comps = j.at("components");
            if (!comps.is_array()) throw config_error(path + ".components: expected an array");
            for (std::size_t i = 0; i < comps.size(); ++i)
                law.components.push_back(parse_law(comps[i], path + ".components[" + std::to_string(i) + "]"));
            break;
        }
    }
    return law;
}

json law_to_json(const TargetLaw& law) {
    json j;
    j["kind"] = truth::law_kind_name(law.kind);
    switch (law.kind) {
        case LawKind::Wishart2:
            j["sigma"] = {law.sigma.a, law.sigma.b, law.sigma.c};
            j["dof"] = law.dof;
            break;
        case LawKind::MultivariateVonMises:
            j["mu"] = {law.mvm_mu[0], law.mvm_mu[1]};
            j["kappa"] = {law.mvm_kappa[0], law.mvm_kappa[1]};
            j["delta12"] = law.mvm_delta12;
            break;
        case LawKind::VonMisesFisher:
            j["mu"] = {law.vmf_mu[0], law.vmf_mu[1], law.vmf_mu[2]};
            j["kappa"] = law.vmf_kappa;
            break;
        case LawKind::Mixture: {
            j["weights"] = law.weights;
            json comps = json::array();
            for (const TargetLaw& c : law.components) comps.push_back(law_to_json(c));
            j["components"] = comps;
            break;
        }
    }
    return j;
}

bool law_matches_manifold(const TargetLaw& law, ManifoldKind kind) {
    LawKind k = law.kind == LawKind::Mixture && !law.components.empty() ? law.components[0].kind : law.kind;
    switch (k) {
        case LawKind::Wishart2: return kind == ManifoldKind::SpdCone2;
        case LawKind::MultivariateVonMises: return kind == ManifoldKind::EmbeddedTorus;
        case LawKind::VonMisesFisher:
            return kind == ManifoldKind::Sphere || kind == ManifoldKind::Hemisphere;
        case LawKind::Mixture: return false;
    }
    return false;
}

}  // namespace

std::vector<std::string> ExperimentConfig::diagnostics() const {
    std::vector<std::string> out;
    try {
        manifold.check();
    } catch (const mls::error& e) {
        out.push_back(std::string("manifold: ") + e.what());
    }
    try {
        law.validate();
    } catch (const mls::error& e) {
        out.push_back(e.what());
    }
    if (out.empty() && !law_matches_manifold(law, manifold.kind))
        out.push_back("law.kind: law does not live on manifold '" + geometry::kind_name(manifold.kind) + "'");
    if (n < 1) out.push_back("n: must be at least 1");
    if (h < 0.0) out.push_back("h: must be nonnegative (0 selects the default bandwidth)");
    if (!(lambda > 0.0)) out.push_back("lambda: must be positive");
    if (hull_r < 0.0) out.push_back("hull_r: must be nonnegative");
    if (convention == DistanceConvention::HullVsLevelset && !(hull_r > 0.0))
        out.push_back("hull_r: the hull-vs-levelset convention requires a positive hull radius");
    if (replications < 1) out.push_back("replications: must be at least 1");
    if (threads < 1) out.push_back("threads: must be at least 1");
    if (projection.enabled && manifold.kind != ManifoldKind::Sphere &&
        manifold.kind != ManifoldKind::Hemisphere)
        out.push_back("projection.enabled: stereographic projection applies to sphere manifolds only");
    if (projection.enabled && norm(projection.pole) == 0.0)
        out.push_back("projection.pole: must be a nonzero direction");
    if (manifold.kind == ManifoldKind::SpdCone2) {
        if (grid.spd_ac_count < 8 || grid.spd_b_count < 8)
            out.push_back("grid.spd_ac_count/spd_b_count: resolution of at least 8 per axis required");
        if (!(grid.spd_ac_min > 0.0) || !(grid.spd_ac_max > grid.spd_ac_min) ||
            !(grid.spd_b_max > grid.spd_b_min))
            out.push_back("grid: invalid SPD bounding box");
    } else if (manifold.kind == ManifoldKind::Sphere && grid.sphere_kind == SphereGridKind::Fibonacci) {
        if (grid.fibonacci_n < 64) out.push_back("grid.fibonacci_n: at least 64 points required");
    } else {
        if (grid.res_u < 8 || grid.res_v < 8)
            out.push_back("grid.res_u/res_v: resolution of at least 8 per angle required");
    }
    return out;
}

void ExperimentConfig::validate() const {
    std::vector<std::string> d = diagnostics();
    if (d.empty()) return;
    std::string msg = "invalid configuration:";
    for (const std::string& line : d) msg += "\n  - " + line;
    throw config_error(msg);
}

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j,
               {"name", "manifold", "grid", "law", "n", "h", "lambda", "hull_r", "replications",
                "base_seed", "convention", "projection", "corrected", "threads", "out_dir"},
               "config");
    ExperimentConfig cfg;
    if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
    if (!j.contains("manifold")) throw config_error("manifold: required");
    cfg.manifold = parse_manifold(j.at("manifold"), "manifold");
    if (j.contains("grid")) cfg.grid = parse_grid(j.at("grid"), "grid");
    if (!j.contains("law")) throw config_error("law: required");
    cfg.law = parse_law(j.at("law"), "law");
    if (j.contains("n")) {
        if (!j.at("n").is_number_integer() || j.at("n").get<long long>() < 0)
            throw config_error("n: expected a nonnegative integer");
        cfg.n = j.at("n").get<std::size_t>();
    }
    if (j.contains("h")) cfg.h = get_num(j.at("h"), "h");
    if (j.contains("lambda")) cfg.lambda = get_num(j.at("lambda"), "lambda");
    if (j.contains("hull_r")) cfg.hull_r = get_num(j.at("hull_r"), "hull_r");
    if (j.contains("replications")) cfg.replications = get_int(j.at("replications"), "replications");
    if (j.contains("base_seed")) {
        if (!j.at("base_seed").is_number_integer())
            throw config_error("base_seed: expected an integer");
        cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
    }
    if (j.contains("convention")) cfg.convention = convention_from_name(j.at("convention").get<std::string>());
    if (j.contains("projection")) {
        const json& p = j.at("projection");
        check_keys(p, {"enabled", "pole"}, "projection");
        if (p.contains("enabled")) {
            if (!p.at("enabled").is_boolean()) throw config_error("projection.enabled: expected a boolean");
            cfg.projection.enabled = p.at("enabled").get<bool>();
        }
        if (p.contains("pole")) {
            auto v = get_array(p.at("pole"), 3, "projection.pole");
            cfg.projection.pole = {v[0], v[1], v[2]};
        }
    }
    if (j.contains("corrected")) {
        if (!j.at("corrected").is_boolean()) throw config_error("corrected: expected a boolean");
        cfg.corrected = j.at("corrected").get<bool>();
    }
    if (j.contains("threads")) cfg.threads = get_int(j.at("threads"), "threads");
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    return cfg;
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    json m;
    m["kind"] = geometry::kind_name(cfg.manifold.kind);
    if (cfg.manifold.kind == ManifoldKind::EmbeddedTorus) {
        m["torus_R"] = cfg.manifold.torus_R;
        m["torus_r"] = cfg.manifold.torus_r;
    }
    if (cfg.manifold.kind == ManifoldKind::Hemisphere) m["cap_angle"] = cfg.manifold.cap_angle;
    j["manifold"] = m;
    json g;
    if (cfg.manifold.kind == ManifoldKind::SpdCone2) {
        g["spd_ac_min"] = cfg.grid.spd_ac_min;
        g["spd_ac_max"] = cfg.grid.spd_ac_max;
        g["spd_b_min"] = cfg.grid.spd_b_min;
        g["spd_b_max"] = cfg.grid.spd_b_max;
        g["spd_ac_count"] = cfg.grid.spd_ac_count;
        g["spd_b_count"] = cfg.grid.spd_b_count;
    } else if (cfg.manifold.kind == ManifoldKind::Sphere &&
               cfg.grid.sphere_kind == SphereGridKind::Fibonacci) {
        g["sphere_kind"] = "fibonacci";
        g["fibonacci_n"] = cfg.grid.fibonacci_n;
    } else {
        if (cfg.manifold.kind == ManifoldKind::Sphere) g["sphere_kind"] = "latlong";
        g["res_u"] = cfg.grid.res_u;
        g["res_v"] = cfg.grid.res_v;
    }
    j["grid"] = g;
    j["law"] = law_to_json(cfg.law);
    j["n"] = cfg.n;
    j["h"] = cfg.h;
    j["lambda"] = cfg.lambda;
    j["hull_r"] = cfg.hull_r;
    j["replications"] = cfg.replications;
    j["base_seed"] = cfg.base_seed;
    j["convention"] = convention_name(cfg.convention);
    if (cfg.projection.enabled) {
        j["projection"] = {{"enabled", true},
                           {"pole", {cfg.projection.pole[0], cfg.projection.pole[1], cfg.projection.pole[2]}}};
    }
    j["corrected"] = cfg.corrected;
    j["threads"] = cfg.threads;
    if (!cfg.out_dir.empty()) j["out_dir"] = cfg.out_dir;
    return j.dump(2) + "\n";
}

namespace {

ExperimentConfig wishart_base() {
    ExperimentConfig cfg;
    cfg.manifold.kind = ManifoldKind::SpdCone2;
    cfg.law.kind = LawKind::Wishart2;
    cfg.law.sigma = {0.135, 0.0, 0.135};
    cfg.law.dof = 10;
    cfg.convention = DistanceConvention::Regions;
    return cfg;
}

TargetLaw mvm_component(double mu2) {
    TargetLaw c;
    c.kind = LawKind::MultivariateVonMises;
    c.mvm_mu = {kPi / 2, mu2};
    c.mvm_kappa = {20.0, 20.0};
    c.mvm_delta12 = 1.0;
    return c;
}

ExperimentConfig torus_base() {
    ExperimentConfig cfg;
    cfg.manifold.kind = ManifoldKind::EmbeddedTorus;
    cfg.manifold.torus_R = 1.0;
    cfg.manifold.torus_r = 0.5;
    cfg.grid.res_u = 128;
    cfg.grid.res_v = 128;
    cfg.n = 2000;
    cfg.h = 0.2;
    cfg.lambda = 0.8;
    cfg.convention = DistanceConvention::Boundaries;
    return cfg;
}

TargetLaw vmf_component(double mu2) {
    TargetLaw c;
    c.kind = LawKind::VonMisesFisher;
    c.vmf_mu = normalized(Vec3{-1.0, mu2, 0.0});
    c.vmf_kappa = 40.0;
    return c;
}

}  // namespace

std::string law_to_json_text(const truth::TargetLaw& law) { return law_to_json(law).dump(2) + "\n"; }

std::vector<std::string> preset_names() {
    return {"wishart-table1-1000", "wishart-table1-5000", "wishart-table1-10000", "wishart-table1-20000",
            "wishart-figure",      "wishart-caption",     "torus-unimodal",       "torus-mixture",
            "sphere-mixture"};
}

ExperimentConfig preset(const std::string& name) {
    if (name == "wishart-table1-1000") {
        ExperimentConfig cfg = wishart_base();
        cfg.name = name;
        cfg.n = 1000;
        cfg.h = 0.20;
        cfg.lambda = 0.038;
        return cfg;
    }
    if (name == "wishart-table1-5000") {
        ExperimentConfig cfg = wishart_base();
        cfg.name = name;
        cfg.n = 5000;
        cfg.h = 0.15;
        cfg.lambda = 0.024;
        return cfg;
    }
    if (name == "wishart-table1-10000") {
        ExperimentConfig cfg = wishart_base();
        cfg.name = name;
        cfg.n = 10000;
        cfg.h = 0.10;
        cfg.lambda = 0.05;
        return cfg;
    }
    if (name == "wishart-table1-20000") {
        ExperimentConfig cfg = wishart_base();
        cfg.name = name;
        cfg.n = 20000;
        cfg.h = 0.05;
        cfg.lambda = 0.41;
        return cfg;
    }
    if (name == "wishart-figure") {
        // level-set hull measured against the true region
        ExperimentConfig cfg = wishart_base();
        cfg.name = name;
        cfg.law.sigma = {0.25, 0.0, 0.25};
        cfg.n = 10000;
        cfg.h = 0.1;
        cfg.lambda = 0.06;
        cfg.hull_r = 1.0;
        cfg.convention = DistanceConvention::HullVsLevelset;
        return cfg;
    }
    if (name == "wishart-caption") {
        // the level exceeds the density maximum, so the true level set is
        // empty and every replication reports a failure
        ExperimentConfig cfg = wishart_base();
        cfg.name = name;
        cfg.law.sigma = {0.5, 0.0, 0.5};
        cfg.n = 10000;
        cfg.h = 0.3;
        cfg.lambda = 0.5;
        return cfg;
    }
    if (name == "torus-unimodal") {
        ExperimentConfig cfg = torus_base();
        cfg.name = name;
        cfg.law = mvm_component(0.0);
        return cfg;
    }
    if (name == "torus-mixture") {
        ExperimentConfig cfg = torus_base();
        cfg.name = name;
        cfg.law.kind = LawKind::Mixture;
        cfg.law.weights = {0.4, 0.6};
        cfg.law.components = {mvm_component(0.0), mvm_component(kPi / 4)};
        return cfg;
    }
    if (name == "sphere-mixture") {
        ExperimentConfig cfg;
        cfg.name = name;
        cfg.manifold.kind = ManifoldKind::Sphere;
        cfg.grid.sphere_kind = SphereGridKind::Fibonacci;
        cfg.grid.fibonacci_n = 16000;
        cfg.law.kind = LawKind::Mixture;
        cfg.law.weights = {0.5, 0.5};
        cfg.law.components = {vmf_component(-0.25), vmf_component(0.25)};
        cfg.n = 500;
        cfg.h = 0.15;
        cfg.lambda = 1.0;
        cfg.convention = DistanceConvention::Boundaries;
        cfg.projection.enabled = true;
        cfg.projection.pole = {1.0, 0.0, 0.0};
        return cfg;
    }
    throw config_error("unknown preset '" + name + "'");
}

}  // namespace mls::experiment
