#include "sns/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sns {

using nlohmann::json;

namespace {

struct Collector {
    std::vector<std::string>* errors;

    void fail(const std::string& where, const std::string& what) {
        errors->push_back(where + ": " + what);
    }

    void unknown_keys(const json& obj, const std::string& where,
                      const std::set<std::string>& allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (!allowed.count(it.key())) fail(where + "." + it.key(), "unknown key");
    }

    template <typename T>
    void number(const json& obj, const std::string& where, const char* key, T& out) {
        if (!obj.contains(key)) return;
        const json& v = obj.at(key);
        if (!v.is_number()) {
            fail(where + "." + key, "expected a number");
            return;
        }
        out = v.get<T>();
    }

    void integer(const json& obj, const std::string& where, const char* key, int& out) {
        if (!obj.contains(key)) return;
        const json& v = obj.at(key);
        if (!v.is_number_integer()) {
            fail(where + "." + key, "expected an integer");
            return;
        }
        out = v.get<int>();
    }

    void uint64(const json& obj, const std::string& where, const char* key, std::uint64_t& out) {
        if (!obj.contains(key)) return;
        const json& v = obj.at(key);
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
            fail(where + "." + key, "must be >= 0");
            return;
        }
        if (!v.is_number_unsigned() && !v.is_number_integer()) {
            fail(where + "." + key, "expected an unsigned integer");
            return;
        }
        out = v.get<std::uint64_t>();
    }

    void boolean(const json& obj, const std::string& where, const char* key, bool& out) {
        if (!obj.contains(key)) return;
        const json& v = obj.at(key);
        if (!v.is_boolean()) {
            fail(where + "." + key, "expected a boolean");
            return;
        }
        out = v.get<bool>();
    }

    void text(const json& obj, const std::string& where, const char* key, std::string& out) {
        if (!obj.contains(key)) return;
        const json& v = obj.at(key);
        if (!v.is_string()) {
            fail(where + "." + key, "expected a string");
            return;
        }
        out = v.get<std::string>();
    }

    /// Number or the string "inf".
    void extended_number(const json& v, const std::string& where, double& out) {
        if (v.is_string() && v.get<std::string>() == "inf") {
            out = std::numeric_limits<double>::infinity();
            return;
        }
        if (!v.is_number()) {
            fail(where, "expected a number or \"inf\"");
            return;
        }
        out = v.get<double>();
    }
};

}  // namespace

NoiseModel RunConfig::make_noise_model() const {
    return build_noise_model(grid(), noise_amplitude, noise_exponent, noise_kind,
                             noise_sigma, noise_modulation, noise_modulation_constant);
}

StudyConfig RunConfig::make_study_config() const {
    StudyConfig s;
    s.grid = grid();
    s.viscosity = viscosity;
    s.horizon = horizon;
    s.noise = make_noise_model();
    s.init = init;
    s.scheme_kind = scheme_kind;
    s.ladder = ladder;
    s.reference_n = reference_n;
    s.mc_samples = mc_samples;
    s.base_seed = base_seed;
    s.solver_tol = solver_tol;
    s.solver_max_iter = solver_max_iter;
    s.inner_substeps = inner_substeps;
    s.workers = workers;
    return s;
}

AnalysisParams RunConfig::make_analysis_params() const {
    AnalysisParams a;
    a.viscosity = viscosity;
    a.horizon = horizon;
    a.q_moment = q_moment;
    a.beta = beta;
    a.eps_bar = eps_bar;
    a.eta = eta;
    a.holder_p = holder_p;
    a.unspecified_splitting_const = unspecified_splitting_const;
    a.unspecified_euler_const = unspecified_euler_const;

    const NoiseModel model = make_noise_model();
    a.k0 = k0.value_or(model.k0);
    a.k1 = k1.value_or(model.k1);
    a.l1 = l1.value_or(model.l1);
    a.c_bar = c_bar.value_or(estimate_gn_constant(grid(), gn_samples, gn_seed));
    const double ratio = box_length / (2.0 * 3.14159265358979323846);
    a.c_tilde = c_tilde.value_or(ratio * ratio);
    return a;
}

ValidationResult validate_config(const std::string& text) {
    ValidationResult result;
    Collector c{&result.errors};
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        c.fail("config", std::string("not valid JSON: ") + e.what());
        return result;
    }
    if (!root.is_object()) {
        c.fail("config", "top level must be an object");
        return result;
    }
    RunConfig& cfg = result.config;

    c.unknown_keys(root, "config",
                   {"command", "output_dir", "workers", "grid", "physics", "noise", "scheme",
                    "initial_condition", "study", "analysis", "moments", "single_run"});

    std::string command_str = "constants";
    c.text(root, "config", "command", command_str);
    if (command_str == "convergence") cfg.command = Command::convergence;
    else if (command_str == "constants") cfg.command = Command::constants;
    else if (command_str == "diagnostics") cfg.command = Command::diagnostics;
    else if (command_str == "single_run") cfg.command = Command::single_run;
    else c.fail("config.command", "must be one of convergence|constants|diagnostics|single_run");

    c.text(root, "config", "output_dir", cfg.output_dir);
    c.integer(root, "config", "workers", cfg.workers);
    if (cfg.workers < 1) c.fail("config.workers", "must be >= 1");

    if (root.contains("grid")) {
        const json& g = root["grid"];
        if (!g.is_object()) {
            c.fail("config.grid", "expected an object");
        } else {
            c.unknown_keys(g, "config.grid", {"n_modes", "box_length"});
            c.integer(g, "config.grid", "n_modes", cfg.n_modes);
            c.number(g, "config.grid", "box_length", cfg.box_length);
        }
    }
    if (cfg.n_modes < 4) c.fail("config.grid.n_modes", "must be >= 4");
    else if (cfg.n_modes % 2 != 0) c.fail("config.grid.n_modes", "must be even");
    if (!(cfg.box_length > 0.0)) c.fail("config.grid.box_length", "must be positive");

    if (root.contains("physics")) {
        const json& p = root["physics"];
        if (!p.is_object()) {
            c.fail("config.physics", "expected an object");
        } else {
            c.unknown_keys(p, "config.physics", {"viscosity", "horizon"});
            c.number(p, "config.physics", "viscosity", cfg.viscosity);
            c.number(p, "config.physics", "horizon", cfg.horizon);
        }
    }
    if (!(cfg.viscosity > 0.0)) c.fail("config.physics.viscosity", "must be positive");
    if (!(cfg.horizon > 0.0)) c.fail("config.physics.horizon", "must be positive");

    if (root.contains("noise")) {
        const json& nz = root["noise"];
        if (!nz.is_object()) {
            c.fail("config.noise", "expected an object");
        } else {
            c.unknown_keys(nz, "config.noise",
                           {"kind", "amplitude", "exponent", "sigma", "modulation",
                            "modulation_constant"});
            std::string kind = "additive";
            c.text(nz, "config.noise", "kind", kind);
            if (kind == "additive") cfg.noise_kind = GKind::additive;
            else if (kind == "scalar_multiplicative") cfg.noise_kind = GKind::scalar_multiplicative;
            else c.fail("config.noise.kind", "must be additive|scalar_multiplicative");
            c.number(nz, "config.noise", "amplitude", cfg.noise_amplitude);
            c.number(nz, "config.noise", "exponent", cfg.noise_exponent);
            c.number(nz, "config.noise", "sigma", cfg.noise_sigma);
            std::string mod = "sin";
            c.text(nz, "config.noise", "modulation", mod);
            if (mod == "sin") cfg.noise_modulation = Modulation::sine;
            else if (mod == "tanh") cfg.noise_modulation = Modulation::tanh_sat;
            else if (mod == "constant") cfg.noise_modulation = Modulation::constant;
            else c.fail("config.noise.modulation", "must be sin|tanh|constant");
            c.number(nz, "config.noise", "modulation_constant", cfg.noise_modulation_constant);
        }
    }
    if (cfg.noise_amplitude < 0.0) c.fail("config.noise.amplitude", "must be >= 0");
    if (cfg.noise_exponent < 0.0) c.fail("config.noise.exponent", "must be >= 0");
    if (cfg.noise_sigma < 0.0) c.fail("config.noise.sigma", "must be >= 0");

    if (root.contains("scheme")) {
        const json& s = root["scheme"];
        if (!s.is_object()) {
            c.fail("config.scheme", "expected an object");
        } else {
            c.unknown_keys(s, "config.scheme",
                           {"kind", "n_steps", "solver_tol", "solver_max_iter", "inner_substeps"});
            std::string kind = "fully_implicit";
            c.text(s, "config.scheme", "kind", kind);
            if (kind == "splitting") cfg.scheme_kind = SchemeKind::splitting;
            else if (kind == "fully_implicit") cfg.scheme_kind = SchemeKind::fully_implicit;
            else if (kind == "semi_implicit") cfg.scheme_kind = SchemeKind::semi_implicit;
            else c.fail("config.scheme.kind", "must be splitting|fully_implicit|semi_implicit");
            c.integer(s, "config.scheme", "n_steps", cfg.n_steps);
            c.number(s, "config.scheme", "solver_tol", cfg.solver_tol);
            c.integer(s, "config.scheme", "solver_max_iter", cfg.solver_max_iter);
            c.integer(s, "config.scheme", "inner_substeps", cfg.inner_substeps);
        }
    }
    if (cfg.n_steps < 1) c.fail("config.scheme.n_steps", "must be >= 1");
    if (!(cfg.solver_tol > 0.0)) c.fail("config.scheme.solver_tol", "must be positive");
    if (cfg.solver_max_iter < 1) c.fail("config.scheme.solver_max_iter", "must be >= 1");
    if (cfg.inner_substeps < 1) c.fail("config.scheme.inner_substeps", "must be >= 1");

    if (root.contains("initial_condition")) {
        const json& ic = root["initial_condition"];
        if (!ic.is_object()) {
            c.fail("config.initial_condition", "expected an object");
        } else {
            c.unknown_keys(ic, "config.initial_condition", {"kind", "amplitude", "decay", "seed"});
            std::string kind = "zero";
            c.text(ic, "config.initial_condition", "kind", kind);
            if (kind == "zero") cfg.init.kind = InitSpec::Kind::zero;
            else if (kind == "taylor_green") cfg.init.kind = InitSpec::Kind::taylor_green;
            else if (kind == "random_smooth") cfg.init.kind = InitSpec::Kind::random_smooth;
            else c.fail("config.initial_condition.kind", "must be zero|taylor_green|random_smooth");
            c.number(ic, "config.initial_condition", "amplitude", cfg.init.amplitude);
            c.number(ic, "config.initial_condition", "decay", cfg.init.decay);
            c.uint64(ic, "config.initial_condition", "seed", cfg.init.seed);
        }
    }
    if (cfg.init.decay < 0.0) c.fail("config.initial_condition.decay", "must be >= 0");

    if (root.contains("study")) {
        const json& st = root["study"];
        if (!st.is_object()) {
            c.fail("config.study", "expected an object");
        } else {
            c.unknown_keys(st, "config.study",
                           {"ladder", "reference_n", "mc_samples", "base_seed"});
            if (st.contains("ladder")) {
                if (!st["ladder"].is_array()) {
                    c.fail("config.study.ladder", "expected an array of integers");
                } else {
                    cfg.ladder.clear();
                    for (const auto& v : st["ladder"]) {
                        if (!v.is_number_integer()) {
                            c.fail("config.study.ladder", "entries must be integers");
                            break;
                        }
                        cfg.ladder.push_back(v.get<int>());
                    }
                }
            }
            c.integer(st, "config.study", "reference_n", cfg.reference_n);
            c.integer(st, "config.study", "mc_samples", cfg.mc_samples);
            c.uint64(st, "config.study", "base_seed", cfg.base_seed);
        }
    }
    if (cfg.ladder.empty()) c.fail("config.study.ladder", "must not be empty");
    for (int n : cfg.ladder) {
        if (n < 1) {
            c.fail("config.study.ladder", "entries must be >= 1");
            continue;
        }
        if (cfg.reference_n > 0 && cfg.reference_n % n != 0) {
            std::ostringstream msg;
            msg << "entry " << n << " does not divide reference_n = " << cfg.reference_n;
            c.fail("config.study.ladder", msg.str());
        } else if (cfg.reference_n > 0 && n != cfg.reference_n && cfg.reference_n < 8 * n) {
            std::ostringstream msg;
            msg << "entry " << n << " needs reference_n >= " << 8 * n;
            c.fail("config.study.reference_n", msg.str());
        }
    }
    if (cfg.reference_n < 1) c.fail("config.study.reference_n", "must be >= 1");
    if (cfg.mc_samples < 1) c.fail("config.study.mc_samples", "must be >= 1");

    if (root.contains("analysis")) {
        const json& a = root["analysis"];
        if (!a.is_object()) {
            c.fail("config.analysis", "expected an object");
        } else {
            c.unknown_keys(a, "config.analysis",
                           {"q_moment", "beta", "eps_bar", "eta", "holder_p", "c_bar", "c_tilde",
                            "k0", "k1", "l1", "gn_samples", "gn_seed",
                            "unspecified_splitting_const", "unspecified_euler_const"});
            c.number(a, "config.analysis", "q_moment", cfg.q_moment);
            c.number(a, "config.analysis", "beta", cfg.beta);
            c.number(a, "config.analysis", "eps_bar", cfg.eps_bar);
            c.number(a, "config.analysis", "eta", cfg.eta);
            c.number(a, "config.analysis", "holder_p", cfg.holder_p);
            for (const char* key : {"c_bar", "c_tilde", "k0", "k1", "l1"}) {
                if (!a.contains(key) || a.at(key).is_null()) continue;
                if (!a.at(key).is_number()) {
                    c.fail(std::string("config.analysis.") + key, "expected a number or null");
                    continue;
                }
                const double v = a.at(key).get<double>();
                if (std::string(key) == "c_bar") cfg.c_bar = v;
                else if (std::string(key) == "c_tilde") cfg.c_tilde = v;
                else if (std::string(key) == "k0") cfg.k0 = v;
                else if (std::string(key) == "k1") cfg.k1 = v;
                else cfg.l1 = v;
            }
            c.integer(a, "config.analysis", "gn_samples", cfg.gn_samples);
            c.uint64(a, "config.analysis", "gn_seed", cfg.gn_seed);
            c.number(a, "config.analysis", "unspecified_splitting_const",
                     cfg.unspecified_splitting_const);
            c.number(a, "config.analysis", "unspecified_euler_const", cfg.unspecified_euler_const);
        }
    }
    if (!(cfg.q_moment >= 2.0)) c.fail("config.analysis.q_moment", "must be >= 2");
    if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) c.fail("config.analysis.beta", "must lie in (0,1)");
    if (!(cfg.eps_bar > 0.0)) c.fail("config.analysis.eps_bar", "must be positive");
    if (!(cfg.eta > 0.0 && cfg.eta < 0.5)) c.fail("config.analysis.eta", "must lie in (0,1/2)");
    if (!(cfg.holder_p > 1.0)) c.fail("config.analysis.holder_p", "must be > 1");
    if (cfg.c_bar && !(*cfg.c_bar > 0.0)) c.fail("config.analysis.c_bar", "must be positive");
    if (cfg.c_tilde && !(*cfg.c_tilde > 0.0)) c.fail("config.analysis.c_tilde", "must be positive");
    if (cfg.k0 && *cfg.k0 < 0.0) c.fail("config.analysis.k0", "must be >= 0");
    if (cfg.k1 && *cfg.k1 < 0.0) c.fail("config.analysis.k1", "must be >= 0");
    if (cfg.l1 && *cfg.l1 < 0.0) c.fail("config.analysis.l1", "must be >= 0");
    if (cfg.gn_samples < 1) c.fail("config.analysis.gn_samples", "must be >= 1");

    if (root.contains("moments")) {
        const json& m = root["moments"];
        if (!m.is_object()) {
            c.fail("config.moments", "expected an object");
        } else {
            c.unknown_keys(m, "config.moments", {"p_orders", "m_ladder", "alpha_ladder"});
            if (m.contains("p_orders")) {
                if (!m["p_orders"].is_array()) {
                    c.fail("config.moments.p_orders", "expected an array");
                } else {
                    cfg.p_orders.clear();
                    for (const auto& v : m["p_orders"]) {
                        double d = 0.0;
                        c.extended_number(v, "config.moments.p_orders", d);
                        cfg.p_orders.push_back(d);
                    }
                }
            }
            if (m.contains("m_ladder")) {
                if (!m["m_ladder"].is_array()) {
                    c.fail("config.moments.m_ladder", "expected an array");
                } else {
                    cfg.m_ladder.clear();
                    for (const auto& v : m["m_ladder"]) {
                        double d = 0.0;
                        c.extended_number(v, "config.moments.m_ladder", d);
                        cfg.m_ladder.push_back(d);
                    }
                }
            }
            if (m.contains("alpha_ladder")) {
                if (m["alpha_ladder"].is_null()) {
                    cfg.alpha_ladder.reset();
                } else if (!m["alpha_ladder"].is_array()) {
                    c.fail("config.moments.alpha_ladder", "expected an array or null");
                } else {
                    std::vector<double> alphas;
                    for (const auto& v : m["alpha_ladder"]) {
                        double d = 0.0;
                        c.extended_number(v, "config.moments.alpha_ladder", d);
                        alphas.push_back(d);
                    }
                    cfg.alpha_ladder = alphas;
                }
            }
        }
    }
    for (double p : cfg.p_orders)
        if (!(p >= 1.0)) c.fail("config.moments.p_orders", "entries must be >= 1");

    if (root.contains("single_run")) {
        const json& sr = root["single_run"];
        if (!sr.is_object()) {
            c.fail("config.single_run", "expected an object");
        } else {
            c.unknown_keys(sr, "config.single_run", {"write_snapshots", "path_refinement"});
            c.boolean(sr, "config.single_run", "write_snapshots", cfg.write_snapshots);
            c.integer(sr, "config.single_run", "path_refinement", cfg.path_refinement);
        }
    }
    if (cfg.path_refinement < 1) c.fail("config.single_run.path_refinement", "must be >= 1");

    return result;
}

ValidationResult load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        ValidationResult r;
        r.errors.push_back("config: cannot open " + path);
        return r;
    }
    std::ostringstream buf;
    buf << is.rdbuf();
    return validate_config(buf.str());
}

std::string command_name(Command c) {
    switch (c) {
        case Command::convergence: return "convergence";
        case Command::constants: return "constants";
        case Command::diagnostics: return "diagnostics";
        case Command::single_run: return "single_run";
    }
    return "unknown";
}

}  // namespace sns
