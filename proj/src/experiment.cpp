#include "sns/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sns/field_io.hpp"
#include "sns/version.hpp"

namespace sns {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t fnv1a64_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::uint64_t h = 1469598103934665603ull;
    char buf[4096];
    while (is) {
        is.read(buf, sizeof(buf));
        const std::streamsize got = is.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Tracks everything written so the manifest can reference it, and so a
/// failed run can be relocated under failed/.
struct OutputSet {
    fs::path dir;
    std::vector<fs::path> files;

    fs::path file(const std::string& name) {
        files.push_back(dir / name);
        return dir / name;
    }
};

json config_echo(const RunConfig& c) {
    json j;
    j["command"] = command_name(c.command);
    j["output_dir"] = c.output_dir;
    j["workers"] = c.workers;
    j["grid"] = {{"n_modes", c.n_modes}, {"box_length", c.box_length}};
    j["physics"] = {{"viscosity", c.viscosity}, {"horizon", c.horizon}};
    json noise = {{"amplitude", c.noise_amplitude},
                  {"exponent", c.noise_exponent},
                  {"sigma", c.noise_sigma},
                  {"modulation_constant", c.noise_modulation_constant}};
    noise["kind"] = c.noise_kind == GKind::additive ? "additive" : "scalar_multiplicative";
    noise["modulation"] = c.noise_modulation == Modulation::sine
                              ? "sin"
                              : (c.noise_modulation == Modulation::tanh_sat ? "tanh" : "constant");
    j["noise"] = noise;
    j["scheme"] = {{"kind", scheme_kind_name(c.scheme_kind)},
                   {"n_steps", c.n_steps},
                   {"solver_tol", c.solver_tol},
                   {"solver_max_iter", c.solver_max_iter},
                   {"inner_substeps", c.inner_substeps}};
    std::string init_kind = c.init.kind == InitSpec::Kind::zero
                                ? "zero"
                                : (c.init.kind == InitSpec::Kind::taylor_green ? "taylor_green"
                                                                               : "random_smooth");
    j["initial_condition"] = {{"kind", init_kind},
                              {"amplitude", c.init.amplitude},
                              {"decay", c.init.decay},
                              {"seed", c.init.seed}};
    j["study"] = {{"ladder", c.ladder},
                  {"reference_n", c.reference_n},
                  {"mc_samples", c.mc_samples},
                  {"base_seed", c.base_seed}};
    j["analysis"] = {{"q_moment", c.q_moment}, {"beta", c.beta},       {"eps_bar", c.eps_bar},
                     {"eta", c.eta},           {"holder_p", c.holder_p}};
    return j;
}

void write_manifest(OutputSet& out, const RunConfig& cfg, const json& extra) {
    json m;
    m["tool"] = "sns2d";
    m["version"] = kVersion;
    m["command"] = command_name(cfg.command);
    const auto now = std::chrono::system_clock::now();
    m["generated_at_unix"] = std::chrono::duration_cast<std::chrono::seconds>(
                                 now.time_since_epoch())
                                 .count();
    m["config"] = config_echo(cfg);
    if (!extra.is_null()) m["results"] = extra;
    json files = json::array();
    for (const auto& f : out.files) {
        char hex[20];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a64_file(f)));
        files.push_back({{"file", f.filename().string()},
                         {"bytes", fs::file_size(f)},
                         {"fnv1a64", hex}});
    }
    m["outputs"] = files;
    std::ofstream os(out.dir / "manifest.json");
    os << m.dump(2) << "\n";
}

void write_constants_csv(const fs::path& file, const RunConfig& cfg) {
    const AnalysisParams a = cfg.make_analysis_params();
    const RateConstants sp = splitting_constants(a);
    const RateConstants eu = euler_constants(a);

    std::ofstream os(file);
    if (!os) throw io_error("constants: cannot open " + file.string());
    os << "name,value,formula_ref,regime\n";
    auto row = [&](const std::string& name, double v, const std::string& formula,
                   const std::string& regime) {
        os << name << "," << fmt(v) << "," << formula << "," << regime << "\n";
    };
    row("c_bar", a.c_bar, cfg.c_bar ? "config" : "empirical interpolation estimate", "shared");
    row("c_tilde", a.c_tilde, cfg.c_tilde ? "config" : "spectral Poincare bound (L/2pi)^2",
        "shared");
    row("k0", a.k0, cfg.k0 ? "config" : "noise model", "shared");
    row("k1", a.k1, cfg.k1 ? "config" : "noise model", "shared");
    row("l1", a.l1, cfg.l1 ? "config" : "noise model", "shared");
    row("c_beta", sp.c_beta, "c_bar^2*27/(256*beta^3)", "shared");
    row("c_tilde_m_slope", sp.c_tilde_slope, "27*c_bar^2/(32*beta^3*nu^3)", "splitting");
    row("c1_m_slope", eu.c1_slope, "(1+eps_bar)*c_bar^2/(2*nu)", "euler");
    row("alpha0", eu.alpha0, "nu/(4*k0*c_tilde)", "additive");
    row("gamma_sup", eu.gamma_sup, "0.5*alpha0/(alpha0+c_bar^2*T/(2*nu))", "euler_additive");
    row("gamma_sup_splitting", sp.gamma_sup, "alpha0/c_bar^2*sqrt(512*nu^3/(27*T))",
        "splitting_additive");
    row("threshold_m_lin_growth_at_1e6", eu.threshold_lin_growth(1e6),
        "2*nu/((1+eps_bar)*c_bar^2*T)*(eta*ln N-(2^(q-1)-1)*ln ln N)", "euler_lin_growth");
    row("threshold_m_lin_growth_splitting_at_1e6", sp.threshold_lin_growth(1e6),
        "(ln N-(q-1)/2*ln ln N)/(2*(1+eps_bar)*C_{nu beta}*T)", "splitting_lin_growth");
    if (a.k1 == 0.0) {
        row("threshold_m_additive_at_1e6", eu.threshold_additive(1e6),
            "eta*ln N/(alpha0/p+(1+eps_bar)*c_bar^2*T/(2*nu))", "euler_additive");
        row("threshold_m_additive_splitting_at_1e6", sp.threshold_additive(1e6),
            "positive root of a2*X^2+a1*X-ln N, M=X^2", "splitting_additive");
    }
    if (!os) throw io_error("constants: write failed");
}

void write_errors_csv(const fs::path& file, const std::vector<ErrorRow>& rows) {
    std::ofstream os(file);
    if (!os) throw io_error("errors.csv: cannot open " + file.string());
    os << "scheme,N,dt,mc_samples,est_max_l2_sq,se_max,est_v_sum,se_v\n";
    for (const auto& r : rows)
        os << scheme_kind_name(r.scheme) << "," << r.n << "," << fmt(r.dt) << ","
           << r.samples_used << "," << fmt(r.est_max_l2_sq) << "," << fmt(r.se_max) << ","
           << fmt(r.est_v_sum) << "," << fmt(r.se_v) << "\n";
}

void write_rates_csv(const fs::path& file, SchemeKind scheme, const std::vector<RateFit>& fits) {
    std::ofstream os(file);
    if (!os) throw io_error("rates.csv: cannot open " + file.string());
    os << "scheme,metric,fitted_order,half_width\n";
    for (const auto& f : fits)
        os << scheme_kind_name(scheme) << "," << f.metric << "," << fmt(f.order) << ","
           << fmt(f.half_width) << "\n";
}

void write_moments_csv(const fs::path& file, const MomentReport& rep) {
    std::ofstream os(file);
    if (!os) throw io_error("moments.csv: cannot open " + file.string());
    os << "p_or_alpha_or_M,statistic,value,stability_flag\n";
    for (const auto& r : rep.rows)
        os << r.label << "," << r.statistic << "," << fmt(r.value) << "," << r.stability_flag
           << "\n";
}

void write_plot_script(const fs::path& file) {
    std::ofstream os(file);
    os << "# gnuplot script: log-log strong-error curves\n"
          "set logscale xy\n"
          "set xlabel 'N'\n"
          "set ylabel 'error'\n"
          "set datafile separator ','\n"
          "set key left bottom\n"
          "plot 'errors.csv' skip 1 using 2:(sqrt($5)) with linespoints title 'rms max L2', \\\n"
          "     'errors.csv' skip 1 using 2:(sqrt($7)) with linespoints title 'rms V sum'\n";
}

void run_convergence(const RunConfig& cfg, OutputSet& out) {
    StudyConfig study = cfg.make_study_config();
    const ErrorReport report = strong_error_study(study);
    write_errors_csv(out.file("errors.csv"), report.rows);
    write_rates_csv(out.file("rates.csv"), cfg.scheme_kind, report.fits);

    const int track_n = *std::max_element(cfg.ladder.begin(), cfg.ladder.end());
    const auto tracks = collect_norm_tracks(study, track_n);
    std::vector<double> alphas;
    if (cfg.alpha_ladder) {
        alphas = *cfg.alpha_ladder;
    } else {
        const AnalysisParams analysis = cfg.make_analysis_params();
        const double a0 = analysis.k0 > 0.0 ? euler_constants(analysis).alpha0 : 1.0;
        alphas = {0.25 * a0, 0.5 * a0, a0};
    }
    const MomentReport moments = moment_report_from_norms(tracks, cfg.p_orders, cfg.m_ladder, alphas);
    write_moments_csv(out.file("moments.csv"), moments);
    write_plot_script(out.file("plot.gnuplot"));

    json extra;
    for (const auto& f : report.fits)
        extra["fitted_orders"][f.metric] = {{"order", f.order}, {"half_width", f.half_width}};
    extra["warnings"] = report.warnings;
    write_manifest(out, cfg, extra);
}

void run_single(const RunConfig& cfg, OutputSet& out) {
    const Grid grid = cfg.grid();
    const NoiseModel model = cfg.make_noise_model();
    const SpectralField u0 = make_initial_condition(grid, cfg.init);
    SchemeParams params;
    params.viscosity = cfg.viscosity;
    params.horizon = cfg.horizon;
    params.n_steps = cfg.n_steps;
    params.solver_tol = cfg.solver_tol;
    params.solver_max_iter = cfg.solver_max_iter;
    params.inner_substeps = cfg.inner_substeps;
    params.kind = cfg.scheme_kind;
    const WienerPath path = sample_wiener_path(model, cfg.horizon,
                                               cfg.n_steps * cfg.path_refinement, cfg.base_seed);
    const TrajectoryRecord rec = run_trajectory(u0, params, model, path);
    write_trajectory_csv(out.file("trajectory.csv").string(), rec);
    if (cfg.write_snapshots) {
        for (size_t k = 0; k < rec.states.size(); ++k) {
            char name[64];
            std::snprintf(name, sizeof(name), "state_%05zu.sns2", k);
            write_snapshot(out.file(name).string(), rec.states[k]);
        }
    }
    write_manifest(out, cfg, json());
}

void run_diagnostics(const RunConfig& cfg, OutputSet& out) {
    const Grid grid = cfg.grid();
    std::ofstream os(out.file("diagnostics.csv"));
    os << "check,value,threshold,pass\n";
    auto row = [&](const std::string& name, double value, double thr) {
        os << name << "," << fmt(value) << "," << fmt(thr) << ","
           << (value <= thr ? "yes" : "no") << "\n";
    };

    double worst_anti = 0.0, worst_ab = 0.0, worst_idem = 0.0, worst_div = 0.0, worst_pars = 0.0;
    for (int s = 0; s < 20; ++s) {
        const SpectralField u = random_solenoidal_field(grid, 2.0, cfg.base_seed, 3 * s + 1);
        const SpectralField v = random_solenoidal_field(grid, 2.0, cfg.base_seed, 3 * s + 2);
        const SpectralField w = random_solenoidal_field(grid, 2.0, cfg.base_seed, 3 * s + 3);
        const NormBundle nu_ = norm_bundle(u), nv = norm_bundle(v), nw = norm_bundle(w);
        const double scale = nu_.v * nv.v * nw.v;
        worst_anti = std::max(worst_anti,
                              std::abs(trilinear_form(u, v, w) + trilinear_form(u, w, v)) / scale);
        worst_ab = std::max(worst_ab, std::abs(trilinear_form(u, u, stokes_apply(u))) /
                                          (nu_.v * nu_.v * nu_.stokes_l2));
        const SpectralField once = leray_project(u);
        const SpectralField twice = leray_project(once);
        worst_idem = std::max(worst_idem, norm_l2(twice - once) / std::max(1e-300, norm_l2(once)));
        worst_div = std::max(worst_div, divergence_defect(bilinear_b(u, v)));
        worst_pars = std::max(worst_pars, std::abs(physical_l2(u) - nu_.l2) / nu_.l2);
    }
    row("trilinear_antisymmetry_rel", worst_anti, 1e-10);
    row("stokes_bilinear_orthogonality_rel", worst_ab, 1e-10);
    row("leray_idempotence_rel", worst_idem, 1e-14);
    row("divergence_defect", worst_div, 1e-13);
    row("parseval_l2_rel", worst_pars, 1e-12);
    write_manifest(out, cfg, json());
}

int guarded_run(const RunConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    OutputSet out{fs::path(cfg.output_dir), {}};
    try {
        switch (cfg.command) {
            case Command::constants: {
                write_constants_csv(out.file("constants.csv"), cfg);
                write_manifest(out, cfg, json());
                break;
            }
            case Command::convergence: run_convergence(cfg, out); break;
            case Command::single_run: run_single(cfg, out); break;
            case Command::diagnostics: run_diagnostics(cfg, out); break;
        }
        return exit_ok;
    } catch (...) {
        // relocate partial outputs and record the failure
        const fs::path failed = out.dir / "failed";
        std::error_code ec;
        fs::create_directories(failed, ec);
        for (const auto& f : out.files)
            if (fs::exists(f, ec)) fs::rename(f, failed / f.filename(), ec);
        json err;
        err["tool"] = "sns2d";
        err["version"] = kVersion;
        err["command"] = command_name(cfg.command);
        int code = exit_io_error;
        try {
            throw;
        } catch (const solver_error& e) {
            err["error"] = {{"kind", "solver_failure"}, {"message", e.what()},
                            {"step_index", e.step_index}};
            code = exit_solver_failure;
        } catch (const io_error& e) {
            err["error"] = {{"kind", "io_error"}, {"message", e.what()}};
            code = exit_io_error;
        } catch (const std::exception& e) {
            err["error"] = {{"kind", "invalid_input"}, {"message", e.what()}};
            code = exit_config_error;
        }
        std::ofstream os(failed / "error.json");
        os << err.dump(2) << "\n";
        return code;
    }
}

}  // namespace

int run_experiment(const RunConfig& config) { return guarded_run(config); }

}  // namespace sns
