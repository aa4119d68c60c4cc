#include "sns/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "sns/theory.hpp"

namespace sns {

void StudyConfig::validate() const {
    if (ladder.empty()) throw std::invalid_argument("study: ladder must not be empty");
    for (int n : ladder) {
        if (n < 1) throw std::invalid_argument("study: ladder entries must be >= 1");
        if (reference_n % n != 0)
            throw std::invalid_argument("study: every ladder N must divide reference_n");
        // self-comparison (N == reference_n) is a valid coupling check; any
        // genuine level needs 8x headroom below the reference
        if (n != reference_n && reference_n < 8 * n)
            throw std::invalid_argument("study: reference_n must be >= 8 * max(ladder)");
    }
    if (mc_samples < 1) throw std::invalid_argument("study: mc_samples must be >= 1");
    scheme_params(ladder.front()).validate();
}

SchemeParams StudyConfig::scheme_params(int n_steps) const {
    SchemeParams p;
    p.viscosity = viscosity;
    p.horizon = horizon;
    p.n_steps = n_steps;
    p.solver_tol = solver_tol;
    p.solver_max_iter = solver_max_iter;
    p.inner_substeps = inner_substeps;
    p.kind = scheme_kind;
    return p;
}

FitResult fit_rate(const std::vector<std::pair<double, double>>& n_value) {
    if (n_value.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
    std::vector<double> x, y;
    for (const auto& [n, v] : n_value) {
        if (!(v > 0.0)) throw std::invalid_argument("fit_rate: values must be positive");
        x.push_back(std::log(n));
        y.push_back(std::log(v));
    }
    const size_t m = x.size();
    const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / m;
    const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < m; ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
    }
    const double slope = sxy / sxx;
    const double intercept = ybar - slope * xbar;
    double ssr = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const double r = y[i] - intercept - slope * x[i];
        ssr += r * r;
    }
    const double se = m > 2 ? std::sqrt(ssr / ((m - 2) * sxx)) : 0.0;
    return {-slope, intercept, 1.96 * se};
}

namespace {

struct PairResult {
    bool ok = false;
    double max_sq = 0.0;
    double v_sum = 0.0;
};

struct SampleResult {
    std::vector<PairResult> pairs;  ///< one per ladder entry
};

/// Run one sample: shared fine path, reference trajectory kept on the union
/// of the ladder grids, then every ladder level against it.
SampleResult run_sample(const StudyConfig& cfg, const SpectralField& u0, int sample) {
    SampleResult res;
    res.pairs.resize(cfg.ladder.size());

    const std::uint64_t seed = cfg.base_seed ^ static_cast<std::uint64_t>(sample);
    const WienerPath path = sample_wiener_path(cfg.noise, cfg.horizon, cfg.reference_n, seed);

    int keep = 1;  // union grid of the ladder = lcm of its entries
    for (int n : cfg.ladder) keep = static_cast<int>(std::lcm(keep, n));
    const int stride = cfg.reference_n / keep;

    std::vector<SpectralField> ref;
    ref.reserve(keep + 1);
    try {
        drive_trajectory(u0, cfg.scheme_params(cfg.reference_n), cfg.noise, path,
                         [&](int k, const SpectralField& state, const StepDiagnostics*) {
                             if (k % stride == 0) ref.push_back(state);
                         });
    } catch (const solver_error&) {
        return res;  // reference failed: every pair of this sample is excluded
    }

    for (size_t li = 0; li < cfg.ladder.size(); ++li) {
        const int n = cfg.ladder[li];
        const int ref_stride = keep / n;
        double max_sq = 0.0;
        KahanSum v_sum;
        try {
            drive_trajectory(u0, cfg.scheme_params(n), cfg.noise, path,
                             [&](int k, const SpectralField& state, const StepDiagnostics*) {
                                 if (k == 0) return;
                                 const SpectralField e = state - ref[static_cast<size_t>(k) * ref_stride];
                                 const double l2 = norm_l2(e);
                                 max_sq = std::max(max_sq, l2 * l2);
                                 const double g = norm_grad_l2(e);
                                 v_sum.add(g * g);
                             });
            res.pairs[li] = {true, max_sq, v_sum.sum * (cfg.horizon / n)};
        } catch (const solver_error&) {
            res.pairs[li].ok = false;
        }
    }
    return res;
}

void run_samples(const StudyConfig& cfg, const SpectralField& u0,
                 std::vector<SampleResult>& out) {
    out.resize(cfg.mc_samples);
    if (cfg.workers <= 1) {
        for (int s = 0; s < cfg.mc_samples; ++s) out[s] = run_sample(cfg, u0, s);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(cfg.workers);
    const int w = cfg.workers;
    for (int t = 0; t < w; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int s = t; s < cfg.mc_samples; s += w) out[s] = run_sample(cfg, u0, s);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

ErrorReport strong_error_study(const StudyConfig& cfg) {
    cfg.validate();
    const SpectralField u0 = make_initial_condition(cfg.grid, cfg.init);

    std::vector<SampleResult> samples;
    run_samples(cfg, u0, samples);

    ErrorReport report;
    int excluded_total = 0;
    for (size_t li = 0; li < cfg.ladder.size(); ++li) {
        const int n = cfg.ladder[li];
        KahanSum mean_max, mean_v, sq_max, sq_v;
        int used = 0, excluded = 0;
        for (const auto& s : samples) {
            const PairResult& p = s.pairs[li];
            if (!p.ok) {
                ++excluded;
                continue;
            }
            ++used;
            mean_max.add(p.max_sq);
            mean_v.add(p.v_sum);
            sq_max.add(p.max_sq * p.max_sq);
            sq_v.add(p.v_sum * p.v_sum);
        }
        excluded_total += excluded;
        ErrorRow row;
        row.scheme = cfg.scheme_kind;
        row.n = n;
        row.dt = cfg.horizon / n;
        row.samples_used = used;
        row.excluded = excluded;
        if (used > 0) {
            row.est_max_l2_sq = mean_max.sum / used;
            row.est_v_sum = mean_v.sum / used;
            if (used > 1) {
                const double var_max =
                    std::max(0.0, (sq_max.sum - used * row.est_max_l2_sq * row.est_max_l2_sq) /
                                      (used - 1));
                const double var_v =
                    std::max(0.0, (sq_v.sum - used * row.est_v_sum * row.est_v_sum) / (used - 1));
                row.se_max = std::sqrt(var_max / used);
                row.se_v = std::sqrt(var_v / used);
            }
        }
        report.rows.push_back(row);
    }

    const int total_pairs = cfg.mc_samples * static_cast<int>(cfg.ladder.size());
    if (excluded_total * 20 > total_pairs) {
        std::ostringstream msg;
        msg << "strong_error_study: " << excluded_total << " of " << total_pairs
            << " (sample, N) pairs excluded by solver failures (> 5%)";
        throw solver_error(msg.str());
    }
    if (excluded_total > 0) {
        std::ostringstream msg;
        msg << excluded_total << " of " << total_pairs << " pairs excluded by solver failures";
        report.warnings.push_back(msg.str());
    }

    // fitted orders on the rms values
    auto fit_metric = [&](const std::string& name, auto getter) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& row : report.rows) {
            const double v = getter(row);
            if (v > 0.0 && row.samples_used > 0) pts.emplace_back(row.n, std::sqrt(v));
        }
        if (pts.size() >= 3) {
            const FitResult f = fit_rate(pts);
            report.fits.push_back({name, f.order, f.intercept, f.half_width});
        }
    };
    fit_metric("rms_max_l2", [](const ErrorRow& r) { return r.est_max_l2_sq; });
    fit_metric("rms_v_sum", [](const ErrorRow& r) { return r.est_v_sum; });

    // statistical monotonicity: errors should not grow with N beyond noise
    std::vector<ErrorRow> sorted = report.rows;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
    for (size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].samples_used == 0 || sorted[i - 1].samples_used == 0) continue;
        const double slack = 2.0 * (sorted[i].se_max + sorted[i - 1].se_max);
        if (sorted[i].est_max_l2_sq > sorted[i - 1].est_max_l2_sq + slack) {
            std::ostringstream msg;
            msg << "est_max_l2_sq increased from N=" << sorted[i - 1].n << " to N=" << sorted[i].n
                << " beyond 2 standard errors";
            report.warnings.push_back(msg.str());
        }
    }
    return report;
}

TrajectoryNorms norms_of(const TrajectoryRecord& record) {
    TrajectoryNorms t;
    t.dt = record.params.dt();
    for (const auto& state : record.states) {
        const NormBundle nb = norm_bundle(state);
        t.v_norm.push_back(nb.v);
        t.grad_l2.push_back(nb.grad_l2);
        t.stokes_l2.push_back(nb.stokes_l2);
    }
    return t;
}

std::vector<TrajectoryNorms> collect_norm_tracks(const StudyConfig& cfg, int n_steps) {
    cfg.validate();
    if (cfg.reference_n % n_steps != 0)
        throw std::invalid_argument("collect_norm_tracks: n_steps must divide reference_n");
    const SpectralField u0 = make_initial_condition(cfg.grid, cfg.init);
    std::vector<TrajectoryNorms> tracks(cfg.mc_samples);
    for (int s = 0; s < cfg.mc_samples; ++s) {
        const std::uint64_t seed = cfg.base_seed ^ static_cast<std::uint64_t>(s);
        const WienerPath path = sample_wiener_path(cfg.noise, cfg.horizon, cfg.reference_n, seed);
        TrajectoryNorms& t = tracks[s];
        t.dt = cfg.horizon / n_steps;
        drive_trajectory(u0, cfg.scheme_params(n_steps), cfg.noise, path,
                         [&](int, const SpectralField& state, const StepDiagnostics*) {
                             const NormBundle nb = norm_bundle(state);
                             t.v_norm.push_back(nb.v);
                             t.grad_l2.push_back(nb.grad_l2);
                             t.stokes_l2.push_back(nb.stokes_l2);
                         });
    }
    return tracks;
}

namespace {

std::string format_label(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

MomentReport moment_report_from_norms(const std::vector<TrajectoryNorms>& tracks,
                                      const std::vector<double>& p_orders,
                                      const std::vector<double>& m_ladder,
                                      const std::vector<double>& alpha_ladder) {
    if (tracks.empty()) throw std::invalid_argument("moment_report: empty record list");
    MomentReport rep;
    const size_t half = tracks.size() / 2;

    for (double p : p_orders) {
        KahanSum max_mom, dissip;
        for (const auto& t : tracks) {
            double vmax = 0.0;
            KahanSum acc;
            for (size_t k = 1; k < t.v_norm.size(); ++k) {
                vmax = std::max(vmax, t.v_norm[k]);
                acc.add(std::pow(t.v_norm[k], 2.0 * p - 2.0) * t.stokes_l2[k] * t.stokes_l2[k]);
            }
            max_mom.add(std::pow(vmax, 2.0 * p));
            dissip.add(t.dt * acc.sum);
        }
        rep.rows.push_back(
            {format_label(p), "mean_max_v_norm_2p", max_mom.sum / tracks.size(), "-"});
        rep.rows.push_back(
            {format_label(p), "mean_dissipation_2p", dissip.sum / tracks.size(), "-"});
    }

    for (double m : m_ladder) {
        int out_count = 0;
        for (const auto& t : tracks) {
            double sup = 0.0;
            for (size_t k = 1; k < t.grad_l2.size(); ++k)
                sup = std::max(sup, t.grad_l2[k] * t.grad_l2[k]);
            if (!(sup <= m)) ++out_count;
        }
        rep.rows.push_back({format_label(m), "p_complement_grad_sup",
                            static_cast<double>(out_count) / tracks.size(), "-"});
    }

    for (double alpha : alpha_ladder) {
        KahanSum full, head;
        size_t i = 0;
        for (const auto& t : tracks) {
            double vmax = 0.0;
            for (size_t k = 1; k < t.v_norm.size(); ++k) vmax = std::max(vmax, t.v_norm[k]);
            const double e = std::exp(alpha * vmax * vmax);
            full.add(e);
            if (i < half) head.add(e);
            ++i;
        }
        const double est = full.sum / tracks.size();
        std::string flag = "-";
        if (half > 0) {
            const double half_est = head.sum / half;
            const double rel = est != 0.0 ? std::abs(half_est - est) / est : 0.0;
            flag = rel < 0.2 ? "stable" : "unstable";
        }
        rep.rows.push_back({format_label(alpha), "exp_moment_sup_v_sq", est, flag});
    }
    return rep;
}

MomentReport moment_report(const std::vector<TrajectoryRecord>& records,
                           const std::vector<double>& p_orders,
                           const std::vector<double>& m_ladder,
                           const std::vector<double>& alpha_ladder) {
    if (records.empty()) throw std::invalid_argument("moment_report: empty record list");
    std::vector<TrajectoryNorms> tracks;
    tracks.reserve(records.size());
    for (const auto& r : records) tracks.push_back(norms_of(r));
    return moment_report_from_norms(tracks, p_orders, m_ladder, alpha_ladder);
}

}  // namespace sns
