#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sns/fields.hpp"
#include "sns/noise.hpp"
#include "sns/schemes.hpp"

namespace sns {

/// One Monte Carlo strong-error study: a ladder of N values driven by the
/// same fine Brownian path per sample, compared against the same scheme run
/// at reference_n.
struct StudyConfig {
    Grid grid;
    double viscosity = 1.0;
    double horizon = 0.25;
    NoiseModel noise;
    InitSpec init;
    SchemeKind scheme_kind = SchemeKind::fully_implicit;
    std::vector<int> ladder = {8, 16, 32, 64, 128};
    int reference_n = 2048;
    int mc_samples = 64;
    std::uint64_t base_seed = 12345;
    double solver_tol = 1e-11;
    int solver_max_iter = 200;
    int inner_substeps = 8;
    int workers = 1;

    void validate() const;
    SchemeParams scheme_params(int n_steps) const;
};

struct ErrorRow {
    SchemeKind scheme;
    int n = 0;
    double dt = 0.0;
    int samples_used = 0;
    int excluded = 0;
    double est_max_l2_sq = 0.0;  ///< E max_k |u_ref(t_k) - u_N(t_k)|_{L2}^2
    double se_max = 0.0;
    double est_v_sum = 0.0;      ///< E (T/N) sum_k |grad e_k|_{L2}^2
    double se_v = 0.0;
};

struct RateFit {
    std::string metric;
    double order = 0.0;
    double intercept = 0.0;
    double half_width = 0.0;
};

struct ErrorReport {
    std::vector<ErrorRow> rows;
    std::vector<RateFit> fits;
    std::vector<std::string> warnings;
};

ErrorReport strong_error_study(const StudyConfig& config);

/// Least squares of ln(value) on ln(N); order is minus the slope, the
/// half-width a 95% normal-approximation bound on it.
struct FitResult {
    double order = 0.0;
    double intercept = 0.0;
    double half_width = 0.0;
};
FitResult fit_rate(const std::vector<std::pair<double, double>>& n_value);

/// Per-trajectory norm tracks, enough for moment and localization
/// statistics without retaining the states.
struct TrajectoryNorms {
    double dt = 0.0;
    std::vector<double> v_norm;     ///< ||u(t_k)||_V, k = 0..N
    std::vector<double> grad_l2;    ///< |grad u(t_k)|_{L2}
    std::vector<double> stokes_l2;  ///< |A u(t_k)|_{L2}
};

TrajectoryNorms norms_of(const TrajectoryRecord& record);

/// Re-runs the study's samples at one ladder level, keeping norm tracks only.
std::vector<TrajectoryNorms> collect_norm_tracks(const StudyConfig& config, int n_steps);

struct MomentRow {
    std::string label;      ///< p, alpha or M value it belongs to
    std::string statistic;
    double value = 0.0;
    std::string stability_flag;  ///< "stable"/"unstable" for exp moments, "-" otherwise
};

struct MomentReport {
    std::vector<MomentRow> rows;
};

MomentReport moment_report(const std::vector<TrajectoryRecord>& records,
                           const std::vector<double>& p_orders,
                           const std::vector<double>& m_ladder,
                           const std::vector<double>& alpha_ladder);

MomentReport moment_report_from_norms(const std::vector<TrajectoryNorms>& tracks,
                                      const std::vector<double>& p_orders,
                                      const std::vector<double>& m_ladder,
                                      const std::vector<double>& alpha_ladder);

/// Fixed-order compensated accumulator used for all Monte Carlo reductions.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

}  // namespace sns
