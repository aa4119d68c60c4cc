#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sns/grid.hpp"
#include "sns/schemes.hpp"

namespace sns {

/// Inputs of the closed-form rate calculator. eps_bar is the slack factor
/// (1 + eps) carried through the localized estimates; holder_p the conjugate
/// exponent kept close to 1; the two unspecified_* fields stand in for
/// additive constants the estimates leave free (they shift threshold
/// prefactors only, never rate exponents).
struct AnalysisParams {
    double viscosity = 1.0;
    double horizon = 1.0;
    double k0 = 1.0;
    double k1 = 0.0;
    double l1 = 0.0;
    double q_moment = 2.0;
    double beta = 0.5;
    double eps_bar = 0.05;
    double eta = 0.49;
    double c_bar = 1.0;
    double c_tilde = 1.0;
    double holder_p = 1.05;
    double unspecified_splitting_const = 0.0;
    double unspecified_euler_const = 0.0;

    void validate() const;
};

/// Closed-form constants, localization thresholds M(N) and the supremal
/// predicted exponents for one scheme family.
struct RateConstants {
    double c_beta = 0.0;
    std::function<double(double)> c_tilde_m;  ///< splitting C(M), linear in M
    std::function<double(double)> c1_m;       ///< Euler C1(M), linear in M
    double c_tilde_slope = 0.0;
    double c1_slope = 0.0;
    double alpha0 = 0.0;
    std::function<double(double)> threshold_lin_growth;  ///< M(N), Lipschitz G
    std::function<double(double)> threshold_additive;    ///< M(N), K1 = 0
    double gamma_sup = 0.0;  ///< NaN when the additive regime is unavailable
};

/// C_beta = c_bar^2 * 27 / (256 * beta^3).
double c_beta(double beta, double c_bar);

RateConstants splitting_constants(const AnalysisParams& p);
RateConstants euler_constants(const AnalysisParams& p);

/// Empirical lower estimate of the interpolation constant: max over random
/// dealiased divergence-free fields of ||u||_{L4}^2 / (|u|_{L2} |grad u|_{L2}).
double estimate_gn_constant(const Grid& grid, int n_samples, std::uint64_t seed);

enum class LocalizationVariant { grad_sup, x_norm_sup };

/// Indicator per k = 1..N of the localization event: running sup of
/// |grad u(t_j)|^2 (j = 1..k) or ||u(t_j)||_X^4 (j = 0..k) staying <= M.
/// The sequence is non-increasing in k.
std::vector<std::uint8_t> localization_indicator(const TrajectoryRecord& record,
                                                 double m_threshold, LocalizationVariant variant);

/// Same, on precomputed per-index values: entry k is 1 iff values[j] <= M
/// for all j <= k.
std::vector<std::uint8_t> running_sup_indicator(const std::vector<double>& values,
                                                double m_threshold);

}  // namespace sns
