#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sns/fields.hpp"
#include "sns/harness.hpp"
#include "sns/noise.hpp"
#include "sns/schemes.hpp"
#include "sns/theory.hpp"

namespace sns {

enum class Command { convergence, constants, diagnostics, single_run };

/// Fully validated run configuration; every numeric field has passed the
/// module invariants before any computation starts.
struct RunConfig {
    Command command = Command::constants;
    std::string output_dir = "out";
    int workers = 1;

    int n_modes = 32;
    double box_length = 6.283185307179586;  // 2 pi

    double viscosity = 1.0;
    double horizon = 0.25;

    GKind noise_kind = GKind::additive;
    double noise_amplitude = 1.0;
    double noise_exponent = 3.0;
    double noise_sigma = 1.0;
    Modulation noise_modulation = Modulation::sine;
    double noise_modulation_constant = 1.0;

    SchemeKind scheme_kind = SchemeKind::fully_implicit;
    int n_steps = 128;
    double solver_tol = 1e-11;
    int solver_max_iter = 200;
    int inner_substeps = 8;

    InitSpec init;

    std::vector<int> ladder = {8, 16, 32, 64, 128};
    int reference_n = 2048;
    int mc_samples = 64;
    std::uint64_t base_seed = 12345;

    double q_moment = 2.0;
    double beta = 0.5;
    double eps_bar = 0.05;
    double eta = 0.49;
    double holder_p = 1.05;
    std::optional<double> c_bar;    ///< empty: estimate empirically
    std::optional<double> c_tilde;  ///< empty: spectral Poincare bound (L/2pi)^2
    std::optional<double> k0, k1, l1;  ///< empty: taken from the noise model
    int gn_samples = 200;
    std::uint64_t gn_seed = 777;
    double unspecified_splitting_const = 0.0;
    double unspecified_euler_const = 0.0;

    std::vector<double> p_orders = {1.0, 2.0};
    std::vector<double> m_ladder = {0.5, 1.0, 2.0, 4.0, 8.0,
                                    std::numeric_limits<double>::infinity()};
    std::optional<std::vector<double>> alpha_ladder;  ///< empty: fractions of alpha0

    bool write_snapshots = false;
    int path_refinement = 1;

    Grid grid() const { return sns::make_grid(n_modes, box_length); }
    NoiseModel make_noise_model() const;
    StudyConfig make_study_config() const;
    /// Analysis parameters with defaulted constants resolved (estimates for
    /// c_bar, the spectral Poincare bound for c_tilde, noise-model growth
    /// constants for k0/k1/l1).
    AnalysisParams make_analysis_params() const;
};

struct ValidationResult {
    RunConfig config;
    std::vector<std::string> errors;  ///< empty means valid; all violations listed

    bool ok() const { return errors.empty(); }
};

/// Parse and validate a JSON configuration document. Collects every
/// violation (unknown keys, type mismatches, range and divisibility
/// failures) rather than stopping at the first.
ValidationResult validate_config(const std::string& text);

ValidationResult load_config_file(const std::string& path);

std::string command_name(Command c);

}  // namespace sns
