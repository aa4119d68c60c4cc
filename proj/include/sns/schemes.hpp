#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sns/noise.hpp"
#include "sns/operators.hpp"
#include "sns/spectral_field.hpp"

namespace sns {

enum class SchemeKind { splitting, fully_implicit, semi_implicit };

struct SchemeParams {
    double viscosity = 1.0;
    double horizon = 1.0;
    int n_steps = 1;
    double solver_tol = 1e-11;
    int solver_max_iter = 200;
    int inner_substeps = 8;   ///< deterministic substep refinement (splitting)
    SchemeKind kind = SchemeKind::fully_implicit;
    bool include_advection = true;  ///< diagnostic switch: false drops B entirely

    double dt() const { return horizon / n_steps; }
    void validate() const;
};

struct StepDiagnostics {
    int solver_iterations = 0;
    double residual = 0.0;
    double energy_defect = 0.0;
    double grad_l2 = 0.0;
    std::vector<double> residual_history;
};

struct StepResult {
    SpectralField state;
    StepDiagnostics diag;
};

/// Raised when the Picard iteration fails to reach the residual tolerance;
/// the caller should refine the step size.
class solver_error : public std::runtime_error {
public:
    solver_error(const std::string& what, int step_index = -1)
        : std::runtime_error(what), step_index(step_index) {}
    int step_index;
};

struct TrajectoryRecord {
    std::vector<SpectralField> states;        ///< N+1 entries, states[0] = u0
    std::vector<StepDiagnostics> diagnostics;  ///< one per step
    std::uint64_t path_seed = 0;
    SchemeParams params;
};

/// One step of the fully implicit Euler scheme:
///   (u' - u) + dt [nu A u' + B(u', u')] = G(u) dW
/// solved by damped Picard with the exact mode-diagonal viscous resolvent.
StepResult implicit_euler_step(const SpectralField& u_prev, const SchemeParams& params,
                               const NoiseModel& model, IncrementRow dW, double t_prev = 0.0);

/// One step of the semi-implicit scheme, advection frozen at the previous
/// iterate: (v' - v) + dt [nu A v' + B(v, v')] = G(v) dW.
StepResult semi_implicit_step(const SpectralField& v_prev, const SchemeParams& params,
                              const NoiseModel& model, IncrementRow dW, double t_prev = 0.0);

/// Deterministic flow du/dt + nu A u + B(u, u) = 0 over [0, duration],
/// approximated by params.inner_substeps implicit Euler sub-steps.
SpectralField deterministic_substep(const SpectralField& u_start, double duration,
                                    const SchemeParams& params);

/// Pure stochastic flow dy = G(y) dW over one coarse step. Exact for
/// additive noise; Euler-Maruyama over the slice's fine increments for the
/// multiplicative kind.
SpectralField stochastic_substep(const SpectralField& y_start, const NoiseModel& model,
                                 const PathSlice& dW);

/// Lie-Trotter composition: deterministic substep then stochastic substep.
StepResult splitting_step(const SpectralField& state, const SchemeParams& params,
                          const NoiseModel& model, const PathSlice& dW);

/// Streaming trajectory driver; observer sees (k, state, diag) with diag
/// null at k = 0. Throws solver_error with the failing step index.
void drive_trajectory(
    const SpectralField& u0, const SchemeParams& params, const NoiseModel& model,
    const WienerPath& path,
    const std::function<void(int, const SpectralField&, const StepDiagnostics*)>& observer);

TrajectoryRecord run_trajectory(const SpectralField& u0, const SchemeParams& params,
                                const NoiseModel& model, const WienerPath& path);

/// TrajectoryRecord export: (k, t, l2, grad_l2, stokes_l2, solver_iterations,
/// residual, energy_defect) per grid point.
void write_trajectory_csv(const std::string& file, const TrajectoryRecord& record);

std::string scheme_kind_name(SchemeKind k);

}  // namespace sns
