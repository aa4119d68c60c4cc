#include "sns/schemes.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "sns/field_io.hpp"

namespace sns {
namespace {

/// (I + nu dt A)^{-1}, diagonal per mode.
void apply_resolvent(SpectralField& f, double nu_dt) {
    const Grid& g = f.grid;
    const int n = g.n_modes;
    const double unit2 = g.wavenumber_unit() * g.wavenumber_unit();
    for (int i = 0; i < n; ++i) {
        const double k1 = g.wrap(i);
        for (int j = 0; j < n; ++j) {
            const double k2 = g.wrap(j);
            const size_t idx = static_cast<size_t>(i) * n + j;
            const double r = 1.0 / (1.0 + nu_dt * (k1 * k1 + k2 * k2) * unit2);
            f.u1[idx] *= r;
            f.u2[idx] *= r;
        }
    }
}

double residual_norm(const SpectralField& w, const SpectralField& bw, const SpectralField& rhs,
                     double nu, double dt) {
    SpectralField r = stokes_apply(w);
    r *= nu * dt;
    r += w;
    add_scaled(r, bw, dt);
    r -= rhs;
    return norm_l2(r);
}

struct SolveOutput {
    SpectralField state;
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> history;
};

/// Damped Picard for  w + dt [nu A w + B_op(w)] = rhs  with the viscous
/// resolvent as preconditioner. B_op is either B(w, w) or B(frozen, w).
SolveOutput picard_solve(const SpectralField& initial, const SpectralField& rhs,
                         const SchemeParams& params, double dt,
                         const std::function<SpectralField(const SpectralField&)>& b_op) {
    const double nu = params.viscosity;

    if (!params.include_advection) {
        SolveOutput out{rhs, 1, 0.0, {0.0}};
        apply_resolvent(out.state, nu * dt);
        return out;
    }

    SpectralField w = initial;
    SpectralField bw = b_op(w);
    double omega = 1.0;
    double prev_res = std::numeric_limits<double>::infinity();
    SolveOutput out;

    for (int iter = 1; iter <= params.solver_max_iter; ++iter) {
        SpectralField proposal = rhs;
        add_scaled(proposal, bw, -dt);
        apply_resolvent(proposal, nu * dt);
        if (omega < 1.0) {
            proposal *= omega;
            add_scaled(proposal, w, 1.0 - omega);
        }
        SpectralField bp = b_op(proposal);
        const double res = residual_norm(proposal, bp, rhs, nu, dt);
        out.history.push_back(res);
        if (!std::isfinite(res))
            throw solver_error("Picard iteration diverged (non-finite residual); "
                               "the step size is too large for the contraction");
        w = std::move(proposal);
        bw = std::move(bp);
        if (res <= params.solver_tol) {
            out.state = std::move(w);
            out.iterations = iter;
            out.residual = res;
            return out;
        }
        if (res >= prev_res) omega = std::max(0.125, 0.5 * omega);
        prev_res = res;
    }
    std::ostringstream msg;
    msg << "Picard iteration did not reach tol " << params.solver_tol << " within "
        << params.solver_max_iter << " iterations (residual " << prev_res
        << "); the step size is too large for the contraction";
    throw solver_error(msg.str());
}

double energy_defect_of(const SpectralField& u_next, const SpectralField& u_prev,
                        const SpectralField* forcing, double nu, double dt) {
    const double g1 = norm_grad_l2(u_next);
    double d = inner_l2(u_next - u_prev, u_next) + nu * dt * g1 * g1;
    if (forcing) d -= inner_l2(*forcing, u_next);
    return d;
}

}  // namespace

void SchemeParams::validate() const {
    if (!(viscosity > 0.0)) throw std::invalid_argument("scheme: viscosity must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("scheme: horizon must be positive");
    if (n_steps < 1) throw std::invalid_argument("scheme: n_steps must be >= 1");
    if (!(solver_tol > 0.0)) throw std::invalid_argument("scheme: solver_tol must be positive");
    if (solver_max_iter < 1) throw std::invalid_argument("scheme: solver_max_iter must be >= 1");
    if (inner_substeps < 1) throw std::invalid_argument("scheme: inner_substeps must be >= 1");
}

StepResult implicit_euler_step(const SpectralField& u_prev, const SchemeParams& params,
                               const NoiseModel& model, IncrementRow dW, double /*t_prev*/) {
    params.validate();
    const double dt = params.dt();
    const SpectralField forcing = apply_g(model, u_prev, dW);
    SpectralField rhs = u_prev + forcing;
    auto sol = picard_solve(u_prev, rhs, params, dt,
                            [](const SpectralField& w) { return bilinear_b(w, w); });
    StepDiagnostics diag;
    diag.solver_iterations = sol.iterations;
    diag.residual = sol.residual;
    diag.residual_history = std::move(sol.history);
    diag.energy_defect = energy_defect_of(sol.state, u_prev, &forcing, params.viscosity, dt);
    diag.grad_l2 = norm_grad_l2(sol.state);
    return {std::move(sol.state), std::move(diag)};
}

StepResult semi_implicit_step(const SpectralField& v_prev, const SchemeParams& params,
                              const NoiseModel& model, IncrementRow dW, double /*t_prev*/) {
    params.validate();
    const double dt = params.dt();
    const SpectralField forcing = apply_g(model, v_prev, dW);
    SpectralField rhs = v_prev + forcing;
    auto sol = picard_solve(v_prev, rhs, params, dt,
                            [&](const SpectralField& w) { return bilinear_b(v_prev, w); });
    StepDiagnostics diag;
    diag.solver_iterations = sol.iterations;
    diag.residual = sol.residual;
    diag.residual_history = std::move(sol.history);
    diag.energy_defect = energy_defect_of(sol.state, v_prev, &forcing, params.viscosity, dt);
    diag.grad_l2 = norm_grad_l2(sol.state);
    return {std::move(sol.state), std::move(diag)};
}

namespace {

struct InnerDiag {
    int iterations = 0;
    double max_residual = 0.0;
    double max_defect = 0.0;
};

SpectralField deterministic_flow(const SpectralField& u_start, double duration,
                                 const SchemeParams& params, InnerDiag* agg) {
    if (!(duration > 0.0)) throw std::invalid_argument("deterministic_substep: duration must be positive");
    params.validate();
    const double delta = duration / params.inner_substeps;
    SpectralField u = u_start;
    for (int s = 0; s < params.inner_substeps; ++s) {
        auto sol = picard_solve(u, u, params, delta,
                                [](const SpectralField& w) { return bilinear_b(w, w); });
        if (agg) {
            agg->iterations += sol.iterations;
            agg->max_residual = std::max(agg->max_residual, sol.residual);
            agg->max_defect = std::max(
                agg->max_defect,
                std::abs(energy_defect_of(sol.state, u, nullptr, params.viscosity, delta)));
        }
        u = std::move(sol.state);
    }
    return u;
}

}  // namespace

SpectralField deterministic_substep(const SpectralField& u_start, double duration,
                                    const SchemeParams& params) {
    return deterministic_flow(u_start, duration, params, nullptr);
}

SpectralField stochastic_substep(const SpectralField& y_start, const NoiseModel& model,
                                 const PathSlice& dW) {
    if (model.kind == GKind::additive) {
        const auto total = total_increment(dW);
        return y_start + apply_g(model, y_start, total);
    }
    SpectralField y = y_start;
    for (int j = 0; j < dW.count; ++j) y += apply_g(model, y, dW.row(j));
    return y;
}

StepResult splitting_step(const SpectralField& state, const SchemeParams& params,
                          const NoiseModel& model, const PathSlice& dW) {
    InnerDiag inner;
    SpectralField u = deterministic_flow(state, params.dt(), params, &inner);
    SpectralField z = stochastic_substep(u, model, dW);
    StepDiagnostics diag;
    diag.solver_iterations = inner.iterations;
    diag.residual = inner.max_residual;
    diag.energy_defect = inner.max_defect;
    diag.grad_l2 = norm_grad_l2(z);
    return {std::move(z), std::move(diag)};
}

void drive_trajectory(
    const SpectralField& u0, const SchemeParams& params, const NoiseModel& model,
    const WienerPath& path,
    const std::function<void(int, const SpectralField&, const StepDiagnostics*)>& observer) {
    params.validate();
    if (!(u0.grid == model.grid)) throw std::invalid_argument("drive_trajectory: grid mismatch");
    if (path.n_fine % params.n_steps != 0)
        throw std::invalid_argument("drive_trajectory: path.n_fine must be divisible by n_steps");
    const int factor = path.n_fine / params.n_steps;

    WienerPath coarse;
    const bool euler =
        params.kind == SchemeKind::fully_implicit || params.kind == SchemeKind::semi_implicit;
    if (euler && factor > 1) coarse = coarsen_path(path, factor);
    const WienerPath& steps = (euler && factor > 1) ? coarse : path;

    SpectralField u = u0;
    observer(0, u, nullptr);
    for (int k = 0; k < params.n_steps; ++k) {
        const double t_prev = k * params.dt();
        try {
            StepResult r = [&] {
                switch (params.kind) {
                    case SchemeKind::fully_implicit:
                        return implicit_euler_step(u, params, model, steps.row(k), t_prev);
                    case SchemeKind::semi_implicit:
                        return semi_implicit_step(u, params, model, steps.row(k), t_prev);
                    case SchemeKind::splitting:
                        return splitting_step(u, params, model,
                                              PathSlice{&path, k * factor, factor});
                }
                throw std::logic_error("unknown scheme kind");
            }();
            u = std::move(r.state);
            observer(k + 1, u, &r.diag);
        } catch (const solver_error& e) {
            throw solver_error(std::string(e.what()) + " at step " + std::to_string(k + 1), k + 1);
        }
    }
}

TrajectoryRecord run_trajectory(const SpectralField& u0, const SchemeParams& params,
                                const NoiseModel& model, const WienerPath& path) {
    TrajectoryRecord rec;
    rec.path_seed = path.seed;
    rec.params = params;
    rec.states.reserve(params.n_steps + 1);
    rec.diagnostics.reserve(params.n_steps);
    drive_trajectory(u0, params, model, path,
                     [&](int, const SpectralField& state, const StepDiagnostics* diag) {
                         rec.states.push_back(state);
                         if (diag) rec.diagnostics.push_back(*diag);
                     });
    return rec;
}

void write_trajectory_csv(const std::string& file, const TrajectoryRecord& record) {
    std::ofstream os(file);
    if (!os) throw io_error("trajectory csv: cannot open " + file);
    os << "k,t,l2,grad_l2,stokes_l2,solver_iterations,residual,energy_defect\n";
    char buf[256];
    const double dt = record.params.dt();
    for (size_t k = 0; k < record.states.size(); ++k) {
        const NormBundle nb = norm_bundle(record.states[k]);
        const StepDiagnostics* d = k > 0 ? &record.diagnostics[k - 1] : nullptr;
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g\n", k, k * dt,
                      nb.l2, nb.grad_l2, nb.stokes_l2, d ? d->solver_iterations : 0,
                      d ? d->residual : 0.0, d ? d->energy_defect : 0.0);
        os << buf;
    }
    if (!os) throw io_error("trajectory csv: write failed for " + file);
}

std::string scheme_kind_name(SchemeKind k) {
    switch (k) {
        case SchemeKind::splitting: return "splitting";
        case SchemeKind::fully_implicit: return "fully_implicit";
        case SchemeKind::semi_implicit: return "semi_implicit";
    }
    return "unknown";
}

}  // namespace sns
