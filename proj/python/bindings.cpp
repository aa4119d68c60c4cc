#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sns/field_io.hpp"
#include "sns/fields.hpp"
#include "sns/harness.hpp"
#include "sns/noise.hpp"
#include "sns/operators.hpp"
#include "sns/schemes.hpp"
#include "sns/theory.hpp"
#include "sns/version.hpp"

namespace py = pybind11;
using namespace sns;

namespace {

py::array_t<Complex> field_to_array(const SpectralField& f) {
    const int n = f.grid.n_modes;
    py::array_t<Complex> out({2, n, n});
    auto buf = out.mutable_unchecked<3>();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            buf(0, i, j) = f.u1[static_cast<size_t>(i) * n + j];
            buf(1, i, j) = f.u2[static_cast<size_t>(i) * n + j];
        }
    return out;
}

SpectralField field_from_array(const Grid& grid, py::array_t<Complex> arr) {
    const auto buf = arr.unchecked<3>();
    const int n = grid.n_modes;
    if (buf.shape(0) != 2 || buf.shape(1) != n || buf.shape(2) != n)
        throw std::invalid_argument("expected a (2, n, n) complex array matching the grid");
    SpectralField f(grid);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            f.u1[static_cast<size_t>(i) * n + j] = buf(0, i, j);
            f.u2[static_cast<size_t>(i) * n + j] = buf(1, i, j);
        }
    return f;
}

std::vector<Complex> row_from_array(const NoiseModel& model, py::array_t<Complex> arr) {
    const auto buf = arr.unchecked<1>();
    if (buf.shape(0) != model.n_retained())
        throw std::invalid_argument("increment row length must equal the retained mode count");
    std::vector<Complex> row(buf.shape(0));
    for (py::ssize_t i = 0; i < buf.shape(0); ++i) row[static_cast<size_t>(i)] = buf(i);
    return row;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Pseudo-spectral time-integration lab for the stochastic 2D Navier-Stokes "
              "equations on the periodic torus";
    m.attr("__version__") = kVersion;

    py::class_<Grid>(m, "Grid")
        .def_readonly("n_modes", &Grid::n_modes)
        .def_readonly("box_length", &Grid::box_length)
        .def_readonly("dealias_cutoff", &Grid::dealias_cutoff)
        .def("wavenumber_unit", &Grid::wavenumber_unit)
        .def("__repr__", [](const Grid& g) {
            return "Grid(n_modes=" + std::to_string(g.n_modes) +
                   ", box_length=" + std::to_string(g.box_length) + ")";
        });
    m.def("make_grid", &make_grid, py::arg("n_modes"), py::arg("box_length"));

    py::class_<SpectralField>(m, "SpectralField")
        .def_readonly("grid", &SpectralField::grid)
        .def("to_array", &field_to_array)
        .def("__add__", [](const SpectralField& a, const SpectralField& b) { return a + b; })
        .def("__sub__", [](const SpectralField& a, const SpectralField& b) { return a - b; })
        .def("__mul__", [](const SpectralField& a, double s) { return a * s; })
        .def("__rmul__", [](const SpectralField& a, double s) { return a * s; });
    m.def("zero_field", [](const Grid& g) { return SpectralField(g); }, py::arg("grid"));
    m.def("field_from_array", &field_from_array, py::arg("grid"), py::arg("coeffs"));

    py::class_<NormBundle>(m, "NormBundle")
        .def_readonly("l2", &NormBundle::l2)
        .def_readonly("grad_l2", &NormBundle::grad_l2)
        .def_readonly("v", &NormBundle::v)
        .def_readonly("l4", &NormBundle::l4)
        .def_readonly("stokes_l2", &NormBundle::stokes_l2)
        .def_readonly("x_norm", &NormBundle::x_norm)
        .def_readonly("triple", &NormBundle::triple);

    m.def("leray_project", &leray_project, py::arg("field"));
    m.def("stokes_apply", &stokes_apply, py::arg("field"));
    m.def("bilinear_b", &bilinear_b, py::arg("u"), py::arg("v"));
    m.def("trilinear_form", &trilinear_form, py::arg("u"), py::arg("v"), py::arg("w"));
    m.def("norm_bundle", &norm_bundle, py::arg("field"));
    m.def("inner_l2", &inner_l2, py::arg("u"), py::arg("v"));
    m.def("norm_l2", &norm_l2, py::arg("field"));
    m.def("divergence_defect", &divergence_defect, py::arg("field"));
    m.def("hermitian_defect", &hermitian_defect, py::arg("field"));

    m.def("taylor_green_field", &taylor_green_field, py::arg("grid"), py::arg("amplitude"));
    m.def("random_solenoidal_field", &random_solenoidal_field, py::arg("grid"), py::arg("decay"),
          py::arg("seed"), py::arg("stream") = 0);

    m.def("write_snapshot", &write_snapshot, py::arg("path"), py::arg("field"));
    m.def("read_snapshot", &read_snapshot, py::arg("path"));

    py::enum_<GKind>(m, "GKind")
        .value("additive", GKind::additive)
        .value("scalar_multiplicative", GKind::scalar_multiplicative);
    py::enum_<Modulation>(m, "Modulation")
        .value("sine", Modulation::sine)
        .value("tanh", Modulation::tanh_sat)
        .value("constant", Modulation::constant);

    py::class_<NoiseModel>(m, "NoiseModel")
        .def_readonly("grid", &NoiseModel::grid)
        .def_readonly("kind", &NoiseModel::kind)
        .def_readonly("sigma", &NoiseModel::sigma)
        .def_readonly("trace_q", &NoiseModel::trace_q)
        .def_readonly("k0", &NoiseModel::k0)
        .def_readonly("k1", &NoiseModel::k1)
        .def_readonly("l1", &NoiseModel::l1)
        .def("n_retained", &NoiseModel::n_retained);
    m.def("build_noise_model", &build_noise_model, py::arg("grid"), py::arg("amplitude"),
          py::arg("exponent"), py::arg("kind"), py::arg("sigma") = 1.0,
          py::arg("modulation") = Modulation::sine, py::arg("modulation_constant") = 1.0);
    m.def("g_hs_norm_sq", &g_hs_norm_sq, py::arg("model"), py::arg("u"));

    py::class_<WienerPath>(m, "WienerPath")
        .def_readonly("seed", &WienerPath::seed)
        .def_readonly("n_fine", &WienerPath::n_fine)
        .def_readonly("dt_fine", &WienerPath::dt_fine)
        .def_readonly("n_modes", &WienerPath::n_modes)
        .def("increments", [](const WienerPath& p) {
            py::array_t<Complex> out({p.n_fine, p.n_modes});
            auto buf = out.mutable_unchecked<2>();
            for (int s = 0; s < p.n_fine; ++s)
                for (int mi = 0; mi < p.n_modes; ++mi)
                    buf(s, mi) = p.increments[static_cast<size_t>(s) * p.n_modes + mi];
            return out;
        });
    m.def("sample_wiener_path", &sample_wiener_path, py::arg("model"), py::arg("horizon"),
          py::arg("n_fine"), py::arg("seed"));
    m.def("coarsen_path", &coarsen_path, py::arg("path"), py::arg("factor"));
    m.def("apply_g",
          [](const NoiseModel& model, const SpectralField& u, py::array_t<Complex> row) {
              const auto r = row_from_array(model, row);
              return apply_g(model, u, r);
          },
          py::arg("model"), py::arg("u"), py::arg("dW"));
    m.def("write_path", &write_path, py::arg("path"), py::arg("wiener_path"));
    m.def("read_path", &read_path, py::arg("path"));

    py::enum_<SchemeKind>(m, "SchemeKind")
        .value("splitting", SchemeKind::splitting)
        .value("fully_implicit", SchemeKind::fully_implicit)
        .value("semi_implicit", SchemeKind::semi_implicit);

    py::class_<SchemeParams>(m, "SchemeParams")
        .def(py::init<>())
        .def_readwrite("viscosity", &SchemeParams::viscosity)
        .def_readwrite("horizon", &SchemeParams::horizon)
        .def_readwrite("n_steps", &SchemeParams::n_steps)
        .def_readwrite("solver_tol", &SchemeParams::solver_tol)
        .def_readwrite("solver_max_iter", &SchemeParams::solver_max_iter)
        .def_readwrite("inner_substeps", &SchemeParams::inner_substeps)
        .def_readwrite("kind", &SchemeParams::kind)
        .def_readwrite("include_advection", &SchemeParams::include_advection);

    py::class_<StepDiagnostics>(m, "StepDiagnostics")
        .def_readonly("solver_iterations", &StepDiagnostics::solver_iterations)
        .def_readonly("residual", &StepDiagnostics::residual)
        .def_readonly("energy_defect", &StepDiagnostics::energy_defect)
        .def_readonly("grad_l2", &StepDiagnostics::grad_l2)
        .def_readonly("residual_history", &StepDiagnostics::residual_history);

    py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
        .def_readonly("states", &TrajectoryRecord::states)
        .def_readonly("diagnostics", &TrajectoryRecord::diagnostics)
        .def_readonly("path_seed", &TrajectoryRecord::path_seed)
        .def_readonly("params", &TrajectoryRecord::params);

    py::register_exception<solver_error>(m, "SolverError");

    m.def("implicit_euler_step",
          [](const SpectralField& u, const SchemeParams& p, const NoiseModel& model,
             py::array_t<Complex> dW) {
              const auto row = row_from_array(model, dW);
              auto r = implicit_euler_step(u, p, model, row);
              return py::make_tuple(std::move(r.state), std::move(r.diag));
          },
          py::arg("u_prev"), py::arg("params"), py::arg("model"), py::arg("dW"));
    m.def("semi_implicit_step",
          [](const SpectralField& v, const SchemeParams& p, const NoiseModel& model,
             py::array_t<Complex> dW) {
              const auto row = row_from_array(model, dW);
              auto r = semi_implicit_step(v, p, model, row);
              return py::make_tuple(std::move(r.state), std::move(r.diag));
          },
          py::arg("v_prev"), py::arg("params"), py::arg("model"), py::arg("dW"));
    m.def("deterministic_substep", &deterministic_substep, py::arg("u_start"),
          py::arg("duration"), py::arg("params"));
    m.def("run_trajectory", &run_trajectory, py::arg("u0"), py::arg("params"), py::arg("model"),
          py::arg("path"));

    py::class_<AnalysisParams>(m, "AnalysisParams")
        .def(py::init<>())
        .def_readwrite("viscosity", &AnalysisParams::viscosity)
        .def_readwrite("horizon", &AnalysisParams::horizon)
        .def_readwrite("k0", &AnalysisParams::k0)
        .def_readwrite("k1", &AnalysisParams::k1)
        .def_readwrite("l1", &AnalysisParams::l1)
        .def_readwrite("q_moment", &AnalysisParams::q_moment)
        .def_readwrite("beta", &AnalysisParams::beta)
        .def_readwrite("eps_bar", &AnalysisParams::eps_bar)
        .def_readwrite("eta", &AnalysisParams::eta)
        .def_readwrite("c_bar", &AnalysisParams::c_bar)
        .def_readwrite("c_tilde", &AnalysisParams::c_tilde)
        .def_readwrite("holder_p", &AnalysisParams::holder_p);

    py::class_<RateConstants>(m, "RateConstants")
        .def_readonly("c_beta", &RateConstants::c_beta)
        .def_readonly("c_tilde_slope", &RateConstants::c_tilde_slope)
        .def_readonly("c1_slope", &RateConstants::c1_slope)
        .def_readonly("alpha0", &RateConstants::alpha0)
        .def_readonly("gamma_sup", &RateConstants::gamma_sup)
        .def("c_tilde_m", [](const RateConstants& r, double m) { return r.c_tilde_m(m); })
        .def("c1_m", [](const RateConstants& r, double m) { return r.c1_m(m); })
        .def("threshold_lin_growth",
             [](const RateConstants& r, double n) { return r.threshold_lin_growth(n); })
        .def("threshold_additive",
             [](const RateConstants& r, double n) { return r.threshold_additive(n); });

    m.def("c_beta", &c_beta, py::arg("beta"), py::arg("c_bar"));
    m.def("splitting_constants", &splitting_constants, py::arg("params"));
    m.def("euler_constants", &euler_constants, py::arg("params"));
    m.def("estimate_gn_constant", &estimate_gn_constant, py::arg("grid"), py::arg("n_samples"),
          py::arg("seed"));

    py::enum_<LocalizationVariant>(m, "LocalizationVariant")
        .value("grad_sup", LocalizationVariant::grad_sup)
        .value("x_norm_sup", LocalizationVariant::x_norm_sup);
    m.def("localization_indicator", &localization_indicator, py::arg("record"),
          py::arg("m_threshold"), py::arg("variant"));

    py::enum_<InitSpec::Kind>(m, "InitKind")
        .value("zero", InitSpec::Kind::zero)
        .value("taylor_green", InitSpec::Kind::taylor_green)
        .value("random_smooth", InitSpec::Kind::random_smooth);
    py::class_<InitSpec>(m, "InitSpec")
        .def(py::init<>())
        .def_readwrite("kind", &InitSpec::kind)
        .def_readwrite("amplitude", &InitSpec::amplitude)
        .def_readwrite("decay", &InitSpec::decay)
        .def_readwrite("seed", &InitSpec::seed);
    m.def("make_initial_condition", &make_initial_condition, py::arg("grid"), py::arg("spec"));

    py::class_<StudyConfig>(m, "StudyConfig")
        .def(py::init<>())
        .def_readwrite("grid", &StudyConfig::grid)
        .def_readwrite("viscosity", &StudyConfig::viscosity)
        .def_readwrite("horizon", &StudyConfig::horizon)
        .def_readwrite("noise", &StudyConfig::noise)
        .def_readwrite("init", &StudyConfig::init)
        .def_readwrite("scheme_kind", &StudyConfig::scheme_kind)
        .def_readwrite("ladder", &StudyConfig::ladder)
        .def_readwrite("reference_n", &StudyConfig::reference_n)
        .def_readwrite("mc_samples", &StudyConfig::mc_samples)
        .def_readwrite("base_seed", &StudyConfig::base_seed)
        .def_readwrite("solver_tol", &StudyConfig::solver_tol)
        .def_readwrite("solver_max_iter", &StudyConfig::solver_max_iter)
        .def_readwrite("inner_substeps", &StudyConfig::inner_substeps)
        .def_readwrite("workers", &StudyConfig::workers);

    py::class_<ErrorRow>(m, "ErrorRow")
        .def_readonly("scheme", &ErrorRow::scheme)
        .def_readonly("n", &ErrorRow::n)
        .def_readonly("dt", &ErrorRow::dt)
        .def_readonly("samples_used", &ErrorRow::samples_used)
        .def_readonly("excluded", &ErrorRow::excluded)
        .def_readonly("est_max_l2_sq", &ErrorRow::est_max_l2_sq)
        .def_readonly("se_max", &ErrorRow::se_max)
        .def_readonly("est_v_sum", &ErrorRow::est_v_sum)
        .def_readonly("se_v", &ErrorRow::se_v);

    py::class_<RateFit>(m, "RateFit")
        .def_readonly("metric", &RateFit::metric)
        .def_readonly("order", &RateFit::order)
        .def_readonly("intercept", &RateFit::intercept)
        .def_readonly("half_width", &RateFit::half_width);

    py::class_<ErrorReport>(m, "ErrorReport")
        .def_readonly("rows", &ErrorReport::rows)
        .def_readonly("fits", &ErrorReport::fits)
        .def_readonly("warnings", &ErrorReport::warnings);

    m.def("strong_error_study", &strong_error_study, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("fit_rate",
          [](const std::vector<std::pair<double, double>>& pts) {
              const FitResult f = fit_rate(pts);
              return py::make_tuple(f.order, f.intercept, f.half_width);
          },
          py::arg("n_value_pairs"));
}
