#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lowmach/analysis.hpp"
#include "lowmach/elliptic.hpp"
#include "lowmach/error.hpp"
#include "lowmach/harness.hpp"
#include "lowmach/oracle1d.hpp"
#include "lowmach/snapshot.hpp"
#include "lowmach/solvers.hpp"

namespace py = pybind11;
using namespace lowmach;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// (rows, nx) copy of the samples
Array to_numpy(const ScalarField& f) {
  Array a({f.rows(), f.nx()});
  std::copy(f.values().begin(), f.values().end(), a.mutable_data());
  return a;
}

ScalarField from_numpy(const DomainSpec& d, Parity p, const Array& a) {
  const ScalarField shape(d, p);
  if (a.ndim() != 2 || a.shape(0) != shape.rows() || a.shape(1) != shape.nx())
    throw InputError("array shape must be (" + std::to_string(shape.rows()) + ", " + std::to_string(shape.nx()) + ")");
  return ScalarField(d, p, std::vector<double>(a.data(), a.data() + a.size()));
}

py::dict series_dict(const std::vector<TimeSeriesRow>& rows) {
  std::vector<double> t, kin, mass, f4, fdot3, div0, dt;
  for (const auto& r : rows) {
    t.push_back(r.t);
    kin.push_back(r.kinetic);
    mass.push_back(r.mass);
    f4.push_back(r.f4);
    fdot3.push_back(r.fdot3);
    div0.push_back(r.div0);
    dt.push_back(r.dt);
  }
  py::dict d;
  d["t"] = t;
  d["kinetic"] = kin;
  d["mass"] = mass;
  d["f4"] = f4;
  d["fdot3"] = fdot3;
  d["div0"] = div0;
  d["dt"] = dt;
  return d;
}

RunOptions run_options(double t_final, std::optional<double> dt, double dt_safety) {
  RunOptions o;
  o.t_final = t_final;
  o.dt = dt;
  o.dt_safety = dt_safety;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Compressible and incompressible Euler solvers for low Mach number studies";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<CflError>(m, "CflError", numerical.ptr());
  py::register_exception<NonFiniteError>(m, "NonFiniteError", numerical.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", numerical.ptr());
  py::register_exception<HorizonError>(m, "HorizonError", numerical.ptr());

  // ---- domain and fields ----
  py::enum_<Geometry>(m, "Geometry").value("Torus2D", Geometry::Torus2D).value("Channel2D", Geometry::Channel2D);
  py::enum_<Parity>(m, "Parity")
      .value("Periodic", Parity::Periodic)
      .value("EvenInY", Parity::EvenInY)
      .value("OddInY", Parity::OddInY)
      .value("General", Parity::General);
  py::enum_<Interpolation>(m, "Interpolation").value("Exact", Interpolation::Exact).value("Fast", Interpolation::Fast);

  py::class_<DomainSpec>(m, "DomainSpec")
      .def_static("torus", &DomainSpec::torus, py::arg("nx"), py::arg("ny"), py::arg("lx") = 1.0, py::arg("ly") = 0.0)
      .def_static("channel", &DomainSpec::channel, py::arg("nx"), py::arg("ny"), py::arg("lx") = 1.0)
      .def_readonly("geometry", &DomainSpec::geometry)
      .def_readonly("nx", &DomainSpec::nx)
      .def_readonly("ny", &DomainSpec::ny)
      .def_readonly("lx", &DomainSpec::lx)
      .def_readonly("ly", &DomainSpec::ly)
      .def("is_channel", &DomainSpec::is_channel)
      .def("scalar_parity", &DomainSpec::scalar_parity)
      .def("__eq__", [](const DomainSpec& a, const DomainSpec& b) { return a == b; });

  py::class_<ScalarField>(m, "ScalarField")
      .def(py::init(&from_numpy), py::arg("domain"), py::arg("parity"), py::arg("values"))
      .def_static("constant", &ScalarField::constant)
      .def_property_readonly("domain", &ScalarField::domain)
      .def_property_readonly("parity", &ScalarField::parity)
      .def("to_numpy", &to_numpy)
      .def("coordinates",
           [](const ScalarField& f) {
             std::vector<double> x, y;
             for (int i = 0; i < f.nx(); ++i) x.push_back(f.x(i));
             for (int j = 0; j < f.rows(); ++j) y.push_back(f.y(j));
             return py::make_tuple(x, y);
           })
      .def("max_abs", &ScalarField::max_abs)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(double() * py::self)
      .def(py::self * double());

  py::class_<VectorField>(m, "VectorField")
      .def(py::init<ScalarField, ScalarField>())
      .def_static("zero", &VectorField::zero, py::arg("domain"), py::arg("general") = false)
      .def_readwrite("x", &VectorField::x)
      .def_readwrite("y", &VectorField::y)
      .def_property_readonly("domain", &VectorField::domain)
      .def("max_abs", &VectorField::max_abs)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(double() * py::self);

  m.def("random_field", &random_field, py::arg("domain"), py::arg("parity"), py::arg("band"), py::arg("seed"),
        py::arg("decay") = 2.0);
  m.def("random_vector_field", &random_vector_field, py::arg("domain"), py::arg("band"), py::arg("seed"),
        py::arg("decay") = 2.0, py::arg("general") = false);

  m.def("dx", &dx);
  m.def("dy", &dy);
  m.def("grad", &grad);
  m.def("div", [](const VectorField& u) { return lowmach::div(u); });
  m.def("delta", &delta);
  m.def("laplacian", &laplacian);
  m.def("dealias", py::overload_cast<const ScalarField&>(&dealias));
  m.def("dealias", py::overload_cast<const VectorField&>(&dealias));
  m.def("inner", py::overload_cast<const ScalarField&, const ScalarField&>(&inner));
  m.def("inner", py::overload_cast<const VectorField&, const VectorField&>(&inner));
  m.def("integrate", &integrate);
  m.def("mean", &mean);
  m.def(
      "sobolev_norm",
      [](const ScalarField& f, double s) { return sobolev_norm(f, SobolevIndex{s}); }, py::arg("f"), py::arg("s"));
  m.def(
      "sobolev_norm",
      [](const VectorField& u, double s) { return sobolev_norm(u, SobolevIndex{s}); }, py::arg("u"), py::arg("s"));
  m.def("to_general", py::overload_cast<const ScalarField&>(&to_general));
  m.def("to_general", py::overload_cast<const VectorField&>(&to_general));

  // ---- elliptic ----
  m.def("inverse_laplacian", &inverse_laplacian);
  m.def("project_p", &project_p);
  m.def("project_q", &project_q);
  m.def("helmholtz_decompose", [](const VectorField& w) {
    const Helmholtz h = helmholtz_decompose(w);
    return py::make_tuple(h.p, h.q);
  });

  // ---- equation of state ----
  py::class_<Eos>(m, "Eos")
      .def_static("linear", &Eos::linear)
      .def_static("gamma_law", &Eos::gamma_law, py::arg("k"), py::arg("gamma") = 1.4)
      .def_readwrite("k", &Eos::k)
      .def_readwrite("gamma", &Eos::gamma)
      .def("pressure", &Eos::pressure)
      .def("derivative", &Eos::derivative)
      .def("c2_of_f", &Eos::c2_of_f);
  m.def("sound_speed_sq", &sound_speed_sq);

  // ---- solvers ----
  py::class_<EulerState>(m, "EulerState")
      .def(py::init([](VectorField v, double t) { return EulerState{std::move(v), t}; }), py::arg("v"),
           py::arg("t") = 0.0)
      .def_readwrite("v", &EulerState::v)
      .def_readwrite("t", &EulerState::t);
  py::class_<CompressibleState>(m, "CompressibleState")
      .def(py::init([](VectorField u, ScalarField f, double t) { return CompressibleState{std::move(u), std::move(f), t}; }),
           py::arg("u"), py::arg("f"), py::arg("t") = 0.0)
      .def_readwrite("u", &CompressibleState::u)
      .def_readwrite("f", &CompressibleState::f)
      .def_readwrite("t", &CompressibleState::t);

  m.def("kinetic_energy", py::overload_cast<const VectorField&>(&kinetic_energy));
  m.def("total_mass", &total_mass);
  m.def("cfl_dt", py::overload_cast<const CompressibleState&, const Eos&, double>(&cfl_dt), py::arg("state"),
        py::arg("eos"), py::arg("cfl") = kDefaultCfl);
  m.def(
      "run_incompressible",
      [](const EulerState& s, double t_final, std::optional<double> dt, double dt_safety) {
        const EulerRun r = run_incompressible(s, run_options(t_final, dt, dt_safety));
        return py::make_tuple(r.final, series_dict(r.series));
      },
      py::arg("state"), py::arg("t_final"), py::arg("dt") = py::none(), py::arg("dt_safety") = kDefaultCfl,
      "Returns (final state, time series dict).");
  m.def(
      "run_compressible",
      [](const CompressibleState& s, const Eos& eos, double t_final, std::optional<double> dt, double dt_safety) {
        const CompressibleRun r = run_compressible(s, eos, run_options(t_final, dt, dt_safety));
        return py::make_tuple(r.final, series_dict(r.series));
      },
      py::arg("state"), py::arg("eos"), py::arg("t_final"), py::arg("dt") = py::none(),
      py::arg("dt_safety") = kDefaultCfl, "Returns (final state, time series dict).");

  // ---- analysis ----
  py::class_<CascadeReport>(m, "CascadeReport")
      .def_readonly("t", &CascadeReport::t)
      .def_readonly("k", &CascadeReport::k)
      .def_readonly("f4", &CascadeReport::f4)
      .def_readonly("fdot3", &CascadeReport::fdot3)
      .def_readonly("fddot2", &CascadeReport::fddot2)
      .def_readonly("fdddot1", &CascadeReport::fdddot1)
      .def_readonly("E", &CascadeReport::E)
      .def_readonly("E1", &CascadeReport::E1);
  m.def("cascade", &cascade);

  py::class_<CompatReport>(m, "CompatReport")
      .def_readonly("phi1", &CompatReport::phi1)
      .def_readonly("phi2", &CompatReport::phi2)
      .def_readonly("phi3", &CompatReport::phi3)
      .def("scaled", &CompatReport::scaled);
  py::class_<CompatProjection>(m, "CompatProjection")
      .def_readonly("u", &CompatProjection::u)
      .def_readonly("f", &CompatProjection::f)
      .def_readonly("report", &CompatProjection::report)
      .def_readonly("contraction", &CompatProjection::contraction)
      .def_readonly("iterations", &CompatProjection::iterations);
  m.def("compat_residuals", &compat_residuals);
  m.def(
      "compat_project",
      [](const VectorField& u, const ScalarField& f, const Eos& eos, int max_iter, double tol) {
        return compat_project(u, f, eos, CompatOptions{max_iter, tol});
      },
      py::arg("u"), py::arg("f"), py::arg("eos"), py::arg("max_iter") = 30, py::arg("tol") = 1e-8);

  // ---- Burgers oracle (profiles are lists sampled at x_j = j / n) ----
  auto prof = [](const std::vector<double>& v) { return Profile1D{v}; };
  m.def("burgers_horizon", [prof](const std::vector<double>& u0) { return burgers_horizon(prof(u0)); });
  m.def("burgers_exact", [prof](const std::vector<double>& u0, double t) { return burgers_exact(prof(u0), t).v; });
  m.def("burgers_numeric",
        [prof](const std::vector<double>& u0, double t, int n) { return burgers_numeric(prof(u0), t, n).v; });
  m.def("burgers_sensitivity_exact", [prof](const std::vector<double>& u0, const std::vector<double>& z0, double t) {
    return burgers_sensitivity_exact(prof(u0), prof(z0), t).v;
  });

  // ---- configuration, sweep and fits ----
  py::class_<Config>(m, "Config")
      .def(py::init<>())
      .def_static("parse", &parse_config)
      .def_static("load", &load_config)
      .def("set", [](Config& c, const std::string& key, const std::string& value) { apply_setting(c, key, value); })
      .def("entries", &Config::entries)
      .def_readwrite("domain", &Config::domain)
      .def_readwrite("eos", &Config::eos)
      .def_readwrite("k_list", &Config::k_list);
  m.def("config_keys", &config_keys);

  m.def(
      "initial_state",
      [](const Config& c, double k) {
        const InitialData d = initial_data(c);
        return CompressibleState{velocity_for(d, c, k), log_density_for(d, c, k), 0.0};
      },
      py::arg("config"), py::arg("k"), "Well-prepared data (u_0k, f_0k) of the configured family.");

  py::class_<SlopeFit>(m, "SlopeFit")
      .def_readonly("slope", &SlopeFit::slope)
      .def_readonly("intercept", &SlopeFit::intercept)
      .def_readonly("stderr", &SlopeFit::stderr_)
      .def_readonly("points", &SlopeFit::points)
      .def("constant", &SlopeFit::constant);
  m.def("fit_slope", &fit_slope);

  m.def(
      "run_sweep",
      [](const Config& c, bool approx, bool operators) {
        const SweepResult r = run_sweep(c, SweepOptions{approx, operators});
        py::dict out;
        py::dict slopes;
        for (const auto& [name, fit] : r.slopes) slopes[py::str(name)] = fit;
        out["slopes"] = slopes;
        py::list cells;
        for (const auto& cell : r.cells) {
          py::dict e;
          e["k"] = cell.k;
          e["ok"] = cell.ok;
          e["error"] = cell.error;
          e["u_err_h1"] = cell.u_err_h1;
          e["rho_err_l2"] = cell.rho_err_l2;
          e["f4"] = cell.f4;
          e["fdot3"] = cell.fdot3;
          e["fddot2"] = cell.fddot2;
          e["fdddot1"] = cell.fdddot1;
          e["increment_h1"] = cell.increment_h1;
          e["error_h1"] = cell.error_h1;
          e["linv_norm"] = cell.linv_norm;
          cells.append(e);
        }
        out["cells"] = cells;
        out["times"] = r.times;
        out["incomplete"] = r.incomplete;
        return out;
      },
      py::arg("config"), py::arg("approx") = true, py::arg("operators") = true);

  m.def("write_snapshot", &write_snapshot);
  m.def("read_snapshot", [](const std::string& path) {
    const Snapshot s = read_snapshot(path);
    return py::make_tuple(s.field, s.name, s.time);
  });
}
