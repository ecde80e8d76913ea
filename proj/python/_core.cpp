#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "levscat/channels.hpp"
#include "levscat/error.hpp"
#include "levscat/greens.hpp"
#include "levscat/harness.hpp"
#include "levscat/radial.hpp"
#include "levscat/scattering.hpp"
#include "levscat/specfun.hpp"
#include "levscat/ssf.hpp"
#include "levscat/threshold.hpp"

namespace py = pybind11;
using namespace levscat;
namespace hs = levscat::harness;

namespace {

// JSON documents cross the boundary as Python objects through the json module.
py::object to_python(const hs::json& doc) { return py::module_::import("json").attr("loads")(doc.dump()); }

hs::json from_python(const py::object& obj) {
  return hs::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Levinson identities for critical-decay potentials";
  m.attr("__version__") = hs::version();

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<Segment>(m, "Segment")
      .def(py::init([](double r0, double r1, std::vector<double> poly) { return Segment{r0, r1, std::move(poly)}; }),
           py::arg("r0"), py::arg("r1"), py::arg("poly"))
      .def_readwrite("r0", &Segment::r_begin)
      .def_readwrite("r1", &Segment::r_end)
      .def_readwrite("poly", &Segment::poly)
      .def("__call__", &Segment::operator());

  py::class_<PotentialSpec>(m, "PotentialSpec")
      .def(py::init<>())
      .def_readwrite("n", &PotentialSpec::n)
      .def_property(
          "q", [](const PotentialSpec& s) { return s.q.cosine; },
          [](PotentialSpec& s, std::vector<double> c) { s.q.cosine = std::move(c); })
      .def_readwrite("w", &PotentialSpec::w)
      .def_readwrite("r_cut", &PotentialSpec::r_cut)
      .def_readwrite("g", &PotentialSpec::g)
      .def_static("square_well", &PotentialSpec::square_well, py::arg("n"), py::arg("q0"), py::arg("depth"),
                  py::arg("radius") = 1.0)
      .def_static("free", &PotentialSpec::free, py::arg("n"), py::arg("q0"), py::arg("radius") = 1.0)
      .def("profile", &PotentialSpec::profile)
      .def("with_coupling", &PotentialSpec::with_coupling)
      .def("structural_problems", &PotentialSpec::structural_problems)
      .def("check", &PotentialSpec::check);

  py::class_<Channel>(m, "Channel")
      .def(py::init([](double nu, int mult, double lambda_nu) { return Channel{lambda_nu, nu, mult}; }), py::arg("nu"),
           py::arg("mult") = 1, py::arg("lambda_nu") = 0.0)
      .def_readwrite("lambda_nu", &Channel::lambda_nu)
      .def_readwrite("nu", &Channel::nu)
      .def_readwrite("mult", &Channel::mult)
      .def("__repr__", [](const Channel& c) {
        return "Channel(nu=" + std::to_string(c.nu) + ", mult=" + std::to_string(c.mult) + ")";
      });

  py::class_<ChannelSet>(m, "ChannelSet")
      .def_readonly("channels", &ChannelSet::channels)
      .def_readonly("sigma1", &ChannelSet::sigma1)
      .def_readonly("truncation_nu_max", &ChannelSet::truncation_nu_max);

  m.def("build_channels", &build_channels, py::arg("spec"), py::arg("nu_max"));
  m.def("bessel_jy", [](double nu, double x) {
    const auto p = bessel_jy(nu, x);
    return py::make_tuple(p.j, p.y, p.jprime, p.yprime);
  });
  m.def("gamma", &gamma_fn);
  m.def("c_nu", &c_nu);

  m.def("zero_energy_coefficients", [](const Channel& ch, const PotentialSpec& spec) {
    const auto z = zero_energy_coefficients(ch, spec);
    return py::dict(py::arg("a") = z.a, py::arg("b") = z.b, py::arg("pairing") = z.pairing);
  });
  m.def("count_negative_eigenvalues", [](const Channel& ch, const PotentialSpec& spec) {
    return count_negative_eigenvalues(ch, spec);
  });
  m.def("critical_coupling",
        [](const Channel& ch, const PotentialSpec& spec, double lo, double hi) {
          return critical_coupling(ch, spec, lo, hi);
        },
        py::arg("channel"), py::arg("spec"), py::arg("g_lo"), py::arg("g_hi"));
  m.def("classify_threshold", [](const ChannelSet& set, const PotentialSpec& spec) {
    return to_python(hs::to_json(classify_threshold(set, spec)));
  });

  m.def("phase_shift", [](const Channel& ch, const PotentialSpec& spec, double k) { return phase_shift(ch, spec, k); });
  m.def("born_phase", [](const Channel& ch, const PotentialSpec& spec, double k) { return born_phase(ch, spec, k); });
  m.def("phase_curve", [](const Channel& ch, const PotentialSpec& spec, const std::vector<double>& k_grid) {
    const auto pc = phase_curve(ch, spec, k_grid);
    return py::dict(py::arg("k") = pc.k_grid, py::arg("delta") = pc.delta, py::arg("delta_zero") = pc.delta0_limit,
                    py::arg("bound_states") = pc.bound_states, py::arg("threshold_singular") = pc.threshold_singular);
  });

  m.def("kernel", &kernel, py::arg("channel"), py::arg("n"), py::arg("z"), py::arg("r"), py::arg("tau"));
  m.def("zero_energy_kernel", &zero_energy_kernel);
  m.def("extract_gnu0", [](const Channel& ch, int n, double r, double tau) { return extract_gnu0(ch, n, r, tau).value; });
  m.def("extract_g11", [](int n, double r, double tau) {
    const auto f = extract_g11(n, r, tau);
    return py::make_tuple(f.alpha, f.beta);
  });

  m.def(
      "levinson_check",
      [](const PotentialSpec& spec, double tol_scale) {
        LevinsonReport rep;
        {
          py::gil_scoped_release release;
          rep = levinson_check(spec, SSFOptions::with_tol_scale(tol_scale));
        }
        return to_python(hs::to_json(rep));
      },
      py::arg("spec"), py::arg("tol_scale") = 1.0);

  m.def("validate", [](const py::object& scenario) { return hs::validate(hs::scenario_from_json(from_python(scenario))); });
  m.def("scenario_hash", [](const py::object& scenario) { return hs::scenario_hash(hs::scenario_from_json(from_python(scenario))); });
  m.def(
      "run",
      [](const py::object& scenario, const std::string& out, int threads, double tol_scale) {
        const auto s = hs::scenario_from_json(from_python(scenario));
        hs::RunRecord rec;
        {
          py::gil_scoped_release release;
          rec = hs::run(s, hs::RunOptions{out, threads, tol_scale});
        }
        return to_python(rec.to_json());
      },
      py::arg("scenario"), py::arg("out") = "results", py::arg("threads") = 1, py::arg("tol_scale") = 1.0);
}
