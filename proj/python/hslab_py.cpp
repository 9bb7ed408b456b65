#include "hslab/app/commands.hpp"
#include "hslab/errors.hpp"
#include "hslab/fre.hpp"
#include "hslab/phases.hpp"
#include "hslab/regions.hpp"
#include "hslab/sharpness.hpp"
#include "hslab/spectral.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace hslab;

namespace {

Coefficients coeffs(double a, cplx beta, cplx gamma, cplx theta) {
    Coefficients c{a, beta, gamma, theta};
    c.validate();
    return c;
}

std::vector<double> real_part(const std::vector<cplx>& z) {
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i].real();
    return out;
}

py::dict verdict_dict(const Verdict& v) {
    py::dict d;
    d["supported"] = v.supported;
    d["lwp"] = std::string(to_string(v.lwp));
    d["illposed"] = std::string(to_string(v.illposed));
    d["gwp"] = std::string(to_string(v.gwp));
    d["open_region"] = v.open_region;
    return d;
}

} // namespace

PYBIND11_MODULE(_hslab, m) {
    m.doc() = "Bindings for the hslab core";
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    m.def("phi1u", &phi1u, py::arg("a"), py::arg("xi1"), py::arg("xi2"));
    m.def("phi2u", &phi2u, py::arg("a"), py::arg("xi1"), py::arg("xi2"));
    m.def("phiv", &phiv, py::arg("a"), py::arg("xi1"), py::arg("xi2"));
    m.def("phase", [](const std::string& name, double a, std::vector<double> freqs) {
        return eval_phase(phase_from_name(name), a, freqs);
    }, py::arg("name"), py::arg("a"), py::arg("freqs"));
    m.def("mu", &mu, py::arg("a"));
    m.def("phase_floor", &phase_floor, py::arg("a"));

    m.def("classify", [](double a, const std::string& k, const std::string& s) {
        return verdict_dict(classify(a, RegularityPoint::parse(k, s)));
    }, py::arg("a"), py::arg("k"), py::arg("s"), "k and s as decimal or p/q strings, parsed exactly");
    m.def("in_A", [](double a, double k, double s) { return in_A(a, RegularityPoint::of(k, s)); });
    m.def("in_A0", [](double a, double k, double s) { return in_A0(a, RegularityPoint::of(k, s)); });

    m.def(
        "simulate",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> u0,
           py::array_t<double, py::array::c_style | py::array::forcecast> v0, double L, double T, double dt, double a,
           cplx beta, cplx gamma, cplx theta) {
            if (u0.ndim() != 1 || v0.ndim() != 1 || u0.size() != v0.size())
                throw DomainError("u0 and v0 must be 1-d arrays of the same length");
            const Grid g(L, static_cast<int>(u0.size()));
            SimState s = make_state(g, std::span<const double>(u0.data(), u0.size()),
                                    std::span<const double>(v0.data(), v0.size()), coeffs(a, beta, gamma, theta));
            SolverConfig cfg;
            cfg.dt = dt;
            cfg.validate();
            SimState e;
            {
                py::gil_scoped_release nogil;
                e = integrate(s, cfg, T);
            }
            Transform tr(g.n());
            const Invariants i0 = invariants_eval(s, tr), i1 = invariants_eval(e, tr);
            py::dict out;
            out["u"] = py::array_t<double>(py::cast(real_part(to_physical(e.uhat, tr))));
            out["v"] = py::array_t<double>(py::cast(real_part(to_physical(e.vhat, tr))));
            out["t"] = e.t;
            out["M0"] = i0.M;
            out["M"] = i1.M;
            out["E0"] = i0.E;
            out["E"] = i1.E;
            return out;
        },
        py::arg("u0"), py::arg("v0"), py::arg("L"), py::arg("T"), py::arg("dt"), py::arg("a") = 0.5,
        py::arg("beta") = cplx(1.0), py::arg("gamma") = cplx(1.0), py::arg("theta") = cplx(1.0),
        "Periodic samples of u0 and v0 on [0, L); returns the fields at T and M, E before and after.");

    m.def("level_set_measure", &level_set_measure, py::arg("alpha"), py::arg("M"));
    m.def("real_roots", &real_roots, py::arg("coeffs"), "Ascending real roots of c0 + c1 x + c2 x^2 + c3 x^3.");
    m.def(
        "fre_scan_json",
        [](const std::string& form, double a, double k, double s, std::vector<double> ladder) {
            if (form != "dxv2" && form != "uvx") throw DomainError("form must be dxv2 or uvx");
            const FreSpec spec = form == "dxv2" ? fre_spec_dxv2(k, s) : fre_spec_uvx(k, s);
            ScanReport r;
            {
                py::gil_scoped_release nogil;
                r = ratio_scan(spec, a, ladder);
            }
            return app::dump_json(app::scan_json(spec, form, a, k, s, r));
        },
        py::arg("form"), py::arg("a"), py::arg("k"), py::arg("s"), py::arg("ladder") = std::vector<double>{100, 1000, 10000});

    m.def(
        "ladder_json",
        [](const std::string& tag, std::vector<double> Ns) {
            const LemmaId id = lemma_from_tag(tag);
            if (Ns.empty()) Ns.assign(default_ladder.begin(), default_ladder.end());
            LadderReport r;
            {
                py::gil_scoped_release nogil;
                r = run_ladder(id, Ns, reference_params(id));
            }
            return app::dump_json(app::ladder_json(r));
        },
        py::arg("lemma"), py::arg("Ns") = std::vector<double>{}, "Ladder at the reference parameters.");

    m.def(
        "cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "hslab");
            std::vector<const char*> argv;
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            int rc = 0;
            {
                py::gil_scoped_release nogil;
                rc = app::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
            }
            return py::make_tuple(rc, out.str(), err.str());
        },
        py::arg("args"), "Runs the command line front end in-process; returns (exit code, stdout, stderr).");
}
