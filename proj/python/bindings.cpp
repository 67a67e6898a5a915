// Thin pybind11 layer over the core library. SI units throughout.

#include "microdisk/atom_params.hpp"
#include "microdisk/errors.hpp"
#include "microdisk/experiment.hpp"
#include "microdisk/losses.hpp"
#include "microdisk/tuning.hpp"
#include "microdisk/wgm.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace microdisk;

namespace
{

py::object cell_to_py(const experiment::Cell &c)
{
    return std::visit([](const auto &v) -> py::object { return py::cast(v); }, c);
}

py::dict result_to_dict(const experiment::Config &cfg, const experiment::Result &r)
{
    py::dict tables;
    for (const auto &t : r.tables)
    {
        py::dict cols;
        for (std::size_t j = 0; j < t.columns.size(); ++j)
        {
            py::list col;
            for (const auto &row : t.rows)
                col.append(cell_to_py(row[j]));
            cols[py::str(t.columns[j])] = col;
        }
        tables[py::str(t.file)] = cols;
    }
    py::list targets;
    for (const auto &t : r.targets)
    {
        py::dict d;
        d["name"] = t.name;
        d["value"] = t.value;
        d["lower"] = t.lower;
        d["upper"] = t.upper;
        d["reference"] = t.reference;
        d["pass"] = t.pass;
        targets.append(d);
    }
    py::dict out;
    out["experiment"] = experiment::kind_name(cfg.kind);
    out["config_hash"] = cfg.hash();
    out["pass"] = r.pass();
    out["tables"] = tables;
    out["targets"] = targets;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Microdisk resonator, coupler, loss and atom-detection models";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<ExperimentError>(m, "ExperimentError", base.ptr());

    py::class_<DiskGeometry>(m, "DiskGeometry")
        .def(py::init([](double diameter, double height, double n_core, double n_clad) {
                 DiskGeometry g{diameter, height, n_core, n_clad};
                 g.validate();
                 return g;
             }),
             py::arg("diameter") = 30e-6, py::arg("height") = 5e-6, py::arg("n_core") = 1.454,
             py::arg("n_clad") = 1.0)
        .def_readwrite("diameter", &DiskGeometry::diameter)
        .def_readwrite("height", &DiskGeometry::height)
        .def_readwrite("n_core", &DiskGeometry::n_core)
        .def_readwrite("n_clad", &DiskGeometry::n_clad)
        .def_property_readonly("radius", &DiskGeometry::radius);

    py::class_<WgmMode>(m, "WgmMode")
        .def_readonly("l", &WgmMode::l)
        .def_readonly("q", &WgmMode::q)
        .def_readonly("k", &WgmMode::k)
        .def_property_readonly("wavelength", &WgmMode::wavelength)
        .def_property_readonly("q_wgm", &WgmMode::q_wgm)
        .def_property_readonly("omega", &WgmMode::omega)
        .def("__repr__", [](const WgmMode &w) {
            return "<WgmMode l=" + std::to_string(w.l) + " q=" + std::to_string(w.q) +
                   " wavelength=" + std::to_string(w.wavelength() * 1e9) + " nm>";
        });

    m.def("solve_mode", &solve_mode, py::arg("l"), py::arg("q"), py::arg("disk"), py::arg("lambda_seed") = 780e-9);
    m.def("find_resonance_near", &find_resonance_near, py::arg("wavelength"), py::arg("disk"), py::arg("q") = 1);
    m.def(
        "free_spectral_range",
        [](const WgmMode &mode, const DiskGeometry &disk) {
            const FreeSpectralRange f = free_spectral_range(mode, disk);
            return f.adjacent_lambda.value_or(f.approx_lambda);
        },
        py::arg("mode"), py::arg("disk"), "Wavelength spacing to the l-1 neighbour, m.");
    m.def(
        "rabi_frequency",
        [](const WgmMode &mode, const DiskGeometry &disk, double distance) {
            return rabi_frequency(mode, disk, disk.radius() + distance, AtomParams{});
        },
        py::arg("mode"), py::arg("disk"), py::arg("distance") = 0.0,
        "Single-photon coupling g in rad/s for a Rb D2 atom `distance` outside the rim.");

    m.def("attenuation_from_db_per_km", &attenuation_from_db_per_km, py::arg("db_per_km"));
    m.def("q_material", &q_material, py::arg("n_core"), py::arg("alpha"), py::arg("wavelength"));
    m.def(
        "q_surface",
        [](double diameter, double wavelength, double sigma, double correlation_length) {
            return q_surface(diameter, wavelength, SurfaceParams{sigma, correlation_length});
        },
        py::arg("diameter"), py::arg("wavelength"), py::arg("sigma") = 2e-9, py::arg("correlation_length") = 10e-9);

    m.def("frequency_shift", &frequency_shift, py::arg("dn_over_n"), py::arg("dD_over_D"));
    m.def(
        "fsr_scan_requirement",
        [](const DiskGeometry &disk, double wavelength, double fraction) {
            const TuningRequirement r = fsr_scan_requirement(disk, wavelength, fraction);
            py::dict d;
            d["l"] = r.l;
            d["dD_over_D"] = r.dD_over_D;
            d["dn_over_n"] = r.dn_over_n;
            return d;
        },
        py::arg("disk"), py::arg("wavelength") = 780e-9, py::arg("fsr_fraction") = 1.0);

    m.def("experiments", [] {
        py::list out;
        for (const auto &e : experiment::catalog())
            out.append(e.name);
        return out;
    });
    m.def(
        "config_hash", [](const std::string &text) { return experiment::parse_config(text).hash(); },
        py::arg("config_text"));
    m.def(
        "run_experiment",
        [](const std::string &text, const std::string &out_dir) {
            const experiment::Config cfg = experiment::parse_config(text);
            experiment::Result r;
            {
                py::gil_scoped_release release;
                r = experiment::run(cfg);
            }
            if (!out_dir.empty())
                experiment::write_outputs(cfg, r, out_dir);
            return result_to_dict(cfg, r);
        },
        py::arg("config_text"), py::arg("out_dir") = "",
        "Parses a config, runs it and returns tables (column -> list) and targets. Writes files when out_dir is set.");
}
