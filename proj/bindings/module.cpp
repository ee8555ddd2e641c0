#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qclab/beurling.hpp"
#include "qclab/cantor.hpp"
#include "qclab/distortion.hpp"
#include "qclab/measure.hpp"
#include "qclab/wolff.hpp"

namespace py = pybind11;
using namespace qclab;

namespace {

DiscreteMeasure measure_from_triples(const std::vector<std::tuple<double, double, double>>& rows) {
    std::vector<Atom> atoms;
    atoms.reserve(rows.size());
    for (const auto& [x, y, m] : rows) atoms.push_back({complexd(x, y), m});
    return DiscreteMeasure(std::move(atoms));
}

}  // namespace

PYBIND11_MODULE(_qclab, m) {
    m.doc() = "gauge contents, Wolff potentials, Cantor constructions, Beurling bounds";

    m.def("t_prime", &t_prime, py::arg("t"), py::arg("K"));
    m.def("derive_sigma", &derive_sigma, py::arg("R"), py::arg("t"), py::arg("K"), py::arg("d"));
    m.def("indices_from_target", [](double beta, double q, double K) {
        const auto idx = indices_from_target(beta, q, K);
        return py::dict(py::arg("K") = idx.K, py::arg("t") = idx.t, py::arg("t_prime") = idx.t_prime,
                        py::arg("beta") = idx.beta, py::arg("q") = idx.q, py::arg("alpha") = idx.alpha,
                        py::arg("p") = idx.p);
    });
    m.def("sharpness", [](double t, double K, double q, double p_tilde, int n_max) {
        const auto v = sharpness_harness(t, K, q, p_tilde, n_max);
        return py::dict(py::arg("delta") = v.indices.delta,
                        py::arg("target_exponent") = v.target_exponent,
                        py::arg("source_exponent") = v.source_exponent,
                        py::arg("target_converges") = v.target_converges,
                        py::arg("source_diverges") = v.source_diverges,
                        py::arg("target_partial_sum") = v.target_partial_sum,
                        py::arg("source_log_slope") = v.source_log_slope);
    }, py::arg("t"), py::arg("K"), py::arg("q"), py::arg("p_tilde"), py::arg("n_max") = 100000);

    py::class_<CantorParams>(m, "CantorParams")
        .def_static("from_json", &CantorParams::from_json)
        .def_static("uniform", &CantorParams::uniform, py::arg("K"), py::arg("t"), py::arg("depth"),
                    py::arg("R"), py::arg("count"), py::arg("fill_deficit") = 0.0)
        .def("to_json", &CantorParams::to_json)
        .def_property_readonly("depth", &CantorParams::depth)
        .def("sigma", &CantorParams::sigma);

    m.def("wolff_on_cantor", [](const CantorParams& params, double alpha, double p,
                                const std::string& side, int n_max) {
        return wolff_on_cantor(params, RieszIndex(alpha, p),
                               side == "source" ? CantorSide::Source : CantorSide::Target, n_max);
    }, py::arg("params"), py::arg("alpha"), py::arg("p"), py::arg("side"), py::arg("n_max"));

    py::class_<DiscreteMeasure>(m, "DiscreteMeasure")
        .def(py::init(&measure_from_triples), py::arg("atoms"))
        .def_property_readonly("total", &DiscreteMeasure::total)
        .def("ball_mass", [](const DiscreteMeasure& mu, double x, double y, double r) {
            return mu.ball_mass(Ball(complexd(x, y), r));
        })
        .def("wolff", [](const DiscreteMeasure& mu, double alpha, double p, double x, double y) {
            return wolff_potential(mu, RieszIndex(alpha, p), complexd(x, y),
                                   WolffOptions::for_measure(mu)).value;
        })
        .def("capacity_lower", [](const DiscreteMeasure& mu, double alpha, double p) {
            std::vector<complexd> probes;
            for (const auto& a : mu.atoms()) probes.push_back(a.pos);
            const auto res = capacity_lower(mu, RieszIndex(alpha, p), probes, WolffOptions::for_measure(mu));
            return py::make_tuple(res.value, res.diverged);
        });

    m.def("beurling_disk_selftest", [](int n) {
        const double spacing = 4.0 / n;
        auto f = GridField::zeros(complexd(-2.0, -2.0), spacing, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (std::abs(f.point(i, j)) < 1.0) f.at(i, j) = 1.0;
        const auto S = beurling_full(f);
        double interior_max = 0.0, exterior_rel = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const complexd z = f.point(i, j);
                if (std::abs(z) < 0.8) interior_max = std::max(interior_max, std::abs(S.at(i, j)));
                if (std::abs(z) >= 1.5 && std::abs(z) < 1.9) {
                    const complexd expect = -1.0 / (z * z);
                    exterior_rel = std::max(exterior_rel, std::abs(S.at(i, j) - expect) / std::abs(expect));
                }
            }
        return py::dict(py::arg("interior_max") = interior_max, py::arg("exterior_rel_err") = exterior_rel);
    }, py::arg("n") = 256);
}
