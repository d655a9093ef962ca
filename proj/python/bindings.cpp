#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "kickrotor/classical.hpp"
#include "kickrotor/errors.hpp"
#include "kickrotor/experiment.hpp"
#include "kickrotor/floquet.hpp"
#include "kickrotor/lineshape.hpp"
#include "kickrotor/propagator.hpp"

namespace py = pybind11;
using namespace kr;

namespace {

using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;
using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

QuantumState state_from(const ComplexArray& amps) {
    if (amps.ndim() != 1 || amps.size() % 2 != 0 || amps.size() == 0)
        throw std::invalid_argument("amplitudes must be a 1-d array of even length 2 m_max");
    std::vector<cplx> v(amps.data(), amps.data() + amps.size());
    return QuantumState(static_cast<int>(amps.size() / 2), std::move(v));
}

ComplexArray to_array(const QuantumState& s) {
    ComplexArray out(static_cast<py::ssize_t>(s.size()));
    std::copy(s.amplitudes().begin(), s.amplitudes().end(), out.mutable_data());
    return out;
}

RealArray to_array(const std::vector<double>& v) {
    RealArray out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

DistributionRecord distribution_from(const RealArray& p, const RotorParams& params) {
    if (p.ndim() != 1 || p.size() % 2 != 0 || p.size() == 0)
        throw std::invalid_argument("P must be a 1-d array of even length 2 m_max over m in [-m_max, m_max)");
    DistributionRecord d;
    d.grid = MGrid{static_cast<int>(p.size() / 2)};
    d.p.assign(p.data(), p.data() + p.size());
    d.params = params;
    return d;
}

std::vector<PhasePoint> points_from(const RealArray& L, const RealArray& theta) {
    if (L.size() != theta.size()) throw std::invalid_argument("L and theta must have the same length");
    std::vector<PhasePoint> pts(static_cast<std::size_t>(L.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {L.data()[i], theta.data()[i]};
    return pts;
}

py::dict fit_dict(const LineshapeFit& f) {
    py::dict d;
    d["l"] = f.l;
    d["m_lo"] = f.m_lo;
    d["m_hi"] = f.m_hi;
    d["residual"] = f.residual;
    if (f.two_scale) {
        d["l_inner"] = f.two_scale->l_inner;
        d["l_outer"] = f.two_scale->l_outer;
        d["m_break"] = f.two_scale->m_break;
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quantum and classical kicked rotor with sign-modulated kicks";
    m.attr("__version__") = library_version();
    m.attr("NO_FLIP") = kNoFlip;

    py::register_exception<FitError>(m, "FitError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::enum_<Variant>(m, "Variant")
        .value("KR", Variant::PlainKR)
        .value("SIGN_FLIP", Variant::MkrSignFlip)
        .value("D_OPERATOR", Variant::MkrDOperator)
        .value("TIME_DELAY", Variant::MkrTimeDelay);

    py::class_<RotorParams>(m, "RotorParams")
        .def(py::init([](double k, double tau, std::int64_t M, Variant variant) {
                 return validate({k, tau, M, variant});
             }),
             py::arg("k"), py::arg("tau"), py::arg("M") = kNoFlip, py::arg("variant") = Variant::MkrSignFlip,
             "Validated parameters; M = NO_FLIP or variant = KR gives the plain rotor.")
        .def_readonly("k", &RotorParams::k)
        .def_readonly("tau", &RotorParams::tau)
        .def_readonly("M", &RotorParams::M)
        .def_readonly("variant", &RotorParams::variant)
        .def_property_readonly("kappa", &RotorParams::kappa)
        .def("__eq__", [](const RotorParams& a, const RotorParams& b) { return a == b; })
        .def("__repr__", [](const RotorParams& p) {
            std::string s = to_key_value(p);
            std::replace(s.begin(), s.end(), '\n', ' ');
            return "RotorParams(" + s + ")";
        });

    // Quantum dynamics
    m.def("initial_state", [](int m_max, int m0) { return to_array(QuantumState(m_max, m0)); },
          py::arg("m_max"), py::arg("m0") = 0, "|m0> on the grid m in [-m_max, m_max).");
    m.def("apply_kick", [](const ComplexArray& a, double k, int sign) { return to_array(apply_kick(state_from(a), k, sign)); },
          py::arg("amplitudes"), py::arg("k"), py::arg("sign") = 1);
    m.def("apply_free", [](const ComplexArray& a, double tau) { return to_array(apply_free(state_from(a), tau)); },
          py::arg("amplitudes"), py::arg("tau"));
    m.def("apply_d_operator", [](const ComplexArray& a) { return to_array(apply_d_operator(state_from(a))); },
          py::arg("amplitudes"));
    m.def("scaled_energy", [](const ComplexArray& a, double tau) { return scaled_energy(state_from(a), tau); },
          py::arg("amplitudes"), py::arg("tau"));
    m.def(
        "evolve",
        [](const RotorParams& p, int m_max, std::int64_t kicks, std::vector<std::int64_t> record_kicks,
           std::int64_t energy_every, std::optional<ComplexArray> initial) {
            QuantumState s = initial ? state_from(*initial) : QuantumState(m_max);
            std::optional<EvolveResult> run;
            {
                py::gil_scoped_release release;
                run = evolve(std::move(s), p, {kicks, std::move(record_kicks), energy_every});
            }
            const auto& r = *run;
            py::dict out;
            out["state"] = to_array(r.state);
            py::list energies;
            for (const auto& e : r.energies) energies.append(py::make_tuple(e.kick_index, e.e_tilde));
            out["energies"] = energies;
            py::dict dists;
            for (const auto& d : r.distributions) dists[py::int_(d.kick_index)] = to_array(d.p);
            out["distributions"] = dists;
            out["max_edge_probability"] = r.max_edge_probability;
            return out;
        },
        py::arg("params"), py::arg("m_max"), py::arg("kicks"), py::arg("record_kicks") = std::vector<std::int64_t>{},
        py::arg("energy_every") = 0, py::arg("initial") = py::none(),
        "Propagate from |0> (or `initial`). Returns state, energies [(kick, E)], distributions {kick: P} "
        "and the largest edge probability seen.");

    // Floquet analysis
    m.def("build_kr_matrix", [](const RotorParams& p, int n) { return build_kr_matrix(p, n).elements; },
          py::arg("params"), py::arg("ambient_dim"));
    m.def(
        "build_mkr_matrix",
        [](const RotorParams& p, int n, std::int64_t M) {
            py::gil_scoped_release release;
            return build_mkr_matrix(p, n, M).elements;
        },
        py::arg("params"), py::arg("ambient_dim"), py::arg("M"), "D F^M on m in [-n/2, n/2).");
    m.def(
        "shannon_entropy",
        [](const Eigen::MatrixXcd& a, int d, double alpha) {
            FloquetMatrix f;
            f.ambient_dim = static_cast<int>(a.rows());
            f.m_first = -f.ambient_dim / 2;
            f.elements = a;
            py::gil_scoped_release release;
            return shannon_entropy_avg(diagonalize(truncate(f, d)), alpha);
        },
        py::arg("matrix"), py::arg("d"), py::arg("alpha") = kEntropyAlpha,
        "Mean eigenvector Shannon width of the central d x d block.");
    m.def(
        "band_width",
        [](const Eigen::MatrixXcd& a, double cutoff) {
            FloquetMatrix f;
            f.ambient_dim = static_cast<int>(a.rows());
            f.m_first = -f.ambient_dim / 2;
            f.elements = a;
            return band_width(f, cutoff);
        },
        py::arg("matrix"), py::arg("cutoff"));
    m.def(
        "spectrum_point",
        [](const RotorParams& p, std::int64_t M, int ambient_dim, int d, std::vector<double> cutoffs) {
            SpectrumOptions o;
            o.ambient_dim = ambient_dim;
            o.d = d;
            o.cutoffs = std::move(cutoffs);
            SpectrumPoint r;
            {
                py::gil_scoped_release release;
                r = mkr_spectrum_point(p, M, o);
            }
            return py::make_tuple(r.entropy, r.band_widths);
        },
        py::arg("params"), py::arg("M"), py::arg("ambient_dim") = 4096, py::arg("d") = 1024,
        py::arg("cutoffs") = std::vector<double>{1e-20}, "(entropy, [band width per cutoff]) of D F^M.");

    // Classical dynamics
    m.def(
        "map_evolve",
        [](const RealArray& L, const RealArray& theta, double kappa, std::int64_t M, std::int64_t kicks) {
            auto e = ClassicalEnsemble::from_points(points_from(L, theta));
            {
                py::gil_scoped_release release;
                e = mkr_map_evolve(std::move(e), kappa, M, kicks);
            }
            std::vector<double> th(e.size());
            for (std::size_t i = 0; i < e.size(); ++i) th[i] = e.points[i].theta;
            return py::make_tuple(to_array(e.unwrapped_L), to_array(th));
        },
        py::arg("L"), py::arg("theta"), py::arg("kappa"), py::arg("M") = kNoFlip, py::arg("kicks") = 1,
        "(unwrapped L, theta) after `kicks` steps of the sign-modulated standard map.");
    m.def(
        "poincare_section",
        [](double kappa, std::int64_t M, const RealArray& L, const RealArray& theta, std::int64_t kicks) {
            const auto pts = poincare_section(kappa, M, points_from(L, theta), kicks);
            std::vector<double> th(pts.size()), l(pts.size());
            for (std::size_t i = 0; i < pts.size(); ++i) {
                th[i] = pts[i].theta;
                l[i] = pts[i].L;
            }
            return py::make_tuple(to_array(th), to_array(l));
        },
        py::arg("kappa"), py::arg("M"), py::arg("L"), py::arg("theta"), py::arg("kicks"));
    m.def(
        "find_periodic_orbit",
        [](double kappa, std::int64_t M, double L, double theta, std::int64_t period, double drift)
            -> std::optional<std::pair<double, double>> {
            const auto p = find_periodic_orbit(kappa, M, {L, theta}, period, drift);
            if (!p) return std::nullopt;
            return std::make_pair(p->L, p->theta);
        },
        py::arg("kappa"), py::arg("M"), py::arg("L"), py::arg("theta"), py::arg("period"), py::arg("drift_per_kick"),
        "(L, theta) of a periodic orbit advancing drift_per_kick per kick, or None.");
    m.def(
        "island_drift",
        [](double kappa, std::int64_t M, double L, double theta, std::int64_t kicks) {
            const auto r = detect_transporting_island(kappa, M, {L, theta}, kicks);
            return py::make_tuple(r.drift_per_kick, r.is_transporting);
        },
        py::arg("kappa"), py::arg("M"), py::arg("L"), py::arg("theta"), py::arg("kicks") = 1000);

    // Lineshape analysis
    m.def("fit_localization_length",
          [](const RealArray& p, double floor) {
              FitOptions o;
              o.floor = floor;
              return fit_dict(fit_localization_length(distribution_from(p, {}), o));
          },
          py::arg("P"), py::arg("floor") = 1e-15);
    m.def("detect_nonexponential",
          [](const RealArray& p, double floor, int bin_width) {
              NonexponentialOptions o;
              o.fit.floor = floor;
              o.bin_width = bin_width;
              const auto r = detect_nonexponential(distribution_from(p, {}), o);
              auto d = fit_dict(r.fit);
              d["is_nonexponential"] = r.is_nonexponential;
              d["rms_single"] = r.rms_single;
              d["rms_two"] = r.rms_two;
              return d;
          },
          py::arg("P"), py::arg("floor") = 1e-15, py::arg("bin_width") = 1);

    // Experiment driver
    m.def(
        "run",
        [](const std::string& config_json) {
            ExperimentConfig c;
            update_from_json(nlohmann::json::parse(config_json), c);
            RunReport r;
            {
                py::gil_scoped_release release;
                r = run_checked(c);
            }
            std::vector<std::string> files;
            for (const auto& f : r.files) files.push_back(f.generic_string());
            return py::make_tuple(r.exit_code, files, r.warnings);
        },
        py::arg("config_json"), "Run a JSON configuration; returns (exit code, files, warnings).");
}
