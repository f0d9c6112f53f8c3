#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qst/amplitudes.hpp"
#include "qst/analysis.hpp"
#include "qst/chain_model.hpp"
#include "qst/ed_oracle.hpp"
#include "qst/error.hpp"
#include "qst/fidelity.hpp"
#include "qst/spectral.hpp"

namespace py = pybind11;
using namespace qst;

namespace {

py::array_t<Complex> amplitude_array(const SpectralDecomposition& d, double t) {
  const AmplitudeMatrix a = amplitude_matrix(d, t);
  const int n = a.n_sites();
  py::array_t<Complex> out({n, n});
  auto view = out.mutable_unchecked<2>();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) view(i, j) = a(i + 1, j + 1);
  return out;
}

AmplitudeMatrix from_array(const py::array_t<Complex, py::array::c_style | py::array::forcecast>& arr, double t) {
  if (arr.ndim() != 2 || arr.shape(0) != arr.shape(1)) throw py::value_error("expected a square N x N array");
  const auto n = static_cast<int>(arr.shape(0));
  return AmplitudeMatrix(t, n, std::vector<Complex>(arr.data(), arr.data() + std::size_t(n) * n));
}

}  // namespace

PYBIND11_MODULE(_qst, m) {
  m.doc() = "Quantum state transfer through XX spin chains (J = 1 units).";

  static py::exception<Error> qst_error(m, "QstError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = qst_error;
      py::object instance = exc(e.what());
      instance.attr("code") = to_string(e.code());
      instance.attr("numerical") = e.is_numerical();
      PyErr_SetObject(exc.ptr(), instance.ptr());
    }
  });

  py::enum_<ProtocolKind>(m, "ProtocolKind")
      .value("Uniform", ProtocolKind::Uniform)
      .value("WeakEdge1Q", ProtocolKind::WeakEdge1Q)
      .value("BarrierEdge1Q", ProtocolKind::BarrierEdge1Q)
      .value("BarrierNN1Q", ProtocolKind::BarrierNN1Q)
      .value("WeakBlock2Q", ProtocolKind::WeakBlock2Q)
      .value("BarrierBlock2Q", ProtocolKind::BarrierBlock2Q);

  m.def("parse_protocol", [](const std::string& name) {
    const auto kind = parse_protocol(name);
    if (!kind) throw py::value_error("unknown protocol '" + name + "'");
    return *kind;
  });
  m.def("protocol_name", [](ProtocolKind k) { return std::string(protocol_name(k)); });

  py::class_<ChainSpec>(m, "ChainSpec")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("couplings"), py::arg("fields"))
      .def_property_readonly("n_sites", &ChainSpec::n_sites)
      .def_property_readonly("couplings", &ChainSpec::couplings)
      .def_property_readonly("fields", &ChainSpec::fields)
      .def("is_mirror_symmetric", &ChainSpec::is_mirror_symmetric)
      .def("__eq__", [](const ChainSpec& a, const ChainSpec& b) { return a == b; });

  m.def("build_chain",
        [](ProtocolKind kind, int n_sites, double xi) { return build_chain({kind, xi, n_sites}); },
        py::arg("kind"), py::arg("n_sites"), py::arg("xi") = 0.0);

  m.def("bose_hubbard_to_xxz",
        [](double t, double v, double f) {
          const auto p = bose_hubbard_to_xxz(t, v, f);
          return py::make_tuple(p.coupling_k, p.anisotropy_delta);
        },
        py::arg("hopping"), py::arg("interaction"), py::arg("filling"),
        "Returns (K, Delta) of the effective XXZ chain.");

  py::class_<SpectralDecomposition>(m, "SpectralDecomposition")
      .def_property_readonly("size", &SpectralDecomposition::size)
      .def_property_readonly("eigenvalues", &SpectralDecomposition::eigenvalues)
      .def("eigenvector", [](const SpectralDecomposition& d, int k) {
        if (k < 0 || k >= d.size()) throw py::index_error();
        const auto v = d.eigenvector(k);
        return std::vector<double>(v.begin(), v.end());
      });
  m.def("diagonalize", &diagonalize, py::arg("chain"));

  py::class_<SpectralClass>(m, "SpectralClass")
      .def_property_readonly("odd", [](const SpectralClass& c) { return c.parity == Parity::Odd; })
      .def_readonly("residue_mod6", &SpectralClass::residue_mod6)
      .def_readonly("has_zero_mode", &SpectralClass::has_zero_mode)
      .def_property_readonly("edge_multiplicity", &SpectralClass::edge_multiplicity)
      .def_property_readonly("label", &SpectralClass::label);
  m.def("classify_spectrum", &classify_spectrum, py::arg("decomp"), py::arg("n_sites"));
  m.def("rabi_gap",
        [](const SpectralDecomposition& d, bool sextet) {
          return rabi_gap(d, sextet ? RabiMode::SextetN6n : RabiMode::BiLocal1Q);
        },
        py::arg("decomp"), py::arg("sextet") = false);

  m.def("amplitude_matrix", &amplitude_array, py::arg("decomp"), py::arg("t"),
        "N x N complex array, entry [n-1, m-1] = f_n^m(t).");

  py::class_<TransferSetup>(m, "TransferSetup")
      .def(py::init<std::vector<int>, std::vector<int>>(), py::arg("senders"), py::arg("receivers"))
      .def_readonly("senders", &TransferSetup::senders)
      .def_readonly("receivers", &TransferSetup::receivers)
      .def_static("default_for", &TransferSetup::default_for, py::arg("qubits"), py::arg("n_sites"));

  m.def("fidelity_1q_from_amplitude", &fidelity_1q_from_amplitude, py::arg("f"));
  m.def("fidelity_exact",
        [](const py::array_t<Complex, py::array::c_style | py::array::forcecast>& f, const TransferSetup& s) {
          const AmplitudeMatrix a = from_array(f, 0.0);
          return s.qubits() == 1 ? fidelity_1q(a, s) : fidelity_2q_exact(a, s);
        },
        py::arg("amplitudes"), py::arg("setup"));
  m.def("fidelity_2q_perturbative",
        py::overload_cast<Complex, Complex, Complex>(&fidelity_2q_perturbative), py::arg("f_1_nm1"),
        py::arg("f_1_n"), py::arg("f_2_nm1"));
  m.def("fidelity_trace",
        [](const SpectralDecomposition& d, const TransferSetup& s, const std::vector<double>& times, int jobs) {
          return fidelity_trace(d, s, times, jobs).fbar;
        },
        py::arg("decomp"), py::arg("setup"), py::arg("times"), py::arg("jobs") = 1);

  py::class_<TransferResult>(m, "TransferResult")
      .def_readonly("tau", &TransferResult::tau)
      .def_readonly("fbar_at_tau", &TransferResult::fbar_at_tau)
      .def_readonly("threshold", &TransferResult::threshold)
      .def_readonly("rabi_gap", &TransferResult::rabi_gap)
      .def_readonly("tau_predicted", &TransferResult::tau_predicted)
      .def_readonly("reached", &TransferResult::reached)
      .def_readonly("t_max", &TransferResult::t_max)
      .def_readonly("t_peak", &TransferResult::t_peak)
      .def_readonly("fbar_peak", &TransferResult::fbar_peak);
  m.def("find_transfer_time",
        [](const ChainSpec& c, const TransferSetup& s, double threshold, double t_max, bool locate_peak) {
          return find_transfer_time(c, s, threshold, {t_max, locate_peak});
        },
        py::arg("chain"), py::arg("setup"), py::arg("threshold") = kDefaultThreshold, py::arg("t_max") = 0.0,
        py::arg("locate_peak") = false, py::call_guard<py::gil_scoped_release>());

  py::class_<ScalingFit>(m, "ScalingFit")
      .def_readonly("exponent", &ScalingFit::exponent)
      .def_readonly("prefactor", &ScalingFit::prefactor)
      .def_readonly("r_squared", &ScalingFit::r_squared)
      .def_readonly("samples", &ScalingFit::samples)
      .def_readonly("n_excluded", &ScalingFit::n_excluded)
      .def("to_json", &fit_json);
  m.def("fit_power_law", [](const std::vector<std::pair<double, double>>& s) { return fit_power_law(s); },
        py::arg("samples"));
  m.def("fit_exponential", [](const std::vector<std::pair<double, double>>& s) { return fit_exponential(s); },
        py::arg("samples"));
  m.def("sweep_csv",
        [](ProtocolKind kind, std::vector<int> n_list, std::vector<double> xi_list, double threshold, int jobs) {
          std::ostringstream out;
          {
            py::gil_scoped_release release;
            write_sweep_csv(out, sweep({kind, std::move(n_list), std::move(xi_list), threshold, 0.0, jobs}));
          }
          return out.str();
        },
        py::arg("kind"), py::arg("n_list"), py::arg("xi_list"), py::arg("threshold") = kDefaultThreshold,
        py::arg("jobs") = 1);

  m.def("run_equivalence",
        [](int n_min, int n_max, int times_per_chain, double t_max, unsigned seed) {
          const auto r = ed::run_equivalence({n_min, n_max, times_per_chain, t_max, seed});
          py::dict d;
          d["cases"] = r.cases;
          d["max_dev_single"] = r.max_dev_single;
          d["max_dev_pair"] = r.max_dev_pair;
          d["max_dev_fidelity"] = r.max_dev_fidelity;
          d["max_norm_error"] = r.max_norm_error;
          return d;
        },
        py::arg("n_min") = 4, py::arg("n_max") = 10, py::arg("times_per_chain") = 20, py::arg("t_max") = 500.0,
        py::arg("seed") = 20240601u);
}
