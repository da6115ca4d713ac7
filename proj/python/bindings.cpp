#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "emglrt/closed_form.hpp"
#include "emglrt/config.hpp"
#include "emglrt/em_det.hpp"
#include "emglrt/em_gauss.hpp"
#include "emglrt/harness.hpp"
#include "emglrt/report.hpp"
#include "emglrt/scenario.hpp"

namespace py = pybind11;
using namespace emglrt;

namespace {

std::vector<cplx> alphabet_by_name(const std::string& name) {
    if (name == "qpsk") return qpsk_alphabet();
    if (name == "bpsk") return bpsk_alphabet();
    if (name == "8psk") return psk8_alphabet();
    throw Error(ErrorKind::InvalidInput, "unknown alphabet '" + name + "'");
}

EmConfig em_config(std::optional<Eigen::Index> N, double gain, bool hard, int max_iters, double rel_tol,
                   bool fast_eig) {
    EmConfig c;
    c.max_iters = max_iters;
    c.rel_tol = rel_tol;
    c.fast_eig = fast_eig;
    c.decision = hard ? DecisionMode::Hard : DecisionMode::Soft;
    if (N) {
        c.rank.fixed_N = *N;
    } else {
        c.rank.estimate = true;
        c.rank.criterion = RankCriterion{Penalty::GIC, gain, -1};
    }
    return c;
}

py::dict report_dict(const DetectorReport& r) {
    py::dict d;
    d["statistic"] = r.log_statistic;
    d["N_hat"] = r.N_hat;
    d["iters"] = r.iters;
    d["converged"] = r.converged;
    d["lams0"] = r.lams0;
    d["lams1"] = r.lams1;
    d["nu0"] = r.nu0;
    d["nu1"] = r.nu1;
    d["loglik"] = r.loglik;
    return d;
}

RunConfig config_from(const std::string& text, const std::map<std::string, std::string>& overrides) {
    auto cfg = parse_config(text);
    for (const auto& [k, v] : overrides) set_config_value(cfg, k, v);
    validate(cfg.scenario);
    return cfg;
}

} // namespace

PYBIND11_MODULE(_emglrt, m) {
    m.doc() = "EM-based GLRT detectors for signals with partially known symbols";

    static py::exception<Error> exc(m, "EmglrtError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = exc;
            py::object inst = err(e.what());
            inst.attr("kind") = std::string(error_tag(e.kind()));
            PyErr_SetObject(exc.ptr(), inst.ptr());
        }
    });

    m.def("version", [] { return std::string(version()); });

    m.def("kelly", [](const CMatrix& Y, const CVector& s) { return kelly_statistic(Y, s).log_statistic; },
          py::arg("Y"), py::arg("s"));
    m.def("kmr", [](const CMatrix& Y, const CVector& s, Eigen::Index N) { return kmr_statistic(Y, s, N).log_statistic; },
          py::arg("Y"), py::arg("s"), py::arg("N"));
    m.def("mcwhorter",
          [](const CMatrix& Y, const CVector& s, Eigen::Index N) { return mcwhorter_statistic(Y, s, N).log_statistic; },
          py::arg("Y"), py::arg("s"), py::arg("N"));
    m.def("gerlach_steiner",
          [](const CMatrix& Y, const CVector& s, double nu) { return gerlach_steiner_statistic(Y, s, nu).log_statistic; },
          py::arg("Y"), py::arg("s"), py::arg("nu"));

    m.def(
        "glrt_gauss",
        [](const CMatrix& Y, const std::vector<cplx>& pilots, const std::string& alphabet, std::optional<Eigen::Index> N,
           double gain, bool hard, int max_iters, double rel_tol, bool fast_eig) {
            const auto prior =
                training_data_prior(pilots, alphabet_by_name(alphabet), static_cast<std::size_t>(Y.cols()), DiscreteData{});
            return report_dict(glrt_gauss(Y, prior, em_config(N, gain, hard, max_iters, rel_tol, fast_eig)));
        },
        py::arg("Y"), py::arg("pilots"), py::arg("alphabet") = "qpsk", py::arg("N") = py::none(),
        py::arg("gain") = 10.0, py::arg("hard") = false, py::arg("max_iters") = 50, py::arg("rel_tol") = 0.01,
        py::arg("fast_eig") = true);

    m.def(
        "glrt_det",
        [](const CMatrix& Y, const std::vector<cplx>& pilots, const std::string& alphabet, std::optional<Eigen::Index> N,
           double gain, bool hard, int max_iters, double rel_tol, bool fast_eig) {
            const auto prior =
                training_data_prior(pilots, alphabet_by_name(alphabet), static_cast<std::size_t>(Y.cols()), DiscreteData{});
            return report_dict(glrt_det(Y, prior, em_config(N, gain, hard, max_iters, rel_tol, fast_eig)));
        },
        py::arg("Y"), py::arg("pilots"), py::arg("alphabet") = "qpsk", py::arg("N") = py::none(),
        py::arg("gain") = 1.7, py::arg("hard") = false, py::arg("max_iters") = 50, py::arg("rel_tol") = 0.01,
        py::arg("fast_eig") = true);

    m.def("detectors", [] {
        std::vector<std::string> out;
        for (auto k : all_detectors()) out.emplace_back(to_string(k));
        return out;
    });

    m.def(
        "synthesize",
        [](const std::string& config, std::uint64_t trial, bool h1, const std::map<std::string, std::string>& overrides) {
            const auto cfg = config_from(config, overrides);
            const auto sc = synthesize(cfg.scenario, trial, h1 ? Hypothesis::H1 : Hypothesis::H0);
            py::dict d;
            d["Y"] = sc.Y;
            d["s"] = sc.s;
            d["h"] = sc.h;
            d["B"] = sc.B;
            d["tau_resid"] = sc.tau_resid;
            d["fo_T"] = sc.fo_T;
            return d;
        },
        py::arg("config") = "", py::arg("trial") = 0, py::arg("h1") = true,
        py::arg("overrides") = std::map<std::string, std::string>{});

    m.def(
        "run_point",
        [](const std::string& config, std::uint64_t trials, unsigned threads, const std::map<std::string, std::string>& overrides) {
            const auto cfg = config_from(config, overrides);
            std::vector<TrialRecord> records;
            {
                py::gil_scoped_release release;
                records = run_point(cfg.scenario, detector_specs(cfg), trials, threads, nullptr);
            }
            const auto loads = py::module_::import("json").attr("loads");
            py::list out;
            for (const auto& r : records) out.append(loads(record_to_json(r)));
            return out;
        },
        py::arg("config") = "", py::arg("trials") = 10, py::arg("threads") = 1,
        py::arg("overrides") = std::map<std::string, std::string>{});
}
