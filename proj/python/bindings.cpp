#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <memory>

#include "macdp/belief.hpp"
#include "macdp/centralized.hpp"
#include "macdp/coordinated.hpp"
#include "macdp/errors.hpp"
#include "macdp/pattern.hpp"
#include "macdp/pbp.hpp"
#include "macdp/reference_data.hpp"
#include "macdp/sim.hpp"

namespace py = pybind11;
using namespace macdp;

namespace {

// Accepts a positive int, "inf" or float("inf").
BufferIndex to_buffer(const py::handle& h) {
  if (py::isinstance<py::str>(h)) {
    if (h.cast<std::string>() == "inf") return BufferIndex::infinity();
    throw ValidationError("buffer index must be a positive int or 'inf'");
  }
  if (py::isinstance<py::float_>(h) && std::isinf(h.cast<double>())) return BufferIndex::infinity();
  const int k = h.cast<int>();
  if (k < 1) throw ValidationError("buffer index must be >= 1");
  return BufferIndex::finite(k);
}

py::object from_buffer(BufferIndex b) {
  if (b.is_infinite()) return py::float_(INFINITY);
  return py::int_(b.k());
}

py::object threshold(const std::optional<int>& k) { return k ? py::object(py::int_(*k)) : py::object(py::none()); }

py::tuple prescription(Prescription d) { return py::make_tuple(d.d1, d.d2); }

}  // namespace

PYBIND11_MODULE(_macdp, m) {
  m.doc() = "Dynamic programs for two-device multiple access with a Markov channel";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);

  py::enum_<RecursionMode>(m, "RecursionMode")
      .value("PRINTED", RecursionMode::kAsPrinted)
      .value("BAYES", RecursionMode::kBayesConsistent);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double p1, double p2, double alpha0, double alpha1, double c, double r, double beta) {
             ModelParams p{p1, p2, alpha0, alpha1, c, r, beta};
             p.validate();
             return p;
           }),
           py::arg("p1") = 0.3, py::arg("p2") = 0.3, py::arg("alpha0") = 0.75, py::arg("alpha1") = 0.75,
           py::arg("c") = 0.3, py::arg("r") = 1.0, py::arg("beta") = 0.9)
      .def_readwrite("p1", &ModelParams::p1)
      .def_readwrite("p2", &ModelParams::p2)
      .def_readwrite("alpha0", &ModelParams::alpha0)
      .def_readwrite("alpha1", &ModelParams::alpha1)
      .def_readwrite("c", &ModelParams::c)
      .def_readwrite("r", &ModelParams::r)
      .def_readwrite("beta", &ModelParams::beta)
      .def("validate", &ModelParams::validate)
      .def("stationary_busy", &ModelParams::stationary_busy)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(p1=" + std::to_string(p.p1) + ", p2=" + std::to_string(p.p2) +
               ", alpha0=" + std::to_string(p.alpha0) + ", alpha1=" + std::to_string(p.alpha1) +
               ", c=" + std::to_string(p.c) + ", r=" + std::to_string(p.r) + ", beta=" + std::to_string(p.beta) + ")";
      });

  m.def("q_value", [](const ModelParams& p, int s, int m_) { return q_value(p, {s, m_}); }, py::arg("params"),
        py::arg("s"), py::arg("m"), "P(S = 1) m steps after the channel was seen in state s.");
  m.def("z_value", [](const ModelParams& p, int device, const py::object& k) {
          return z_value(p, device, to_buffer(k));
        }, py::arg("params"), py::arg("device"), py::arg("k"), "P(buffer full) at buffer index k.");

  py::class_<CentralizedSolution>(m, "CentralizedSolution")
      .def_property_readonly("k0", [](const CentralizedSolution& s) { return threshold(s.thresholds.k0); })
      .def_property_readonly("k1", [](const CentralizedSolution& s) { return threshold(s.thresholds.k1); })
      .def_property_readonly("iterations", [](const CentralizedSolution& s) { return s.vi.iterations; })
      .def_property_readonly("converged", [](const CentralizedSolution& s) { return s.vi.converged; })
      .def("initial_value", &CentralizedSolution::initial_value)
      .def("transmits", [](const CentralizedSolution& s, int ch_s, int ch_m) {
             return s.policy.at(s.layout.id(1, {ch_s, ch_m})) == kTransmit;
           }, py::arg("s"), py::arg("m"))
      .def("value", [](const CentralizedSolution& s, int n, int ch_s, int ch_m) {
             return s.vi.values.at(s.layout.id(n, {ch_s, ch_m}));
           }, py::arg("n"), py::arg("s"), py::arg("m"));

  m.def("solve_centralized", &solve_centralized, py::arg("params"), py::arg("cap_m") = 60,
        py::arg("mode") = RecursionMode::kBayesConsistent, py::arg("tol") = 1e-10,
        py::call_guard<py::gil_scoped_release>());

  py::class_<CoordinatedSolution>(m, "CoordinatedSolution")
      .def_property_readonly("iterations", [](const CoordinatedSolution& s) { return s.vi.iterations; })
      .def_property_readonly("converged", [](const CoordinatedSolution& s) { return s.vi.converged; })
      .def("initial_value", &CoordinatedSolution::initial_value)
      .def("prescription", [](const CoordinatedSolution& s, const py::object& k, const py::object& l, int ch_s,
                              int ch_m) {
             return prescription(s.table().at(CommonIndex{to_buffer(k), to_buffer(l), {ch_s, ch_m}}));
           }, py::arg("k"), py::arg("l"), py::arg("s"), py::arg("m"))
      .def("value", [](const CoordinatedSolution& s, const py::object& k, const py::object& l, int ch_s, int ch_m) {
             return s.value(CommonIndex{to_buffer(k), to_buffer(l), {ch_s, ch_m}});
           }, py::arg("k"), py::arg("l"), py::arg("s"), py::arg("m"))
      .def("match_reference", [](const CoordinatedSolution& s, int region) -> py::object {
             const auto* ref = pattern_reference().find(s.params);
             if (!ref) return py::none();
             PatternRegion reg;
             reg.max_buffer = reg.max_m = region;
             const auto res = match_pattern(s.table(), ref->spec, reg);
             py::list bad;
             for (const auto& mm : res.mismatches) {
               bad.append(py::make_tuple(from_buffer(mm.at.k), from_buffer(mm.at.l), mm.at.channel.s,
                                         mm.at.channel.m, prescription(mm.got)));
             }
             py::dict out;
             out["spec"] = ref->spec.name;
             out["matched"] = res.matched;
             out["checked"] = res.checked;
             out["mismatches"] = bad;
             return out;
           }, py::arg("region") = 12, "Compare with the shipped reference law for these parameters, if any.");

  m.def("solve_coordinated", &solve_coordinated, py::arg("params"), py::arg("cap_k") = 60, py::arg("cap_m") = 60,
        py::arg("mode") = RecursionMode::kAsPrinted, py::arg("tol") = 1e-10,
        py::call_guard<py::gil_scoped_release>());

  m.def("pbp", [](const ModelParams& p, int cap_k, int cap_m, RecursionMode mode, int max_rounds) {
          const CoordinatedLayout layout(cap_k, cap_m);
          PbpOptions o;
          o.mode = mode;
          o.max_rounds = max_rounds;
          PbpReport rep = [&] {
            py::gil_scoped_release release;
            return pbp_iteration(p, DeviceStrategy::never(layout), DeviceStrategy::never(layout), o);
          }();
          py::list trace;
          for (const auto& s : rep.trace) {
            py::dict d;
            d["round"] = s.round;
            d["responder"] = s.responder;
            d["value_before"] = s.value_before;
            d["value_after"] = s.value_after;
            d["changed"] = s.changed;
            trace.append(d);
          }
          py::dict out;
          out["converged"] = rep.converged;
          out["rounds"] = rep.rounds;
          out["final_value"] = rep.final_value;
          out["cycle"] = rep.cycle ? py::object(py::make_tuple(rep.cycle->first, rep.cycle->second)) : py::none();
          out["trace"] = trace;
          return out;
        }, py::arg("params"), py::arg("cap_k") = 60, py::arg("cap_m") = 60,
        py::arg("mode") = RecursionMode::kBayesConsistent, py::arg("max_rounds") = 50,
        "Alternating best responses from (never, never).");

  m.def("simulate", [](const ModelParams& p, const std::string& solver, int episodes, int horizon,
                       std::uint64_t seed, int cap_k, int cap_m, RecursionMode mode) {
          CompareOptions o;
          o.cap_k = cap_k;
          o.cap_m = cap_m;
          o.mode = mode;
          o.mc.episodes = episodes;
          o.mc.horizon = horizon;
          o.mc.seed = seed;
          EvalReport rep = [&] {
            py::gil_scoped_release release;
            return compare_dp_mc(p, parse_solver_choice(solver), o);
          }();
          py::dict out;
          out["mean"] = rep.mean;
          out["std_error"] = rep.std_error;
          out["episodes"] = rep.episodes;
          out["horizon"] = rep.horizon;
          out["tail_bound"] = rep.tail_bound;
          out["dp_reference"] = *rep.dp_reference;
          return out;
        }, py::arg("params"), py::arg("solver") = "coordinated", py::arg("episodes") = 200000,
        py::arg("horizon") = 0, py::arg("seed") = 1, py::arg("cap_k") = 60, py::arg("cap_m") = 60,
        py::arg("mode") = RecursionMode::kBayesConsistent,
        "Solve, simulate and return the Monte Carlo estimate next to the DP value.");

  m.def("independence_gap", [](const ModelParams& p, int horizon, bool shared) {
          return check_conditional_independence(p, horizon,
                                                shared ? ArrivalCoupling::kShared : ArrivalCoupling::kIndependent)
              .max_gap;
        }, py::arg("params"), py::arg("horizon") = 6, py::arg("shared") = false);

  m.def("audit_beliefs", [](const ModelParams& p, int max_length, std::optional<int> revealed) {
          const auto a = audit_index_beliefs(p, max_length, revealed);
          py::dict out;
          out["max_buffer_gap"] = a.max_buffer_gap;
          out["max_channel_gap"] = a.max_channel_gap;
          out["histories"] = a.histories;
          out["rejected"] = a.rejected;
          return out;
        }, py::arg("params"), py::arg("max_length") = 4, py::arg("revealed_channel") = py::none());

  m.def("threshold_reference", [] {
    py::list out;
    for (const auto& c : threshold_reference().cells) out.append(py::make_tuple(c.p, c.c, c.k0, c.k1));
    return out;
  }, "Reference (p, c, k0, k1) cells.");
}
