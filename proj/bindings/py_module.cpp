#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "swabsim/config.hpp"
#include "swabsim/controller.hpp"
#include "swabsim/head_motion.hpp"
#include "swabsim/measures.hpp"
#include "swabsim/observers.hpp"
#include "swabsim/selftest.hpp"
#include "swabsim/stats.hpp"
#include "swabsim/swab.hpp"
#include "swabsim/trajectory.hpp"
#include "swabsim/world.hpp"

#include <sstream>

namespace py = pybind11;
using namespace swabsim;

namespace {

TrialSpec spec_from_kwargs(const std::string& controller, const std::string& motion,
                           const std::string& phantom, const std::string& side,
                           std::uint64_t seed, int repeat) {
  TrialSpec s;
  s.controller = controller;
  s.motion = parse_motion(motion);
  s.phantom = parse_phantom(phantom);
  s.side = parse_side(side);
  s.seed = seed;
  s.repeat_index = repeat;
  return s;
}

py::dict measures_to_dict(const MeasureSet& m, Outcome outcome) {
  py::dict d;
  d["s1_transverse"] = m.s1_transverse ? py::cast(*m.s1_transverse) : py::none();
  d["s1_axial"] = m.s1_axial ? py::cast(*m.s1_axial) : py::none();
  d["reached"] = m.reached;
  d["outcome"] = outcome_name(outcome);
  d["time_to_np"] = m.time_to_np ? py::cast(*m.time_to_np) : py::none();
  d["s2_transverse"] = m.s2_transverse ? py::cast(*m.s2_transverse) : py::none();
  d["s2_axial"] = m.s2_axial ? py::cast(*m.s2_axial) : py::none();
  d["oscillation"] = m.oscillation ? py::cast(*m.oscillation) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "closed-loop nasopharyngeal swab insertion simulator";

  m.def(
      "stiffness",
      [](double L) {
        return stiffness(SwabBeam{}, L);
      },
      py::arg("L"), "transverse swab stiffness nu(L) in N/m");
  m.def(
      "restoring_force", [](double nu, double dx) { return restoring_force(nu, dx); },
      py::arg("nu"), py::arg("dx"));
  m.def(
      "fit_stiffness_law",
      [](const std::vector<std::pair<double, double>>& pairs) { return fit_stiffness_law(pairs); },
      py::arg("pairs"), "least-squares fit of (m, b) from (L, nu) pairs");
  m.def("critical_gain", &critical_gain, py::arg("k"), py::arg("alpha"), py::arg("nu"),
        "force gain that critically damps the single-axis contact loop");
  m.def(
      "transverse_gain",
      [](const std::string& preset, double displacement) {
        return transverse_gain(controller_preset(preset), SwabBeam{}, displacement);
      },
      py::arg("preset"), py::arg("displacement"));
  m.def(
      "fuzzy_eval",
      [](double p, double f_z) {
        const auto d = fuzzy_eval(p, f_z);
        return py::make_tuple(d.output, d.triggered);
      },
      py::arg("p"), py::arg("f_z"), "nasopharynx detector: returns (output, triggered)");
  m.def("sigmoid", &sigmoid_tanh, py::arg("x"));
  m.def(
      "adaptive_gain", [](double e) { return adaptive_gain(e); }, py::arg("error_norm"));
  m.def("oscillation_coefficient", &oscillation_coefficient, py::arg("series"), py::arg("rate_hz"),
        "sum of DFT magnitude bins between 0.5 and 5 Hz");
  m.def(
      "step_response_overshoot",
      [](double k, double alpha, double nu, double lambda) {
        return step_response_overshoot(k, alpha, nu, lambda);
      },
      py::arg("k"), py::arg("alpha"), py::arg("nu"), py::arg("lam"));
  m.def(
      "motion_preset",
      [](const std::string& name) {
        const auto p = motion_preset(name)[0];
        py::dict d;
        d["sigma"] = p.sigma;
        d["psi"] = p.psi;
        d["mu"] = p.mu;
        return d;
      },
      py::arg("name"));
  m.def(
      "simulate_ou",
      [](const std::string& preset, double dt, int steps, std::uint64_t seed) {
        const OUParams p = motion_preset(preset)[0];
        RngStream rng(seed, "ou-py");
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(steps));
        double th = p.setpoint, v = 0.0;
        for (int i = 0; i < steps; ++i) {
          std::tie(th, v) = ou_step(th, v, p, dt, rng);
          out.push_back(th);
        }
        return out;
      },
      py::arg("preset"), py::arg("dt"), py::arg("steps"), py::arg("seed"),
      "sample one head-motion angle trajectory");
  m.def(
      "strain_energy",
      [](double chi, double e1, double e2, const std::string& phantom, const std::string& side) {
        return strain_energy(TrajParams{chi, e1, e2},
                             make_corridor(parse_phantom(phantom), parse_side(side)), SwabBeam{});
      },
      py::arg("chi"), py::arg("e1"), py::arg("e2"), py::arg("phantom") = "A",
      py::arg("side") = "Left");
  m.def(
      "optimize_trajectory",
      [](const std::string& phantom, const std::string& side) {
        const TrajParams p = optimize_trajectory(
            TrajParams{}, make_corridor(parse_phantom(phantom), parse_side(side)), SwabBeam{});
        return py::make_tuple(p.chi, p.e1, p.e2);
      },
      py::arg("phantom") = "A", py::arg("side") = "Left");
  m.def(
      "run_trial",
      [](const std::string& controller, const std::string& motion, const std::string& phantom,
         const std::string& side, std::uint64_t seed, int repeat) {
        WorldConfig wc;
        wc.spec = spec_from_kwargs(controller, motion, phantom, side, seed, repeat);
        const TrialRecord rec = run_trial(wc);
        return measures_to_dict(compute_measures(rec), rec.outcome);
      },
      py::arg("controller") = "D2.0", py::arg("motion") = "None", py::arg("phantom") = "A",
      py::arg("side") = "Left", py::arg("seed") = 42, py::arg("repeat") = 0,
      "run one closed-loop trial and return its measures");
  m.def(
      "chi2_independence",
      [](const std::vector<std::vector<double>>& table) {
        const auto r = chi2_independence(table);
        return py::make_tuple(r.chi2, r.p, r.dof);
      },
      py::arg("table"));
  m.def(
      "anova4",
      [](const std::vector<std::tuple<std::string, std::string, std::string, std::string, double>>&
             rows) {
        std::vector<AnovaRow> data;
        for (const auto& [a, b, c, d, v] : rows)
          data.push_back({{a, b, c, d}, v});
        const auto tests = anova4(data, {"f1", "f2", "f3", "f4"});
        py::list out;
        for (const auto& t : tests) {
          py::dict e;
          e["factor"] = t.factor;
          e["F"] = t.statistic;
          e["p"] = t.p;
          e["excluded"] = t.excluded;
          out.append(e);
        }
        return out;
      },
      py::arg("rows"), "four-way main-effects ANOVA on (factor levels..., value) rows");

  m.attr("BONFERRONI_CRITICAL") = kBonferroniCritical;
  m.attr("NP_DEPTH_LEFT") = 0.0931;
  m.attr("NP_DEPTH_RIGHT") = 0.0942;
}
