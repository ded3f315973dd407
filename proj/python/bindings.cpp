#include "ncsnaf/checkpoint.hpp"
#include "ncsnaf/config.hpp"
#include "ncsnaf/errors.hpp"
#include "ncsnaf/harness.hpp"
#include "ncsnaf/naf.hpp"
#include "ncsnaf/plant.hpp"
#include "ncsnaf/reward.hpp"
#include "ncsnaf/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace ncsnaf;
using Eigen::VectorXd;

namespace {

py::dict episode_summary(const agent::EpisodeSummary& s) {
    py::dict d;
    d["episode"] = s.episode;
    d["reward_metric"] = s.reward_metric;
    d["mean_loss"] = s.mean_loss;
    d["noise_scale"] = s.noise_scale;
    d["updates"] = s.updates;
    d["replay_size"] = s.replay_size;
    d["diverged"] = s.diverged;
    return d;
}

// Column arrays of a rollout, NaN where a packet never arrived.
py::dict rollout_columns(const agent::EpisodeLog& log) {
    const auto n = static_cast<Eigen::Index>(log.samples.size());
    Eigen::VectorXd t(n), u_applied(n), u_command(n), tau_sc(n), tau_cp(n), ctrl(n), plant(n);
    Eigen::MatrixXd x(n, 3), y(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = log.samples[static_cast<std::size_t>(i)];
        t[i] = s.time;
        x.row(i) = s.state.transpose();
        y.row(i) = s.output.transpose();
        u_applied[i] = s.applied_input.size() > 0 ? s.applied_input[0] : std::nan("");
        u_command[i] = s.action.size() > 0 ? s.action[0] : std::nan("");
        tau_sc[i] = s.tau_sc;
        tau_cp[i] = s.tau_cp;
        ctrl[i] = s.controller_arrival;
        plant[i] = s.plant_arrival;
    }
    py::dict d;
    d["t"] = t;
    d["x"] = x;
    d["y"] = y;
    d["u_applied"] = u_applied;
    d["u_command"] = u_command;
    d["tau_sc"] = tau_sc;
    d["tau_cp"] = tau_cp;
    d["controller_arrival"] = ctrl;
    d["plant_arrival"] = plant;
    d["rewards"] = log.rewards;
    d["diverged"] = log.diverged;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Networked-control NAF learner: core bindings";

    // Translators run newest first, so the base class goes in first.
    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<FormatError>(m, "FormatError", base.ptr());
    py::register_exception<NumericsError>(m, "NumericsError", base.ptr());

    py::class_<harness::ExperimentConfig>(m, "Config")
        .def(py::init(&harness::default_config))
        .def_static("from_text", [](const std::string& text) { return harness::parse_config(text); })
        .def_static("load", [](const std::filesystem::path& p) { return harness::load_config(p); })
        .def("set", &harness::apply_override, py::arg("assignment"), "Apply a 'section.key=value' override.")
        .def("to_ini", [](const harness::ExperimentConfig& c) { return harness::to_ini(c); })
        .def("validate", &harness::ExperimentConfig::validate)
        .def_readwrite("seed", &harness::ExperimentConfig::seed)
        .def_readwrite("out", &harness::ExperimentConfig::out)
        .def_property(
            "episodes", [](const harness::ExperimentConfig& c) { return c.train.episodes; },
            [](harness::ExperimentConfig& c, int e) { c.train.episodes = e; })
        .def_property_readonly("state_dim", [](const harness::ExperimentConfig& c) { return c.train.dims().size(); })
        .def_property_readonly("steps", [](const harness::ExperimentConfig& c) { return c.train.steps(); });

    m.def("known_keys", &harness::known_keys);

    m.def(
        "train",
        [](const harness::ExperimentConfig& c) {
            harness::RunArtifacts art;
            {
                py::gil_scoped_release release;
                art = harness::cmd_train(c);
            }
            py::dict d;
            d["dir"] = art.dir;
            d["learning_curve"] = art.learning_curve;
            d["checkpoints"] = art.checkpoints;
            py::list eps;
            for (const auto& s : art.log.episodes)
                eps.append(episode_summary(s));
            d["episodes"] = eps;
            return d;
        },
        py::arg("config"), "Run a training experiment and write its artifacts.");

    m.def(
        "evaluate",
        [](const std::filesystem::path& ckpt, const harness::ExperimentConfig& c, const VectorXd& x0,
           std::uint64_t delay_seed, const std::filesystem::path& out) {
            harness::EvalResult r;
            {
                py::gil_scoped_release release;
                r = harness::cmd_eval(ckpt, c, x0, delay_seed, out);
            }
            return rollout_columns(r.log);
        },
        py::arg("checkpoint"), py::arg("config"), py::arg("x0"), py::arg("delay_seed") = 0,
        py::arg("out") = std::filesystem::path(), "Noise-free rollout of a checkpointed policy.");

    m.def("verify", [] {
        py::list out;
        for (const auto& r : verify::run_all()) {
            py::dict d;
            d["name"] = r.name;
            d["passed"] = r.passed;
            d["detail"] = r.detail;
            d["millis"] = r.millis;
            out.append(d);
        }
        return out;
    });

    m.def("assemble_L", &naf::assemble_L, py::arg("l_entries"), py::arg("m"));
    m.def(
        "advantage",
        [](const VectorXd& u, const VectorXd& mu, const Eigen::MatrixXd& L) {
            const auto a = naf::advantage(u, mu, L);
            return py::make_tuple(a.value, a.P);
        },
        py::arg("u"), py::arg("mu"), py::arg("L"));

    m.def(
        "chua_deriv", [](const VectorXd& x, double u) { return plant::chua_deriv(x, u); }, py::arg("x"),
        py::arg("u") = 0.0);
    m.def(
        "simulate_chua",
        [](const VectorXd& x0, double duration, double u, double substep) {
            const plant::ChuaCircuit chua;
            return plant::integrate(chua, x0, plant::InputSchedule(VectorXd::Constant(1, u)), 0.0, duration, substep);
        },
        py::arg("x0"), py::arg("duration"), py::arg("u") = 0.0, py::arg("substep") = 0.0625 / 16,
        "State after integrating the Chua circuit under a constant input.");

    m.def(
        "reward",
        [](const std::vector<VectorXd>& outputs, const std::vector<VectorXd>& inputs, const VectorXd& y_next) {
            // outputs newest first [y_k .. y_{k-tau_o}], inputs newest first [u_k .. u_{k-tau-tau_o}]
            const reward::RewardWeights w;
            require_dims(!outputs.empty() && !inputs.empty(), "need at least one output and one input");
            const double a = reward::r1(y_next, outputs.front(), inputs.front(), w);
            const double b = reward::r2(outputs, outputs.size() - 1, w);
            const double c = reward::r3(inputs, inputs.size() - 1, w);
            return py::make_tuple(a, b, c, reward::total(a, b, c));
        },
        py::arg("outputs"), py::arg("inputs"), py::arg("y_next"),
        "Reward components (r1, r2, r3, total) with the default weights.");
}
