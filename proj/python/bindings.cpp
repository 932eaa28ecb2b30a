#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "psurr/cli.hpp"
#include "psurr/config.hpp"
#include "psurr/envs.hpp"
#include "psurr/policy.hpp"
#include "psurr/ratio_math.hpp"
#include "psurr/surrogate.hpp"
#include "psurr/trainer.hpp"

namespace py = pybind11;
using namespace psurr;

namespace {

Sign sign_arg(int sigma) {
  if (sigma != 1 && sigma != -1) throw py::value_error("sigma must be +1 or -1");
  return sigma > 0 ? Sign::positive : Sign::negative;
}

py::dict metrics_dict(const StepMetrics& m) {
  py::dict d;
  d["step"] = m.step;
  d["episode_return"] = m.episode_return;
  d["surrogate_loss"] = m.surrogate_loss;
  d["value_loss"] = m.value_loss;
  d["mean_ratio"] = m.mean_ratio;
  d["mean_reg_amount"] = m.mean_regularization_amount;
  d["entropy"] = m.entropy;
  d["grad_norm"] = m.grad_norm;
  d["skipped_updates"] = m.skipped_updates;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Regularized policy-gradient surrogates";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "density_ratio",
      [](double logp_new, double logp_base, double max_ratio) {
        return density_ratio(logp_new, logp_base, max_ratio).value;
      },
      py::arg("logp_new"), py::arg("logp_base"), py::arg("max_ratio") = kDefaultMaxRatio);
  m.def("relative_ratio", &relative_ratio, py::arg("rho"), py::arg("beta"));
  m.def(
      "pe_divergence", [](const std::vector<double>& rho) { return pe_divergence_mc(rho); }, py::arg("rho"));
  m.def(
      "rpe_divergence", [](const std::vector<double>& rho, double beta) { return rpe_divergence_mc(rho, beta); },
      py::arg("rho"), py::arg("beta"));
  m.def(
      "ratio_thresholds",
      [](double eps, double beta, int sigma) {
        const auto t = ratio_thresholds(eps, beta, sign_arg(sigma));
        return py::make_tuple(t.rho_beta_eps, t.rho_eps);
      },
      py::arg("epsilon"), py::arg("beta"), py::arg("sigma"),
      "Returns (rho_beta_eps, rho_eps).");
  m.def(
      "regularization_gain",
      [](double a, double eps, double beta, int sigma) { return regularization_gain(a, eps, beta, sign_arg(sigma)); },
      py::arg("advantage"), py::arg("epsilon"), py::arg("beta"), py::arg("sigma"));

  py::enum_<Variant>(m, "Variant")
      .value("ppo_clip", Variant::ppo_clip)
      .value("ppo_rb", Variant::ppo_rb)
      .value("ppo_rpe", Variant::ppo_rpe)
      .value("vanilla", Variant::vanilla);

  py::class_<SurrogateSpec>(m, "SurrogateSpec")
      .def(py::init([](Variant v, double eps, double eta, double beta) {
             SurrogateSpec s{v, eps, eta, beta};
             validate(s);
             return s;
           }),
           py::arg("variant") = Variant::ppo_rpe, py::arg("epsilon") = 0.1, py::arg("eta") = 0.0,
           py::arg("beta") = 0.5)
      .def_readwrite("variant", &SurrogateSpec::variant)
      .def_readwrite("epsilon", &SurrogateSpec::epsilon)
      .def_readwrite("eta", &SurrogateSpec::eta)
      .def_readwrite("beta", &SurrogateSpec::beta);

  py::class_<SurrogateEval>(m, "SurrogateEval")
      .def_readonly("loss_term", &SurrogateEval::loss_term)
      .def_readonly("dloss_drho", &SurrogateEval::dloss_drho)
      .def_readonly("effective_advantage", &SurrogateEval::effective_advantage)
      .def_readonly("regularization_amount", &SurrogateEval::regularization_amount);

  m.def("evaluate", &evaluate, py::arg("rho"), py::arg("advantage"), py::arg("spec"));
  m.def(
      "loss_curve",
      [](const SurrogateSpec& spec, int sigma, const std::vector<double>& grid) {
        std::vector<std::tuple<double, double, double>> rows;
        for (const auto& p : loss_curve(spec, sign_arg(sigma), grid)) rows.emplace_back(p.rho, p.neg_loss, p.dloss_drho);
        return rows;
      },
      py::arg("spec"), py::arg("sigma"), py::arg("rho_grid"), "Rows of (rho, neg_loss, dloss_drho).");

  m.def(
      "log_prob",
      [](const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std, const Eigen::VectorXd& action) {
        return log_prob(GaussianHead{mean, log_std}, action);
      },
      py::arg("mean"), py::arg("log_std"), py::arg("action"), "Log-density of a tanh-squashed Gaussian action.");

  py::class_<Env>(m, "Env")
      .def(py::init([](const std::string& name, std::uint64_t seed) {
             return Env(EnvSpec::make(parse_env_name(name)), seed);
           }),
           py::arg("name"), py::arg("seed") = 0)
      .def("reset", py::overload_cast<>(&Env::reset))
      .def("reset", py::overload_cast<std::uint64_t>(&Env::reset), py::arg("seed"))
      .def(
          "step",
          [](Env& env, const Eigen::VectorXd& action) {
            const Transition t = env.step(action);
            return py::make_tuple(t.next_state, t.reward, t.done, t.truncated);
          },
          py::arg("action"), "Returns (next_state, reward, done, truncated).")
      .def_property_readonly("state_dim", [](const Env& e) { return e.spec().state_dim; })
      .def_property_readonly("action_dim", [](const Env& e) { return e.spec().action_dim; })
      .def_property_readonly("max_steps", [](const Env& e) { return e.spec().max_steps; });

  m.def(
      "train",
      [](const std::string& config_json) {
        const TrainerConfig cfg = config_from_json(nlohmann::json::parse(config_json));
        TrainResult res;
        {
          py::gil_scoped_release release;
          res = train(cfg);
        }
        py::list rows;
        for (const auto& mrow : res.metrics) rows.append(metrics_dict(mrow));
        return rows;
      },
      py::arg("config_json"), "Trains from a JSON config string; returns one metrics dict per rollout.");

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a psurr subcommand; returns (exit_code, stdout, stderr).");
}
