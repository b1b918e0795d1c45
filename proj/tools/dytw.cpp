// Command-line front end: instance generation, evaluation, norm
// estimation, acceptance suites, and ratio fuzzing.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dytw/harness/fuzz.hpp"
#include "dytw/harness/generate.hpp"
#include "dytw/harness/report.hpp"
#include "dytw/harness/serialize.hpp"
#include "dytw/harness/suites.hpp"
#include "dytw/norm_estim.hpp"

namespace fs = std::filesystem;

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("DYTW_OUT_DIR");
  return env && *env ? std::string(env) : std::string(".");
}

void write_text(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text;
  else
    write_text(out_path, text);
}

dytw::Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file: " + path);
  nlohmann::json j;
  in >> j;
  return dytw::instance_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-weight dyadic operator toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  // ---- gen ----------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate an instance file from a seeded spec");
  auto spec = std::make_shared<dytw::InstanceSpec>();
  std::string sigma_gen = "independent-exponential";
  std::string omega_gen = "independent-exponential";
  std::string lambda_gen = "random-sparse";
  std::string gen_out;
  gen->add_option("--dim", spec->dimension, "tree dimension d (branching 2^d)");
  gen->add_option("--depth", spec->depth, "tree depth D");
  gen->add_option("--p", spec->p, "exponent p in (1,inf)");
  gen->add_option("--q", spec->q, "exponent q in (0,p)");
  gen->add_option("--seed", spec->seed, "generator seed");
  gen->add_option("--sigma-gen", sigma_gen, "uniform|independent-exponential|single-heavy-leaf");
  gen->add_option("--omega-gen", omega_gen, "uniform|independent-exponential|single-heavy-leaf");
  gen->add_option("--lambda-gen", lambda_gen, "random-sparse|riesz");
  gen->add_option("--density", spec->lambda_density, "random-sparse density in (0,1]");
  gen->add_option("--alpha", spec->riesz_alpha, "riesz exponent alpha in (0,d)");
  gen->add_option("--out", gen_out, "output path (stdout when omitted)");
  gen->callback([&, spec] {
    action = [&, spec] {
      spec->sigma_gen = dytw::measure_gen_from_string(sigma_gen);
      spec->omega_gen = dytw::measure_gen_from_string(omega_gen);
      spec->lambda_gen = dytw::lambda_gen_from_string(lambda_gen);
      dytw::Instance inst = dytw::generate_instance(*spec);
      emit(gen_out, dytw::instance_to_json(inst).dump(2) + "\n");
      return 0;
    };
  });

  // ---- eval ---------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "run every condition and estimator on an instance");
  std::string eval_file, eval_out, eval_format = "json";
  auto eval_opts = std::make_shared<dytw::EvalOptions>();
  double eval_eps = -1.0;
  eval->add_option("instance", eval_file, "instance JSON file")->required();
  eval->add_option("--seed", eval_opts->opt.seed, "optimizer master seed");
  eval->add_option("--restarts", eval_opts->opt.restarts, "optimizer restarts");
  eval->add_option("--iters", eval_opts->opt.max_iters, "optimizer iterations");
  eval->add_option("--eps", eval_eps, "epsilon for the necessary condition (default q/4)");
  eval->add_option("--out", eval_out, "output path (stdout when omitted)");
  eval->add_option("--format", eval_format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  eval->callback([&] {
    action = [&] {
      dytw::Instance inst = load_instance(eval_file);
      if (eval_eps > 0.0) eval_opts->eps_fraction = eval_eps / inst.q;
      dytw::Report r = dytw::eval_instance(inst, *eval_opts);
      if (eval_format == "csv")
        emit(eval_out, dytw::report_csv_header() + dytw::report_csv_line(r));
      else
        emit(eval_out, dytw::report_to_json(r).dump(2) + "\n");
      return 0;
    };
  });

  // ---- norm ---------------------------------------------------------
  auto* norm = app.add_subcommand("norm", "estimate one operator norm");
  std::string norm_file, norm_kind = "sum";
  auto norm_opt = std::make_shared<dytw::OptimizerOptions>();
  norm->add_option("instance", norm_file, "instance JSON file")->required();
  norm->add_option("--kind", norm_kind, "sum|max")->check(CLI::IsMember({"sum", "max"}));
  norm->add_option("--seed", norm_opt->seed, "optimizer master seed");
  norm->add_option("--restarts", norm_opt->restarts, "optimizer restarts");
  norm->add_option("--iters", norm_opt->max_iters, "optimizer iterations");
  norm->callback([&] {
    action = [&] {
      dytw::Instance inst = load_instance(norm_file);
      dytw::NormEstimate est = norm_kind == "sum"
                                   ? dytw::estimate_norm_summation(inst, *norm_opt)
                                   : dytw::estimate_norm_maximal(inst, *norm_opt);
      nlohmann::json j;
      j["kind"] = norm_kind;
      j["value"] = dytw::json_number(est.value);
      j["converged"] = est.converged;
      j["restarts_used"] = est.restarts_used;
      std::cout << j.dump(2) << "\n";
      return 0;
    };
  });

  // ---- check --------------------------------------------------------
  auto* check = app.add_subcommand("check", "run an acceptance suite (or 'all')");
  std::string check_name, check_out = default_out_dir();
  auto cfg = std::make_shared<dytw::SuiteConfig>();
  check->add_option("suite", check_name, "suite name or 'all'")->required();
  check->add_option("--seed", cfg->seed, "suite seed");
  check->add_option("--restarts", cfg->restarts, "optimizer restarts");
  check->add_option("--iters", cfg->max_iters, "optimizer iterations");
  check->add_option("--out", check_out, "directory for CSV reports (env DYTW_OUT_DIR)");
  check->callback([&] {
    action = [&] {
      std::vector<std::string> names;
      if (check_name == "all")
        names = dytw::suite_names();
      else
        names.push_back(check_name);
      bool all_passed = true;
      for (const std::string& name : names) {
        dytw::SuiteResult res = dytw::run_suite(name, *cfg);
        all_passed = all_passed && res.passed;
        std::cout << "[" << res.name << "] " << (res.passed ? "PASS" : "FAIL") << "\n";
        for (const std::string& line : res.lines) std::cout << "  " << line << "\n";
        write_text((fs::path(check_out) / (res.name + ".csv")).string(), res.csv);
      }
      return all_passed ? 0 : 1;
    };
  });

  // ---- fuzz ---------------------------------------------------------
  auto* fz = app.add_subcommand("fuzz", "mutation search maximizing a recorded ratio");
  std::string fuzz_target, fuzz_out;
  int fuzz_budget = 50;
  auto fuzz_opt = std::make_shared<dytw::OptimizerOptions>();
  fuzz_opt->restarts = 12;
  fuzz_opt->max_iters = 150;
  std::uint64_t fuzz_seed = 1;
  fz->add_option("--target", fuzz_target, "ratio name from the report")->required();
  fz->add_option("--budget", fuzz_budget, "mutation evaluations");
  fz->add_option("--seed", fuzz_seed, "search seed");
  fz->add_option("--restarts", fuzz_opt->restarts, "optimizer restarts per evaluation");
  fz->add_option("--out", fuzz_out, "path for the worst instance file");
  fz->callback([&] {
    action = [&] {
      dytw::FuzzResult res = dytw::fuzz(fuzz_target, fuzz_budget, fuzz_seed, *fuzz_opt);
      std::string out = fuzz_out.empty()
                            ? (fs::path(default_out_dir()) / ("fuzz_" + fuzz_target + ".json")).string()
                            : fuzz_out;
      write_text(out, dytw::instance_to_json(res.worst).dump(2) + "\n");
      nlohmann::json j;
      j["target"] = res.target;
      j["ratio"] = dytw::json_number(res.ratio);
      j["evaluations"] = res.evaluations;
      j["worst_instance"] = out;
      j["digest"] = dytw::instance_digest(res.worst);
      std::cout << j.dump(2) << "\n";
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return action();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
