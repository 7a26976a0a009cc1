// catnh: figure reproduction, sweeps and validation from one binary.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "catnh/config.hpp"
#include "catnh/errors.hpp"
#include "catnh/experiments.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<int> dim;
  std::optional<double> tol;
  std::optional<unsigned> jobs;
  std::vector<std::string> sets;
  std::string part = "all";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", f.out, "output directory (default: $CATNH_OUT, else ./out)");
  cmd->add_option("--dim", f.dim, "Fock cutoff override");
  cmd->add_option("--tol", f.tol, "integrator relative tolerance");
  cmd->add_option("-j,--jobs", f.jobs, "worker threads (0 = all cores)");
  cmd->add_option("-s,--set", f.sets, "override one key, e.g. --set alpha=2")->take_all();
}

catnh::KeyValueFile collect(const CommonFlags& f) {
  catnh::KeyValueFile kv;
  if (!f.config.empty()) kv = catnh::KeyValueFile::load(f.config);
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw catnh::ConfigError("--set expects key=value, got '" + s + "'");
    catnh::KeyValueFile one = catnh::KeyValueFile::parse(s, "--set");
    kv.merge(one);
  }
  if (!kv.entries.count("out")) {
    if (const char* env = std::getenv("CATNH_OUT"); env && *env) kv.entries["out"] = env;
  }
  if (!f.out.empty()) kv.entries["out"] = f.out;
  if (f.dim) kv.entries["dim"] = std::to_string(*f.dim);
  if (f.tol) kv.entries["tol"] = catnh::format_number(*f.tol);
  if (f.jobs) kv.entries["jobs"] = std::to_string(*f.jobs);
  return kv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kerr cat-qubit non-Hermitian dynamics: figure reproduction, sweeps and validation"};
  app.require_subcommand(1);

  CommonFlags flags;
  catnh::Experiment experiment = catnh::Experiment::Fig2;
  auto sub = [&](const char* name, const char* help, catnh::Experiment e) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd, flags);
    cmd->callback([&experiment, e] { experiment = e; });
    return cmd;
  };
  CLI::App* fig2 = sub("fig2", "full master equation vs effective dimer (dynamics and discrepancy map)",
                       catnh::Experiment::Fig2);
  fig2->add_option("--part", flags.part, "dynamics | map | all")->check(CLI::IsMember({"dynamics", "map", "all"}));
  sub("fig3", "PT transition sweep in alpha", catnh::Experiment::Fig3PtTransition);
  sub("fig4", "two-KPO entanglement sweep in beta", catnh::Experiment::Fig4Entanglement);
  sub("sweep", "custom alpha sweep of the dimer", catnh::Experiment::CustomSweep);
  sub("validate", "run every invariant suite and write a report", catnh::Experiment::Validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : catnh::kExitConfig;
  }

  if (experiment == catnh::Experiment::Fig2) {
    if (flags.part == "dynamics") experiment = catnh::Experiment::Fig2Dynamics;
    if (flags.part == "map") experiment = catnh::Experiment::Fig2DiscrepancyMap;
  }

  catnh::ExperimentConfig cfg;
  try {
    cfg = catnh::ExperimentConfig::from_entries(experiment, collect(flags));
  } catch (const catnh::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return catnh::kExitConfig;
  }

  try {
    const catnh::RunOutput out = catnh::run_experiment(cfg);
    for (const auto& n : out.notes) std::cout << n << "\n";
    for (const auto& f : out.files) std::cout << "wrote " << f.string() << "\n";
    return out.exit_code;
  } catch (const std::exception& e) {
    std::cerr << catnh::error_kind(e) << ": " << e.what() << "\n";
    return catnh::exit_code_for(e);
  }
}
