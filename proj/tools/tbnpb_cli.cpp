// Command-line harness for the tbnpb library. Talks to the shared library
// exclusively through the public C interface.
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "tbnpb/tbnpb.h"

namespace {

int finish(tbnpb_status status) {
  if (status == TBNPB_OK) return 0;
  std::fprintf(stderr, "error: %s\n", tbnpb_last_error());
  return static_cast<int>(status);
}

const char* opt_cstr(const std::string& s) {
  return s.empty() ? nullptr : s.c_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tool-tip model training, online grasp adaptation, and "
               "command optimization on a built-in kinematic arm simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", [] { return std::string(tbnpb_version()); });

  std::string config;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  app.add_option("--config", config, "configuration file (key = value)")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "random seed (default 0)");
  app.add_option("--out", out_dir, "output directory (default ./out)");

  auto* gen = app.add_subcommand(
      "gen-data", "sample the grasp grid on the simulator into dataset.csv");

  std::string train_data;
  auto* train = app.add_subcommand(
      "train", "train the network and per-grasp latent codes offline");
  train->add_option("--data", train_data,
                    "training dataset CSV (default <out>/dataset.csv)");

  std::string ft_model, ft_data;
  auto* ft = app.add_subcommand(
      "finetune", "warm-start from a model, reset latents, train on new data");
  ft->add_option("--model", ft_model, "base model file")->required();
  ft->add_option("--data", ft_data, "fine-tuning dataset CSV")->required();

  std::string adapt_model, scenario = "1";
  auto* adapt = app.add_subcommand(
      "adapt-run",
      "stream the shaking motion with a mid-run grasp change and adapt the "
      "latent online");
  adapt->add_option("--model", adapt_model, "trained model file")->required();
  adapt->add_option("--scenario", scenario, "1, 2 or config");

  std::string ctrl_model, mode = "update_p";
  auto* ctrl = app.add_subcommand(
      "control-run",
      "closed-loop tool-tip control plus a generalization replay");
  ctrl->add_option("--model", ctrl_model, "trained model file")->required();
  ctrl->add_option("--mode", mode, "update_p, update_w or frozen");

  std::string map_model;
  auto* pbmap = app.add_subcommand(
      "pb-map", "PCA projection of the learned latent codes with grasp labels");
  pbmap->add_option("--model", map_model, "trained model file")->required();

  CLI11_PARSE(app, argc, argv);

  const char* cfg = opt_cstr(config);
  if (train_data.empty()) train_data = out_dir + "/dataset.csv";
  if (gen->parsed())
    return finish(tbnpb_run_gen_data(cfg, seed, out_dir.c_str()));
  if (train->parsed())
    return finish(tbnpb_run_train(cfg, seed, train_data.c_str(), out_dir.c_str()));
  if (ft->parsed())
    return finish(tbnpb_run_finetune(cfg, seed, ft_model.c_str(),
                                     ft_data.c_str(), out_dir.c_str()));
  if (adapt->parsed())
    return finish(tbnpb_run_adapt(cfg, seed, adapt_model.c_str(),
                                  scenario.c_str(), out_dir.c_str()));
  if (ctrl->parsed())
    return finish(tbnpb_run_control(cfg, seed, ctrl_model.c_str(), mode.c_str(),
                                    out_dir.c_str()));
  if (pbmap->parsed())
    return finish(tbnpb_run_pb_map(cfg, map_model.c_str(), out_dir.c_str()));
  return 1;
}
