// rq: train / sweep / compare / inspect-checkpoint front end for the
// robustquad shared library. Talks to the library exclusively through the
// C API in robustquad.h.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "robustquad.h"

namespace {

int exit_code(rq_status status) {
  switch (status) {
    case RQ_OK: return 0;
    case RQ_ERR_USAGE: return 2;
    case RQ_ERR_CONFIG: return 2;
    case RQ_ERR_FORMAT: return 3;
    case RQ_ERR_DIVERGED: return 4;
    default: return 1;
  }
}

int report(rq_status status, const char* what) {
  if (status == RQ_OK) return 0;
  std::fprintf(stderr, "rq: %s: %s: %s\n", what, rq_status_name(status), rq_last_error());
  return exit_code(status);
}

struct ConfigHandle {
  rq_config* cfg = rq_config_new();
  ~ConfigHandle() { rq_config_free(cfg); }
};

// Builds the effective config: defaults, then the file, then RQ_SEED, then
// the --key value overrides from the command line.
int build_config(rq_config* cfg, const std::string& config_path,
                 const std::vector<std::string>& overrides) {
  if (!config_path.empty()) {
    if (int rc = report(rq_config_load_file(cfg, config_path.c_str()), "loading config"))
      return rc;
  }
  if (const char* seed = std::getenv("RQ_SEED"); seed && *seed) {
    if (int rc = report(rq_config_set(cfg, "run.seed", seed), "applying RQ_SEED"))
      return rc;
  }
  for (size_t i = 0; i < overrides.size(); ++i) {
    std::string key = overrides[i];
    if (key.rfind("--", 0) != 0) {
      std::fprintf(stderr, "rq: override '%s' must look like --section.key value\n",
                   key.c_str());
      return 2;
    }
    key = key.substr(2);
    std::string value;
    const auto eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= overrides.size()) {
        std::fprintf(stderr, "rq: override --%s is missing a value\n", key.c_str());
        return 2;
      }
      value = overrides[++i];
    }
    if (int rc = report(rq_config_set(cfg, key.c_str(), value.c_str()),
                        ("setting " + key).c_str()))
      return rc;
  }
  return 0;
}

void print_progress(const rq_train_report* r, void*) {
  if (r->has_eval)
    std::fprintf(stderr, "step %llu/%llu  eval_return %.2f\n",
                 static_cast<unsigned long long>(r->step),
                 static_cast<unsigned long long>(r->total_steps), r->last_eval_return);
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              const std::string& algorithm, const std::vector<std::string>& overrides) {
  ConfigHandle h;
  if (int rc = build_config(h.cfg, config_path, overrides)) return rc;
  if (!algorithm.empty()) {
    if (int rc = report(rq_config_set(h.cfg, "run.algorithm", algorithm.c_str()),
                        "setting algorithm"))
      return rc;
  }
  char algo[32] = "";
  char seed[32] = "";
  rq_config_get(h.cfg, "run.algorithm", algo, sizeof(algo));
  rq_config_get(h.cfg, "run.seed", seed, sizeof(seed));
  std::fprintf(stderr, "rq: training %s (seed %s) -> %s\n", algo, seed, out_dir.c_str());
  if (int rc = report(rq_train(h.cfg, out_dir.c_str(), print_progress, nullptr), "train")) {
    if (rc == 4)
      std::fprintf(stderr, "rq: partial training log: %s/train_log.csv\n", out_dir.c_str());
    return rc;
  }
  std::fprintf(stderr, "rq: wrote %s/checkpoint.rqc\n", out_dir.c_str());
  return 0;
}

int cmd_sweep(const std::string& checkpoint_path, const std::string& config_path,
              const std::string& out_dir, const std::vector<std::string>& overrides) {
  ConfigHandle h;
  if (int rc = build_config(h.cfg, config_path, overrides)) return rc;
  rq_status status = RQ_OK;
  rq_checkpoint* ckpt = rq_checkpoint_load(checkpoint_path.c_str(), &status);
  if (int rc = report(status, "loading checkpoint")) return rc;
  status = rq_sweep(h.cfg, ckpt, out_dir.c_str(), nullptr);
  rq_checkpoint_free(ckpt);
  if (int rc = report(status, "sweep")) return rc;
  std::fprintf(stderr, "rq: wrote %s/heatmap.csv and %s/returns.csv\n", out_dir.c_str(),
               out_dir.c_str());
  return 0;
}

int cmd_compare(const std::string& path_a, const std::string& path_b,
                const std::string& diff_path) {
  rq_status status = RQ_OK;
  rq_heatmap* a = rq_heatmap_load(path_a.c_str(), &status);
  if (int rc = report(status, ("loading " + path_a).c_str())) return rc;
  rq_heatmap* b = rq_heatmap_load(path_b.c_str(), &status);
  if (int rc = report(status, ("loading " + path_b).c_str())) {
    rq_heatmap_free(a);
    return rc;
  }
  double win_fraction = 0.0;
  status = rq_compare(a, b, diff_path.empty() ? nullptr : diff_path.c_str(), &win_fraction);
  rq_heatmap_free(a);
  rq_heatmap_free(b);
  if (int rc = report(status, "compare")) return rc;
  std::printf("win_fraction %.17g\n", win_fraction);
  if (!diff_path.empty()) std::fprintf(stderr, "rq: wrote %s\n", diff_path.c_str());
  return 0;
}

int cmd_inspect(const std::string& path) {
  rq_status status = RQ_OK;
  rq_checkpoint* ckpt = rq_checkpoint_load(path.c_str(), &status);
  if (int rc = report(status, "loading checkpoint")) return rc;
  const int count = rq_checkpoint_network_count(ckpt);
  std::printf("networks %d\n", count);
  for (int i = 0; i < count; ++i) {
    char line[256];
    if (rq_checkpoint_describe(ckpt, i, line, sizeof(line)) == RQ_OK)
      std::printf("%s\n", line);
  }
  rq_checkpoint_free(ckpt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust quadcopter RL: train, evaluate and compare policies"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", algorithm, checkpoint_path;
  std::string path_a, path_b, diff_path;
  std::string inspect_path;

  CLI::App* train = app.add_subcommand("train", "train a policy");
  train->add_option("-c,--config", config_path, "config file");
  train->add_option("-o,--out", out_dir, "output directory");
  train->add_option("--algorithm", algorithm, "ar-ddpg or ddpg")
      ->check(CLI::IsMember({"ar-ddpg", "ddpg"}));
  train->allow_extras();

  CLI::App* sweep = app.add_subcommand("sweep", "run the robustness grid");
  sweep->add_option("-k,--checkpoint", checkpoint_path, "checkpoint file")->required();
  sweep->add_option("-c,--config", config_path, "config file");
  sweep->add_option("-o,--out", out_dir, "output directory");
  sweep->allow_extras();

  CLI::App* compare = app.add_subcommand("compare", "compare two heatmap CSVs");
  compare->add_option("-a", path_a, "heatmap CSV A (robust)")->required();
  compare->add_option("-b", path_b, "heatmap CSV B (baseline)")->required();
  compare->add_option("-o,--out", diff_path, "difference CSV path");

  CLI::App* inspect = app.add_subcommand("inspect-checkpoint", "describe a checkpoint");
  inspect->add_option("path", inspect_path, "checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  if (train->parsed())
    return cmd_train(config_path, out_dir, algorithm, train->remaining());
  if (sweep->parsed())
    return cmd_sweep(checkpoint_path, config_path, out_dir, sweep->remaining());
  if (compare->parsed()) return cmd_compare(path_a, path_b, diff_path);
  if (inspect->parsed()) return cmd_inspect(inspect_path);
  return 2;
}
