#include "core/runner.hpp"

#include <filesystem>
#include <fstream>

#include "core/checkpoint.hpp"
#include "core/errors.hpp"

namespace rq::run {

namespace {

namespace fs = std::filesystem;

std::string prepare_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
  return out_dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  return os;
}

}  // namespace

agent::TrainResult train_to_dir(const cfg::Config& config, const std::string& out_dir,
                                const std::function<void(const agent::TrainProgress&)>& progress) {
  const cfg::Resolved resolved = config.resolve();
  const fs::path dir = prepare_dir(out_dir);
  config.write_file((dir / kResolvedConfigFile).string());

  agent::TrainSetup setup;
  setup.world = resolved.world;
  setup.hp = resolved.hp;
  setup.hidden = resolved.hidden;
  setup.use_adversary = resolved.use_adversary;

  std::ofstream train_log = open_out(dir / kTrainLogFile);
  std::ofstream eval_log = open_out(dir / kEvalLogFile);
  agent::TrainSinks sinks;
  sinks.train_log = &train_log;
  sinks.eval_log = &eval_log;
  sinks.progress = progress;

  agent::TrainResult result = agent::train(setup, sinks);
  nn::checkpoint_save(result.checkpoint, (dir / kCheckpointFile).string());
  return result;
}

eval::Heatmap sweep_to_dir(const cfg::Config& config, const nn::Checkpoint& ckpt,
                           const std::string& out_dir) {
  const cfg::Resolved resolved = config.resolve();
  const nn::Mlp* actor = ckpt.find(nn::Role::Actor);
  if (!actor)
    throw FormatError(FormatError::Kind::Malformed, "checkpoint has no actor network");
  if (actor->input_dim() != env::kObsDim || actor->output_dim() != env::kActionDim)
    throw FormatError(FormatError::Kind::Malformed,
                      "actor network shape does not match the 18-dim observation / "
                      "4-dim action interface");

  const fs::path dir = prepare_dir(out_dir);
  config.write_file((dir / kResolvedConfigFile).string());

  eval::Heatmap map =
      eval::sweep(*actor, resolved.grid, resolved.world, resolved.seed, resolved.eval_threads);

  {
    std::ofstream os = open_out(dir / kHeatmapFile);
    eval::write_heatmap_csv(map, os);
  }
  {
    std::ofstream os = open_out(dir / kReturnsFile);
    eval::write_episode_returns_csv(map, os);
  }
  return map;
}

}  // namespace rq::run
