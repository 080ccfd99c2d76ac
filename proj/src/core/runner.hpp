#pragma once

#include <functional>
#include <string>

#include "core/agent.hpp"
#include "core/config.hpp"
#include "core/eval.hpp"

namespace rq::run {

// Trains per config and writes checkpoint.rqc, train_log.csv, eval_log.csv
// and config.resolved into out_dir (created if missing).
agent::TrainResult train_to_dir(const cfg::Config& config, const std::string& out_dir,
                                const std::function<void(const agent::TrainProgress&)>& progress = {});

// Sweeps the configured grid with the checkpoint's actor and writes
// heatmap.csv, returns.csv and config.resolved into out_dir.
eval::Heatmap sweep_to_dir(const cfg::Config& config, const nn::Checkpoint& ckpt,
                           const std::string& out_dir);

inline constexpr const char* kCheckpointFile = "checkpoint.rqc";
inline constexpr const char* kTrainLogFile = "train_log.csv";
inline constexpr const char* kEvalLogFile = "eval_log.csv";
inline constexpr const char* kResolvedConfigFile = "config.resolved";
inline constexpr const char* kHeatmapFile = "heatmap.csv";
inline constexpr const char* kReturnsFile = "returns.csv";

}  // namespace rq::run
