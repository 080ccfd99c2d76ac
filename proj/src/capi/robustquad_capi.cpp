#include "robustquad.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <string>

#include "core/checkpoint.hpp"
#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/eval.hpp"
#include "core/runner.hpp"
#include "core/text.hpp"

struct rq_config {
  rq::cfg::Config impl;
};

struct rq_checkpoint {
  rq::nn::Checkpoint impl;
};

struct rq_heatmap {
  rq::eval::Heatmap impl;
};

namespace {

thread_local std::string g_last_error;

rq_status fail(rq_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Maps the core exception taxonomy onto C status codes.
rq_status guard(const std::exception_ptr& eptr) {
  try {
    std::rethrow_exception(eptr);
  } catch (const rq::ConfigError& e) {
    return fail(RQ_ERR_CONFIG, e.what());
  } catch (const rq::UsageError& e) {
    return fail(RQ_ERR_USAGE, e.what());
  } catch (const rq::FormatError& e) {
    return fail(RQ_ERR_FORMAT, e.what());
  } catch (const rq::DivergenceError& e) {
    return fail(RQ_ERR_DIVERGED, e.what());
  } catch (const rq::IoError& e) {
    return fail(RQ_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(RQ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RQ_ERR_INTERNAL, "unknown error");
  }
}

template <typename Fn>
rq_status wrap(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RQ_OK;
  } catch (...) {
    return guard(std::current_exception());
  }
}

rq_status copy_out(const std::string& text, char* buf, size_t buf_size) {
  if (!buf || buf_size == 0)
    return fail(RQ_ERR_USAGE, "output buffer is null or empty");
  if (text.size() + 1 > buf_size)
    return fail(RQ_ERR_USAGE, "output buffer too small (" +
                                  std::to_string(text.size() + 1) + " bytes needed)");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return RQ_OK;
}

}  // namespace

extern "C" {

const char* rq_version(void) { return "1.0.0"; }

const char* rq_status_name(rq_status status) {
  switch (status) {
    case RQ_OK: return "ok";
    case RQ_ERR_USAGE: return "usage error";
    case RQ_ERR_CONFIG: return "config error";
    case RQ_ERR_FORMAT: return "format error";
    case RQ_ERR_DIVERGED: return "training diverged";
    case RQ_ERR_IO: return "io error";
    case RQ_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* rq_last_error(void) { return g_last_error.c_str(); }

rq_config* rq_config_new(void) { return new rq_config{}; }

rq_config* rq_config_clone(const rq_config* cfg) {
  if (!cfg) return nullptr;
  return new rq_config{cfg->impl};
}

void rq_config_free(rq_config* cfg) { delete cfg; }

rq_status rq_config_load_file(rq_config* cfg, const char* path) {
  if (!cfg || !path) return fail(RQ_ERR_USAGE, "null argument");
  return wrap([&] { cfg->impl.load_file(path); });
}

rq_status rq_config_set(rq_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(RQ_ERR_USAGE, "null argument");
  return wrap([&] { cfg->impl.set(key, value); });
}

rq_status rq_config_get(const rq_config* cfg, const char* key, char* buf,
                        size_t buf_size) {
  if (!cfg || !key) return fail(RQ_ERR_USAGE, "null argument");
  std::string value;
  const rq_status st = wrap([&] { value = cfg->impl.get(key); });
  if (st != RQ_OK) return st;
  return copy_out(value, buf, buf_size);
}

rq_status rq_config_write_file(const rq_config* cfg, const char* path) {
  if (!cfg || !path) return fail(RQ_ERR_USAGE, "null argument");
  return wrap([&] { cfg->impl.write_file(path); });
}

rq_status rq_config_validate(const rq_config* cfg) {
  if (!cfg) return fail(RQ_ERR_USAGE, "null argument");
  return wrap([&] { (void)cfg->impl.resolve(); });
}

rq_status rq_train(const rq_config* cfg, const char* out_dir,
                   rq_train_progress_fn progress, void* user) {
  if (!cfg || !out_dir) return fail(RQ_ERR_USAGE, "null argument");
  return wrap([&] {
    std::function<void(const rq::agent::TrainProgress&)> cb;
    if (progress) {
      cb = [progress, user](const rq::agent::TrainProgress& p) {
        rq_train_report report;
        report.step = p.step;
        report.total_steps = p.total_steps;
        report.episode = p.episode;
        report.last_episode_return = p.last_episode_return;
        report.last_eval_return = p.last_eval_return;
        report.has_eval = p.has_eval ? 1 : 0;
        progress(&report, user);
      };
    }
    rq::run::train_to_dir(cfg->impl, out_dir, cb);
  });
}

rq_checkpoint* rq_checkpoint_load(const char* path, rq_status* status) {
  rq_checkpoint* out = nullptr;
  const rq_status st = wrap([&] {
    if (!path) throw rq::UsageError("null path");
    out = new rq_checkpoint{rq::nn::checkpoint_load(path)};
  });
  if (status) *status = st;
  return out;
}

rq_status rq_checkpoint_save(const rq_checkpoint* ckpt, const char* path) {
  if (!ckpt || !path) return fail(RQ_ERR_USAGE, "null argument");
  return wrap([&] { rq::nn::checkpoint_save(ckpt->impl, path); });
}

void rq_checkpoint_free(rq_checkpoint* ckpt) { delete ckpt; }

int rq_checkpoint_network_count(const rq_checkpoint* ckpt) {
  return ckpt ? static_cast<int>(ckpt->impl.nets.size()) : 0;
}

rq_status rq_checkpoint_describe(const rq_checkpoint* ckpt, int index, char* buf,
                                 size_t buf_size) {
  if (!ckpt) return fail(RQ_ERR_USAGE, "null checkpoint");
  if (index < 0 || index >= static_cast<int>(ckpt->impl.nets.size()))
    return fail(RQ_ERR_USAGE, "network index out of range");
  const auto& entry = ckpt->impl.nets[static_cast<size_t>(index)];
  std::string line = rq::nn::role_name(entry.role);
  line += " dims=";
  for (size_t i = 0; i < entry.net.layer_dims.size(); ++i) {
    if (i) line += ",";
    line += std::to_string(entry.net.layer_dims[i]);
  }
  line += " params=" + std::to_string(entry.net.parameter_count());
  return copy_out(line, buf, buf_size);
}

rq_status rq_sweep(const rq_config* cfg, const rq_checkpoint* ckpt,
                   const char* out_dir, rq_heatmap** out) {
  if (!cfg || !ckpt || !out_dir) return fail(RQ_ERR_USAGE, "null argument");
  return wrap([&] {
    rq::eval::Heatmap map = rq::run::sweep_to_dir(cfg->impl, ckpt->impl, out_dir);
    if (out) *out = new rq_heatmap{std::move(map)};
  });
}

rq_heatmap* rq_heatmap_load(const char* csv_path, rq_status* status) {
  rq_heatmap* out = nullptr;
  const rq_status st = wrap([&] {
    if (!csv_path) throw rq::UsageError("null path");
    std::ifstream is(csv_path);
    if (!is) throw rq::IoError(std::string("cannot open: ") + csv_path);
    out = new rq_heatmap{rq::eval::read_heatmap_csv(is, csv_path)};
  });
  if (status) *status = st;
  return out;
}

void rq_heatmap_free(rq_heatmap* map) { delete map; }

int rq_heatmap_mass_count(const rq_heatmap* map) {
  return map ? map->impl.rows() : 0;
}

int rq_heatmap_delta_count(const rq_heatmap* map) {
  return map ? map->impl.cols() : 0;
}

double rq_heatmap_mass_ratio(const rq_heatmap* map, int i) {
  return map->impl.grid.mass_ratios[static_cast<size_t>(i)];
}

double rq_heatmap_delta(const rq_heatmap* map, int j) {
  return map->impl.grid.deltas[static_cast<size_t>(j)];
}

double rq_heatmap_mean_return(const rq_heatmap* map, int i, int j) {
  return map->impl.mean(i, j);
}

rq_status rq_compare(const rq_heatmap* a, const rq_heatmap* b,
                     const char* diff_csv_path, double* win_fraction) {
  if (!a || !b) return fail(RQ_ERR_USAGE, "null heatmap");
  return wrap([&] {
    const rq::eval::CompareResult cmp = rq::eval::compare(a->impl, b->impl);
    if (diff_csv_path) {
      std::ofstream os(diff_csv_path, std::ios::trunc);
      if (!os) throw rq::IoError(std::string("cannot open for writing: ") + diff_csv_path);
      rq::eval::write_difference_csv(a->impl, cmp, os);
    }
    if (win_fraction) *win_fraction = cmp.win_fraction;
  });
}

}  // extern "C"
