#include "tbnpb/tbnpb.h"

#include <cstring>
#include <string>

#include "../core/adapt.hpp"
#include "../core/controller.hpp"
#include "../core/experiments.hpp"
#include "../core/model_io.hpp"

namespace {

thread_local std::string g_last_error;

tbnpb_status status_of(tbnpb::ErrorCode code) {
  switch (code) {
    case tbnpb::ErrorCode::invalid_argument:
      return TBNPB_E_INVALID_ARGUMENT;
    case tbnpb::ErrorCode::dimension_mismatch:
      return TBNPB_E_DIMENSION;
    case tbnpb::ErrorCode::io_failure:
      return TBNPB_E_IO;
    case tbnpb::ErrorCode::parse_failure:
      return TBNPB_E_PARSE;
    case tbnpb::ErrorCode::numeric_failure:
      return TBNPB_E_NUMERIC;
    case tbnpb::ErrorCode::no_convergence:
      return TBNPB_E_NO_CONVERGENCE;
  }
  return TBNPB_E_INTERNAL;
}

template <typename Fn>
tbnpb_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return TBNPB_OK;
  } catch (const tbnpb::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TBNPB_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return TBNPB_E_INTERNAL;
  }
}

tbnpb_status arg_error(const char* msg) {
  g_last_error = msg;
  return TBNPB_E_INVALID_ARGUMENT;
}

Eigen::Map<const Eigen::VectorXd> as_vec(const double* data, size_t len) {
  return {data, static_cast<Eigen::Index>(len)};
}

tbnpb::Config load_config(const char* config_path) {
  return config_path ? tbnpb::Config::parse_file(config_path) : tbnpb::Config{};
}

}  // namespace

struct tbnpb_model {
  tbnpb::ModelFile file;
};

struct tbnpb_adapter {
  tbnpb::OnlineBuffer buffer;
  tbnpb::LatentUpdater updater;
  Eigen::VectorXd latent;
};

extern "C" {

const char* tbnpb_last_error(void) { return g_last_error.c_str(); }

const char* tbnpb_version(void) { return "1.0.0"; }

tbnpb_status tbnpb_model_load(const char* path, tbnpb_model** out) {
  if (!path || !out) return arg_error("null argument to tbnpb_model_load");
  return guarded([&] { *out = new tbnpb_model{tbnpb::load_model(path)}; });
}

tbnpb_status tbnpb_model_save(const tbnpb_model* model, const char* path) {
  if (!model || !path) return arg_error("null argument to tbnpb_model_save");
  return guarded(
      [&] { tbnpb::save_model(path, model->file.model, model->file.latents); });
}

void tbnpb_model_free(tbnpb_model* model) { delete model; }

int tbnpb_model_command_dim(const tbnpb_model* model) {
  return model ? model->file.model.command_dim : 0;
}

int tbnpb_model_latent_dim(const tbnpb_model* model) {
  return model ? model->file.model.latent_dim : 0;
}

int tbnpb_model_latent_count(const tbnpb_model* model) {
  return model ? static_cast<int>(model->file.latents.size()) : 0;
}

tbnpb_status tbnpb_model_latent(const tbnpb_model* model, int index,
                                uint32_t* grasp_id, double* code,
                                size_t code_len) {
  if (!model) return arg_error("null model");
  if (index < 0 || index >= static_cast<int>(model->file.latents.size()))
    return arg_error("latent index out of range");
  const auto& entry = model->file.latents[static_cast<std::size_t>(index)];
  if (grasp_id) *grasp_id = entry.grasp_id;
  if (code) {
    if (static_cast<Eigen::Index>(code_len) != entry.code.size()) {
      g_last_error = "latent buffer length mismatch";
      return TBNPB_E_DIMENSION;
    }
    std::memcpy(code, entry.code.data(), code_len * sizeof(double));
  }
  return TBNPB_OK;
}

tbnpb_status tbnpb_model_forward(const tbnpb_model* model, const double* u_deg,
                                 size_t u_len, const double* p, size_t p_len,
                                 double tip_mm[3]) {
  if (!model || !u_deg || !p || !tip_mm)
    return arg_error("null argument to tbnpb_model_forward");
  return guarded([&] {
    const Eigen::Vector3d tip =
        tbnpb::forward(model->file.model, as_vec(u_deg, u_len), as_vec(p, p_len));
    std::memcpy(tip_mm, tip.data(), 3 * sizeof(double));
  });
}

void tbnpb_adapt_params_init(tbnpb_adapt_params* params) {
  if (!params) return;
  const tbnpb::AdaptParams d;
  params->c_collect_deg = d.c_collect_deg;
  params->n_thre = d.n_thre;
  params->n_epoch = d.n_epoch;
  params->n_max = d.n_max;
  params->learning_rate = d.latent_lr;
  params->momentum = d.momentum;
}

tbnpb_status tbnpb_adapter_new(const tbnpb_model* model,
                               const tbnpb_adapt_params* params,
                               const double* p0, size_t p0_len,
                               tbnpb_adapter** out) {
  if (!model || !out) return arg_error("null argument to tbnpb_adapter_new");
  return guarded([&] {
    tbnpb::AdaptParams ap;
    if (params) {
      ap.c_collect_deg = params->c_collect_deg;
      ap.n_thre = params->n_thre;
      ap.n_epoch = params->n_epoch;
      ap.n_max = params->n_max;
      ap.latent_lr = params->learning_rate;
      ap.momentum = params->momentum;
    }
    const int latent_dim = model->file.model.latent_dim;
    Eigen::VectorXd latent = Eigen::VectorXd::Zero(latent_dim);
    if (p0) {
      tbnpb::require(static_cast<Eigen::Index>(p0_len) == latent_dim,
                     tbnpb::ErrorCode::dimension_mismatch,
                     "initial latent length mismatch");
      latent = as_vec(p0, p0_len);
    }
    *out = new tbnpb_adapter{
        tbnpb::OnlineBuffer(ap.n_max, ap.c_collect_deg),
        tbnpb::LatentUpdater(ap, latent_dim), std::move(latent)};
  });
}

void tbnpb_adapter_free(tbnpb_adapter* adapter) { delete adapter; }

tbnpb_status tbnpb_adapter_observe(tbnpb_adapter* adapter,
                                   const tbnpb_model* model,
                                   const double* u_deg, size_t u_len,
                                   const double tip_mm[3], int* stored) {
  if (!adapter || !model || !u_deg || !tip_mm)
    return arg_error("null argument to tbnpb_adapter_observe");
  return guarded([&] {
    tbnpb::require(static_cast<Eigen::Index>(u_len) ==
                       model->file.model.command_dim,
                   tbnpb::ErrorCode::dimension_mismatch,
                   "command length mismatch");
    const bool did_store = adapter->buffer.observe(
        as_vec(u_deg, u_len), Eigen::Vector3d(tip_mm[0], tip_mm[1], tip_mm[2]));
    if (did_store)
      adapter->latent = adapter->updater.update(model->file.model,
                                                adapter->buffer, adapter->latent);
    if (stored) *stored = did_store ? 1 : 0;
  });
}

int tbnpb_adapter_buffer_size(const tbnpb_adapter* adapter) {
  return adapter ? static_cast<int>(adapter->buffer.size()) : 0;
}

tbnpb_status tbnpb_adapter_latent(const tbnpb_adapter* adapter, double* p,
                                  size_t p_len) {
  if (!adapter || !p) return arg_error("null argument to tbnpb_adapter_latent");
  if (static_cast<Eigen::Index>(p_len) != adapter->latent.size()) {
    g_last_error = "latent buffer length mismatch";
    return TBNPB_E_DIMENSION;
  }
  std::memcpy(p, adapter->latent.data(), p_len * sizeof(double));
  return TBNPB_OK;
}

void tbnpb_adapter_reset(tbnpb_adapter* adapter) {
  if (!adapter) return;
  adapter->buffer.clear();
  adapter->updater.reset();
}

void tbnpb_solve_params_init(tbnpb_solve_params* params) {
  if (!params) return;
  const tbnpb::ControllerConfig d;
  params->gamma_max = d.gamma_max;
  params->n_line = d.n_line;
  params->n_epochs = d.n_epochs;
  params->alpha = d.alpha;
}

tbnpb_status tbnpb_optimize_command(const tbnpb_model* model, const double* p,
                                    size_t p_len, const double* u_cur,
                                    size_t u_len, const double x_ref_mm[3],
                                    const tbnpb_solve_params* params,
                                    const double* u_anchor, double* u_opt,
                                    double* final_loss) {
  if (!model || !p || !u_cur || !x_ref_mm || !u_opt)
    return arg_error("null argument to tbnpb_optimize_command");
  return guarded([&] {
    tbnpb::ControllerConfig cfg;
    if (params) {
      cfg.gamma_max = params->gamma_max;
      cfg.n_line = params->n_line;
      cfg.n_epochs = params->n_epochs;
      cfg.alpha = params->alpha;
    }
    if (u_anchor)
      cfg.constraint =
          tbnpb::AnchorConstraint{Eigen::VectorXd(as_vec(u_anchor, u_len))};
    const tbnpb::SolveResult res = tbnpb::optimize_command(
        model->file.model, as_vec(p, p_len), as_vec(u_cur, u_len),
        Eigen::Vector3d(x_ref_mm[0], x_ref_mm[1], x_ref_mm[2]), cfg);
    std::memcpy(u_opt, res.command_deg.data(), u_len * sizeof(double));
    if (final_loss) *final_loss = res.loss;
  });
}

tbnpb_status tbnpb_run_gen_data(const char* config_path, uint64_t seed,
                                const char* out_dir) {
  if (!out_dir) return arg_error("null out_dir");
  return guarded(
      [&] { tbnpb::run_gen_data(load_config(config_path), seed, out_dir); });
}

tbnpb_status tbnpb_run_train(const char* config_path, uint64_t seed,
                             const char* data_csv, const char* out_dir) {
  if (!data_csv || !out_dir) return arg_error("null argument to tbnpb_run_train");
  return guarded([&] {
    tbnpb::run_train(load_config(config_path), seed, data_csv, out_dir);
  });
}

tbnpb_status tbnpb_run_finetune(const char* config_path, uint64_t seed,
                                const char* model_in, const char* data_csv,
                                const char* out_dir) {
  if (!model_in || !data_csv || !out_dir)
    return arg_error("null argument to tbnpb_run_finetune");
  return guarded([&] {
    tbnpb::run_finetune(load_config(config_path), seed, model_in, data_csv,
                        out_dir);
  });
}

tbnpb_status tbnpb_run_adapt(const char* config_path, uint64_t seed,
                             const char* model_path, const char* scenario,
                             const char* out_dir) {
  if (!model_path || !scenario || !out_dir)
    return arg_error("null argument to tbnpb_run_adapt");
  return guarded([&] {
    tbnpb::run_adapt(load_config(config_path), seed, model_path, scenario,
                     out_dir);
  });
}

tbnpb_status tbnpb_run_control(const char* config_path, uint64_t seed,
                               const char* model_path, const char* mode,
                               const char* out_dir) {
  if (!model_path || !mode || !out_dir)
    return arg_error("null argument to tbnpb_run_control");
  return guarded([&] {
    tbnpb::run_control(load_config(config_path), seed, model_path, mode,
                       out_dir);
  });
}

tbnpb_status tbnpb_run_pb_map(const char* config_path, const char* model_path,
                              const char* out_dir) {
  if (!model_path || !out_dir)
    return arg_error("null argument to tbnpb_run_pb_map");
  return guarded([&] {
    tbnpb::run_pb_map(load_config(config_path), model_path, out_dir);
  });
}

}  // extern "C"
