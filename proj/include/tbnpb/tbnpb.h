/* Public C interface of the tbnpb shared library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return TBNPB_OK on success; on failure they return an error
 * code and tbnpb_last_error() carries a message for the calling thread.
 * Arrays are plain double buffers with explicit lengths; commands are in
 * degrees, positions in millimetres.
 */
#ifndef TBNPB_H
#define TBNPB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#ifdef TBNPB_BUILD
#define TBNPB_API __declspec(dllexport)
#else
#define TBNPB_API __declspec(dllimport)
#endif
#else
#define TBNPB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tbnpb_status {
  TBNPB_OK = 0,
  TBNPB_E_INVALID_ARGUMENT = 1,
  TBNPB_E_DIMENSION = 2,
  TBNPB_E_IO = 3,
  TBNPB_E_PARSE = 4,
  TBNPB_E_NUMERIC = 5,
  TBNPB_E_NO_CONVERGENCE = 6,
  TBNPB_E_INTERNAL = 7
} tbnpb_status;

TBNPB_API const char* tbnpb_last_error(void);
TBNPB_API const char* tbnpb_version(void);

/* ---------------------------------------------------------------- model */

typedef struct tbnpb_model tbnpb_model;

TBNPB_API tbnpb_status tbnpb_model_load(const char* path, tbnpb_model** out);
TBNPB_API tbnpb_status tbnpb_model_save(const tbnpb_model* model,
                                        const char* path);
TBNPB_API void tbnpb_model_free(tbnpb_model* model);

TBNPB_API int tbnpb_model_command_dim(const tbnpb_model* model);
TBNPB_API int tbnpb_model_latent_dim(const tbnpb_model* model);
TBNPB_API int tbnpb_model_latent_count(const tbnpb_model* model);

/* Trained latent code by position; grasp_id and code may be NULL when not
 * wanted. code must hold latent_dim values. */
TBNPB_API tbnpb_status tbnpb_model_latent(const tbnpb_model* model, int index,
                                          uint32_t* grasp_id, double* code,
                                          size_t code_len);

/* Estimated tool-tip position for a command and latent code. */
TBNPB_API tbnpb_status tbnpb_model_forward(const tbnpb_model* model,
                                           const double* u_deg, size_t u_len,
                                           const double* p, size_t p_len,
                                           double tip_mm[3]);

/* ------------------------------------------- online grasping-state update */

typedef struct tbnpb_adapter tbnpb_adapter;

typedef struct tbnpb_adapt_params {
  double c_collect_deg; /* gate on command distance, L2 degrees */
  int n_thre;           /* buffer size at which updates start */
  int n_epoch;          /* gradient steps per stored sample */
  int n_max;            /* buffer capacity, oldest evicted first */
  double learning_rate; /* momentum SGD on the latent */
  double momentum;
} tbnpb_adapt_params;

TBNPB_API void tbnpb_adapt_params_init(tbnpb_adapt_params* params);

/* The adapter owns a gated observation buffer and the current latent code,
 * initialized from p0 (NULL starts at zero). */
TBNPB_API tbnpb_status tbnpb_adapter_new(const tbnpb_model* model,
                                         const tbnpb_adapt_params* params,
                                         const double* p0, size_t p0_len,
                                         tbnpb_adapter** out);
TBNPB_API void tbnpb_adapter_free(tbnpb_adapter* adapter);

/* Feeds one (command, observed tip) pair; stores it if the command moved far
 * enough, then updates the latent once enough data is buffered. stored may
 * be NULL. */
TBNPB_API tbnpb_status tbnpb_adapter_observe(tbnpb_adapter* adapter,
                                             const tbnpb_model* model,
                                             const double* u_deg, size_t u_len,
                                             const double tip_mm[3],
                                             int* stored);

TBNPB_API int tbnpb_adapter_buffer_size(const tbnpb_adapter* adapter);
TBNPB_API tbnpb_status tbnpb_adapter_latent(const tbnpb_adapter* adapter,
                                            double* p, size_t p_len);
TBNPB_API void tbnpb_adapter_reset(tbnpb_adapter* adapter);

/* ----------------------------------------------------- command optimizer */

typedef struct tbnpb_solve_params {
  double gamma_max; /* line-search range [0, gamma_max] */
  int n_line;       /* candidate step sizes */
  int n_epochs;
  double alpha;     /* weight of the anchor constraint */
} tbnpb_solve_params;

TBNPB_API void tbnpb_solve_params_init(tbnpb_solve_params* params);

/* Gradient-based command optimization toward a target tip position.
 * u_anchor (NULL to disable) adds alpha * |u - u_anchor| to the loss.
 * u_opt must hold u_len values; final_loss may be NULL. */
TBNPB_API tbnpb_status tbnpb_optimize_command(
    const tbnpb_model* model, const double* p, size_t p_len,
    const double* u_cur, size_t u_len, const double x_ref_mm[3],
    const tbnpb_solve_params* params, const double* u_anchor, double* u_opt,
    double* final_loss);

/* ------------------------------------------------- experiment pipelines */

/* Full experiment drivers matching the CLI subcommands. config_path may be
 * NULL to run with built-in defaults (the PR2-style simulation study). All
 * artifacts are written as CSV/model files under out_dir. */
TBNPB_API tbnpb_status tbnpb_run_gen_data(const char* config_path,
                                          uint64_t seed, const char* out_dir);
TBNPB_API tbnpb_status tbnpb_run_train(const char* config_path, uint64_t seed,
                                       const char* data_csv,
                                       const char* out_dir);
TBNPB_API tbnpb_status tbnpb_run_finetune(const char* config_path,
                                          uint64_t seed, const char* model_in,
                                          const char* data_csv,
                                          const char* out_dir);
TBNPB_API tbnpb_status tbnpb_run_adapt(const char* config_path, uint64_t seed,
                                       const char* model_path,
                                       const char* scenario,
                                       const char* out_dir);
TBNPB_API tbnpb_status tbnpb_run_control(const char* config_path,
                                         uint64_t seed,
                                         const char* model_path,
                                         const char* mode,
                                         const char* out_dir);
TBNPB_API tbnpb_status tbnpb_run_pb_map(const char* config_path,
                                        const char* model_path,
                                        const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* TBNPB_H */
