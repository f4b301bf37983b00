/*
 * clrlab C API.
 *
 * Every handle is opaque and owned by the caller once returned; release it
 * with the matching *_free function (NULL is accepted). Functions returning
 * clr_status report failures through the status code, and the message for
 * the most recent failure on the calling thread is available from
 * clr_last_error(). Status codes equal the CLI exit codes.
 */
#ifndef CLRLAB_H
#define CLRLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CLRLAB_BUILDING)
#    define CLR_API __declspec(dllexport)
#  else
#    define CLR_API __declspec(dllimport)
#  endif
#else
#  define CLR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum clr_status {
    CLR_OK = 0,
    CLR_ERR_INTERNAL = 1,
    CLR_ERR_CONFIG = 2,
    CLR_ERR_DATA = 3,
    CLR_ERR_NUMERIC = 4,
    CLR_ERR_IO = 5
} clr_status;

typedef enum clr_activation { CLR_RELU = 0, CLR_TANH = 1 } clr_activation;

typedef enum clr_split { CLR_SPLIT_TRAIN = 0, CLR_SPLIT_TEST = 1 } clr_split;

typedef struct clr_config clr_config;
typedef struct clr_weights clr_weights;
typedef struct clr_dataset clr_dataset;

CLR_API const char* clr_version(void);
CLR_API const char* clr_status_name(clr_status status);
/* Message of the last failed call on this thread; "" if none. */
CLR_API const char* clr_last_error(void);

/* ---- experiment configs ------------------------------------------------ */

/* Empty document; keys are added with clr_config_set. */
CLR_API clr_status clr_config_new(clr_config** out);
CLR_API clr_status clr_config_load(const char* path, clr_config** out);
CLR_API clr_status clr_config_clone(const clr_config* config, clr_config** out);
/* key is "section.key"; unknown keys fail with CLR_ERR_CONFIG. */
CLR_API clr_status clr_config_set(clr_config* config, const char* key, const char* value);
/* Resolves the config and writes the full INI echo into buf. *needed gets
 * the required size including the terminator; buf may be NULL to query. */
CLR_API clr_status clr_config_resolved(const clr_config* config, char* buf, size_t cap,
                                       size_t* needed);
/* Learning rate of the config's [schedule] at the given iteration. */
CLR_API clr_status clr_config_lr_at(const clr_config* config, uint64_t iter, double* out);
CLR_API void clr_config_free(clr_config* config);

/* Runs the experiment described by the config and writes its outputs.
 * A human-readable summary is copied into summary (same sizing rules as
 * clr_config_resolved; summary may be NULL). */
CLR_API clr_status clr_experiment_run(const clr_config* config, char* summary, size_t cap,
                                      size_t* needed);

/* ---- network weights ---------------------------------------------------- */

CLR_API clr_status clr_weights_init(const size_t* layer_sizes, size_t layer_count,
                                    clr_activation activation, uint64_t seed, clr_weights** out);
CLR_API clr_status clr_weights_load(const char* path, clr_weights** out);
CLR_API clr_status clr_weights_save(const clr_weights* weights, const char* path);
CLR_API size_t clr_weights_param_count(const clr_weights* weights);
/* Copies min(cap, param_count) parameters in canonical order. */
CLR_API clr_status clr_weights_copy_params(const clr_weights* weights, double* out, size_t cap);
/* alpha * net1 + (1 - alpha) * net2 */
CLR_API clr_status clr_weights_interpolate(const clr_weights* net1, const clr_weights* net2,
                                           double alpha, clr_weights** out);
CLR_API void clr_weights_free(clr_weights* weights);

/* ---- datasets ----------------------------------------------------------- */

CLR_API clr_status clr_dataset_moons(size_t n, double noise, uint64_t seed, double test_fraction,
                                     clr_dataset** out);
/* Builds the dataset described by the config's [dataset] section. */
CLR_API clr_status clr_dataset_from_config(const clr_config* config, clr_dataset** out);
CLR_API size_t clr_dataset_size(const clr_dataset* data, clr_split split);
CLR_API clr_status clr_dataset_write_csv(const clr_dataset* data, clr_split split,
                                         const char* path);
CLR_API clr_status clr_evaluate(const clr_weights* weights, const clr_dataset* data,
                                clr_split split, double* loss, double* accuracy);
CLR_API void clr_dataset_free(clr_dataset* data);

#ifdef __cplusplus
}
#endif

#endif /* CLRLAB_H */
