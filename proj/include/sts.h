#ifndef STS_H
#define STS_H

/* C API for the sparse-token-selection lab. All functions are
 * thread-compatible; the last-error string is thread-local.
 *
 * Command entry points return process-style codes:
 *   0 success, 1 config error, 2 PE sampling failure,
 *   3 numerical divergence, 4 verification failure.
 * Handle constructors return NULL on failure; query functions return
 * nonzero / NaN on failure. Consult sts_last_error() for the diagnostic. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Message from the most recent failed call on this thread ("" if none). */
const char* sts_last_error(void);

/* ---- commands ---------------------------------------------------------- */

int sts_cmd_train(const char* config_json, const char* out_dir);
int sts_cmd_ode(int T, int q, int d, double eta, long steps, const char* out_dir);
int sts_cmd_lengthgen(const char* config_json, const char* out_dir);
int sts_cmd_fcn(const char* config_json, const char* out_dir);
int sts_cmd_verify(const char* suite, uint64_t seed);
int sts_cmd_heatmap(const char* config_json, const char* out_dir);

/* Apply "dotted.key=value" overrides to a JSON config. Returns a malloc'd
 * string the caller releases with sts_string_free, or NULL on error. */
char* sts_config_apply_overrides(const char* config_json,
                                 const char* const* overrides, size_t n);
void sts_string_free(char* s);

/* ---- reduced dynamics --------------------------------------------------- */

typedef struct sts_trajectory sts_trajectory;

/* Simulate the reduced (C, alpha) recursion from zero init. */
sts_trajectory* sts_reduced_simulate(int T, int q, int d, double eta, long steps);
long sts_trajectory_rows(const sts_trajectory* tr);
/* out = {t, C, alpha, s_plus, loss_closed_form}; 0 on success. */
int sts_trajectory_row(const sts_trajectory* tr, long i, double out[5]);
/* CSV with header t,C,alpha,s_plus,loss_closed_form; 0 on success. */
int sts_trajectory_write_csv(const sts_trajectory* tr, const char* path);
void sts_trajectory_free(sts_trajectory* tr);

/* ---- positional encodings ----------------------------------------------- */

typedef struct sts_encoding sts_encoding;

sts_encoding* sts_encoding_one_hot(int T);
/* Rejection-sample a near-orthogonal sign encoding. exact_mode != 0 switches
 * the acceptance test from pairwise coherence to the exact RIP check. */
sts_encoding* sts_encoding_sample(uint64_t seed, int d_e, int T, int q,
                                  double delta, int exact_mode, int max_attempts);
int sts_encoding_dims(const sts_encoding* e, int* d_e, int* T);
/* max_{i != j} |<e_i, e_j>| / d_e-normalized inner product. */
double sts_encoding_coherence(const sts_encoding* e);
double sts_encoding_entry(const sts_encoding* e, int i, int j);
/* CSV with header d_e,T,kind,delta; 0 on success. */
int sts_encoding_export_csv(const sts_encoding* e, const char* path);
void sts_encoding_free(sts_encoding* e);

#ifdef __cplusplus
}
#endif

#endif /* STS_H */
