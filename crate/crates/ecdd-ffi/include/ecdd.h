/* C ABI for the ecdd concept drift detector.
 *
 * Tables and detectors are opaque handles; fallible calls return an ECDD_*
 * status code (negative on failure) and write results through out-pointers.
 * Link against the ecdd_ffi static or shared library.
 */

#ifndef ECDD_H
#define ECDD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Error codes. */
#define ECDD_OK 0
#define ECDD_ERR_CONFIG (-1)
#define ECDD_ERR_MISSING_ENTRY (-2)
#define ECDD_ERR_INPUT (-3)
#define ECDD_ERR_USAGE (-4)
#define ECDD_ERR_IO (-5)
#define ECDD_ERR_PARSE (-6)
#define ECDD_ERR_SEARCH (-7)
#define ECDD_ERR_NULL (-8)

/* Status codes returned by ecdd_detector_step. */
#define ECDD_IN_CONTROL 0
#define ECDD_WARNING 1
#define ECDD_DRIFT 2

/* Opaque handles. */
typedef struct EcddTable EcddTable;
typedef struct EcddDetector EcddDetector;

/* Library version as a static string; do not free. */
const char *ecdd_version(void);

/* Calibration tables. */
EcddTable *ecdd_table_builtin(void);
EcddTable *ecdd_table_paper_lambda02(void);
int ecdd_table_load(const char *path, EcddTable **out);
void ecdd_table_free(EcddTable *table);

/* Detector lifecycle. The calibration entry is copied out of the table at
 * construction, so the table may be freed afterwards. */
int ecdd_detector_new(const EcddTable *table, double lambda, double arl0,
                      double warning_fraction, uint64_t min_observations,
                      EcddDetector **out);
void ecdd_detector_free(EcddDetector *detector);

/* Advance the chart by one error bit (0 or 1). Returns ECDD_IN_CONTROL,
 * ECDD_WARNING or ECDD_DRIFT, or a negative error code. After ECDD_DRIFT the
 * detector must be reset before stepping again. */
int ecdd_detector_step(EcddDetector *detector, int error_bit);

/* As ecdd_detector_step, with a caller tag buffered while the warning
 * condition holds; drained tags identify the observations to retrain on. */
int ecdd_detector_step_tagged(EcddDetector *detector, int error_bit,
                              uint64_t tag);

/* Reset to the initial state, draining buffered tags (oldest first) into
 * tags_out (up to tags_cap); out_count receives the drained total. Either
 * pointer may be NULL. */
int ecdd_detector_reset(EcddDetector *detector, uint64_t *tags_out,
                        size_t tags_cap, size_t *out_count);

/* State accessors. */
uint64_t ecdd_detector_t(const EcddDetector *detector);
double ecdd_detector_z(const EcddDetector *detector);
double ecdd_detector_p_hat(const EcddDetector *detector);
double ecdd_detector_sigma_z(const EcddDetector *detector);
double ecdd_detector_limit(const EcddDetector *detector);
int ecdd_detector_status(const EcddDetector *detector);

/* Checkpointing: JSON snapshots of configuration plus state. The snapshot
 * string must be freed with ecdd_string_free. */
char *ecdd_detector_snapshot_json(const EcddDetector *detector);
int ecdd_detector_restore_json(const EcddTable *table, const char *json,
                               EcddDetector **out);

/* EWMA standard deviation after t observations of a Bernoulli(p) stream;
 * NaN on domain violations. */
double ecdd_ewma_sigma(double p, double lambda, uint64_t t);

/* Free a string allocated by this library. */
void ecdd_string_free(char *s);

#ifdef __cplusplus
}
#endif

#endif /* ECDD_H */
