/* C interface of the tdpod library. All functions return a tdpod_status;
 * on failure tdpod_last_error() describes the problem (thread-local). */
#ifndef TDPOD_TDPOD_H
#define TDPOD_TDPOD_H

#include <stddef.h>

#if defined(TDPOD_BUILDING_LIBRARY)
#define TDPOD_API __attribute__((visibility("default")))
#else
#define TDPOD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tdpod_status {
  TDPOD_OK = 0,
  TDPOD_ERR_INVALID_ARGUMENT = 1,
  TDPOD_ERR_NUMERICAL = 2,
  TDPOD_ERR_IO = 3,
  TDPOD_ERR_INTERNAL = 4
} tdpod_status;

typedef struct tdpod_trajectory tdpod_trajectory;
typedef struct tdpod_basis tdpod_basis;

TDPOD_API const char* tdpod_version(void);
TDPOD_API const char* tdpod_last_error(void);

/* Parses and validates a JSON config; on success *normalized receives the
 * fully expanded config (free with tdpod_string_free). */
TDPOD_API tdpod_status tdpod_config_normalize(const char* config_json, char** normalized);
TDPOD_API void tdpod_string_free(char* s);

/* Pipeline commands. config_json may be NULL or "{}" for defaults. */
TDPOD_API tdpod_status tdpod_fom_run(const char* config_json, const char* outdir);
TDPOD_API tdpod_status tdpod_pod_build(const char* config_json, const char* traj_dir, const char* outdir);
TDPOD_API tdpod_status tdpod_rom_run(const char* config_json, const char* traj_dir, const char* basis_dir,
                                     const char* outdir);
TDPOD_API tdpod_status tdpod_study_convergence(const char* config_json, const char* outdir);
TDPOD_API tdpod_status tdpod_study_compare_sets(const char* config_json, const char* outdir);
/* *failed receives the number of failed checks written to report.csv. */
TDPOD_API tdpod_status tdpod_check_invariants(const char* config_json, const char* outdir, int* failed);
TDPOD_API tdpod_status tdpod_report(const char* config_json, const char* traj_dir, const char* basis_dir,
                                    const char* outdir);

/* Stored trajectories. */
TDPOD_API tdpod_status tdpod_trajectory_load(const char* dir, tdpod_trajectory** out);
TDPOD_API void tdpod_trajectory_free(tdpod_trajectory* t);
TDPOD_API size_t tdpod_trajectory_levels(const tdpod_trajectory* t);
TDPOD_API size_t tdpod_trajectory_dofs(const tdpod_trajectory* t);
TDPOD_API double tdpod_trajectory_time(const tdpod_trajectory* t, size_t j);
/* Copies velocity j into buf (len must equal the DOF count). */
TDPOD_API tdpod_status tdpod_trajectory_velocity(const tdpod_trajectory* t, size_t j, double* buf, size_t len);

/* Stored POD bases. Gram matrices are not needed, so no discretization is built. */
TDPOD_API tdpod_status tdpod_basis_load(const char* dir, tdpod_basis** out);
TDPOD_API void tdpod_basis_free(tdpod_basis* b);
TDPOD_API int tdpod_basis_rank(const tdpod_basis* b);
TDPOD_API int tdpod_basis_numerical_rank(const tdpod_basis* b);
/* Copies min(len, N) eigenvalues; returns how many were copied. */
TDPOD_API size_t tdpod_basis_eigenvalues(const tdpod_basis* b, double* buf, size_t len);

#ifdef __cplusplus
}
#endif

#endif
