#ifndef DWAVE_DWAVE_H
#define DWAVE_DWAVE_H

/* C interface to the dwave library. Every call returns a status code; on
 * failure dwave_last_error() holds a message for the calling thread.
 * Vectors are plain double arrays of length dwave_fem_dof_count(). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DWAVE_API __declspec(dllexport)
#else
#define DWAVE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  DWAVE_OK = 0,
  DWAVE_ERR_INVALID_ARGUMENT = 1,
  DWAVE_ERR_DOMAIN = 2,
  DWAVE_ERR_NOT_CONVERGED = 3,
  DWAVE_ERR_BREAKDOWN = 4,
  DWAVE_ERR_SINGULAR = 5,
  DWAVE_ERR_IO = 6,
  DWAVE_ERR_INTERNAL = 99
} dwave_status;

DWAVE_API const char* dwave_last_error(void);
DWAVE_API const char* dwave_status_name(dwave_status s);

/* ---- Mittag-Leffler E_{alpha,beta}(z), z <= 0 ---- */

typedef enum {
  DWAVE_BRANCH_AUTO = -1,
  DWAVE_BRANCH_SERIES = 0,
  DWAVE_BRANCH_ASYMPTOTIC = 1,
  DWAVE_BRANCH_INTEGRAL = 2,
  DWAVE_BRANCH_CLOSED = 3
} dwave_branch;

DWAVE_API const char* dwave_branch_name(int branch);
/* est_abs_error and used_branch may be NULL. */
DWAVE_API dwave_status dwave_ml(double alpha, double beta, double z, int branch, double* value, double* est_abs_error,
                                int* used_branch);

/* psi_tilde(lambda) = det(gamma I + G) for the exact operators; gamma = 0 gives psi. */
DWAVE_API dwave_status dwave_psi_tilde(double T1, double T2, double lambda, double alpha, double gamma, double* out);

/* ---- finite element mesh on (0,1) or (0,1)^2, 1/h an integer ---- */

typedef struct dwave_fem dwave_fem;

DWAVE_API dwave_status dwave_fem_create(int dim, double h, dwave_fem** out);
DWAVE_API void dwave_fem_destroy(dwave_fem* fem);
DWAVE_API int dwave_fem_dim(const dwave_fem* fem);
DWAVE_API double dwave_fem_h(const dwave_fem* fem);
DWAVE_API size_t dwave_fem_dof_count(const dwave_fem* fem);
DWAVE_API dwave_status dwave_fem_node(const dwave_fem* fem, size_t i, double* x, double* y);
/* which: "mass" or "stiffness"; writes "i j value" lines, 0-based */
DWAVE_API dwave_status dwave_fem_export_matrix(const dwave_fem* fem, const char* which, const char* path);
/* L2 projection of a built-in example's data. preset: smooth1d, nonsmooth1d,
 * smooth2d; field: "a" or "b". */
DWAVE_API dwave_status dwave_fem_project_preset(const dwave_fem* fem, const char* preset, const char* field,
                                                double* out);

/* 1D only: nodal values <-> coefficients on the discrete eigenbasis. */
DWAVE_API dwave_status dwave_fem_to_modal(const dwave_fem* fem, const double* nodal, double* modal);
DWAVE_API dwave_status dwave_fem_from_modal(const dwave_fem* fem, const double* modal, double* nodal);
DWAVE_API dwave_status dwave_fem_eigenvalue(const dwave_fem* fem, size_t j, double* lambda);
/* Writes "j,lambda,coeff" for the modal coefficients of a nodal field. */
DWAVE_API dwave_status dwave_fem_write_modal_csv(const dwave_fem* fem, const double* nodal, const char* path);

/* ---- forward problem ---- */

typedef struct dwave_trajectory dwave_trajectory;

typedef enum {
  DWAVE_SCHEME_CQ = 0,           /* backward Euler convolution quadrature in time */
  DWAVE_SCHEME_SEMIDISCRETE = 1  /* exact in time on the discrete modes (1D) */
} dwave_scheme;

/* States at t_n = n tau, n = 0..N. */
DWAVE_API dwave_status dwave_forward(const dwave_fem* fem, const double* a, const double* b, double alpha, double tau,
                                     int N, int scheme, dwave_trajectory** out);
DWAVE_API void dwave_trajectory_destroy(dwave_trajectory* tr);
DWAVE_API size_t dwave_trajectory_count(const dwave_trajectory* tr);
DWAVE_API size_t dwave_trajectory_size(const dwave_trajectory* tr);
DWAVE_API double dwave_trajectory_time(const dwave_trajectory* tr, size_t k);
DWAVE_API const double* dwave_trajectory_state(const dwave_trajectory* tr, size_t k);
/* CSV "n,t,dof_or_mode,value" for every stride-th step plus the last one;
 * modal != 0 writes discrete modal coefficients instead (1D). */
DWAVE_API dwave_status dwave_trajectory_write_csv(const dwave_trajectory* tr, const dwave_fem* fem, const char* path,
                                                  int stride, int modal);

/* Noisy observations g_i = u(T_i) + eps delta sup|u(T_i)|, eps standard
 * normal drawn from (seed, stream i). tau = 0 uses the semidiscrete scheme
 * (1D), otherwise CQ with that step. */
DWAVE_API dwave_status dwave_observe(const dwave_fem* fem, const double* a, const double* b, double alpha, double T1,
                                     double T2, double tau, double delta, uint64_t seed, double* g1, double* g2);

/* ---- backward problem ---- */

typedef struct {
  double gamma;
  double T1;
  double T2;
  double tau;            /* 0: semidiscrete (1D only); > 0: fully discrete */
  int method;            /* 0 auto, 1 modal (1D), 2 Krylov */
  double krylov_tol;
  int krylov_max_iter;
  int require_negative_psi_tilde;
} dwave_backward_options;

DWAVE_API void dwave_backward_options_init(dwave_backward_options* opt);

typedef struct dwave_reconstruction dwave_reconstruction;

DWAVE_API dwave_status dwave_backward(const dwave_fem* fem, const double* g1, const double* g2, double alpha,
                                      const dwave_backward_options* opt, dwave_reconstruction** out);
DWAVE_API void dwave_reconstruction_destroy(dwave_reconstruction* rec);
DWAVE_API size_t dwave_reconstruction_size(const dwave_reconstruction* rec);
DWAVE_API const double* dwave_reconstruction_a(const dwave_reconstruction* rec);
DWAVE_API const double* dwave_reconstruction_b(const dwave_reconstruction* rec);
/* One-line JSON object; owned by the handle. */
DWAVE_API const char* dwave_reconstruction_diagnostics(const dwave_reconstruction* rec);

/* ---- convergence studies ---- */

typedef struct dwave_study dwave_study;

/* workers <= 0 reads DWAVE_WORKERS (default: hardware threads). */
DWAVE_API dwave_status dwave_study_run(const char* config_path, int workers, dwave_study** out);
DWAVE_API void dwave_study_destroy(dwave_study* st);
/* results.csv, report.csv, report.plt */
DWAVE_API dwave_status dwave_study_write(const dwave_study* st, const char* out_dir);
DWAVE_API size_t dwave_study_order_count(const dwave_study* st);
/* metric points to a static string ("e_ini" or "e_t"); order is NaN if the fit was impossible. */
DWAVE_API dwave_status dwave_study_order(const dwave_study* st, size_t k, double* alpha, const char** metric,
                                         double* order);
DWAVE_API size_t dwave_study_failed_cells(const dwave_study* st);

#ifdef __cplusplus
}
#endif

#endif
