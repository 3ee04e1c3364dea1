/* Copyright 2026 The ftprep Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#ifndef FTPREP_H
#define FTPREP_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome table length: `P(c_s, c1..c4)`, index `c_s<<4 | c1<<3 | c2<<2 | c3<<1 | c4`.
#define FTP_NUM_OUTCOMES 32

typedef enum FtpStatus {
  FTP_STATUS_OK = 0,
  FTP_STATUS_NULL_POINTER = 1,
  FTP_STATUS_INVALID_ARGUMENT = 2,
  // Quantity is undefined, e.g. nothing was accepted.
  FTP_STATUS_UNDEFINED = 3,
  FTP_STATUS_NUMERICAL = 4,
  FTP_STATUS_IO = 5,
  FTP_STATUS_INTERNAL = 6,
} FtpStatus;

typedef enum FtpBasis {
  FTP_BASIS_Z = 0,
  FTP_BASIS_X = 1,
} FtpBasis;

typedef enum FtpSite {
  FTP_SITE_A = 0,
  FTP_SITE_B = 1,
  FTP_SITE_C = 2,
} FtpSite;

typedef enum FtpPostRotation {
  FTP_POST_ROTATION_PHYSICAL = 0,
  FTP_POST_ROTATION_FRAME = 1,
} FtpPostRotation;

typedef enum FtpLogical {
  FTP_LOGICAL_PROTECTED = 0,
  FTP_LOGICAL_GAUGE = 1,
} FtpLogical;

// Opaque preparation circuit.
typedef struct FtpCircuit FtpCircuit;

// Opaque noise configuration.
typedef struct FtpNoise FtpNoise;

// A logical product state. Bits are 0 or 1; in the X basis 1 means minus.
typedef struct FtpTarget {
  enum FtpBasis basis;
  uint8_t first;
  uint8_t second;
} FtpTarget;

typedef struct FtpEstimate {
  double value;
  double std_error;
} FtpEstimate;

// Post-selection summary. Conditional errors are valid only when
// `has_errors` is nonzero.
typedef struct FtpSummary {
  struct FtpEstimate syndrome_ok;
  struct FtpEstimate acceptance;
  uint8_t has_errors;
  struct FtpEstimate p_err_protected;
  struct FtpEstimate p_err_gauge;
  struct FtpEstimate p_err_joint;
} FtpSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next failing call on the same thread.
const char *ftp_last_error_message(void);

// Noise-free configuration.
struct FtpNoise *ftp_noise_ideal(void);

// Reference device configuration.
struct FtpNoise *ftp_noise_device(void);

// Sets the same `P(0|1) = p0`, `P(1|0) = p1` on every qubit.
enum FtpStatus ftp_noise_set_uniform_readout(struct FtpNoise *noise, double p0, double p1);

// Sets the relaxation time of `qubit` (0..4 = D1..D4, S1) in µs.
enum FtpStatus ftp_noise_set_t1(struct FtpNoise *noise, uintptr_t qubit, double t1_us);

void ftp_noise_free(struct FtpNoise *noise);

// Builds the preparation circuit for `target` with ideal CNOTs. The data
// are read out in the target's basis.
enum FtpStatus ftp_circuit_prep(struct FtpTarget target, struct FtpCircuit **circuit);

// New circuit with `Z(θ)` inserted at `site`.
enum FtpStatus ftp_circuit_insert_error(const struct FtpCircuit *base,
                                        enum FtpSite site,
                                        double theta,
                                        struct FtpCircuit **circuit);

// New circuit with the correlated `Y(θ)⊗Y(θ)` error inserted.
enum FtpStatus ftp_circuit_insert_correlated_error(const struct FtpCircuit *base,
                                                   double theta,
                                                   struct FtpCircuit **circuit);

void ftp_circuit_free(struct FtpCircuit *circuit);

// Fills `probs[0..FTP_NUM_OUTCOMES]` with the outcome distribution,
// readout errors included.
enum FtpStatus ftp_outcome_probabilities(const struct FtpCircuit *circuit,
                                         const struct FtpNoise *noise,
                                         enum FtpPostRotation post_rotation,
                                         double *probs,
                                         uintptr_t len);

// Exact post-selection statistics of an outcome table.
enum FtpStatus ftp_exact_statistics(const double *probs,
                                    uintptr_t len,
                                    struct FtpTarget target,
                                    struct FtpSummary *result);

// Post-processes `num_shots` records. `syndrome[k]` is `c_s` and
// `data[4k..4k+4]` are `c1..c4` of shot `k`.
enum FtpStatus ftp_postprocess(const uint8_t *syndrome,
                               const uint8_t *data,
                               uintptr_t num_shots,
                               struct FtpTarget target,
                               struct FtpSummary *result);

// Closed-form acceptance `P(parity even | c_s = 1)` at `θ + δ`.
enum FtpStatus ftp_acceptance_model(enum FtpSite site,
                                    double p0,
                                    double p1,
                                    double theta,
                                    double delta,
                                    double *result);

// Closed-form accepted flip probability of one logical qubit.
enum FtpStatus ftp_logical_error_model(enum FtpSite site,
                                       enum FtpLogical qubit,
                                       double p0,
                                       double p1,
                                       double theta,
                                       double delta,
                                       double *result);

// Accepted `P(1̄)` of a decaying `|1̄⟩` logical with common T1.
enum FtpStatus ftp_ideal_decay(double t_us, double t1_us, double *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FTPREP_H */
