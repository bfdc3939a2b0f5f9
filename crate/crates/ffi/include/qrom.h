/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef QROM_H
#define QROM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum QromStatus {
  QROM_STATUS_OK = 0,
  QROM_STATUS_NULL_POINTER = 1,
  QROM_STATUS_INVALID_PARAMS = 2,
  QROM_STATUS_PARSE_ERROR = 3,
  QROM_STATUS_VERIFICATION_FAILED = 4,
  QROM_STATUS_INTERNAL = 5,
} QromStatus;

/**
 * Gate-level circuit. Opaque.
 */
typedef struct QromCircuit QromCircuit;

/**
 * Lookup data. Opaque.
 */
typedef struct QromTable QromTable;

/**
 * Exact gate and qubit counts of a circuit.
 */
typedef struct QromResources {
  uint64_t toffoli;
  uint64_t temp_and;
  uint64_t cnot;
  uint64_t x;
  uint64_t clean_qubits;
  uint64_t dirty_qubits;
  uint64_t total_qubits;
} QromResources;

/**
 * Outcome of `qrom_verify`.
 */
typedef struct QromVerifyReport {
  uint64_t cases_run;
  uint64_t failures;
  /**
   * Address of the first failing case, or `UINT64_MAX`.
   */
  uint64_t first_failure_address;
} QromVerifyReport;

/**
 * Closed-form cost of one construction.
 */
typedef struct QromCost {
  uint64_t toffoli_total;
  uint64_t select_toffoli;
  uint64_t copy_toffoli;
  uint64_t dirty_qubits;
  uint64_t clean_work_qubits;
  uint64_t output_qubits;
} QromCost;

/**
 * Parameters chosen by `qrom_optimize`. `lambda` and `mu` are 0 when no
 * pair fits the budget; `cost` then holds the plain circuit's count.
 */
typedef struct QromOptimum {
  uint64_t lambda;
  uint64_t mu;
  bool feasible;
  struct QromCost cost;
} QromOptimum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *qrom_last_error(void);

/**
 * Creates a table from `n` entries of `bit_width` bits.
 *
 * # Safety
 * `entries` must point to `n` readable `uint64_t`; `out` must be writable.
 */
enum QromStatus qrom_table_new(const uint64_t *entries,
                               uintptr_t n,
                               uint32_t bit_width,
                               struct QromTable **out);

/**
 * Parses a table in the text format (`N b` header, then `N` values).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum QromStatus qrom_table_parse(const char *text, struct QromTable **out);

/**
 * # Safety
 * `table` must be NULL or a handle from this library that is not used again.
 */
void qrom_table_free(struct QromTable *table);

/**
 * Builds the bit-packet lookup circuit for `table`.
 *
 * # Safety
 * `table` must be a live table handle; `out` must be writable.
 */
enum QromStatus qrom_build(const struct QromTable *table,
                           uint64_t lambda,
                           uint32_t mu,
                           struct QromCircuit **out);

/**
 * Builds `count` back-to-back lookups sharing one dirty register set.
 *
 * # Safety
 * `tables` must point to `count` live table handles; `out` must be writable.
 */
enum QromStatus qrom_build_sequential(const struct QromTable *const *tables,
                                      uintptr_t count,
                                      uint64_t lambda,
                                      struct QromCircuit **out);

/**
 * Builds the dirty-ancilla SelectSwap baseline.
 *
 * # Safety
 * `table` must be a live table handle; `out` must be writable.
 */
enum QromStatus qrom_build_selectswap(const struct QromTable *table,
                                      uint64_t lambda,
                                      struct QromCircuit **out);

/**
 * Builds the plain unary-iteration lookup.
 *
 * # Safety
 * `table` must be a live table handle; `out` must be writable.
 */
enum QromStatus qrom_build_plain(const struct QromTable *table, struct QromCircuit **out);

/**
 * # Safety
 * `circuit` must be NULL or a handle from this library that is not used
 * again.
 */
void qrom_circuit_free(struct QromCircuit *circuit);

/**
 * # Safety
 * `circuit` must be a live circuit handle; `out` must be writable.
 */
enum QromStatus qrom_circuit_resources(const struct QromCircuit *circuit,
                                       struct QromResources *out);

/**
 * Serializes a circuit to the gate-list text format. Free the result with
 * `qrom_string_free`.
 *
 * # Safety
 * `circuit` must be a live circuit handle; `out` must be writable.
 */
enum QromStatus qrom_circuit_serialize(const struct QromCircuit *circuit, char **out);

/**
 * Parses and validates a gate-list text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum QromStatus qrom_circuit_parse(const char *text, struct QromCircuit **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not used again.
 */
void qrom_string_free(char *s);

/**
 * Simulates every address of the tables with `trials` seeded dirty patterns
 * each. Output register `i` is checked against `tables[i]`. Returns
 * `QROM_STATUS_VERIFICATION_FAILED` when any case fails; `out` is filled
 * either way.
 *
 * # Safety
 * `circuit` must be a live handle, `tables` must point to `count` live table
 * handles, and `out` must be writable.
 */
enum QromStatus qrom_verify(const struct QromCircuit *circuit,
                            const struct QromTable *const *tables,
                            uintptr_t count,
                            uint32_t trials,
                            uint64_t seed,
                            struct QromVerifyReport *out);

/**
 * Closed-form bit-packet lookup cost.
 *
 * # Safety
 * `out` must be writable.
 */
enum QromStatus qrom_cost_bit_packet(uint64_t n,
                                     uint64_t b,
                                     uint64_t lambda,
                                     uint64_t mu,
                                     struct QromCost *out);

/**
 * Cheapest `(lambda, mu)` with `mu * (lambda - 1) <= dirty_budget`.
 *
 * # Safety
 * `out` must be writable.
 */
enum QromStatus qrom_optimize(uint64_t n,
                              uint64_t b,
                              uint64_t dirty_budget,
                              struct QromOptimum *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QROM_H */
