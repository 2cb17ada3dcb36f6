#ifndef ACSTARK_H
#define ACSTARK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define ACS_POLARIZATION_LINEAR_PI 0

#define ACS_POLARIZATION_SIGMA_PLUS 1

#define ACS_POLARIZATION_SIGMA_MINUS 2

#define ACS_MODE_COARSE 0

#define ACS_MODE_FINE 1

#define ACS_PLACEMENT_HALF_WAIST 0

#define ACS_PLACEMENT_OPTIMAL 1

#define ACS_PLACEMENT_FIXED 2

typedef enum AcsStatus {
  ACS_STATUS_OK = 0,
  ACS_STATUS_NULL_POINTER = 1,
  ACS_STATUS_INVALID_UTF8 = 2,
  ACS_STATUS_INVALID_ARGUMENT = 3,
  ACS_STATUS_PARSE = 4,
  ACS_STATUS_NOT_FOUND = 5,
  ACS_STATUS_CONFIGURATION = 6,
  ACS_STATUS_DOMAIN = 7,
  ACS_STATUS_REGIME = 8,
  ACS_STATUS_INFEASIBLE = 9,
  ACS_STATUS_SINGULAR = 10,
  ACS_STATUS_NUMERIC = 11,
  ACS_STATUS_IO = 12,
  ACS_STATUS_BUFFER_TOO_SMALL = 13,
  ACS_STATUS_PANIC = 14,
} AcsStatus;

/**
 * Opaque chain handle: equilibrium positions and modes of a linear chain.
 */
typedef struct AcsChain AcsChain;

/**
 * Opaque species handle.
 */
typedef struct AcsSpecies AcsSpecies;

typedef struct AcsPowerResult {
  /**
   * W
   */
  double power;
  /**
   * W/m^2
   */
  double peak_intensity;
  /**
   * m
   */
  double center_offset;
  /**
   * rad/s per W/m^2
   */
  double psi;
  double kappa;
  /**
   * 1/s
   */
  double total_scatter;
} AcsPowerResult;

typedef struct AcsZeemanResult {
  /**
   * m
   */
  double wavelength;
  /**
   * W
   */
  double power;
  /**
   * 1/s
   */
  double total_scatter;
  /**
   * rad/s per W/m^2
   */
  double psi;
} AcsZeemanResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next API call on the same thread.
 */
const char *acs_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *acs_version(void);

/**
 * Look up a built-in species by name (case-insensitive), e.g. "Ca40+".
 *
 * # Safety
 * `name` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum AcsStatus acs_species_builtin(const char *name, struct AcsSpecies **out_species);

/**
 * Load a species from a TOML data file. `name` may be NULL when the file
 * holds a single species.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string, `name` NULL or valid, and
 * `out` a valid pointer.
 */
enum AcsStatus acs_species_load(const char *path,
                                const char *name,
                                struct AcsSpecies **out_species);

/**
 * Switch the species to the ground-state Zeeman qubit.
 *
 * # Safety
 * `species` must be a live handle.
 */
enum AcsStatus acs_species_use_zeeman_qubit(struct AcsSpecies *species);

/**
 * # Safety
 * `species` must be NULL or a handle from this library not yet freed.
 */
void acs_species_free(struct AcsSpecies *species);

/**
 * Ion mass in kg.
 *
 * # Safety
 * `species` must be a live handle and `out_mass` valid.
 */
enum AcsStatus acs_species_mass(const struct AcsSpecies *species, double *out_mass);

/**
 * Shift per unit intensity (rad/s per W/m^2) of the optical qubit at a
 * vacuum wavelength in m.
 *
 * # Safety
 * `species` must be a live handle and `out_psi` valid.
 */
enum AcsStatus acs_psi(const struct AcsSpecies *species,
                       double wavelength,
                       uint32_t polarization_code,
                       uint32_t mode_code,
                       double *out_psi);

/**
 * Equilibrium chain of `n_ions` ions at axial frequency `omega_z` (rad/s).
 *
 * # Safety
 * `species` must be a live handle and `out_chain` valid.
 */
enum AcsStatus acs_chain_new(const struct AcsSpecies *species,
                             double omega_z,
                             size_t n_ions,
                             struct AcsChain **out_chain);

/**
 * # Safety
 * `chain` must be NULL or a handle from this library not yet freed.
 */
void acs_chain_free(struct AcsChain *chain);

/**
 * Number of ions, or 0 for a NULL handle.
 *
 * # Safety
 * `chain` must be NULL or a live handle.
 */
size_t acs_chain_len(const struct AcsChain *chain);

/**
 * Copy ion positions (m, ascending) into `buffer`, which must hold at least
 * `acs_chain_len` values.
 *
 * # Safety
 * `chain` must be a live handle and `buffer` writable for `len` doubles.
 */
enum AcsStatus acs_chain_positions(const struct AcsChain *chain, double *buffer, size_t len);

/**
 * Copy axial mode frequencies (rad/s, ascending) into `buffer`.
 *
 * # Safety
 * `chain` must be a live handle and `buffer` writable for `len` doubles.
 */
enum AcsStatus acs_chain_mode_frequencies(const struct AcsChain *chain, double *buffer, size_t len);

/**
 * Copy the participation vector of mode `mode` (one entry per ion).
 *
 * # Safety
 * `chain` must be a live handle and `buffer` writable for `len` doubles.
 */
enum AcsStatus acs_chain_mode_vector(const struct AcsChain *chain,
                                     size_t mode,
                                     double *buffer,
                                     size_t len);

/**
 * Smallest neighbour spacing, m. Fails for a single ion.
 *
 * # Safety
 * `chain` must be a live handle and `out_spacing` valid.
 */
enum AcsStatus acs_chain_spacing(const struct AcsChain *chain, double *out_spacing);

/**
 * Geometry factor `kappa` for ion spacing `delta_z` and waist `waist` (m).
 *
 * # Safety
 * `out_kappa` must be valid.
 */
enum AcsStatus acs_kappa(double delta_z, double waist, double *out_kappa);

/**
 * Beam offset maximising the two-ion intensity difference, m.
 *
 * # Safety
 * `out_offset` must be valid.
 */
enum AcsStatus acs_optimal_offset(double delta_z, double waist, double *out_offset);

/**
 * Beam power giving splitting `target_e` (J) between the closest ion pair.
 * `offset` is used only with `ACS_PLACEMENT_FIXED`.
 *
 * # Safety
 * Handles must be live and `out_result` valid.
 */
enum AcsStatus acs_required_power(const struct AcsSpecies *species,
                                  const struct AcsChain *chain,
                                  double waist,
                                  double wavelength,
                                  double target_e,
                                  uint32_t mode_code,
                                  uint32_t placement_code,
                                  double offset,
                                  uint32_t polarization_code,
                                  struct AcsPowerResult *out_result);

/**
 * Scattering-optimal wavelength between the fine-structure resonances for
 * a Zeeman qubit (see [`acs_species_use_zeeman_qubit`]).
 *
 * # Safety
 * Handles must be live and `out_result` valid.
 */
enum AcsStatus acs_zeeman_optimum(const struct AcsSpecies *species,
                                  const struct AcsChain *chain,
                                  double waist,
                                  double target_e,
                                  uint32_t polarization_code,
                                  uint32_t placement_code,
                                  double offset,
                                  struct AcsZeemanResult *out_result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACSTARK_H */
