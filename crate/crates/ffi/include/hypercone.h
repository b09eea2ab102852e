#ifndef HYPERCONE_H
#define HYPERCONE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Status codes. Values are stable.
typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_INVALID_INPUT = 1,
  // A predicate's margin fell inside the degeneracy window.
  HC_STATUS_DEGENERATE = 2,
  HC_STATUS_OFF_SHELL = 3,
  HC_STATUS_NUMERICAL = 4,
  HC_STATUS_CONSTRUCTION_FAILURE = 5,
  HC_STATUS_ADMISSIBILITY = 6,
  HC_STATUS_DOMAIN = 7,
  HC_STATUS_NO_ENCLOSURE = 8,
  HC_STATUS_NULL_POINTER = 9,
  HC_STATUS_PANIC = 10,
  // The output buffer was too small; the required size was reported.
  HC_STATUS_BUFFER_TOO_SMALL = 11,
} HcStatus;

// A cone over a spherical cap in the ball.
typedef struct HcCone HcCone;

// A parsed and validated scene file.
typedef struct HcScene HcScene;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf`. Returns the size
// needed including the NUL, whether or not it fit.
//
// # Safety
// `buf` must be null or point to `cap` writable bytes.
size_t hc_last_error(char *buf, size_t cap);

// Cone with the given apex, cap axis (any nonzero length) and cap
// half-angle in degrees.
//
// # Safety
// `apex` and `axis` must point to 3 doubles; `out` must be writable.
enum HcStatus hc_cone_new(const double *apex,
                          const double *axis,
                          double half_angle_deg,
                          struct HcCone **out);

// Releases a cone. Null is ignored.
//
// # Safety
// `k` must come from this library and not be used afterwards.
void hc_cone_free(struct HcCone *k);

// Reads back apex, unit axis and half-angle in degrees.
//
// # Safety
// `apex` and `axis` must point to 3 writable doubles, `half_angle_deg` to one.
enum HcStatus hc_cone_get(const struct HcCone *k,
                          double *apex,
                          double *axis,
                          double *half_angle_deg);

// Membership of the ball point `x` in the open cone.
//
// # Safety
// `x` must point to 3 doubles, `out` must be writable.
enum HcStatus hc_cone_contains(const struct HcCone *k, const double *x, bool *out);

// `closure(K1) ⊆ closure(K2)`, with the signed margin.
//
// # Safety
// Handles must be valid; `out` and `margin` writable or null.
enum HcStatus hc_cone_leq(const struct HcCone *k1,
                          const struct HcCone *k2,
                          bool *out,
                          double *margin);

// Whether the cones are disjoint, with the separation (or overlap) margin.
// Returns `HC_STATUS_DEGENERATE` inside the degeneracy window.
//
// # Safety
// Handles must be valid; `out` and `margin` writable or null.
enum HcStatus hc_cones_disjoint(const struct HcCone *k1,
                                const struct HcCone *k2,
                                bool *out,
                                double *margin);

// Image of the cone under the boost of rapidity `chi` along `dir`.
//
// # Safety
// `dir` must point to 3 doubles; `out` must be writable.
enum HcStatus hc_cone_boost(const struct HcCone *k,
                            const double *dir,
                            double chi,
                            struct HcCone **out);

// A cone containing both, or `HC_STATUS_NO_ENCLOSURE`.
//
// # Safety
// Handles must be valid; `out` must be writable.
enum HcStatus hc_enclosing_cone(const struct HcCone *k1,
                                const struct HcCone *k2,
                                struct HcCone **out);

// A cone disjoint from both of two disjoint cones.
//
// # Safety
// Handles must be valid; `out` must be writable.
enum HcStatus hc_common_complement_cone(const struct HcCone *k1,
                                        const struct HcCone *k2,
                                        struct HcCone **out);

// Hyperbolic distance between two ball points on the shell `tau`.
//
// # Safety
// `u` and `v` must point to 3 doubles; `out` must be writable.
enum HcStatus hc_ball_distance(const double *u, const double *v, double tau, double *out);

// The shadow parameter `c` between the shells `sigma` and `tau`.
//
// # Safety
// `out` must be writable.
enum HcStatus hc_shadow_parameter(double sigma, double tau, double *out);

// Whether the event `x` lies in the causal completion of the hypercone of
// `k` on the shell `tau`.
//
// # Safety
// `x` must point to 4 doubles; `out` must be writable.
enum HcStatus hc_in_causal_completion(const double *x,
                                      double tau,
                                      const struct HcCone *k,
                                      bool *out);

// Parses a scene from JSON text.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum HcStatus hc_scene_parse(const char *json, struct HcScene **out);

// Releases a scene. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void hc_scene_free(struct HcScene *s);

// Copies the named cone of a scene into a new handle.
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum HcStatus hc_scene_cone(const struct HcScene *s, const char *name, struct HcCone **out);

// Evaluates a query such as `"disjoint A B"` and writes the result line.
//
// # Safety
// `query` must be a NUL-terminated string, `buf` null or `cap` writable
// bytes, `needed` null or writable.
enum HcStatus hc_scene_check(const struct HcScene *s,
                             const char *query,
                             char *buf,
                             size_t cap,
                             size_t *needed);

// Runs the self-test; `passed` receives the verdict.
//
// # Safety
// `passed` must be writable.
enum HcStatus hc_selftest(uint64_t seed, size_t budget, bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERCONE_H */
