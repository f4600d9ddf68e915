#ifndef CORTISURF_H
#define CORTISURF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. Values match the command-line exit codes
 * where both exist.
 */
typedef enum {
  CS_STATUS_OK = 0,
  CS_STATUS_INTERNAL = 1,
  CS_STATUS_ARGUMENT = 2,
  CS_STATUS_IO = 3,
  CS_STATUS_DEGENERATE_INPUT = 4,
  CS_STATUS_NON_CONVERGENCE = 5,
  CS_STATUS_NULL_POINTER = 6,
} CsStatus;

typedef enum {
  /**
   * Sum of the two mean squared nearest-neighbour distances.
   */
  CS_CLOUD_METRIC_CHAMFER = 0,
  /**
   * Mean of all nearest-neighbour distances of both clouds.
   */
  CS_CLOUD_METRIC_ASSD = 1,
  /**
   * Symmetric percentile Hausdorff distance.
   */
  CS_CLOUD_METRIC_HAUSDORFF = 2,
} CsCloudMetric;

/**
 * Displacement field of an integrated deformation.
 */
typedef struct CsDeformationField CsDeformationField;

/**
 * Triangle mesh with `f64` vertices.
 */
typedef struct CsMesh CsMesh;

/**
 * Stationary velocity field on a voxel grid.
 */
typedef struct CsVelocityField CsVelocityField;

typedef struct {
  size_t vertex_count;
  size_t face_count;
  size_t edge_count;
  int64_t euler_characteristic;
  /**
   * -1 when the genus is undefined (open or odd-characteristic mesh).
   */
  int64_t genus;
  size_t component_count;
  bool is_closed;
  bool is_oriented;
} CsMeshDiagnostics;

typedef struct {
  size_t faces_a;
  size_t faces_b;
  double percent_a;
  double percent_b;
  size_t contacts;
} CsPairReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *cs_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cs_version(void);

/**
 * Builds a mesh from `n_vertices` xyz triples and `n_faces` index triples.
 *
 * # Safety
 * `vertices` must hold `3 * n_vertices` doubles and `faces` `3 * n_faces`
 * indices; `out_mesh` must be writable.
 */
CsStatus cs_mesh_new(const double *vertices,
                     size_t n_vertices,
                     const uint32_t *faces,
                     size_t n_faces,
                     CsMesh **out_mesh);

/**
 * Reads a `.ply` or `.obj` mesh.
 *
 * # Safety
 * `file` must be a NUL-terminated path and `out_mesh` writable.
 */
CsStatus cs_mesh_read(const char *file, CsMesh **out_mesh);

/**
 * Writes a mesh; the format follows the extension.
 *
 * # Safety
 * `mesh` must come from this library and `file` be a NUL-terminated path.
 */
CsStatus cs_mesh_write(const CsMesh *mesh, const char *file);

/**
 * # Safety
 * `mesh` must be null or come from this library and not be freed twice.
 */
void cs_mesh_free(CsMesh *mesh);

/**
 * Number of vertices; 0 for a null handle.
 *
 * # Safety
 * `mesh` must be null or come from this library.
 */
size_t cs_mesh_vertex_count(const CsMesh *mesh);

/**
 * Number of faces; 0 for a null handle.
 *
 * # Safety
 * `mesh` must be null or come from this library.
 */
size_t cs_mesh_face_count(const CsMesh *mesh);

/**
 * Copies the vertices as xyz triples into `buffer`, which must hold
 * `3 * vertex_count` doubles (`len` counts doubles).
 *
 * # Safety
 * `buffer` must be writable for `len` doubles.
 */
CsStatus cs_mesh_copy_vertices(const CsMesh *mesh, double *buffer, size_t len);

/**
 * # Safety
 * `mesh` must come from this library and `out_diag` be writable.
 */
CsStatus cs_mesh_diagnostics(const CsMesh *mesh, CsMeshDiagnostics *out_diag);

/**
 * Percentage of faces in a self-intersection.
 *
 * # Safety
 * `mesh` must come from this library and `percent` be writable.
 */
CsStatus cs_mesh_self_intersection(const CsMesh *mesh, double *percent);

/**
 * Collisions between two meshes.
 *
 * # Safety
 * Both meshes must come from this library and `report` be writable.
 */
CsStatus cs_mesh_pair_intersections(const CsMesh *a, const CsMesh *b, CsPairReport *report);

/**
 * Distance between two point clouds of xyz triples. `percentile` is used
 * by `CS_CLOUD_METRIC_HAUSDORFF` only.
 *
 * # Safety
 * `p` must hold `3 * np` doubles and `q` `3 * nq`; `value` must be writable.
 */
CsStatus cs_cloud_distance(CsCloudMetric metric,
                           const double *p,
                           size_t np,
                           const double *q,
                           size_t nq,
                           double percentile,
                           double *value);

/**
 * Reads a 3-component velocity volume (NIfTI, `.nii.gz` or JSON raw).
 *
 * # Safety
 * `file` must be a NUL-terminated path and `out_field` writable.
 */
CsStatus cs_velocity_field_read(const char *file, CsVelocityField **out_field);

/**
 * # Safety
 * `field` must be null or come from this library and not be freed twice.
 */
void cs_velocity_field_free(CsVelocityField *field);

/**
 * Integrates a velocity field by scaling and squaring with `steps`
 * squarings.
 *
 * # Safety
 * `field` must come from this library and `out_map` be writable.
 */
CsStatus cs_integrate(const CsVelocityField *field, uint32_t steps, CsDeformationField **out_map);

/**
 * # Safety
 * `map` must be null or come from this library and not be freed twice.
 */
void cs_deformation_field_free(CsDeformationField *map);

/**
 * Smallest Jacobian determinant of the map over all voxels.
 *
 * # Safety
 * `map` must come from this library and `value` be writable.
 */
CsStatus cs_deformation_min_jacobian(const CsDeformationField *map, double *value);

/**
 * Moves every vertex of `mesh` through the map into a new mesh.
 *
 * # Safety
 * Handles must come from this library and `out_mesh` be writable.
 */
CsStatus cs_mesh_warp(const CsMesh *mesh, const CsDeformationField *map, CsMesh **out_mesh);

/**
 * Runs one pipeline command (`phantom`, `init-surfaces`, `deform`,
 * `metrics` or `collide`) with a JSON config and returns the run manifest
 * as JSON. Free the string with [`cs_string_free`].
 *
 * # Safety
 * `command` and `config_json` must be NUL-terminated; `out_manifest` must
 * be writable.
 */
CsStatus cs_run(const char *command, const char *config_json, char **out_manifest);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must be null or come from this library and not be freed twice.
 */
void cs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CORTISURF_H */
