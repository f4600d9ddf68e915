//! C interface to the `cortisurf` library.
//!
//! Objects cross the boundary as opaque handles created and destroyed by this
//! library. Every fallible call returns a [`CsStatus`]; on failure the message
//! of the most recent error on the calling thread is available from
//! [`cs_last_error_message`]. Panics are caught and reported as
//! `CS_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use cortisurf::collision::{mesh_pair_intersections, self_intersection_fraction};
use cortisurf::deform::{interior_min, jacobian_determinant, scaling_and_squaring, warp_mesh};
use cortisurf::meshing::{diagnostics, read_mesh, write_mesh, TriangleMesh};
use cortisurf::metrics::{assd, chamfer, hausdorff, PointCloud};
use cortisurf::pipeline::{self, PipelineConfig};
use cortisurf::{Error, ErrorCategory, Vec3};

/// Result of every fallible call. Values match the command-line exit codes
/// where both exist.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    Internal = 1,
    Argument = 2,
    Io = 3,
    DegenerateInput = 4,
    NonConvergence = 5,
    NullPointer = 6,
}

/// Triangle mesh with `f64` vertices.
pub struct CsMesh(TriangleMesh);

/// Stationary velocity field on a voxel grid.
pub struct CsVelocityField(cortisurf::deform::VelocityField);

/// Displacement field of an integrated deformation.
pub struct CsDeformationField(cortisurf::deform::DeformationField);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CsMeshDiagnostics {
    pub vertex_count: usize,
    pub face_count: usize,
    pub edge_count: usize,
    pub euler_characteristic: i64,
    /// -1 when the genus is undefined (open or odd-characteristic mesh).
    pub genus: i64,
    pub component_count: usize,
    pub is_closed: bool,
    pub is_oriented: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CsPairReport {
    pub faces_a: usize,
    pub faces_b: usize,
    pub percent_a: f64,
    pub percent_b: f64,
    pub contacts: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CsStatus {
    match e.category() {
        ErrorCategory::Argument => CsStatus::Argument,
        ErrorCategory::Io => CsStatus::Io,
        ErrorCategory::DegenerateInput => CsStatus::DegenerateInput,
        ErrorCategory::NonConvergence => CsStatus::NonConvergence,
        ErrorCategory::Internal => CsStatus::Internal,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CsStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            CsStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal error: {msg}"));
            CsStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn path(p: *const c_char, what: &'static str) -> Result<PathBuf, Fail> {
    Ok(PathBuf::from(text(p, what)?))
}

unsafe fn text(p: *const c_char, what: &'static str) -> Result<String, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_string)
        .map_err(|_| Fail::Lib(Error::Argument(format!("{what} is not UTF-8"))))
}

unsafe fn points(p: *const f64, n: usize, what: &'static str) -> Result<Vec<Vec3>, Fail> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, 3 * n)
        .chunks_exact(3)
        .map(|c| Vec3::new(c[0], c[1], c[2]))
        .collect())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a mesh from `n_vertices` xyz triples and `n_faces` index triples.
///
/// # Safety
/// `vertices` must hold `3 * n_vertices` doubles and `faces` `3 * n_faces`
/// indices; `out_mesh` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_mesh_new(
    vertices: *const f64,
    n_vertices: usize,
    faces: *const u32,
    n_faces: usize,
    out_mesh: *mut *mut CsMesh,
) -> CsStatus {
    guard(|| {
        let slot = out(out_mesh, "out_mesh")?;
        let v = points(vertices, n_vertices, "vertices")?;
        let f = if n_faces == 0 {
            Vec::new()
        } else if faces.is_null() {
            return Err(Fail::Null("faces"));
        } else {
            std::slice::from_raw_parts(faces, 3 * n_faces)
                .chunks_exact(3)
                .map(|c| [c[0], c[1], c[2]])
                .collect()
        };
        *slot = boxed(CsMesh(TriangleMesh::new(v, f)?));
        Ok(())
    })
}

/// Reads a `.ply` or `.obj` mesh.
///
/// # Safety
/// `file` must be a NUL-terminated path and `out_mesh` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_mesh_read(file: *const c_char, out_mesh: *mut *mut CsMesh) -> CsStatus {
    guard(|| {
        let slot = out(out_mesh, "out_mesh")?;
        *slot = boxed(CsMesh(read_mesh(&path(file, "file")?)?));
        Ok(())
    })
}

/// Writes a mesh; the format follows the extension.
///
/// # Safety
/// `mesh` must come from this library and `file` be a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn cs_mesh_write(mesh: *const CsMesh, file: *const c_char) -> CsStatus {
    guard(|| {
        let m = deref(mesh, "mesh")?;
        write_mesh(&path(file, "file")?, &m.0)?;
        Ok(())
    })
}

/// # Safety
/// `mesh` must be null or come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cs_mesh_free(mesh: *mut CsMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Number of vertices; 0 for a null handle.
///
/// # Safety
/// `mesh` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn cs_mesh_vertex_count(mesh: *const CsMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.0.vertex_count())
}

/// Number of faces; 0 for a null handle.
///
/// # Safety
/// `mesh` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn cs_mesh_face_count(mesh: *const CsMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.0.face_count())
}

/// Copies the vertices as xyz triples into `buffer`, which must hold
/// `3 * vertex_count` doubles (`len` counts doubles).
///
/// # Safety
/// `buffer` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cs_mesh_copy_vertices(mesh: *const CsMesh, buffer: *mut f64, len: usize) -> CsStatus {
    guard(|| {
        let m = deref(mesh, "mesh")?;
        let need = 3 * m.0.vertex_count();
        if len < need {
            return Err(Error::Argument(format!("buffer holds {len} values, need {need}")).into());
        }
        if need > 0 && buffer.is_null() {
            return Err(Fail::Null("buffer"));
        }
        for (i, v) in m.0.vertices.iter().enumerate() {
            for a in 0..3 {
                *buffer.add(3 * i + a) = v[a];
            }
        }
        Ok(())
    })
}

/// # Safety
/// `mesh` must come from this library and `out_diag` be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_mesh_diagnostics(mesh: *const CsMesh, out_diag: *mut CsMeshDiagnostics) -> CsStatus {
    guard(|| {
        let m = deref(mesh, "mesh")?;
        let slot = out(out_diag, "out_diag")?;
        let d = diagnostics(&m.0);
        *slot = CsMeshDiagnostics {
            vertex_count: d.vertex_count,
            face_count: d.face_count,
            edge_count: d.edge_count,
            euler_characteristic: d.euler_characteristic,
            genus: d.genus.map_or(-1, |g| g as i64),
            component_count: d.component_count,
            is_closed: d.is_closed,
            is_oriented: d.is_oriented,
        };
        Ok(())
    })
}

/// Percentage of faces in a self-intersection.
///
/// # Safety
/// `mesh` must come from this library and `percent` be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_mesh_self_intersection(mesh: *const CsMesh, percent: *mut f64) -> CsStatus {
    guard(|| {
        let m = deref(mesh, "mesh")?;
        *out(percent, "percent")? = self_intersection_fraction(&m.0).percent;
        Ok(())
    })
}

/// Collisions between two meshes.
///
/// # Safety
/// Both meshes must come from this library and `report` be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_mesh_pair_intersections(
    a: *const CsMesh,
    b: *const CsMesh,
    report: *mut CsPairReport,
) -> CsStatus {
    guard(|| {
        let (ma, mb) = (deref(a, "a")?, deref(b, "b")?);
        let slot = out(report, "report")?;
        let r = mesh_pair_intersections(&ma.0, &mb.0);
        *slot = CsPairReport {
            faces_a: r.faces_a,
            faces_b: r.faces_b,
            percent_a: r.percent_a,
            percent_b: r.percent_b,
            contacts: r.contacts,
        };
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsCloudMetric {
    /// Sum of the two mean squared nearest-neighbour distances.
    Chamfer = 0,
    /// Mean of all nearest-neighbour distances of both clouds.
    Assd = 1,
    /// Symmetric percentile Hausdorff distance.
    Hausdorff = 2,
}

/// Distance between two point clouds of xyz triples. `percentile` is used
/// by `CS_CLOUD_METRIC_HAUSDORFF` only.
///
/// # Safety
/// `p` must hold `3 * np` doubles and `q` `3 * nq`; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_cloud_distance(
    metric: CsCloudMetric,
    p: *const f64,
    np: usize,
    q: *const f64,
    nq: usize,
    percentile: f64,
    value: *mut f64,
) -> CsStatus {
    guard(|| {
        let slot = out(value, "value")?;
        let a = PointCloud::new(points(p, np, "p")?);
        let b = PointCloud::new(points(q, nq, "q")?);
        *slot = match metric {
            CsCloudMetric::Chamfer => chamfer(&a, &b)?,
            CsCloudMetric::Assd => assd(&a, &b)?,
            CsCloudMetric::Hausdorff => hausdorff(&a, &b, percentile)?,
        };
        Ok(())
    })
}

/// Reads a 3-component velocity volume (NIfTI, `.nii.gz` or JSON raw).
///
/// # Safety
/// `file` must be a NUL-terminated path and `out_field` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_velocity_field_read(
    file: *const c_char,
    out_field: *mut *mut CsVelocityField,
) -> CsStatus {
    guard(|| {
        let slot = out(out_field, "out_field")?;
        let v = cortisurf::deform::VelocityField::load(&path(file, "file")?)?;
        *slot = boxed(CsVelocityField(v));
        Ok(())
    })
}

/// # Safety
/// `field` must be null or come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cs_velocity_field_free(field: *mut CsVelocityField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Integrates a velocity field by scaling and squaring with `steps`
/// squarings.
///
/// # Safety
/// `field` must come from this library and `out_map` be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_integrate(
    field: *const CsVelocityField,
    steps: u32,
    out_map: *mut *mut CsDeformationField,
) -> CsStatus {
    guard(|| {
        let v = deref(field, "field")?;
        let slot = out(out_map, "out_map")?;
        *slot = boxed(CsDeformationField(scaling_and_squaring(&v.0, steps)?));
        Ok(())
    })
}

/// # Safety
/// `map` must be null or come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cs_deformation_field_free(map: *mut CsDeformationField) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Smallest Jacobian determinant of the map over all voxels.
///
/// # Safety
/// `map` must come from this library and `value` be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_deformation_min_jacobian(map: *const CsDeformationField, value: *mut f64) -> CsStatus {
    guard(|| {
        let m = deref(map, "map")?;
        let slot = out(value, "value")?;
        let jac = jacobian_determinant(&m.0)?;
        *slot = interior_min(&jac, 0).unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Moves every vertex of `mesh` through the map into a new mesh.
///
/// # Safety
/// Handles must come from this library and `out_mesh` be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_mesh_warp(
    mesh: *const CsMesh,
    map: *const CsDeformationField,
    out_mesh: *mut *mut CsMesh,
) -> CsStatus {
    guard(|| {
        let m = deref(mesh, "mesh")?;
        let phi = deref(map, "map")?;
        let slot = out(out_mesh, "out_mesh")?;
        *slot = boxed(CsMesh(warp_mesh(&m.0, &phi.0)));
        Ok(())
    })
}

/// Runs one pipeline command (`phantom`, `init-surfaces`, `deform`,
/// `metrics` or `collide`) with a JSON config and returns the run manifest
/// as JSON. Free the string with [`cs_string_free`].
///
/// # Safety
/// `command` and `config_json` must be NUL-terminated; `out_manifest` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_run(
    command: *const c_char,
    config_json: *const c_char,
    out_manifest: *mut *mut c_char,
) -> CsStatus {
    guard(|| {
        let slot = out(out_manifest, "out_manifest")?;
        let cmd = text(command, "command")?;
        let json = text(config_json, "config_json")?;
        let config: PipelineConfig =
            serde_json::from_str(&json).map_err(|e| Error::Argument(format!("config: {e}")))?;
        let manifest = match cmd.as_str() {
            "phantom" => pipeline::cmd_phantom(&config)?,
            "init-surfaces" => pipeline::cmd_init_surfaces(&config)?,
            "deform" => pipeline::cmd_deform(&config)?,
            "metrics" => pipeline::cmd_metrics(&config)?,
            "collide" => pipeline::cmd_collide(&config)?,
            other => return Err(Error::Argument(format!("unknown command {other:?}")).into()),
        };
        let s = serde_json::to_string(&manifest).map_err(|e| Error::Format(e.to_string()))?;
        *slot = CString::new(s).map_err(|e| Error::Format(e.to_string()))?.into_raw();
        Ok(())
    })
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be null or come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
