use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use cortisurf::deform::{synthetic, VelocityField};
use cortisurf::volume::GridGeometry;
use cortisurf::Vec3;
use cortisurf_ffi::*;

const TET_V: [f64; 12] = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
const TET_F: [u32; 12] = [0, 2, 1, 0, 1, 3, 0, 3, 2, 1, 2, 3];

fn last_error() -> String {
    unsafe { CStr::from_ptr(cs_last_error_message()) }.to_string_lossy().into_owned()
}

fn tetrahedron(offset: f64) -> *mut CsMesh {
    let v: Vec<f64> = TET_V.iter().map(|x| x + offset).collect();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { cs_mesh_new(v.as_ptr(), 4, TET_F.as_ptr(), 4, &mut m) }, CsStatus::Ok);
    m
}

#[test]
fn mesh_roundtrip_and_diagnostics() {
    let m = tetrahedron(0.0);
    unsafe {
        assert_eq!(cs_mesh_vertex_count(m), 4);
        assert_eq!(cs_mesh_face_count(m), 4);
        let mut d = CsMeshDiagnostics::default();
        assert_eq!(cs_mesh_diagnostics(m, &mut d), CsStatus::Ok);
        assert_eq!((d.genus, d.euler_characteristic, d.component_count), (0, 2, 1));
        assert!(d.is_closed && d.is_oriented);

        let dir = tempfile::tempdir().unwrap();
        let file = CString::new(dir.path().join("t.ply").to_str().unwrap()).unwrap();
        assert_eq!(cs_mesh_write(m, file.as_ptr()), CsStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(cs_mesh_read(file.as_ptr(), &mut back), CsStatus::Ok);
        let mut buf = [0.0; 12];
        assert_eq!(cs_mesh_copy_vertices(back, buf.as_mut_ptr(), 12), CsStatus::Ok);
        assert_eq!(buf, TET_V);
        assert_eq!(cs_mesh_copy_vertices(back, buf.as_mut_ptr(), 11), CsStatus::Argument);
        cs_mesh_free(back);
        cs_mesh_free(m);
        cs_mesh_free(ptr::null_mut());
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(cs_mesh_new(TET_V.as_ptr(), 4, TET_F.as_ptr(), 4, ptr::null_mut()), CsStatus::NullPointer);
        assert!(last_error().contains("out_mesh"));
        let bad = [0u32, 1, 9];
        assert_eq!(cs_mesh_new(TET_V.as_ptr(), 4, bad.as_ptr(), 1, &mut m), CsStatus::Io);
        assert!(m.is_null());
        let missing = CString::new("/nonexistent/dir/x.ply").unwrap();
        assert_eq!(cs_mesh_read(missing.as_ptr(), &mut m), CsStatus::Io);
        assert!(last_error().contains("/nonexistent/dir/x.ply"));
        let wrong = CString::new("x.stl").unwrap();
        assert_eq!(cs_mesh_read(wrong.as_ptr(), &mut m), CsStatus::Io);
        let mut x = 0.0;
        assert_eq!(cs_mesh_self_intersection(ptr::null(), &mut x), CsStatus::NullPointer);
    }
}

#[test]
fn collisions_and_self_intersection() {
    let a = tetrahedron(0.0);
    let b = tetrahedron(0.25);
    let far = tetrahedron(5.0);
    unsafe {
        let mut r = CsPairReport::default();
        assert_eq!(cs_mesh_pair_intersections(a, b, &mut r), CsStatus::Ok);
        assert!(r.contacts > 0 && r.percent_a > 0.0);
        assert_eq!(cs_mesh_pair_intersections(a, far, &mut r), CsStatus::Ok);
        assert_eq!(r.contacts, 0);
        let mut pct = -1.0;
        assert_eq!(cs_mesh_self_intersection(a, &mut pct), CsStatus::Ok);
        assert_eq!(pct, 0.0);
        for m in [a, b, far] {
            cs_mesh_free(m);
        }
    }
}

#[test]
fn cloud_distances() {
    let p = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
    let q = [0.0, 0.0, 0.5, 1.0, 0.0, 0.5];
    let mut v = 0.0;
    unsafe {
        assert_eq!(cs_cloud_distance(CsCloudMetric::Chamfer, p.as_ptr(), 2, q.as_ptr(), 2, 100.0, &mut v), CsStatus::Ok);
        assert!((v - 0.5).abs() < 1e-12);
        assert_eq!(cs_cloud_distance(CsCloudMetric::Assd, p.as_ptr(), 2, q.as_ptr(), 2, 100.0, &mut v), CsStatus::Ok);
        assert!((v - 0.5).abs() < 1e-12);
        assert_eq!(cs_cloud_distance(CsCloudMetric::Hausdorff, p.as_ptr(), 2, q.as_ptr(), 2, 100.0, &mut v), CsStatus::Ok);
        assert!((v - 0.5).abs() < 1e-12);
        assert_eq!(
            cs_cloud_distance(CsCloudMetric::Chamfer, p.as_ptr(), 2, q.as_ptr(), 0, 100.0, &mut v),
            CsStatus::Argument
        );
    }
}

#[test]
fn integrate_and_warp() {
    let dir = tempfile::tempdir().unwrap();
    let g = GridGeometry::new([12, 12, 12], [1.0; 3], [-6.0; 3]).unwrap();
    let c = Vec3::new(0.5, -0.25, 0.125);
    let file = dir.path().join("v.nii.gz");
    synthetic::constant(g, c).save(&file).unwrap();
    let _ = VelocityField::load(&file).unwrap();
    let cfile = CString::new(file.to_str().unwrap()).unwrap();
    unsafe {
        let mut v = ptr::null_mut();
        assert_eq!(cs_velocity_field_read(cfile.as_ptr(), &mut v), CsStatus::Ok);
        let mut phi = ptr::null_mut();
        assert_eq!(cs_integrate(v, 0, &mut phi), CsStatus::Argument);
        assert_eq!(cs_integrate(v, 7, &mut phi), CsStatus::Ok);
        let mut jac = 0.0;
        assert_eq!(cs_deformation_min_jacobian(phi, &mut jac), CsStatus::Ok);
        assert!((jac - 1.0).abs() < 1e-9);
        let m = tetrahedron(0.0);
        let mut w = ptr::null_mut();
        assert_eq!(cs_mesh_warp(m, phi, &mut w), CsStatus::Ok);
        let mut buf = [0.0; 12];
        assert_eq!(cs_mesh_copy_vertices(w, buf.as_mut_ptr(), 12), CsStatus::Ok);
        for i in 0..4 {
            for a in 0..3 {
                assert!((buf[3 * i + a] - TET_V[3 * i + a] - c[a]).abs() < 1e-9);
            }
        }
        cs_mesh_free(w);
        cs_mesh_free(m);
        cs_deformation_field_free(phi);
        cs_velocity_field_free(v);
    }
}

#[test]
fn run_commands_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ph");
    let config = serde_json::json!({"output": out, "seed": 5, "phantom": {"dims": [40, 40, 40]}});
    let cmd = CString::new("phantom").unwrap();
    let cfg = CString::new(config.to_string()).unwrap();
    unsafe {
        let mut manifest = ptr::null_mut();
        assert_eq!(cs_run(cmd.as_ptr(), cfg.as_ptr(), &mut manifest), CsStatus::Ok);
        let text = CStr::from_ptr(manifest).to_str().unwrap().to_owned();
        cs_string_free(manifest);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["command"], "phantom");
        assert!(out.join("labels.nii.gz").is_file());

        let bad = CString::new("train").unwrap();
        let mut m2 = ptr::null_mut();
        assert_eq!(cs_run(bad.as_ptr(), cfg.as_ptr(), &mut m2), CsStatus::Argument);
        let junk = CString::new("{\"nope\": 1}").unwrap();
        assert_eq!(cs_run(cmd.as_ptr(), junk.as_ptr(), &mut m2), CsStatus::Argument);
        assert!(m2.is_null());
    }
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("cortisurf.h")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "cs_last_error_message",
        "cs_mesh_new",
        "cs_mesh_free",
        "cs_mesh_diagnostics",
        "cs_mesh_pair_intersections",
        "cs_cloud_distance",
        "cs_integrate",
        "cs_mesh_warp",
        "cs_run",
        "cs_string_free",
        "typedef struct CsMesh CsMesh;",
        "CS_STATUS_NON_CONVERGENCE = 5",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}

/// Compiles a C program against the header and the static library, when a C
/// compiler and the archive are available.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libcortisurf_ffi.a");
    let has_cc = Command::new("cc").arg("--version").output().is_ok();
    if !has_cc || !lib.is_file() {
        eprintln!("skipping: cc or {} unavailable", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("smoke.c");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
