//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use cortisurf::collision::{brute_force, mesh_pair_intersections, pair_report, self_intersection_fraction};
use cortisurf::deform::{
    compose, interior_min, jacobian_determinant, scaling_and_squaring, synthetic, warp_mesh,
};
use cortisurf::meshing::primitives::{icosphere, sphere};
use cortisurf::meshing::{diagnostics, marching_cubes, sample_surface_points, TriangleMesh};
use cortisurf::metrics::{assd, chamfer, edge_loss, hausdorff, normal_consistency_loss, PointCloud, SurfaceSet};
use cortisurf::pipeline::{
    cmd_deform, cmd_init_surfaces, cmd_metrics, cmd_phantom, load_surface_set, PipelineConfig, RunManifest,
    LABELS_FILE, MANIFEST_FILE,
};
use cortisurf::topology::topology_correct;
use cortisurf::volume::{GridGeometry, ScalarField, SurfaceId, VoxelGrid};
use cortisurf::Vec3;
use nalgebra::Rotation3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const STANDARD_PAIRS: [(SurfaceId, SurfaceId); 4] = [
    (SurfaceId::LhPial, SurfaceId::RhPial),
    (SurfaceId::LhWhite, SurfaceId::RhWhite),
    (SurfaceId::LhPial, SurfaceId::LhWhite),
    (SurfaceId::RhPial, SurfaceId::RhWhite),
];

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn is_sphere_like(m: &TriangleMesh) -> bool {
    let d = diagnostics(m);
    d.genus == Some(0) && d.component_count == 1 && d.is_closed && d.is_oriented
}

/// Phantom and initial surfaces under `root`; returns the init manifest and
/// the seconds spent in `init-surfaces`.
fn phantom_and_init(root: &Path, seed: u64) -> Result<(RunManifest, f64), String> {
    let ph = PipelineConfig {
        seed,
        output: root.join("phantom"),
        ..Default::default()
    };
    cmd_phantom(&ph).map_err(|e| format!("phantom {seed}: {e}"))?;
    let init = PipelineConfig {
        seed,
        labels: Some(ph.output.join(LABELS_FILE)),
        output: root.join("init"),
        ..Default::default()
    };
    let t = Instant::now();
    let m = cmd_init_surfaces(&init).map_err(|e| format!("init {seed}: {e}"))?;
    Ok((m, t.elapsed().as_secs_f64()))
}

// 1. 25 random phantoms: %Face 0 on the four pairs, genus 0, < 30 s each on
// one core.
fn collision_free_initialization() -> Outcome {
    const RUNS: u64 = 25;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::new());
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(RUNS as usize);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
                loop {
                    let i = next.fetch_add(1, Ordering::SeqCst) as u64;
                    if i >= RUNS {
                        break;
                    }
                    let root = dir.path().join(format!("run{i}"));
                    let r = pool.install(|| -> Result<(u64, f64, f64, bool, f64), String> {
                        let (m, secs) = phantom_and_init(&root, 1000 + i)?;
                        let set = load_surface_set(&root.join("init")).map_err(|e| e.to_string())?;
                        let worst = STANDARD_PAIRS
                            .iter()
                            .map(|&(a, b)| {
                                let r = pair_report(a, &set[&a], b, &set[&b]);
                                r.percent_a.max(r.percent_b)
                            })
                            .fold(0.0, f64::max);
                        let genus0 = set.values().all(is_sphere_like);
                        let lp = m.lambda.map_or(f64::NAN, |l| l.pial);
                        Ok((i, worst, secs, genus0, lp))
                    });
                    results.lock().unwrap().push(r);
                }
            });
        }
    });
    let results = results.into_inner().unwrap();
    let mut clean = 0;
    let mut max_face: f64 = 0.0;
    let mut max_secs: f64 = 0.0;
    let mut problems = Vec::new();
    for r in results {
        match r {
            Ok((i, face, secs, genus0, _)) => {
                max_face = max_face.max(face);
                max_secs = max_secs.max(secs);
                if face == 0.0 && genus0 && secs < 30.0 {
                    clean += 1;
                } else {
                    problems.push(format!("run {i}: %face {face:.3}, genus0 {genus0}, {secs:.1} s"));
                }
            }
            Err(e) => problems.push(e),
        }
    }
    let detail = format!(
        "{clean}/{RUNS} phantoms with %Face 0.000 on 4 pairs and genus 0; max %Face {max_face:.3}; slowest {max_secs:.1} s single-threaded{}",
        if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
    );
    check(clean == RUNS, detail)
}

fn max_interior(g: &GridGeometry, margin: usize, f: impl Fn(usize) -> f64) -> f64 {
    (0..g.len())
        .filter(|&i| {
            let c = g.coords(i);
            (0..3).all(|a| c[a] >= margin && c[a] + margin < g.dims[a])
        })
        .map(f)
        .fold(0.0, f64::max)
}

// 2. Constant flow to 1e-9 relative, rotation within 1e-3 mm, inverse
// consistency below 0.05 mm for |v| <= 2 mm.
fn integration_accuracy() -> Outcome {
    let g = GridGeometry::unit([32; 3]);
    let c = Vec3::new(1.3, -0.7, 2.1);
    let phi = scaling_and_squaring(&synthetic::constant(g, c), 7).map_err(|e| e.to_string())?;
    let const_err = max_interior(&g, 0, |i| (Vec3::from(phi.data()[i]) - c).norm() / c.norm());

    let centre = Vec3::repeat(15.5);
    let omega = Vec3::new(1.0, -2.0, 2.5).normalize() * 0.3;
    let phi = scaling_and_squaring(&synthetic::rotation(g, omega, centre), 7).map_err(|e| e.to_string())?;
    let rot = Rotation3::from_scaled_axis(omega);
    let rot_err = max_interior(&g, 5, |i| {
        let x = g.world_of_index(i);
        (phi.mapped_voxel(i) - (centre + rot * (x - centre))).norm()
    });

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut inv_err: f64 = 0.0;
    for _ in 0..10 {
        let terms = rng.gen_range(1..=8);
        let v = synthetic::band_limited(g, &mut rng, 2.0, terms);
        let fwd = scaling_and_squaring(&v, 7).map_err(|e| e.to_string())?;
        let back = scaling_and_squaring(&v.scaled(-1.0), 7).map_err(|e| e.to_string())?;
        for (a, b) in [(&fwd, &back), (&back, &fwd)] {
            let id = compose(a, b).map_err(|e| e.to_string())?;
            inv_err = inv_err.max(max_interior(&g, 5, |i| Vec3::from(id.data()[i]).norm()));
        }
    }
    check(
        const_err <= 1e-9 && rot_err <= 1e-3 && inv_err < 0.05,
        format!(
            "constant rel. error {const_err:.2e} (<= 1e-9); rotation error {rot_err:.2e} mm (<= 1e-3); inverse residual {inv_err:.4} mm over 10 fields (< 0.05)"
        ),
    )
}

// 3. 50 random fields: positive Jacobian; warped phantom surfaces keep SIF 0
// and genus 0.
fn diffeomorphism_certificate() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    phantom_and_init(dir.path(), 77)?;
    let set = load_surface_set(&dir.path().join("init")).map_err(|e| e.to_string())?;
    let g = GridGeometry::unit([64; 3]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut min_jac = f64::INFINITY;
    let mut failures = Vec::new();
    for trial in 0..50 {
        let terms = rng.gen_range(1..=8);
        let v = synthetic::band_limited(g, &mut rng, 2.0, terms);
        let phi = scaling_and_squaring(&v, 7).map_err(|e| e.to_string())?;
        let jac = interior_min(&jacobian_determinant(&phi).map_err(|e| e.to_string())?, 1).unwrap();
        min_jac = min_jac.min(jac);
        let bad: Vec<&str> = set
            .iter()
            .filter(|(_, m)| {
                let w = warp_mesh(m, &phi);
                self_intersection_fraction(&w).pairs > 0 || diagnostics(&w).genus != Some(0)
            })
            .map(|(s, _)| s.name())
            .collect();
        if jac <= 0.0 || !bad.is_empty() {
            failures.push(format!("field {trial}: jac {jac:.3}, bad {bad:?}"));
        }
    }
    check(
        failures.is_empty(),
        format!(
            "50 fields with |v| = 2 voxels: min interior Jacobian {min_jac:.4} (> 0); {} fields broke SIF 0 / genus 0{}",
            failures.len(),
            if failures.is_empty() { String::new() } else { format!(": {}", failures.join("; ")) }
        ),
    )
}

fn brute_nn(p: &[Vec3], q: &[Vec3]) -> Vec<f64> {
    p.iter()
        .map(|a| {
            q.iter()
                .map(|b| {
                    let (dx, dy, dz) = (a.x - b.x, a.y - b.y, a.z - b.z);
                    dx * dx + dy * dy + dz * dz
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

fn brute_percentile(mut d: Vec<f64>, pct: f64) -> f64 {
    d.sort_by(f64::total_cmp);
    let rank = ((pct / 100.0) * d.len() as f64).ceil().max(1.0) as usize;
    d[rank.min(d.len()) - 1]
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, lattice: bool) -> Vec<Vec3> {
    (0..n)
        .map(|_| {
            if lattice {
                Vec3::new(rng.gen_range(0..6) as f64, rng.gen_range(0..6) as f64, rng.gen_range(0..6) as f64)
            } else {
                Vec3::new(rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0))
            }
        })
        .collect()
}

fn triangle_soup(rng: &mut ChaCha8Rng, n: usize, extent: f64) -> TriangleMesh {
    let mut vertices = Vec::with_capacity(3 * n);
    for _ in 0..n {
        let c = Vec3::new(rng.gen_range(0.0..extent), rng.gen_range(0.0..extent), rng.gen_range(0.0..extent));
        for _ in 0..3 {
            vertices.push(c + Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
    }
    let faces = (0..n as u32).map(|f| [3 * f, 3 * f + 1, 3 * f + 2]).collect();
    TriangleMesh::new(vertices, faces).unwrap()
}

/// Sphere with some vertices pushed through the opposite side.
fn dented_sphere(rng: &mut ChaCha8Rng) -> TriangleMesh {
    let mut m = sphere(Vec3::zeros(), 5.0, 3);
    for _ in 0..rng.gen_range(1..6) {
        let i = rng.gen_range(0..m.vertices.len());
        m.vertices[i] *= rng.gen_range(-1.2..0.3);
    }
    m
}

/// Flat grid plus a copy shifted within its plane: coplanar overlaps.
fn coplanar_pair(rng: &mut ChaCha8Rng) -> (TriangleMesh, TriangleMesh) {
    let n = 8;
    let mut vertices = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Vec3::new(i as f64, j as f64, 0.0));
        }
    }
    let mut faces = Vec::new();
    let idx = |i: u32, j: u32| j * (n + 1) + i;
    for j in 0..n {
        for i in 0..n {
            faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    let a = TriangleMesh::new(vertices, faces).unwrap();
    let b = a.translated(Vec3::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), 0.0));
    (a, b)
}

// 4. Tree-based metrics and BVH queries equal brute force exactly.
fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut cloud_mismatch = Vec::new();
    for trial in 0..100 {
        let lattice = trial % 4 == 0;
        let (np, nq) = (rng.gen_range(1..=2000), rng.gen_range(1..=2000));
        let p = random_cloud(&mut rng, np, lattice);
        let q = random_cloud(&mut rng, nq, lattice);
        let pct = [100.0, 95.0, 90.0, 50.0][trial % 4];
        let (pq, qp) = (brute_nn(&p, &q), brute_nn(&q, &p));
        let ch = pq.iter().sum::<f64>() / np as f64 + qp.iter().sum::<f64>() / nq as f64;
        let sd = (pq.iter().map(|x| x.sqrt()).sum::<f64>() + qp.iter().map(|x| x.sqrt()).sum::<f64>())
            / (np + nq) as f64;
        let directed = |d: &[f64]| {
            let d: Vec<f64> = d.iter().map(|x| x.sqrt()).collect();
            if pct == 100.0 {
                d.into_iter().fold(0.0, f64::max)
            } else {
                brute_percentile(d, pct)
            }
        };
        let hd = directed(&pq).max(directed(&qp));
        let (cp, cq) = (PointCloud::new(p), PointCloud::new(q));
        let got = (
            chamfer(&cp, &cq).unwrap(),
            assd(&cp, &cq).unwrap(),
            hausdorff(&cp, &cq, pct).unwrap(),
        );
        if got != (ch, sd, hd) {
            cloud_mismatch.push(trial);
        }
    }

    let mut bvh_mismatch = Vec::new();
    let mut defects = 0;
    for trial in 0..50 {
        let (self_ok, pair_ok, hit) = match trial % 5 {
            0 => {
                let (nm, no) = (rng.gen_range(10..=2000), rng.gen_range(10..=2000));
                let m = triangle_soup(&mut rng, nm, 20.0);
                let o = triangle_soup(&mut rng, no, 20.0);
                let s = self_intersection_fraction(&m);
                let r = mesh_pair_intersections(&m, &o);
                let hit = s.pairs > 0;
                (s == brute_force::self_intersection_fraction(&m), r == brute_force::mesh_pair_intersections(&m, &o), hit)
            }
            1 => {
                let m = dented_sphere(&mut rng);
                let s = self_intersection_fraction(&m);
                let hit = s.pairs > 0;
                (s == brute_force::self_intersection_fraction(&m), true, hit)
            }
            2 => {
                let a = sphere(Vec3::zeros(), 5.0, 3);
                let b = sphere(Vec3::new(rng.gen_range(4.0..11.0), 0.0, 0.0), rng.gen_range(3.0..6.0), 3);
                let merged = TriangleMesh::merge(&[&a, &b]);
                let s = self_intersection_fraction(&merged);
                let r = mesh_pair_intersections(&a, &b);
                let hit = r.contacts > 0;
                (
                    s == brute_force::self_intersection_fraction(&merged),
                    r == brute_force::mesh_pair_intersections(&a, &b),
                    hit,
                )
            }
            3 => {
                let (a, b) = coplanar_pair(&mut rng);
                let r = mesh_pair_intersections(&a, &b);
                let hit = r.contacts > 0;
                (true, r == brute_force::mesh_pair_intersections(&a, &b), hit)
            }
            _ => {
                let a = icosphere(3).scaled(5.0);
                let b = icosphere(2).scaled(rng.gen_range(2.0..4.0));
                let s = self_intersection_fraction(&a);
                let r = mesh_pair_intersections(&a, &b);
                (s == brute_force::self_intersection_fraction(&a), r == brute_force::mesh_pair_intersections(&a, &b), false)
            }
        };
        defects += hit as usize;
        if !(self_ok && pair_ok) {
            bvh_mismatch.push(trial);
        }
    }
    check(
        cloud_mismatch.is_empty() && bvh_mismatch.is_empty(),
        format!(
            "cloud metrics: {} of 100 trials differ from O(n^2) (up to 2000 points); BVH: {} of 50 trials differ from all-pairs ({defects} with intersections)",
            cloud_mismatch.len(),
            bvh_mismatch.len()
        ),
    )
}

fn sdf_field(n: usize, f: impl Fn(Vec3) -> f64) -> ScalarField {
    let g = GridGeometry::unit([n; 3]);
    VoxelGrid::from_fn(g, |i, j, k| f(g.world(i, j, k)))
}

// 5. Torus and two-ball inputs: every isosurface of a 20-threshold sweep has
// Euler characteristic 2, and a second pass changes nothing.
fn topology_correction() -> Outcome {
    let c = Vec3::repeat(19.5);
    let torus = sdf_field(40, |x| {
        let d = x - c;
        let ring = (d.x * d.x + d.y * d.y).sqrt() - 9.0;
        (ring * ring + d.z * d.z).sqrt() - 3.0
    });
    let balls = sdf_field(40, |x| {
        let a = (x - c - Vec3::new(8.0, 0.0, 0.0)).norm() - 5.0;
        let b = (x - c + Vec3::new(8.0, 0.0, 0.0)).norm() - 5.0;
        a.min(b)
    });
    let mut details = Vec::new();
    let mut ok = true;
    for (name, field) in [("torus", torus), ("two balls", balls)] {
        let r = topology_correct(&field).map_err(|e| e.to_string())?;
        let again = topology_correct(&r.corrected).map_err(|e| e.to_string())?;
        let (lo, _) = r.corrected.min_max();
        // From just above the minimum to well outside the input shape.
        let thresholds: Vec<f64> = (0..20).map(|i| lo + 0.25 + (4.0 - lo - 0.25) * i as f64 / 19.0).collect();
        let chis: Vec<i64> = thresholds
            .iter()
            .map(|&t| marching_cubes(&r.corrected, t).map_or(i64::MIN, |m| diagnostics(&m).euler_characteristic))
            .collect();
        let good = chis.iter().all(|&x| x == 2) && again.modified_voxel_count == 0;
        ok &= good;
        details.push(format!(
            "{name}: {} voxels raised, chi {} over [{:.2}, 4.00], second pass {} voxels",
            r.modified_voxel_count,
            if chis.iter().all(|&x| x == 2) { "2 at all 20".to_string() } else { format!("{chis:?}") },
            thresholds[0],
            again.modified_voxel_count
        ));
    }
    check(ok, details.join("; "))
}

// 6. Sphere of radius 10 on a 1 mm grid: radial error <= 0.6 mm, closed,
// oriented, genus 0.
fn marching_cubes_accuracy() -> Outcome {
    let c = Vec3::new(16.3, 15.8, 16.1);
    let field = sdf_field(33, |x| (x - c).norm() - 10.0);
    let m = marching_cubes(&field, 0.0).map_err(|e| e.to_string())?;
    let err = m.vertices.iter().map(|v| ((v - c).norm() - 10.0).abs()).fold(0.0, f64::max);
    let d = diagnostics(&m);
    check(
        err <= 0.6 && d.is_closed && d.is_oriented && d.genus == Some(0) && m.signed_volume() > 0.0,
        format!(
            "max radial error {err:.4} mm (<= 0.6); closed {}, oriented {}, genus {:?}, {} faces",
            d.is_closed, d.is_oriented, d.genus, d.face_count
        ),
    )
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

// 7. Uniform scaling by s: chamfer and edge loss scale by s², assd and
// hausdorff by s, normal consistency is invariant.
fn metric_scaling_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bumpy = |rng: &mut ChaCha8Rng, r: f64| {
        icosphere(3).map_vertices(|v| v * (r * (1.0 + rng.gen_range(-0.1..0.1))))
    };
    let p = bumpy(&mut rng, 10.0);
    let q = bumpy(&mut rng, 10.5);
    let n = 20_000;
    let measure = |p: &TriangleMesh, q: &TriangleMesh| {
        let a = sample_surface_points(p, n, 1).unwrap();
        let b = sample_surface_points(q, n, 2).unwrap();
        [
            chamfer(&a, &b).unwrap(),
            edge_loss(p).unwrap(),
            assd(&a, &b).unwrap(),
            hausdorff(&a, &b, 100.0).unwrap(),
            hausdorff(&a, &b, 95.0).unwrap(),
            normal_consistency_loss(p).loss,
        ]
    };
    let base = measure(&p, &q);
    let mut worst: f64 = 0.0;
    for s in [0.5, 2.0, 10.0] {
        let got = measure(&p.scaled(s), &q.scaled(s));
        let powers = [2, 2, 1, 1, 1, 0];
        for k in 0..6 {
            worst = worst.max(rel(got[k], base[k] * s.powi(powers[k])));
        }
    }
    check(
        worst <= 1e-9,
        format!("worst relative deviation {worst:.2e} (<= 1e-9) over s in {{0.5, 2, 10}} for chamfer, edge, assd, hausdorff (100/95), normal"),
    )
}

fn pipeline_run(root: &Path) -> Result<(), String> {
    let err = |e: cortisurf::Error| e.to_string();
    let base = PipelineConfig {
        seed: 31,
        ..Default::default()
    };
    cmd_phantom(&PipelineConfig {
        output: root.join("phantom"),
        ..base.clone()
    })
    .map_err(err)?;
    cmd_init_surfaces(&PipelineConfig {
        labels: Some(root.join("phantom").join(LABELS_FILE)),
        output: root.join("init"),
        ..base.clone()
    })
    .map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let svfs = [9usize, 17]
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let h = 64.0 / (n - 1) as f64;
            let g = GridGeometry::new([n; 3], [h; 3], [-0.5; 3]).unwrap();
            let p = root.join(format!("svf{i}.nii.gz"));
            synthetic::band_limited(g, &mut rng, 1.0, 8).save(&p).map(|_| p)
        })
        .collect::<cortisurf::Result<Vec<_>>>()
        .map_err(err)?;
    cmd_deform(&PipelineConfig {
        meshes: Some(root.join("init")),
        svfs,
        output: root.join("deform"),
        ..base.clone()
    })
    .map_err(err)?;
    cmd_metrics(&PipelineConfig {
        meshes: Some(root.join("deform")),
        reference: Some(root.join("init")),
        output: root.join("metrics"),
        ..base
    })
    .map_err(err)?;
    Ok(())
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn manifest_without_run_details(dir: &Path) -> RunManifest {
    let mut m = RunManifest::load(&dir.join(MANIFEST_FILE)).unwrap();
    m.timings.clear();
    m.config.output = Default::default();
    for x in [&mut m.config.labels, &mut m.config.meshes, &mut m.config.reference].into_iter().flatten() {
        *x = x.file_name().unwrap().into();
    }
    for p in &mut m.config.svfs {
        *p = p.file_name().unwrap().into();
    }
    m
}

// 8. Two full runs with the same config and seed give bit-identical mesh
// files and JSON reports.
fn determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    pipeline_run(a.path())?;
    pipeline_run(b.path())?;
    let mut compared = 0;
    let mut differing = Vec::new();
    for stage in ["phantom", "init", "deform", "metrics"] {
        for ((na, fa), (nb, fb)) in files(&a.path().join(stage)).into_iter().zip(files(&b.path().join(stage))) {
            if na == MANIFEST_FILE {
                continue;
            }
            compared += 1;
            if na != nb || fa != fb {
                differing.push(format!("{stage}/{na}"));
            }
        }
        if manifest_without_run_details(&a.path().join(stage)) != manifest_without_run_details(&b.path().join(stage)) {
            differing.push(format!("{stage}/{MANIFEST_FILE}"));
        }
    }
    let meshes: SurfaceSet = load_surface_set(&a.path().join("deform")).map_err(|e| e.to_string())?;
    check(
        differing.is_empty() && compared == 11,
        format!(
            "{compared} mesh/volume/report files bit-identical across two runs, manifests equal up to wall-times and paths; {} deformed surfaces{}",
            meshes.len(),
            if differing.is_empty() { String::new() } else { format!("; differing: {differing:?}") }
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("collision-free initialization", collision_free_initialization),
        ("integration accuracy", integration_accuracy),
        ("diffeomorphism certificate", diffeomorphism_certificate),
        ("oracle equivalence", oracle_equivalence),
        ("topology correction", topology_correction),
        ("marching cubes accuracy", marching_cubes_accuracy),
        ("metric scaling laws", metric_scaling_laws),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {} ({name}): PASS | {d} | {secs:.1} s", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL | {d} | {secs:.1} s", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
