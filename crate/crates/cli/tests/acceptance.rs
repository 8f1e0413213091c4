//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Each check builds its expectation independently of the
//! code under test.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use airguard::channel::{add_noise, fading_coefficients, synthesize_echo, EchoMatrix, FadingModel, Snr, SystemConfig};
use airguard::features::{cmd_spectrum, hrrp_spectrum, FeatureConfig};
use airguard::kinematics::{
    rodrigues_rotate, Attitude, AttitudeJitter, PartMotion, TargetMotionModel, TrajectorySimulator, TrajectorySnapshot,
    WingBounds, WingDirection,
};
use airguard::rng::rng_from_seed;
use airguard::targets::{
    synthesize_bird_cloud, synthesize_uav_cloud, CloudValidation, Part, PartRole, RotationAxis, ScatteringPointCloud,
    TargetClass,
};
use airguard::{Vec3, SPEED_OF_LIGHT};
use num_complex::Complex64;
use rand::Rng;
use sha2::{Digest, Sha256};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn loose() -> CloudValidation {
    CloudValidation { centroid_tolerance: 1.0 }
}

fn static_model(position: Vec3, velocity: Vec3, parts: PartMotion) -> TargetMotionModel {
    TargetMotionModel {
        initial_position: position,
        velocity,
        initial_attitude: Attitude::default(),
        jitter: AttitudeJitter::default(),
        parts,
    }
}

/// A body scatterer plus a non-spinning rotor scatterer at `companion`.
fn point_pair(companion: Vec3) -> ScatteringPointCloud {
    ScatteringPointCloud::with_validation(
        TargetClass::Uav,
        "point pair",
        vec![
            Part::body(vec![Vec3::zeros()]),
            Part::moving(
                PartRole::Rotor,
                vec![companion],
                RotationAxis {
                    a: Vec3::new(0.0, 0.0, 1.0),
                    b: Vec3::zeros(),
                },
            ),
        ],
        &loose(),
    )
    .unwrap()
}

fn still_rotor() -> PartMotion {
    PartMotion::Rotors {
        initial_phase: vec![0.0],
        frequency: vec![0.0],
    }
}

fn echo_of(
    cloud: &ScatteringPointCloud,
    motion: &TargetMotionModel,
    system: &SystemConfig,
    fading: FadingModel,
) -> Result<EchoMatrix, String> {
    let mut system = system.clone();
    system.point_beams_at(&motion.initial_position).map_err(|e| e.to_string())?;
    let sim = TrajectorySimulator::new(cloud, motion, system.n, system.ts, 3).map_err(|e| e.to_string())?;
    let alpha = fading_coefficients(fading, cloud.num_points(), 9);
    synthesize_echo(sim, &alpha, &system).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- criterion 1

/// Direct evaluation of `w^H H x / s` with explicit element sums.
fn brute_force_echo(snaps: &[TrajectorySnapshot], alpha: &[Complex64], cfg: &SystemConfig) -> Vec<Vec<Complex64>> {
    let d = SPEED_OF_LIGHT / (2.0 * cfg.f0);
    let element = |psi: f64, omega: f64, ix: usize, iz: usize| {
        Complex64::cis(2.0 * PI * cfg.f0 * d / SPEED_OF_LIGHT * (psi * ix as f64 + omega * iz as f64))
    };
    let (tx, rx) = (cfg.tx_array, cfg.rx_array);
    let (nh, nr) = ((tx.nx * tx.nz) as f64, (rx.nx * rx.nz) as f64);
    let amp = (cfg.sensing_fraction * cfg.tx_power / nh).sqrt();
    snaps
        .iter()
        .map(|snap| {
            (0..cfg.m)
                .map(|m| {
                    let fm = cfg.f0 + m as f64 * cfg.delta_f;
                    let mut y = Complex64::new(0.0, 0.0);
                    for (p, a) in snap.points.iter().zip(alpha) {
                        let psi = p.theta.cos() * p.phi.cos();
                        let omega = p.phi.sin();
                        let mut rx_gain = Complex64::new(0.0, 0.0);
                        for ix in 0..rx.nx {
                            for iz in 0..rx.nz {
                                let w = element(cfg.rx_beam.psi, cfg.rx_beam.omega, ix, iz) / nr.sqrt();
                                rx_gain += w.conj() * element(psi, omega, ix, iz);
                            }
                        }
                        let mut tx_gain = Complex64::new(0.0, 0.0);
                        for ix in 0..tx.nx {
                            for iz in 0..tx.nz {
                                let x = amp * element(cfg.tx_beam.psi, cfg.tx_beam.omega, ix, iz).conj();
                                tx_gain += element(psi, omega, ix, iz) * x;
                            }
                        }
                        y += a * Complex64::cis(-4.0 * PI * fm * p.r / SPEED_OF_LIGHT) * rx_gain * tx_gain;
                    }
                    y
                })
                .collect()
        })
        .collect()
}

fn uav_motion(cloud: &ScatteringPointCloud, seed: u64) -> TargetMotionModel {
    let mut rng = rng_from_seed(seed);
    let q = cloud.moving_parts().len();
    TargetMotionModel {
        initial_position: Vec3::new(rng.random_range(-20.0..20.0), rng.random_range(40.0..80.0), rng.random_range(5.0..20.0)),
        velocity: Vec3::new(rng.random_range(-5.0..5.0), rng.random_range(-10.0..10.0), rng.random_range(-2.0..2.0)),
        initial_attitude: Attitude::new(rng.random_range(-PI..PI), rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1)),
        jitter: AttitudeJitter {
            mean: [1e-6, -1e-6, 0.0],
            variance: [1e-8, 1e-8, 1e-8],
        },
        parts: PartMotion::Rotors {
            initial_phase: (0..q).map(|_| rng.random_range(0.0..2.0 * PI)).collect(),
            frequency: (0..q).map(|_| rng.random_range(80.0..160.0)).collect(),
        },
    }
}

fn channel_oracle() -> Check {
    let cloud = synthesize_uav_cloud(4, 0.38, 0.12, 1, 5).map_err(|e| e.to_string())?;
    ensure(cloud.num_points() <= 5, || format!("oracle cloud has {} points", cloud.num_points()))?;
    let motion = uav_motion(&cloud, 17);
    let mut cfg = SystemConfig {
        m: 64,
        n: 16,
        ..SystemConfig::desk()
    };
    cfg.point_beams_at(&(motion.initial_position + Vec3::new(0.5, -1.0, 0.3))).unwrap();
    let snaps: Vec<TrajectorySnapshot> = TrajectorySimulator::new(&cloud, &motion, cfg.n, cfg.ts, 2)
        .unwrap()
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let alpha = fading_coefficients(FadingModel::RandomPhase, cloud.num_points(), 4);
    let fast = synthesize_echo(snaps.iter().cloned().map(Ok), &alpha, &cfg).map_err(|e| e.to_string())?;
    let slow = brute_force_echo(&snaps, &alpha, &cfg);
    let peak = slow.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    let err = (0..cfg.n)
        .flat_map(|n| (0..cfg.m).map(move |m| (n, m)))
        .map(|(n, m)| (fast.data[[n, m]] - slow[n][m]).norm())
        .fold(0.0, f64::max)
        / peak;
    ensure(err <= 1e-10, || format!("relative error {err:.3e} > 1e-10"))?;

    let desk = synthesize_uav_cloud(6, 1.1, 0.3, 25, 16).map_err(|e| e.to_string())?;
    ensure(desk.num_points() == 175, || format!("desk cloud has {} points", desk.num_points()))?;
    let motion = uav_motion(&desk, 23);
    let system = SystemConfig::desk();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let echo = pool.install(|| echo_of(&desk, &motion, &system, FadingModel::RandomPhase))?;
    let elapsed = start.elapsed();
    ensure(echo.data.dim() == (2560, 256), || format!("desk echo shape {:?}", echo.data.dim()))?;
    ensure(elapsed < Duration::from_secs(10), || format!("desk synthesis took {elapsed:.2?}"))?;
    Ok(format!(
        "L=5 N=16 M=64 relative error {err:.2e}; desk L=175 N=2560 M=256 single-threaded {elapsed:.2?}"
    ))
}

// ---------------------------------------------------------------- criterion 2

fn doppler_bins() -> Check {
    let system = SystemConfig::desk();
    let cfg = FeatureConfig::desk();
    let bin_speed = SPEED_OF_LIGHT / (2.0 * system.f0 * cfg.n0 as f64 * system.ts);
    let zero_row = cfg.n0 - cfg.n0 / 2;
    let mut seen = Vec::new();
    for v in [-20.0, -10.0, 10.0, 20.0] {
        let k = (2.0 * v * system.f0 / SPEED_OF_LIGHT * cfg.n0 as f64 * system.ts).round();
        let v_on_bin = k * bin_speed;
        // target on the y axis; closing speed v means velocity -v along y
        let motion = static_model(Vec3::new(0.0, 60.0, 0.0), Vec3::new(0.0, -v_on_bin, 0.0), still_rotor());
        let echo = echo_of(&point_pair(Vec3::new(0.0, 0.0, 1e-3)), &motion, &system, FadingModel::Constant)?;
        let spec = cmd_spectrum(&echo, &cfg).map_err(|e| e.to_string())?;
        let summed: Vec<f64> = spec.uncentered.rows().into_iter().map(|r| r.sum()).collect();
        let pre = argmax(&summed) as i64 - zero_row as i64;
        ensure(pre == k as i64, || format!("v_r {v}: pre-centering offset {pre}, expected {k}"))?;
        for g in 0..cfg.g {
            let col: Vec<f64> = spec.matrix.column(g).to_vec();
            let row = argmax(&col);
            ensure(row == cfg.n0 / 2, || format!("v_r {v}: group {g} peak at row {row}, expected {}", cfg.n0 / 2))?;
        }
        seen.push(format!("{v:+}->{pre:+}"));
    }
    Ok(format!("bin offsets {} ; centered peak row {} in every group", seen.join(" "), cfg.n0 / 2))
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

// ---------------------------------------------------------------- criterion 3

fn local_maxima(col: &[f64]) -> Vec<usize> {
    (1..col.len() - 1).filter(|&i| col[i] > col[i - 1] && col[i] >= col[i + 1]).collect()
}

fn hrrp_peaks() -> Check {
    let system = SystemConfig::desk();
    let cfg = FeatureConfig::desk();
    let center = cfg.grid_len().unwrap() / 2;
    let cell = SPEED_OF_LIGHT / (2.0 * system.m as f64 * system.delta_f);
    for r in [30.0, 50.0, 100.0] {
        let r_grid = (r / cell).round() * cell;
        let motion = static_model(Vec3::new(0.0, r_grid, 0.0), Vec3::zeros(), still_rotor());
        let echo = echo_of(&point_pair(Vec3::new(0.0, 0.0, 1e-3)), &motion, &system, FadingModel::Constant)?;
        let h = hrrp_spectrum(&echo, &cfg).map_err(|e| e.to_string())?;
        for g in 0..cfg.g {
            let i = argmax(&h.matrix.column(g).to_vec());
            ensure(i.abs_diff(center) <= 1, || format!("r {r}: group {g} peak at cell {i}, center {center}"))?;
        }
    }

    let wide = SystemConfig {
        m: 4096,
        n: 8,
        ..SystemConfig::desk()
    };
    let few = FeatureConfig { n0: 4, g: 2, ..cfg };
    let cell = SPEED_OF_LIGHT / (2.0 * wide.m as f64 * wide.delta_f);
    let r1 = (50.0 / cell).round() * cell;
    let motion = static_model(Vec3::new(0.0, r1, 0.0), Vec3::zeros(), still_rotor());
    let echo = echo_of(&point_pair(Vec3::new(0.0, 0.5, 0.0)), &motion, &wide, FadingModel::Constant)?;
    let h = hrrp_spectrum(&echo, &few).map_err(|e| e.to_string())?;
    let mut gaps = Vec::new();
    for g in 0..few.g {
        let col = h.matrix.column(g).to_vec();
        let mut peaks = local_maxima(&col);
        peaks.sort_by(|&a, &b| col[b].total_cmp(&col[a]));
        ensure(peaks.len() >= 2, || format!("group {g}: fewer than two maxima"))?;
        let gap = peaks[0].abs_diff(peaks[1]);
        ensure(gap.abs_diff(50) <= 1, || format!("group {g}: maxima {} cells apart", gap))?;
        gaps.push(gap);
    }
    Ok(format!(
        "single point at 30/50/100 m peaks within 1 cell of {center}; 0.5 m pair (M=4096) maxima {gaps:?} cells apart"
    ))
}

// ---------------------------------------------------------------- criterion 4

/// Largest distance from the center row of any cell at or above half of its
/// group's maximum, over all groups.
fn support_half_width(matrix: &ndarray::Array2<f64>) -> usize {
    let center = matrix.nrows() / 2;
    let mut widest = 0;
    for col in matrix.columns() {
        let peak = col.iter().copied().fold(0.0, f64::max);
        for (row, &v) in col.iter().enumerate() {
            if v >= 0.5 * peak {
                widest = widest.max(row.abs_diff(center));
            }
        }
    }
    widest
}

fn micro_motion() -> Check {
    let system = SystemConfig::desk();
    let cfg = FeatureConfig::desk();
    let (rho, f_paddle, f_wing) = (0.1, 50.0, 4.0);
    let position = Vec3::new(0.0, 60.0, 0.0);

    let paddle = ScatteringPointCloud::with_validation(
        TargetClass::Uav,
        "one paddle",
        vec![
            Part::body(vec![Vec3::zeros()]),
            Part::moving(
                PartRole::Rotor,
                vec![Vec3::new(rho, 0.0, 0.0)],
                RotationAxis {
                    a: Vec3::new(0.0, 0.0, 1.0),
                    b: Vec3::zeros(),
                },
            ),
        ],
        &loose(),
    )
    .map_err(|e| e.to_string())?;
    let motion = static_model(
        position,
        Vec3::zeros(),
        PartMotion::Rotors {
            initial_phase: vec![0.0],
            frequency: vec![f_paddle],
        },
    );
    let uav = cmd_spectrum(&echo_of(&paddle, &motion, &system, FadingModel::Constant)?, &cfg).map_err(|e| e.to_string())?;
    let uav_width = support_half_width(&uav.matrix);
    let bound = 2.0 * (2.0 * PI * f_paddle * rho) * system.f0 / SPEED_OF_LIGHT * cfg.n0 as f64 * system.ts;
    ensure((uav_width as f64 - bound).abs() <= 1.0, || {
        format!("paddle support half-width {uav_width} bins, tip bound {bound:.2} bins")
    })?;

    let x_axis = RotationAxis {
        a: Vec3::new(1.0, 0.0, 0.0),
        b: Vec3::zeros(),
    };
    let wing = ScatteringPointCloud::with_validation(
        TargetClass::Bird,
        "one wing point",
        vec![
            Part::body(vec![Vec3::zeros()]),
            Part::moving(PartRole::Wing, vec![Vec3::new(0.0, 0.0, rho)], x_axis),
            Part::moving(PartRole::Wing, vec![Vec3::new(0.02, 0.0, rho)], x_axis),
        ],
        &loose(),
    )
    .map_err(|e| e.to_string())?;
    let motion = static_model(
        position,
        Vec3::zeros(),
        PartMotion::Wings {
            initial_phase: 0.0,
            frequency: f_wing,
            bounds: WingBounds::new(-1.0, 1.0).unwrap(),
            initial_direction: WingDirection::Up,
        },
    );
    let bird = cmd_spectrum(&echo_of(&wing, &motion, &system, FadingModel::Constant)?, &cfg).map_err(|e| e.to_string())?;
    let bird_width = support_half_width(&bird.matrix);
    ensure(bird_width < uav_width, || format!("wing support {bird_width} not narrower than paddle {uav_width}"))?;
    Ok(format!(
        "paddle half-width {uav_width} bins vs tip bound {bound:.2}; wing half-width {bird_width} bins"
    ))
}

// ---------------------------------------------------------------- criterion 5

fn world_frames(cloud: &ScatteringPointCloud, motion: &TargetMotionModel, n: usize, ts: f64, seed: u64) -> Result<Vec<Vec<Vec3>>, String> {
    let mut sim = TrajectorySimulator::new(cloud, motion, n, ts, seed).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(n);
    while let Some(step) = sim.next_cartesian() {
        out.push(step.map_err(|e| e.to_string())?.1);
    }
    Ok(out)
}

fn part_ranges(cloud: &ScatteringPointCloud) -> Vec<std::ops::Range<usize>> {
    let mut start = 0;
    cloud
        .parts()
        .iter()
        .map(|p| {
            let r = start..start + p.points.len();
            start = r.end;
            r
        })
        .collect()
}

fn rigidity() -> Result<f64, String> {
    let cloud = synthesize_uav_cloud(4, 0.38, 0.12, 5, 8).map_err(|e| e.to_string())?;
    let body: Vec<Vec3> = cloud.points().copied().collect();
    let motion = uav_motion(&cloud, 31);
    let mut sim = TrajectorySimulator::new(&cloud, &motion, 10_000, 1e-5, 6).map_err(|e| e.to_string())?;
    let ranges = part_ranges(&cloud);
    let mut worst: f64 = 0.0;
    while let Some(step) = sim.next_cartesian() {
        let (_, pts) = step.map_err(|e| e.to_string())?;
        for r in &ranges {
            for i in r.clone() {
                for j in i + 1..r.end {
                    worst = worst.max(((pts[i] - pts[j]).norm() - (body[i] - body[j]).norm()).abs());
                }
            }
        }
    }
    ensure(worst <= 1e-9, || format!("rigid distance drift {worst:.3e} m"))?;
    Ok(worst)
}

/// Signed rotation of `p` relative to `p0` about the line through `a` along `dir`.
fn angle_about(p0: &Vec3, p: &Vec3, a: &Vec3, dir: &Vec3) -> f64 {
    let radial = |q: &Vec3| {
        let v = q - a;
        v - dir * v.dot(dir)
    };
    let (v0, v) = (radial(p0), radial(p));
    dir.dot(&v0.cross(&v)).atan2(v0.dot(&v))
}

fn wing_angles(cloud: &ScatteringPointCloud, motion: &TargetMotionModel, n: usize, ts: f64) -> Result<Vec<f64>, String> {
    let ranges = part_ranges(cloud);
    let wing = &cloud.moving_parts()[0];
    let axis = wing.axis.unwrap();
    let dir = axis.direction();
    // the wing point farthest from its axis
    let k = (0..wing.points.len())
        .max_by(|&i, &j| {
            let d = |q: &Vec3| (q - axis.a).cross(&dir).norm();
            d(&wing.points[i]).total_cmp(&d(&wing.points[j]))
        })
        .unwrap();
    let p0 = wing.points[k];
    let frames = world_frames(cloud, motion, n, ts, 0)?;
    Ok(frames
        .iter()
        .enumerate()
        .map(|(i, pts)| {
            let shift = motion.initial_position + motion.velocity * (i as f64 * ts);
            angle_about(&p0, &(pts[ranges[1].start + k] - shift), &axis.a, &dir)
        })
        .collect())
}

fn bird_model(initial_phase: f64, frequency: f64, bounds: WingBounds, dir: WingDirection) -> TargetMotionModel {
    static_model(
        Vec3::new(3.0, 70.0, 8.0),
        Vec3::new(1.0, -2.0, 0.5),
        PartMotion::Wings {
            initial_phase,
            frequency,
            bounds,
            initial_direction: dir,
        },
    )
}

fn wing_containment() -> Result<usize, String> {
    let cloud = synthesize_bird_cloud(0.4, 0.9, 4, 2).map_err(|e| e.to_string())?;
    for seed in 0..100 {
        let mut rng = rng_from_seed(1000 + seed);
        let lo = rng.random_range(-1.2..-0.1);
        let hi = rng.random_range(0.1..1.2);
        let bounds = WingBounds::new(lo, hi).unwrap();
        let start = rng.random_range(lo..=hi);
        let freq = rng.random_range(2.0..15.0);
        let dir = if rng.random::<bool>() { WingDirection::Up } else { WingDirection::Down };
        let angles = wing_angles(&cloud, &bird_model(start, freq, bounds, dir), 2560, 1e-4)?;
        // reversal reacts to a bound crossing one step late
        let step = 2.0 * (hi - lo) * freq * 1e-4;
        for (n, b) in angles.iter().enumerate() {
            ensure(*b >= lo - step - 1e-9 && *b <= hi + step + 1e-9, || {
                format!("seed {seed}: wing angle {b} at symbol {n} leaves [{lo}, {hi}] by more than one step")
            })?;
        }
    }
    Ok(100)
}

fn rodrigues_vs_matrix() -> Result<f64, String> {
    let mut rng = rng_from_seed(77);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let mut v = || Vec3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let (p, a, mut dir) = (v(), v(), v());
        if dir.norm() < 1e-3 {
            dir = Vec3::x();
        }
        let angle = rng.random_range(-2.0 * PI..2.0 * PI);
        let rot = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(dir), angle);
        let expect = a + rot * (p - a);
        let got = rodrigues_rotate(&p, &a, &dir.normalize(), angle).map_err(|e| e.to_string())?;
        worst = worst.max((got - expect).norm());
    }
    ensure(worst <= 1e-12, || format!("Rodrigues differs from the rotation matrix by {worst:.3e} m"))?;
    Ok(worst)
}

/// Frequency of the largest DFT magnitude of `x` (mean removed) on a grid.
fn dominant_frequency(x: &[f64], ts: f64, lo: f64, hi: f64, step: f64) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let mut best = (lo, 0.0);
    let mut f = lo;
    while f <= hi {
        let rot = Complex64::cis(-2.0 * PI * f * ts);
        let mut z = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, v) in x.iter().enumerate() {
            if n % 1024 == 0 {
                z = Complex64::cis(-2.0 * PI * f * ts * n as f64);
            }
            acc += z * (v - mean);
            z *= rot;
        }
        if acc.norm() > best.1 {
            best = (f, acc.norm());
        }
        f += step;
    }
    best.0
}

fn triangle_fundamental() -> Result<String, String> {
    let cloud = synthesize_bird_cloud(0.4, 0.9, 2, 3).map_err(|e| e.to_string())?;
    let mut found = Vec::new();
    for f_b in [4.0, 7.3] {
        let ts = 1e-4;
        let model = bird_model(0.0, f_b, WingBounds::new(-0.6, 0.8).unwrap(), WingDirection::Up);
        let angles = wing_angles(&cloud, &model, 100_000, ts)?;
        let est = dominant_frequency(&angles, ts, 0.5 * f_b, 1.5 * f_b, 0.005);
        ensure((est - f_b).abs() <= 0.02 * f_b, || format!("fundamental {est} Hz for F_B {f_b} Hz"))?;
        found.push(format!("{f_b}->{est:.3}"));
    }
    Ok(found.join(" "))
}

fn kinematics() -> Check {
    let drift = rigidity()?;
    let seeds = wing_containment()?;
    let rod = rodrigues_vs_matrix()?;
    let tri = triangle_fundamental()?;
    Ok(format!(
        "rigid drift {drift:.1e} m over 1e4 symbols; wing bounds held for {seeds} seeds; Rodrigues vs matrix {rod:.1e} m; fundamental Hz {tri}"
    ))
}

// ---------------------------------------------------------------- criterion 6

fn snr_calibration() -> Check {
    let cloud = synthesize_uav_cloud(6, 1.1, 0.3, 25, 16).map_err(|e| e.to_string())?;
    let clean = echo_of(&cloud, &uav_motion(&cloud, 5), &SystemConfig::desk(), FadingModel::RandomPhase)?;
    let count = clean.data.len() as f64;
    let power = clean.data.iter().map(|z| z.norm_sqr()).sum::<f64>() / count;
    let mut worst: f64 = 0.0;
    for snr in [-10.0, 0.0, 10.0] {
        let sigma2 = power / 10f64.powf(snr / 10.0);
        for seed in 0..50 {
            let noisy = add_noise(&clean, Snr::Db(snr), seed).map_err(|e| e.to_string())?;
            let var = noisy.data.iter().zip(clean.data.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() / count;
            let rel = (var / sigma2 - 1.0).abs();
            worst = worst.max(rel);
            ensure(rel <= 0.05, || format!("SNR {snr} dB seed {seed}: variance off by {:.2}%", 100.0 * rel))?;
            let meta = (noisy.meta.noise_variance / sigma2 - 1.0).abs();
            ensure(meta <= 1e-9, || format!("SNR {snr} dB: recorded variance off by {meta:.2e}"))?;
        }
    }
    Ok(format!("150 realizations, worst variance deviation {:.3}%", 100.0 * worst))
}

// ---------------------------------------------------------------- criterion 7

fn tree_digest(root: &Path) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
                out.insert(rel, hex);
            }
        }
    }
    Ok(out)
}

fn png_size(path: &Path) -> Result<(u32, u32), String> {
    let bytes = std::fs::read(path).map_err(|e| e.to_string())?;
    ensure(bytes.len() > 24 && &bytes[1..4] == b"PNG", || format!("{} is not a PNG", path.display()))?;
    let be = |i: usize| u32::from_be_bytes(bytes[i..i + 4].try_into().unwrap());
    Ok((be(16), be(20)))
}

fn reproducibility() -> Check {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/desk_run.json");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut times = Vec::new();
    for (dir, jobs) in dirs.iter().zip(["1", "3"]) {
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_airguard"))
            .args(["--quiet", "dataset", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(dir.path())
            .args(["--jobs", jobs])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("dataset run failed: {}", String::from_utf8_lossy(&out.stderr)))?;
        times.push(start.elapsed());
    }
    let a = tree_digest(dirs[0].path())?;
    let b = tree_digest(dirs[1].path())?;
    ensure(a == b, || "the two runs differ".into())?;
    let pngs: Vec<&String> = a.keys().filter(|k| k.ends_with(".png")).collect();
    ensure(pngs.len() == 120, || format!("{} images, expected 120", pngs.len()))?;
    for p in &pngs {
        let size = png_size(&dirs[0].path().join(p))?;
        ensure(size == (256, 512), || format!("{p} is {size:?}"))?;
    }
    let manifest = std::fs::read_to_string(dirs[0].path().join("manifest.jsonl")).map_err(|e| e.to_string())?;
    ensure(manifest.lines().count() == 120, || "manifest does not have 120 lines".into())?;
    let slowest = times.iter().max().unwrap();
    ensure(*slowest < Duration::from_secs(300), || format!("run took {slowest:.1?}"))?;
    Ok(format!(
        "120 images + manifest, byte-identical across runs with 1 and 3 workers; run times {:.1?} / {:.1?}",
        times[0], times[1]
    ))
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 7] = [
        ("channel oracle equivalence", channel_oracle),
        ("Doppler bin placement", doppler_bins),
        ("HRRP peak placement", hrrp_peaks),
        ("micro-motion signature", micro_motion),
        ("kinematics invariants", kinematics),
        ("SNR calibration", snr_calibration),
        ("end-to-end reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name} ({took:.1?}): {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL [{}] {name} ({took:.1?}): {reason}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
