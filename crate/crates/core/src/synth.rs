//! Physics-based synthetic trace generation.
//!
//! Builds labeled traces end to end: a jittered grid of towers, a
//! mode-specific mobility path (fixed point or random waypoint), log-distance
//! path loss with distance-correlated log-normal shadowing, and
//! strongest-server cell selection with a handoff hysteresis margin.
//! Everything is a pure function of its inputs and seed, so a (seed, params)
//! pair always produces byte-identical trace files.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::trace::{CellId, Mode, Sample, Segment, Trace};

/// Emitted RSS is clamped to the GSM RXLEV-style reporting range, dBm.
pub const RSS_FLOOR_DBM: f64 = -113.0;
pub const RSS_CEIL_DBM: f64 = -51.0;

/// Log-distance path loss with shadowing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossParams {
    /// Received power at the reference distance, dBm.
    pub p0_dbm: f64,
    /// Reference distance, meters.
    pub d0_m: f64,
    /// Path loss exponent.
    pub alpha: f64,
    /// Log-normal shadowing standard deviation, dB.
    pub shadow_sigma_db: f64,
    /// Distance over which shadowing decorrelates, meters.
    pub decorrelation_m: f64,
}

impl Default for PathLossParams {
    fn default() -> Self {
        PathLossParams {
            p0_dbm: -40.0,
            d0_m: 1.0,
            alpha: 3.0,
            shadow_sigma_db: 6.0,
            decorrelation_m: 50.0,
        }
    }
}

/// A transmitter with a unique cell ID at a planar position.
#[derive(Debug, Clone, PartialEq)]
pub struct Tower {
    pub cell_id: CellId,
    pub x_m: f64,
    pub y_m: f64,
}

/// The set of towers a simulation runs against.
#[derive(Debug, Clone, PartialEq)]
pub struct TowerField {
    pub towers: Vec<Tower>,
}

/// Speed envelope for a transportation mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityProfile {
    pub mode: Mode,
    /// Per-leg speeds are drawn uniformly from this range, km/h.
    pub speed_range_kmh: (f64, f64),
}

impl MobilityProfile {
    /// Canonical speed envelopes: stationary pins the phone, walking moves
    /// at 3-6 km/h, driving at free-running 40-100 km/h.
    pub fn for_mode(mode: Mode) -> Self {
        let speed_range_kmh = match mode {
            Mode::Stationary => (0.0, 0.0),
            Mode::Walking => (3.0, 6.0),
            Mode::Driving => (40.0, 100.0),
        };
        MobilityProfile {
            mode,
            speed_range_kmh,
        }
    }
}

/// One 1 Hz position fix along a mobility path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub t_s: u32,
    pub x_m: f64,
    pub y_m: f64,
}

/// A mobility path plus the mode that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct MobilityPath {
    pub mode: Mode,
    pub points: Vec<PathPoint>,
}

/// Synthetic generation failure.
#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("invalid geometry: {0}")]
    BadGeometry(String),
    #[error("simulation needs a non-empty path and at least one tower")]
    EmptyInput,
}

/// Lays a square grid of towers at `spacing_m` pitch over a square extent,
/// jittering each tower by up to `jitter_frac * spacing_m` per axis.
pub fn generate_towers(
    extent_m: f64,
    spacing_m: f64,
    jitter_frac: f64,
    seed: u64,
) -> Result<TowerField, SynthError> {
    if !(extent_m > spacing_m && spacing_m > 0.0) {
        return Err(SynthError::BadGeometry(format!(
            "need extent > spacing > 0, got extent {extent_m} m, spacing {spacing_m} m"
        )));
    }
    if !(0.0..0.5).contains(&jitter_frac) {
        return Err(SynthError::BadGeometry(format!(
            "jitter fraction must be in [0, 0.5), got {jitter_frac}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_axis = (extent_m / spacing_m).floor() as u64 + 1;
    let max_jitter = jitter_frac * spacing_m;
    let mut towers = Vec::with_capacity((per_axis * per_axis) as usize);
    for row in 0..per_axis {
        for col in 0..per_axis {
            let jx = if max_jitter > 0.0 {
                rng.random_range(-max_jitter..=max_jitter)
            } else {
                0.0
            };
            let jy = if max_jitter > 0.0 {
                rng.random_range(-max_jitter..=max_jitter)
            } else {
                0.0
            };
            towers.push(Tower {
                cell_id: CellId::from(row * per_axis + col + 1),
                x_m: col as f64 * spacing_m + jx,
                y_m: row as f64 * spacing_m + jy,
            });
        }
    }
    Ok(TowerField { towers })
}

/// Generates 1 Hz positions for `duration_s` seconds inside a square extent.
///
/// Stationary paths pin a uniformly drawn point. Moving paths follow the
/// random-waypoint model: draw a waypoint uniformly in the extent, travel
/// toward it at a per-leg speed drawn uniformly from the profile's range,
/// and continue with a fresh waypoint and speed on arrival, carrying any
/// remaining fraction of the second into the new leg.
pub fn generate_path(
    profile: &MobilityProfile,
    duration_s: u32,
    extent_m: f64,
    seed: u64,
) -> MobilityPath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw_point = |rng: &mut ChaCha8Rng| -> (f64, f64) {
        (
            rng.random_range(0.0..extent_m),
            rng.random_range(0.0..extent_m),
        )
    };

    let (mut x, mut y) = draw_point(&mut rng);
    let mut points = Vec::with_capacity(duration_s as usize);
    points.push(PathPoint { t_s: 0, x_m: x, y_m: y });

    let (min_kmh, max_kmh) = profile.speed_range_kmh;
    if max_kmh <= 0.0 {
        for t in 1..duration_s {
            points.push(PathPoint { t_s: t, x_m: x, y_m: y });
        }
        return MobilityPath {
            mode: profile.mode,
            points,
        };
    }

    let draw_speed = |rng: &mut ChaCha8Rng| -> f64 {
        if min_kmh == max_kmh {
            min_kmh / 3.6
        } else {
            rng.random_range(min_kmh..max_kmh) / 3.6
        }
    };
    let (mut wx, mut wy) = draw_point(&mut rng);
    let mut speed = draw_speed(&mut rng);

    for t in 1..duration_s {
        let mut time_left = 1.0f64;
        // A second may span a waypoint arrival; the leftover time moves
        // along the next leg so every second covers a full speed * 1 s of
        // travel (the sampled displacement can still be shorter at turns).
        while time_left > 1e-12 {
            let dx = wx - x;
            let dy = wy - y;
            let distance = dx.hypot(dy);
            let step = speed * time_left;
            if step < distance {
                x += dx / distance * step;
                y += dy / distance * step;
                time_left = 0.0;
            } else {
                x = wx;
                y = wy;
                if speed > 0.0 && distance > 0.0 {
                    time_left -= distance / speed;
                }
                (wx, wy) = draw_point(&mut rng);
                speed = draw_speed(&mut rng);
                if (wx - x).hypot(wy - y) < 1e-9 {
                    // Degenerate waypoint on top of us; spend the rest of
                    // the second in place rather than looping.
                    time_left = 0.0;
                }
            }
        }
        x = x.clamp(0.0, extent_m);
        y = y.clamp(0.0, extent_m);
        points.push(PathPoint { t_s: t, x_m: x, y_m: y });
    }
    MobilityPath {
        mode: profile.mode,
        points,
    }
}

/// Received power before shadowing at `distance_m` from a transmitter:
/// `p0 - 10 * alpha * log10(d / d0)`. Distances below `d0` clamp to `d0`.
pub fn path_loss_dbm(distance_m: f64, params: &PathLossParams) -> f64 {
    let d = distance_m.max(params.d0_m);
    params.p0_dbm - 10.0 * params.alpha * (d / params.d0_m).log10()
}

/// Simulates the serving-cell trace seen along a path.
///
/// Per position and tower, RSS is path loss plus a per-tower AR(1)
/// shadowing process with stationary variance `shadow_sigma_db^2` and step
/// correlation `exp(-moved_m / decorrelation_m)`. The serving cell starts
/// as the strongest tower and hands off only when another tower's raw RSS
/// exceeds the current server's by at least `hysteresis_db`. Emitted RSS is
/// the serving tower's, rounded to integer dBm and clamped to [-113, -51];
/// the trace carries one ground-truth segment with the path's mode.
pub fn simulate_trace(
    path: &MobilityPath,
    towers: &TowerField,
    params: &PathLossParams,
    hysteresis_db: f64,
    seed: u64,
) -> Result<Trace, SynthError> {
    if path.points.is_empty() || towers.towers.is_empty() {
        return Err(SynthError::EmptyInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = params.shadow_sigma_db;
    let mut shadows: Vec<f64> = (0..towers.towers.len())
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();

    let mut samples = Vec::with_capacity(path.points.len());
    let mut serving = 0usize;
    let mut previous: Option<PathPoint> = None;

    for point in &path.points {
        if let Some(prev) = previous {
            let moved = (point.x_m - prev.x_m).hypot(point.y_m - prev.y_m);
            let rho = (-moved / params.decorrelation_m).exp();
            let innovation = sigma * (1.0 - rho * rho).max(0.0).sqrt();
            for shadow in &mut shadows {
                let noise: f64 = rng.sample(StandardNormal);
                *shadow = rho * *shadow + innovation * noise;
            }
        }

        let rss_at = |i: usize| {
            let tower = &towers.towers[i];
            let distance = (point.x_m - tower.x_m).hypot(point.y_m - tower.y_m);
            path_loss_dbm(distance, params) + shadows[i]
        };

        let mut best = 0usize;
        let mut best_rss = rss_at(0);
        for i in 1..towers.towers.len() {
            let rss = rss_at(i);
            if rss > best_rss {
                best = i;
                best_rss = rss;
            }
        }
        let first_sample = previous.is_none();
        if first_sample || (best != serving && best_rss >= rss_at(serving) + hysteresis_db) {
            serving = best;
        }

        let reported = rss_at(serving).round().clamp(RSS_FLOOR_DBM, RSS_CEIL_DBM);
        samples.push(Sample::new(
            point.t_s as i64 * 1000,
            towers.towers[serving].cell_id.clone(),
            reported,
        ));
        previous = Some(*point);
    }

    let segment = Segment::new(
        samples.first().expect("non-empty").timestamp_ms,
        samples.last().expect("non-empty").timestamp_ms,
        path.mode,
    );
    Ok(Trace::new(samples, vec![segment]))
}

/// Configuration for a whole labeled dataset: N traces per mode over one
/// shared tower field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteParams {
    pub traces_per_mode: usize,
    pub duration_s: u32,
    pub extent_m: f64,
    pub spacing_m: f64,
    pub jitter_frac: f64,
    pub hysteresis_db: f64,
    pub path_loss: PathLossParams,
    pub seed: u64,
}

impl Default for SuiteParams {
    /// A 3x3 tower cluster jittered hard enough to create tight boundary
    /// pairs and a weak-coverage fringe, which is where walking and driving
    /// windows genuinely overlap.
    fn default() -> Self {
        SuiteParams {
            traces_per_mode: 30,
            duration_s: 600,
            extent_m: 1200.0,
            spacing_m: 500.0,
            jitter_frac: 0.4,
            hysteresis_db: 4.0,
            path_loss: PathLossParams::default(),
            seed: 42,
        }
    }
}

/// Generates one labeled trace: a tower field plus a single path and
/// simulation, all derived from `params.seed`.
pub fn generate_trace(params: &SuiteParams, mode: Mode) -> Result<Trace, SynthError> {
    let mut master = ChaCha8Rng::seed_from_u64(params.seed);
    let tower_seed = master.random::<u64>();
    let towers = generate_towers(
        params.extent_m,
        params.spacing_m,
        params.jitter_frac,
        tower_seed,
    )?;
    let path_seed = master.random::<u64>();
    let sim_seed = master.random::<u64>();
    let path = generate_path(
        &MobilityProfile::for_mode(mode),
        params.duration_s,
        params.extent_m,
        path_seed,
    );
    simulate_trace(&path, &towers, &params.path_loss, params.hysteresis_db, sim_seed)
}

/// Generates the benchmark dataset: one tower field, then
/// `traces_per_mode` labeled traces for each mode in canonical order.
///
/// Per-trace seeds are drawn from a master stream keyed on `seed`, so the
/// whole suite is reproducible from a single number.
pub fn generate_suite(params: &SuiteParams) -> Result<Vec<Trace>, SynthError> {
    let mut master = ChaCha8Rng::seed_from_u64(params.seed);
    let tower_seed = master.random::<u64>();
    let towers = generate_towers(
        params.extent_m,
        params.spacing_m,
        params.jitter_frac,
        tower_seed,
    )?;

    let mut traces = Vec::with_capacity(3 * params.traces_per_mode);
    for mode in Mode::ALL {
        let profile = MobilityProfile::for_mode(mode);
        for _ in 0..params.traces_per_mode {
            let path_seed = master.random::<u64>();
            let sim_seed = master.random::<u64>();
            let path = generate_path(&profile, params.duration_s, params.extent_m, path_seed);
            traces.push(simulate_trace(
                &path,
                &towers,
                &params.path_loss,
                params.hysteresis_db,
                sim_seed,
            )?);
        }
    }
    Ok(traces)
}
