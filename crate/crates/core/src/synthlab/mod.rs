//! Deterministic synthetic scenes standing in for real recordings, plus
//! brute-force oracles for the metrics.
//!
//! Objects are drawn at intensity 200 on black with hard, anti-aliasing-free
//! rasterization. Geometry is evaluated in closed form per frame and snapped to a
//! 1/256 px fixed-point grid before any inside/outside test, so renders are
//! bit-reproducible. Take 2 re-renders the scene with seeded jitter on the initial
//! position (up to 2 px) and on every rate parameter (up to 5 %), both scaled by
//! `noise_amplitude`.

pub mod oracle;

use std::fmt;
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bench::{Category, Dataset, Perspective, ScenarioRecord, Take};
use crate::error::{Error, Result};
use crate::frameseq::{save_sequence_tagged, Frame, FrameSequence, SplitSpec};
use crate::motionmask::{MaskVideo, MotionMap};

pub use oracle::{
    oracle_map_metrics, oracle_mask_metrics, oracle_mse, ORACLE_MAX_FRAMES, ORACLE_MAX_SIDE,
};

pub const OBJECT_INTENSITY: u8 = 200;
const FIXED_ONE: i64 = 256;
const ROD_HALF_WIDTH: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    TranslatingSquare,
    FallingBall,
    Pendulum,
    DiffusingBlob,
    Static,
}

impl SynthKind {
    pub const ALL: [SynthKind; 5] = [
        SynthKind::TranslatingSquare,
        SynthKind::FallingBall,
        SynthKind::Pendulum,
        SynthKind::DiffusingBlob,
        SynthKind::Static,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SynthKind::TranslatingSquare => "translating-square",
            SynthKind::FallingBall => "falling-ball",
            SynthKind::Pendulum => "pendulum",
            SynthKind::DiffusingBlob => "diffusing-blob",
            SynthKind::Static => "static",
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidSynth(format!("unknown kind {s:?}")))
    }
}

/// A synthetic scene. Lengths are in pixels and rates are per frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub duration: f64,
    pub fps: f64,
    pub width: u32,
    pub height: u32,
    /// Square side, ball/bob diameter, or initial blob diameter.
    pub object_size: u32,
    /// Object centre at frame 0; the pivot for a pendulum.
    pub position: (f64, f64),
    pub velocity: (f64, f64),
    /// Downward acceleration, px/frame².
    pub gravity: f64,
    pub pendulum_length: f64,
    /// Peak swing angle in radians.
    pub amplitude: f64,
    /// Swing angular frequency, rad/frame.
    pub angular_frequency: f64,
    /// Blob radius growth, px/frame.
    pub growth: f64,
    pub noise_seed: u64,
    /// Take-2 perturbation scale in [0, 1]; 0 makes both takes identical.
    pub noise_amplitude: f64,
}

impl SynthSpec {
    fn base(kind: SynthKind) -> Self {
        Self {
            kind,
            duration: 8.0,
            fps: 8.0,
            width: 64,
            height: 64,
            object_size: 12,
            position: (32.0, 32.0),
            velocity: (0.0, 0.0),
            gravity: 0.0,
            pendulum_length: 0.0,
            amplitude: 0.0,
            angular_frequency: 0.0,
            growth: 0.0,
            noise_seed: 0,
            noise_amplitude: 0.0,
        }
    }

    /// 8 s at 8 fps on a 64x64 field, tuned per kind so every take stays inside the frame.
    pub fn preset(kind: SynthKind) -> Self {
        let base = Self::base(kind);
        match kind {
            SynthKind::TranslatingSquare => Self {
                object_size: 16,
                position: (11.0, 32.0),
                velocity: (0.625, 0.0),
                ..base
            },
            SynthKind::FallingBall => Self {
                object_size: 12,
                position: (32.0, 8.0),
                gravity: 0.02,
                ..base
            },
            SynthKind::Pendulum => Self {
                object_size: 10,
                position: (32.0, 6.0),
                pendulum_length: 36.0,
                amplitude: 0.6,
                angular_frequency: std::f64::consts::TAU / 32.0,
                ..base
            },
            SynthKind::DiffusingBlob => Self {
                object_size: 8,
                growth: 0.3,
                ..base
            },
            SynthKind::Static => base,
        }
    }

    pub fn with_noise(self, seed: u64, amplitude: f64) -> Self {
        Self {
            noise_seed: seed,
            noise_amplitude: amplitude,
            ..self
        }
    }

    pub fn frame_count(&self) -> usize {
        (self.duration * self.fps).round() as usize
    }

    /// The standard split applied to this scene's frame rate.
    pub fn split(&self) -> SplitSpec {
        SplitSpec::standard(self.fps)
    }

    /// Frame indices of the 5 s test segment.
    pub fn test_range(&self) -> Result<Range<usize>> {
        let split = self.split();
        let start = split.switch_index + 1;
        let end = start + split.test_len(self.fps);
        if end > self.frame_count() {
            return Err(Error::InvalidSynth(format!(
                "{} s at {} fps is too short for a 3 s + 5 s split",
                self.duration, self.fps
            )));
        }
        Ok(start..end)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSynth(m));
        if self.width == 0 || self.height == 0 {
            return bad(format!("zero-sized field {}x{}", self.width, self.height));
        }
        if !(self.fps.is_finite() && self.fps > 0.0)
            || !(self.duration.is_finite() && self.duration > 0.0)
        {
            return bad(format!(
                "invalid timing {} s at {} fps",
                self.duration, self.fps
            ));
        }
        if self.frame_count() == 0 {
            return bad("scene has no frames".into());
        }
        if self.object_size == 0 {
            return bad("object_size must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.noise_amplitude) {
            return bad(format!(
                "noise_amplitude {} outside [0, 1]",
                self.noise_amplitude
            ));
        }
        let finite = [
            self.position.0,
            self.position.1,
            self.velocity.0,
            self.velocity.1,
            self.gravity,
            self.pendulum_length,
            self.amplitude,
            self.angular_frequency,
            self.growth,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("non-finite scene parameter".into());
        }
        Ok(())
    }

    /// Applies the take-2 perturbation. Take 1 is returned unchanged.
    pub fn for_take(&self, take: Take) -> Self {
        if take == Take::One {
            return *self;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.noise_seed);
        let a = self.noise_amplitude;
        let mut jitter = |scale: f64| rng.random_range(-1.0..=1.0) * scale * a;
        let dx = jitter(2.0);
        let dy = jitter(2.0);
        let mut rate = [0.0; 5];
        for r in &mut rate {
            *r = 1.0 + jitter(0.05);
        }
        Self {
            position: (self.position.0 + dx, self.position.1 + dy),
            velocity: (self.velocity.0 * rate[0], self.velocity.1 * rate[0]),
            gravity: self.gravity * rate[1],
            angular_frequency: self.angular_frequency * rate[2],
            amplitude: self.amplitude * rate[3],
            growth: self.growth * rate[4],
            ..*self
        }
    }
}

fn fixed(v: f64) -> i64 {
    (v * FIXED_ONE as f64).round() as i64
}

/// Closed-form object footprint at one frame, in fixed-point pixel units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Footprint {
    /// Half-open pixel rectangle `[x0, x1) x [y0, y1)`.
    Rect { x0: i64, y0: i64, x1: i64, y1: i64 },
    /// Pixels whose centre lies within `r` of `(cx, cy)`.
    Disc { cx: i64, cy: i64, r: i64 },
    /// A bob disc plus a rod from the pivot.
    Pendulum {
        px: i64,
        py: i64,
        bx: i64,
        by: i64,
        r: i64,
        rod: i64,
    },
}

impl Footprint {
    pub fn at(spec: &SynthSpec, frame: usize) -> Self {
        let t = frame as f64;
        let size = spec.object_size as f64;
        let (x0, y0) = spec.position;
        match spec.kind {
            SynthKind::TranslatingSquare | SynthKind::Static => {
                let (vx, vy) = if spec.kind == SynthKind::Static {
                    (0.0, 0.0)
                } else {
                    spec.velocity
                };
                let left = (x0 + vx * t - size / 2.0).round() as i64;
                let top = (y0 + vy * t - size / 2.0).round() as i64;
                let s = spec.object_size as i64;
                Footprint::Rect {
                    x0: left,
                    y0: top,
                    x1: left + s,
                    y1: top + s,
                }
            }
            SynthKind::FallingBall => Footprint::Disc {
                cx: fixed(x0 + spec.velocity.0 * t),
                cy: fixed(y0 + spec.velocity.1 * t + 0.5 * spec.gravity * t * t),
                r: fixed(size / 2.0),
            },
            SynthKind::DiffusingBlob => Footprint::Disc {
                cx: fixed(x0),
                cy: fixed(y0),
                r: fixed(size / 2.0 + spec.growth * t),
            },
            SynthKind::Pendulum => {
                let theta = spec.amplitude * libm::cos(spec.angular_frequency * t);
                Footprint::Pendulum {
                    px: fixed(x0),
                    py: fixed(y0),
                    bx: fixed(x0 + spec.pendulum_length * libm::sin(theta)),
                    by: fixed(y0 + spec.pendulum_length * libm::cos(theta)),
                    r: fixed(size / 2.0),
                    rod: fixed(ROD_HALF_WIDTH),
                }
            }
        }
    }

    fn within_disc(px: i64, py: i64, cx: i64, cy: i64, r: i64) -> bool {
        let (dx, dy) = ((px - cx) as i128, (py - cy) as i128);
        dx * dx + dy * dy <= (r as i128) * (r as i128)
    }

    fn within_segment(
        px: i64,
        py: i64,
        ax: i64,
        ay: i64,
        bx: i64,
        by: i64,
        half_width: i64,
    ) -> bool {
        let (abx, aby) = ((bx - ax) as i128, (by - ay) as i128);
        let (apx, apy) = ((px - ax) as i128, (py - ay) as i128);
        let len2 = abx * abx + aby * aby;
        let dot = apx * abx + apy * aby;
        let hw2 = (half_width as i128) * (half_width as i128);
        if len2 == 0 || dot <= 0 {
            return apx * apx + apy * apy <= hw2;
        }
        if dot >= len2 {
            let (bpx, bpy) = ((px - bx) as i128, (py - by) as i128);
            return bpx * bpx + bpy * bpy <= hw2;
        }
        let cross = apx * aby - apy * abx;
        cross * cross <= hw2 * len2
    }

    /// Whether pixel `(x, y)` is covered, testing its centre.
    pub fn covers(&self, x: i64, y: i64) -> bool {
        let (px, py) = (x * FIXED_ONE + FIXED_ONE / 2, y * FIXED_ONE + FIXED_ONE / 2);
        match *self {
            Footprint::Rect { x0, y0, x1, y1 } => x >= x0 && x < x1 && y >= y0 && y < y1,
            Footprint::Disc { cx, cy, r } => Self::within_disc(px, py, cx, cy, r),
            Footprint::Pendulum {
                px: ax,
                py: ay,
                bx,
                by,
                r,
                rod,
            } => {
                Self::within_disc(px, py, bx, by, r)
                    || Self::within_segment(px, py, ax, ay, bx, by, rod)
            }
        }
    }

    /// Pixel bounding box `[x0, x1) x [y0, y1)` that may be covered.
    pub fn bounds(&self) -> (i64, i64, i64, i64) {
        let floor = |v: i64| v.div_euclid(FIXED_ONE);
        let ceil = |v: i64| (v + FIXED_ONE - 1).div_euclid(FIXED_ONE);
        match *self {
            Footprint::Rect { x0, y0, x1, y1 } => (x0, y0, x1, y1),
            Footprint::Disc { cx, cy, r } => {
                (floor(cx - r), floor(cy - r), ceil(cx + r), ceil(cy + r))
            }
            Footprint::Pendulum {
                px,
                py,
                bx,
                by,
                r,
                rod,
            } => {
                let reach = r.max(rod);
                (
                    floor(px.min(bx) - reach),
                    floor(py.min(by) - reach),
                    ceil(px.max(bx) + reach),
                    ceil(py.max(by) + reach),
                )
            }
        }
    }

    /// Rasterizes into a row-major 0/1 plane; errors if any covered pixel leaves the field.
    pub fn rasterize(&self, width: u32, height: u32) -> Result<Vec<u8>> {
        let (w, h) = (width as i64, height as i64);
        let (bx0, by0, bx1, by1) = self.bounds();
        let mut plane = vec![0u8; (w * h) as usize];
        for y in by0..by1 {
            for x in bx0..bx1 {
                if !self.covers(x, y) {
                    continue;
                }
                if x < 0 || y < 0 || x >= w || y >= h {
                    return Err(Error::InvalidSynth(format!(
                        "object leaves frame at pixel ({x}, {y})"
                    )));
                }
                plane[(y * w + x) as usize] = 1;
            }
        }
        Ok(plane)
    }
}

/// Renders one take of the scene.
pub fn render_scenario(spec: &SynthSpec, take: Take) -> Result<FrameSequence> {
    spec.validate()?;
    let spec = spec.for_take(take);
    let frames = (0..spec.frame_count())
        .map(|t| {
            let plane = Footprint::at(&spec, t).rasterize(spec.width, spec.height)?;
            let gray: Vec<u8> = plane.iter().map(|&v| v * OBJECT_INTENSITY).collect();
            Frame::from_gray(spec.width, spec.height, &gray)
        })
        .collect::<Result<Vec<_>>>()?;
    FrameSequence::new(frames, spec.fps)
}

/// The analytic per-frame object footprints over `frames`, as a mask volume.
pub fn footprint_video(spec: &SynthSpec, take: Take, frames: Range<usize>) -> Result<MaskVideo> {
    spec.validate()?;
    let spec = spec.for_take(take);
    let planes = frames
        .map(|t| Footprint::at(&spec, t).rasterize(spec.width, spec.height))
        .collect::<Result<Vec<_>>>()?;
    MaskVideo::from_planes(spec.width, spec.height, planes)
}

/// Exact motion map over the test segment: every pixel the object covers in some but
/// not all test frames. Pixels covered throughout never change and are not motion.
pub fn oracle_motion_map(spec: &SynthSpec) -> Result<MotionMap> {
    if spec.noise_amplitude != 0.0 {
        return Err(Error::InvalidSynth(
            "analytic motion map needs noise_amplitude = 0".into(),
        ));
    }
    let video = footprint_video(spec, Take::One, spec.test_range()?)?;
    let n = video.plane_len();
    let mut any = vec![0u8; n];
    let mut all = vec![1u8; n];
    for t in 0..video.frame_count() {
        for ((a, l), &v) in any.iter_mut().zip(&mut all).zip(video.frame(t)) {
            *a |= v;
            *l &= v;
        }
    }
    let bits: Vec<u8> = any.iter().zip(&all).map(|(&a, &l)| a & (1 - l)).collect();
    MotionMap::binary(spec.width, spec.height, &bits)
}

/// One scenario of the synthetic mini-benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthScenario {
    pub scenario_id: String,
    pub category: Category,
    pub spec: SynthSpec,
}

const CATEGORIES: [Category; 5] = [
    Category::SolidMechanics,
    Category::FluidDynamics,
    Category::Magnetism,
    Category::Thermodynamics,
    Category::Optics,
];

/// The category label a kind carries in generated datasets.
pub fn category_of(kind: SynthKind) -> Category {
    CATEGORIES[SynthKind::ALL
        .iter()
        .position(|&k| k == kind)
        .expect("kind is listed")]
}

/// Five scenes, one per kind, each labelled with a different category so category
/// breakdowns have every column populated.
pub fn mini_benchmark(seed: u64) -> Vec<SynthScenario> {
    SynthKind::ALL
        .iter()
        .enumerate()
        .map(|(i, &kind)| SynthScenario {
            scenario_id: format!("synth-{:02}-{}", i + 1, kind),
            category: category_of(kind),
            spec: SynthSpec::preset(kind).with_noise(seed.wrapping_add(i as u64), 1.0),
        })
        .collect()
}

/// Renders both takes of each scenario (center perspective) under `root` as
/// `<scenario_id>/center/take<n>` and writes `root/dataset.json`.
pub fn write_benchmark(root: &Path, scenarios: &[SynthScenario]) -> Result<Dataset> {
    let mut records = Vec::new();
    for scenario in scenarios {
        let switch_index = scenario.spec.split().switch_index;
        for take in [Take::One, Take::Two] {
            let rel = Path::new(&scenario.scenario_id)
                .join(Perspective::Center.as_str())
                .join(format!("take{}", take.number()));
            let seq = render_scenario(&scenario.spec, take)?;
            save_sequence_tagged(
                &seq,
                &root.join(&rel),
                Some(&scenario.scenario_id),
                Some(switch_index),
            )?;
            records.push(ScenarioRecord {
                scenario_id: scenario.scenario_id.clone(),
                category: scenario.category,
                perspective: Perspective::Center,
                take,
                switch_index,
                path: rel,
            });
        }
    }
    let dataset = Dataset::new(root.to_path_buf(), records);
    dataset.save(&root.join("dataset.json"))?;
    Ok(dataset)
}

pub fn write_mini_benchmark(root: &Path, seed: u64) -> Result<Dataset> {
    write_benchmark(root, &mini_benchmark(seed))
}

/// A one-scenario dataset for `spec`, named after its kind.
pub fn write_single_scenario(root: &Path, spec: &SynthSpec) -> Result<Dataset> {
    let scenario = SynthScenario {
        scenario_id: spec.kind.to_string(),
        category: category_of(spec.kind),
        spec: *spec,
    };
    write_benchmark(root, &[scenario])
}

/// Adds seeded uniform noise in `[-level, level]` to every channel, clamped to 0..=255.
pub fn add_pixel_noise(seq: &FrameSequence, level: u8, seed: u64) -> Result<FrameSequence> {
    if level == 0 {
        return Ok(seq.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lvl = level as i16;
    let frames = seq
        .frames()
        .iter()
        .map(|f| {
            let data = f
                .data()
                .iter()
                .map(|&v| (v as i16 + rng.random_range(-lvl..=lvl)).clamp(0, 255) as u8)
                .collect();
            Frame::new(f.width(), f.height(), data)
        })
        .collect::<Result<Vec<_>>>()?;
    FrameSequence::new(frames, seq.fps())
}

/// Writes stand-in model outputs for every pair in `dataset`: the take-1 test segment
/// with `pixel_noise` added, at `<out>/<scenario_id>/<perspective>/`. Level 0 gives a
/// perfect clone of the ground truth.
pub fn write_model_outputs(
    dataset: &Dataset,
    out: &Path,
    pixel_noise: u8,
    seed: u64,
) -> Result<usize> {
    let pairs = dataset.pairs()?;
    for (i, pair) in pairs.iter().enumerate() {
        let real = crate::bench::load_test_segment(&pair.take1, pair.switch_index)?;
        let generated = add_pixel_noise(&real, pixel_noise, seed.wrapping_add(i as u64))?;
        let dir = out.join(&pair.scenario_id).join(pair.perspective.as_str());
        save_sequence_tagged(&generated, &dir, Some(&pair.scenario_id), None)?;
    }
    Ok(pairs.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn center_of_square(frame: &Frame, size: u32) -> Option<f64> {
        (0..frame.width())
            .find(|&x| frame.pixel(x, 32)[0] == OBJECT_INTENSITY)
            .map(|x| x as f64 + size as f64 / 2.0)
    }

    #[test]
    fn static_scene_is_constant_and_takes_match() {
        let spec = SynthSpec::preset(SynthKind::Static);
        let one = render_scenario(&spec, Take::One).unwrap();
        assert!(one.frames().windows(2).all(|w| w[0] == w[1]));
        assert_eq!(render_scenario(&spec, Take::Two).unwrap(), one);
    }

    #[test]
    fn translating_square_follows_closed_form() {
        // 10 px/frame needs a wide field: 64 frames cover 630 px
        let spec = SynthSpec {
            width: 704,
            object_size: 8,
            position: (20.0, 32.0),
            velocity: (10.0, 0.0),
            ..SynthSpec::preset(SynthKind::TranslatingSquare)
        };
        let seq = render_scenario(&spec, Take::One).unwrap();
        assert_eq!(seq.len(), 64);
        for (t, frame) in seq.frames().iter().enumerate() {
            assert_eq!(
                center_of_square(frame, 8),
                Some(20.0 + 10.0 * t as f64),
                "frame {t}"
            );
        }
    }

    #[test]
    fn ten_px_per_frame_on_64_wide_field_leaves_the_frame() {
        let spec = SynthSpec {
            object_size: 8,
            position: (10.0, 32.0),
            velocity: (10.0, 0.0),
            ..SynthSpec::preset(SynthKind::TranslatingSquare)
        };
        let err = render_scenario(&spec, Take::One).unwrap_err();
        assert!(err.to_string().contains("leaves frame"), "{err}");
    }

    #[test]
    fn falling_ball_follows_kinematics() {
        let spec = SynthSpec::preset(SynthKind::FallingBall);
        let seq = render_scenario(&spec, Take::One).unwrap();
        for (t, frame) in seq.frames().iter().enumerate().step_by(7) {
            let rows: Vec<u32> = (0..64)
                .filter(|&y| frame.pixel(32, y)[0] == OBJECT_INTENSITY)
                .collect();
            let mid = (rows[0] + rows[rows.len() - 1] + 1) as f64 / 2.0;
            let expected = 8.0 + 0.5 * 0.02 * (t * t) as f64;
            assert!(
                (mid - expected).abs() <= 0.5,
                "frame {t}: {mid} vs {expected}"
            );
        }
    }

    #[test]
    fn renders_are_reproducible() {
        for kind in SynthKind::ALL {
            let spec = SynthSpec::preset(kind).with_noise(7, 1.0);
            for take in [Take::One, Take::Two] {
                assert_eq!(
                    render_scenario(&spec, take).unwrap(),
                    render_scenario(&spec, take).unwrap()
                );
            }
        }
    }

    #[test]
    fn noisy_take_two_differs() {
        for kind in [
            SynthKind::TranslatingSquare,
            SynthKind::FallingBall,
            SynthKind::Pendulum,
        ] {
            let spec = SynthSpec::preset(kind).with_noise(3, 1.0);
            assert_ne!(
                render_scenario(&spec, Take::One).unwrap(),
                render_scenario(&spec, Take::Two).unwrap()
            );
        }
    }

    #[test]
    fn oracle_map_static_is_empty() {
        let map = oracle_motion_map(&SynthSpec::preset(SynthKind::Static)).unwrap();
        assert_eq!(map.active_pixels(), 0);
    }

    #[test]
    fn oracle_map_translating_square_is_union_rectangle() {
        let spec = SynthSpec::preset(SynthKind::TranslatingSquare);
        let map = oracle_motion_map(&spec).unwrap();
        let range = spec.test_range().unwrap();
        let left = |t: usize| (11.0 + 0.625 * t as f64 - 8.0).round() as u32;
        let (x0, x1) = (left(range.start), left(range.end - 1) + 16);
        for y in 0..64 {
            for x in 0..64 {
                let inside = (24..40).contains(&y) && (x0..x1).contains(&x);
                assert_eq!(map.get(x, y) == 1.0, inside, "pixel ({x}, {y})");
            }
        }
    }

    #[test]
    fn oracle_map_pendulum_is_swept_sector() {
        let spec = SynthSpec::preset(SynthKind::Pendulum);
        let map = oracle_motion_map(&spec).unwrap();
        // the bob's lowest point and both extremes lie in the swept region
        assert_eq!(map.get(32, 42), 1.0);
        let dx = (36.0 * 0.6f64.sin()) as u32;
        assert_eq!(map.get(32 - dx + 1, 35), 1.0);
        assert_eq!(map.get(32 + dx - 1, 35), 1.0);
        // outside the swing radius nothing moves
        assert_eq!(map.get(32, 60), 0.0);
        assert_eq!(map.get(2, 2), 0.0);
    }

    #[test]
    fn detected_motion_matches_oracle() {
        use crate::metrics::spatial_iou;
        use crate::motionmask::{collapse_spatial, compute_mask_video, MaskParams};
        for kind in SynthKind::ALL {
            let spec = SynthSpec::preset(kind);
            let seq = render_scenario(&spec, Take::One).unwrap();
            let test = seq.slice(spec.test_range().unwrap()).unwrap();
            let detected =
                collapse_spatial(&compute_mask_video(&test, &MaskParams::default()).unwrap());
            let iou = spatial_iou(&detected, &oracle_motion_map(&spec).unwrap())
                .unwrap()
                .value;
            // blur grows the detected region by about a pixel, so this stays below 1
            assert!(iou >= 0.8, "{kind}: {iou}");
        }
    }

    #[test]
    fn oracle_map_requires_noise_free_spec() {
        let spec = SynthSpec::preset(SynthKind::Pendulum).with_noise(1, 0.5);
        assert!(oracle_motion_map(&spec).is_err());
    }

    #[test]
    fn pixel_noise_is_seeded_and_bounded() {
        let seq = render_scenario(&SynthSpec::preset(SynthKind::Static), Take::One).unwrap();
        let a = add_pixel_noise(&seq, 30, 1).unwrap();
        assert_eq!(a, add_pixel_noise(&seq, 30, 1).unwrap());
        assert_ne!(a, add_pixel_noise(&seq, 30, 2).unwrap());
        assert_eq!(add_pixel_noise(&seq, 0, 1).unwrap(), seq);
        for (fa, fs) in a.frames().iter().zip(seq.frames()) {
            assert!(fa
                .data()
                .iter()
                .zip(fs.data())
                .all(|(&x, &y)| (x as i16 - y as i16).abs() <= 30));
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in SynthKind::ALL {
            assert_eq!(kind.as_str().parse::<SynthKind>().unwrap(), kind);
        }
        assert!("cloth".parse::<SynthKind>().is_err());
    }

    #[test]
    fn invalid_specs() {
        let ok = SynthSpec::preset(SynthKind::Static);
        assert!(SynthSpec {
            object_size: 0,
            ..ok
        }
        .validate()
        .is_err());
        assert!(SynthSpec { fps: 0.0, ..ok }.validate().is_err());
        assert!(SynthSpec {
            noise_amplitude: 2.0,
            ..ok
        }
        .validate()
        .is_err());
        assert!(SynthSpec {
            duration: 6.0,
            ..ok
        }
        .test_range()
        .is_err());
    }
}
