//! Seeded, spatially correlated flat-fading channel maps.
//!
//! The complex gain between a moving antenna at `p` and a fixed terminal at
//! `q` is `α(p) · d^{-μ/2} · exp(i·2πd/λ)` with `d = |p − q|`. The fading
//! coefficient `α` comes from a map anchored at the fixed terminal: complex
//! Gaussian knots on a square grid, blended by an isotropic squared-exponential
//! kernel and renormalized so that `E|α|² = 1/2` at every point. Knot values
//! are derived from `(seed, anchor id, knot index)` alone, so a map can be
//! evaluated anywhere without storing an unbounded grid.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{antenna_positions_at, Bounds, NetworkLayout, Vec2};

pub type ChannelVector = DVector<Complex64>;

/// Total power `E|α|²` of the fading coefficient.
pub const FADING_POWER: f64 = 0.5;

/// Kernel weights beyond this many length-scales are below 1e-12 and dropped.
const KERNEL_CUTOFF: f64 = 7.5;

/// Distances below this are treated as coincident.
const MIN_DISTANCE: f64 = 1e-12;

pub const ANCHOR_BOB: u64 = 0xB0B;
pub const ANCHOR_EVE: u64 = 0xE7E;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub wavelength: f64,
    pub pathloss_mu: f64,
    /// Distance beyond which fading is treated as independent; defaults to `λ/2`.
    pub correlation_length: f64,
    pub seed: u64,
}

impl ChannelParams {
    pub fn new(wavelength: f64, pathloss_mu: f64, seed: u64) -> Result<Self> {
        let p = Self {
            wavelength,
            pathloss_mu,
            correlation_length: wavelength / 2.0,
            seed,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("wavelength", self.wavelength),
            ("pathloss_mu", self.pathloss_mu),
            ("correlation_length", self.correlation_length),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Grid spacing of the fading knots (`λ/4` by default).
    pub fn knot_spacing(&self) -> f64 {
        self.correlation_length / 2.0
    }

    /// Squared-exponential length-scale (`λ/(2√2)` by default).
    pub fn kernel_length(&self) -> f64 {
        self.correlation_length / SQRT_2
    }
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn knot_seed(seed: u64, anchor: u64, i: i64, j: i64) -> u64 {
    let mut h = mix64(seed ^ 0x9e37_79b9_7f4a_7c15);
    h = mix64(h ^ anchor);
    h = mix64(h ^ i as u64);
    mix64(h ^ (j as u64).rotate_left(32))
}

/// Knot draw with `E|z|² = FADING_POWER`.
fn knot_value(seed: u64, anchor: u64, i: i64, j: i64) -> Complex64 {
    let mut rng = ChaCha8Rng::seed_from_u64(knot_seed(seed, anchor, i, j));
    let sd = (FADING_POWER / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(&mut rng);
    let im: f64 = StandardNormal.sample(&mut rng);
    Complex64::new(sd * re, sd * im)
}

#[derive(Debug, Clone)]
struct KnotTable {
    i0: i64,
    j0: i64,
    nx: usize,
    ny: usize,
    values: Vec<Complex64>,
}

impl KnotTable {
    fn get(&self, i: i64, j: i64) -> Option<Complex64> {
        let (di, dj) = (i - self.i0, j - self.j0);
        if di < 0 || dj < 0 || di as usize >= self.nx || dj as usize >= self.ny {
            return None;
        }
        Some(self.values[dj as usize * self.nx + di as usize])
    }
}

/// Correlated fading field anchored at one fixed terminal.
#[derive(Debug, Clone)]
pub struct CorrelatedField {
    seed: u64,
    anchor_id: u64,
    spacing: f64,
    length: f64,
    reach: i64,
    table: Option<KnotTable>,
}

impl CorrelatedField {
    fn new(params: &ChannelParams, anchor_id: u64) -> Self {
        let spacing = params.knot_spacing();
        let length = params.kernel_length();
        Self {
            seed: params.seed,
            anchor_id,
            spacing,
            length,
            reach: (KERNEL_CUTOFF * length / spacing).ceil() as i64,
            table: None,
        }
    }

    /// Pre-draws every knot that can influence a point inside `region`.
    fn tabulate(mut self, region: &Bounds) -> Self {
        let i0 = (region.min[0] / self.spacing).floor() as i64 - self.reach;
        let j0 = (region.min[1] / self.spacing).floor() as i64 - self.reach;
        let i1 = (region.max[0] / self.spacing).ceil() as i64 + self.reach;
        let j1 = (region.max[1] / self.spacing).ceil() as i64 + self.reach;
        let nx = (i1 - i0 + 1) as usize;
        let ny = (j1 - j0 + 1) as usize;
        let mut values = Vec::with_capacity(nx * ny);
        for j in j0..=j1 {
            for i in i0..=i1 {
                values.push(knot_value(self.seed, self.anchor_id, i, j));
            }
        }
        self.table = Some(KnotTable {
            i0,
            j0,
            nx,
            ny,
            values,
        });
        self
    }

    fn knot(&self, i: i64, j: i64) -> Complex64 {
        self.table
            .as_ref()
            .and_then(|t| t.get(i, j))
            .unwrap_or_else(|| knot_value(self.seed, self.anchor_id, i, j))
    }

    fn alpha(&self, p: &Vec2) -> Complex64 {
        let ci = (p.x / self.spacing).round() as i64;
        let cj = (p.y / self.spacing).round() as i64;
        let inv = 1.0 / (2.0 * self.length * self.length);
        let weights = |c: i64, x: f64| -> Vec<f64> {
            (c - self.reach..=c + self.reach)
                .map(|k| {
                    let dx = x - k as f64 * self.spacing;
                    (-dx * dx * inv).exp()
                })
                .collect()
        };
        let wx = weights(ci, p.x);
        let wy = weights(cj, p.y);
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, wyb) in wy.iter().enumerate() {
            let j = cj - self.reach + b as i64;
            let mut row = Complex64::new(0.0, 0.0);
            for (a, wxa) in wx.iter().enumerate() {
                row += self.knot(ci - self.reach + a as i64, j) * wxa;
            }
            acc += row * wyb;
        }
        let norm_x: f64 = wx.iter().map(|w| w * w).sum();
        let norm_y: f64 = wy.iter().map(|w| w * w).sum();
        acc / (norm_x * norm_y).sqrt()
    }
}

/// Fading coefficient map `p ↦ α(p)` relative to a fixed terminal.
#[derive(Debug, Clone)]
pub enum FadingMap {
    Correlated {
        anchor_pos: Vec2,
        field: CorrelatedField,
    },
    /// Same coefficient everywhere. Used to isolate path loss and phase.
    Constant { anchor_pos: Vec2, alpha: Complex64 },
}

impl FadingMap {
    pub fn correlated(params: &ChannelParams, anchor_id: u64, anchor_pos: Vec2) -> Self {
        FadingMap::Correlated {
            anchor_pos,
            field: CorrelatedField::new(params, anchor_id),
        }
    }

    /// Like [`FadingMap::correlated`], with knots covering `region` drawn up front.
    pub fn correlated_tabulated(
        params: &ChannelParams,
        anchor_id: u64,
        anchor_pos: Vec2,
        region: &Bounds,
    ) -> Self {
        FadingMap::Correlated {
            anchor_pos,
            field: CorrelatedField::new(params, anchor_id).tabulate(region),
        }
    }

    pub fn constant(anchor_pos: Vec2, alpha: Complex64) -> Self {
        FadingMap::Constant { anchor_pos, alpha }
    }

    pub fn anchor_pos(&self) -> Vec2 {
        match self {
            FadingMap::Correlated { anchor_pos, .. } | FadingMap::Constant { anchor_pos, .. } => {
                *anchor_pos
            }
        }
    }

    pub fn alpha(&self, p: &Vec2) -> Complex64 {
        match self {
            FadingMap::Correlated { field, .. } => field.alpha(p),
            FadingMap::Constant { alpha, .. } => *alpha,
        }
    }
}

/// Complex gain between a moving antenna at `pos_i` and the terminal at `pos_j`,
/// with fading read from `map` at `pos_i`.
pub fn eval_gain(
    params: &ChannelParams,
    map: &FadingMap,
    pos_i: &Vec2,
    pos_j: &Vec2,
) -> Result<Complex64> {
    let d = (pos_i - pos_j).norm();
    if d < MIN_DISTANCE {
        return Err(Error::CoincidentPositions);
    }
    let path = d.powf(-params.pathloss_mu / 2.0);
    let phase = Complex64::from_polar(1.0, 2.0 * PI * d / params.wavelength);
    Ok(map.alpha(pos_i) * path * phase)
}

/// Fading maps for the two receivers plus the parameters they were drawn with.
#[derive(Debug, Clone)]
pub struct ChannelField {
    pub params: ChannelParams,
    pub bob_map: FadingMap,
    pub eve_map: FadingMap,
}

impl ChannelField {
    /// Independent correlated maps anchored at Bob and at Eve, tabulated over `region`.
    pub fn seeded(params: ChannelParams, bob: Vec2, eve: Vec2, region: &Bounds) -> Self {
        Self {
            bob_map: FadingMap::correlated_tabulated(&params, ANCHOR_BOB, bob, region),
            eve_map: FadingMap::correlated_tabulated(&params, ANCHOR_EVE, eve, region),
            params,
        }
    }

    pub fn with_maps(params: ChannelParams, bob_map: FadingMap, eve_map: FadingMap) -> Self {
        Self {
            params,
            bob_map,
            eve_map,
        }
    }

    /// Channel vectors `(h, g)` to Bob and Eve for an array with the given
    /// antenna offsets centered at `center`.
    pub fn array_channels(
        &self,
        center: &Vec2,
        offsets: &[Vec2],
    ) -> Result<(ChannelVector, ChannelVector)> {
        let positions = antenna_positions_at(center, offsets);
        let bob = self.bob_map.anchor_pos();
        let eve = self.eve_map.anchor_pos();
        let h = positions
            .iter()
            .map(|p| eval_gain(&self.params, &self.bob_map, p, &bob))
            .collect::<Result<Vec<_>>>()?;
        let g = positions
            .iter()
            .map(|p| eval_gain(&self.params, &self.eve_map, p, &eve))
            .collect::<Result<Vec<_>>>()?;
        Ok((ChannelVector::from_vec(h), ChannelVector::from_vec(g)))
    }

    /// Alice's scalar channels `(h_A, g_A)` to Bob and Eve.
    pub fn source_channels(&self, alice: &Vec2) -> Result<(Complex64, Complex64)> {
        let h_a = eval_gain(
            &self.params,
            &self.bob_map,
            alice,
            &self.bob_map.anchor_pos(),
        )?;
        let g_a = eval_gain(
            &self.params,
            &self.eve_map,
            alice,
            &self.eve_map.anchor_pos(),
        )?;
        Ok((h_a, g_a))
    }
}

/// `(h_r, g_r)` for helper `index` at its current position.
pub fn eval_helper_channels(
    field: &ChannelField,
    layout: &NetworkLayout,
    index: usize,
) -> Result<(ChannelVector, ChannelVector)> {
    let helper = layout.helper(index)?;
    field.array_channels(&helper.center, &helper.antenna_offsets)
}

/// Normalized correlation `E{α(a)·conj α(b)} / sqrt(E|α(a)|²·E|α(b)|²)`
/// estimated over `n_seeds` independently seeded maps.
pub fn correlation_check(
    params: &ChannelParams,
    anchor_id: u64,
    a: &Vec2,
    b: &Vec2,
    n_seeds: usize,
) -> Complex64 {
    let mut cross = Complex64::new(0.0, 0.0);
    let (mut pa, mut pb) = (0.0, 0.0);
    for k in 0..n_seeds as u64 {
        let p = ChannelParams {
            seed: params.seed.wrapping_add(k),
            ..*params
        };
        let map = FadingMap::correlated(&p, anchor_id, Vec2::zeros());
        let (xa, xb) = (map.alpha(a), map.alpha(b));
        cross += xa * xb.conj();
        pa += xa.norm_sqr();
        pb += xb.norm_sqr();
    }
    cross / (pa * pb).sqrt()
}

/// `|α|` sampled on a regular grid: `(x, y, |α|)` rows, x varying fastest.
pub fn magnitude_raster(map: &FadingMap, region: &Bounds, resolution: f64) -> Vec<(f64, f64, f64)> {
    let nx = (region.width() / resolution).floor() as usize + 1;
    let ny = (region.height() / resolution).floor() as usize + 1;
    let mut rows = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let p = Vec2::new(
                region.min[0] + i as f64 * resolution,
                region.min[1] + j as f64 * resolution,
            );
            rows.push((p.x, p.y, map.alpha(&p).norm()));
        }
    }
    rows
}
