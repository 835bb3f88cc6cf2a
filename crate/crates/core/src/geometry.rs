//! Node positions, helper discs and antenna topology.
//!
//! Helpers are rigid discs: their antennas sit at fixed offsets from the disc
//! center and never rotate, so a helper's whole array is determined by the
//! center position alone.

use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;

/// Extra clearance added to the smallest disc enclosing the default array.
pub const DEFAULT_RHO_MARGIN: f64 = 0.05;

/// Axis-aligned rectangle in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Bounds {
    pub fn new(min: [f64; 2], max: [f64; 2]) -> Result<Self> {
        if !(min[0] < max[0] && min[1] < max[1]) || min.iter().chain(&max).any(|v| !v.is_finite()) {
            return Err(Error::Geometry(format!(
                "empty or non-finite rectangle {min:?}..{max:?}"
            )));
        }
        Ok(Self { min, max })
    }

    /// Rectangle with one corner at the origin.
    pub fn from_size(width: f64, height: f64) -> Result<Self> {
        Self::new([0.0, 0.0], [width, height])
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn contains(&self, p: &Vec2) -> bool {
        p.x >= self.min[0] && p.x <= self.max[0] && p.y >= self.min[1] && p.y <= self.max[1]
    }

    pub fn clamp(&self, p: &Vec2) -> Vec2 {
        Vec2::new(
            p.x.clamp(self.min[0], self.max[0]),
            p.y.clamp(self.min[1], self.max[1]),
        )
    }
}

/// A mobile multi-antenna helper.
#[derive(Debug, Clone, PartialEq)]
pub struct HelperGeometry {
    pub center: Vec2,
    /// Disc diameter ρ.
    pub rho: f64,
    pub antenna_offsets: Vec<Vec2>,
}

/// Radius of the circle on which `n` evenly spaced antennas are at least
/// `λ/2` apart (adjacent chord length `2r·sin(π/n)`).
pub fn default_array_radius(n_antennas: usize, wavelength: f64) -> f64 {
    let n = n_antennas.max(2) as f64;
    (wavelength / 4.0).max(wavelength / (4.0 * (PI / n).sin()))
}

/// Evenly spaced antennas on the smallest circle giving `λ/2` adjacent
/// spacing, first antenna on the +x axis. Two antennas land at `(±λ/4, 0)`.
pub fn default_antenna_offsets(n_antennas: usize, wavelength: f64) -> Vec<Vec2> {
    let r = default_array_radius(n_antennas, wavelength);
    (0..n_antennas)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n_antennas as f64;
            Vec2::new(r * theta.cos(), r * theta.sin())
        })
        .collect()
}

/// Smallest disc diameter enclosing the default array, plus [`DEFAULT_RHO_MARGIN`].
pub fn default_rho(n_antennas: usize, wavelength: f64) -> f64 {
    2.0 * default_array_radius(n_antennas, wavelength) + DEFAULT_RHO_MARGIN
}

impl HelperGeometry {
    pub fn new(center: Vec2, rho: f64, antenna_offsets: Vec<Vec2>) -> Self {
        Self {
            center,
            rho,
            antenna_offsets,
        }
    }

    pub fn with_default_array(center: Vec2, n_antennas: usize, wavelength: f64) -> Self {
        Self::new(
            center,
            default_rho(n_antennas, wavelength),
            default_antenna_offsets(n_antennas, wavelength),
        )
    }

    pub fn n_antennas(&self) -> usize {
        self.antenna_offsets.len()
    }

    /// Absolute antenna positions in offset order.
    pub fn antenna_positions(&self) -> Vec<Vec2> {
        antenna_positions_at(&self.center, &self.antenna_offsets)
    }

    /// Checks `N ≥ 2`, antennas inside the disc and `λ/2` spacing.
    pub fn validate(&self, wavelength: f64) -> Result<()> {
        if self.antenna_offsets.len() < 2 {
            return Err(Error::Geometry(format!(
                "helper needs at least 2 antennas, got {}",
                self.antenna_offsets.len()
            )));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::Geometry(format!(
                "disc diameter must be positive, got {}",
                self.rho
            )));
        }
        let tol = 1e-12 * self.rho.max(wavelength);
        for off in &self.antenna_offsets {
            if off.norm() > self.rho / 2.0 + tol {
                return Err(Error::Geometry(format!(
                    "antenna offset {:?} lies outside the disc of diameter {}",
                    off.as_slice(),
                    self.rho
                )));
            }
        }
        for (i, a) in self.antenna_offsets.iter().enumerate() {
            for b in &self.antenna_offsets[i + 1..] {
                if (a - b).norm() < wavelength / 2.0 - tol {
                    return Err(Error::Geometry(format!(
                        "antenna spacing {} is below half a wavelength",
                        (a - b).norm()
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn antenna_positions_at(center: &Vec2, offsets: &[Vec2]) -> Vec<Vec2> {
    offsets.iter().map(|o| center + o).collect()
}

/// Positions of all nodes taking part in one run.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLayout {
    pub alice: Vec2,
    pub bob: Vec2,
    pub eve: Vec2,
    pub helpers: Vec<HelperGeometry>,
    pub bounds: Bounds,
}

impl NetworkLayout {
    pub fn helper(&self, index: usize) -> Result<&HelperGeometry> {
        self.helpers.get(index).ok_or(Error::HelperIndex {
            index,
            count: self.helpers.len(),
        })
    }

    pub fn helper_centers(&self) -> Vec<Vec2> {
        self.helpers.iter().map(|h| h.center).collect()
    }

    /// Positions of every node other than helper `index`: the other helper
    /// centers followed by Alice, Bob and Eve.
    pub fn neighbors(&self, index: usize) -> Result<Vec<Vec2>> {
        self.helper(index)?;
        Ok(neighbors_in(
            &self.helper_centers(),
            index,
            [self.alice, self.bob, self.eve],
        ))
    }

    /// Smallest distance from helper `index` to any other node.
    pub fn min_separation(&self, index: usize) -> Result<f64> {
        let me = self.helper(index)?.center;
        Ok(self
            .neighbors(index)?
            .iter()
            .map(|p| (me - p).norm())
            .fold(f64::INFINITY, f64::min))
    }

    /// Same layout with helper centers replaced.
    pub fn with_centers(&self, centers: &[Vec2]) -> Self {
        let mut next = self.clone();
        for (h, c) in next.helpers.iter_mut().zip(centers) {
            h.center = *c;
        }
        next
    }

    pub fn validate(&self, wavelength: f64) -> Result<()> {
        for (name, p) in [("alice", self.alice), ("bob", self.bob), ("eve", self.eve)] {
            if !self.bounds.contains(&p) {
                return Err(Error::Geometry(format!(
                    "{name} at {:?} is outside the plane",
                    p.as_slice()
                )));
            }
        }
        for (r, h) in self.helpers.iter().enumerate() {
            h.validate(wavelength)?;
            if !self.bounds.contains(&h.center) {
                return Err(Error::Geometry(format!(
                    "helper {r} at {:?} is outside the plane",
                    h.center.as_slice()
                )));
            }
            let sep = self.min_separation(r)?;
            if sep <= h.rho {
                return Err(Error::Collision {
                    separation: sep,
                    rho: h.rho,
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn neighbors_in(centers: &[Vec2], index: usize, fixed: [Vec2; 3]) -> Vec<Vec2> {
    centers
        .iter()
        .enumerate()
        .filter(|(l, _)| *l != index)
        .map(|(_, p)| *p)
        .chain(fixed)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vec2 {
        Vec2::new(x, y)
    }

    fn reference_layout(helpers: Vec<Vec2>) -> NetworkLayout {
        NetworkLayout {
            alice: v(1.5, 0.1),
            bob: v(1.5, 4.9),
            eve: v(1.5, 4.1),
            helpers: helpers
                .into_iter()
                .map(|c| HelperGeometry::with_default_array(c, 2, 0.4))
                .collect(),
            bounds: Bounds::from_size(3.0, 5.0).unwrap(),
        }
    }

    #[test]
    fn antenna_positions_translate_with_center() {
        let offsets = vec![v(0.1, 0.0), v(-0.1, 0.0)];
        let at_origin = HelperGeometry::new(v(0.0, 0.0), 0.25, offsets.clone());
        assert_eq!(
            at_origin.antenna_positions(),
            vec![v(0.1, 0.0), v(-0.1, 0.0)]
        );

        let moved = HelperGeometry::new(v(1.0, 2.0), 0.25, offsets);
        let pos = moved.antenna_positions();
        assert!((pos[0] - v(1.1, 2.0)).norm() < 1e-15);
        assert!((pos[1] - v(0.9, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn default_two_antenna_spacing_is_half_wavelength() {
        let h = HelperGeometry::with_default_array(v(0.7, 0.3), 2, 0.4);
        let pos = h.antenna_positions();
        assert!(((pos[0] - pos[1]).norm() - 0.2).abs() < 1e-15);
        assert!((h.antenna_offsets[0] - v(0.1, 0.0)).norm() < 1e-15);
        assert!((h.rho - 0.25).abs() < 1e-15);
        h.validate(0.4).unwrap();
    }

    #[test]
    fn default_arrays_are_valid_for_larger_counts() {
        for n in 2..=8 {
            let h = HelperGeometry::with_default_array(v(0.0, 0.0), n, 0.4);
            h.validate(0.4).unwrap();
            let pos = h.antenna_positions();
            let min_gap = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| (pos[i] - pos[j]).norm())
                .fold(f64::INFINITY, f64::min);
            assert!((min_gap - 0.2).abs() < 1e-12, "n={n} gap={min_gap}");
        }
    }

    #[test]
    fn validation_rejects_bad_arrays() {
        let too_close = HelperGeometry::new(v(0.0, 0.0), 0.25, vec![v(0.05, 0.0), v(-0.05, 0.0)]);
        assert!(too_close.validate(0.4).is_err());
        let outside = HelperGeometry::new(v(0.0, 0.0), 0.1, vec![v(0.1, 0.0), v(-0.1, 0.0)]);
        assert!(outside.validate(0.4).is_err());
        let single = HelperGeometry::new(v(0.0, 0.0), 0.25, vec![v(0.0, 0.0)]);
        assert!(single.validate(0.4).is_err());
    }

    #[test]
    fn min_separation_direct_distance() {
        let layout = NetworkLayout {
            alice: v(0.0, 3.0),
            bob: v(0.0, 4.0),
            eve: v(0.0, 5.0),
            helpers: vec![HelperGeometry::with_default_array(v(0.0, 0.0), 2, 0.4)],
            bounds: Bounds::new([-1.0, -1.0], [1.0, 6.0]).unwrap(),
        };
        assert_eq!(layout.min_separation(0).unwrap(), 3.0);
    }

    #[test]
    fn min_separation_coincident_is_zero() {
        let layout = reference_layout(vec![v(1.0, 2.0), v(1.0, 2.0)]);
        assert_eq!(layout.min_separation(0).unwrap(), 0.0);
        assert!(layout.validate(0.4).is_err());
    }

    #[test]
    fn min_separation_reference_plane() {
        let layout = reference_layout(vec![v(1.5, 2.5)]);
        // Alice is 2.4 m below, Bob 2.4 m above, Eve 1.6 m above.
        let sep = layout.min_separation(0).unwrap();
        assert!((sep - 1.6).abs() < 1e-12);
        let dist_alice = (layout.helpers[0].center - layout.alice).norm();
        assert!((dist_alice - 2.4).abs() < 1e-12);
    }

    #[test]
    fn min_separation_symmetric_between_helpers() {
        let layout = reference_layout(vec![v(0.5, 2.4), v(0.9, 2.6)]);
        let d = (layout.helpers[0].center - layout.helpers[1].center).norm();
        assert_eq!(layout.min_separation(0).unwrap(), d);
        assert_eq!(layout.min_separation(1).unwrap(), d);
    }

    #[test]
    fn invalid_index_is_error() {
        let layout = reference_layout(vec![v(1.5, 2.5)]);
        assert!(matches!(
            layout.min_separation(3),
            Err(Error::HelperIndex { index: 3, count: 1 })
        ));
    }

    #[test]
    fn bounds_clamp() {
        let b = Bounds::from_size(3.0, 5.0).unwrap();
        assert_eq!(b.clamp(&v(-1.0, 7.0)), v(0.0, 5.0));
        assert!(b.contains(&v(3.0, 5.0)));
        assert!(!b.contains(&v(3.0001, 1.0)));
        assert!(Bounds::new([1.0, 0.0], [0.0, 1.0]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn antenna_positions_equivariant(cx in -10.0..10.0f64, cy in -10.0..10.0f64,
                                         tx in -5.0..5.0f64, ty in -5.0..5.0f64, n in 2usize..6) {
            let h = HelperGeometry::with_default_array(v(cx, cy), n, 0.4);
            let mut shifted = h.clone();
            shifted.center += v(tx, ty);
            for (a, b) in h.antenna_positions().iter().zip(shifted.antenna_positions()) {
                proptest::prop_assert!(((a + v(tx, ty)) - b).norm() < 1e-12);
            }
        }
    }
}
