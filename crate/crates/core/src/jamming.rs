//! Bob-nulling jamming noise.
//!
//! A helper with `N ≥ 2` antennas transmits `n = w·E·t`, where the columns of
//! `E` are an orthonormal basis of the right null space of the row `hᵀ`
//! (helper→Bob channel) and `t ~ CN(0, I)`. Bob sees no jamming at all;
//! Eve receives `gᵀn`, i.e. jamming power `|w|²·φ` with `φ = ‖Eᵀg‖²`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::ChannelVector;
use crate::error::{Error, Result};

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Channels with a smaller norm are rejected as degenerate draws.
const DEGENERATE_NORM: f64 = 1e-150;

/// Per-helper nulling-noise design at one position.
#[derive(Debug, Clone)]
pub struct NullSpaceDesign {
    /// `N × (N−1)`, column-orthonormal, `hᵀE = 0`.
    pub basis: DMatrix<Complex64>,
    /// `‖Eᵀg‖²`, Eve-side jamming power per unit `|w|²`.
    pub leakage_phi: f64,
    /// `|w|²`.
    pub weight_sq: f64,
    pub power_budget: f64,
    /// `P/(N−1)`, the largest admissible `|w|²`.
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSample {
    pub vector: DVector<Complex64>,
}

fn check_channel(h: &ChannelVector) -> Result<()> {
    if h.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "nulling needs at least 2 antennas, got {}",
            h.len()
        )));
    }
    let norm = h.norm();
    if !norm.is_finite() || norm < DEGENERATE_NORM {
        return Err(Error::DegenerateChannel);
    }
    Ok(())
}

/// Orthonormal basis of `{n : hᵀn = 0}` from the SVD of the row `hᵀ`.
pub fn null_space_basis(h: &ChannelVector) -> Result<DMatrix<Complex64>> {
    check_channel(h)?;
    let n = h.len();
    // Square matrix holding hᵀ in its first row so the SVD returns a full V.
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    m.row_mut(0).copy_from(&h.transpose());
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let s_max = svd.singular_values.max();
    let null: Vec<usize> = (0..n)
        .filter(|&k| svd.singular_values[k] <= RANK_TOLERANCE * s_max)
        .collect();
    if null.len() != n - 1 {
        return Err(Error::DegenerateChannel);
    }
    let cols: Vec<DVector<Complex64>> = null.iter().map(|&k| v_t.row(k).adjoint()).collect();
    Ok(DMatrix::from_columns(&cols))
}

/// `φ = ‖g‖² − |hᴴg|²/‖h‖²`. Since `EEᴴ = I − h̄hᵀ/‖h‖²`, this equals
/// `‖Eᵀg‖² = E|gᵀn|²/|w|²` for any orthonormal basis `E` of the null space.
pub fn leakage_phi_closed_form(h: &ChannelVector, g: &ChannelVector) -> Result<f64> {
    check_channel(h)?;
    if g.len() != h.len() {
        return Err(Error::InvalidParameter(format!(
            "channel lengths differ: {} vs {}",
            h.len(),
            g.len()
        )));
    }
    Ok((g.norm_squared() - h.dotc(g).norm_sqr() / h.norm_squared()).max(0.0))
}

/// Builds the nulling design for one helper, with the weight at its power bound.
pub fn build_design(
    h: &ChannelVector,
    g: &ChannelVector,
    power_budget: f64,
) -> Result<NullSpaceDesign> {
    if !(power_budget >= 0.0 && power_budget.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "power budget must be non-negative, got {power_budget}"
        )));
    }
    if g.len() != h.len() {
        return Err(Error::InvalidParameter(format!(
            "channel lengths differ: {} vs {}",
            h.len(),
            g.len()
        )));
    }
    let basis = null_space_basis(h)?;
    let leakage_phi = (basis.transpose() * g).norm_squared();
    let beta = power_budget / (h.len() - 1) as f64;
    Ok(NullSpaceDesign {
        basis,
        leakage_phi,
        weight_sq: beta,
        power_budget,
        beta,
    })
}

impl NullSpaceDesign {
    pub fn n_antennas(&self) -> usize {
        self.basis.nrows()
    }

    /// Eve-side jamming power `|w|²φ`.
    pub fn leakage_power(&self) -> f64 {
        self.weight_sq * self.leakage_phi
    }

    /// Copy with a smaller weight; `weight_sq` must stay within `[0, β]`.
    pub fn with_weight_sq(&self, weight_sq: f64) -> Result<Self> {
        if !(0.0..=self.beta).contains(&weight_sq) {
            return Err(Error::InvalidParameter(format!(
                "|w|² = {weight_sq} outside [0, {}]",
                self.beta
            )));
        }
        Ok(Self {
            weight_sq,
            ..self.clone()
        })
    }
}

/// Standard circular complex Gaussian vector, `E{ttᴴ} = I`.
pub fn standard_complex_gaussian<R: Rng + ?Sized>(len: usize, rng: &mut R) -> DVector<Complex64> {
    let sd = std::f64::consts::FRAC_1_SQRT_2;
    DVector::from_fn(len, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(sd * re, sd * im)
    })
}

/// One noise realization `w·E·t`.
pub fn sample_noise<R: Rng + ?Sized>(design: &NullSpaceDesign, rng: &mut R) -> NoiseSample {
    let t = standard_complex_gaussian(design.basis.ncols(), rng);
    let w = design.weight_sq.sqrt();
    NoiseSample {
        vector: &design.basis * t * Complex64::new(w, 0.0),
    }
}
