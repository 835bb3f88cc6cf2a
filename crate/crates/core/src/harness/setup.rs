use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{ChannelField, ChannelParams};
use crate::controller::ControllerParams;
use crate::error::{Error, Result};
use crate::geometry::{default_antenna_offsets, Bounds, HelperGeometry, NetworkLayout, Vec2};
use crate::harness::config::ResolvedConfig;
use crate::scenario::Scenario;
use crate::secrecy::PowerConfig;

pub const MAX_PLACEMENT_ATTEMPTS: usize = 100;

/// Receiver noise floor `N₀`; every power is expressed relative to it.
pub const NOISE_FLOOR: f64 = 1.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Stream for the jitter draws of one `(seed, helper count)` cell.
fn placement_rng(seed: u64, helper_count: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x0050_4c41_4345 ^ helper_count as u64);
    rng
}

/// Helper centers at `x = width·(k − ½)/R` and `y = y₀ + ε`, `ε ~ U[−γ, γ]`.
pub fn initial_centers<R: Rng + ?Sized>(config: &ResolvedConfig, rng: &mut R) -> Vec<Vec2> {
    let r = config.helper_count;
    let gamma = config.init_jitter_gamma;
    (0..r)
        .map(|k| {
            let x = config.plane_width * (k as f64 + 0.5) / r as f64;
            let eps = rng.random_range(-gamma..=gamma);
            Vec2::new(x, config.init_center_y + eps)
        })
        .collect()
}

/// Builds the initialized simulation for one seed.
///
/// The fading maps depend on the seed only, so different helper counts with
/// the same seed share one propagation environment.
pub fn build_scenario(config: &ResolvedConfig, seed: u64) -> Result<Scenario> {
    config.validate()?;
    let bounds = Bounds::from_size(config.plane_width, config.plane_height)?;
    let v = |p: [f64; 2]| Vec2::new(p[0], p[1]);
    let params = ChannelParams {
        wavelength: config.wavelength,
        pathloss_mu: config.pathloss_mu,
        correlation_length: config.correlation_length,
        seed,
    };
    params.validate()?;
    let field = ChannelField::seeded(params, v(config.bob), v(config.eve), &bounds);
    let controller = ControllerParams {
        step_size: config.step_size,
        fd_step: config.fd_step,
        collision_weight: config.collision_weight,
        max_displacement: config.max_displacement,
        ..ControllerParams::for_wavelength(config.wavelength)
    };

    let offsets = default_antenna_offsets(config.antennas_per_helper, config.wavelength);
    let mut rng = placement_rng(seed, config.helper_count);
    let mut layout = None;
    for _ in 0..MAX_PLACEMENT_ATTEMPTS {
        let candidate = NetworkLayout {
            alice: v(config.alice),
            bob: v(config.bob),
            eve: v(config.eve),
            helpers: initial_centers(config, &mut rng)
                .into_iter()
                .map(|c| HelperGeometry::new(c, config.rho, offsets.clone()))
                .collect(),
            bounds,
        };
        match candidate.validate(config.wavelength) {
            Ok(()) => {
                layout = Some(candidate);
                break;
            }
            Err(Error::Collision { .. }) => continue,
            Err(Error::Geometry(msg)) if msg.contains("outside the plane") => continue,
            Err(e) => return Err(e),
        }
    }
    let layout = layout.ok_or(Error::Placement {
        attempts: MAX_PLACEMENT_ATTEMPTS,
    })?;

    let bob_snr = db_to_linear(config.bob_snr_db);
    let power = PowerConfig {
        source_power: bob_snr * NOISE_FLOOR,
        noise_floor: NOISE_FLOOR,
        helper_budgets: vec![db_to_linear(config.jnnr_db) * NOISE_FLOOR; config.helper_count],
    };
    let mut scenario = Scenario::new(layout, field, power, controller)?;
    scenario.normalize_source(bob_snr)?;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ScenarioConfig;

    fn reference() -> ResolvedConfig {
        ScenarioConfig::default().resolve().unwrap()
    }

    #[test]
    fn single_helper_sits_mid_width() {
        let s = build_scenario(&reference(), 3).unwrap();
        let c = s.layout.helpers[0].center;
        assert_eq!(c.x, 1.5);
        assert!((c.y - 2.5).abs() <= 0.1);
    }

    #[test]
    fn helpers_equally_spaced() {
        let cfg = reference().with_helper_count(6);
        let s = build_scenario(&cfg, 4).unwrap();
        let xs: Vec<f64> = s.layout.helpers.iter().map(|h| h.center.x).collect();
        for (k, x) in xs.iter().enumerate() {
            assert!((x - 0.25 - 0.5 * k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn bob_snr_fixed_exactly() {
        for seed in 1..=30 {
            let s = build_scenario(&reference(), seed).unwrap();
            let r = s.rate(&s.layout).unwrap();
            assert_eq!(r.bob_snr_term, 100.0, "seed {seed}");
            assert_eq!(r.rate_supremum, 101f64.log2());
            assert!((s.power.helper_budgets[0] - 50.118_723_362_727_23).abs() < 1e-9);
        }
    }

    #[test]
    fn same_seed_same_scenario() {
        let a = build_scenario(&reference(), 9).unwrap();
        let b = build_scenario(&reference(), 9).unwrap();
        assert_eq!(a.layout, b.layout);
        assert_eq!(a.h_a, b.h_a);
        assert_eq!(a.g_a, b.g_a);
    }

    #[test]
    fn impossible_placement_reports_error() {
        // Seven helpers 0.43 m apart cannot fit discs of 0.6 m.
        let mut cfg = reference().with_helper_count(7);
        cfg.rho = 0.6;
        cfg.wavelength = 0.4;
        assert!(matches!(
            build_scenario(&cfg, 1),
            Err(Error::Placement { .. })
        ));
    }
}
