//! Decentralized potential-field motion control.
//!
//! Each helper descends its own potential `φ°_r = w_c·φ_col,r − φ_r`, where
//! `φ_r` is its leakage gain toward Eve and `φ_col,r = Σ 1/(‖p_r − p_l‖² − ρ²)`
//! repels it from every other node. The continuous flow `ṗ_r = −∇φ°_r` is
//! integrated with explicit Euler steps and a per-helper backtracking line
//! search. All helpers step from the same position snapshot.
//!
//! A helper only ever asks the [`ChannelOracle`] about its own channels; the
//! positions of the other nodes are the only shared information.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelVector;
use crate::error::{Error, Result};
use crate::geometry::{neighbors_in, Bounds, NetworkLayout, Vec2};
use crate::jamming::leakage_phi_closed_form;
use crate::scenario::Scenario;
use crate::secrecy::RateReport;

/// Source of a single helper's channels to Bob and Eve.
pub trait ChannelOracle: Sync {
    /// `(h_r, g_r)` with helper `helper` centered at `center`.
    fn helper_channels(
        &self,
        helper: usize,
        center: &Vec2,
    ) -> Result<(ChannelVector, ChannelVector)>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerParams {
    /// Euler time increment before backtracking.
    pub step_size: f64,
    /// Central-difference probe distance for `∇φ_r`.
    pub fd_step: f64,
    /// Multiplier on the collision potential.
    pub collision_weight: f64,
    /// Cap on the distance moved in one step.
    pub max_displacement: f64,
    /// Halvings tried before a helper holds position.
    pub max_backtracks: u32,
    pub ascent_abs_tol: f64,
    pub ascent_rel_tol: f64,
}

impl ControllerParams {
    pub fn for_wavelength(wavelength: f64) -> Self {
        Self {
            step_size: 1.0,
            fd_step: wavelength / 1000.0,
            collision_weight: 1.0,
            max_displacement: wavelength / 4.0,
            max_backtracks: 30,
            ascent_abs_tol: 1e-9,
            ascent_rel_tol: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("step_size", self.step_size),
            ("fd_step", self.fd_step),
            ("max_displacement", self.max_displacement),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.collision_weight >= 0.0 && self.collision_weight.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "collision_weight must be non-negative, got {}",
                self.collision_weight
            )));
        }
        Ok(())
    }

    /// Largest allowed increase of `φ°` for an accepted step.
    pub fn ascent_tolerance(&self, potential: f64) -> f64 {
        self.ascent_abs_tol + self.ascent_rel_tol * potential.abs()
    }

    /// Clearance kept from the plane edges so finite-difference probes stay inside.
    pub fn edge_margin(&self) -> f64 {
        2.0 * self.fd_step
    }
}

/// Potential of one helper at one position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialEval {
    pub phi_r: f64,
    /// Weighted collision potential.
    pub phi_col: f64,
    pub phi_total: f64,
    /// `∇φ°` in 1/m units of the potential.
    pub gradient: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlStep {
    pub step_index: usize,
    /// `u_r = −∇φ°_r` at the snapshot.
    pub proposed_velocity: Vec2,
    /// Effective time increment after backtracking; zero when holding.
    pub step_size: f64,
    pub accepted_position: Vec2,
    pub backtrack_count: u32,
    /// Set when the move was undone because it clashed with another helper's move.
    pub reverted: bool,
}

/// Position snapshot seen by one helper: its own center and everyone else's.
#[derive(Debug, Clone)]
pub struct LocalView<'a> {
    pub helper: usize,
    pub neighbors: Vec<Vec2>,
    pub rho: f64,
    pub bounds: &'a Bounds,
}

impl<'a> LocalView<'a> {
    pub fn new(layout: &'a NetworkLayout, helper: usize) -> Result<Self> {
        let rho = layout.helper(helper)?.rho;
        Ok(Self {
            helper,
            neighbors: layout.neighbors(helper)?,
            rho,
            bounds: &layout.bounds,
        })
    }

    pub fn min_separation(&self, p: &Vec2) -> f64 {
        self.neighbors
            .iter()
            .map(|q| (p - q).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// `Σ 1/(‖p − p_l‖² − ρ²)` over the given neighbors.
pub fn collision_potential_at(p: &Vec2, neighbors: &[Vec2], rho: f64) -> Result<f64> {
    let mut total = 0.0;
    for q in neighbors {
        let gap = (p - q).norm_squared() - rho * rho;
        if gap <= 0.0 {
            return Err(Error::Collision {
                separation: (p - q).norm(),
                rho,
            });
        }
        total += 1.0 / gap;
    }
    Ok(total)
}

/// Analytic gradient `Σ −2(p − p_l)/(‖p − p_l‖² − ρ²)²`.
pub fn collision_gradient_at(p: &Vec2, neighbors: &[Vec2], rho: f64) -> Result<Vec2> {
    let mut grad = Vec2::zeros();
    for q in neighbors {
        let diff = p - q;
        let gap = diff.norm_squared() - rho * rho;
        if gap <= 0.0 {
            return Err(Error::Collision {
                separation: diff.norm(),
                rho,
            });
        }
        grad -= diff * (2.0 / (gap * gap));
    }
    Ok(grad)
}

/// Unweighted collision potential of helper `index` in `layout`.
pub fn collision_potential(layout: &NetworkLayout, index: usize, rho: f64) -> Result<f64> {
    let p = layout.helper(index)?.center;
    collision_potential_at(&p, &layout.neighbors(index)?, rho)
}

fn leakage_at<O: ChannelOracle + ?Sized>(oracle: &O, helper: usize, p: &Vec2) -> Result<f64> {
    let (h, g) = oracle.helper_channels(helper, p)?;
    leakage_phi_closed_form(&h, &g)
}

fn probe_ok(view: &LocalView<'_>, p: &Vec2) -> bool {
    view.bounds.contains(p) && view.min_separation(p) > view.rho
}

/// Central-difference gradient of `φ_r` with probe distance `fd_step`.
pub fn leakage_gradient<O: ChannelOracle + ?Sized>(
    oracle: &O,
    view: &LocalView<'_>,
    p: &Vec2,
    fd_step: f64,
) -> Result<Vec2> {
    let mut h = fd_step;
    for attempt in 0..2 {
        let probes = [
            p + Vec2::new(h, 0.0),
            p - Vec2::new(h, 0.0),
            p + Vec2::new(0.0, h),
            p - Vec2::new(0.0, h),
        ];
        if probes.iter().all(|q| probe_ok(view, q)) {
            let v = probes
                .iter()
                .map(|q| leakage_at(oracle, view.helper, q))
                .collect::<Result<Vec<_>>>()?;
            return Ok(Vec2::new(
                (v[0] - v[1]) / (2.0 * h),
                (v[2] - v[3]) / (2.0 * h),
            ));
        }
        if attempt == 0 {
            h /= 10.0;
        }
    }
    Err(Error::ProbeInfeasible {
        helper: view.helper,
    })
}

/// `φ°` without its gradient.
pub fn potential_value<O: ChannelOracle + ?Sized>(
    oracle: &O,
    view: &LocalView<'_>,
    p: &Vec2,
    collision_weight: f64,
) -> Result<(f64, f64)> {
    let phi_r = leakage_at(oracle, view.helper, p)?;
    let phi_col = collision_weight * collision_potential_at(p, &view.neighbors, view.rho)?;
    Ok((phi_r, phi_col))
}

/// Potential and gradient of helper `view.helper` at position `p`.
pub fn potential_gradient<O: ChannelOracle + ?Sized>(
    oracle: &O,
    view: &LocalView<'_>,
    p: &Vec2,
    params: &ControllerParams,
) -> Result<PotentialEval> {
    let (phi_r, phi_col) = potential_value(oracle, view, p, params.collision_weight)?;
    let grad_leak = leakage_gradient(oracle, view, p, params.fd_step)?;
    let grad_col = collision_gradient_at(p, &view.neighbors, view.rho)? * params.collision_weight;
    Ok(PotentialEval {
        phi_r,
        phi_col,
        phi_total: phi_col - phi_r,
        gradient: grad_col - grad_leak,
    })
}

fn inset(bounds: &Bounds, margin: f64) -> Bounds {
    let m = margin.min(bounds.width() / 4.0).min(bounds.height() / 4.0);
    Bounds {
        min: [bounds.min[0] + m, bounds.min[1] + m],
        max: [bounds.max[0] - m, bounds.max[1] - m],
    }
}

/// One helper's line search from the snapshot.
fn step_helper<O: ChannelOracle + ?Sized>(
    oracle: &O,
    layout: &NetworkLayout,
    helper: usize,
    params: &ControllerParams,
    step_index: usize,
) -> Result<ControlStep> {
    let view = LocalView::new(layout, helper)?;
    let start = layout.helper(helper)?.center;
    let eval = potential_gradient(oracle, &view, &start, params)?;
    let velocity = -eval.gradient;
    let hold = ControlStep {
        step_index,
        proposed_velocity: velocity,
        step_size: 0.0,
        accepted_position: start,
        backtrack_count: params.max_backtracks,
        reverted: false,
    };
    let speed = velocity.norm();
    if speed == 0.0 || !speed.is_finite() {
        return Ok(ControlStep {
            backtrack_count: 0,
            ..hold
        });
    }
    let inner = inset(&layout.bounds, params.edge_margin());
    let budget = eval.phi_total + params.ascent_tolerance(eval.phi_total);
    let mut t = params.step_size.min(params.max_displacement / speed);
    for backtracks in 0..params.max_backtracks {
        let candidate = inner.clamp(&(start + velocity * t));
        if view.min_separation(&candidate) > view.rho {
            let (phi_r, phi_col) =
                potential_value(oracle, &view, &candidate, params.collision_weight)?;
            if phi_col - phi_r <= budget {
                return Ok(ControlStep {
                    step_size: t,
                    accepted_position: candidate,
                    backtrack_count: backtracks,
                    ..hold
                });
            }
        }
        t *= 0.5;
    }
    Ok(hold)
}

/// One synchronous controller step for every helper.
///
/// Moves that would put two helpers within `ρ` of each other are undone,
/// repeatedly, until the committed layout is collision-free.
pub fn advance<O: ChannelOracle + ?Sized>(
    oracle: &O,
    layout: &NetworkLayout,
    params: &ControllerParams,
    step_index: usize,
) -> Result<(NetworkLayout, Vec<ControlStep>)> {
    let mut steps = (0..layout.helpers.len())
        .into_par_iter()
        .map(|r| step_helper(oracle, layout, r, params, step_index))
        .collect::<Result<Vec<_>>>()?;

    let fixed = [layout.alice, layout.bob, layout.eve];
    loop {
        let centers: Vec<Vec2> = steps.iter().map(|s| s.accepted_position).collect();
        let clashing: Vec<usize> = (0..centers.len())
            .filter(|&r| {
                let rho = layout.helpers[r].rho;
                neighbors_in(&centers, r, fixed)
                    .iter()
                    .any(|q| (centers[r] - q).norm() <= rho)
            })
            .filter(|&r| steps[r].accepted_position != layout.helpers[r].center)
            .collect();
        if clashing.is_empty() {
            break;
        }
        for r in clashing {
            steps[r].accepted_position = layout.helpers[r].center;
            steps[r].step_size = 0.0;
            steps[r].reverted = true;
        }
    }
    let centers: Vec<Vec2> = steps.iter().map(|s| s.accepted_position).collect();
    Ok((layout.with_centers(&centers), steps))
}

/// Everything recorded about the network at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryState {
    pub step: usize,
    pub positions: Vec<Vec2>,
    pub phi: Vec<f64>,
    /// Weighted collision potential per helper.
    pub phi_col: Vec<f64>,
    /// `Σ β_r φ_r`.
    pub objective: f64,
    pub rate: RateReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// Initial state followed by one entry per step.
    pub states: Vec<TrajectoryState>,
    /// `controls[k]` moved the network from `states[k]` to `states[k + 1]`.
    pub controls: Vec<Vec<ControlStep>>,
}

impl TrajectoryRecord {
    pub fn initial(&self) -> &TrajectoryState {
        &self.states[0]
    }

    pub fn last(&self) -> &TrajectoryState {
        self.states.last().expect("record holds the initial state")
    }
}

/// Runs the controller for `n_steps` steps from the scenario's layout.
pub fn run_trajectory(scenario: &Scenario, n_steps: usize) -> Result<TrajectoryRecord> {
    let mut layout = scenario.layout.clone();
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut controls = Vec::with_capacity(n_steps);
    states.push(scenario.evaluate_state(&layout, 0)?);
    for k in 1..=n_steps {
        let (next, steps) = advance(scenario, &layout, &scenario.controller, k)?;
        layout = next;
        states.push(scenario.evaluate_state(&layout, k)?);
        controls.push(steps);
    }
    Ok(TrajectoryRecord { states, controls })
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicUsize, Ordering};

    use num_complex::Complex64;

    use super::*;
    use crate::geometry::HelperGeometry;

    /// φ(p) = A·exp(−‖p − peak‖²/s²) per helper; counts queries per helper.
    struct BumpOracle {
        peaks: Vec<Vec2>,
        width: f64,
        calls: Vec<AtomicUsize>,
    }

    impl BumpOracle {
        fn new(peaks: Vec<Vec2>, width: f64) -> Self {
            let calls = peaks.iter().map(|_| AtomicUsize::new(0)).collect();
            Self {
                peaks,
                width,
                calls,
            }
        }
    }

    impl ChannelOracle for BumpOracle {
        fn helper_channels(
            &self,
            helper: usize,
            center: &Vec2,
        ) -> Result<(ChannelVector, ChannelVector)> {
            self.calls[helper].fetch_add(1, Ordering::Relaxed);
            let amp = (-(center - self.peaks[helper]).norm_squared()
                / (2.0 * self.width * self.width))
                .exp();
            let h =
                ChannelVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
            let g =
                ChannelVector::from_vec(vec![Complex64::new(0.0, 0.0), Complex64::new(amp, 0.0)]);
            Ok((h, g))
        }
    }

    fn layout(centers: &[Vec2]) -> NetworkLayout {
        NetworkLayout {
            alice: Vec2::new(1.5, 0.1),
            bob: Vec2::new(1.5, 4.9),
            eve: Vec2::new(1.5, 4.1),
            helpers: centers
                .iter()
                .map(|c| HelperGeometry::with_default_array(*c, 2, 0.4))
                .collect(),
            bounds: Bounds::from_size(3.0, 5.0).unwrap(),
        }
    }

    fn params() -> ControllerParams {
        ControllerParams::for_wavelength(0.4)
    }

    #[test]
    fn collision_potential_single_neighbor() {
        let rho = 0.5;
        let p = Vec2::zeros();
        // ‖p − q‖² − ρ² = 1.
        let q = Vec2::new((1.0f64 + rho * rho).sqrt(), 0.0);
        assert!((collision_potential_at(&p, &[q], rho).unwrap() - 1.0).abs() < 1e-15);
        let far = collision_potential_at(&p, &[Vec2::new(1e6, 0.0)], rho).unwrap();
        assert!(far < 1e-11);
    }

    #[test]
    fn collision_potential_reference_layout() {
        let l = layout(&[Vec2::new(1.5, 2.5)]);
        let v = collision_potential(&l, 0, 0.25).unwrap();
        assert!((v - 0.751_431_554_415_319_2).abs() < 1e-14);
    }

    #[test]
    fn collision_inside_disc_is_error() {
        let err = collision_potential_at(&Vec2::zeros(), &[Vec2::new(0.2, 0.0)], 0.25).unwrap_err();
        assert!(matches!(err, Error::Collision { .. }));
        assert!(collision_gradient_at(&Vec2::zeros(), &[Vec2::new(0.25, 0.0)], 0.25).is_err());
    }

    #[test]
    fn analytic_collision_gradient_matches_finite_difference() {
        let neighbors = [
            Vec2::new(1.5, 0.1),
            Vec2::new(1.5, 4.9),
            Vec2::new(1.5, 4.1),
            Vec2::new(1.0, 2.2),
        ];
        let p = Vec2::new(1.37, 2.61);
        let h = 1e-5;
        let f = |q: Vec2| collision_potential_at(&q, &neighbors, 0.25).unwrap();
        let fd = Vec2::new(
            (f(p + Vec2::new(h, 0.0)) - f(p - Vec2::new(h, 0.0))) / (2.0 * h),
            (f(p + Vec2::new(0.0, h)) - f(p - Vec2::new(0.0, h))) / (2.0 * h),
        );
        let analytic = collision_gradient_at(&p, &neighbors, 0.25).unwrap();
        assert!((analytic - fd).norm() / analytic.norm() < 1e-6);
    }

    #[test]
    fn gradient_vanishes_at_leakage_peak() {
        let peak = Vec2::new(1.2, 2.0);
        let oracle = BumpOracle::new(vec![peak], 0.3);
        let l = layout(&[peak]);
        let view = LocalView::new(&l, 0).unwrap();
        let g = leakage_gradient(&oracle, &view, &peak, params().fd_step).unwrap();
        assert!(g.norm() < 1e-9, "{g:?}");
        let off = leakage_gradient(
            &oracle,
            &view,
            &(peak + Vec2::new(0.1, 0.0)),
            params().fd_step,
        )
        .unwrap();
        assert!(off.x < 0.0, "gradient points back to the peak");
    }

    #[test]
    fn repulsion_points_away_from_close_neighbor() {
        let a = Vec2::new(1.0, 2.5);
        let b = Vec2::new(1.3, 2.5);
        let l = layout(&[a, b]);
        let view = LocalView::new(&l, 0).unwrap();
        let grad = collision_gradient_at(&a, &view.neighbors, view.rho).unwrap();
        // −∇ points from b toward a.
        assert!((-grad).dot(&(a - b)) > 0.0);
    }

    #[test]
    fn zero_gradient_leaves_positions_unchanged() {
        struct Flat;
        impl ChannelOracle for Flat {
            fn helper_channels(
                &self,
                _: usize,
                _: &Vec2,
            ) -> Result<(ChannelVector, ChannelVector)> {
                let one = Complex64::new(1.0, 0.0);
                let zero = Complex64::new(0.0, 0.0);
                Ok((
                    ChannelVector::from_vec(vec![one, zero]),
                    ChannelVector::from_vec(vec![zero, one]),
                ))
            }
        }
        let l = layout(&[Vec2::new(0.7, 2.4), Vec2::new(2.2, 2.6)]);
        let p = ControllerParams {
            collision_weight: 0.0,
            ..params()
        };
        let (next, steps) = advance(&Flat, &l, &p, 1).unwrap();
        assert_eq!(next, l);
        assert!(steps
            .iter()
            .all(|s| s.backtrack_count == 0 && s.step_size == 0.0));
    }

    #[test]
    fn helper_climbs_to_peak() {
        let peak = Vec2::new(1.0, 3.0);
        let oracle = BumpOracle::new(vec![peak], 0.5);
        let mut l = layout(&[Vec2::new(1.4, 2.5)]);
        // Near the peak ∇φ ≈ −8(p − peak), so a step of 0.05 contracts by 0.6.
        let p = ControllerParams {
            collision_weight: 0.0,
            step_size: 0.05,
            ..params()
        };
        for k in 1..=200 {
            l = advance(&oracle, &l, &p, k).unwrap().0;
        }
        let gap = (l.helpers[0].center - peak).norm();
        assert!(gap < 1e-3, "{gap}");
    }

    #[test]
    fn close_helpers_separate() {
        // Both helpers share one far-away peak, so only repulsion acts locally.
        let far = Vec2::new(50.0, 50.0);
        let oracle = BumpOracle::new(vec![far, far], 1.0);
        let rho = 0.25;
        let a = Vec2::new(1.2, 2.5);
        let b = Vec2::new(1.2 + 1.05 * rho, 2.5);
        let mut l = layout(&[a, b]);
        let initial = (a - b).norm();
        for k in 1..=10 {
            let (next, steps) = advance(&oracle, &l, &params(), k).unwrap();
            for (r, step) in steps.iter().enumerate() {
                assert!(next.min_separation(r).unwrap() > rho);
                assert!(step.backtrack_count <= params().max_backtracks);
            }
            l = next;
        }
        assert!((l.helpers[0].center - l.helpers[1].center).norm() > initial);
    }

    #[test]
    fn steps_stay_inside_plane() {
        // Peak outside the plane drags the helper into the corner.
        let oracle = BumpOracle::new(vec![Vec2::new(-1.0, -1.0)], 1.0);
        let p = ControllerParams {
            collision_weight: 0.0,
            step_size: 10.0,
            ..params()
        };
        let mut l = layout(&[Vec2::new(0.5, 0.6)]);
        for k in 1..=100 {
            l = advance(&oracle, &l, &p, k).unwrap().0;
            assert!(l.bounds.contains(&l.helpers[0].center));
        }
        let m = p.edge_margin();
        assert!((l.helpers[0].center - Vec2::new(m, m)).norm() < 1e-12);
    }

    #[test]
    fn each_helper_queries_only_its_own_channels() {
        let oracle = BumpOracle::new(vec![Vec2::new(0.5, 2.0), Vec2::new(2.5, 2.0)], 0.5);
        let l = layout(&[Vec2::new(0.7, 2.5), Vec2::new(2.2, 2.5)]);
        let view = LocalView::new(&l, 1).unwrap();
        potential_gradient(&oracle, &view, &l.helpers[1].center, &params()).unwrap();
        assert_eq!(oracle.calls[0].load(Ordering::Relaxed), 0);
        assert!(oracle.calls[1].load(Ordering::Relaxed) >= 5);
    }

    #[test]
    fn probe_shrinks_then_fails_near_edge() {
        let oracle = BumpOracle::new(vec![Vec2::new(1.0, 1.0)], 0.5);
        let l = layout(&[Vec2::new(1.0, 1.0)]);
        let view = LocalView::new(&l, 0).unwrap();
        let fd = params().fd_step;
        // Within fd but beyond fd/10 of the edge: the shrunken probe fits.
        assert!(leakage_gradient(&oracle, &view, &Vec2::new(fd / 2.0, 1.0), fd).is_ok());
        assert!(matches!(
            leakage_gradient(&oracle, &view, &Vec2::new(fd / 20.0, 1.0), fd),
            Err(Error::ProbeInfeasible { helper: 0 })
        ));
    }

    mod trajectory {
        use super::*;
        use crate::harness::{build_scenario, ScenarioConfig};

        fn scenario(helpers: usize, seed: u64) -> Scenario {
            let cfg = ScenarioConfig::default()
                .resolve()
                .unwrap()
                .with_helper_count(helpers);
            build_scenario(&cfg, seed).unwrap()
        }

        #[test]
        fn zero_steps_keeps_initial_state() {
            let s = scenario(2, 1);
            let rec = run_trajectory(&s, 0).unwrap();
            assert_eq!(rec.states.len(), 1);
            assert!(rec.controls.is_empty());
            assert_eq!(rec.initial().positions, s.layout.helper_centers());
        }

        #[test]
        fn trajectories_are_deterministic() {
            let s = scenario(3, 5);
            assert_eq!(
                run_trajectory(&s, 15).unwrap(),
                run_trajectory(&s, 15).unwrap()
            );
        }

        #[test]
        fn recorded_rate_matches_fresh_evaluation() {
            let s = scenario(2, 2);
            let rec = run_trajectory(&s, 10).unwrap();
            let last = rec.last();
            let layout = s.layout.with_centers(&last.positions);
            let fresh = s.rate(&layout).unwrap();
            assert!((fresh.secrecy_rate - last.rate.secrecy_rate).abs() < 1e-12);
        }

        #[test]
        fn steps_respect_safety_limits() {
            let s = scenario(4, 3);
            let rec = run_trajectory(&s, 30).unwrap();
            for (k, steps) in rec.controls.iter().enumerate() {
                let before = &rec.states[k];
                let after = &rec.states[k + 1];
                let layout = s.layout.with_centers(&after.positions);
                for (r, step) in steps.iter().enumerate() {
                    assert!(step.backtrack_count <= s.controller.max_backtracks);
                    assert!(layout.bounds.contains(&after.positions[r]));
                    assert!(layout.min_separation(r).unwrap() > layout.helpers[r].rho);
                    let moved = (after.positions[r] - before.positions[r]).norm();
                    assert!(moved <= s.controller.max_displacement + 1e-12);
                }
            }
        }
    }
}
