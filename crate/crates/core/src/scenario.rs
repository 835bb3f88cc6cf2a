use num_complex::Complex64;

use crate::channel::{ChannelField, ChannelVector};
use crate::controller::{collision_potential, ChannelOracle, ControllerParams, TrajectoryState};
use crate::error::{Error, Result};
use crate::geometry::{NetworkLayout, Vec2};
use crate::jamming::{build_design, NullSpaceDesign};
use crate::secrecy::{jamming_objective, secrecy_rate, PowerConfig, RateReport};

/// A fully initialized simulation: layout, fading maps, powers and controller settings.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub layout: NetworkLayout,
    pub field: ChannelField,
    pub power: PowerConfig,
    pub controller: ControllerParams,
    /// Alice→Bob.
    pub h_a: Complex64,
    /// Alice→Eve.
    pub g_a: Complex64,
}

impl Scenario {
    pub fn new(
        layout: NetworkLayout,
        field: ChannelField,
        power: PowerConfig,
        controller: ControllerParams,
    ) -> Result<Self> {
        layout.validate(field.params.wavelength)?;
        power.validate()?;
        controller.validate()?;
        if power.helper_budgets.len() != layout.helpers.len() {
            return Err(Error::InvalidParameter(format!(
                "{} power budgets for {} helpers",
                power.helper_budgets.len(),
                layout.helpers.len()
            )));
        }
        let (h_a, g_a) = field.source_channels(&layout.alice)?;
        Ok(Self {
            layout,
            field,
            power,
            controller,
            h_a,
            g_a,
        })
    }

    /// Rescales Alice's channels by `1/|h_A|` and sets `P_s = snr·N₀`, so that
    /// `P_s|h_A|²/N₀` equals `snr` exactly. Only `P_s|h_A|²` and `P_s|g_A|²`
    /// enter the rate, so the secrecy rate is unchanged by the rescaling.
    pub fn normalize_source(&mut self, bob_snr: f64) -> Result<()> {
        let mag = self.h_a.norm();
        if !(mag > 0.0 && mag.is_finite()) {
            return Err(Error::DegenerateChannel);
        }
        self.g_a /= mag;
        self.h_a = Complex64::new(1.0, 0.0);
        self.power.source_power = bob_snr * self.power.noise_floor;
        self.power.validate()
    }

    /// Nulling designs for every helper of `layout`, weights at their bounds.
    pub fn designs(&self, layout: &NetworkLayout) -> Result<Vec<NullSpaceDesign>> {
        (0..layout.helpers.len())
            .map(|r| {
                let (h, g) = self.helper_channels(r, &layout.helpers[r].center)?;
                build_design(&h, &g, self.power.helper_budgets[r])
            })
            .collect()
    }

    pub fn rate(&self, layout: &NetworkLayout) -> Result<RateReport> {
        Ok(secrecy_rate(
            &self.power,
            self.h_a,
            self.g_a,
            &self.designs(layout)?,
        ))
    }

    pub fn evaluate_state(&self, layout: &NetworkLayout, step: usize) -> Result<TrajectoryState> {
        let designs = self.designs(layout)?;
        let phi_col = (0..layout.helpers.len())
            .map(|r| {
                collision_potential(layout, r, layout.helpers[r].rho)
                    .map(|c| c * self.controller.collision_weight)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TrajectoryState {
            step,
            positions: layout.helper_centers(),
            phi: designs.iter().map(|d| d.leakage_phi).collect(),
            phi_col,
            objective: jamming_objective(&designs),
            rate: secrecy_rate(&self.power, self.h_a, self.g_a, &designs),
        })
    }
}

impl ChannelOracle for Scenario {
    fn helper_channels(
        &self,
        helper: usize,
        center: &Vec2,
    ) -> Result<(ChannelVector, ChannelVector)> {
        let offsets = &self.layout.helper(helper)?.antenna_offsets;
        self.field.array_channels(center, offsets)
    }
}
