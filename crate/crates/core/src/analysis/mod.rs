//! Saturation fits, power-law regression and density/Rabi-frequency sweeps.

mod power_law;
mod saturation;
mod scaling;

pub use power_law::{fit_joint_power_law, fit_power_law, Exponent, JointPowerLaw, PowerLawFit};
pub use saturation::{fit_saturation, saturation_model, SaturationFit};
pub use scaling::{scaling_experiment, ExponentEstimate, ScalingExponents, ScalingReport, ScalingSetup, SweepRow};
