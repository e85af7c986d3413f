//! Gradient diffusions dX = −∇U(t, X) dt + dB, their harmonic characteristic and bridges.

mod accordeon;
mod field;
mod ou;
mod potential;
mod sampler;

pub use accordeon::{accordeon_check, AccordeonReport, AccordeonRow, MIN_EXCEEDANCES};
pub use field::{check_condition_e17, script_u, HessianReport, ReciprocalCharacteristicField, HESSIAN_TOL};
pub use ou::{gamma_alpha, ou_bridge_moments, OuBridgeMoments};
pub use potential::{DerivativeSource, FieldValue, GradientPotential};
pub use sampler::{sample_diffusion_bridge, Estimate, PathEnsemble, SamplerOptions, TailEstimate};
