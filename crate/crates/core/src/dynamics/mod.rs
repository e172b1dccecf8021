//! Single-excitation dynamics of N atoms coupled through the medium-assisted field.

mod closed_form;
mod fit;
mod kernel;
mod superposition;
mod volterra;

pub use closed_form::{
    classify_regime, rabi_frequency, strong_coupling_closed_form, weak_coupling_closed_form, Regime,
    StrongBranch,
};
pub use fit::{fit_lorentzian, LorentzianResonance};
pub use kernel::{build_kernel, rotating_frame, KernelConfig, LorentzianModel, MemoryKernel, Remainder};
pub use superposition::{to_superposition, transform, SuperpositionRates, SuperpositionView, SYMMETRY_TOLERANCE};
pub use volterra::{solve_volterra, AmplitudeTrajectory, PROBABILITY_TOLERANCE};
