//! Exchange-chain Hamiltonians and their compressed linear models.

pub mod accessible;
pub mod model;
pub mod oracle;
pub mod spec;

pub use accessible::{accessible_set, AccessibleSet};
pub use model::{
    abar_from_theta, block_output_row, build_linear_model, build_linear_model_with,
    canonical_string, param_locations, rearrange_block_form, structure_constant_model,
    system_matrix, theta_from_abar, BlockForm, NormalizationConvention, ParamEntry,
    StructureConstantModel,
};
pub use oracle::{hamiltonian_matrix, quantum_oracle_trace, MAX_ORACLE_QUBITS};
pub use spec::{Family, HamiltonianSpec, HamiltonianTerm, Measurement};
