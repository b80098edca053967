//! Numerical kernels shared across modules.

pub mod exact;
pub mod fd;
pub mod fit;
pub mod ode;
pub mod roots;
pub mod smooth;
pub mod tensor;
