//! Structured matrix families and control instances.

pub mod family;
pub mod fuel;
pub mod lti;

pub use family::{
    bernstein_sample, check_family_conditions, confluent_matrix, FamilyVariant, FunctionFamily,
};
pub use fuel::{fuel_instance, FuelInstance};
pub use lti::{ctrb, hankel, obsv, page_matrix, LtiSystem};
