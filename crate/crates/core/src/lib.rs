//! Group rings of free groups, free abelian groups and their direct products,
//! with certified bounds on reduced operator norms and Powers-type averaging.

pub mod algebra;
pub mod error;
pub mod group;
pub mod norm;
pub mod numeric;
pub mod powers;

pub use algebra::{parse_element, AnyElement, ExactElement, FloatElement, Mode};
pub use error::{Error, Result};
pub use group::{GroupDescriptor, Word};
pub use norm::{estimate, BoundConfig, NormEstimate};
