//! Exact computation of truncated I-functions, mirror maps, Batyrev elements,
//! and Seidel elements of weak Fano toric Deligne-Mumford stacks, from an
//! extended stacky fan description. All arithmetic is exact rational.

pub mod bundle;
pub mod coh;
pub mod error;
pub mod fan;
pub mod ifun;
pub mod input;
pub mod lattice;
pub mod mirror;
pub mod num;
pub mod report;
pub mod series;

pub use error::{Error, Result};

#[cfg(test)]
mod concurrency {
    // all values are immutable after construction, so they are freely
    // shareable across threads
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn core_types_are_shareable() {
        assert_send_sync::<crate::fan::ExtendedStackyFan>();
        assert_send_sync::<crate::bundle::BundleData>();
        assert_send_sync::<crate::coh::RelationIdeal>();
        assert_send_sync::<crate::coh::CohClass>();
        assert_send_sync::<crate::series::Series>();
        assert_send_sync::<crate::ifun::IFunction>();
    }
}
