//! Lifts of annulus maps, Lefschetz indices along curves, certified fixed
//! points and Nielsen class bookkeeping for periodic points.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curves;
pub mod error;
pub mod fixed_points;
pub mod index;
pub mod maps;
pub mod nielsen;

pub use curves::{ClosedCurve, PlanePoint, Rect};
pub use error::{Error, Result};
pub use fixed_points::{CertifiedFixedBox, IsolationConfig};
pub use maps::{project, zoo, AnnulusPoint, CompletenessMechanism, LiftMap, PlaneMap};
pub use nielsen::{completeness_check, growth_rate, nielsen_residue, NielsenReport, SweepConfig, Verdict};
