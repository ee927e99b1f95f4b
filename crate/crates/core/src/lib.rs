//! Finite-difference and cube-attack toolkit over finite fields GF(p^m).

pub mod attack;
pub mod blackbox;
pub mod combinat;
pub mod diff;
pub mod field;
pub mod linalg;
pub mod poly;
pub mod reduce;
pub mod targets;
pub mod verify;

pub use attack::{KeyedBlackBox, MaxtermRecord, PreprocessConfig};
pub use blackbox::{BlackBox, Counted, EvalError, FnBox};
pub use combinat::{degree_after_diff, DegreeBound};
pub use diff::{DiffError, DiffPlan, Grid, GridPoint};
pub use field::{Field, FieldElement, FieldError};
pub use linalg::{LinearSystem, Solution};
pub use poly::{Monomial, MultiPoly, PolyError};
pub use targets::{PlantedTarget, TargetSpec, ToyCipher};
