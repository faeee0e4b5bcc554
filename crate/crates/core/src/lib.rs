pub mod algebra;
pub mod diagrams;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod report;
pub mod scenario;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{OperatorSubspace, Rational, SparseOperator, SparseVec};
