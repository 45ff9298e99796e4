use thiserror::Error;

use crate::report::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A table or row does not have the size its owner requires.
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("index out of range in {what}: entry {value} but carrier has order {order}")]
    IndexOutOfRange {
        what: String,
        value: usize,
        order: usize,
    },

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("malformed signature: {0}")]
    MalformedSignature(String),

    #[error("enumeration needs {needed} candidates, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("algebra `{name}` is invalid: {report}")]
    InvalidAlgebra {
        name: String,
        report: ValidationReport,
    },

    #[error("morphism is invalid: {0}")]
    InvalidMorphism(ValidationReport),

    #[error("action is not a set of derived actions: {0}")]
    InvalidAction(ValidationReport),

    #[error("crossed module is invalid: {0}")]
    InvalidCrossedModule(ValidationReport),

    #[error("crossed module morphism is invalid: {0}")]
    InvalidXModMorphism(ValidationReport),

    #[error("internal groupoid is invalid: {0}")]
    InvalidGroupoid(ValidationReport),

    #[error("internal functor is invalid: {0}")]
    InvalidFunctor(ValidationReport),

    #[error("derivation is invalid: {0}")]
    InvalidDerivation(ValidationReport),

    #[error("homotopy is invalid: {0}")]
    InvalidHomotopy(ValidationReport),

    #[error("section does not split the projection at b = {0}")]
    NotASection(usize),

    #[error("inclusion is not the kernel of the projection: {0}")]
    NotKernel(String),

    #[error("morphisms are not composable: {0}")]
    NotComposable(String),

    #[error("homotopy endpoints do not match: {0}")]
    EndpointMismatch(String),

    #[error("not the image of a crossed-module construction: {0}")]
    NotDeltaImage(String),

    #[error("derivations live over different crossed modules")]
    BaseMismatch,

    #[error("derivation is not regular")]
    NotRegular,

    #[error("round trip failed: {0}")]
    RoundTripFailure(String),

    /// Two routes that must agree produced different answers.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn dims(what: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            what: what.into(),
            expected,
            found,
        }
    }

    /// The validation report carried by an `Invalid*` error.
    pub fn report(&self) -> Option<&ValidationReport> {
        match self {
            Error::InvalidAlgebra { report, .. }
            | Error::InvalidMorphism(report)
            | Error::InvalidAction(report)
            | Error::InvalidCrossedModule(report)
            | Error::InvalidXModMorphism(report)
            | Error::InvalidGroupoid(report)
            | Error::InvalidFunctor(report)
            | Error::InvalidDerivation(report)
            | Error::InvalidHomotopy(report) => Some(report),
            _ => None,
        }
    }

    /// Whether the error describes an invalid input object rather than
    /// malformed input or a failure of the tool.
    pub fn is_invalid_object(&self) -> bool {
        self.report().is_some()
            || matches!(
                self,
                Error::NotASection(_)
                    | Error::NotKernel(_)
                    | Error::NotComposable(_)
                    | Error::EndpointMismatch(_)
                    | Error::NotDeltaImage(_)
                    | Error::BaseMismatch
                    | Error::NotRegular
                    | Error::SignatureMismatch(_)
            )
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
