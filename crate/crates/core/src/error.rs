use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degree bound violated: held-out residual {residual:.3e} for declared degree {degree}")]
    DegreeBound { degree: usize, residual: f64 },
    #[error("matrix is not degenerate (rank {rank} of {dim})")]
    NotDegenerate { rank: usize, dim: usize },
    #[error("boundary constraint violated: residual {0:.3e}")]
    Constraint(f64),
    #[error("degenerate boundary parameters: {0}")]
    DegenerateParams(String),
    #[error("t(0) is not proportional to the identity (residual {0:.3e}); Hamiltonian needs θ = 0")]
    NotHomogeneous(f64),
    #[error("pole of the T-Q relation at u = {0}")]
    Pole(String),
    #[error("Bethe root collision between {0} and {1}")]
    RootCollision(String, String),
    #[error("size guard: {0}")]
    SizeGuard(String),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
    #[error("config error: {0}")]
    Config(String),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
