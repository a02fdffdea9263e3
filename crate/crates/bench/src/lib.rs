//! Fixtures shared by the benchmarks.

use ckv_core::fuzz::{generate, FuzzConfig};
use ckv_core::linalg::basis;
use ckv_core::{attach, standard_point, ConnectionKind, ConnectionSpec, Matrix, SubmanifoldPoint, Vector};

/// `n = 3` in dimension 5 with `h = diag(1, 1, 2)` along the first normal.
pub fn witness() -> SubmanifoldPoint {
    let frame: Vec<Vector> = (0..3).map(|i| basis(5, i)).collect();
    attach(
        standard_point(2),
        ConnectionSpec::zero(ConnectionKind::First, 5),
        &frame,
        vec![
            Matrix::from_diagonal(&Vector::from_column_slice(&[1.0, 1.0, 2.0])),
            Matrix::zeros(3, 3),
        ],
    )
    .expect("witness is valid")
}

/// A fuzz instance with fixed shape.
pub fn random_instance(kind: ConnectionKind, n: usize, m: usize, seed: u64) -> SubmanifoldPoint {
    let config = FuzzConfig {
        count: 1,
        seed,
        n: Some(n),
        m: Some(m),
        kind: Some(kind),
    };
    generate(&config, 0).build().expect("generated instances are valid").sub
}
