#![allow(dead_code)]

use hilbert_lsa::corpus::{build_matrix_excluding, TermDocMatrix};
use hilbert_lsa::Matrix;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const WOODCHUCK: [&str; 4] = [
    "How much wood would a woodchuck chuck if a woodchuck could chuck wood?",
    "Woodchuck would chuck as much wood as a woodchuck could chuck if a woodchuck could chuck wood.",
    "Could woodchuck chuck 35 cubic feet of dirt?",
    "If a woodchuck could chuck wood woodchuck would chuck 700 pounds of wood.",
];

/// The reference matrix leaves out "as" (second sentence, twice).
pub const WOODCHUCK_EXCLUDED: [&str; 1] = ["as"];

pub const WOODCHUCK_VOCAB: [&str; 16] = [
    "how", "much", "wood", "would", "a", "woodchuck", "chuck", "if", "could", "35", "cubic", "feet",
    "of", "dirt", "700", "pounds",
];

pub const A0: [[u32; 4]; 16] = [
    [1, 0, 0, 0],
    [1, 1, 0, 0],
    [2, 2, 0, 2],
    [1, 1, 0, 1],
    [2, 2, 0, 1],
    [2, 3, 1, 2],
    [2, 3, 1, 2],
    [1, 1, 0, 1],
    [1, 2, 1, 1],
    [0, 0, 1, 0],
    [0, 0, 1, 0],
    [0, 0, 1, 0],
    [0, 0, 1, 1],
    [0, 0, 1, 0],
    [0, 0, 0, 1],
    [0, 0, 0, 1],
];

pub const PRINTED_SINGULARS: [f64; 4] = [8.38, 2.52, 1.79, 1.04];

/// Printed left factor, rounded to two decimals.
pub const PRINTED_U: [[f64; 4]; 16] = [
    [-0.06, -0.12, 0.15, 0.70],
    [-0.14, -0.15, 0.35, 0.08],
    [-0.40, -0.22, -0.26, 0.23],
    [-0.20, -0.11, -0.13, 0.11],
    [-0.34, -0.26, 0.21, 0.20],
    [-0.50, 0.11, 0.04, -0.20],
    [-0.50, 0.11, 0.04, -0.20],
    [-0.20, -0.11, -0.13, 0.11],
    [-0.30, 0.23, 0.17, -0.32],
    [-0.02, 0.37, 0.11, 0.18],
    [-0.02, 0.37, 0.11, 0.18],
    [-0.02, 0.37, 0.11, 0.18],
    [-0.07, 0.41, -0.36, 0.20],
    [-0.02, 0.37, 0.11, 0.18],
    [-0.05, 0.04, -0.48, 0.02],
    [-0.05, 0.04, -0.48, 0.02],
];

/// Printed right factor; row `i` is right singular vector `i`.
pub const PRINTED_V: [[f64; 4]; 4] = [
    [-0.52, -0.67, -0.17, -0.48],
    [-0.30, -0.07, 0.94, 0.10],
    [0.28, 0.34, 0.21, -0.86],
    [0.73, -0.64, 0.18, 0.02],
];

/// Printed rank-1 reduction.
pub const PRINTED_A1: [[f64; 4]; 16] = [
    [0.26, 0.33, 0.08, 0.24],
    [0.61, 0.78, 0.19, 0.56],
    [1.74, 2.24, 0.56, 1.60],
    [0.87, 1.12, 0.28, 0.80],
    [1.48, 1.90, 0.48, 1.36],
    [2.17, 2.80, 0.71, 2.01],
    [2.17, 2.80, 0.71, 2.01],
    [0.87, 1.12, 0.28, 0.80],
    [1.30, 1.68, 0.42, 1.20],
    [0.08, 0.11, 0.02, 0.08],
    [0.08, 0.11, 0.02, 0.08],
    [0.08, 0.11, 0.02, 0.08],
    [0.30, 0.39, 0.09, 0.28],
    [0.08, 0.11, 0.02, 0.08],
    [0.21, 0.28, 0.07, 0.20],
    [0.21, 0.28, 0.07, 0.20],
];

/// Exact rank-1 reduction of A0, computed independently with LAPACK (numpy.linalg.svd).
pub const EXACT_A1_FIRST_COLUMN: [f64; 16] = [
    0.277757364372, 0.633902492879, 1.778508977332, 0.889254488666, 1.523156981546, 2.22719715851,
    2.22719715851, 0.889254488666, 1.337942669844, 0.09254305267, 0.09254305267, 0.09254305267,
    0.347895048457, 0.09254305267, 0.255351995787, 0.255351995787,
];
pub const EXACT_A1_WOODCHUCK_ROW: [f64; 4] = [2.22719715851, 2.855749369673, 0.742056378641, 2.047539732103];
pub const EXACT_SINGULARS: [f64; 4] = [8.387491001598, 2.521255859308, 1.791066866569, 1.041797998416];

pub fn woodchuck() -> TermDocMatrix {
    build_matrix_excluding(&WOODCHUCK, &WOODCHUCK_EXCLUDED).unwrap()
}

pub fn a0() -> Matrix {
    Array2::from_shape_fn((16, 4), |(i, j)| f64::from(A0[i][j]))
}

pub fn to_matrix<const R: usize, const C: usize>(rows: &[[f64; C]; R]) -> Matrix {
    Array2::from_shape_fn((R, C), |(i, j)| rows[i][j])
}

pub fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Matrix {
    Array2::from_shape_fn((m, n), |_| rng.random_range(-1.0..1.0))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).iter().fold(0.0, |acc, x| acc.max(x.abs()))
}
