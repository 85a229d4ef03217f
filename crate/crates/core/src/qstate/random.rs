//! Seeded random states and unitaries.
//!
//! Mixed states use the Ginibre construction GG†/tr(GG†); pure states and
//! unitaries come from normalized complex Gaussian vectors and Gram-Schmidt
//! on Gaussian columns (Haar distributed).

use rand::Rng;
use rand_distr::StandardNormal;

use super::{DensityMatrix, Ket};
use crate::qmat::{self, vdot, ComplexMatrix, C64};

pub fn gaussian_c64(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn ginibre(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| gaussian_c64(rng))
}

pub fn random_pure_ket(rng: &mut impl Rng, dim: usize) -> Ket {
    let v: Vec<C64> = (0..dim).map(|_| gaussian_c64(rng)).collect();
    Ket::normalized(v).expect("gaussian vector is nonzero")
}

pub fn random_pure_state(rng: &mut impl Rng, dim_a: usize, dim_b: usize) -> DensityMatrix {
    super::density_from_ket(&random_pure_ket(rng, dim_a * dim_b), dim_a, dim_b).expect("dims agree")
}

/// Full-rank (almost surely) Ginibre state.
pub fn random_mixed_state(rng: &mut impl Rng, dim_a: usize, dim_b: usize) -> DensityMatrix {
    let g = ginibre(rng, dim_a * dim_b);
    let gg = &g * &g.dagger();
    DensityMatrix::normalized(gg.hermitian_part(), dim_a, dim_b).expect("GG† is a valid unnormalized state")
}

pub fn random_product_ket(rng: &mut impl Rng, dim_a: usize, dim_b: usize) -> Ket {
    random_pure_ket(rng, dim_a).tensor(&random_pure_ket(rng, dim_b))
}

/// Haar-random unitary.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian_c64(rng)).collect();
        for _pass in 0..2 {
            for c in &cols {
                let proj = vdot(c, &v);
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let n = qmat::norm(&v);
        if n < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

/// Probability vector drawn uniformly from the simplex.
pub fn random_distribution(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}
