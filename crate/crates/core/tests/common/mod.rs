//! Reference computations that share no numerics with the library: nalgebra
//! eigensolvers, the dephased-state entropy route, and exhaustive angle grids.
#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64 as C;
use qdiscord::qmat::ComplexMatrix;
use qdiscord::qstate::{DensityMatrix, Side};

pub fn to_dmatrix(m: &ComplexMatrix) -> DMatrix<C> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m[(i, j)])
}

pub fn to_matrix4(m: &ComplexMatrix) -> Matrix4<C> {
    assert_eq!(m.dim(), 4);
    Matrix4::from_fn(|i, j| m[(i, j)])
}

fn h(eigs: impl Iterator<Item = f64>) -> f64 {
    eigs.filter(|&l| l > 1e-14).map(|l| -l * l.log2()).sum()
}

pub fn entropy(m: &DMatrix<C>) -> f64 {
    h(m.clone().symmetric_eigenvalues().iter().copied())
}

pub fn entropy4(m: &Matrix4<C>) -> f64 {
    h(m.symmetric_eigenvalues().iter().copied())
}

/// Reduced state of one party, by explicit index sums.
pub fn reduced(rho: &DMatrix<C>, da: usize, db: usize, keep: Side) -> DMatrix<C> {
    match keep {
        Side::A => DMatrix::from_fn(da, da, |i, j| (0..db).map(|k| rho[(i * db + k, j * db + k)]).sum()),
        Side::B => DMatrix::from_fn(db, db, |i, j| (0..da).map(|k| rho[(k * db + i, k * db + j)]).sum()),
    }
}

pub fn mutual_information(rho: &DensityMatrix) -> f64 {
    let m = to_dmatrix(rho.matrix());
    let (da, db) = rho.dims();
    entropy(&reduced(&m, da, db, Side::A)) + entropy(&reduced(&m, da, db, Side::B)) - entropy(&m)
}

/// Projector on (cos θ/2, e^{iφ} sin θ/2).
fn qubit_projector(theta: f64, phi: f64) -> Matrix2<C> {
    let v = [
        C::new((theta / 2.0).cos(), 0.0),
        C::from_polar((theta / 2.0).sin(), phi),
    ];
    Matrix2::from_fn(|i, j| v[i] * v[j].conj())
}

fn embed(p: &Matrix2<C>, side: Side) -> Matrix4<C> {
    let id = Matrix2::<C>::identity();
    match side {
        Side::A => p.kronecker(&id),
        Side::B => id.kronecker(p),
    }
    .fixed_view::<4, 4>(0, 0)
    .into_owned()
}

/// Two-qubit discord for the measurement at (θ, φ): S(ρ_Π) − S(ρ), where ρ_Π
/// is ρ dephased in the measured basis.
pub struct MeasuredDiscord {
    rho: Matrix4<C>,
    side: Side,
    s_rho: f64,
}

impl MeasuredDiscord {
    pub fn new(rho: &DensityMatrix, side: Side) -> Self {
        assert_eq!(rho.dims(), (2, 2));
        let rho = to_matrix4(rho.matrix());
        Self {
            s_rho: entropy4(&rho),
            rho,
            side,
        }
    }

    pub fn eval(&self, theta: f64, phi: f64) -> f64 {
        let p0 = embed(&qubit_projector(theta, phi), self.side);
        let p1 = Matrix4::<C>::identity() - p0;
        let dephased = p0 * self.rho * p0 + p1 * self.rho * p1;
        entropy4(&dephased) - self.s_rho
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OracleResult {
    pub value: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Exhaustive grid with spacing `step_deg` over θ ∈ [0, π], φ ∈ [0, 2π),
/// then nested 9×9 zoom grids around the best `starts` grid-local minima.
pub fn oracle_side(rho: &DensityMatrix, side: Side, step_deg: f64, starts: usize) -> OracleResult {
    let f = MeasuredDiscord::new(rho, side);
    let step = step_deg.to_radians();
    let nt = (180.0 / step_deg).round() as usize + 1;
    let np = (360.0 / step_deg).round() as usize;
    let grid: Vec<Vec<f64>> = (0..nt)
        .map(|i| (0..np).map(|j| f.eval(i as f64 * step, j as f64 * step)).collect())
        .collect();

    let mut minima = Vec::new();
    for i in 0..nt {
        for j in 0..np {
            let v = grid[i][j];
            let mut is_min = true;
            for di in [-1i64, 0, 1] {
                for dj in [-1i64, 0, 1] {
                    let ii = i as i64 + di;
                    if (di, dj) == (0, 0) || ii < 0 || ii >= nt as i64 {
                        continue;
                    }
                    let jj = (j as i64 + dj).rem_euclid(np as i64) as usize;
                    if grid[ii as usize][jj] < v {
                        is_min = false;
                    }
                }
            }
            if is_min {
                minima.push((v, i, j));
            }
        }
    }
    minima.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best = OracleResult {
        value: f64::INFINITY,
        theta: 0.0,
        phi: 0.0,
    };
    for &(v0, i, j) in minima.iter().take(starts) {
        let (mut t, mut p, mut v) = (i as f64 * step, j as f64 * step, v0);
        let mut s = step;
        for _ in 0..10 {
            s /= 4.0;
            let (ct, cp) = (t, p);
            for a in -4..=4 {
                for b in -4..=4 {
                    let (tt, pp) = (ct + a as f64 * s, cp + b as f64 * s);
                    let val = f.eval(tt, pp);
                    if val < v {
                        (t, p, v) = (tt, pp, val);
                    }
                }
            }
        }
        if v < best.value {
            best = OracleResult {
                value: v,
                theta: t,
                phi: p,
            };
        }
    }
    best.value = best.value.max(0.0);
    best
}

pub fn oracle_sym(rho: &DensityMatrix, step_deg: f64, starts: usize) -> f64 {
    oracle_side(rho, Side::A, step_deg, starts)
        .value
        .min(oracle_side(rho, Side::B, step_deg, starts).value)
}
