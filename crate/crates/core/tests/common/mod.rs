//! Independent reference models shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use fdss_core::{FilterTaps, NormMode, SystemConfig};
use num_complex::Complex64 as C;
use rand::Rng;

pub type Mat = Vec<Vec<C>>;

pub fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![C::new(0.0, 0.0); cols]; rows]
}

/// Unitary DFT matrix; `inverse` flips the exponent sign.
pub fn dft_matrix(n: usize, inverse: bool) -> Mat {
    let sign = if inverse { 1.0 } else { -1.0 };
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|m| C::from_polar(scale, sign * 2.0 * PI * ((k * m) % n) as f64 / n as f64))
                .collect()
        })
        .collect()
}

pub fn matvec(a: &Mat, x: &[C]) -> Vec<C> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

/// Extension matrix: row `r` of the extended block copies data bin
/// `(r - n_se) mod n_data`.
pub fn extension_matrix(n_data: usize, n_se: usize) -> Mat {
    let n_sc = n_data + 2 * n_se;
    let mut e = zeros(n_sc, n_data);
    for (r, row) in e.iter_mut().enumerate() {
        let m = (r + n_data - n_se) % n_data;
        row[m] = C::new(1.0, 0.0);
    }
    e
}

/// Places subcarrier `k` on FFT bin `k - n_sc/2` (wrapped), centring the block on DC.
pub fn placement_matrix(n_sc: usize, n_fft: usize) -> Mat {
    let mut p = zeros(n_fft, n_sc);
    let half = n_sc / 2;
    for k in 0..n_sc {
        let bin = if k >= half { k - half } else { n_fft - (half - k) };
        p[bin][k] = C::new(1.0, 0.0);
    }
    p
}

pub fn qpsk(s: &[usize]) -> Vec<C> {
    s.iter()
        .map(|&i| {
            let (re, im) = match i {
                1 => (1.0, 1.0),
                2 => (1.0, -1.0),
                3 => (-1.0, 1.0),
                4 => (-1.0, -1.0),
                _ => panic!("bad index"),
            };
            C::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
        })
        .collect()
}

/// Every stage of the noiseless chain computed with explicit matrices.
pub struct DenseTrace {
    pub x: Vec<C>,
    pub freq: Vec<C>,
    pub extended: Vec<C>,
    pub shaped: Vec<C>,
    pub tx: Vec<C>,
    pub rx_band: Vec<C>,
    pub matched: Vec<C>,
    pub combined: Vec<C>,
    pub equalized: Vec<C>,
    pub y: Vec<C>,
}

pub fn dense_chain(cfg: &SystemConfig, taps: &[f64], s: &[usize]) -> DenseTrace {
    let (n, se, n_fft) = (cfg.n_data, cfg.n_se, cfg.n_fft);
    let n_sc = n + 2 * se;
    let d = dft_matrix(n, false);
    let d_inv = dft_matrix(n, true);
    let w = dft_matrix(n_fft, false);
    let w_inv = dft_matrix(n_fft, true);
    let e = extension_matrix(n, se);
    let e_t = transpose(&e);
    let p = placement_matrix(n_sc, n_fft);
    let p_t = transpose(&p);
    let diag = |v: &[C]| -> Vec<C> { v.iter().zip(taps).map(|(a, &f)| a * f).collect() };

    let x = qpsk(s);
    let freq = matvec(&d, &x);
    let extended = matvec(&e, &freq);
    let shaped = diag(&extended);
    let tx = matvec(&w_inv, &matvec(&p, &shaped));
    let rx_band = matvec(&p_t, &matvec(&w, &tx));
    let matched = diag(&rx_band);
    let combined = matvec(&e_t, &matched);
    let f: Vec<C> = taps.iter().map(|&v| C::new(v, 0.0)).collect();
    let f2: Vec<C> = taps.iter().map(|&v| C::new(v * v, 0.0)).collect();
    let gains: Vec<f64> = match cfg.norm_mode {
        NormMode::Mrc => matvec(&e_t, &f2).iter().map(|g| g.re).collect(),
        NormMode::Literal => matvec(&e_t, &f).iter().map(|g| g.re * g.re).collect(),
    };
    let equalized: Vec<C> = combined.iter().zip(&gains).map(|(t, g)| t / g).collect();
    let y = matvec(&d_inv, &equalized);
    DenseTrace {
        x,
        freq,
        extended,
        shaped,
        tx,
        rx_band,
        matched,
        combined,
        equalized,
        y,
    }
}

pub fn max_abs_diff(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Random strictly positive, even-symmetric, unit-energy taps.
pub fn random_taps<R: Rng>(n_sc: usize, rng: &mut R) -> FilterTaps {
    let mut v = vec![0.0; n_sc];
    for k in 0..n_sc.div_ceil(2) {
        let t = rng.random_range(0.05..1.0);
        v[k] = t;
        v[n_sc - 1 - k] = t;
    }
    FilterTaps::normalized(v, 1.0).unwrap()
}
