//! Frequency Selective Extrapolation of a single window.
//!
//! The signal inside a window is approximated by a real superposition of 2-D
//! DFT basis functions. Every iteration picks the basis function whose
//! weighted projection onto the residual removes the most weighted energy,
//! adds a damped (orthogonality deficiency compensated) share of that
//! projection to the model, and subtracts it from the residual.
//!
//! Projections of all candidates equal the DFT of the weighted residual
//! divided by the total weight. Rather than re-projecting, the solver keeps
//! that spectrum and updates it with the shifted spectrum of the weights
//! after each selection, so one iteration costs O(M·N).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

use crate::grid::{AreaClass, Window};

#[derive(Debug, Clone, PartialEq)]
pub enum FseError {
    /// No sample of the window carries positive weight.
    DegenerateWindow,
    InvalidParams(&'static str),
}

impl fmt::Display for FseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FseError::DegenerateWindow => f.write_str("window has no known or reconstructed samples to model"),
            FseError::InvalidParams(why) => write!(f, "invalid FSE parameters: {why}"),
        }
    }
}

impl core::error::Error for FseError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FseParams {
    /// Width of the support frame around a block, in samples.
    pub d: usize,
    /// Decay base of the spatial weighting.
    pub rho: f64,
    /// Attenuation of reconstructed samples.
    pub delta: f64,
    /// Orthogonality deficiency compensation factor.
    pub gamma: f64,
    pub iterations: usize,
    pub block_size: usize,
}

impl Default for FseParams {
    fn default() -> Self {
        FseParams {
            d: 16,
            rho: 0.8,
            delta: 0.2,
            gamma: 0.5,
            iterations: 200,
            block_size: 16,
        }
    }
}

impl FseParams {
    pub fn validate(&self) -> Result<(), FseError> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(FseError::InvalidParams("rho must lie in (0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(FseError::InvalidParams("delta must lie in [0, 1]"));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(FseError::InvalidParams("gamma must lie in (0, 1]"));
        }
        if self.block_size == 0 {
            return Err(FseError::InvalidParams("block size must be positive"));
        }
        Ok(())
    }
}

/// Spatial weight of sample (m, n) in a `rows`×`cols` window.
///
/// Distance is measured from the window center even when a clipped window
/// puts the block off-center.
pub fn weight(m: usize, n: usize, rows: usize, cols: usize, class: AreaClass, params: &FseParams) -> f64 {
    let dm = m as f64 - (rows as f64 - 1.0) / 2.0;
    let dn = n as f64 - (cols as f64 - 1.0) / 2.0;
    let decay = || libm::pow(params.rho, libm::sqrt(dm * dm + dn * dn));
    match class {
        AreaClass::A => decay(),
        AreaClass::R => params.delta * decay(),
        AreaClass::Bi | AreaClass::Bo => 0.0,
    }
}

/// φ_k[m, n] = exp(+j2π(k₁m/M + k₂n/N)), row-major over the window.
pub fn dft_basis(rows: usize, cols: usize, k: (usize, usize)) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(rows * cols);
    for m in 0..rows {
        for n in 0..cols {
            let phase = 2.0 * PI * (((k.0 * m) % rows) as f64 / rows as f64 + ((k.1 * n) % cols) as f64 / cols as f64);
            out.push(Complex64::new(libm::cos(phase), libm::sin(phase)));
        }
    }
    out
}

/// Result of model generation over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub rows: usize,
    pub cols: usize,
    /// Expansion coefficient per selected basis index (k₁, k₂).
    pub coeffs: BTreeMap<(usize, usize), Complex64>,
    /// Real model g[m, n] over the whole window.
    pub synthesized: Vec<f64>,
}

/// One basis selection made by [`Solver::step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub index: (usize, usize),
    /// Weighted projection of the residual onto the selected basis function.
    pub projection: Complex64,
    /// Whether the index is its own conjugate (updated alone, real part only).
    pub self_conjugate: bool,
}

/// Iterative FSE model generator for one window.
#[derive(Debug, Clone)]
pub struct Solver {
    rows: usize,
    cols: usize,
    gamma: f64,
    weights: Vec<f64>,
    total_weight: f64,
    /// e^{-j2π t/M}, t < M.
    row_tw: Vec<Complex64>,
    /// e^{-j2π t/N}, t < N.
    col_tw: Vec<Complex64>,
    weight_spectrum: Vec<Complex64>,
    residual_spectrum: Vec<Complex64>,
    coeffs: BTreeMap<(usize, usize), Complex64>,
    initial: Vec<f64>,
    residual: Option<Vec<f64>>,
    iterations: usize,
}

fn twiddles(len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|t| {
            let phase = -2.0 * PI * t as f64 / len as f64;
            Complex64::new(libm::cos(phase), libm::sin(phase))
        })
        .collect()
}

/// Forward 2-D DFT of a real plane, separable, direct summation.
fn dft2(rows: usize, cols: usize, data: &[f64], row_tw: &[Complex64], col_tw: &[Complex64]) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut tmp = vec![zero; rows * cols];
    for m in 0..rows {
        let src = &data[m * cols..(m + 1) * cols];
        if src.iter().all(|&v| v == 0.0) {
            continue;
        }
        let dst = &mut tmp[m * cols..(m + 1) * cols];
        for (k2, out) in dst.iter_mut().enumerate() {
            let mut acc = zero;
            let mut t = 0;
            for &v in src {
                acc += col_tw[t] * v;
                t += k2;
                if t >= cols {
                    t -= cols;
                }
            }
            *out = acc;
        }
    }
    let mut out = vec![zero; rows * cols];
    for k1 in 0..rows {
        let dst = &mut out[k1 * cols..(k1 + 1) * cols];
        let mut t = 0;
        for m in 0..rows {
            let tw = row_tw[t];
            for (o, &s) in dst.iter_mut().zip(&tmp[m * cols..(m + 1) * cols]) {
                *o += s * tw;
            }
            t += k1;
            if t >= rows {
                t -= rows;
            }
        }
    }
    out
}

impl Solver {
    pub fn new(win: &Window, params: &FseParams) -> Result<Self, FseError> {
        Self::build(win, params, false)
    }

    /// Like [`Solver::new`], additionally maintaining the spatial residual so
    /// [`Solver::residual`] and [`Solver::residual_energy`] are available.
    pub fn tracking(win: &Window, params: &FseParams) -> Result<Self, FseError> {
        Self::build(win, params, true)
    }

    fn build(win: &Window, params: &FseParams, track: bool) -> Result<Self, FseError> {
        params.validate()?;
        let (rows, cols) = (win.rows, win.cols);
        let mut weights = Vec::with_capacity(rows * cols);
        for m in 0..rows {
            for n in 0..cols {
                weights.push(weight(m, n, rows, cols, win.class[m * cols + n], params));
            }
        }
        let total_weight: f64 = weights.iter().sum();
        if total_weight.is_nan() || total_weight <= 0.0 {
            return Err(FseError::DegenerateWindow);
        }
        let initial: Vec<f64> = win
            .values
            .iter()
            .zip(&weights)
            .map(|(&v, &w)| if w > 0.0 { v } else { 0.0 })
            .collect();
        let weighted: Vec<f64> = initial.iter().zip(&weights).map(|(v, w)| v * w).collect();
        let row_tw = twiddles(rows);
        let col_tw = twiddles(cols);
        let weight_spectrum = dft2(rows, cols, &weights, &row_tw, &col_tw);
        let residual_spectrum = dft2(rows, cols, &weighted, &row_tw, &col_tw);
        Ok(Solver {
            rows,
            cols,
            gamma: params.gamma,
            weights,
            total_weight,
            row_tw,
            col_tw,
            weight_spectrum,
            residual_spectrum,
            coeffs: BTreeMap::new(),
            residual: track.then(|| initial.clone()),
            initial,
            iterations: 0,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn coeffs(&self) -> &BTreeMap<(usize, usize), Complex64> {
        &self.coeffs
    }

    /// Residual the model started from: window values where weighted, else 0.
    pub fn initial_residual(&self) -> &[f64] {
        &self.initial
    }

    /// Current weighted projections p_k, row-major over (k₁, k₂).
    pub fn projections(&self) -> Vec<Complex64> {
        let s = self.total_weight;
        self.residual_spectrum.iter().map(|r| r / s).collect()
    }

    pub fn residual(&self) -> Option<&[f64]> {
        self.residual.as_deref()
    }

    /// Σ w·r² over the window, when tracking.
    pub fn residual_energy(&self) -> Option<f64> {
        self.residual
            .as_ref()
            .map(|r| r.iter().zip(&self.weights).map(|(r, w)| w * r * r).sum())
    }

    #[inline]
    fn conjugate_index(&self, k: (usize, usize)) -> (usize, usize) {
        ((self.rows - k.0) % self.rows, (self.cols - k.1) % self.cols)
    }

    fn select(&self) -> usize {
        let mut best = 0;
        let mut best_energy = f64::NEG_INFINITY;
        for (i, r) in self.residual_spectrum.iter().enumerate() {
            let e = r.norm_sqr();
            if e > best_energy {
                best_energy = e;
                best = i;
            }
        }
        best
    }

    /// R(k) -= a·W(k − u) + b·W(k + u) for every k.
    fn update_spectrum(&mut self, u: (usize, usize), a: Complex64, b: Option<Complex64>) {
        let (rows, cols) = (self.rows, self.cols);
        let w = &self.weight_spectrum;
        for k1 in 0..rows {
            let minus_row = ((k1 + rows - u.0) % rows) * cols;
            let plus_row = ((k1 + u.0) % rows) * cols;
            let out = &mut self.residual_spectrum[k1 * cols..(k1 + 1) * cols];
            let mut minus = (cols - u.1) % cols;
            let mut plus = u.1 % cols;
            match b {
                Some(b) => {
                    for o in out.iter_mut() {
                        *o -= a * w[minus_row + minus] + b * w[plus_row + plus];
                        minus += 1;
                        if minus == cols {
                            minus = 0;
                        }
                        plus += 1;
                        if plus == cols {
                            plus = 0;
                        }
                    }
                }
                None => {
                    for o in out.iter_mut() {
                        *o -= a * w[minus_row + minus];
                        minus += 1;
                        if minus == cols {
                            minus = 0;
                        }
                    }
                }
            }
        }
    }

    #[inline]
    fn basis_at(&self, k: (usize, usize), m: usize, n: usize) -> Complex64 {
        (self.row_tw[(k.0 * m) % self.rows] * self.col_tw[(k.1 * n) % self.cols]).conj()
    }

    /// Runs one selection and update.
    pub fn step(&mut self) -> Selection {
        let best = self.select();
        let index = (best / self.cols, best % self.cols);
        let projection = self.residual_spectrum[best] / self.total_weight;
        let conj = self.conjugate_index(index);
        let self_conjugate = conj == index;

        let gamma = self.gamma;
        // Coefficient added to index; the conjugate index receives its conjugate.
        let (a, factor) = if self_conjugate {
            let a = Complex64::new(gamma * projection.re, 0.0);
            self.update_spectrum(index, a, None);
            *self.coeffs.entry(index).or_default() += a;
            (a, 1.0)
        } else {
            let a = projection * gamma;
            self.update_spectrum(index, a, Some(a.conj()));
            *self.coeffs.entry(index).or_default() += a;
            *self.coeffs.entry(conj).or_default() += a.conj();
            (a, 2.0)
        };

        if let Some(mut residual) = self.residual.take() {
            for m in 0..self.rows {
                for n in 0..self.cols {
                    let delta = factor * (a * self.basis_at(index, m, n)).re;
                    residual[m * self.cols + n] -= delta;
                }
            }
            self.residual = Some(residual);
        }

        self.iterations += 1;
        Selection {
            index,
            projection,
            self_conjugate,
        }
    }

    pub fn run(&mut self, iterations: usize) {
        for _ in 0..iterations {
            self.step();
        }
    }

    /// Real part of the model at window sample (m, n).
    pub fn synthesize_at(&self, m: usize, n: usize) -> f64 {
        self.coeffs.iter().map(|(&k, c)| (c * self.basis_at(k, m, n)).re).sum()
    }

    pub fn synthesize(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows * self.cols);
        for m in 0..self.rows {
            for n in 0..self.cols {
                out.push(self.synthesize_at(m, n));
            }
        }
        out
    }

    pub fn into_model(self) -> Model {
        let synthesized = self.synthesize();
        Model {
            rows: self.rows,
            cols: self.cols,
            coeffs: self.coeffs,
            synthesized,
        }
    }
}

/// Runs `params.iterations` iterations and returns the full model.
pub fn generate_model(win: &Window, params: &FseParams) -> Result<Model, FseError> {
    let mut solver = Solver::new(win, params)?;
    solver.run(params.iterations);
    Ok(solver.into_model())
}

/// Model values for the Bi samples of `win`, in row-major window order.
pub fn extrapolate_block(win: &Window, params: &FseParams) -> Result<Vec<f64>, FseError> {
    if !win.class.contains(&AreaClass::Bi) {
        return Ok(Vec::new());
    }
    let mut solver = Solver::new(win, params)?;
    solver.run(params.iterations);
    Ok(win.lost_in_block().map(|(m, n)| solver.synthesize_at(m, n)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BlockRect;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_a(rows: usize, cols: usize, values: Vec<f64>) -> Window {
        Window::from_parts(
            rows,
            cols,
            BlockRect {
                x: 0,
                y: 0,
                w: cols,
                h: rows,
            },
            vec![AreaClass::A; rows * cols],
            values,
        )
        .unwrap()
    }

    fn random_window(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Window {
        let block = BlockRect {
            x: cols / 3,
            y: rows / 3,
            w: cols / 3,
            h: rows / 3,
        };
        let mut class = Vec::new();
        let mut values = Vec::new();
        for m in 0..rows {
            for n in 0..cols {
                let lost = rng.gen_bool(0.3);
                class.push(match (lost, block.contains(n, m)) {
                    (true, true) => AreaClass::Bi,
                    (true, false) => AreaClass::Bo,
                    (false, _) if rng.gen_bool(0.2) => AreaClass::R,
                    _ => AreaClass::A,
                });
                values.push(rng.gen_range(0.0..255.0));
            }
        }
        Window::from_parts(rows, cols, block, class, values).unwrap()
    }

    /// Σ_x w·r·conj(φ_k) / Σ w by direct summation.
    fn direct_projection(weights: &[f64], residual: &[f64], rows: usize, cols: usize, k: (usize, usize)) -> Complex64 {
        let phi = dft_basis(rows, cols, k);
        let s: f64 = weights.iter().sum();
        let num: Complex64 = (0..rows * cols)
            .map(|i| phi[i].conj() * (weights[i] * residual[i]))
            .sum();
        num / s
    }

    #[test]
    fn weight_examples() {
        let p = FseParams::default();
        assert_eq!(weight(3, 1, 9, 9, AreaClass::Bi, &p), 0.0);
        assert_eq!(weight(3, 1, 9, 9, AreaClass::Bo, &p), 0.0);
        assert_eq!(weight(4, 4, 9, 9, AreaClass::A, &p), 1.0);
        let a = weight(1, 7, 9, 9, AreaClass::A, &p);
        let r = weight(1, 7, 9, 9, AreaClass::R, &p);
        assert!((r / a - p.delta).abs() < 1e-15);
        // distance sqrt(3² + 4²) = 5
        assert!((weight(1, 8, 9, 9, AreaClass::A, &p) - 0.8f64.powi(5)).abs() < 1e-15);
    }

    #[test]
    fn weight_decays_with_distance() {
        let p = FseParams::default();
        let (rows, cols) = (20, 17);
        let mut pts: Vec<(f64, f64)> = (0..rows)
            .flat_map(|m| (0..cols).map(move |n| (m, n)))
            .map(|(m, n)| {
                let dm = m as f64 - 9.5;
                let dn = n as f64 - 8.0;
                ((dm * dm + dn * dn).sqrt(), weight(m, n, rows, cols, AreaClass::A, &p))
            })
            .collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in pts.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-15);
        }
    }

    #[test]
    fn basis_examples() {
        let dc = dft_basis(3, 5, (0, 0));
        assert!(dc.iter().all(|c| (c - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        let alt = dft_basis(2, 3, (1, 0));
        for n in 0..3 {
            assert!((alt[n].re - 1.0).abs() < 1e-15);
            assert!((alt[3 + n].re + 1.0).abs() < 1e-12);
        }
        let (rows, cols) = (6, 5);
        for k1 in 0..rows {
            for k2 in 0..cols {
                let a = dft_basis(rows, cols, (k1, k2));
                let b = dft_basis(rows, cols, ((rows - k1) % rows, (cols - k2) % cols));
                for (x, y) in a.iter().zip(&b) {
                    assert!((x.conj() - y).norm() < 1e-12);
                    assert!((x.norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn separable_dft_matches_direct_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let win = random_window(&mut rng, 11, 14);
        let solver = Solver::tracking(&win, &FseParams::default()).unwrap();
        let proj = solver.projections();
        for k1 in 0..11 {
            for k2 in 0..14 {
                let direct = direct_projection(solver.weights(), solver.residual().unwrap(), 11, 14, (k1, k2));
                let got = proj[k1 * 14 + k2];
                assert!((got - direct).norm() <= 1e-9 * direct.norm().max(1.0));
            }
        }
    }

    #[test]
    fn incremental_projections_match_direct_after_iterations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let win = random_window(&mut rng, 16, 13);
        let mut solver = Solver::tracking(&win, &FseParams::default()).unwrap();
        solver.run(60);
        let proj = solver.projections();
        let residual = solver.residual().unwrap();
        let scale = proj.iter().map(|p| p.norm()).fold(0.0, f64::max);
        for k1 in 0..16 {
            for k2 in 0..13 {
                let direct = direct_projection(solver.weights(), residual, 16, 13, (k1, k2));
                assert!((proj[k1 * 13 + k2] - direct).norm() <= 1e-9 * scale.max(1.0));
            }
        }
    }

    #[test]
    fn tracked_residual_is_initial_minus_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let win = random_window(&mut rng, 12, 12);
        let mut solver = Solver::tracking(&win, &FseParams::default()).unwrap();
        solver.run(40);
        let g = solver.synthesize();
        for ((r, r0), g) in solver.residual().unwrap().iter().zip(solver.initial_residual()).zip(&g) {
            assert!((r - (r0 - g)).abs() < 1e-9);
        }
    }

    #[test]
    fn synthesized_plane_is_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let win = random_window(&mut rng, 10, 9);
        let model = generate_model(
            &win,
            &FseParams {
                iterations: 50,
                ..FseParams::default()
            },
        )
        .unwrap();
        let mut sum = vec![Complex64::new(0.0, 0.0); 90];
        for (&k, c) in &model.coeffs {
            for (s, phi) in sum.iter_mut().zip(dft_basis(10, 9, k)) {
                *s += c * phi;
            }
        }
        for (s, g) in sum.iter().zip(&model.synthesized) {
            assert!(s.im.abs() < 1e-9);
            assert!((s.re - g).abs() < 1e-9);
        }
        assert!(model.coeffs.len() <= 2 * 50);
    }

    #[test]
    fn constant_window_converges_to_constant() {
        let win = all_a(20, 20, vec![93.0; 400]);
        let model = generate_model(&win, &FseParams::default()).unwrap();
        assert!(model.synthesized.iter().all(|g| (g - 93.0).abs() < 1e-6));
    }

    #[test]
    fn zero_iterations_give_zero_model() {
        let win = all_a(5, 5, vec![10.0; 25]);
        let model = generate_model(
            &win,
            &FseParams {
                iterations: 0,
                ..FseParams::default()
            },
        )
        .unwrap();
        assert!(model.coeffs.is_empty());
        assert!(model.synthesized.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn single_pair_selected() {
        let (rows, cols, k) = (24, 20, (3, 5));
        let phi = dft_basis(rows, cols, k);
        let a = Complex64::new(17.0, -9.0);
        let values: Vec<f64> = phi.iter().map(|p| 2.0 * (a * p).re).collect();
        let win = all_a(rows, cols, values);
        let mut solver = Solver::tracking(&win, &FseParams::default()).unwrap();
        let e0 = solver.residual_energy().unwrap();
        solver.run(200);
        let keys: Vec<_> = solver.coeffs().keys().copied().collect();
        assert_eq!(keys, vec![k, (rows - k.0, cols - k.1)]);
        assert!(solver.residual_energy().unwrap() < 1e-9 * e0);
    }

    #[test]
    fn degenerate_window() {
        let block = BlockRect { x: 0, y: 0, w: 3, h: 3 };
        let win = Window::from_parts(3, 3, block, vec![AreaClass::Bi; 9], vec![0.0; 9]).unwrap();
        assert_eq!(
            generate_model(&win, &FseParams::default()).unwrap_err(),
            FseError::DegenerateWindow
        );
        assert_eq!(
            extrapolate_block(&win, &FseParams::default()).unwrap_err(),
            FseError::DegenerateWindow
        );
    }

    #[test]
    fn empty_bi_gives_empty_result() {
        let win = all_a(4, 4, vec![1.0; 16]);
        assert!(extrapolate_block(&win, &FseParams::default()).unwrap().is_empty());
    }

    #[test]
    fn hole_in_constant_surroundings() {
        let (rows, cols) = (36, 36);
        let block = BlockRect {
            x: 16,
            y: 16,
            w: 4,
            h: 4,
        };
        let class: Vec<_> = (0..rows * cols)
            .map(|i| {
                if block.contains(i % cols, i / cols) {
                    AreaClass::Bi
                } else {
                    AreaClass::A
                }
            })
            .collect();
        let win = Window::from_parts(rows, cols, block, class, vec![140.0; rows * cols]).unwrap();
        let out = extrapolate_block(&win, &FseParams::default()).unwrap();
        assert_eq!(out.len(), 16);
        assert!(out.iter().all(|v| v.is_finite() && (v - 140.0).abs() < 1e-6));
    }

    #[test]
    fn rejects_bad_params() {
        let win = all_a(3, 3, vec![1.0; 9]);
        for p in [
            FseParams {
                rho: 1.0,
                ..FseParams::default()
            },
            FseParams {
                delta: 1.5,
                ..FseParams::default()
            },
            FseParams {
                gamma: 0.0,
                ..FseParams::default()
            },
        ] {
            assert!(matches!(Solver::new(&win, &p), Err(FseError::InvalidParams(_))));
        }
    }

    #[test]
    fn residual_energy_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..5 {
            let win = random_window(&mut rng, 18, 21);
            let mut solver = Solver::tracking(&win, &FseParams::default()).unwrap();
            let mut prev = solver.residual_energy().unwrap();
            for _ in 0..100 {
                solver.step();
                let e = solver.residual_energy().unwrap();
                assert!(e <= prev + 1e-12 * prev.max(1.0));
                prev = e;
            }
        }
    }

    #[test]
    fn output_is_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let win = random_window(&mut rng, 14, 14);
        let a = generate_model(&win, &FseParams::default()).unwrap();
        let b = generate_model(&win, &FseParams::default()).unwrap();
        assert_eq!(a, b);
    }
}
