//! Matrix-free Lanczos with full reorthogonalization, progressive locking of
//! converged eigenpairs, and restarts.
//!
//! Converged Ritz pairs are locked and deflated out of subsequent rounds, so
//! degenerate eigenvalues are recovered with their multiplicities: once one
//! copy is locked, the next round finds the next copy in the orthogonal
//! complement. An optional X-type parity projector confines the iteration to
//! one symmetry sector.

use super::{SolverOptions, SpectrumError};
use crate::pauli::{PauliString, TermSum};
use nalgebra::DMatrix;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const PAR_THRESHOLD: usize = 1 << 15;
const CHUNK: usize = 1 << 13;

/// A term sum compiled for fast repeated application: pure Z strings are
/// folded into a precomputed diagonal, pure X strings become XOR gathers.
pub struct CompiledOp {
    dim: usize,
    x_terms: Vec<(f64, usize)>,
    mixed: Vec<(f64, usize, usize)>,
    diag: Vec<f64>,
    parity: Option<(usize, f64)>,
}

impl CompiledOp {
    /// Compiles `ts`, optionally attached to one eigenspace of an X-type
    /// parity string (`sign` = ±1 selects the sector).
    pub fn compile(
        ts: &TermSum,
        parity: Option<(&PauliString, i8)>,
    ) -> Result<Self, SpectrumError> {
        let n = ts.n_sites();
        if n > 30 {
            return Err(SpectrumError::TooManySites(n));
        }
        let dim = 1usize << n;
        let mut x_terms = Vec::new();
        let mut z_terms: Vec<(f64, usize)> = Vec::new();
        let mut mixed = Vec::new();
        let mut constant = 0.0;
        for (c, s) in ts.terms() {
            let xm = s.x_mask().as_u64() as usize;
            let zm = s.z_mask().as_u64() as usize;
            match (xm, zm) {
                (0, 0) => constant += c,
                (x, 0) => x_terms.push((*c, x)),
                (0, z) => z_terms.push((*c, z)),
                (x, z) => mixed.push((*c, x, z)),
            }
        }
        let mut diag = vec![constant; dim];
        diag.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, ds)| {
            let base = ci * CHUNK;
            for &(c, zm) in &z_terms {
                for (i, d) in ds.iter_mut().enumerate() {
                    let b = base + i;
                    *d += if ((zm & b).count_ones() & 1) == 1 { -c } else { c };
                }
            }
        });
        let parity = match parity {
            None => None,
            Some((p, sign)) => {
                if !p.is_x_type() || p.x_mask().is_zero() || p.n_sites() != n {
                    return Err(SpectrumError::BadParity);
                }
                Some((p.x_mask().as_u64() as usize, f64::from(sign)))
            }
        };
        Ok(Self {
            dim,
            x_terms,
            mixed,
            diag,
            parity,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the iteration space (halved inside a parity sector).
    pub fn subspace_dim(&self) -> usize {
        if self.parity.is_some() {
            self.dim / 2
        } else {
            self.dim
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        let run = |y: &mut [f64], base: usize| {
            for (i, yv) in y.iter_mut().enumerate() {
                *yv = self.diag[base + i] * x[base + i];
            }
            for &(c, xm) in &self.x_terms {
                for (i, yv) in y.iter_mut().enumerate() {
                    *yv += c * x[(base + i) ^ xm];
                }
            }
            for &(c, xm, zm) in &self.mixed {
                for (i, yv) in y.iter_mut().enumerate() {
                    let src = (base + i) ^ xm;
                    *yv += if ((zm & src).count_ones() & 1) == 1 {
                        -c * x[src]
                    } else {
                        c * x[src]
                    };
                }
            }
        };
        if self.dim >= PAR_THRESHOLD {
            y.par_chunks_mut(CHUNK)
                .enumerate()
                .for_each(|(ci, ys)| run(ys, ci * CHUNK));
        } else {
            run(y, 0);
        }
    }

    /// Projects a vector onto the configured parity sector. A no-op without a
    /// projector. Applied after every matvec to stop roundoff leakage out of
    /// the sector.
    pub fn project(&self, v: &mut [f64]) {
        let Some((p, sign)) = self.parity else { return };
        for b in 0..self.dim {
            let partner = b ^ p;
            if b < partner {
                let avg = 0.5 * (v[b] + sign * v[partner]);
                v[b] = avg;
                v[partner] = sign * avg;
            }
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    if a.len() >= PAR_THRESHOLD {
        a.par_chunks(CHUNK)
            .zip(b.par_chunks(CHUNK))
            .map(|(xa, xb)| xa.iter().zip(xb).map(|(u, v)| u * v).sum::<f64>())
            .sum()
    } else {
        a.iter().zip(b).map(|(u, v)| u * v).sum()
    }
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    if y.len() >= PAR_THRESHOLD {
        y.par_chunks_mut(CHUNK)
            .zip(x.par_chunks(CHUNK))
            .for_each(|(ys, xs)| {
                for (yv, xv) in ys.iter_mut().zip(xs) {
                    *yv += a * xv;
                }
            });
    } else {
        for (yv, xv) in y.iter_mut().zip(x) {
            *yv += a * xv;
        }
    }
}

fn scale(v: &mut [f64], a: f64) {
    if v.len() >= PAR_THRESHOLD {
        v.par_chunks_mut(CHUNK).for_each(|vs| {
            for x in vs {
                *x *= a;
            }
        });
    } else {
        for x in v {
            *x *= a;
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-0.5..0.5)).collect()
}

/// Removes the components of `v` along each unit vector in `others`.
/// A second Gram-Schmidt pass runs only when the first one shrank the vector
/// enough to make cancellation plausible.
fn orthogonalize(v: &mut [f64], others: &[Vec<f64>]) {
    if others.is_empty() {
        return;
    }
    let before = norm(v);
    for u in others {
        let c = dot(v, u);
        if c != 0.0 {
            axpy(v, -c, u);
        }
    }
    if norm(v) < 0.7 * before {
        for u in others {
            let c = dot(v, u);
            if c != 0.0 {
                axpy(v, -c, u);
            }
        }
    }
}

struct RitzState {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    order: Vec<usize>,
    invariant: bool,
}

fn ritz_of(alphas: &[f64], betas: &[f64], invariant: bool) -> RitzState {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for j in 0..m {
        t[(j, j)] = alphas[j];
        if j + 1 < m {
            t[(j, j + 1)] = betas[j];
            t[(j + 1, j)] = betas[j];
        }
    }
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    RitzState {
        values: eig.eigenvalues.iter().copied().collect(),
        vectors: eig.eigenvectors,
        order,
        invariant,
    }
}

/// The `k` smallest eigenpairs of a compiled operator, ascending with
/// multiplicity (clamped to the subspace dimension).
///
/// One Krylov space carries at most one vector per eigenspace, so converged
/// Ritz pairs are locked, deflated out, and the search repeats in the
/// orthogonal complement until a fresh randomly-started round confirms that
/// the smallest eigenvalue left exceeds the k-th locked one. That final round
/// is what recovers degenerate multiplicities.
///
/// `warm` seeds the first Krylov space, which makes parameter scans cheap
/// when consecutive operators are close. Starting vectors are otherwise
/// pseudorandom from the option seed; converged eigenvalues do not depend on
/// the seed beyond the solver tolerance.
pub fn smallest_eigenpairs(
    op: &CompiledOp,
    k: usize,
    opts: &SolverOptions,
    warm: Option<&[f64]>,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), SpectrumError> {
    let sub_dim = op.subspace_dim();
    let k = k.min(sub_dim);
    if k == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let max_basis = if opts.max_basis > 0 {
        opts.max_basis
    } else if op.dim() >= 1 << 19 {
        (2 * k + 16).max(40)
    } else {
        (2 * k + 16).max(48)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked_vals: Vec<f64> = Vec::new();
    let mut locked_vecs: Vec<Vec<f64>> = Vec::new();
    let mut start: Option<Vec<f64>> = warm.map(<[f64]>::to_vec);
    let mut rounds = 0usize;
    let mut total_iters = 0usize;
    let mut certified = false;

    while !certified {
        let cap = max_basis.min(sub_dim - locked_vals.len());
        if cap == 0 {
            break; // the whole subspace is locked
        }
        if rounds >= opts.max_restarts {
            return Err(SpectrumError::NoConvergence {
                iterations: total_iters,
                locked: locked_vals.len(),
                wanted: k,
            });
        }
        rounds += 1;
        let certifying = locked_vals.len() >= k;
        let mut v = start.take().unwrap_or_else(|| random_vector(&mut rng, op.dim()));
        op.project(&mut v);
        orthogonalize(&mut v, &locked_vecs);
        let nv = norm(&v);
        if nv < 1e-8 {
            // Start vector collapsed into the locked span; retry randomly.
            continue;
        }
        scale(&mut v, 1.0 / nv);

        let needed = (k - locked_vals.len()).max(1);
        let kth_before = kth_smallest(&locked_vals, k);
        let mut basis: Vec<Vec<f64>> = vec![v];
        let mut alphas: Vec<f64> = Vec::with_capacity(cap);
        let mut betas: Vec<f64> = Vec::with_capacity(cap);
        let mut w = vec![0.0; op.dim()];
        let mut ritz: Option<RitzState> = None;
        for j in 0..cap {
            op.matvec(&basis[j], &mut w);
            op.project(&mut w);
            let alpha = dot(&w, &basis[j]);
            alphas.push(alpha);
            axpy(&mut w, -alpha, &basis[j]);
            if j > 0 {
                let b = betas[j - 1];
                axpy(&mut w, -b, &basis[j - 1]);
            }
            orthogonalize(&mut w, &locked_vecs);
            orthogonalize(&mut w, &basis);
            let beta = norm(&w);
            betas.push(beta);
            total_iters += 1;
            let scale_est = alphas
                .iter()
                .chain(betas.iter())
                .fold(1.0f64, |m, x| m.max(x.abs()));
            if beta <= 1e-14 * scale_est {
                ritz = Some(ritz_of(&alphas, &betas, true));
                break;
            }
            let last = j + 1 == cap;
            if last || (j + 1) % 8 == 0 {
                let state = ritz_of(&alphas, &betas, false);
                let sc = state
                    .values
                    .iter()
                    .fold(1.0f64, |m, x| m.max(x.abs()));
                let m = alphas.len();
                let residual =
                    |i: usize| (beta * state.vectors[(m - 1, i)]).abs();
                if certifying {
                    // A certification round only has to show that the
                    // smallest eigenvalue left in the complement is not below
                    // the k-th locked value; the one-sided Ritz bound
                    // theta - residual does that long before full
                    // convergence when the spectrum is actually clean.
                    let i0 = state.order[0];
                    let theta0 = state.values[i0];
                    let slack = (opts.tol * 16.0).max(1e-12) * sc;
                    let kv = kth_before.expect("certifying implies k locked");
                    if theta0 - residual(i0) >= kv - slack {
                        certified = true;
                        ritz = Some(state);
                        break;
                    }
                    if residual(i0) <= opts.tol * sc {
                        ritz = Some(state);
                        break;
                    }
                } else {
                    let converged_prefix = state
                        .order
                        .iter()
                        .take(needed)
                        .take_while(|&&i| residual(i) <= opts.tol * sc)
                        .count();
                    if converged_prefix >= needed {
                        ritz = Some(state);
                        break;
                    }
                }
                if last {
                    ritz = Some(state);
                    break;
                }
            }
            let mut vn = w.clone();
            scale(&mut vn, 1.0 / beta);
            basis.push(vn);
        }
        if certified {
            break;
        }

        let state = ritz.expect("ritz state computed before leaving the loop");
        let m = alphas.len();
        let beta_last = betas[m - 1];
        let sc = state.values.iter().fold(1.0f64, |mx, x| mx.max(x.abs()));
        let slack = (opts.tol * 16.0).max(1e-12) * sc;
        let mut first_converged: Option<f64> = None;
        let mut next_start = None;
        let locked_before = locked_vals.len();
        for &i in &state.order {
            let theta = state.values[i];
            let resid = if state.invariant {
                0.0
            } else {
                (beta_last * state.vectors[(m - 1, i)]).abs()
            };
            if resid <= opts.tol * sc {
                if first_converged.is_none() {
                    first_converged = Some(theta);
                }
                // Lock while short of k, or when the complement holds a value
                // below the current k-th (a missed degenerate copy).
                let kth = kth_smallest(&locked_vals, k);
                let must_insert = kth.is_some_and(|kv| theta < kv - slack);
                if locked_vals.len() >= k && !must_insert {
                    break;
                }
                let mut x = vec![0.0; op.dim()];
                for (j, basis_vec) in basis.iter().enumerate() {
                    axpy(&mut x, state.vectors[(j, i)], basis_vec);
                }
                op.project(&mut x);
                orthogonalize(&mut x, &locked_vecs);
                let nx = norm(&x);
                if nx > 1e-8 {
                    scale(&mut x, 1.0 / nx);
                    locked_vals.push(theta);
                    locked_vecs.push(x);
                }
            } else {
                // Continue the search from the first unconverged Ritz vector.
                let mut x = vec![0.0; op.dim()];
                for (j, basis_vec) in basis.iter().enumerate() {
                    axpy(&mut x, state.vectors[(j, i)], basis_vec);
                }
                next_start = Some(x);
                break;
            }
        }
        if certifying {
            if let (Some(theta), Some(kv)) = (first_converged, kth_smallest(&locked_vals, k)) {
                if theta >= kv - slack {
                    break; // nothing smaller left in the complement
                }
            }
        }
        // A Krylov chain never sees a second copy of an eigenvalue it has
        // already produced, so once the locked set changes the next round
        // must start from a fresh random direction.
        start = if locked_vals.len() != locked_before {
            None
        } else {
            next_start
        };
    }

    let mut idx: Vec<usize> = (0..locked_vals.len()).collect();
    idx.sort_by(|&a, &b| locked_vals[a].total_cmp(&locked_vals[b]));
    let values = idx.iter().take(k).map(|&i| locked_vals[i]).collect();
    let vectors = idx
        .iter()
        .take(k)
        .map(|&i| std::mem::take(&mut locked_vecs[i]))
        .collect();
    Ok((values, vectors))
}

/// The k-th smallest locked value (1-based), when at least k are locked.
fn kth_smallest(vals: &[f64], k: usize) -> Option<f64> {
    if vals.len() < k {
        return None;
    }
    let mut sorted: Vec<f64> = vals.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(sorted[k - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;

    fn paramagnet(n: usize) -> TermSum {
        let mut ts = TermSum::new(n);
        for i in 0..n {
            ts.add(-1.0, PauliString::x_string(n, &[i]));
        }
        ts
    }

    #[test]
    fn paramagnet_ladder() {
        let ts = paramagnet(5);
        let op = CompiledOp::compile(&ts, None).unwrap();
        let opts = SolverOptions::default();
        let (vals, _) = smallest_eigenpairs(&op, 2, &opts, None).unwrap();
        assert!((vals[0] + 5.0).abs() < 1e-10);
        assert!((vals[1] + 3.0).abs() < 1e-10);
    }

    #[test]
    fn degenerate_multiplicities_are_recovered() {
        // -X0 -X1: spectrum {-2, 0, 0, 2}; the double zero must appear twice.
        let ts = paramagnet(2);
        let op = CompiledOp::compile(&ts, None).unwrap();
        let opts = SolverOptions::default();
        let (vals, vecs) = smallest_eigenpairs(&op, 3, &opts, None).unwrap();
        assert!((vals[0] + 2.0).abs() < 1e-10);
        assert!(vals[1].abs() < 1e-10);
        assert!(vals[2].abs() < 1e-10);
        // Locked vectors are orthonormal.
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&vecs[i], &vecs[j]) - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn parity_projection_selects_a_sector() {
        // -ΣX on 3 sites: ground state is fully symmetric (even sector);
        // the odd sector starts at -1 instead of -3.
        let ts = paramagnet(3);
        let parity = PauliString::x_string(3, &[0, 1, 2]);
        let opts = SolverOptions::default();
        let even = CompiledOp::compile(&ts, Some((&parity, 1))).unwrap();
        let (vals, _) = smallest_eigenpairs(&even, 1, &opts, None).unwrap();
        assert!((vals[0] + 3.0).abs() < 1e-10);
        let odd = CompiledOp::compile(&ts, Some((&parity, -1))).unwrap();
        let (vals, _) = smallest_eigenpairs(&odd, 1, &opts, None).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-10);
    }

    #[test]
    fn matvec_matches_apply() {
        use rand::RngExt;
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut ts = TermSum::new(6);
        ts.add(-0.8, PauliString::x_string(6, &[0]));
        ts.add(0.5, PauliString::z_string(6, &[1, 2]));
        ts.add(-1.2, PauliString::x_string(6, &[2, 4]));
        ts.add(0.9, PauliString::z_string(6, &[0, 3, 5]));
        let op = CompiledOp::compile(&ts, None).unwrap();
        let x: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut y = vec![0.0; 64];
        op.matvec(&x, &mut y);
        let want = ts.apply(&x).unwrap();
        for i in 0..64 {
            assert!((y[i] - want[i]).abs() < 1e-14);
        }
    }
}
