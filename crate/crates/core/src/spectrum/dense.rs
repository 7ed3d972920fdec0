//! Dense operator construction for small site counts.

use crate::pauli::{PauliString, TermSum};
use nalgebra::DMatrix;

/// Materializes a term sum as a dense real symmetric matrix in the
/// computational basis. Each term contributes one entry per column:
/// `m[c ^ x_mask, c] += coeff * sign(z_mask & c)`.
pub fn dense_matrix(ts: &TermSum) -> DMatrix<f64> {
    let n = ts.n_sites();
    assert!(n <= 13, "dense matrix for {n} sites would be too large");
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for (coeff, s) in ts.terms() {
        let xm = s.x_mask().as_u64() as usize;
        let zm = s.z_mask().as_u64() as usize;
        for c in 0..dim {
            let sign = if ((zm & c).count_ones() & 1) == 1 {
                -coeff
            } else {
                *coeff
            };
            m[(c ^ xm, c)] += sign;
        }
    }
    m
}

/// Materializes the block of `ts` on one eigenspace of an X-type parity
/// string that commutes with every term.
///
/// Basis states pair up as `b <-> b ^ p`; the representative of each pair is
/// the numerically smaller index and the sector basis vector is
/// `(|b> ± |b^p>)/√2`. For a term sending `c` to `d = c ^ x_mask` with signs
/// `s1 = sign(z_mask & c)` and `s2 = sign(z_mask & (c^p))`, the projected
/// element at `(rep(d), rep(c))` is `coeff (s1 + s2)/2` in the even sector and
/// `± coeff (s1 + s2)/2` in the odd sector, negated when `d` is not its own
/// representative.
pub fn parity_projected_matrix(ts: &TermSum, parity: &PauliString, even: bool) -> DMatrix<f64> {
    let n = ts.n_sites();
    assert!(n <= 13, "projected matrix for {n} sites would be too large");
    assert!(parity.is_x_type() && !parity.x_mask().is_zero());
    assert_eq!(parity.n_sites(), n);
    let dim = 1usize << n;
    let p = parity.x_mask().as_u64() as usize;
    let mut index = vec![usize::MAX; dim];
    let mut reps = Vec::with_capacity(dim / 2);
    for b in 0..dim {
        if b < b ^ p {
            index[b] = reps.len();
            reps.push(b);
        }
    }
    let mut m = DMatrix::zeros(reps.len(), reps.len());
    for (coeff, s) in ts.terms() {
        let xm = s.x_mask().as_u64() as usize;
        let zm = s.z_mask().as_u64() as usize;
        for (col, &c) in reps.iter().enumerate() {
            let s1 = if ((zm & c).count_ones() & 1) == 1 { -1.0 } else { 1.0 };
            let s2 = if ((zm & (c ^ p)).count_ones() & 1) == 1 { -1.0 } else { 1.0 };
            let d = c ^ xm;
            let rep_d = d.min(d ^ p);
            let mut val = coeff * (s1 + s2) / 2.0;
            if !even && d != rep_d {
                val = -val;
            }
            m[(index[rep_d], col)] += val;
        }
    }
    m
}

/// All eigenvalues of a dense real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut vals: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}
