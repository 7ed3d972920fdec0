//! Pauli-string sums in symplectic (x-mask, z-mask) form.
//!
//! Every Hamiltonian in this crate is a real-weighted sum of strings that are
//! free of Y factors, so each string is a pair of disjoint masks: sites
//! carrying an X factor and sites carrying a Z factor. Coefficients stay real
//! and matrices stay real symmetric in the computational basis.

use crate::gf2::BitVector;
use rayon::prelude::*;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("operators act on different site counts ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("product would contain a Y factor at site {0}")]
    YProduct(usize),
    #[error("x and z masks overlap at site {0}")]
    YFactor(usize),
    #[error("operator is not a pure X string")]
    NotXString,
    #[error("state vector length {0} does not match 2^{1}")]
    BadStateLength(usize, usize),
    #[error("sector value {0} is not +1 or -1")]
    BadSectorValue(i8),
}

/// A tensor product of I, X, and Z factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_sites: usize,
    x_mask: BitVector,
    z_mask: BitVector,
}

impl PauliString {
    pub fn identity(n_sites: usize) -> Self {
        Self {
            n_sites,
            x_mask: BitVector::zeros(n_sites),
            z_mask: BitVector::zeros(n_sites),
        }
    }

    /// Builds a string from masks, rejecting overlaps (which would be Y).
    pub fn new(x_mask: BitVector, z_mask: BitVector) -> Result<Self, PauliError> {
        if x_mask.len() != z_mask.len() {
            return Err(PauliError::SizeMismatch(x_mask.len(), z_mask.len()));
        }
        if !x_mask.disjoint(&z_mask) {
            let site = x_mask
                .ones()
                .find(|&i| z_mask.get(i))
                .expect("overlap exists");
            return Err(PauliError::YFactor(site));
        }
        Ok(Self {
            n_sites: x_mask.len(),
            x_mask,
            z_mask,
        })
    }

    /// X factors at the given 0-based sites.
    pub fn x_string(n_sites: usize, sites: &[usize]) -> Self {
        Self {
            n_sites,
            x_mask: BitVector::from_indices(n_sites, sites),
            z_mask: BitVector::zeros(n_sites),
        }
    }

    /// Z factors at the given 0-based sites.
    pub fn z_string(n_sites: usize, sites: &[usize]) -> Self {
        Self {
            n_sites,
            x_mask: BitVector::zeros(n_sites),
            z_mask: BitVector::from_indices(n_sites, sites),
        }
    }

    pub fn from_x_mask(mask: BitVector) -> Self {
        let n = mask.len();
        Self {
            n_sites: n,
            x_mask: mask,
            z_mask: BitVector::zeros(n),
        }
    }

    pub fn from_z_mask(mask: BitVector) -> Self {
        let n = mask.len();
        Self {
            n_sites: n,
            x_mask: BitVector::zeros(n),
            z_mask: mask,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn x_mask(&self) -> &BitVector {
        &self.x_mask
    }

    pub fn z_mask(&self) -> &BitVector {
        &self.z_mask
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask.is_zero() && self.z_mask.is_zero()
    }

    pub fn is_x_type(&self) -> bool {
        self.z_mask.is_zero()
    }

    pub fn is_z_type(&self) -> bool {
        self.x_mask.is_zero()
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.x_mask.weight() + self.z_mask.weight()
    }

    /// Symplectic commutation test: strings commute iff the X support of one
    /// overlaps the Z support of the other an even number of times in total.
    pub fn commutes(&self, other: &PauliString) -> Result<bool, PauliError> {
        if self.n_sites != other.n_sites {
            return Err(PauliError::SizeMismatch(self.n_sites, other.n_sites));
        }
        Ok(!(self.x_mask.dot(&other.z_mask) ^ self.z_mask.dot(&other.x_mask)))
    }

    /// Product of two strings. The result must stay Y-free; under that
    /// constraint no site-local reordering sign can arise, so the returned
    /// sign is +1 whenever the call succeeds.
    pub fn multiply(&self, other: &PauliString) -> Result<(PauliString, i8), PauliError> {
        if self.n_sites != other.n_sites {
            return Err(PauliError::SizeMismatch(self.n_sites, other.n_sites));
        }
        let mut x = self.x_mask.clone();
        x.xor_with(&other.x_mask);
        let mut z = self.z_mask.clone();
        z.xor_with(&other.z_mask);
        if let Some(site) = x.ones().find(|&i| z.get(i)) {
            return Err(PauliError::YProduct(site));
        }
        let sign = if self.z_mask.dot(&other.x_mask) { -1 } else { 1 };
        Ok((
            PauliString {
                n_sites: self.n_sites,
                x_mask: x,
                z_mask: z,
            },
            sign,
        ))
    }
}

/// A Hermitian operator: real coefficients on Y-free Pauli strings sharing one
/// site count. Duplicate strings are merged with exact coefficient addition
/// and exact-zero terms are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct TermSum {
    n_sites: usize,
    terms: Vec<(f64, PauliString)>,
}

impl TermSum {
    pub fn new(n_sites: usize) -> Self {
        Self {
            n_sites,
            terms: Vec::new(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds a term, merging with an existing equal string.
    pub fn add(&mut self, coefficient: f64, string: PauliString) {
        assert_eq!(
            string.n_sites(),
            self.n_sites,
            "term site count differs from the sum"
        );
        if let Some(pos) = self.terms.iter().position(|(_, s)| *s == string) {
            self.terms[pos].0 += coefficient;
            if self.terms[pos].0 == 0.0 {
                self.terms.remove(pos);
            }
        } else if coefficient != 0.0 {
            self.terms.push((coefficient, string));
        }
    }

    /// Hilbert-space dimension 2^n.
    pub fn dim(&self) -> usize {
        1usize << self.n_sites
    }

    /// Matrix-free application `y = H·x` in the computational basis.
    ///
    /// Basis state `b` has bit `i` set when site `i` points down, so a Z
    /// factor contributes the parity sign of `z_mask & b` and an X string
    /// sends `b` to `b ^ x_mask`.
    pub fn apply(&self, state: &[f64]) -> Result<Vec<f64>, PauliError> {
        if self.n_sites > 63 || state.len() != self.dim() {
            return Err(PauliError::BadStateLength(state.len(), self.n_sites));
        }
        let terms: Vec<(f64, u64, u64)> = self
            .terms
            .iter()
            .map(|(c, s)| (*c, s.x_mask.as_u64(), s.z_mask.as_u64()))
            .collect();
        let mut out = vec![0.0; state.len()];
        let chunk = 1usize << self.n_sites.min(14);
        out.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(ci, ys)| {
                let base = ci * chunk;
                for (i, y) in ys.iter_mut().enumerate() {
                    let b = (base + i) as u64;
                    let mut acc = 0.0;
                    for &(c, xm, zm) in &terms {
                        let src = b ^ xm;
                        let sign = if (zm & src).count_ones() & 1 == 1 { -c } else { c };
                        acc += sign * state[src as usize];
                    }
                    *y = acc;
                }
            });
        Ok(out)
    }

    /// One line per term in the dump format `coeff X:<sites> Z:<sites>` with
    /// 1-based, comma-separated site lists.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (c, s) in &self.terms {
            let fmt_sites = |mask: &BitVector| {
                mask.ones()
                    .map(|i| (i + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            writeln!(
                out,
                "{c:.17} X:{} Z:{}",
                fmt_sites(&s.x_mask),
                fmt_sites(&s.z_mask)
            )
            .unwrap();
        }
        out
    }
}

/// Values of pure X-string charges on a product state of X eigenstates,
/// given as one ±1 eigenvalue per spin: each charge evaluates to the product
/// of eigenvalues over its support.
pub fn expectation_sector(
    charges: &[PauliString],
    state: &[i8],
) -> Result<Vec<i8>, PauliError> {
    for &v in state {
        if v != 1 && v != -1 {
            return Err(PauliError::BadSectorValue(v));
        }
    }
    charges
        .iter()
        .map(|charge| {
            if !charge.is_x_type() {
                return Err(PauliError::NotXString);
            }
            if charge.n_sites() != state.len() {
                return Err(PauliError::SizeMismatch(charge.n_sites(), state.len()));
            }
            Ok(charge.x_mask().ones().map(|i| state[i]).product())
        })
        .collect()
}
