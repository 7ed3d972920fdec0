//! Sector duality for 3-XORSAT annealing Hamiltonians.
//!
//! The transformation assigns one dual spin per independent parity constraint
//! and rewrites the annealing Hamiltonian in terms of dual operators whose
//! coefficients carry the conserved-charge values of the chosen symmetry
//! sector. The pipeline is pure GF(2) linear algebra: pick a row basis of the
//! incidence matrix, build the left inverse pinning the dual Z operators, and
//! read the conserved charges off a canonical kernel basis. Restricting to a
//! sector then produces a concrete operator on `r` dual spins whose spectra,
//! merged over all sectors, reproduce the full model exactly.

use crate::gf2::{self, BitMatrix, BitVector, Gf2Error, RowBasis};
use crate::model::Instance;
use crate::pauli::{PauliError, PauliString, TermSum};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DualityError {
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("sector has {got} values but the model has {want} charges")]
    BadSector { got: usize, want: usize },
    #[error("sector value {0} is not +1 or -1")]
    BadSectorValue(i8),
    #[error("no product-X term to embed")]
    NoNonlocalTerm,
    #[error("model shape unsupported: {0}")]
    MalformedModel(&'static str),
    #[error("alternative charge {0} is not in the kernel of the incidence matrix")]
    NotInKernel(usize),
    #[error("alternative charges do not form a basis of the kernel")]
    NotIndependent,
}

/// An X-type dual term: single-site X for each basis constraint, or a
/// product-X over the basis sites reproducing a dependent constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct DualXTerm {
    pub coupling: f64,
    /// Dual sites carrying an X factor.
    pub mask: BitVector,
}

/// A Z-type dual term: the image of one original spin's transverse field.
#[derive(Clone, Debug, PartialEq)]
pub struct DualZTerm {
    /// Originating spin, 0-based.
    pub spin: usize,
    /// Dual sites carrying a Z factor.
    pub mask: BitVector,
    /// Index of the conserved charge multiplying the coefficient, if the
    /// spin sits on a non-pivot column.
    pub charge: Option<usize>,
}

/// Output of the duality: term templates with charge-dependent coefficients
/// plus the linear-algebra bookkeeping that produced them.
#[derive(Clone, Debug)]
pub struct DualModel {
    n_spins: usize,
    dual_sites: usize,
    x_terms: Vec<DualXTerm>,
    z_terms: Vec<DualZTerm>,
    charges: Vec<PauliString>,
    charge_matrix: BitMatrix,
    row_basis: RowBasis,
    left_inverse: BitMatrix,
    incidence: BitMatrix,
}

/// A ±1 eigenvalue assignment for every conserved charge, ordered as the
/// canonical kernel-basis rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorSpec {
    values: Vec<i8>,
}

impl SectorSpec {
    pub fn new(values: Vec<i8>) -> Result<Self, DualityError> {
        for &v in &values {
            if v != 1 && v != -1 {
                return Err(DualityError::BadSectorValue(v));
            }
        }
        Ok(Self { values })
    }

    pub fn all_plus(q: usize) -> Self {
        Self { values: vec![1; q] }
    }

    /// Sector from an enumeration index: bit `l` set means charge `l` is -1.
    pub fn from_index(q: usize, index: u64) -> Self {
        let values = (0..q)
            .map(|l| if index >> l & 1 == 1 { -1 } else { 1 })
            .collect();
        Self { values }
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Runs the duality pipeline on an instance.
///
/// `basis_override` forces a specific ordered choice of independent constraint
/// rows; the default greedy policy scans rows first to last. For tree-family
/// instances the incidence matrix has full row rank and the dual has no
/// product-X term; for closure-family instances exactly one dependent row
/// remains and its combination covers every basis row.
pub fn dualize(
    inst: &Instance,
    basis_override: Option<&[usize]>,
) -> Result<DualModel, DualityError> {
    let h = inst.incidence_matrix();
    let rb = gf2::row_basis(&h, basis_override)?;
    let z = gf2::left_inverse(&rb.basis)?;
    let o = gf2::kernel_basis(&h, &rb, &z)?;
    let r = rb.basis.rows();
    let n = inst.n_spins();

    let mut x_terms = Vec::with_capacity(inst.n_edges());
    for (alpha, &row) in rb.independent.iter().enumerate() {
        x_terms.push(DualXTerm {
            coupling: f64::from(inst.couplings()[row]),
            mask: BitVector::from_indices(r, &[alpha]),
        });
    }
    for (k, &row) in rb.dependent.iter().enumerate() {
        x_terms.push(DualXTerm {
            coupling: f64::from(inst.couplings()[row]),
            mask: rb.combos.row(k).clone(),
        });
    }

    let mut is_pivot = vec![false; n];
    for &p in &rb.pivots {
        is_pivot[p] = true;
    }
    let mut charge_of_spin = vec![None; n];
    let mut next_charge = 0usize;
    for (i, flag) in is_pivot.iter().enumerate() {
        if !flag {
            charge_of_spin[i] = Some(next_charge);
            next_charge += 1;
        }
    }

    let mut z_terms = Vec::with_capacity(n);
    for (i, &charge) in charge_of_spin.iter().enumerate() {
        let mut mask = BitVector::zeros(r);
        for alpha in 0..r {
            if rb.basis.get(alpha, i) {
                mask.set(alpha, true);
            }
        }
        z_terms.push(DualZTerm {
            spin: i,
            mask,
            charge,
        });
    }

    let charges: Vec<PauliString> = o
        .row_iter()
        .map(|row| PauliString::from_x_mask(row.clone()))
        .collect();

    let dm = DualModel {
        n_spins: n,
        dual_sites: r,
        x_terms,
        z_terms,
        charges,
        charge_matrix: o,
        row_basis: rb,
        left_inverse: z,
        incidence: h,
    };
    dm.check_algebra()?;
    Ok(dm)
}

impl DualModel {
    /// Dual spin count `r`.
    pub fn dual_sites(&self) -> usize {
        self.dual_sites
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    /// Number of conserved charges `q = N - r`.
    pub fn charge_count(&self) -> usize {
        self.charges.len()
    }

    /// Conserved charges as X strings over the original spins.
    pub fn charges(&self) -> &[PauliString] {
        &self.charges
    }

    pub fn charge_matrix(&self) -> &BitMatrix {
        &self.charge_matrix
    }

    pub fn x_terms(&self) -> &[DualXTerm] {
        &self.x_terms
    }

    pub fn z_terms(&self) -> &[DualZTerm] {
        &self.z_terms
    }

    pub fn row_basis(&self) -> &RowBasis {
        &self.row_basis
    }

    pub fn left_inverse(&self) -> &BitMatrix {
        &self.left_inverse
    }

    pub fn incidence(&self) -> &BitMatrix {
        &self.incidence
    }

    /// Verifies the symplectic contracts of the construction: the dual Z of
    /// constraint `alpha` anticommutes with the dual X of `alpha` and commutes
    /// with every other, and every charge commutes with every constraint
    /// string of the original model.
    fn check_algebra(&self) -> Result<(), DualityError> {
        let r = self.dual_sites;
        for alpha in 0..r {
            for beta in 0..r {
                let anti = self
                    .left_inverse
                    .row(alpha)
                    .dot(self.row_basis.basis.row(beta));
                if anti != (alpha == beta) {
                    return Err(DualityError::MalformedModel(
                        "dual operator algebra violated",
                    ));
                }
            }
        }
        for charge in &self.charges {
            for row in self.incidence.row_iter() {
                if charge.x_mask().dot(row) {
                    return Err(DualityError::MalformedModel(
                        "charge fails to commute with a constraint",
                    ));
                }
            }
        }
        if self.z_terms.len() != self.n_spins {
            return Err(DualityError::MalformedModel("missing dual Z terms"));
        }
        Ok(())
    }

    /// Concrete operator on `r` dual spins for one sector at annealing
    /// parameter `s`: X terms enter with weight `-s·J`, Z terms with weight
    /// `-(1-s)` times the sector value of their attached charge. Terms with
    /// equal strings merge, so charge-dressed coefficients combine and can
    /// cancel exactly.
    pub fn restrict(&self, sector: &SectorSpec, s: f64) -> Result<TermSum, DualityError> {
        if sector.len() != self.charge_count() {
            return Err(DualityError::BadSector {
                got: sector.len(),
                want: self.charge_count(),
            });
        }
        let mut ts = TermSum::new(self.dual_sites);
        for t in &self.x_terms {
            ts.add(-s * t.coupling, PauliString::from_x_mask(t.mask.clone()));
        }
        for t in &self.z_terms {
            let factor = t.charge.map_or(1.0, |l| f64::from(sector.values()[l]));
            ts.add(
                -(1.0 - s) * factor,
                PauliString::from_z_mask(t.mask.clone()),
            );
        }
        Ok(ts)
    }

    /// Shape classification of the dual terms; the ZZ adjacency is the dual
    /// lattice.
    pub fn structure_report(&self) -> StructureReport {
        let single_x = self.x_terms.iter().filter(|t| t.mask.weight() == 1).count();
        let product_x = self.x_terms.len() - single_x;
        let mut groups: Vec<(BitVector, bool)> = Vec::new();
        for t in &self.z_terms {
            if let Some(g) = groups.iter_mut().find(|(m, _)| *m == t.mask) {
                g.1 |= t.charge.is_some();
            } else {
                groups.push((t.mask.clone(), t.charge.is_some()));
            }
        }
        let mut single_z = 0;
        let mut zz = 0;
        let mut higher_z = 0;
        let mut charge_dressed_z = 0;
        let mut zz_adjacency = Vec::new();
        for (mask, dressed) in &groups {
            match mask.weight() {
                1 => single_z += 1,
                2 => {
                    zz += 1;
                    let sites: Vec<usize> = mask.ones().collect();
                    zz_adjacency.push((sites[0], sites[1]));
                }
                _ => higher_z += 1,
            }
            if *dressed {
                charge_dressed_z += 1;
            }
        }
        zz_adjacency.sort_unstable();
        StructureReport {
            single_x,
            product_x,
            single_z,
            zz,
            higher_z,
            charge_dressed_z,
            zz_adjacency,
        }
    }
}

/// Term-shape summary of a [`DualModel`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub single_x: usize,
    pub product_x: usize,
    /// Distinct weight-1 Z supports.
    pub single_z: usize,
    /// Distinct weight-2 Z supports.
    pub zz: usize,
    pub higher_z: usize,
    /// Distinct Z supports whose coefficient carries at least one charge.
    pub charge_dressed_z: usize,
    /// Dual-site pairs joined by a ZZ term, sorted.
    pub zz_adjacency: Vec<(usize, usize)>,
}

/// The restricted dual with its product-X term traded for one extra site.
///
/// Every term commutes with `parity`; restricted to the `physical_parity`
/// eigenspace the operator is spectrum-equal to its input.
#[derive(Clone, Debug)]
pub struct EmbeddedModel {
    pub terms: TermSum,
    pub parity: PauliString,
    pub physical_parity: i8,
}

/// Removes the single all-sites product-X term of a restricted closure dual.
///
/// The product term becomes a single X on the added site; every Z string
/// anticommuting with the product (odd Z weight) gains a Z factor on the
/// added site; X terms pass through. The physical subspace is the +1
/// eigenspace of the all-sites X parity operator.
pub fn embed_nonlocal(restricted: &TermSum) -> Result<EmbeddedModel, DualityError> {
    let r = restricted.n_sites();
    let mut product: Option<(f64, &PauliString)> = None;
    for (c, s) in restricted.terms() {
        if s.is_x_type() && s.x_mask().weight() > 1 {
            if product.is_some() {
                return Err(DualityError::MalformedModel(
                    "more than one product-X term",
                ));
            }
            product = Some((*c, s));
        }
    }
    let Some((pc, pstring)) = product else {
        return Err(DualityError::NoNonlocalTerm);
    };
    if pstring.x_mask().weight() != r {
        return Err(DualityError::MalformedModel(
            "product-X term does not cover all sites",
        ));
    }
    let mut out = TermSum::new(r + 1);
    out.add(pc, PauliString::x_string(r + 1, &[r]));
    for (c, s) in restricted.terms() {
        if std::ptr::eq(s, pstring) {
            continue;
        }
        if s.is_x_type() {
            let sites: Vec<usize> = s.x_mask().ones().collect();
            out.add(*c, PauliString::x_string(r + 1, &sites));
        } else if s.is_z_type() {
            let mut sites: Vec<usize> = s.z_mask().ones().collect();
            if sites.len() % 2 == 1 {
                sites.push(r);
            }
            out.add(*c, PauliString::z_string(r + 1, &sites));
        } else {
            return Err(DualityError::MalformedModel(
                "term is neither an X string nor a Z string",
            ));
        }
    }
    let parity = PauliString::x_string(r + 1, &(0..=r).collect::<Vec<_>>());
    for (_, s) in out.terms() {
        debug_assert!(s.commutes(&parity).unwrap());
    }
    Ok(EmbeddedModel {
        terms: out,
        parity,
        physical_parity: 1,
    })
}

/// Converts sector labels from an alternative charge basis to the canonical
/// one: each canonical charge is expressed as a GF(2) combination of the
/// alternative charges and the corresponding ±1 values are multiplied.
pub fn sector_transform(
    dm: &DualModel,
    alt_charges: &[PauliString],
    alt_values: &[i8],
) -> Result<SectorSpec, DualityError> {
    let q = dm.charge_count();
    if alt_values.len() != alt_charges.len() {
        return Err(DualityError::BadSector {
            got: alt_values.len(),
            want: alt_charges.len(),
        });
    }
    for &v in alt_values {
        if v != 1 && v != -1 {
            return Err(DualityError::BadSectorValue(v));
        }
    }
    let mut rows = Vec::with_capacity(alt_charges.len());
    for (l, charge) in alt_charges.iter().enumerate() {
        if !charge.is_x_type() || charge.n_sites() != dm.n_spins() {
            return Err(DualityError::Pauli(PauliError::NotXString));
        }
        if !dm.incidence.mul_vec(charge.x_mask()).is_zero() {
            return Err(DualityError::NotInKernel(l));
        }
        rows.push(charge.x_mask().clone());
    }
    let alt = BitMatrix::from_rows(rows, dm.n_spins());
    if alt.rows() != q || alt.rank2() != q {
        return Err(DualityError::NotIndependent);
    }
    let alt_t = alt.transpose();
    let mut values = Vec::with_capacity(q);
    for canonical in dm.charge_matrix.row_iter() {
        let sol = gf2::solve2(&alt_t, canonical);
        let combo = sol.particular.ok_or(DualityError::NotIndependent)?;
        let v = combo
            .ones()
            .map(|l| i32::from(alt_values[l]))
            .product::<i32>();
        values.push(v as i8);
    }
    Ok(SectorSpec { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_closure, generate_tree};

    fn reference_closure() -> Instance {
        generate_closure(1).unwrap()
    }

    #[test]
    fn worked_example_with_forced_basis() {
        let dm = dualize(&reference_closure(), Some(&[1, 2, 3])).unwrap();
        assert_eq!(dm.dual_sites(), 3);
        assert_eq!(dm.charge_count(), 3);
        assert_eq!(
            dm.row_basis().combos,
            BitMatrix::parse_rows(&["111"]).unwrap()
        );
        assert_eq!(
            dm.left_inverse(),
            &BitMatrix::parse_rows(&["100000", "010000", "001000"]).unwrap()
        );
        assert_eq!(
            dm.charge_matrix(),
            &BitMatrix::parse_rows(&["110100", "011010", "101001"]).unwrap()
        );
        assert_eq!(
            dm.charges(),
            &[
                PauliString::x_string(6, &[0, 1, 3]),
                PauliString::x_string(6, &[1, 2, 4]),
                PauliString::x_string(6, &[0, 2, 5]),
            ]
        );
        // X side: three single-site terms plus the all-sites product.
        let masks: Vec<String> = dm.x_terms().iter().map(|t| t.mask.to_string()).collect();
        assert_eq!(masks, vec!["100", "010", "001", "111"]);
        assert!(dm.x_terms().iter().all(|t| t.coupling == 1.0));
        // Z side: plain terms on pivot spins, charge-dressed pairs elsewhere.
        let z: Vec<(String, Option<usize>)> = dm
            .z_terms()
            .iter()
            .map(|t| (t.mask.to_string(), t.charge))
            .collect();
        assert_eq!(
            z,
            vec![
                ("100".into(), None),
                ("010".into(), None),
                ("001".into(), None),
                ("110".into(), Some(0)),
                ("011".into(), Some(1)),
                ("101".into(), Some(2)),
            ]
        );
    }

    #[test]
    fn single_triangle_dual() {
        let t = generate_tree(1).unwrap();
        let dm = dualize(&t, None).unwrap();
        assert_eq!(dm.dual_sites(), 1);
        assert_eq!(dm.charge_count(), 2);
        let s = 0.3;
        let plus = dm.restrict(&SectorSpec::all_plus(2), s).unwrap();
        let mut expect = TermSum::new(1);
        expect.add(-s, PauliString::x_string(1, &[0]));
        expect.add(-3.0 * (1.0 - s), PauliString::z_string(1, &[0]));
        assert_eq!(plus, expect);
        let minus = dm
            .restrict(&SectorSpec::new(vec![-1, -1]).unwrap(), s)
            .unwrap();
        let mut expect = TermSum::new(1);
        expect.add(-s, PauliString::x_string(1, &[0]));
        expect.add(1.0 - s, PauliString::z_string(1, &[0]));
        assert_eq!(minus, expect);
    }

    #[test]
    fn reference_example_all_plus_restriction() {
        let dm = dualize(&reference_closure(), Some(&[1, 2, 3])).unwrap();
        let s = 0.4;
        let ts = dm.restrict(&SectorSpec::all_plus(3), s).unwrap();
        // Uniform-field Ising triangle plus the product term.
        let mut expect = TermSum::new(3);
        for a in 0..3 {
            expect.add(-s, PauliString::x_string(3, &[a]));
        }
        expect.add(-s, PauliString::x_string(3, &[0, 1, 2]));
        for a in 0..3 {
            expect.add(-(1.0 - s), PauliString::z_string(3, &[a]));
        }
        for pair in [[0, 1], [1, 2], [0, 2]] {
            expect.add(-(1.0 - s), PauliString::z_string(3, &pair));
        }
        assert_eq!(ts, expect);
    }

    #[test]
    fn restrict_rejects_wrong_sector_length() {
        let dm = dualize(&reference_closure(), None).unwrap();
        assert!(matches!(
            dm.restrict(&SectorSpec::all_plus(2), 0.5),
            Err(DualityError::BadSector { got: 2, want: 3 })
        ));
    }

    #[test]
    fn tree_g2_structure_is_a_star() {
        let dm = dualize(&generate_tree(2).unwrap(), None).unwrap();
        let report = dm.structure_report();
        assert_eq!(report.single_x, 4);
        assert_eq!(report.product_x, 0);
        assert_eq!(report.zz_adjacency, vec![(0, 1), (0, 2), (0, 3)]);
        assert_eq!(report.single_z, 3);
        assert_eq!(report.higher_z, 0);
    }

    #[test]
    fn closure_g2_structure() {
        let dm = dualize(&generate_closure(2).unwrap(), None).unwrap();
        assert_eq!(dm.dual_sites(), 9);
        assert_eq!(dm.charge_count(), 6);
        let report = dm.structure_report();
        assert_eq!(report.single_x, 9);
        assert_eq!(report.product_x, 1);
        let product = dm.x_terms().iter().find(|t| t.mask.weight() > 1).unwrap();
        assert_eq!(product.mask.weight(), 9);
        assert_eq!(report.zz, 12);
        assert_eq!(report.single_z, 3);
        assert_eq!(report.higher_z, 0);
    }

    #[test]
    fn single_triangle_structure() {
        let dm = dualize(&generate_tree(1).unwrap(), None).unwrap();
        let report = dm.structure_report();
        assert_eq!(report.single_x, 1);
        assert_eq!(report.product_x, 0);
        assert_eq!(report.single_z, 1);
        assert_eq!(report.charge_dressed_z, 1);
    }

    #[test]
    fn embedding_of_reference_example_is_complete_graph() {
        let dm = dualize(&reference_closure(), Some(&[1, 2, 3])).unwrap();
        let s = 0.4;
        let restricted = dm.restrict(&SectorSpec::all_plus(3), s).unwrap();
        let em = embed_nonlocal(&restricted).unwrap();
        assert_eq!(em.terms.n_sites(), 4);
        assert_eq!(em.physical_parity, 1);
        assert_eq!(em.parity, PauliString::x_string(4, &[0, 1, 2, 3]));
        let mut expect = TermSum::new(4);
        expect.add(-s, PauliString::x_string(4, &[3]));
        for a in 0..3 {
            expect.add(-s, PauliString::x_string(4, &[a]));
        }
        for pair in [[0usize, 3], [1, 3], [2, 3], [0, 1], [1, 2], [0, 2]] {
            expect.add(-(1.0 - s), PauliString::z_string(4, &pair));
        }
        assert_eq!(em.terms, expect);
    }

    #[test]
    fn embedding_requires_a_product_term() {
        let dm = dualize(&generate_tree(2).unwrap(), None).unwrap();
        let restricted = dm.restrict(&SectorSpec::all_plus(5), 0.5).unwrap();
        assert!(matches!(
            embed_nonlocal(&restricted),
            Err(DualityError::NoNonlocalTerm)
        ));
    }

    #[test]
    fn sector_transform_identity() {
        let dm = dualize(&generate_tree(2).unwrap(), None).unwrap();
        let values = vec![1, -1, 1, -1, 1];
        let got = sector_transform(&dm, dm.charges(), &values).unwrap();
        assert_eq!(got.values(), &values[..]);
    }

    #[test]
    fn sector_transform_all_plus_is_basis_independent() {
        let dm = dualize(&generate_tree(2).unwrap(), None).unwrap();
        // Pair charges plus two canonical loops form an alternative basis.
        let alt = vec![
            PauliString::x_string(9, &[3, 4]),
            PauliString::x_string(9, &[5, 6]),
            PauliString::x_string(9, &[7, 8]),
            dm.charges()[1].clone(),
            dm.charges()[3].clone(),
        ];
        let got = sector_transform(&dm, &alt, &[1, 1, 1, 1, 1]).unwrap();
        assert_eq!(got.values(), SectorSpec::all_plus(5).values());
    }

    #[test]
    fn sector_transform_matches_product_state_evaluation() {
        use crate::pauli::expectation_sector;
        let dm = dualize(&generate_tree(2).unwrap(), None).unwrap();
        let alt = vec![
            PauliString::x_string(9, &[3, 4]),
            PauliString::x_string(9, &[5, 6]),
            PauliString::x_string(9, &[7, 8]),
            dm.charges()[1].clone(),
            dm.charges()[3].clone(),
        ];
        // Flip one alternative charge at a time and cross-check against an
        // explicit product state realizing that sector.
        for flip in 0..alt.len() {
            let mut alt_values = vec![1i8; alt.len()];
            alt_values[flip] = -1;
            let transformed = sector_transform(&dm, &alt, &alt_values).unwrap();
            // Product state: solve alt_mask · x = b over GF(2) where b marks
            // flipped charges, then evaluate the canonical charges on it.
            let rows: Vec<BitVector> = alt.iter().map(|c| c.x_mask().clone()).collect();
            let alt_matrix = BitMatrix::from_rows(rows, 9);
            let mut b = BitVector::zeros(alt.len());
            b.set(flip, true);
            let x = gf2::solve2(&alt_matrix, &b).particular.unwrap();
            let state: Vec<i8> = (0..9).map(|i| if x.get(i) { -1 } else { 1 }).collect();
            assert_eq!(
                expectation_sector(&alt, &state).unwrap(),
                alt_values,
                "flip={flip}: state does not realize the alt sector"
            );
            let canonical_values = expectation_sector(dm.charges(), &state).unwrap();
            assert_eq!(transformed.values(), canonical_values, "flip={flip}");
        }
    }

    #[test]
    fn sector_transform_rejects_bad_inputs() {
        let dm = dualize(&generate_tree(2).unwrap(), None).unwrap();
        // Not in the kernel: a single-spin flip changes constraint parities.
        let bad = vec![
            PauliString::x_string(9, &[0]),
            dm.charges()[1].clone(),
            dm.charges()[2].clone(),
            dm.charges()[3].clone(),
            dm.charges()[4].clone(),
        ];
        assert!(matches!(
            sector_transform(&dm, &bad, &[1; 5]),
            Err(DualityError::NotInKernel(0))
        ));
        // Dependent set.
        let dep = vec![
            dm.charges()[0].clone(),
            dm.charges()[0].clone(),
            dm.charges()[2].clone(),
            dm.charges()[3].clone(),
            dm.charges()[4].clone(),
        ];
        assert!(matches!(
            sector_transform(&dm, &dep, &[1; 5]),
            Err(DualityError::NotIndependent)
        ));
        // Too few to span.
        assert!(matches!(
            sector_transform(&dm, &dm.charges()[..3], &[1; 3]),
            Err(DualityError::NotIndependent)
        ));
    }

    #[test]
    fn boundary_fields_cancel_in_the_pairwise_minus_sector() {
        // With all three boundary-pair charges at -1 the single-site Z
        // coefficients on the boundary dual sites cancel exactly, leaving a
        // symmetric Ising tree.
        let dm = dualize(&generate_tree(2).unwrap(), None).unwrap();
        let alt = vec![
            PauliString::x_string(9, &[3, 4]),
            PauliString::x_string(9, &[5, 6]),
            PauliString::x_string(9, &[7, 8]),
            dm.charges()[1].clone(),
            dm.charges()[3].clone(),
        ];
        let sector = sector_transform(&dm, &alt, &[-1, -1, -1, 1, 1]).unwrap();
        let ts = dm.restrict(&sector, 0.5).unwrap();
        let single_z_terms: Vec<_> = ts
            .terms()
            .iter()
            .filter(|(_, s)| s.is_z_type() && s.z_mask().weight() == 1)
            .collect();
        assert!(
            single_z_terms.is_empty(),
            "boundary fields should cancel, got {single_z_terms:?}"
        );
        // In the all-plus sector the same coefficients add up instead.
        let plus = dm.restrict(&SectorSpec::all_plus(5), 0.5).unwrap();
        let fields: Vec<f64> = plus
            .terms()
            .iter()
            .filter(|(_, s)| s.is_z_type() && s.z_mask().weight() == 1)
            .map(|(c, _)| *c)
            .collect();
        assert_eq!(fields.len(), 3);
        for c in fields {
            assert!((c - (-2.0 * 0.5)).abs() < 1e-15);
        }
    }

    #[test]
    fn greedy_and_forced_bases_give_isomorphic_counts() {
        let inst = reference_closure();
        let greedy = dualize(&inst, None).unwrap();
        let forced = dualize(&inst, Some(&[1, 2, 3])).unwrap();
        assert_eq!(greedy.dual_sites(), forced.dual_sites());
        assert_eq!(greedy.charge_count(), forced.charge_count());
        // Greedy keeps the first three rows, so the dependent one is the last.
        assert_eq!(greedy.row_basis().dependent, vec![3]);
        assert_eq!(
            greedy.row_basis().combos,
            BitMatrix::parse_rows(&["111"]).unwrap()
        );
    }
}
