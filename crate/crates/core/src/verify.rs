//! Brute-force and algebraic cross-checks of the duality pipeline.
//!
//! Each check compares two independent routes to the same quantity and
//! reports a maximum residual against a fixed tolerance. Negative controls
//! corrupt an input deliberately and pass only when the comparison fails.

use crate::duality::{self, dualize, DualModel, DualityError, SectorSpec};
use crate::gf2::BitMatrix;
use crate::model::{self, Instance, ModelError};
use crate::pauli::{PauliString, TermSum};
use crate::spectrum::{self, dense, SolverOptions, SpectrumError};
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;
use thiserror::Error;

pub const SECTOR_TOLERANCE: f64 = 1e-8;
pub const COMMUTATION_TOLERANCE: f64 = 1e-10;
pub const EMBEDDING_TOLERANCE: f64 = 1e-8;

/// Spin count above which full-spectrum comparisons switch to the lowest-64
/// prefix, and the hard ceiling for the check overall.
const DENSE_FULL_LIMIT: usize = 12;
const SECTOR_SPIN_LIMIT: usize = 15;
const NUMERIC_COMMUTATOR_LIMIT: usize = 20;
const LOWEST_PREFIX: usize = 64;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("instance with {n_spins} spins exceeds the checkable bound {limit}")]
    TooLarge { n_spins: usize, limit: usize },
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Duality(#[from] DualityError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pauli(#[from] crate::pauli::PauliError),
}

/// One executed check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub instance: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckOutcome>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn from_checks(checks: Vec<CheckOutcome>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { checks, pass }
    }
}

fn outcome(
    name: &str,
    instance: &str,
    max_residual: f64,
    tolerance: f64,
    pass: bool,
    started: Instant,
) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        instance: instance.to_string(),
        max_residual,
        tolerance,
        pass,
        runtime_s: started.elapsed().as_secs_f64(),
    }
}

/// Maximum pairwise distance of two ascending eigenvalue lists truncated to a
/// common length; infinite when a full comparison has mismatched counts.
fn multiset_distance(a: &[f64], b: &[f64], prefix: Option<usize>) -> f64 {
    match prefix {
        Some(p) => {
            let p = p.min(a.len()).min(b.len());
            a[..p]
                .iter()
                .zip(&b[..p])
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        }
        None => {
            if a.len() != b.len() {
                return f64::INFINITY;
            }
            a.iter()
                .zip(b)
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        }
    }
}

/// Master duality check: the union of the restricted-dual spectra over all
/// charge sectors must equal the spectrum of the full constant-free model as
/// a multiset, at every supplied `s`.
///
/// Dense on both sides when the full dimension allows it; above that the
/// comparison covers the lowest 64 eigenvalues, with the full side solved by
/// Lanczos.
pub fn check_sector_decomposition(
    inst: &Instance,
    instance_label: &str,
    s_values: &[f64],
    opts: &SolverOptions,
) -> Result<CheckOutcome, VerifyError> {
    let started = Instant::now();
    let n = inst.n_spins();
    if n > SECTOR_SPIN_LIMIT {
        return Err(VerifyError::TooLarge {
            n_spins: n,
            limit: SECTOR_SPIN_LIMIT,
        });
    }
    let dm = dualize(inst, None)?;
    let q = dm.charge_count();
    let full_dense = n <= DENSE_FULL_LIMIT;
    let mut max_residual = 0.0f64;
    for &s in s_values {
        let full = spectrum::full_hamiltonian(inst, s);
        let full_spectrum = if full_dense {
            dense::symmetric_eigenvalues(dense::dense_matrix(&full))
        } else {
            spectrum::lanczos_lowest(&full, None, LOWEST_PREFIX, opts)?
        };
        let mut merged = Vec::with_capacity(1 << n);
        for index in 0..(1u64 << q) {
            let sector = SectorSpec::from_index(q, index);
            let restricted = dm.restrict(&sector, s)?;
            merged.extend(dense::symmetric_eigenvalues(dense::dense_matrix(
                &restricted,
            )));
        }
        merged.sort_by(f64::total_cmp);
        let prefix = (!full_dense).then_some(LOWEST_PREFIX);
        if full_dense {
            assert_eq!(merged.len(), 1 << n);
        }
        max_residual = max_residual.max(multiset_distance(&full_spectrum, &merged, prefix));
    }
    Ok(outcome(
        "sector_decomposition",
        instance_label,
        max_residual,
        SECTOR_TOLERANCE,
        max_residual <= SECTOR_TOLERANCE,
        started,
    ))
}

/// Symplectic commutation of every charge with every term of the annealing
/// Hamiltonian, plus matrix-free numeric commutator norms on random vectors
/// when the state space is small enough.
pub fn check_charge_commutation(
    inst: &Instance,
    dm: &DualModel,
    instance_label: &str,
    s_samples: &[f64],
    trials: usize,
    opts: &SolverOptions,
) -> Result<CheckOutcome, VerifyError> {
    charge_commutation_inner(inst, dm.charges(), instance_label, s_samples, trials, opts)
}

fn charge_commutation_inner(
    inst: &Instance,
    charges: &[PauliString],
    instance_label: &str,
    s_samples: &[f64],
    trials: usize,
    opts: &SolverOptions,
) -> Result<CheckOutcome, VerifyError> {
    let started = Instant::now();
    let n = inst.n_spins();
    let mut max_residual = 0.0f64;
    // Symplectic route: X-type charges trivially commute with the transverse
    // field, so only the constraint Z strings can fail.
    let h = inst.incidence_matrix();
    for charge in charges {
        for row in h.row_iter() {
            if charge.x_mask().dot(row) {
                max_residual = max_residual.max(1.0);
            }
        }
    }
    // Numeric route on random vectors.
    if n <= NUMERIC_COMMUTATOR_LIMIT {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xc0117);
        let dim = 1usize << n;
        for &s in s_samples {
            let ham = spectrum::full_hamiltonian(inst, s);
            for charge in charges {
                let mut op = TermSum::new(n);
                op.add(1.0, charge.clone());
                for _ in 0..trials {
                    let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let hv = ham.apply(&v)?;
                    let ov = op.apply(&v)?;
                    let h_ov = ham.apply(&ov)?;
                    let o_hv = op.apply(&hv)?;
                    let resid = h_ov
                        .iter()
                        .zip(&o_hv)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                        / norm;
                    max_residual = max_residual.max(resid);
                }
            }
        }
    }
    Ok(outcome(
        "charge_commutation",
        instance_label,
        max_residual,
        COMMUTATION_TOLERANCE,
        max_residual <= COMMUTATION_TOLERANCE,
        started,
    ))
}

/// Negative control: one bit of the first charge is flipped inside the
/// support of the first edge, which must break commutation.
pub fn check_charge_negative_control(
    inst: &Instance,
    dm: &DualModel,
    instance_label: &str,
    opts: &SolverOptions,
) -> Result<CheckOutcome, VerifyError> {
    let started = Instant::now();
    let mut mask = dm.charges()[0].x_mask().clone();
    let bit = inst.edges()[0][0] - 1;
    mask.set(bit, !mask.get(bit));
    let corrupted = vec![PauliString::from_x_mask(mask)];
    let inner = charge_commutation_inner(
        inst,
        &corrupted,
        instance_label,
        &[0.5],
        1,
        opts,
    )?;
    // Passing here means the corruption was detected.
    Ok(outcome(
        "charge_commutation_negative_control",
        instance_label,
        inner.max_residual,
        COMMUTATION_TOLERANCE,
        inner.max_residual > 1e-6,
        started,
    ))
}

/// The embedded model restricted to its physical parity sector must be
/// spectrum-equal to the restricted dual it came from.
pub fn check_embedding(
    dm: &DualModel,
    sector: &SectorSpec,
    instance_label: &str,
    s_values: &[f64],
    opts: &SolverOptions,
) -> Result<CheckOutcome, VerifyError> {
    let started = Instant::now();
    let r = dm.dual_sites();
    if r > 12 {
        return Err(VerifyError::TooLarge {
            n_spins: r,
            limit: 12,
        });
    }
    let _ = opts;
    let mut max_residual = 0.0f64;
    for &s in s_values {
        let restricted = dm.restrict(sector, s)?;
        let em = duality::embed_nonlocal(&restricted)?;
        let want = dense::symmetric_eigenvalues(dense::dense_matrix(&restricted));
        let got = dense::symmetric_eigenvalues(dense::parity_projected_matrix(
            &em.terms,
            &em.parity,
            em.physical_parity == 1,
        ));
        max_residual = max_residual.max(multiset_distance(&want, &got, None));
    }
    Ok(outcome(
        "embedding",
        instance_label,
        max_residual,
        EMBEDDING_TOLERANCE,
        max_residual <= EMBEDDING_TOLERANCE,
        started,
    ))
}

/// Negative control: the opposite parity sector must differ from the
/// restricted dual.
pub fn check_embedding_negative_control(
    dm: &DualModel,
    sector: &SectorSpec,
    instance_label: &str,
    s: f64,
) -> Result<CheckOutcome, VerifyError> {
    let started = Instant::now();
    let restricted = dm.restrict(sector, s)?;
    let em = duality::embed_nonlocal(&restricted)?;
    let want = dense::symmetric_eigenvalues(dense::dense_matrix(&restricted));
    let got = dense::symmetric_eigenvalues(dense::parity_projected_matrix(
        &em.terms,
        &em.parity,
        em.physical_parity != 1,
    ));
    let residual = multiset_distance(&want, &got, None);
    Ok(outcome(
        "embedding_negative_control",
        instance_label,
        residual,
        EMBEDDING_TOLERANCE,
        residual > 1e-6,
        started,
    ))
}

/// Reproduces the worked small-closure duality fixture bit-exactly: rank,
/// dependency combination, left inverse, kernel matrix, charge strings, and
/// the assembled dual term list.
pub fn check_appendix_example() -> CheckOutcome {
    let started = Instant::now();
    let label = "closure g=1, forced basis rows 2..4";
    let run = || -> Result<bool, VerifyError> {
        let inst = model::generate_closure(1)?;
        let dm = dualize(&inst, Some(&[1, 2, 3]))?;
        let mut ok = dm.dual_sites() == 3;
        ok &= dm.row_basis().combos.to_text() == "1 3\n111\n";
        ok &= dm.left_inverse().to_text() == "3 6\n100000\n010000\n001000\n";
        ok &= dm.charge_matrix().to_text() == "3 6\n110100\n011010\n101001\n";
        ok &= dm.charges()
            == [
                PauliString::x_string(6, &[0, 1, 3]),
                PauliString::x_string(6, &[1, 2, 4]),
                PauliString::x_string(6, &[0, 2, 5]),
            ];
        let x: Vec<(String, f64)> = dm
            .x_terms()
            .iter()
            .map(|t| (t.mask.to_string(), t.coupling))
            .collect();
        ok &= x
            == [
                ("100".to_string(), 1.0),
                ("010".to_string(), 1.0),
                ("001".to_string(), 1.0),
                ("111".to_string(), 1.0),
            ];
        let z: Vec<(String, Option<usize>)> = dm
            .z_terms()
            .iter()
            .map(|t| (t.mask.to_string(), t.charge))
            .collect();
        ok &= z
            == [
                ("100".to_string(), None),
                ("010".to_string(), None),
                ("001".to_string(), None),
                ("110".to_string(), Some(0)),
                ("011".to_string(), Some(1)),
                ("101".to_string(), Some(2)),
            ];
        // Cross-check the textual fixture format round-trips.
        ok &= BitMatrix::parse_text(&dm.charge_matrix().to_text())
            .map(|m| &m == dm.charge_matrix())
            .unwrap_or(false);
        Ok(ok)
    };
    let pass = run().unwrap_or(false);
    outcome(
        "appendix_example",
        label,
        if pass { 0.0 } else { 1.0 },
        0.0,
        pass,
        started,
    )
}

/// The fixed verification suite covering the worked example, sector
/// decomposition, charge commutation, and the parity embedding, with one
/// negative control each for the latter two.
pub fn run_paper_suite(opts: &SolverOptions) -> Result<VerificationReport, VerifyError> {
    let mut checks = Vec::new();
    checks.push(check_appendix_example());

    let s_sector = [0.25, 0.5, 0.75];
    for g in 1..=2 {
        let inst = model::generate_tree(g)?;
        checks.push(check_sector_decomposition(
            &inst,
            &format!("tree g={g}"),
            &s_sector,
            opts,
        )?);
    }
    for g in 1..=2 {
        let inst = model::generate_closure(g)?;
        checks.push(check_sector_decomposition(
            &inst,
            &format!("closure g={g}"),
            &s_sector,
            opts,
        )?);
    }

    let s_comm = [0.3, 0.7];
    for g in 1..=4 {
        let inst = model::generate_tree(g)?;
        let dm = dualize(&inst, None)?;
        checks.push(check_charge_commutation(
            &inst,
            &dm,
            &format!("tree g={g}"),
            &s_comm,
            2,
            opts,
        )?);
    }
    for g in 1..=3 {
        let inst = model::generate_closure(g)?;
        let dm = dualize(&inst, None)?;
        checks.push(check_charge_commutation(
            &inst,
            &dm,
            &format!("closure g={g}"),
            &s_comm,
            2,
            opts,
        )?);
    }
    {
        let inst = model::generate_tree(2)?;
        let dm = dualize(&inst, None)?;
        checks.push(check_charge_negative_control(
            &inst,
            &dm,
            "tree g=2, corrupted charge",
            opts,
        )?);
    }

    let s_embed = [0.3, 0.65];
    for g in 1..=2 {
        let inst = model::generate_closure(g)?;
        let dm = dualize(&inst, None)?;
        let sector = SectorSpec::all_plus(dm.charge_count());
        checks.push(check_embedding(
            &dm,
            &sector,
            &format!("closure g={g}"),
            &s_embed,
            opts,
        )?);
    }
    {
        let inst = model::generate_closure(1)?;
        let dm = dualize(&inst, None)?;
        let sector = SectorSpec::all_plus(dm.charge_count());
        checks.push(check_embedding_negative_control(
            &dm,
            &sector,
            "closure g=1, odd parity",
            0.65,
        )?);
    }

    Ok(VerificationReport::from_checks(checks))
}

/// Opt-in randomized fuzzing: sector decomposition on random small instances.
pub fn run_fuzz_suite(
    count: usize,
    seed: u64,
    opts: &SolverOptions,
) -> Result<VerificationReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let mut made = 0usize;
    while made < count {
        let n = rng.random_range(5..=9);
        let m = rng.random_range(2..=6);
        let mut edges = Vec::new();
        let mut guard = 0;
        while edges.len() < m && guard < 200 {
            guard += 1;
            let mut e = [
                rng.random_range(1..=n),
                rng.random_range(1..=n),
                rng.random_range(1..=n),
            ];
            e.sort_unstable();
            if e[0] == e[1] || e[1] == e[2] || edges.contains(&e) {
                continue;
            }
            edges.push(e);
        }
        if edges.len() < m {
            continue;
        }
        let couplings: Vec<i8> = (0..m)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        let Ok(inst) = Instance::new(n, edges, couplings) else {
            continue;
        };
        made += 1;
        checks.push(check_sector_decomposition(
            &inst,
            &format!("fuzz #{made} (N={n}, M={m})"),
            &[0.5],
            opts,
        )?);
    }
    Ok(VerificationReport::from_checks(checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_closure, generate_tree};

    #[test]
    fn appendix_example_passes() {
        let c = check_appendix_example();
        assert!(c.pass, "{c:?}");
        assert!(c.runtime_s < 1.0);
    }

    #[test]
    fn sector_decomposition_small_cases() {
        let opts = SolverOptions::default();
        for (inst, label) in [
            (generate_tree(1).unwrap(), "tree g=1"),
            (generate_closure(1).unwrap(), "closure g=1"),
        ] {
            let c =
                check_sector_decomposition(&inst, label, &[0.25, 0.5, 1.0], &opts).unwrap();
            assert!(c.pass, "{label}: residual {}", c.max_residual);
        }
    }

    #[test]
    fn sector_decomposition_rejects_large_instances() {
        let opts = SolverOptions::default();
        let inst = generate_tree(3).unwrap(); // 21 spins
        assert!(matches!(
            check_sector_decomposition(&inst, "tree g=3", &[0.5], &opts),
            Err(VerifyError::TooLarge { .. })
        ));
    }

    #[test]
    fn charge_commutation_and_negative_control() {
        let opts = SolverOptions::default();
        let inst = generate_tree(2).unwrap();
        let dm = dualize(&inst, None).unwrap();
        let ok = check_charge_commutation(&inst, &dm, "tree g=2", &[0.5], 2, &opts).unwrap();
        assert!(ok.pass, "residual {}", ok.max_residual);
        let neg = check_charge_negative_control(&inst, &dm, "tree g=2", &opts).unwrap();
        assert!(neg.pass, "corruption went undetected");
    }

    #[test]
    fn embedding_check_and_negative_control() {
        let opts = SolverOptions::default();
        let inst = generate_closure(1).unwrap();
        let dm = dualize(&inst, None).unwrap();
        let sector = SectorSpec::all_plus(3);
        let ok = check_embedding(&dm, &sector, "closure g=1", &[0.3, 0.65], &opts).unwrap();
        assert!(ok.pass, "residual {}", ok.max_residual);
        let neg =
            check_embedding_negative_control(&dm, &sector, "closure g=1", 0.65).unwrap();
        assert!(neg.pass, "odd sector unexpectedly matched");
    }

    #[test]
    fn report_json_shape() {
        let c = check_appendix_example();
        let report = VerificationReport::from_checks(vec![c]);
        let json = serde_json::to_string_pretty(&report).unwrap();
        assert!(json.contains("\"name\": \"appendix_example\""));
        assert!(json.contains("\"pass\": true"));
    }
}
