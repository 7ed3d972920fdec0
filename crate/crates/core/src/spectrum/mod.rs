//! Exact low-lying spectra and annealing gap analysis.
//!
//! Operators are solved dense (all eigenvalues) up to a dimension ceiling and
//! by matrix-free Lanczos above it. Gap curves track both the plain gap
//! `E1 - E0` and a degeneracy-aware gap to the first level separated from the
//! ground energy by more than a clustering tolerance.

pub mod dense;
pub mod lanczos;

use crate::duality::{embed_nonlocal, DualModel, DualityError, SectorSpec};
use crate::model::Instance;
use crate::pauli::{PauliError, PauliString, TermSum};
use lanczos::CompiledOp;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("annealing parameter s={0} outside [0, 1]")]
    BadS(f64),
    #[error("need at least {0} eigenvalues for a gap")]
    BadK(usize),
    #[error("grid must be ascending and contained in [0, 1]")]
    BadGrid,
    #[error("eigensolver failed to converge after {iterations} iterations ({locked}/{wanted} pairs locked)")]
    NoConvergence {
        iterations: usize,
        locked: usize,
        wanted: usize,
    },
    #[error("{0} sites exceed the state-vector solver range")]
    TooManySites(usize),
    #[error("parity projector must be a nonempty X string on the operator sites")]
    BadParity,
    #[error("operator on {sites} sites exceeds the solver budget of {budget}")]
    BudgetExceeded { sites: usize, budget: usize },
    #[error(transparent)]
    Duality(#[from] DualityError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// Eigensolver configuration shared by every operation in this module.
#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Ritz residual tolerance for Lanczos convergence.
    pub tol: f64,
    /// Eigenvalues within this distance of the ground energy count as part of
    /// the ground cluster for the degeneracy-aware gap.
    pub degeneracy_tol: f64,
    /// Operators with dimension up to this bound are solved densely.
    pub dense_ceiling: usize,
    pub seed: u64,
    /// Lanczos basis cap per round; 0 picks automatically.
    pub max_basis: usize,
    pub max_restarts: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            degeneracy_tol: 1e-8,
            dense_ceiling: 4096,
            seed: 0x5eed,
            max_basis: 0,
            max_restarts: 400,
        }
    }
}

/// Constant-free annealing Hamiltonian of an instance:
/// `-(1-s) Σ_i X_i - s Σ_a J_a Z Z Z`. At `s=1` the eigenvalues equal the
/// classical energies minus the edge count.
pub fn full_hamiltonian(inst: &Instance, s: f64) -> TermSum {
    let n = inst.n_spins();
    let mut ts = TermSum::new(n);
    for i in 0..n {
        ts.add(-(1.0 - s), PauliString::x_string(n, &[i]));
    }
    for (e, &j) in inst.edges().iter().zip(inst.couplings()) {
        let sites: Vec<usize> = e.iter().map(|&v| v - 1).collect();
        ts.add(-s * f64::from(j), PauliString::z_string(n, &sites));
    }
    ts
}

/// A family of operators parameterized by the annealing coordinate `s`.
pub enum AnnealOperator<'a> {
    /// The full model on the original spins.
    Full(&'a Instance),
    /// A dual restricted to one charge sector.
    Dual {
        model: &'a DualModel,
        sector: SectorSpec,
    },
    /// A restricted closure dual with its product-X term embedded into one
    /// extra site; spectra are taken in the physical parity sector.
    Embedded {
        model: &'a DualModel,
        sector: SectorSpec,
    },
}

impl AnnealOperator<'_> {
    pub fn n_sites(&self) -> usize {
        match self {
            AnnealOperator::Full(inst) => inst.n_spins(),
            AnnealOperator::Dual { model, .. } => model.dual_sites(),
            AnnealOperator::Embedded { model, .. } => model.dual_sites() + 1,
        }
    }

    /// Concrete operator at `s`, plus the parity sector to restrict to when
    /// the operator is an embedding.
    pub fn assemble(&self, s: f64) -> Result<(TermSum, Option<(PauliString, i8)>), SpectrumError> {
        if !(0.0..=1.0).contains(&s) {
            return Err(SpectrumError::BadS(s));
        }
        match self {
            AnnealOperator::Full(inst) => Ok((full_hamiltonian(inst, s), None)),
            AnnealOperator::Dual { model, sector } => {
                Ok((model.restrict(sector, s)?, None))
            }
            AnnealOperator::Embedded { model, sector } => {
                let restricted = model.restrict(sector, s)?;
                let em = embed_nonlocal(&restricted)?;
                Ok((em.terms, Some((em.parity, em.physical_parity))))
            }
        }
    }
}

/// One solved grid point.
struct PointSolution {
    /// Lowest eigenvalues, ascending (as many as requested, clamped to the
    /// subspace dimension).
    levels: Vec<f64>,
    /// Full spectrum when the dense path ran.
    all: Option<Vec<f64>>,
    /// Ground eigenvector from the Lanczos path, for warm starts.
    ground: Option<Vec<f64>>,
}

fn solve_point(
    ts: &TermSum,
    parity: Option<(&PauliString, i8)>,
    k: usize,
    opts: &SolverOptions,
    warm: Option<&[f64]>,
) -> Result<PointSolution, SpectrumError> {
    let n = ts.n_sites();
    if n > 30 {
        return Err(SpectrumError::TooManySites(n));
    }
    let dim = 1usize << n;
    if dim <= opts.dense_ceiling {
        let all = match parity {
            None => dense::symmetric_eigenvalues(dense::dense_matrix(ts)),
            Some((p, sign)) => dense::symmetric_eigenvalues(dense::parity_projected_matrix(
                ts,
                p,
                sign == 1,
            )),
        };
        let levels = all.iter().take(k.min(all.len())).copied().collect();
        Ok(PointSolution {
            levels,
            all: Some(all),
            ground: None,
        })
    } else {
        let op = CompiledOp::compile(ts, parity)?;
        let (levels, mut vectors) = lanczos::smallest_eigenpairs(&op, k, opts, warm)?;
        let ground = if vectors.is_empty() {
            None
        } else {
            Some(std::mem::take(&mut vectors[0]))
        };
        Ok(PointSolution {
            levels,
            all: None,
            ground,
        })
    }
}

/// Lowest `k` eigenvalues of a term sum, ascending with multiplicity.
///
/// Dense when the dimension is at most `opts.dense_ceiling`, Lanczos above.
/// `parity` restricts to one eigenspace of a commuting X-type parity string.
pub fn lowest_eigs(
    ts: &TermSum,
    parity: Option<(&PauliString, i8)>,
    k: usize,
    opts: &SolverOptions,
) -> Result<Vec<f64>, SpectrumError> {
    if k == 0 {
        return Err(SpectrumError::BadK(1));
    }
    Ok(solve_point(ts, parity, k, opts, None)?.levels)
}

/// Lowest `k` eigenvalues via the Lanczos path regardless of size, for
/// cross-checks against the dense route.
pub fn lanczos_lowest(
    ts: &TermSum,
    parity: Option<(&PauliString, i8)>,
    k: usize,
    opts: &SolverOptions,
) -> Result<Vec<f64>, SpectrumError> {
    let op = CompiledOp::compile(ts, parity)?;
    let (vals, _) = lanczos::smallest_eigenpairs(&op, k, opts, None)?;
    Ok(vals)
}

/// Eigenvalue ladders over an `s` grid with plain and degeneracy-aware gaps.
#[derive(Clone, Debug)]
pub struct GapCurve {
    pub s: Vec<f64>,
    /// Lowest eigenvalues per grid point, ascending.
    pub levels: Vec<Vec<f64>>,
    /// `E1 - E0` per grid point.
    pub gap: Vec<f64>,
    /// Gap to the first eigenvalue above the ground cluster, when one was
    /// found among the computed levels.
    pub gap_degenaware: Vec<Option<f64>>,
}

impl GapCurve {
    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// CSV per the schema `s,E0,...,gap,gap_degenaware`; an unresolved
    /// degeneracy-aware gap prints as `nan`.
    pub fn to_csv(&self) -> String {
        let k = self.levels.first().map_or(0, Vec::len);
        let mut out = String::from("s");
        for i in 0..k {
            write!(out, ",E{i}").unwrap();
        }
        out.push_str(",gap,gap_degenaware\n");
        for (i, &s) in self.s.iter().enumerate() {
            write!(out, "{s}").unwrap();
            for e in &self.levels[i] {
                write!(out, ",{e:.12e}").unwrap();
            }
            match self.gap_degenaware[i] {
                Some(d) => writeln!(out, ",{:.12e},{d:.12e}", self.gap[i]).unwrap(),
                None => writeln!(out, ",{:.12e},nan", self.gap[i]).unwrap(),
            }
        }
        out
    }
}

fn gaps_of(levels: &[f64], all: Option<&[f64]>, deg_tol: f64) -> (f64, Option<f64>) {
    let e0 = levels[0];
    let plain = if levels.len() > 1 {
        levels[1] - e0
    } else {
        f64::NAN
    };
    let source = all.unwrap_or(levels);
    let aware = source
        .iter()
        .find(|&&e| e > e0 + deg_tol)
        .map(|&e| e - e0);
    (plain, aware)
}

fn validate_grid(grid: &[f64]) -> Result<(), SpectrumError> {
    for (i, &s) in grid.iter().enumerate() {
        if !(0.0..=1.0).contains(&s) || (i > 0 && s <= grid[i - 1]) {
            return Err(SpectrumError::BadGrid);
        }
    }
    Ok(())
}

/// Solves the operator across an ascending grid of `s` values.
///
/// Dense-sized operators solve grid points independently; Lanczos-sized ones
/// run in grid order, warm-starting each point from the previous ground
/// vector.
pub fn gap_scan(
    op: &AnnealOperator<'_>,
    grid: &[f64],
    k: usize,
    opts: &SolverOptions,
) -> Result<GapCurve, SpectrumError> {
    if k < 2 {
        return Err(SpectrumError::BadK(2));
    }
    validate_grid(grid)?;
    let mut curve = GapCurve {
        s: grid.to_vec(),
        levels: Vec::with_capacity(grid.len()),
        gap: Vec::with_capacity(grid.len()),
        gap_degenaware: Vec::with_capacity(grid.len()),
    };
    let mut warm: Option<Vec<f64>> = None;
    for &s in grid {
        let (ts, parity) = op.assemble(s)?;
        let sol = solve_point(
            &ts,
            parity.as_ref().map(|(p, sign)| (p, *sign)),
            k,
            opts,
            warm.as_deref(),
        )?;
        let (plain, aware) = gaps_of(&sol.levels, sol.all.as_deref(), opts.degeneracy_tol);
        curve.levels.push(sol.levels);
        curve.gap.push(plain);
        curve.gap_degenaware.push(aware);
        if sol.ground.is_some() {
            warm = sol.ground;
        }
    }
    Ok(curve)
}

/// Location and value of the minimum gap.
#[derive(Clone, Debug)]
pub struct MinGapResult {
    pub s_star: f64,
    pub min_gap: f64,
    /// Width of the final refinement interval in `s`.
    pub refine_tol: f64,
    pub solver_tol: f64,
}

/// Refines the grid minimum of the degeneracy-aware gap by golden-section
/// search in the bracketing interval.
pub fn min_gap(
    op: &AnnealOperator<'_>,
    curve: &GapCurve,
    k: usize,
    refine_tol: f64,
    opts: &SolverOptions,
) -> Result<MinGapResult, SpectrumError> {
    if curve.is_empty() {
        return Err(SpectrumError::BadGrid);
    }
    let objective = |i: usize| curve.gap_degenaware[i].unwrap_or(curve.gap[i]);
    let argmin = (0..curve.s.len())
        .min_by(|&a, &b| objective(a).total_cmp(&objective(b)))
        .expect("non-empty curve");
    let mut best_s = curve.s[argmin];
    let mut best_gap = objective(argmin);

    let mut warm: Option<Vec<f64>> = None;
    let eval = |s: f64, warm: &mut Option<Vec<f64>>| -> Result<f64, SpectrumError> {
        let (ts, parity) = op.assemble(s)?;
        let sol = solve_point(
            &ts,
            parity.as_ref().map(|(p, sign)| (p, *sign)),
            k,
            opts,
            warm.as_deref(),
        )?;
        if sol.ground.is_some() {
            *warm = sol.ground;
        }
        let (plain, aware) = gaps_of(&sol.levels, sol.all.as_deref(), opts.degeneracy_tol);
        Ok(aware.unwrap_or(plain))
    };

    let mut a = curve.s[argmin.saturating_sub(1)];
    let mut b = curve.s[(argmin + 1).min(curve.s.len() - 1)];
    if b - a > refine_tol {
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let mut f1 = eval(x1, &mut warm)?;
        let mut f2 = eval(x2, &mut warm)?;
        while b - a > refine_tol {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = eval(x1, &mut warm)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = eval(x2, &mut warm)?;
            }
            let (xb, fb) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
            if fb < best_gap {
                best_gap = fb;
                best_s = xb;
            }
        }
    }
    Ok(MinGapResult {
        s_star: best_s,
        min_gap: best_gap,
        refine_tol,
        solver_tol: opts.tol,
    })
}

/// The two structured instance families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Tree,
    Closure,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Tree => "tree",
            Family::Closure => "closure",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tree" => Ok(Family::Tree),
            "closure" => Ok(Family::Closure),
            other => Err(format!("unknown family {other:?} (expected tree or closure)")),
        }
    }
}

/// Sector selection for sweeps spanning several instance sizes.
#[derive(Clone, Debug)]
pub enum SectorPolicy {
    AllPlus,
    Explicit(Vec<i8>),
}

impl SectorPolicy {
    fn resolve(&self, q: usize) -> Result<SectorSpec, SpectrumError> {
        match self {
            SectorPolicy::AllPlus => Ok(SectorSpec::all_plus(q)),
            SectorPolicy::Explicit(values) => {
                Ok(SectorSpec::new(values.clone()).map_err(SpectrumError::Duality)?)
            }
        }
    }
}

/// One line of a finite-size scaling table.
#[derive(Clone, Debug)]
pub struct ScalingRow {
    pub family: Family,
    pub g: usize,
    pub n_spins: usize,
    pub n_edges: usize,
    pub dual_sites: usize,
    pub charges: usize,
    pub s_star: f64,
    pub min_gap: f64,
    pub solver_tol: f64,
}

/// CSV per the schema `family,g,N,M,r,q,s_star,min_gap,solver_tol`.
pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let mut out = String::from("family,g,N,M,r,q,s_star,min_gap,solver_tol\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{:.6},{:.10e},{:.1e}",
            r.family, r.g, r.n_spins, r.n_edges, r.dual_sites, r.charges, r.s_star, r.min_gap,
            r.solver_tol
        )
        .unwrap();
    }
    out
}

pub const SCALING_DEFAULT_BUDGET: usize = 22;

/// Minimum-gap scaling across generations of one family.
///
/// Tree instances are solved through the restricted dual; closure instances
/// through the parity embedding of the restricted dual. Every operator must
/// fit within `budget_sites`.
#[allow(clippy::too_many_arguments)]
pub fn scaling_sweep(
    family: Family,
    generations: &[usize],
    sector: &SectorPolicy,
    grid: &[f64],
    k: usize,
    refine_tol: f64,
    opts: &SolverOptions,
    budget_sites: usize,
) -> Result<Vec<ScalingRow>, SpectrumError> {
    let mut rows = Vec::with_capacity(generations.len());
    for &g in generations {
        let inst = match family {
            Family::Tree => crate::model::generate_tree(g),
            Family::Closure => crate::model::generate_closure(g),
        }
        .map_err(|_| SpectrumError::BadGrid)?;
        let dm = crate::duality::dualize(&inst, None)?;
        let sector = sector.resolve(dm.charge_count())?;
        let op = match family {
            Family::Tree => AnnealOperator::Dual {
                model: &dm,
                sector,
            },
            Family::Closure => AnnealOperator::Embedded {
                model: &dm,
                sector,
            },
        };
        let sites = op.n_sites();
        if sites > budget_sites {
            return Err(SpectrumError::BudgetExceeded {
                sites,
                budget: budget_sites,
            });
        }
        let curve = gap_scan(&op, grid, k, opts)?;
        let mg = min_gap(&op, &curve, k, refine_tol, opts)?;
        rows.push(ScalingRow {
            family,
            g,
            n_spins: inst.n_spins(),
            n_edges: inst.n_edges(),
            dual_sites: dm.dual_sites(),
            charges: dm.charge_count(),
            s_star: mg.s_star,
            min_gap: mg.min_gap,
            solver_tol: opts.tol,
        });
    }
    Ok(rows)
}

/// Uniform grid of `points` values covering `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 0 {
        return Vec::new();
    }
    if points == 1 {
        return vec![lo];
    }
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::dualize;
    use crate::model::{generate_closure, generate_tree};

    #[test]
    fn paramagnet_point() {
        let inst = generate_tree(2).unwrap();
        let ts = full_hamiltonian(&inst, 0.0);
        let opts = SolverOptions::default();
        let vals = lowest_eigs(&ts, None, 3, &opts).unwrap();
        assert!((vals[0] + 9.0).abs() < 1e-10);
        assert!((vals[1] + 7.0).abs() < 1e-10);
        let (plain, aware) = gaps_of(&vals, None, opts.degeneracy_tol);
        assert!((plain - 2.0).abs() < 1e-10);
        assert!((aware.unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn single_triangle_full_model_at_s1() {
        // A single three-spin constraint at s=1: diagonal, eigenvalues ±1
        // with the ground level four-fold degenerate.
        let inst = generate_tree(1).unwrap();
        let ts = full_hamiltonian(&inst, 1.0);
        let opts = SolverOptions::default();
        let vals = lowest_eigs(&ts, None, 8, &opts).unwrap();
        for v in &vals[..4] {
            assert!((v + 1.0).abs() < 1e-12);
        }
        for v in &vals[4..] {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dual_closed_form_two_level_system() {
        // Single-triangle dual in the all-plus sector: -s X - 3(1-s) Z has
        // eigenvalues ±sqrt(s² + 9(1-s)²).
        let dm = dualize(&generate_tree(1).unwrap(), None).unwrap();
        let opts = SolverOptions::default();
        for s in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let ts = dm.restrict(&SectorSpec::all_plus(2), s).unwrap();
            let vals = lowest_eigs(&ts, None, 2, &opts).unwrap();
            let expect = (s * s + 9.0 * (1.0 - s) * (1.0 - s)).sqrt();
            assert!((vals[0] + expect).abs() < 1e-12, "s={s}");
            assert!((vals[1] - expect).abs() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn gap_scan_single_triangle_dual() {
        let dm = dualize(&generate_tree(1).unwrap(), None).unwrap();
        let op = AnnealOperator::Dual {
            model: &dm,
            sector: SectorSpec::all_plus(2),
        };
        let opts = SolverOptions::default();
        let curve = gap_scan(&op, &[0.0, 0.5, 1.0], 2, &opts).unwrap();
        let expect = |s: f64| 2.0 * (s * s + 9.0 * (1.0 - s) * (1.0 - s)).sqrt();
        for (i, &s) in curve.s.iter().enumerate() {
            assert!((curve.gap[i] - expect(s)).abs() < 1e-10, "s={s}");
            assert!((curve.gap_degenaware[i].unwrap() - expect(s)).abs() < 1e-10);
        }
        let csv = curve.to_csv();
        assert!(csv.starts_with("s,E0,E1,gap,gap_degenaware\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn min_gap_single_triangle_dual() {
        // Minimizing 4(s² + 9(1-s)²) gives s* = 0.9, gap 2·sqrt(0.9).
        let dm = dualize(&generate_tree(1).unwrap(), None).unwrap();
        let op = AnnealOperator::Dual {
            model: &dm,
            sector: SectorSpec::all_plus(2),
        };
        let opts = SolverOptions::default();
        let grid = uniform_grid(0.0, 1.0, 21);
        let curve = gap_scan(&op, &grid, 2, &opts).unwrap();
        let mg = min_gap(&op, &curve, 2, 1e-4, &opts).unwrap();
        assert!((mg.s_star - 0.9).abs() < 1e-3, "s_star={}", mg.s_star);
        assert!((mg.min_gap - 2.0 * 0.9f64.sqrt()).abs() < 1e-6);
        // The refined minimum does not exceed any scanned value.
        for (i, _) in curve.s.iter().enumerate() {
            assert!(mg.min_gap <= curve.gap_degenaware[i].unwrap() + 1e-9);
        }
    }

    #[test]
    fn ground_degeneracy_of_tree_g2_at_s1() {
        let inst = generate_tree(2).unwrap();
        let ts = full_hamiltonian(&inst, 1.0);
        let opts = SolverOptions::default();
        let vals = lowest_eigs(&ts, None, 40, &opts).unwrap();
        let e0 = vals[0];
        let cluster = vals.iter().filter(|&&v| v <= e0 + 1e-8).count();
        assert_eq!(cluster, 32);
    }

    #[test]
    fn empty_grid_gives_empty_curve() {
        let inst = generate_tree(1).unwrap();
        let op = AnnealOperator::Full(&inst);
        let curve = gap_scan(&op, &[], 2, &SolverOptions::default()).unwrap();
        assert!(curve.is_empty());
        assert!(matches!(
            min_gap(&op, &curve, 2, 1e-4, &SolverOptions::default()),
            Err(SpectrumError::BadGrid)
        ));
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let inst = generate_tree(1).unwrap();
        let op = AnnealOperator::Full(&inst);
        assert!(matches!(
            op.assemble(1.5),
            Err(SpectrumError::BadS(_))
        ));
        assert!(matches!(
            gap_scan(&op, &[0.0, 0.5], 1, &SolverOptions::default()),
            Err(SpectrumError::BadK(2))
        ));
        assert!(matches!(
            gap_scan(&op, &[0.5, 0.2], 2, &SolverOptions::default()),
            Err(SpectrumError::BadGrid)
        ));
    }

    #[test]
    fn lanczos_agrees_with_dense_on_closure_dual() {
        let dm = dualize(&generate_closure(1).unwrap(), None).unwrap();
        let ts = dm.restrict(&SectorSpec::all_plus(3), 0.5).unwrap();
        let opts = SolverOptions::default();
        let dense_vals = lowest_eigs(&ts, None, 4, &opts).unwrap();
        let lanczos_vals = lanczos_lowest(&ts, None, 4, &opts).unwrap();
        for (a, b) in dense_vals.iter().zip(&lanczos_vals) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn scaling_sweep_basics() {
        let opts = SolverOptions::default();
        let rows = scaling_sweep(
            Family::Tree,
            &[],
            &SectorPolicy::AllPlus,
            &uniform_grid(0.0, 1.0, 5),
            2,
            1e-3,
            &opts,
            SCALING_DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(rows.is_empty());
        // Tree g=5 needs 46 dual sites, over the default budget.
        assert!(matches!(
            scaling_sweep(
                Family::Tree,
                &[5],
                &SectorPolicy::AllPlus,
                &uniform_grid(0.0, 1.0, 5),
                2,
                1e-3,
                &opts,
                SCALING_DEFAULT_BUDGET,
            ),
            Err(SpectrumError::BudgetExceeded { sites: 46, .. })
        ));
    }

    #[test]
    fn scaling_csv_schema() {
        let rows = vec![ScalingRow {
            family: Family::Closure,
            g: 1,
            n_spins: 6,
            n_edges: 4,
            dual_sites: 3,
            charges: 3,
            s_star: 0.65,
            min_gap: 1.25,
            solver_tol: 1e-10,
        }];
        let csv = scaling_csv(&rows);
        assert!(csv.starts_with("family,g,N,M,r,q,s_star,min_gap,solver_tol\n"));
        assert!(csv.lines().nth(1).unwrap().starts_with("closure,1,6,4,3,3,"));
    }
}
