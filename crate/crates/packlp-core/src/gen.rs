//! Seeded instance generators. Every generator is a pure function of its
//! spec: same spec, bit-identical instance, on any platform.
//!
//! Draw order is part of the format and must not change:
//!
//! - random: all of `c` first (one `uniform(lo, hi)` draw per column), then
//!   `A` row-major with two draws per cell — the value `u ~ U[0,1)` first,
//!   then the keep draw `z ~ U[0,1)`; the cell is kept iff `z < density`.
//! - vicinity: all of `c` first, then the node permutation (one
//!   Fisher-Yates shuffle), then one center draw per vicinity.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::lp::{LpError, PackingLp};
use crate::rng::{shuffle, SplitMix64};

#[derive(Clone, Debug, PartialEq)]
pub enum GenError {
    InvalidParam(String),
    Lp(LpError),
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::InvalidParam(msg) => write!(f, "invalid generator spec: {msg}"),
            GenError::Lp(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GenError {}

impl From<LpError> for GenError {
    fn from(e: LpError) -> Self {
        GenError::Lp(e)
    }
}

/// How the right-hand side is chosen for random instances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BRule {
    /// `b_i = fraction * n` for every row (the usual setup is 0.1).
    FractionOfN(f64),
    /// `b_i = value` for every row.
    Fixed(f64),
}

impl BRule {
    pub fn value(&self, n: usize) -> f64 {
        match *self {
            BRule::FractionOfN(frac) => frac * n as f64,
            BRule::Fixed(v) => v,
        }
    }
}

impl fmt::Display for BRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BRule::FractionOfN(frac) => write!(f, "{frac}n"),
            BRule::Fixed(v) => write!(f, "{v}"),
        }
    }
}

/// Dense-random family: `a_ij ~ U[0,1)` kept with probability `density`,
/// `c_j ~ U[c_range)`, constant `b` from the rule.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomSpec {
    pub m: usize,
    pub n: usize,
    pub density: f64,
    pub b_rule: BRule,
    pub c_range: (f64, f64),
    pub seed: u64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            m: 100,
            n: 10_000,
            density: 0.8,
            b_rule: BRule::FractionOfN(0.1),
            c_range: (1.0, 100.0),
            seed: 0,
        }
    }
}

/// Resource-placement family: binary membership rows. `vicinities` centers
/// are drawn uniformly (with replacement); each vicinity is its center plus
/// the following `vicinity_size - 1` nodes of a seeded random ring
/// permutation, so overlaps happen naturally. One row per vicinity with
/// `b_i = cap`; `c_j ~ U[c_range)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VicinitySpec {
    pub nodes: usize,
    pub vicinities: usize,
    pub vicinity_size: usize,
    pub cap: f64,
    pub c_range: (f64, f64),
    pub seed: u64,
}

impl Default for VicinitySpec {
    fn default() -> Self {
        VicinitySpec {
            nodes: 10_000,
            vicinities: 100,
            vicinity_size: 2_000,
            cap: 1_000.0,
            c_range: (1.0, 10.0),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    Random(RandomSpec),
    Vicinity(VicinitySpec),
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<PackingLp, GenError> {
        match self {
            GeneratorSpec::Random(spec) => generate_random(spec),
            GeneratorSpec::Vicinity(spec) => generate_vicinity(spec),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            GeneratorSpec::Random(s) => s.seed,
            GeneratorSpec::Vicinity(s) => s.seed,
        }
    }

    /// Same spec with the seed replaced (per-trial instances in sweeps).
    pub fn with_seed(&self, seed: u64) -> GeneratorSpec {
        match self {
            GeneratorSpec::Random(s) => {
                GeneratorSpec::Random(RandomSpec { seed, ..s.clone() })
            }
            GeneratorSpec::Vicinity(s) => {
                GeneratorSpec::Vicinity(VicinitySpec { seed, ..s.clone() })
            }
        }
    }
}

/// Compact one-line fingerprint, stable across runs; used in reports.
impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Random(s) => write!(
                f,
                "random(m={},n={},p={},b={},c=[{},{}],seed={})",
                s.m, s.n, s.density, s.b_rule, s.c_range.0, s.c_range.1, s.seed
            ),
            GeneratorSpec::Vicinity(s) => write!(
                f,
                "vicinity(nodes={},vicinities={},size={},cap={},c=[{},{}],seed={})",
                s.nodes, s.vicinities, s.vicinity_size, s.cap, s.c_range.0, s.c_range.1, s.seed
            ),
        }
    }
}

fn check_c_range(c_range: (f64, f64)) -> Result<(), GenError> {
    let (lo, hi) = c_range;
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
        return Err(GenError::InvalidParam(format!("c range [{lo}, {hi}]")));
    }
    Ok(())
}

pub fn generate_random(spec: &RandomSpec) -> Result<PackingLp, GenError> {
    if spec.m == 0 || spec.n == 0 {
        return Err(GenError::InvalidParam(format!("dimensions {}x{}", spec.m, spec.n)));
    }
    if !(0.0..=1.0).contains(&spec.density) {
        return Err(GenError::InvalidParam(format!("density {}", spec.density)));
    }
    check_c_range(spec.c_range)?;
    let b_val = spec.b_rule.value(spec.n);
    if !(b_val.is_finite() && b_val >= 0.0) {
        return Err(GenError::InvalidParam(format!("b rule yields {b_val}")));
    }

    let mut rng = SplitMix64::new(spec.seed);
    let c: Vec<f64> =
        (0..spec.n).map(|_| rng.uniform(spec.c_range.0, spec.c_range.1)).collect();

    // Row-major generation, then a counting sort into columns. Rows arrive
    // in increasing order within each column by construction.
    let mut rows_tmp: Vec<u32> = Vec::new();
    let mut cols_tmp: Vec<u32> = Vec::new();
    let mut vals_tmp: Vec<f64> = Vec::new();
    for i in 0..spec.m {
        for j in 0..spec.n {
            let value = rng.next_f64();
            let keep = rng.next_f64();
            if keep < spec.density {
                rows_tmp.push(i as u32);
                cols_tmp.push(j as u32);
                vals_tmp.push(value);
            }
        }
    }
    let nnz = vals_tmp.len();
    let mut col_ptr = vec![0usize; spec.n + 1];
    for &j in &cols_tmp {
        col_ptr[j as usize + 1] += 1;
    }
    for j in 0..spec.n {
        col_ptr[j + 1] += col_ptr[j];
    }
    let mut cursor = col_ptr.clone();
    let mut row_idx = vec![0u32; nnz];
    let mut values = vec![0.0f64; nnz];
    for k in 0..nnz {
        let j = cols_tmp[k] as usize;
        let at = cursor[j];
        row_idx[at] = rows_tmp[k];
        values[at] = vals_tmp[k];
        cursor[j] += 1;
    }

    let b = vec![b_val; spec.m];
    Ok(PackingLp::from_parts(spec.m, spec.n, col_ptr, row_idx, values, b, c)?)
}

pub fn generate_vicinity(spec: &VicinitySpec) -> Result<PackingLp, GenError> {
    if spec.nodes == 0 || spec.vicinities == 0 {
        return Err(GenError::InvalidParam(format!(
            "nodes {} and vicinities {} must be positive",
            spec.nodes, spec.vicinities
        )));
    }
    if spec.vicinity_size == 0 || spec.vicinity_size > spec.nodes {
        return Err(GenError::InvalidParam(format!(
            "vicinity size {} outside [1, {}]",
            spec.vicinity_size, spec.nodes
        )));
    }
    if !(spec.cap.is_finite() && spec.cap >= 0.0) {
        return Err(GenError::InvalidParam(format!("cap {}", spec.cap)));
    }
    check_c_range(spec.c_range)?;

    let (m, n) = (spec.vicinities, spec.nodes);
    let mut rng = SplitMix64::new(spec.seed);
    let c: Vec<f64> = (0..n).map(|_| rng.uniform(spec.c_range.0, spec.c_range.1)).collect();

    let mut perm: Vec<u32> = (0..n as u32).collect();
    shuffle(&mut perm, &mut rng);
    let mut pos = vec![0u32; n];
    for (p, &node) in perm.iter().enumerate() {
        pos[node as usize] = p as u32;
    }

    // Membership entries, gathered per row then counting-sorted by column.
    // Within a column, rows arrive ascending because rows are visited in
    // order; a node can appear at most once per vicinity window.
    let mut col_count = vec![0usize; n];
    let mut row_of: Vec<u32> = Vec::with_capacity(m * spec.vicinity_size);
    let mut col_of: Vec<u32> = Vec::with_capacity(m * spec.vicinity_size);
    for i in 0..m {
        let center = rng.next_below(n as u64) as usize;
        let start = pos[center] as usize;
        for t in 0..spec.vicinity_size {
            let node = perm[(start + t) % n] as usize;
            row_of.push(i as u32);
            col_of.push(node as u32);
            col_count[node] += 1;
        }
    }
    let nnz = row_of.len();
    let mut col_ptr = vec![0usize; n + 1];
    for j in 0..n {
        col_ptr[j + 1] = col_ptr[j] + col_count[j];
    }
    let mut cursor = col_ptr.clone();
    let mut row_idx = vec![0u32; nnz];
    let mut values = vec![0.0f64; nnz];
    for k in 0..nnz {
        let j = col_of[k] as usize;
        let at = cursor[j];
        row_idx[at] = row_of[k];
        values[at] = 1.0;
        cursor[j] += 1;
    }

    let b = vec![spec.cap; m];
    Ok(PackingLp::from_parts(m, n, col_ptr, row_idx, values, b, c)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_extremes() {
        let spec = RandomSpec { m: 5, n: 40, density: 0.0, seed: 3, ..RandomSpec::default() };
        let lp = generate_random(&spec).unwrap();
        assert_eq!(lp.nnz(), 0);
        // With no constraints binding, everything should be selectable.
        assert!(lp.check_feasible(&vec![1.0; 40], 0.0).unwrap().feasible);

        let spec = RandomSpec { density: 1.0, ..spec };
        let lp = generate_random(&spec).unwrap();
        assert_eq!(lp.nnz(), 5 * 40);
    }

    #[test]
    fn empirical_density() {
        let mut total = 0usize;
        let trials = 20;
        let (m, n, p) = (40, 2_000, 0.8);
        for seed in 0..trials {
            let spec = RandomSpec { m, n, density: p, seed, ..RandomSpec::default() };
            total += generate_random(&spec).unwrap().nnz();
        }
        let observed = total as f64 / (trials as usize * m * n) as f64;
        assert!((observed - p).abs() < 0.01, "observed density {observed}");
    }

    #[test]
    fn b_rule_and_c_range() {
        let spec = RandomSpec {
            m: 3,
            n: 50,
            b_rule: BRule::FractionOfN(0.1),
            c_range: (1.0, 100.0),
            seed: 9,
            ..RandomSpec::default()
        };
        let lp = generate_random(&spec).unwrap();
        assert!(lp.b().iter().all(|&bi| bi == 5.0));
        assert!(lp.c().iter().all(|&cj| (1.0..100.0).contains(&cj)));

        let spec = RandomSpec { b_rule: BRule::Fixed(7.5), ..spec };
        let lp = generate_random(&spec).unwrap();
        assert!(lp.b().iter().all(|&bi| bi == 7.5));
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = GeneratorSpec::Random(RandomSpec {
            m: 10,
            n: 200,
            density: 0.5,
            seed: 77,
            ..RandomSpec::default()
        });
        assert_eq!(spec.generate().unwrap(), spec.generate().unwrap());

        let vspec = GeneratorSpec::Vicinity(VicinitySpec {
            nodes: 300,
            vicinities: 12,
            vicinity_size: 40,
            cap: 20.0,
            seed: 5,
            ..VicinitySpec::default()
        });
        assert_eq!(vspec.generate().unwrap(), vspec.generate().unwrap());
        assert_ne!(
            vspec.generate().unwrap(),
            vspec.with_seed(6).generate().unwrap()
        );
    }

    #[test]
    fn vicinity_single_covers_everything() {
        let spec = VicinitySpec {
            nodes: 25,
            vicinities: 1,
            vicinity_size: 25,
            cap: 25.0,
            seed: 1,
            ..VicinitySpec::default()
        };
        let lp = generate_vicinity(&spec).unwrap();
        assert_eq!(lp.m(), 1);
        assert_eq!(lp.nnz(), 25);
        // cap equals the row sum, so all-ones is exactly binding.
        let report = lp.check_feasible(&vec![1.0; 25], 0.0).unwrap();
        assert!(report.feasible);
        assert!(report.slack[0].abs() < 1e-12);
    }

    #[test]
    fn vicinity_column_counts_match_dense_membership() {
        let spec = VicinitySpec {
            nodes: 120,
            vicinities: 9,
            vicinity_size: 30,
            cap: 10.0,
            seed: 31,
            ..VicinitySpec::default()
        };
        let lp = generate_vicinity(&spec).unwrap();
        // Dense recount: rebuild membership from the instance rows and
        // compare per-column nonzero counts.
        let mut dense = vec![vec![false; lp.n()]; lp.m()];
        for j in 0..lp.n() {
            let (rows, vals) = lp.col(j);
            for (&i, &a) in rows.iter().zip(vals) {
                assert_eq!(a, 1.0, "vicinity matrices are binary");
                assert!(!dense[i as usize][j], "duplicate membership");
                dense[i as usize][j] = true;
            }
        }
        for j in 0..lp.n() {
            let member_count = (0..lp.m()).filter(|&i| dense[i][j]).count();
            assert_eq!(lp.col_nnz(j), member_count);
        }
        // Every vicinity row has exactly `vicinity_size` members.
        for i in 0..lp.m() {
            let row_count = (0..lp.n()).filter(|&j| dense[i][j]).count();
            assert_eq!(row_count, spec.vicinity_size);
        }
    }

    #[test]
    fn parameter_validation() {
        let bad = VicinitySpec { vicinity_size: 0, ..VicinitySpec::default() };
        assert!(matches!(generate_vicinity(&bad), Err(GenError::InvalidParam(_))));
        let bad = VicinitySpec { nodes: 10, vicinity_size: 11, ..VicinitySpec::default() };
        assert!(matches!(generate_vicinity(&bad), Err(GenError::InvalidParam(_))));
        let bad = RandomSpec { density: 1.5, ..RandomSpec::default() };
        assert!(matches!(generate_random(&bad), Err(GenError::InvalidParam(_))));
    }
}
