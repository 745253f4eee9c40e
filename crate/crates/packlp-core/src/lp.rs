//! Packing LP instances, solutions, and the shared metric/feasibility
//! operations every other module builds on.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Errors from instance construction and the shared operations.
#[derive(Clone, Debug, PartialEq)]
pub enum LpError {
    /// A vector had the wrong length for this instance.
    Dimension { what: &'static str, expected: usize, got: usize },
    /// Row or column index outside `[0, m) x [0, n)`.
    IndexOutOfRange { row: usize, col: usize, m: usize, n: usize },
    /// Matrix coefficient outside `[0, 1]`.
    CoefficientRange { row: usize, col: usize, value: f64 },
    /// Two entries shared the same `(row, col)` position.
    DuplicateEntry { row: usize, col: usize },
    /// Negative or non-finite right-hand side.
    InvalidRhs { row: usize, value: f64 },
    /// Negative or non-finite objective coefficient.
    InvalidCost { col: usize, value: f64 },
    /// `m` and `n` must both be positive.
    EmptyDimension { m: usize, n: usize },
    /// Column pointer array malformed (internal constructor misuse).
    MalformedColumns(String),
    /// `relative_error` needs a positive reference optimum.
    InvalidOptReference { opt: f64 },
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::Dimension { what, expected, got } => {
                write!(f, "{what}: expected length {expected}, got {got}")
            }
            LpError::IndexOutOfRange { row, col, m, n } => {
                write!(f, "entry ({row}, {col}) outside {m}x{n} instance")
            }
            LpError::CoefficientRange { row, col, value } => {
                write!(f, "coefficient a[{row},{col}] = {value} outside [0, 1]")
            }
            LpError::DuplicateEntry { row, col } => {
                write!(f, "duplicate entry at ({row}, {col})")
            }
            LpError::InvalidRhs { row, value } => {
                write!(f, "b[{row}] = {value} must be finite and nonnegative")
            }
            LpError::InvalidCost { col, value } => {
                write!(f, "c[{col}] = {value} must be finite and nonnegative")
            }
            LpError::EmptyDimension { m, n } => {
                write!(f, "instance must have positive dimensions, got {m}x{n}")
            }
            LpError::MalformedColumns(msg) => write!(f, "malformed column structure: {msg}"),
            LpError::InvalidOptReference { opt } => {
                write!(f, "reference optimum must be positive, got {opt}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LpError {}

/// A packing LP `max c'x : Ax <= b, 0 <= x <= 1` in column-major sparse
/// form. Immutable after construction; all invariants (`a_ij` in `[0,1]`,
/// `b >= 0`, `c >= 0`, no duplicate entries, sorted columns) are enforced
/// by the constructors.
#[derive(Clone, Debug, PartialEq)]
pub struct PackingLp {
    m: usize,
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    values: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl PackingLp {
    /// Builds an instance from unordered `(row, col, value)` triples.
    /// Duplicate positions are rejected, not summed: silently merging could
    /// push a coefficient above 1.
    pub fn from_entries(
        m: usize,
        n: usize,
        entries: &[(usize, usize, f64)],
        b: Vec<f64>,
        c: Vec<f64>,
    ) -> Result<Self, LpError> {
        let mut order: Vec<u32> = (0..entries.len() as u32).collect();
        order.sort_unstable_by_key(|&k| {
            let (i, j, _) = entries[k as usize];
            (j, i)
        });
        let mut col_ptr = vec![0usize; n + 1];
        let mut row_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for &k in &order {
            let (i, j, a) = entries[k as usize];
            if i >= m || j >= n {
                return Err(LpError::IndexOutOfRange { row: i, col: j, m, n });
            }
            if last == Some((j, i)) {
                return Err(LpError::DuplicateEntry { row: i, col: j });
            }
            last = Some((j, i));
            col_ptr[j + 1] += 1;
            row_idx.push(i as u32);
            values.push(a);
        }
        for j in 0..n {
            col_ptr[j + 1] += col_ptr[j];
        }
        Self::from_parts(m, n, col_ptr, row_idx, values, b, c)
    }

    /// Builds an instance from ready-made CSC arrays. Columns must be sorted
    /// by row index with no duplicates; this is validated in one pass.
    pub fn from_parts(
        m: usize,
        n: usize,
        col_ptr: Vec<usize>,
        row_idx: Vec<u32>,
        values: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
    ) -> Result<Self, LpError> {
        if m == 0 || n == 0 {
            return Err(LpError::EmptyDimension { m, n });
        }
        if m > u32::MAX as usize {
            return Err(LpError::MalformedColumns(String::from("m exceeds u32 range")));
        }
        if b.len() != m {
            return Err(LpError::Dimension { what: "b", expected: m, got: b.len() });
        }
        if c.len() != n {
            return Err(LpError::Dimension { what: "c", expected: n, got: c.len() });
        }
        if col_ptr.len() != n + 1 || col_ptr[0] != 0 || col_ptr[n] != row_idx.len() {
            return Err(LpError::MalformedColumns(String::from("bad column pointers")));
        }
        if row_idx.len() != values.len() {
            return Err(LpError::Dimension {
                what: "values",
                expected: row_idx.len(),
                got: values.len(),
            });
        }
        for (row, &v) in b.iter().enumerate() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(LpError::InvalidRhs { row, value: v });
            }
        }
        for (col, &v) in c.iter().enumerate() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(LpError::InvalidCost { col, value: v });
            }
        }
        for j in 0..n {
            let (start, end) = (col_ptr[j], col_ptr[j + 1]);
            if start > end || end > row_idx.len() {
                return Err(LpError::MalformedColumns(String::from("col range out of order")));
            }
            let mut prev: Option<u32> = None;
            for k in start..end {
                let i = row_idx[k];
                if i as usize >= m {
                    return Err(LpError::IndexOutOfRange { row: i as usize, col: j, m, n });
                }
                if prev == Some(i) {
                    return Err(LpError::DuplicateEntry { row: i as usize, col: j });
                }
                if let Some(p) = prev {
                    if i < p {
                        return Err(LpError::MalformedColumns(String::from(
                            "rows not sorted within column",
                        )));
                    }
                }
                prev = Some(i);
                let a = values[k];
                if !(a.is_finite() && (0.0..=1.0).contains(&a)) {
                    return Err(LpError::CoefficientRange { row: i as usize, col: j, value: a });
                }
            }
        }
        Ok(PackingLp { m, n, col_ptr, row_idx, values, b, c })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// Nonzeros of column `j` as parallel `(row indices, values)` slices.
    /// Cost is proportional to the column's nonzero count.
    pub fn col(&self, j: usize) -> (&[u32], &[f64]) {
        let (s, e) = (self.col_ptr[j], self.col_ptr[j + 1]);
        (&self.row_idx[s..e], &self.values[s..e])
    }

    pub fn col_nnz(&self, j: usize) -> usize {
        self.col_ptr[j + 1] - self.col_ptr[j]
    }

    /// `sum_i a_ij * y_i` for one column.
    pub fn col_dot(&self, j: usize, y: &[f64]) -> f64 {
        let (rows, vals) = self.col(j);
        let mut acc = 0.0;
        for (&i, &a) in rows.iter().zip(vals) {
            acc += a * y[i as usize];
        }
        acc
    }

    /// Row loads `Ax`.
    pub fn loads(&self, x: &[f64]) -> Result<Vec<f64>, LpError> {
        if x.len() != self.n {
            return Err(LpError::Dimension { what: "x", expected: self.n, got: x.len() });
        }
        let mut ax = vec![0.0; self.m];
        for j in 0..self.n {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            let (rows, vals) = self.col(j);
            for (&i, &a) in rows.iter().zip(vals) {
                ax[i as usize] += a * xj;
            }
        }
        Ok(ax)
    }

    /// Objective value `c'x`.
    pub fn objective(&self, x: &[f64]) -> Result<f64, LpError> {
        if x.len() != self.n {
            return Err(LpError::Dimension { what: "x", expected: self.n, got: x.len() });
        }
        Ok(self.c.iter().zip(x).map(|(&cj, &xj)| cj * xj).sum())
    }

    /// `min_i b_i`. Total because instances always have `m >= 1`.
    pub fn min_b(&self) -> f64 {
        self.b.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Same instance with the objective vector replaced.
    pub fn with_costs(&self, c: Vec<f64>) -> Result<Self, LpError> {
        Self::from_parts(
            self.m,
            self.n,
            self.col_ptr.clone(),
            self.row_idx.clone(),
            self.values.clone(),
            self.b.clone(),
            c,
        )
    }

    /// Same instance with the right-hand side replaced.
    pub fn with_rhs(&self, b: Vec<f64>) -> Result<Self, LpError> {
        Self::from_parts(
            self.m,
            self.n,
            self.col_ptr.clone(),
            self.row_idx.clone(),
            self.values.clone(),
            b,
            self.c.clone(),
        )
    }

    /// Checks `Ax <= b + tol` and `-tol <= x_j <= 1 + tol` and reports the
    /// per-constraint slacks `b_i - (Ax)_i` plus the worst violation seen.
    pub fn check_feasible(&self, x: &[f64], tol: f64) -> Result<FeasibilityReport, LpError> {
        let ax = self.loads(x)?;
        let mut report = FeasibilityReport {
            feasible: true,
            slack: Vec::with_capacity(self.m),
            worst_violation: 0.0,
            violated_rows: Vec::new(),
            violated_cols: Vec::new(),
        };
        for i in 0..self.m {
            let slack = self.b[i] - ax[i];
            if slack < -tol {
                report.feasible = false;
                report.violated_rows.push(i);
            }
            report.worst_violation = report.worst_violation.max(-slack);
            report.slack.push(slack);
        }
        for (j, &xj) in x.iter().enumerate() {
            let excess = (-xj).max(xj - 1.0);
            if excess > tol {
                report.feasible = false;
                report.violated_cols.push(j);
            }
            report.worst_violation = report.worst_violation.max(excess);
        }
        report.worst_violation = report.worst_violation.max(0.0);
        Ok(report)
    }
}

/// Outcome of [`PackingLp::check_feasible`].
#[derive(Clone, Debug)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// `b_i - (Ax)_i` per constraint; negative means violated.
    pub slack: Vec<f64>,
    /// Largest constraint or box violation (0 when feasible).
    pub worst_violation: f64,
    pub violated_rows: Vec<usize>,
    pub violated_cols: Vec<usize>,
}

/// True iff every entry is exactly `0.0` or `1.0`.
pub fn is_binary(x: &[f64]) -> bool {
    x.iter().all(|&v| v == 0.0 || v == 1.0)
}

/// `1 - obj/opt`, the paper-style relative error against a known optimum.
pub fn relative_error(obj: f64, opt: f64) -> Result<f64, LpError> {
    if !(opt > 0.0) {
        return Err(LpError::InvalidOptReference { opt });
    }
    Ok(1.0 - obj / opt)
}

/// A primal point together with its objective value.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimalSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

impl PrimalSolution {
    /// Builds the solution with the objective recomputed from the instance,
    /// so the stored value is consistent by construction.
    pub fn evaluated(lp: &PackingLp, x: Vec<f64>) -> Result<Self, LpError> {
        let objective = lp.objective(&x)?;
        Ok(PrimalSolution { x, objective })
    }

    /// Verifies `objective == c'x` within `1e-9 * (1 + |objective|)`.
    pub fn objective_consistent(&self, lp: &PackingLp) -> bool {
        match lp.objective(&self.x) {
            Ok(v) => (v - self.objective).abs() <= 1e-9 * (1.0 + self.objective.abs()),
            Err(_) => false,
        }
    }
}

/// Dual prices: `phi` on the packing rows, `psi` on the `x_j <= 1` bounds of
/// the LP that was solved (so `psi.len()` is that LP's variable count).
#[derive(Clone, Debug, PartialEq)]
pub struct DualSolution {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
}

impl DualSolution {
    pub fn is_nonnegative(&self, tol: f64) -> bool {
        self.phi.iter().chain(self.psi.iter()).all(|&v| v >= -tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    fn small_random(m: usize, n: usize, density: f64, seed: u64) -> PackingLp {
        let mut rng = SplitMix64::new(seed);
        let c: Vec<f64> = (0..n).map(|_| rng.uniform(1.0, 100.0)).collect();
        let mut entries = Vec::new();
        for i in 0..m {
            for j in 0..n {
                let v = rng.next_f64();
                let keep = rng.next_f64();
                if keep < density {
                    entries.push((i, j, v));
                }
            }
        }
        let b: Vec<f64> = (0..m).map(|_| 0.1 * n as f64).collect();
        PackingLp::from_entries(m, n, &entries, b, c).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        let b = vec![1.0];
        let c = vec![1.0, 1.0];
        assert!(matches!(
            PackingLp::from_entries(1, 2, &[(0, 0, 1.5)], b.clone(), c.clone()),
            Err(LpError::CoefficientRange { .. })
        ));
        assert!(matches!(
            PackingLp::from_entries(1, 2, &[(0, 0, 0.5), (0, 0, 0.2)], b.clone(), c.clone()),
            Err(LpError::DuplicateEntry { row: 0, col: 0 })
        ));
        assert!(matches!(
            PackingLp::from_entries(1, 2, &[(1, 0, 0.5)], b.clone(), c.clone()),
            Err(LpError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            PackingLp::from_entries(1, 2, &[], vec![-1.0], c.clone()),
            Err(LpError::InvalidRhs { .. })
        ));
        assert!(matches!(
            PackingLp::from_entries(0, 2, &[], vec![], c),
            Err(LpError::EmptyDimension { .. })
        ));
    }

    #[test]
    fn column_access_matches_entries() {
        let entries = [(0, 1, 0.25), (1, 1, 0.5), (0, 3, 1.0)];
        let lp =
            PackingLp::from_entries(2, 4, &entries, vec![1.0, 2.0], vec![1.0; 4]).unwrap();
        assert_eq!(lp.nnz(), 3);
        assert_eq!(lp.col(0), (&[][..], &[][..]));
        assert_eq!(lp.col(1), (&[0u32, 1][..], &[0.25, 0.5][..]));
        assert_eq!(lp.col(3), (&[0u32][..], &[1.0][..]));
    }

    #[test]
    fn objective_zero_cost_vector() {
        let lp = PackingLp::from_entries(1, 3, &[], vec![1.0], vec![0.0; 3]).unwrap();
        assert_eq!(lp.objective(&[0.3, 0.9, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn objective_all_ones() {
        let lp = PackingLp::from_entries(1, 7, &[], vec![1.0], vec![1.0; 7]).unwrap();
        assert_eq!(lp.objective(&vec![1.0; 7]).unwrap(), 7.0);
    }

    #[test]
    fn objective_matches_scalar_loop() {
        let lp = small_random(3, 5, 0.8, 11);
        let mut rng = SplitMix64::new(12);
        let x: Vec<f64> = (0..5).map(|_| rng.next_f64()).collect();
        let mut expect = 0.0;
        for j in 0..5 {
            expect += lp.c()[j] * x[j];
        }
        assert!((lp.objective(&x).unwrap() - expect).abs() <= 1e-12);
    }

    #[test]
    fn objective_dimension_error() {
        let lp = small_random(2, 4, 1.0, 3);
        assert!(matches!(lp.objective(&[1.0]), Err(LpError::Dimension { .. })));
    }

    #[test]
    fn zero_vector_always_feasible() {
        let lp = small_random(4, 9, 0.7, 21);
        let report = lp.check_feasible(&vec![0.0; 9], 0.0).unwrap();
        assert!(report.feasible);
        assert_eq!(report.worst_violation, 0.0);
    }

    #[test]
    fn all_ones_violation_reported() {
        // Row 0 sums to 1.7 > b_0 = 1.0; row 1 stays slack.
        let entries = [(0, 0, 0.9), (0, 1, 0.8), (1, 2, 0.1)];
        let lp =
            PackingLp::from_entries(2, 3, &entries, vec![1.0, 5.0], vec![1.0; 3]).unwrap();
        let report = lp.check_feasible(&vec![1.0; 3], 1e-9).unwrap();
        assert!(!report.feasible);
        assert_eq!(report.violated_rows, vec![0]);
        assert!((report.worst_violation - 0.7).abs() < 1e-12);
        assert!((report.slack[1] - 4.9).abs() < 1e-12);
    }

    #[test]
    fn feasibility_matches_dense_recomputation() {
        let lp = small_random(4, 8, 0.6, 33);
        let mut rng = SplitMix64::new(34);
        for _ in 0..50 {
            let x: Vec<f64> = (0..8).map(|_| rng.uniform(-0.1, 1.2)).collect();
            let report = lp.check_feasible(&x, 1e-7).unwrap();
            // Dense oracle.
            let mut dense = vec![vec![0.0; 8]; 4];
            for j in 0..8 {
                let (rows, vals) = lp.col(j);
                for (&i, &a) in rows.iter().zip(vals) {
                    dense[i as usize][j] = a;
                }
            }
            let mut ok = true;
            for i in 0..4 {
                let load: f64 = (0..8).map(|j| dense[i][j] * x[j]).sum();
                if load > lp.b()[i] + 1e-7 {
                    ok = false;
                }
            }
            for &xj in &x {
                if !(-1e-7..=1.0 + 1e-7).contains(&xj) {
                    ok = false;
                }
            }
            assert_eq!(report.feasible, ok);
        }
    }

    #[test]
    fn min_b_examples() {
        let lp =
            PackingLp::from_entries(3, 1, &[], vec![3.0, 1.0, 7.0], vec![1.0]).unwrap();
        assert_eq!(lp.min_b(), 1.0);
        let lp = PackingLp::from_entries(1, 1, &[], vec![5.0], vec![1.0]).unwrap();
        assert_eq!(lp.min_b(), 5.0);
        // Paper-default b rule at n = 10^6.
        let n = 1_000_000;
        assert_eq!(0.1 * n as f64, 1e5);
    }

    #[test]
    fn relative_error_examples() {
        assert_eq!(relative_error(100.0, 100.0).unwrap(), 0.0);
        assert!((relative_error(96.0, 100.0).unwrap() - 0.04).abs() < 1e-15);
        assert!(matches!(
            relative_error(1.0, 0.0),
            Err(LpError::InvalidOptReference { .. })
        ));
        assert!(matches!(
            relative_error(1.0, -3.0),
            Err(LpError::InvalidOptReference { .. })
        ));
    }

    #[test]
    fn binary_detection() {
        assert!(is_binary(&[0.0, 1.0, 1.0]));
        assert!(!is_binary(&[0.0, 0.5]));
        assert!(!is_binary(&[1.0 + 1e-12]));
    }

    #[test]
    fn primal_solution_consistency() {
        let lp = small_random(2, 5, 0.9, 8);
        let sol = PrimalSolution::evaluated(&lp, vec![1.0, 0.0, 0.5, 0.0, 1.0]).unwrap();
        assert!(sol.objective_consistent(&lp));
        let broken = PrimalSolution { x: sol.x.clone(), objective: sol.objective + 1.0 };
        assert!(!broken.objective_consistent(&lp));
    }

    proptest! {
        #[test]
        fn objective_is_linear(seed in 0u64..1000, lambda in 0.0f64..=1.0) {
            let lp = small_random(3, 6, 0.7, seed);
            let mut rng = SplitMix64::new(seed ^ 0xABCD);
            let x: Vec<f64> = (0..6).map(|_| rng.next_f64()).collect();
            let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
            let lhs = lp.objective(&scaled).unwrap();
            let rhs = lambda * lp.objective(&x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }

        #[test]
        fn zero_point_feasible_for_any_instance(seed in 0u64..500) {
            let mut rng = SplitMix64::new(seed);
            let m = 1 + (rng.next_below(5) as usize);
            let n = 1 + (rng.next_below(12) as usize);
            let lp = small_random(m, n, rng.next_f64(), seed ^ 0x77);
            prop_assert!(lp.check_feasible(&vec![0.0; n], 0.0).unwrap().feasible);
        }
    }
}
