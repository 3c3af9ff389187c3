//! Exact combinatorial oracles.
//!
//! [`Oracle`] bundles a [`ProblemInstance`] with an [`OracleAudit`] counter
//! and exposes the nominal solve `x*(c)`, the k-best enumeration, the
//! budget-robust counterpart, and feasibility checks. Every nominal solve is
//! counted, including those issued internally by [`Oracle::top_k`] and
//! [`Oracle::robust_solve`].
//!
//! Ties between equal-cost decisions are broken by [`Decision::tie_cmp`]
//! everywhere, so all entry points agree on which optimum they return.

mod grid;
mod robust;
mod select;
mod tsp;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::types::{CostVector, Decision};

pub use robust::UncertaintyParams;
pub use tsp::{tour_order, TSP_SOLVE_LIMIT, TSP_TOPK_LIMIT};

/// Feasible-set structure with a fixed variable ordering.
///
/// * `Grid`: directed NW→SE paths on a `rows × cols` grid. Variables are all
///   horizontal edges row-major, then all vertical edges row-major.
/// * `Tsp`: Hamiltonian cycles on a complete graph; variables are node pairs
///   `(i, j)`, `i < j`, in lexicographic order. Coordinates are optional and
///   only used to derive Euclidean costs.
/// * `Select`: pick exactly one of `n` items.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemInstance {
    Grid {
        rows: usize,
        cols: usize,
    },
    Tsp {
        nodes: usize,
        coords: Option<Vec<(f64, f64)>>,
    },
    Select {
        n: usize,
    },
}

impl ProblemInstance {
    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid {rows}x{cols} has no edges"
            )));
        }
        Ok(ProblemInstance::Grid { rows, cols })
    }

    pub fn tsp(nodes: usize) -> Result<Self> {
        if nodes < 3 {
            return Err(Error::InvalidParameter(format!(
                "TSP needs at least 3 nodes, got {nodes}"
            )));
        }
        Ok(ProblemInstance::Tsp {
            nodes,
            coords: None,
        })
    }

    pub fn tsp_with_coords(coords: Vec<(f64, f64)>) -> Result<Self> {
        let mut inst = Self::tsp(coords.len())?;
        if let ProblemInstance::Tsp { coords: c, .. } = &mut inst {
            *c = Some(coords);
        }
        Ok(inst)
    }

    pub fn select(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("select needs n >= 1".into()));
        }
        Ok(ProblemInstance::Select { n })
    }

    /// Number of binary variables.
    pub fn num_vars(&self) -> usize {
        match *self {
            ProblemInstance::Grid { rows, cols } => rows * (cols - 1) + cols * (rows - 1),
            ProblemInstance::Tsp { nodes, .. } => nodes * (nodes - 1) / 2,
            ProblemInstance::Select { n } => n,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ProblemInstance::Grid { .. } => "grid",
            ProblemInstance::Tsp { .. } => "tsp",
            ProblemInstance::Select { .. } => "select",
        }
    }

    /// Euclidean edge lengths for a TSP instance with coordinates.
    pub fn euclidean_costs(&self) -> Option<CostVector> {
        match self {
            ProblemInstance::Tsp {
                nodes,
                coords: Some(xy),
            } => {
                let mut c = Vec::with_capacity(self.num_vars());
                for i in 0..*nodes {
                    for j in i + 1..*nodes {
                        let (dx, dy) = (xy[i].0 - xy[j].0, xy[i].1 - xy[j].1);
                        c.push((dx * dx + dy * dy).sqrt());
                    }
                }
                Some(CostVector(c))
            }
            _ => None,
        }
    }
}

impl fmt::Display for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemInstance::Grid { rows, cols } => write!(f, "grid:{rows}x{cols}"),
            ProblemInstance::Tsp { nodes, coords } => {
                write!(f, "tsp:{nodes}")?;
                if let Some(xy) = coords {
                    let body: Vec<String> =
                        xy.iter().map(|(x, y)| format!("{x:.6},{y:.6}")).collect();
                    write!(f, ",coords={}", body.join(";"))?;
                }
                Ok(())
            }
            ProblemInstance::Select { n } => write!(f, "select:{n}"),
        }
    }
}

impl FromStr for ProblemInstance {
    type Err = Error;

    /// Parses `grid:VxH`, `tsp:N[,coords=x,y;x,y;...]` or `select:N`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad instance descriptor {s:?}"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "grid" => {
                let (v, h) = rest.split_once('x').ok_or_else(bad)?;
                Self::grid(v.parse().map_err(|_| bad())?, h.parse().map_err(|_| bad())?)
            }
            "tsp" => {
                let (count, coords) = match rest.split_once(",coords=") {
                    Some((c, xy)) => (c, Some(xy)),
                    None => (rest, None),
                };
                let nodes: usize = count.parse().map_err(|_| bad())?;
                match coords {
                    None => Self::tsp(nodes),
                    Some(xy) => {
                        let pts = xy
                            .split(';')
                            .map(|p| {
                                let (x, y) = p.split_once(',')?;
                                Some((x.parse().ok()?, y.parse().ok()?))
                            })
                            .collect::<Option<Vec<(f64, f64)>>>()
                            .ok_or_else(bad)?;
                        if pts.len() != nodes {
                            return Err(bad());
                        }
                        Self::tsp_with_coords(pts)
                    }
                }
            }
            "select" => Self::select(rest.parse().map_err(|_| bad())?),
            _ => Err(bad()),
        }
    }
}

/// Thread-safe count of nominal solves.
#[derive(Debug, Default)]
pub struct OracleAudit {
    solves: AtomicU64,
}

impl OracleAudit {
    pub fn solve_count(&self) -> u64 {
        self.solves.load(Ordering::Relaxed)
    }

    fn record(&self, n: u64) {
        self.solves.fetch_add(n, Ordering::Relaxed);
    }
}

/// Solver front-end for one instance.
#[derive(Debug)]
pub struct Oracle {
    instance: ProblemInstance,
    audit: OracleAudit,
}

impl Clone for Oracle {
    /// Clones the instance with a fresh, zeroed audit.
    fn clone(&self) -> Self {
        Oracle::new(self.instance.clone())
    }
}

impl Oracle {
    pub fn new(instance: ProblemInstance) -> Self {
        Self {
            instance,
            audit: OracleAudit::default(),
        }
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.instance
    }

    pub fn num_vars(&self) -> usize {
        self.instance.num_vars()
    }

    pub fn audit(&self) -> &OracleAudit {
        &self.audit
    }

    pub fn solve_count(&self) -> u64 {
        self.audit.solve_count()
    }

    fn check_costs(&self, c: &CostVector) -> Result<()> {
        check_len("cost vector", self.num_vars(), c.len())?;
        if !c.is_finite() {
            return Err(Error::NonFinite {
                context: "oracle cost vector".into(),
            });
        }
        Ok(())
    }

    /// `x*(c) = argmin_x c^T x`.
    pub fn solve(&self, c: &CostVector) -> Result<Decision> {
        self.check_costs(c)?;
        let x = match &self.instance {
            ProblemInstance::Grid { rows, cols } => {
                grid::solve_constrained(*rows, *cols, c.as_slice(), &[], &[])?
                    .expect("unconstrained grid always has a path")
                    .1
            }
            ProblemInstance::Tsp { nodes, .. } => tsp::held_karp(*nodes, c.as_slice())?,
            ProblemInstance::Select { .. } => select::solve(c.as_slice()),
        };
        self.audit.record(1);
        Ok(x)
    }

    /// The `k` best distinct decisions, sorted by cost then tie order.
    ///
    /// Audit cost: grids count one solve per constrained DP (one root plus one
    /// per Lawler child branch); TSP enumeration and one-of-n sorting count as
    /// a single solve.
    pub fn top_k(&self, c: &CostVector, k: usize) -> Result<Vec<Decision>> {
        self.check_costs(c)?;
        if k == 0 {
            return Err(Error::InvalidParameter("top-k needs k >= 1".into()));
        }
        let (out, solves) = match &self.instance {
            ProblemInstance::Grid { rows, cols } => grid::top_k(*rows, *cols, c.as_slice(), k)?,
            ProblemInstance::Tsp { nodes, .. } => (tsp::top_k(*nodes, c.as_slice(), k)?, 1),
            ProblemInstance::Select { .. } => (select::top_k(c.as_slice(), k), 1),
        };
        self.audit.record(solves);
        Ok(out)
    }

    /// Worst case of `c^T x` over the budget uncertainty set around `c`.
    pub fn worst_case_cost(
        &self,
        c: &CostVector,
        x: &Decision,
        u: &UncertaintyParams,
    ) -> Result<f64> {
        check_len("cost vector", self.num_vars(), c.len())?;
        check_len("decision", self.num_vars(), x.len())?;
        u.validate()?;
        Ok(robust::worst_case_cost(c.as_slice(), x, u))
    }

    /// Decision minimizing [`Oracle::worst_case_cost`].
    ///
    /// Uses threshold decomposition: one nominal solve per distinct deviation
    /// threshold `θ ∈ {ρ|c_i|} ∪ {0}` on costs `c_i + max(ρ|c_i| − θ, 0)`.
    /// Each candidate is re-scored exactly and the best one returned.
    pub fn robust_solve(&self, c: &CostVector, u: &UncertaintyParams) -> Result<Decision> {
        self.check_costs(c)?;
        u.validate()?;
        let mut best: Option<(f64, Decision)> = None;
        for theta in robust::thresholds(c.as_slice(), u.rho) {
            let adjusted = robust::adjusted_costs(c.as_slice(), u.rho, theta);
            let x = self.solve(&adjusted)?;
            let value = robust::worst_case_cost(c.as_slice(), &x, u);
            let better = match &best {
                None => true,
                Some((bv, bx)) => crate::types::rank_cmp(value, &x, *bv, bx).is_lt(),
            };
            if better {
                best = Some((value, x));
            }
        }
        Ok(best.expect("threshold set contains 0").1)
    }

    /// Number of nominal solves [`Oracle::robust_solve`] issues for `c`.
    pub fn robust_solve_cost(&self, c: &CostVector, u: &UncertaintyParams) -> usize {
        robust::thresholds(c.as_slice(), u.rho).len()
    }

    pub fn is_feasible(&self, x: &Decision) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        match &self.instance {
            ProblemInstance::Grid { rows, cols } => grid::is_feasible(*rows, *cols, x),
            ProblemInstance::Tsp { nodes, .. } => tsp::is_feasible(*nodes, x),
            ProblemInstance::Select { .. } => x.ones().count() == 1,
        }
    }
}

/// Serializable snapshot of solve counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveCounts {
    pub precompute: u64,
    pub gradient: u64,
    pub evaluation: u64,
}

impl SolveCounts {
    /// Solves attributable to training: precompute plus gradient path.
    pub fn training_total(&self) -> u64 {
        self.precompute + self.gradient
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid2() -> Oracle {
        Oracle::new(ProblemInstance::grid(2, 2).unwrap())
    }

    #[test]
    fn variable_counts() {
        assert_eq!(ProblemInstance::grid(10, 10).unwrap().num_vars(), 180);
        assert_eq!(ProblemInstance::grid(5, 5).unwrap().num_vars(), 40);
        assert_eq!(ProblemInstance::grid(2, 3).unwrap().num_vars(), 7);
        assert_eq!(ProblemInstance::tsp(20).unwrap().num_vars(), 190);
        assert_eq!(ProblemInstance::tsp(4).unwrap().num_vars(), 6);
    }

    #[test]
    fn descriptor_round_trip() {
        for s in [
            "grid:5x5",
            "grid:3x7",
            "tsp:8",
            "select:2",
            "tsp:3,coords=0.000000,0.000000;1.000000,0.500000;0.250000,0.125000",
        ] {
            let inst: ProblemInstance = s.parse().unwrap();
            assert_eq!(inst.to_string(), s);
        }
        assert!("grid:1x1".parse::<ProblemInstance>().is_err());
        assert!("tsp:3,coords=0,0;1,1".parse::<ProblemInstance>().is_err());
        assert!("cube:3".parse::<ProblemInstance>().is_err());
    }

    #[test]
    fn grid_solve_examples() {
        let o = grid2();
        let x = o.solve(&vec![1.0, 5.0, 1.0, 1.0].into()).unwrap();
        assert_eq!(x, Decision::from_bits(&[1, 0, 0, 1]));
        let x = o.solve(&vec![1.0, 1.0, 1.0, 1.0].into()).unwrap();
        assert_eq!(x, Decision::from_bits(&[1, 0, 0, 1]));
        assert_eq!(o.solve_count(), 2);
    }

    #[test]
    fn solve_rejects_bad_input() {
        let o = grid2();
        assert!(matches!(
            o.solve(&vec![1.0; 3].into()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            o.solve(&vec![1.0, f64::NAN, 1.0, 1.0].into()),
            Err(Error::NonFinite { .. })
        ));
        let big = Oracle::new(ProblemInstance::tsp(17).unwrap());
        assert!(matches!(
            big.solve(&CostVector::zeros(136)),
            Err(Error::TooManyNodes { .. })
        ));
        assert_eq!(o.solve_count(), 0);
    }

    #[test]
    fn tsp_square_is_perimeter() {
        let inst =
            ProblemInstance::tsp_with_coords(vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
                .unwrap();
        let c = inst.euclidean_costs().unwrap();
        let o = Oracle::new(inst);
        let x = o.solve(&c).unwrap();
        // pairs: 01 02 03 12 13 23
        assert_eq!(x, Decision::from_bits(&[1, 0, 1, 1, 0, 1]));
        assert_eq!(crate::types::dot(&c, &x).unwrap(), 4.0);
        assert_eq!(tour_order(4, &x), Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn top_k_examples() {
        let o = grid2();
        let c: CostVector = vec![1.0, 5.0, 1.0, 1.0].into();
        let ks = o.top_k(&c, 2).unwrap();
        assert_eq!(
            ks,
            vec![
                Decision::from_bits(&[1, 0, 0, 1]),
                Decision::from_bits(&[0, 1, 1, 0])
            ]
        );
        assert_eq!(o.top_k(&c, 5).unwrap().len(), 2);
        assert!(o.top_k(&c, 0).is_err());
    }

    #[test]
    fn tsp_top_k_limit() {
        let o = Oracle::new(ProblemInstance::tsp(11).unwrap());
        assert!(matches!(
            o.top_k(&CostVector::zeros(55), 2),
            Err(Error::TooManyNodes { .. })
        ));
    }

    #[test]
    fn robust_examples() {
        let o = grid2();
        let c: CostVector = vec![1.0, 5.0, 1.0, 1.0].into();
        let u = UncertaintyParams::new(0.5, 1.0).unwrap();
        let a = Decision::from_bits(&[1, 0, 0, 1]);
        let b = Decision::from_bits(&[0, 1, 1, 0]);
        assert_eq!(o.worst_case_cost(&c, &a, &u).unwrap(), 3.0);
        assert_eq!(o.worst_case_cost(&c, &b, &u).unwrap(), 9.0);
        assert_eq!(o.robust_solve(&c, &u).unwrap(), a);

        let none = UncertaintyParams::new(0.0, 3.0).unwrap();
        assert_eq!(o.worst_case_cost(&c, &b, &none).unwrap(), 6.0);
        let before = o.solve_count();
        assert_eq!(o.robust_solve(&c, &none).unwrap(), o.solve(&c).unwrap());
        // one threshold (θ = 0) plus the explicit solve
        assert_eq!(o.solve_count() - before, 2);
    }

    #[test]
    fn robust_audit_matches_thresholds() {
        let o = grid2();
        let c: CostVector = vec![1.0, 5.0, 1.0, 1.0].into();
        let u = UncertaintyParams::new(0.5, 1.0).unwrap();
        // distinct thresholds {0, 0.5, 2.5}
        assert_eq!(o.robust_solve_cost(&c, &u), 3);
        o.robust_solve(&c, &u).unwrap();
        assert_eq!(o.solve_count(), 3);
    }

    #[test]
    fn feasibility() {
        let o = grid2();
        assert!(o.is_feasible(&Decision::from_bits(&[1, 0, 0, 1])));
        assert!(!o.is_feasible(&Decision::from_bits(&[1, 0, 0, 0])));
        assert!(!o.is_feasible(&Decision::from_bits(&[1, 1, 1, 1])));
        assert!(!o.is_feasible(&Decision::from_bits(&[1, 0, 0])));
        let t = Oracle::new(ProblemInstance::tsp(4).unwrap());
        // 0-1 and 2-3 used twice is not encodable; two 2-cycles degenerate to
        // a perfect matching, which fails the degree check.
        assert!(!t.is_feasible(&Decision::from_bits(&[1, 0, 0, 0, 0, 1])));
        assert!(t.is_feasible(&Decision::from_bits(&[1, 0, 1, 1, 0, 1])));
        let s = Oracle::new(ProblemInstance::select(3).unwrap());
        assert!(s.is_feasible(&Decision::from_bits(&[0, 1, 0])));
        assert!(!s.is_feasible(&Decision::from_bits(&[1, 1, 0])));
    }

    #[test]
    fn clone_resets_audit() {
        let o = grid2();
        o.solve(&vec![1.0; 4].into()).unwrap();
        assert_eq!(o.clone().solve_count(), 0);
    }
}
