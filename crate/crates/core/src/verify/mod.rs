//! Property suites over bounded domains.

pub mod engine;
pub mod geometry;
pub mod invariants;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::engine::{Monomial, State};
use crate::linalg::{rank, Matrix};
use crate::report::Report;

/// Whether two families of states span the same subspace.
pub fn same_span(a: &[State], b: &[State]) -> bool {
    let mut index: BTreeMap<&Monomial, usize> = BTreeMap::new();
    for m in a.iter().chain(b).flat_map(|s| s.monomials()) {
        let n = index.len();
        index.entry(m).or_insert(n);
    }
    let matrix = |states: &[&State]| {
        let mut mat = Matrix::zeros(states.len(), index.len());
        for (row, s) in states.iter().enumerate() {
            for (m, c) in s.iter() {
                mat.set(row, index[m], c.clone());
            }
        }
        mat
    };
    let ra = rank(&matrix(&a.iter().collect::<Vec<_>>()));
    let rb = rank(&matrix(&b.iter().collect::<Vec<_>>()));
    let both: Vec<&State> = a.iter().chain(b).collect();
    ra == rb && rank(&matrix(&both)) == ra
}

/// A named group of property checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Engine,
    Sl2,
    Geometry,
    All,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown suite `{0}` (expected engine, sl2, geometry or all)")]
pub struct UnknownSuite(pub String);

impl FromStr for Suite {
    type Err = UnknownSuite;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "engine" => Ok(Suite::Engine),
            "sl2" => Ok(Suite::Sl2),
            "geometry" => Ok(Suite::Geometry),
            "all" => Ok(Suite::All),
            other => Err(UnknownSuite(other.to_string())),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Engine => "engine",
            Suite::Sl2 => "sl2",
            Suite::Geometry => "geometry",
            Suite::All => "all",
        })
    }
}

/// Every geometry check at its default size.
pub fn geometry_reports() -> Vec<Report> {
    use geometry::*;
    vec![
        verify_constants(),
        verify_emptiness(5),
        verify_curvature(4),
        verify_recursion(3),
        verify_case3(3, 4),
        verify_f_grading(3),
        verify_f1_commutes(3),
        verify_f2_conjugation(3),
        verify_fiber_conventions(3),
    ]
}

/// Runs a suite; the engine commutator sweep stops at `deadline` if given.
pub fn run_suite(suite: Suite, deadline: Option<Instant>) -> Vec<Report> {
    let bounds = engine::EngineBounds::default();
    match suite {
        Suite::Engine => vec![
            engine::verify_vacuum(&bounds),
            engine::verify_translation(&bounds),
            engine::verify_grading(&bounds),
            engine::verify_commutator(&bounds, deadline),
        ],
        Suite::Sl2 => invariants::sl2_reports(),
        Suite::Geometry => geometry_reports(),
        Suite::All => [Suite::Engine, Suite::Sl2, Suite::Geometry]
            .into_iter()
            .flat_map(|s| run_suite(s, deadline))
            .collect(),
    }
}
