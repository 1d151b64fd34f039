//! Nested finite networks standing in for an infinite one, each with a free
//! and a wired boundary.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::Real;

use super::{binary_tree, lattice2d, path, EnergySpace, Network};

/// Label of the vertex that replaces the boundary in wired mode.
pub const WIRED_VERTEX: &str = "~wired";

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilyKind<T = f64> {
    /// Level `n`: vertices `0..=n`, boundary `{n}`.
    Path,
    /// Level `n`: the `n × n` corner grid, boundary the last row and column.
    Lattice2d,
    /// Level `d`: the depth-`d` tree, boundary its leaves.
    BinaryTree { ratio: T },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryMode {
    Free,
    Wired,
}

#[derive(Clone, Debug)]
pub struct ExhaustionLevel<T = f64> {
    pub size: usize,
    pub free: Network<T>,
    pub wired: Network<T>,
    pub boundary: Vec<String>,
}

impl<T: Real> ExhaustionLevel<T> {
    pub fn network(&self, mode: BoundaryMode) -> &Network<T> {
        match mode {
            BoundaryMode::Free => &self.free,
            BoundaryMode::Wired => &self.wired,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExhaustionFamily<T = f64> {
    pub kind: FamilyKind<T>,
    pub levels: Vec<ExhaustionLevel<T>>,
}

impl<T: Real> ExhaustionFamily<T> {
    /// One level per size; sizes must increase strictly.
    pub fn new(kind: FamilyKind<T>, sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "exhaustion sizes must be nonempty and strictly increasing".into(),
            ));
        }
        let levels = sizes.iter().map(|&s| level(kind, s)).collect::<Result<_>>()?;
        Ok(Self { kind, levels })
    }
}

fn level<T: Real>(kind: FamilyKind<T>, size: usize) -> Result<ExhaustionLevel<T>> {
    let (free, boundary) = match kind {
        FamilyKind::Path => {
            if size < 1 {
                return Err(Error::InvalidInput("path level needs at least one edge".into()));
            }
            (path(size + 1)?, vec![size.to_string()])
        }
        FamilyKind::Lattice2d => {
            if size < 2 {
                return Err(Error::InvalidInput("lattice level needs side at least 2".into()));
            }
            let last = size - 1;
            let boundary = (0..size)
                .flat_map(|i| (0..size).map(move |j| (i, j)))
                .filter(|&(i, j)| i == last || j == last)
                .map(|(i, j)| format!("{i}.{j}"))
                .collect();
            (lattice2d(size)?, boundary)
        }
        FamilyKind::BinaryTree { ratio } => {
            if size < 1 {
                return Err(Error::InvalidInput("tree level needs depth at least 1".into()));
            }
            (
                (binary_tree(size, ratio))?,
                ((1usize << size)..(1usize << (size + 1)))
                    .map(|k| k.to_string())
                    .collect(),
            )
        }
    };
    let wired = wire(&free, &boundary)?;
    Ok(ExhaustionLevel {
        size,
        free,
        wired,
        boundary,
    })
}

/// Merges `boundary` into one vertex, summing parallel conductances and
/// dropping edges inside the boundary.
pub fn wire<T: Real>(n: &Network<T>, boundary: &[String]) -> Result<Network<T>> {
    let bset: HashSet<&str> = boundary.iter().map(String::as_str).collect();
    let rename = |v: &str| {
        if bset.contains(v) {
            WIRED_VERTEX.to_string()
        } else {
            v.to_string()
        }
    };
    let mut order: Vec<(String, String)> = Vec::new();
    let mut total: HashMap<(String, String), T> = HashMap::new();
    for (u, v, c) in n.labelled_edges() {
        let (a, b) = (rename(u), rename(v));
        if a == b {
            continue;
        }
        let key = if a < b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        match total.get_mut(&key) {
            Some(acc) => *acc += c,
            None => {
                total.insert(key.clone(), c);
                order.push((a, b));
            }
        }
    }
    let edges = order
        .into_iter()
        .map(|(a, b)| {
            let key = if a < b {
                (a.clone(), b.clone())
            } else {
                (b.clone(), a.clone())
            };
            let c = total[&key];
            (a, b, c)
        })
        .collect();
    Network::new(format!("{}-wired", n.name()), &rename(n.base_label()), edges)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelGap<T = f64> {
    pub size: usize,
    pub r_free: T,
    pub r_wired: T,
    /// `R_free − R_wired`, nonnegative by Rayleigh monotonicity.
    pub gap: T,
    pub max_conductance: T,
}

/// Free and wired effective resistance between `x` and `y` at each level.
pub fn exhaustion_harmonics<T: Real>(fam: &ExhaustionFamily<T>, x: &str, y: &str) -> Result<Vec<LevelGap<T>>> {
    fam.levels
        .iter()
        .enumerate()
        .map(|(i, lvl)| {
            for v in [x, y] {
                if !lvl.free.contains(v) || !lvl.wired.contains(v) {
                    return Err(Error::VertexMissing {
                        vertex: v.to_string(),
                        level: i,
                    });
                }
            }
            let resistance = |n: &Network<T>| -> Result<T> {
                let es = EnergySpace::new(n.clone())?;
                es.effective_resistance(n.index_of(x)?, n.index_of(y)?)
            };
            let r_free = resistance(&lvl.free)?;
            let r_wired = resistance(&lvl.wired)?;
            let max_conductance = (0..lvl.free.vertex_count())
                .map(|v| lvl.free.total_conductance(v))
                .fold(T::zero(), T::max);
            Ok(LevelGap {
                size: lvl.size,
                r_free,
                r_wired,
                gap: r_free - r_wired,
                max_conductance,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_gap_vanishes() {
        let fam = ExhaustionFamily::<f64>::new(FamilyKind::Path, &[8, 16, 32]).unwrap();
        for g in exhaustion_harmonics(&fam, "0", "1").unwrap() {
            assert_eq!(g.gap, 0.0);
            assert!((g.r_free - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tree_gap_is_positive() {
        let fam = ExhaustionFamily::new(FamilyKind::BinaryTree { ratio: 1.0 }, &[2, 3, 4]).unwrap();
        let gaps = exhaustion_harmonics(&fam, "1", "2").unwrap();
        assert!(gaps.iter().all(|g| g.gap > 0.1));
        assert!(gaps.windows(2).all(|w| w[1].gap <= w[0].gap));
    }

    #[test]
    fn wiring_a_two_leaf_tree() {
        // root with two unit edges into one merged vertex: R = 1/2
        let fam = ExhaustionFamily::new(FamilyKind::BinaryTree { ratio: 1.0 }, &[1]).unwrap();
        assert_eq!(fam.levels[0].wired.vertex_count(), 2);
        assert_eq!(fam.levels[0].wired.edges()[0].2, 2.0);
    }

    #[test]
    fn boundary_vertex_is_missing() {
        let fam = ExhaustionFamily::<f64>::new(FamilyKind::Path, &[1, 2]).unwrap();
        let err = exhaustion_harmonics(&fam, "0", "1").unwrap_err();
        assert_eq!(
            err,
            Error::VertexMissing {
                vertex: "1".into(),
                level: 0
            }
        );
    }
}
