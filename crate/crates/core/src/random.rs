//! Seeded generators for the randomized suites. Every instance is a pure
//! function of the generator state, so a fixed seed reproduces a run.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::duality::{DiscreteMeasureSpace, PartialOperator};
use crate::error::Result;
use crate::hilbert::{CommonDomain, OperatorBetween, WeightedSpace};
use crate::linalg::DenseMatrix;
use crate::network::Network;
use crate::Real;

pub type SuiteRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[-1, 1)`.
pub fn matrix<T: Real, R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix<T> {
    DenseMatrix::from_fn(rows, cols, |_, _| T::lit(rng.gen_range(-1.0..1.0)))
}

pub fn vector<T: Real, R: Rng>(rng: &mut R, n: usize) -> Vec<T> {
    (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect()
}

/// `BᵀB + I` for a random square `B`.
pub fn spd<T: Real, R: Rng>(rng: &mut R, n: usize) -> DenseMatrix<T> {
    let b = matrix::<T, R>(rng, n, n);
    &b.transpose().matmul(&b) + &DenseMatrix::identity(n)
}

pub fn space<T: Real, R: Rng>(rng: &mut R, n: usize, label: &str) -> WeightedSpace<T> {
    WeightedSpace::new(spd(rng, n), label).expect("BᵀB + I is SPD")
}

/// `T: H₁ → H₂` with random SPD Grams and dimensions in `1..=max_dim`.
pub fn operator<T: Real, R: Rng>(rng: &mut R, max_dim: usize) -> OperatorBetween<T> {
    let n1 = rng.gen_range(1..=max_dim);
    let n2 = rng.gen_range(1..=max_dim);
    operator_of_shape(rng, n1, n2)
}

pub fn operator_of_shape<T: Real, R: Rng>(rng: &mut R, n1: usize, n2: usize) -> OperatorBetween<T> {
    let h1 = space(rng, n1, "H1");
    let h2 = space(rng, n2, "H2");
    let m = matrix(rng, n2, n1);
    OperatorBetween::new(m, h1, h2).expect("shapes agree")
}

/// `𝒟` = all of the ambient coordinates, mapped invertibly into `H₁` and
/// arbitrarily into `H₂`.
pub fn common_domain<T: Real, R: Rng>(rng: &mut R, max_dim: usize) -> CommonDomain<T> {
    let n = rng.gen_range(1..=max_dim);
    let n2 = rng.gen_range(1..=max_dim);
    let ambient = WeightedSpace::euclidean(n, "coordinates");
    let e1 = OperatorBetween::new(spd(rng, n), ambient.clone(), space(rng, n, "H1")).expect("square");
    let e2 = OperatorBetween::new(matrix(rng, n2, n), ambient, space(rng, n2, "H2")).expect("shapes agree");
    CommonDomain::new(DenseMatrix::identity(n), e1, e2).expect("embeddings act on the ambient space")
}

/// Two measures on `n` points; each weight is zero with probability `0.3`,
/// otherwise uniform in `[0.5, 3)`. Neither measure is zero.
pub fn measure_pair<T: Real, R: Rng>(rng: &mut R, n: usize) -> (DiscreteMeasureSpace<T>, DiscreteMeasureSpace<T>) {
    let draw = |rng: &mut R| -> Vec<T> {
        let mut w: Vec<T> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    T::zero()
                } else {
                    T::lit(rng.gen_range(0.5..3.0))
                }
            })
            .collect();
        if w.iter().all(|&x| x == T::zero()) {
            w[rng.gen_range(0..n)] = T::one();
        }
        w
    };
    let w1 = draw(rng);
    let w2 = draw(rng);
    (
        DiscreteMeasureSpace::from_weights(w1).expect("weights are nonnegative"),
        DiscreteMeasureSpace::from_weights(w2).expect("weights are nonnegative"),
    )
}

/// `A ≥ 1`, selfadjoint for a random Gram, restricted to a random subspace
/// of dimension `domain_dim ≤ n`.
pub fn semibounded<T: Real, R: Rng>(rng: &mut R, n: usize, domain_dim: usize) -> Result<PartialOperator<T>> {
    let h = space::<T, R>(rng, n, "H");
    // ⟨φ, Aφ⟩ = φᵀ(S + G)φ with S ⪰ 0.
    let b = matrix::<T, R>(rng, n, n);
    let s = &b.transpose().matmul(&b) + h.gram();
    let a = OperatorBetween::new(h.gram_solve(&s), h.clone(), h)?;
    if domain_dim == n {
        return PartialOperator::full(&a);
    }
    let mut basis = matrix::<T, R>(rng, n, domain_dim);
    for j in 0..domain_dim {
        basis[(j, j)] += T::lit(2.0);
    }
    PartialOperator::restrict(&a, basis)
}

fn conductance<T: Real, R: Rng>(rng: &mut R) -> T {
    T::lit(rng.gen_range(0.5..2.0))
}

/// Random tree on `n ≥ 2` vertices labelled `0..n`, base `0`; vertex `k`
/// attaches to a uniformly chosen earlier vertex.
pub fn tree<T: Real, R: Rng>(rng: &mut R, n: usize) -> Result<Network<T>> {
    let edges = (1..n)
        .map(|k| (rng.gen_range(0..k).to_string(), k.to_string(), conductance(rng)))
        .collect();
    Network::new(format!("tree{n}"), "0", edges)
}

/// A random spanning tree plus up to `extra` further edges, conductances
/// in `[0.5, 2)`.
pub fn network<T: Real, R: Rng>(rng: &mut R, n: usize, extra: usize) -> Result<Network<T>> {
    let mut edges: Vec<(String, String, T)> = (1..n)
        .map(|k| (rng.gen_range(0..k).to_string(), k.to_string(), conductance(rng)))
        .collect();
    let mut present: std::collections::HashSet<(usize, usize)> = edges
        .iter()
        .map(|(u, v, _)| {
            let (a, b): (usize, usize) = (u.parse().expect("numeric"), v.parse().expect("numeric"));
            (a.min(b), a.max(b))
        })
        .collect();
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|p| !present.contains(p))
        .collect();
    candidates.shuffle(rng);
    for (i, j) in candidates.into_iter().take(extra) {
        present.insert((i, j));
        edges.push((i.to_string(), j.to_string(), conductance(rng)));
    }
    Network::new(format!("random{n}"), "0", edges)
}

/// A finitely supported vertex function, not identically zero.
pub fn vertex_function<T: Real, R: Rng>(rng: &mut R, n: usize) -> Vec<T> {
    let mut f = vec![T::zero(); n];
    let support = rng.gen_range(1..=n);
    for _ in 0..support {
        f[rng.gen_range(0..n)] = T::lit(rng.gen_range(-1.0..1.0));
    }
    if f.iter().all(|&x| x == T::zero()) {
        f[0] = T::one();
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instances() {
        let (mut a, mut b) = (seeded(7), seeded(7));
        assert_eq!(matrix::<f64, _>(&mut a, 3, 4), matrix::<f64, _>(&mut b, 3, 4));
        assert_eq!(
            network::<f64, _>(&mut a, 12, 5).unwrap(),
            network::<f64, _>(&mut b, 12, 5).unwrap()
        );
    }

    #[test]
    fn network_has_requested_edges() {
        let mut rng = seeded(3);
        let n = network::<f64, _>(&mut rng, 10, 4).unwrap();
        assert_eq!(n.edges().len(), 13);
        assert!(n.edges().iter().all(|&(_, _, c)| (0.5..2.0).contains(&c)));
    }

    #[test]
    fn semibounded_restriction_has_proper_domain() {
        let mut rng = seeded(5);
        let a = semibounded::<f64, _>(&mut rng, 4, 2).unwrap();
        assert_eq!(a.domain_dim(), 2);
        assert!(a.form().is_ok());
    }
}
