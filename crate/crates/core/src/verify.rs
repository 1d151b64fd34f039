//! Verification suites. Each suite returns one [`Report`] row per identity,
//! aggregating the worst residual over its random instances.

use std::collections::BTreeMap;

use rand::Rng;

use crate::charproj::{char_projection, char_projection_of_adjoint, schur_complements, stone_identities};
use crate::duality::{
    discrete_common_domain, duality_operator, form_correspondence, friedrichs_extension,
    friedrichs_reproduction_residual, kernel_complement_residual, krein_membership, quadratic_form_residual,
    radon_nikodym, spectral_measure,
};
use crate::error::{Error, Result};
use crate::hilbert::{dual_domain, OperatorBetween, WeightedSpace};
use crate::linalg::DenseMatrix;
use crate::network::{
    big_l_selfadjointness_probe, delta_identity_check, energy_inner, exhaustion_harmonics, kl_pair, laplacian_apply,
    network_duality, path, reproducing_residual, selfadjoint_products, sqrt2_bound_check, EnergySpace,
    ExhaustionFamily, LevelGap, Network,
};
use crate::random::{self, SuiteRng};
use crate::report::Report;
use crate::sympair::{
    build_l, defect_space, deficiency_isomorphisms, extension_action, interval_defect_model, interval_sweep,
    q_condition_check, DomainElement, SymmetricPair,
};

/// Named tolerances with their defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    values: BTreeMap<&'static str, f64>,
}

const DEFAULTS: &[(&str, f64)] = &[
    ("projection", 1e-10),
    ("stone", 1e-10),
    ("schur", 1e-9),
    ("scalar_anchor", 1e-14),
    ("quadratic_form", 1e-10),
    ("kernel_complement", 1e-9),
    ("radon_nikodym", 1e-12),
    ("moment", 1e-9),
    ("atoms", 1e-12),
    ("friedrichs", 1e-9),
    ("contraction", 1e-10),
    ("dipole_anchor", 1e-12),
    ("summation_by_parts", 1e-12),
    ("reproducing", 1e-9),
    ("delta_identity", 1e-9),
    ("sqrt2", 1e-9),
    ("dipole_pairing", 1e-12),
    ("dipole_gram", 1e-10),
    ("pair", 1e-10),
    ("laplacian", 1e-10),
    ("lstar_l", 1e-9),
    ("symmetry", 1e-10),
    ("interval_gram", 1e-6),
    ("q_condition", 1e-9),
    ("boundary_form", 1e-9),
    ("gap", 1e-9),
    ("rayleigh", 1e-12),
];

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            values: DEFAULTS.iter().copied().collect(),
        }
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.values[name]
    }

    /// Overrides one tolerance; unknown names and negative or non-finite
    /// values are rejected.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = self
            .values
            .get_mut(name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown tolerance `{name}`")))?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerance `{name}` must be finite and nonnegative"
            )));
        }
        *slot = value;
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.values.keys().copied()
    }
}

/// Worst residual over a run, or the first error.
struct Worst {
    value: f64,
    error: Option<Error>,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: 0.0,
            error: None,
        }
    }

    fn take(&mut self, r: Result<f64>) {
        match r {
            Ok(v) if v.is_nan() => self.value = f64::NAN,
            Ok(v) => self.value = self.value.max(v),
            Err(e) => {
                self.error.get_or_insert(e);
            }
        }
    }

    fn report(self, identity: &str, anchor: &str, tol: f64) -> Report {
        match self.error {
            Some(e) => Report::error(identity, &e),
            None => Report::new(identity, anchor, self.value, tol),
        }
    }
}

fn max_abs_diff(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    (a - b).max_abs()
}

/// Every identity for one operator `T`.
pub fn charproj_reports(t: &OperatorBetween<f64>, tol: &Tolerances) -> Vec<Report> {
    let mut out = Vec::new();
    let e = match char_projection(t) {
        Ok(e) => e,
        Err(err) => return vec![Report::error("characteristic projection", &err)],
    };
    out.push(Report::new(
        "E idempotent",
        "E² = E",
        e.idempotence_residual(),
        tol.get("projection"),
    ));
    out.push(Report::new(
        "E selfadjoint",
        "E = E*",
        e.selfadjoint_residual(),
        tol.get("projection"),
    ));
    match stone_identities(t, &e) {
        Ok(rows) => out.extend(
            rows.into_iter()
                .map(|r| Report::new(r.name, r.formula, r.residual, tol.get("stone"))),
        ),
        Err(err) => out.push(Report::error("Stone identities", &err)),
    }
    match schur_complements(&e, false) {
        Ok(s) => {
            let (over11, over22) = s.norms(&e);
            out.push(Report::new(
                "Schur complement E/E11",
                "E22 − E21 E11⁻¹ E12 = 0",
                over11,
                tol.get("schur"),
            ));
            out.push(Report::new(
                "Schur complement E/E22",
                "E11 − E12 E22⁺ E21 = 0",
                over22,
                tol.get("schur"),
            ));
        }
        Err(err) => out.push(Report::error("Schur complements", &err)),
    }
    match char_projection(&t.adjoint()) {
        Ok(direct) => out.push(Report::new(
            "projection of the adjoint",
            "E_{T*} = [[I − E22, E21], [E12, I − E11]]",
            char_projection_of_adjoint(&e).distance(&direct),
            tol.get("projection"),
        )),
        Err(err) => out.push(Report::error("projection of the adjoint", &err)),
    }
    out
}

/// `T = 2` on one dimension: `E = (1/5)[[1, 2], [2, 4]]`, plus the full
/// identity list for that operator.
pub fn scalar_anchor(tol: &Tolerances) -> Vec<Report> {
    let h = WeightedSpace::euclidean(1, "R");
    let t = OperatorBetween::new(DenseMatrix::from_diag(&[2.0]), h.clone(), h).expect("1x1");
    let expected = DenseMatrix::from_rows(&[&[0.2, 0.4], &[0.4, 0.8]]);
    let anchor = match char_projection(&t) {
        Ok(e) => Report::new(
            "scalar anchor T = 2",
            "E = (1/5)[[1, 2], [2, 4]]",
            max_abs_diff(&e.full(), &expected),
            tol.get("scalar_anchor"),
        ),
        Err(err) => Report::error("scalar anchor T = 2", &err),
    };
    let mut out = vec![anchor];
    out.extend(charproj_reports(&t, tol).into_iter().map(|mut r| {
        r.identity = format!("T = 2: {}", r.identity);
        r
    }));
    out
}

/// Random `T` with `dim H₁ ≤ dim H₂ ≤ max_dim`, so that `T` is injective and
/// both Schur complements vanish.
pub fn charproj_suite(rng: &mut SuiteRng, count: usize, max_dim: usize, tol: &Tolerances) -> Vec<Report> {
    let (mut idem, mut sa, mut stone, mut s11, mut s22, mut adj) = (
        Worst::new(),
        Worst::new(),
        Worst::new(),
        Worst::new(),
        Worst::new(),
        Worst::new(),
    );
    for _ in 0..count {
        let n2 = rng.gen_range(1..=max_dim);
        let n1 = rng.gen_range(1..=n2);
        let t = random::operator_of_shape::<f64, _>(rng, n1, n2);
        let e = match char_projection(&t) {
            Ok(e) => e,
            Err(err) => {
                idem.take(Err(err));
                continue;
            }
        };
        idem.take(Ok(e.idempotence_residual()));
        sa.take(Ok(e.selfadjoint_residual()));
        stone.take(stone_identities(&t, &e).map(|rows| rows.iter().map(|r| r.residual).fold(0.0, f64::max)));
        match schur_complements(&e, false) {
            Ok(s) => {
                let (a, b) = s.norms(&e);
                s11.take(Ok(a));
                s22.take(Ok(b));
            }
            Err(err) => s11.take(Err(err)),
        }
        adj.take(char_projection(&t.adjoint()).map(|d| char_projection_of_adjoint(&e).distance(&d)));
    }
    let tag = |s: &str| format!("{s} ({count} random T)");
    vec![
        idem.report(&tag("E idempotent"), "E² = E", tol.get("projection")),
        sa.report(&tag("E selfadjoint"), "E = E*", tol.get("projection")),
        stone.report(
            &tag("Stone identities"),
            "T E11 = E21, T*(I − E22) = E12, … (11 relations)",
            tol.get("stone"),
        ),
        s11.report(
            &tag("Schur complement E/E11"),
            "E22 − E21 E11⁻¹ E12 = 0",
            tol.get("schur"),
        ),
        s22.report(
            &tag("Schur complement E/E22"),
            "E11 − E12 E22⁺ E21 = 0",
            tol.get("schur"),
        ),
        adj.report(
            &tag("projection of the adjoint"),
            "E_{T*} = [[I − E22, E21], [E12, I − E11]]",
            tol.get("projection"),
        ),
    ]
}

/// `⟨φ, Δφ⟩₁ = ‖φ‖₂²` on random common domains, and `ker J* = H₂ ⊖ 𝒟`.
pub fn duality_suite(rng: &mut SuiteRng, count: usize, max_dim: usize, tol: &Tolerances) -> Vec<Report> {
    let (mut qf, mut kc) = (Worst::new(), Worst::new());
    for _ in 0..count {
        let cd = random::common_domain::<f64, _>(rng, max_dim);
        match duality_operator(&cd) {
            Ok(delta) => {
                for _ in 0..3 {
                    let c = random::vector(rng, cd.ambient_dim());
                    qf.take(Ok(quadratic_form_residual(&cd, &delta, &c)));
                }
            }
            Err(e) => qf.take(Err(e)),
        }
        kc.take(kernel_complement_residual(&cd));
    }
    vec![
        qf.report(
            &format!("duality operator ({count} random domains)"),
            "⟨φ, Δφ⟩₁ = ‖φ‖₂²  (error / ‖Δ‖‖φ‖₁²)",
            tol.get("quadratic_form"),
        ),
        kc.report(
            &format!("kernel of J* ({count} random domains)"),
            "ker J* = H₂ ⊖ 𝒟",
            tol.get("kernel_complement"),
        ),
    ]
}

/// Discrete measures: `𝒟*` dense iff `supp μ₂ ⊆ supp μ₁`, and then
/// `Δ = dμ₂/dμ₁`.
pub fn radon_nikodym_suite(rng: &mut SuiteRng, count: usize, points: usize, tol: &Tolerances) -> Vec<Report> {
    let mut mismatches = 0;
    let mut rn = Worst::new();
    for _ in 0..count {
        let (mu1, mu2) = random::measure_pair::<f64, _>(rng, points);
        let contained = radon_nikodym(&mu1, &mu2);
        let cd = match discrete_common_domain(&mu1, &mu2) {
            Ok(cd) => cd,
            Err(e) => {
                rn.take(Err(e));
                continue;
            }
        };
        let dense = match dual_domain(&cd) {
            Ok(d) => d.cols() == cd.h2().dim(),
            Err(e) => {
                rn.take(Err(e));
                continue;
            }
        };
        let delta = duality_operator(&cd);
        if dense != contained.is_some() || delta.is_ok() != contained.is_some() {
            mismatches += 1;
        }
        if let (Some(density), Ok(delta)) = (contained, delta) {
            let expected = DenseMatrix::from_diag(&density);
            let scale = expected.max_abs().max(1.0);
            rn.take(Ok(max_abs_diff(delta.matrix(), &expected) / scale));
        }
    }
    vec![
        Report::count(
            format!("Radon-Nikodym dichotomy ({count} measure pairs)"),
            "𝒟* dense ⟺ supp μ₂ ⊆ supp μ₁",
            mismatches,
        ),
        rn.report(
            &format!("Radon-Nikodym derivative ({count} measure pairs)"),
            "Δ = dμ₂/dμ₁",
            tol.get("radon_nikodym"),
        ),
    ]
}

/// Zeroth and first moments of `μ_φ`, and the two-vertex path anchor.
pub fn moment_suite(rng: &mut SuiteRng, count: usize, max_dim: usize, tol: &Tolerances) -> Vec<Report> {
    let (mut mass, mut first) = (Worst::new(), Worst::new());
    let rel = |a: f64, b: f64| {
        if b == 0.0 {
            a.abs()
        } else {
            (a - b).abs() / b.abs()
        }
    };
    for _ in 0..count {
        let cd = random::common_domain::<f64, _>(rng, max_dim);
        let (delta, j) = match (duality_operator(&cd), cd.inclusion()) {
            (Ok(d), Ok(j)) => (d, j),
            (Err(e), _) | (_, Err(e)) => {
                mass.take(Err(e));
                continue;
            }
        };
        let phi = random::vector(rng, cd.h1().dim());
        match spectral_measure(&delta, &phi) {
            Ok(mu) => {
                let n1 = cd.h1().inner(&phi, &phi);
                let jphi = j.apply(&phi);
                let n2 = cd.h2().inner(&jphi, &jphi);
                mass.take(Ok(rel(mu.total_mass(), n1)));
                // normwise: ‖φ‖₂² ≤ ‖Δ‖‖φ‖₁², and ‖φ‖₂² alone can sit at rounding level
                let scale = delta.norm().unwrap_or(0.0) * n1;
                first.take(Ok(if scale > 0.0 {
                    (mu.moment(1) - n2).abs() / scale
                } else {
                    rel(mu.moment(1), n2)
                }));
            }
            Err(e) => mass.take(Err(e)),
        }
    }
    let p2 = WeightedSpace::euclidean(2, "l2");
    let lap = OperatorBetween::new(DenseMatrix::from_rows(&[&[1.0, -1.0], &[-1.0, 1.0]]), p2.clone(), p2).expect("2x2");
    let anchor = match spectral_measure(&lap, &[1.0, 0.0]) {
        Ok(mu) if mu.atoms.len() == 2 => {
            let want: [(f64, f64); 2] = [(0.0, 0.5), (2.0, 0.5)];
            let diff = mu
                .atoms
                .iter()
                .zip(want)
                .map(|(&(l, m), (wl, wm))| (l - wl).abs().max((m - wm).abs()))
                .fold(0.0, f64::max);
            Report::new(
                "spectral measure on the two-vertex path",
                "μ_{δ₀} = ½δ_0 + ½δ_2",
                diff,
                tol.get("atoms"),
            )
        }
        Ok(_) => Report::new(
            "spectral measure on the two-vertex path",
            "μ_{δ₀} = ½δ_0 + ½δ_2",
            f64::INFINITY,
            tol.get("atoms"),
        ),
        Err(e) => Report::error("spectral measure on the two-vertex path", &e),
    };
    vec![
        mass.report(
            &format!("spectral mass ({count} random domains)"),
            "μ_φ([0,∞)) = ‖φ‖₁²",
            tol.get("moment"),
        ),
        first.report(
            &format!("spectral first moment ({count} random domains)"),
            "∫λ dμ_φ = ‖φ‖₂²  (error / ‖Δ‖‖φ‖₁²)",
            tol.get("moment"),
        ),
        anchor,
    ]
}

/// Friedrichs extension on random semibounded operators with proper
/// domains, Krein membership of `JJ*`, and the form round trip.
pub fn friedrichs_suite(rng: &mut SuiteRng, count: usize, tol: &Tolerances) -> Vec<Report> {
    let (mut repro, mut contraction, mut round_trip) = (Worst::new(), Worst::new(), Worst::new());
    let mut non_members = 0;
    for _ in 0..count {
        let n = rng.gen_range(2..=6);
        let k = rng.gen_range(1..=n);
        let mut run = || -> Result<(f64, f64, bool)> {
            let a = random::semibounded::<f64, _>(rng, n, k)?;
            let ext = friedrichs_extension(&a.form()?)?;
            let member = krein_membership(&a, &ext.jj_star)?.member;
            Ok((
                friedrichs_reproduction_residual(&a, &ext),
                (ext.jj_star_norm - 1.0).max(0.0),
                member,
            ))
        };
        match run() {
            Ok((r, c, member)) => {
                repro.take(Ok(r));
                contraction.take(Ok(c));
                non_members += usize::from(!member);
            }
            Err(e) => repro.take(Err(e)),
        }
        let full = random::semibounded::<f64, _>(rng, n, n).and_then(|a| {
            let op = OperatorBetween::new(a.images().clone(), a.space().clone(), a.space().clone())?;
            form_correspondence(&op).map(|(_, r)| r)
        });
        round_trip.take(full);
    }
    vec![
        repro.report(
            &format!("Friedrichs extension ({count} random A)"),
            "(JJ*)⁻¹ ⊇ A",
            tol.get("friedrichs"),
        ),
        contraction.report(
            &format!("JJ* contractive ({count} random A)"),
            "‖JJ*‖ ≤ 1",
            tol.get("contraction"),
        ),
        Report::count(
            format!("Krein set membership ({count} random A)"),
            "JJ* ∈ 𝓑_A",
            non_members,
        ),
        round_trip.report(
            &format!("form correspondence ({count} random A)"),
            "A → q → (JJ*)⁻¹ = A",
            tol.get("friedrichs"),
        ),
    ]
}

/// Identities on one network.
pub fn network_suite(n: &Network<f64>, rng: &mut SuiteRng, trials: usize, tol: &Tolerances) -> Vec<Report> {
    let mut out = Vec::new();
    let nv = n.vertex_count();
    let es = match EnergySpace::new(n.clone()) {
        Ok(es) => es,
        Err(e) => return vec![Report::error("energy space", &e)],
    };
    let o = n.base();
    let others: Vec<usize> = (0..nv).filter(|&x| x != o).collect();

    let mut sbp = Worst::new();
    for _ in 0..3 {
        let (u, v) = (random::vector::<f64, _>(rng, nv), random::vector::<f64, _>(rng, nv));
        let lhs = energy_inner(n, &u, &v);
        let rhs: f64 = u.iter().zip(laplacian_apply(n, &v)).map(|(a, b)| a * b).sum();
        sbp.take(Ok((lhs - rhs).abs() / rhs.abs().max(1.0)));
    }
    out.push(sbp.report(
        "summation by parts",
        "⟨u, v⟩_E = ⟨u, Δv⟩_{l²}",
        tol.get("summation_by_parts"),
    ));

    let mut repro = Worst::new();
    for &x in &others {
        let f = random::vector::<f64, _>(rng, nv);
        repro.take(reproducing_residual(&es, x, &f));
    }
    out.push(repro.report(
        "dipole reproducing property",
        "f(x) − f(o) = ⟨v_x, f⟩_E",
        tol.get("reproducing"),
    ));

    let mut del = Worst::new();
    for x in 0..nv {
        del.take(delta_identity_check(&es, x));
    }
    out.push(del.report(
        "delta identity",
        "δ_x = c(x)v_x − Σ_{y∼x} c_xy v_y",
        tol.get("delta_identity"),
    ));

    let (mut bound, mut attained) = (Worst::new(), Worst::new());
    let root2 = 2f64.sqrt();
    for &x in &others {
        match sqrt2_bound_check(&es, x, trials, rng) {
            Ok(r) => {
                bound.take(Ok((r.max_ratio - root2).max(0.0)));
                attained.take(Ok((r.extremal_ratio - root2).abs()));
            }
            Err(e) => bound.take(Err(e)),
        }
    }
    out.push(bound.report(
        &format!("√2 bound ({trials} trials per vertex)"),
        "|⟨φ, v_x⟩_E| ≤ √2 ‖φ‖_{l²}",
        tol.get("sqrt2"),
    ));
    out.push(attained.report("√2 bound attained", "φ = δ_x − δ_o gives √2", tol.get("sqrt2")));

    match kl_pair(n) {
        Ok(kl) => {
            out.push(Report::new(
                "K/L pair symmetric",
                "⟨Kφ, h⟩_E = ⟨φ, Lh⟩_{l²}",
                kl.pair.residual(),
                tol.get("pair"),
            ));
            out.push(Report::new(
                "K against dipoles",
                "⟨Kδ_x, v_y⟩_E = δ_xy − δ_xo",
                max_abs_diff(&kl.k_dipole_pairing(), &kl.k_dipole_pairing_expected()),
                tol.get("dipole_pairing"),
            ));
            out.push(Report::new(
                "L Gram on dipoles",
                "⟨Lv_y, Lv_x⟩_{l²} = δ_xy + 1",
                max_abs_diff(&kl.l_dipole_gram(), &kl.l_dipole_gram_expected()),
                tol.get("dipole_gram"),
            ));
            match selfadjoint_products(&kl) {
                Ok(p) => {
                    out.push(Report::new(
                        "K*K is the Laplacian",
                        "K*K = Δ",
                        p.laplacian_residual,
                        tol.get("laplacian"),
                    ));
                    out.push(Report::new(
                        "L*L on dipoles",
                        "L*L v_x = δ_x − δ_o",
                        p.dipole_residual,
                        tol.get("lstar_l"),
                    ));
                    out.push(Report::count("L*L injective", "ker L*L = 0", p.kernel_dim));
                }
                Err(e) => out.push(Report::error("selfadjoint products", &e)),
            }
        }
        Err(e) => out.push(Report::error("K/L pair", &e)),
    }

    match big_l_selfadjointness_probe(n) {
        Ok(p) => {
            out.push(Report::count(
                "deficiency indices of L",
                "A*B*u = −u only for u = 0",
                p.indices.0 + p.indices.1,
            ));
            out.push(Report::new(
                "L symmetric",
                "⟨Lξ, η⟩ = ⟨ξ, Lη⟩",
                p.symmetry_residual,
                tol.get("symmetry"),
            ));
        }
        Err(e) => out.push(Report::error("deficiency indices of L", &e)),
    }

    match network_duality(n) {
        Ok(d) => {
            out.push(Report::new(
                "duality operator of l² and H_E",
                "Δ = graph Laplacian",
                d.laplacian_residual,
                tol.get("laplacian"),
            ));
            let mut moments = Worst::new();
            for x in 0..nv {
                moments.take(d.moments(&n.delta(x)).map(|m| m.residual()));
            }
            out.push(moments.report(
                "spectral moments of δ_x",
                "μ mass = ‖δ_x‖², ∫λ dμ = ‖δ_x‖_E²",
                tol.get("moment"),
            ));
        }
        Err(e) => out.push(Report::error("duality operator of l² and H_E", &e)),
    }
    out
}

/// Exact values on the three-vertex path `0 – 1 – 2`.
pub fn p3_anchors(tol: &Tolerances) -> Vec<Report> {
    let p3 = path::<f64>(3).expect("path");
    let es = EnergySpace::new(p3).expect("connected");
    let mut out = Vec::new();
    for (x, want) in [(1, [0.0, 1.0, 1.0]), (2, [0.0, 1.0, 2.0])] {
        let diff = es
            .dipole(x)
            .map(|v| v.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        let anchor = format!("v_{x} = ({}, {}, {})", want[0], want[1], want[2]);
        out.push(match diff {
            Ok(d) => Report::new(
                format!("three-vertex path dipole v_{x}"),
                anchor,
                d,
                tol.get("dipole_anchor"),
            ),
            Err(e) => Report::error(format!("three-vertex path dipole v_{x}"), &e),
        });
    }
    match kl_pair(es.network()) {
        Ok(kl) => {
            let want = DenseMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
            out.push(Report::new(
                "three-vertex path L Gram",
                "⟨Lv_y, Lv_x⟩ = [[2, 1], [1, 2]]",
                max_abs_diff(&kl.l_dipole_gram(), &want),
                tol.get("dipole_gram"),
            ));
            let pairing = DenseMatrix::from_rows(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
            let table = kl.k_dipole_pairing();
            // Row o is −1 in every column: δ_oy − δ_oo.
            let expected = &pairing - &DenseMatrix::from_rows(&[&[1.0, 1.0], &[0.0, 0.0], &[0.0, 0.0]]);
            out.push(Report::new(
                "three-vertex path K against dipoles",
                "⟨Kδ_x, v_y⟩_E = δ_xy − δ_xo",
                max_abs_diff(&table, &expected),
                tol.get("dipole_pairing"),
            ));
        }
        Err(e) => out.push(Report::error("three-vertex path L Gram", &e)),
    }
    out
}

/// Random pairs `(A, A*)`: `L` symmetric and no defect.
pub fn sympair_suite(rng: &mut SuiteRng, count: usize, max_dim: usize, tol: &Tolerances) -> Vec<Report> {
    let mut sym = Worst::new();
    let mut nonempty = 0;
    for _ in 0..count {
        let a = random::operator::<f64, _>(rng, max_dim);
        let run = || -> Result<(f64, (usize, usize))> {
            let pair = SymmetricPair::from_a(a)?;
            Ok((build_l(&pair)?.symmetry_residual, defect_space(&pair)?.indices()))
        };
        match run() {
            Ok((s, idx)) => {
                sym.take(Ok(s));
                nonempty += usize::from(idx != (0, 0));
            }
            Err(e) => sym.take(Err(e)),
        }
    }
    vec![
        sym.report(
            &format!("L symmetric ({count} random pairs)"),
            "⟨Lξ, η⟩_K = ⟨ξ, Lη⟩_K",
            tol.get("symmetry"),
        ),
        Report::count(
            format!("finite pairs have no defect ({count} random pairs)"),
            "N₋₁(A*B*) = 0",
            nonempty,
        ),
    ]
}

pub const INTERVAL_GRID: usize = 256;
pub const SWEEP_GRID: usize = 512;

/// The interval example on `(0, 1)` and the growing-interval sweep.
pub fn interval_suite(tol: &Tolerances) -> Vec<Report> {
    let mut out = Vec::new();
    let model = match interval_defect_model::<f64>(INTERVAL_GRID, (0.0, 1.0)) {
        Ok(m) => m,
        Err(e) => return vec![Report::error("interval defect model", &e)],
    };
    let e = std::f64::consts::E;
    let closed = DenseMatrix::from_rows(&[&[(e * e - 1.0) / 2.0, 1.0], &[1.0, (1.0 - e.powi(-2)) / 2.0]]);
    out.push(Report::new(
        format!("interval Gram ({INTERVAL_GRID} points)"),
        "∫₀¹ e^{2x} = (e² − 1)/2, ∫₀¹ 1 = 1, ∫₀¹ e^{−2x} = (1 − e⁻²)/2",
        max_abs_diff(&model.gram, &closed),
        tol.get("interval_gram"),
    ));
    out.push(Report::flag(
        "interval deficiency indices",
        "(d₊, d₋) = (2, 2)",
        model.indices() == (2, 2),
    ));
    out.push(Report::new(
        "defect equation on the interval",
        "A*B* eˣ = −eˣ",
        (&model.ab_star_action + &DenseMatrix::identity(2)).max_abs(),
        model.tolerance,
    ));

    match deficiency_isomorphisms(&model) {
        Ok(iso) => {
            out.push(Report::new(
                "deficiency isomorphisms",
                "L*φ(h) = −iφ(h), L*ψ(h) = iψ(h)",
                iso.phi_residual.max(iso.psi_residual),
                10.0 * model.tolerance,
            ));
            out.push(Report::flag(
                "deficiency isomorphisms injective",
                "rank φ = rank ψ = dim N₋₁",
                iso.injective() && iso.indices() == (2, 2),
            ));
        }
        Err(e) => out.push(Report::error("deficiency isomorphisms", &e)),
    }

    // Gram-orthogonal reflection across the first basis vector.
    let g = &model.gram;
    let w = [1.0, 0.0];
    let gw = g.matvec(&w);
    let wgw = w[0] * gw[0] + w[1] * gw[1];
    let reflection = &DenseMatrix::identity(2) - &DenseMatrix::from_fn(2, 2, |i, j| 2.0 * w[i] * gw[j] / wgw);
    match q_condition_check(&model, &reflection) {
        Ok(q) => out.push(Report::new(
            "Q = Gram reflection admissible",
            "I + BB* = Q*(I + BB*)Q",
            q.residual,
            tol.get("q_condition"),
        )),
        Err(e) => out.push(Report::error("Q = Gram reflection admissible", &e)),
    }
    match q_condition_check(&model, &DenseMatrix::identity(2).scale(2.0)) {
        Ok(q) => out.push(Report::flag("Q = 2I rejected", "I + BB* ≠ 4(I + BB*)", !q.pass)),
        Err(e) => out.push(Report::error("Q = 2I rejected", &e)),
    }
    let h = WeightedSpace::euclidean(1, "H");
    let pair = SymmetricPair::from_a(OperatorBetween::new(DenseMatrix::identity(1), h.clone(), h).expect("1x1"))
        .expect("A, A*");
    let element = DomainElement::with_defect(vec![0.0], vec![0.0], &[1.0, 0.0], &reflection);
    match extension_action(&pair, &model, &reflection, &element) {
        Ok(act) => out.push(Report::new(
            "boundary form of L_Q",
            "Im⟨f, L*f⟩ = ‖ψ₊‖² − ‖ψ₋‖² = 0",
            act.boundary_form.abs(),
            tol.get("boundary_form"),
        )),
        Err(e) => out.push(Report::error("boundary form of L_Q", &e)),
    }

    for r_max in 6..=8 {
        let radii: Vec<f64> = (1..=r_max).map(f64::from).collect();
        match interval_sweep(SWEEP_GRID, &radii) {
            Ok(s) => out.push(Report::count(
                format!("line limit of the interval, R = 1..{r_max}"),
                "eˣ, e⁻ˣ ∉ L²(ℝ): (d₊, d₋) = (0, 0)",
                s.limiting_dim(),
            )),
            Err(e) => out.push(Report::error(format!("line limit of the interval, R = 1..{r_max}"), &e)),
        }
    }
    out
}

/// Random networks: no eigenvalue of the assembled `A*B*` near `−1`.
pub fn finite_shadow_suite(rng: &mut SuiteRng, count: usize, tol: &Tolerances) -> Vec<Report> {
    let (mut nonzero, mut close) = (0, 0);
    let mut sym = Worst::new();
    for _ in 0..count {
        let nv = rng.gen_range(2..=24);
        let extra = rng.gen_range(0..=nv);
        match random::network::<f64, _>(rng, nv, extra).and_then(|n| big_l_selfadjointness_probe(&n)) {
            Ok(p) => {
                nonzero += usize::from(p.indices != (0, 0));
                close += usize::from(p.distance_to_minus_one < 1e-8);
                sym.take(Ok(p.symmetry_residual));
            }
            Err(e) => sym.take(Err(e)),
        }
    }
    vec![
        Report::count(
            format!("indices (0, 0) on {count} random networks"),
            "A*B*u = −u only for u = 0",
            nonzero,
        ),
        Report::count(
            format!("spectrum of A*B* away from −1 on {count} random networks"),
            "min |λ + 1| ≥ 1e-8",
            close,
        ),
        sym.report(
            &format!("L symmetric on {count} random networks"),
            "⟨Lξ, η⟩ = ⟨ξ, Lη⟩",
            tol.get("symmetry"),
        ),
    ]
}

/// Free and wired resistance per level, with the checks that apply to
/// every family.
pub fn exhaustion_reports(
    fam: &ExhaustionFamily<f64>,
    x: &str,
    y: &str,
    tol: &Tolerances,
) -> (Vec<LevelGap<f64>>, Vec<Report>) {
    match exhaustion_harmonics(fam, x, y) {
        Ok(gaps) => {
            let violations = gaps
                .iter()
                .filter(|g| g.r_wired > g.r_free + tol.get("rayleigh"))
                .count();
            let reports = vec![Report::count("wired below free", "R_wired ≤ R_free", violations)];
            (gaps, reports)
        }
        Err(e) => (Vec::new(), vec![Report::error("exhaustion", &e)]),
    }
}

/// A recurrent family: the gap vanishes at every level.
pub fn gap_vanishes(gaps: &[LevelGap<f64>], tol: &Tolerances) -> Report {
    let worst = gaps.iter().map(|g| g.gap.abs()).fold(0.0, f64::max);
    Report::new("free-wired gap vanishes", "R_free − R_wired = 0", worst, tol.get("gap"))
}

/// A transient family: the gap stays positive and decreases, with shrinking
/// steps, to a limit.
pub fn gap_persists(gaps: &[LevelGap<f64>], tol: &Tolerances) -> Vec<Report> {
    let positive = gaps.iter().all(|g| g.gap > tol.get("gap"));
    let increases = gaps
        .windows(2)
        .filter(|w| w[1].gap > w[0].gap + tol.get("rayleigh"))
        .count();
    let steps: Vec<f64> = gaps.windows(2).map(|w| (w[1].gap - w[0].gap).abs()).collect();
    let growing_steps = steps.windows(2).filter(|s| s[1] > s[0] + tol.get("rayleigh")).count();
    vec![
        Report::flag("free-wired gap positive", "R_free − R_wired > 0", positive),
        Report::count("free-wired gap monotone", "gap(n + 1) ≤ gap(n)", increases),
        Report::count(
            "free-wired gap converging",
            "|gap(n + 2) − gap(n + 1)| ≤ |gap(n + 1) − gap(n)|",
            growing_steps,
        ),
    ]
}

/// The full deterministic battery for `verify-all`.
pub fn verify_all(n: &Network<f64>, seed: u64, tol: &Tolerances) -> Vec<Report> {
    let mut rng = random::seeded(seed);
    let mut out = Vec::new();
    out.extend(charproj_suite(&mut rng, 200, 10, tol));
    out.extend(scalar_anchor(tol));
    out.extend(duality_suite(&mut rng, 200, 12, tol));
    out.extend(radon_nikodym_suite(&mut rng, 50, 6, tol));
    out.extend(moment_suite(&mut rng, 200, 12, tol));
    out.extend(friedrichs_suite(&mut rng, 50, tol));
    out.extend(network_suite(n, &mut rng, 1000, tol));
    out.extend(p3_anchors(tol));
    out.extend(sympair_suite(&mut rng, 100, 8, tol));
    out.extend(interval_suite(tol));
    out.extend(finite_shadow_suite(&mut rng, 100, tol));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.set("schur", 1e-6).unwrap();
        assert_eq!(t.get("schur"), 1e-6);
        assert_eq!(t.set("nonsense", 1.0).unwrap_err().name(), "InvalidInput");
        assert_eq!(t.set("schur", -1.0).unwrap_err().name(), "InvalidInput");
    }

    #[test]
    fn scalar_anchor_passes() {
        let rows = scalar_anchor(&Tolerances::default());
        assert!(rows.iter().all(|r| r.pass), "{rows:#?}");
        assert!(rows.iter().any(|r| r.identity.contains("Schur") && r.residual < 1e-15));
    }

    #[test]
    fn interval_rows_pass() {
        let rows = interval_suite(&Tolerances::default());
        assert!(rows.iter().all(|r| r.pass), "{rows:#?}");
    }

    #[test]
    fn p3_rows_pass() {
        let p3 = path::<f64>(3).unwrap();
        let mut rng = random::seeded(1);
        let rows: Vec<_> = p3_anchors(&Tolerances::default())
            .into_iter()
            .chain(network_suite(&p3, &mut rng, 100, &Tolerances::default()))
            .collect();
        assert!(rows.iter().all(|r| r.pass), "{rows:#?}");
    }
}
