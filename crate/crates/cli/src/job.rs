//! One invocation: read the input, run a command, write `report.csv` and the
//! command's data files.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use duality_lab::charproj::char_projection;
use duality_lab::duality::{
    duality_operator, kernel_complement_residual, partial_isometry_k, quadratic_form_residual, spectral_measure,
};
use duality_lab::hilbert::CommonDomain;
use duality_lab::linalg::DenseMatrix;
use duality_lab::network::{
    big_l_selfadjointness_probe, dipole, network_duality, ExhaustionFamily, FamilyKind, LevelGap, Network,
};
use duality_lab::report::all_pass;
use duality_lab::sympair::interval_sweep;
use duality_lab::verify::{self, SWEEP_GRID};
use duality_lab::{random, Report, Tolerances};

use crate::error::JobError;
use crate::format;

/// The bundled three-vertex path `0 - 1 - 2`, unit conductances, base `0`.
pub const P3_NETWORK: &str = include_str!("../data/p3.net");

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Charproj,
    Duality,
    Spectra,
    Dipole,
    Defect,
    Exhaust,
    VerifyAll,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Path,
    Lattice2d,
    BinaryTree { depth: usize, ratio: f64 },
}

impl Family {
    pub fn kind(self) -> FamilyKind<f64> {
        match self {
            Family::Path => FamilyKind::Path,
            Family::Lattice2d => FamilyKind::Lattice2d,
            Family::BinaryTree { ratio, .. } => FamilyKind::BinaryTree { ratio },
        }
    }

    pub fn default_levels(self) -> Vec<usize> {
        match self {
            Family::Path => vec![8, 16, 32],
            Family::Lattice2d => vec![4, 8, 16],
            Family::BinaryTree { depth, .. } => (2..=depth.max(2)).collect(),
        }
    }

    /// Interior vertices present at every level of the family.
    pub fn probe_pair(self) -> (&'static str, &'static str) {
        match self {
            Family::Path => ("0", "1"),
            Family::Lattice2d => ("0.0", "0.1"),
            Family::BinaryTree { .. } => ("1", "2"),
        }
    }
}

impl FromStr for Family {
    type Err = String;

    /// `path_n`, `lattice2d_n`, or `binary_tree:<depth>:<ratio>`.
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "path" | "path_n" => return Ok(Family::Path),
            "lattice2d" | "lattice2d_n" => return Ok(Family::Lattice2d),
            _ => {}
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["binary_tree", depth, ratio] => {
                let depth = depth.parse().map_err(|_| format!("bad tree depth `{depth}`"))?;
                let ratio: f64 = ratio.parse().map_err(|_| format!("bad conductance ratio `{ratio}`"))?;
                if !(ratio.is_finite() && ratio > 0.0) {
                    return Err(format!("conductance ratio must be positive, got {ratio}"));
                }
                Ok(Family::BinaryTree { depth, ratio })
            }
            _ => Err(format!(
                "unknown family `{s}`; expected path_n, lattice2d_n or binary_tree:<depth>:<ratio>"
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct JobSpec {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub family: Option<Family>,
    pub levels: Option<Vec<usize>>,
}

impl JobSpec {
    pub fn new(command: Command, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            command,
            input: None,
            output_dir: output_dir.into(),
            tolerances: Tolerances::default(),
            seed: 42,
            family: None,
            levels: None,
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub reports: Vec<Report>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    /// `0` when every row passes, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        if all_pass(&self.reports) {
            0
        } else {
            1
        }
    }
}

/// Long-format table `(key columns..., value)` written as CSV.
struct Table {
    name: &'static str,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &'static str, header: &[&'static str]) -> Self {
        Self {
            name,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn matrix(name: &'static str, m: &DenseMatrix<f64>) -> Self {
        let mut t = Self::new(name, &["row", "col", "value"]);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                t.rows.push(vec![i.to_string(), j.to_string(), num(m[(i, j)])]);
            }
        }
        t
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn read_input(job: &JobSpec) -> Result<Option<String>, JobError> {
    job.input
        .as_ref()
        .map(|p| fs::read_to_string(p).map_err(|e| JobError::io(p, e)))
        .transpose()
}

fn require_input(job: &JobSpec) -> Result<String, JobError> {
    read_input(job)?.ok_or_else(|| JobError::Usage(format!("{:?} needs --in", job.command)))
}

/// First keyword of the file decides between a network and a pair.
fn first_keyword(text: &str) -> Option<&str> {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .and_then(|l| l.split_whitespace().next())
}

pub fn run(job: &JobSpec) -> Result<Outcome, JobError> {
    let tol = &job.tolerances;
    let (reports, tables) = match job.command {
        Command::Charproj => charproj(&require_input(job)?, tol)?,
        Command::Duality => duality(&format::parse_pair_str(&require_input(job)?)?, tol)?,
        Command::Spectra => {
            let text = require_input(job)?;
            if first_keyword(&text) == Some("network") {
                network_spectra(&format::parse_network_str(&text)?, tol)?
            } else {
                pair_spectra(&format::parse_pair_str(&text)?, tol)?
            }
        }
        Command::Dipole => dipoles(&format::parse_network_str(&require_input(job)?)?, job.seed, tol)?,
        Command::Defect => defect(read_input(job)?, tol)?,
        Command::Exhaust => exhaust(job)?,
        Command::VerifyAll => {
            let text = read_input(job)?.unwrap_or_else(|| P3_NETWORK.to_string());
            let n = format::parse_network_str(&text)?;
            (verify::verify_all(&n, job.seed, tol), Vec::new())
        }
    };
    fs::create_dir_all(&job.output_dir).map_err(|e| JobError::io(&job.output_dir, e))?;
    let mut files = vec![write_report(&job.output_dir.join("report.csv"), &reports)?];
    for t in &tables {
        files.push(write_table(&job.output_dir, t)?);
    }
    Ok(Outcome { reports, files })
}

pub fn write_report(path: &Path, reports: &[Report]) -> Result<PathBuf, JobError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| with_path(e, path))?;
    w.write_record(["identity", "anchor", "residual", "tolerance", "pass"])?;
    for r in reports {
        let pass = if r.pass { "true" } else { "false" };
        w.write_record([
            r.identity.as_str(),
            &r.anchor,
            &num(r.residual),
            &num(r.tolerance),
            pass,
        ])?;
    }
    w.flush().map_err(|e| JobError::io(path, e))?;
    Ok(path.to_path_buf())
}

fn write_table(dir: &Path, t: &Table) -> Result<PathBuf, JobError> {
    let path = dir.join(format!("{}.csv", t.name));
    let mut w = csv::Writer::from_path(&path).map_err(|e| with_path(e, &path))?;
    w.write_record(&t.header)?;
    for row in &t.rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| JobError::io(&path, e))?;
    Ok(path)
}

fn with_path(e: csv::Error, path: &Path) -> JobError {
    match JobError::from(e) {
        JobError::Io { source, .. } => JobError::io(path, source),
        other => other,
    }
}

type Produced = (Vec<Report>, Vec<Table>);

fn charproj(text: &str, tol: &Tolerances) -> Result<Produced, JobError> {
    let t = format::parse_operator_str(text)?;
    let e = char_projection(&t)?;
    Ok((
        verify::charproj_reports(&t, tol),
        vec![Table::matrix("projection", &e.full())],
    ))
}

fn duality(cd: &CommonDomain<f64>, tol: &Tolerances) -> Result<Produced, JobError> {
    let delta = duality_operator(cd)?;
    let worst = (0..cd.ambient_dim())
        .map(|k| {
            let mut c = vec![0.0; cd.ambient_dim()];
            c[k] = 1.0;
            quadratic_form_residual(cd, &delta, &c)
        })
        .fold(0.0, f64::max);
    let k = partial_isometry_k(cd)?;
    let reports = vec![
        Report::new(
            "duality operator on basis vectors",
            "⟨φ, Δφ⟩₁ = ‖φ‖₂²  (error / ‖Δ‖‖φ‖₁²)",
            worst,
            tol.get("quadratic_form"),
        ),
        Report::new(
            "kernel of J*",
            "ker J* = H₂ ⊖ 𝒟",
            kernel_complement_residual(cd)?,
            tol.get("kernel_complement"),
        ),
        Report::new(
            "K partial isometry",
            "(K*K)² = K*K",
            k.projection_residual,
            tol.get("projection"),
        ),
        Report::new(
            "first moment through K",
            "⟨Kφ, JJ*Kφ⟩₂ = ‖φ‖₂²",
            k.m1_residual,
            tol.get("moment"),
        ),
    ];
    Ok((reports, vec![Table::matrix("delta", delta.matrix())]))
}

fn atoms_table() -> Table {
    Table::new("spectral_measure", &["phi", "lambda", "mass"])
}

fn pair_spectra(cd: &CommonDomain<f64>, tol: &Tolerances) -> Result<Produced, JobError> {
    let delta = duality_operator(cd)?;
    let j = cd.inclusion()?;
    let mut table = atoms_table();
    let (mut mass, mut first) = (0.0f64, 0.0f64);
    for k in 0..cd.h1().dim() {
        let mut phi = vec![0.0; cd.h1().dim()];
        phi[k] = 1.0;
        let mu = spectral_measure(&delta, &phi)?;
        for &(l, m) in &mu.atoms {
            table.rows.push(vec![format!("e{k}"), num(l), num(m)]);
        }
        let n1 = cd.h1().inner(&phi, &phi);
        let jphi = j.apply(&phi);
        let n2 = cd.h2().inner(&jphi, &jphi);
        mass = mass.max((mu.total_mass() - n1).abs() / n1);
        let scale = delta.norm()? * n1;
        first = first.max(if scale == 0.0 {
            mu.moment(1).abs()
        } else {
            (mu.moment(1) - n2).abs() / scale
        });
    }
    let reports = vec![
        Report::new(
            "spectral mass of basis vectors",
            "μ_φ([0,∞)) = ‖φ‖₁²",
            mass,
            tol.get("moment"),
        ),
        Report::new(
            "spectral first moment of basis vectors",
            "∫λ dμ_φ = ‖φ‖₂²  (error / ‖Δ‖‖φ‖₁²)",
            first,
            tol.get("moment"),
        ),
    ];
    Ok((reports, vec![table]))
}

fn network_spectra(n: &Network<f64>, tol: &Tolerances) -> Result<Produced, JobError> {
    let nd = network_duality(n)?;
    let mut table = atoms_table();
    let mut worst = 0.0f64;
    for x in 0..n.vertex_count() {
        let phi = n.delta(x);
        let mu = spectral_measure(&nd.delta, &phi)?;
        for &(l, m) in &mu.atoms {
            table.rows.push(vec![n.label(x).to_string(), num(l), num(m)]);
        }
        worst = worst.max(nd.moments(&phi)?.residual());
    }
    let reports = vec![
        Report::new(
            "duality operator is the Laplacian",
            "Δ = graph Laplacian on span{δ_x}",
            nd.laplacian_residual,
            tol.get("laplacian"),
        ),
        Report::new(
            "moments of δ_x",
            "μ_{δ_x} mass = ‖δ_x‖², first moment = ‖δ_x‖_E²",
            worst,
            tol.get("moment"),
        ),
    ];
    Ok((reports, vec![table]))
}

fn dipoles(n: &Network<f64>, seed: u64, tol: &Tolerances) -> Result<Produced, JobError> {
    let mut table = Table::new("dipoles", &["dipole", "vertex", "value"]);
    for x in 0..n.vertex_count() {
        if x == n.base() {
            continue;
        }
        let v = dipole(n, n.label(x))?;
        for (y, value) in v.iter().enumerate() {
            table
                .rows
                .push(vec![n.label(x).to_string(), n.label(y).to_string(), num(*value)]);
        }
    }
    let mut rng = random::seeded(seed);
    Ok((verify::network_suite(n, &mut rng, 1000, tol), vec![table]))
}

fn defect(input: Option<String>, tol: &Tolerances) -> Result<Produced, JobError> {
    let mut reports = verify::interval_suite(tol);
    let radii: Vec<f64> = (1..=8).map(f64::from).collect();
    let sweep = interval_sweep(SWEEP_GRID, &radii)?;
    let mut table = Table::new(
        "interval_sweep",
        &["radius", "log_norm_exp", "log_norm_exp_neg", "finite_dim"],
    );
    for (i, r) in sweep.radii.iter().enumerate() {
        table.rows.push(vec![
            num(*r),
            num(sweep.log_norms[0][i]),
            num(sweep.log_norms[1][i]),
            sweep.finite_dims[i].to_string(),
        ]);
    }
    if let Some(text) = input {
        let n = format::parse_network_str(&text)?;
        let probe = big_l_selfadjointness_probe(&n)?;
        reports.push(Report::flag(
            format!("deficiency indices of L on {}", n.name()),
            "(d₊, d₋) = (0, 0) on a finite network",
            probe.indices == (0, 0),
        ));
        reports.push(Report::new(
            format!("L symmetric on {}", n.name()),
            "⟨Lξ, η⟩ = ⟨ξ, Lη⟩",
            probe.symmetry_residual,
            tol.get("symmetry"),
        ));
    }
    Ok((reports, vec![table]))
}

fn exhaust(job: &JobSpec) -> Result<Produced, JobError> {
    let family = job
        .family
        .ok_or_else(|| JobError::Usage("exhaust needs --family".into()))?;
    let levels = job.levels.clone().unwrap_or_else(|| family.default_levels());
    let fam = ExhaustionFamily::new(family.kind(), &levels)?;
    let (x, y) = family.probe_pair();
    let (gaps, mut reports) = verify::exhaustion_reports(&fam, x, y, &job.tolerances);
    if gaps.is_empty() {
        return Ok((reports, Vec::new()));
    }
    match family {
        Family::Path => reports.push(verify::gap_vanishes(&gaps, &job.tolerances)),
        Family::BinaryTree { .. } => reports.extend(verify::gap_persists(&gaps, &job.tolerances)),
        Family::Lattice2d => {}
    }
    Ok((reports, vec![gap_table(&gaps)]))
}

fn gap_table(gaps: &[LevelGap<f64>]) -> Table {
    let mut t = Table::new("exhaustion", &["level", "r_free", "r_wired", "gap", "max_conductance"]);
    for g in gaps {
        t.rows.push(vec![
            g.size.to_string(),
            num(g.r_free),
            num(g.r_wired),
            num(g.gap),
            num(g.max_conductance),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_syntax() {
        assert_eq!("path_n".parse::<Family>().unwrap(), Family::Path);
        assert_eq!(
            "binary_tree:6:0.5".parse::<Family>().unwrap(),
            Family::BinaryTree { depth: 6, ratio: 0.5 }
        );
        assert!("binary_tree:6:-1".parse::<Family>().is_err());
        assert!("torus".parse::<Family>().is_err());
    }

    #[test]
    fn bundled_p3_parses() {
        let n = format::parse_network_str(P3_NETWORK).unwrap();
        assert_eq!(n.vertices(), ["0", "1", "2"]);
    }
}
