use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use diskharm::gridfile::{read_field, write_columns, write_field};
use diskharm::heatlab::{conjecture_compare, ConjectureConfig, HeatBoundary};
use diskharm::sources::catalog::{catalog_sources, figure_case, FigurePayload, QCase};
use diskharm::sources::config::{parse_boundary, parse_source, parse_source_config, ParsedConfig};
use diskharm::sources::DiskSource;
use diskharm::transforms::{bergman_project, poisson_integral, q_transform, FieldMeta};
use diskharm::verify::{
    norm, q_transform_harmonicity, run_invariant_suite, Annulus, InvariantRecord, KernelFixture, NormInput, NormKind,
    NormSpec, SuiteConfig,
};
use diskharm::{poisson_kernel, q_kernel, EvaluationGrid, Field, KernelId, QuadratureSpec, SourceFunction};

use crate::error::CliError;
use crate::{BoundaryArg, GridArgs, KernelArg, NormArg, OutputArgs};

/// Accepts a plain number, `pi`, `k pi`, or a quotient of those such as
/// `2/pi`.
pub fn parse_prefactor(text: &str) -> Result<f64, String> {
    fn term(t: &str) -> Result<f64, String> {
        let t = t.trim();
        let value = if t == "pi" {
            PI
        } else if let Some(k) = t.strip_suffix("pi") {
            let k = k.trim().trim_end_matches('*').trim();
            k.parse::<f64>().map_err(|_| format!("cannot read `{t}` as a number"))? * PI
        } else {
            t.parse::<f64>().map_err(|_| format!("cannot read `{t}` as a number"))?
        };
        Ok(value)
    }
    let value = match text.split_once('/') {
        Some((a, b)) => {
            let den = term(b)?;
            if den == 0.0 {
                return Err("division by zero".into());
            }
            term(a)? / den
        }
        None => term(text)?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("prefactor `{text}` is not finite"))
    }
}

fn spec(tol: f64) -> Result<QuadratureSpec, CliError> {
    let s = QuadratureSpec::default().with_tol(tol);
    s.validate().map_err(|e| CliError::Usage(format!("--tol: {e}")))?;
    Ok(s)
}

fn grid(args: &GridArgs) -> Result<(EvaluationGrid, QuadratureSpec), CliError> {
    let g = EvaluationGrid::uniform(args.r_max, args.n_r, args.n_theta)
        .map_err(|e| CliError::Usage(format!("grid flags: {e}")))?;
    let s = spec(args.tol)?;
    if args.r_max > s.max_eval_radius {
        return Err(CliError::Usage(format!("--r-max {} exceeds the limit {}", args.r_max, s.max_eval_radius)));
    }
    Ok((g, s))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn bits_equal(a: &Field, b: &Field) -> bool {
    let same = |x: &[f64], y: &[f64]| x.len() == y.len() && x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits());
    same(&a.values, &b.values)
        && same(a.grid.radii(), b.grid.radii())
        && same(a.grid.angles(), b.grid.angles())
        && a.converged == b.converged
        && a.meta == b.meta
}

fn emit(path: &Path, field: &Field, output: &OutputArgs) -> Result<(), CliError> {
    write_field(path, field, output.timestamp)?;
    if output.reload {
        let back = read_field(path)?;
        if !bits_equal(&back, field) {
            return Err(CliError::Verification(format!("{} does not reload bit for bit", path.display())));
        }
    }
    let unconverged = field.converged.iter().filter(|c| !**c).count();
    println!(
        "wrote {} ({} points, min {:.6e}, max {:.6e}{})",
        path.display(),
        field.values.len(),
        field.min(),
        field.max(),
        if output.reload { ", reload ok" } else { "" }
    );
    if unconverged > 0 {
        eprintln!("warning: {unconverged} points in {} did not reach the quadrature tolerance", path.display());
    }
    Ok(())
}

type Columns = Vec<(String, Vec<f64>)>;

fn profile_columns(kernel: KernelId, radii: &[f64], n: usize) -> Result<(Vec<f64>, Columns), CliError> {
    if n < 2 {
        return Err(CliError::Usage("--n-theta must be at least 2".into()));
    }
    let angles: Vec<f64> = (0..n).map(|j| -PI + 2.0 * PI * j as f64 / (n - 1) as f64).collect();
    let mut series = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(0.0..=0.99).contains(&r) {
            return Err(CliError::Usage(format!("radius {r} must lie in [0, 0.99]")));
        }
        let values = angles
            .iter()
            .map(|&t| match kernel {
                KernelId::Q => q_kernel(r, t),
                _ => poisson_kernel(r, t),
            })
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        series.push((format!("r={r}"), values));
    }
    Ok((angles, series))
}

pub fn kernel(kernel: KernelArg, radii: &[f64], n_theta: usize, out: &Path) -> Result<(), CliError> {
    let id = match kernel {
        KernelArg::Poisson => KernelId::Poisson,
        KernelArg::Q => KernelId::Q,
    };
    let (angles, series) = profile_columns(id, radii, n_theta)?;
    write_columns(out, "theta", &angles, &series)?;
    println!("wrote {} ({} angles, {} radii)", out.display(), angles.len(), series.len());
    Ok(())
}

fn ratio(q: &Field, p: &Field) -> Field {
    Field {
        grid: q.grid.clone(),
        values: q.values.iter().zip(&p.values).map(|(a, b)| a / b).collect(),
        converged: q.converged.iter().zip(&p.converged).map(|(a, b)| *a && *b).collect(),
        meta: FieldMeta {
            operator: "ratio(q_transform/poisson_integral)".into(),
            source: format!("{} / {}", q.meta.source, p.meta.source),
            prefactor: q.meta.prefactor,
            quadrature: q.meta.quadrature,
            harmonic: false,
        },
    }
}

pub fn figure(id: u32, args: &GridArgs, dir: &Path, output: &OutputArgs) -> Result<(), CliError> {
    let case = figure_case(id)?;
    let (g, s) = grid(args)?;
    ensure_dir(dir)?;
    let file = |suffix: &str| dir.join(format!("fig{id}{suffix}.csv"));
    println!("figure {id}: {}", case.description);
    let q_field = |qc: &QCase| q_transform(&qc.source, &g, qc.prefactor, &s);
    match &case.payload {
        FigurePayload::KernelPlot { kernel, radii } => {
            let (angles, series) = profile_columns(*kernel, radii, 721)?;
            let path = file("");
            write_columns(&path, "theta", &angles, &series)?;
            println!("wrote {} ({} angles, {} radii)", path.display(), angles.len(), series.len());
        }
        FigurePayload::Poisson(p) => emit(&file(""), &poisson_integral(&p.boundary, &g, &s)?, output)?,
        FigurePayload::Q(qc) => {
            let qf = q_field(qc)?;
            emit(&file(""), &qf, output)?;
            if let Some((p, _)) = case.comparison_pair() {
                let pf = poisson_integral(&p.boundary, &g, &s)?;
                emit(&file("_poisson"), &pf, output)?;
                emit(&file("_ratio"), &ratio(&qf, &pf), output)?;
            }
        }
        FigurePayload::Paired { poisson, q } => {
            let pf = poisson_integral(&poisson.boundary, &g, &s)?;
            let qf = q_field(q)?;
            emit(&file("_poisson"), &pf, output)?;
            emit(&file("_q"), &qf, output)?;
            emit(&file("_ratio"), &ratio(&qf, &pf), output)?;
        }
        FigurePayload::SideBySide(cases) => {
            for qc in cases {
                emit(&file(&qc.label), &q_field(qc)?, output)?;
            }
        }
    }
    Ok(())
}

pub fn transform(
    source_file: &Path,
    prefactor: f64,
    args: &GridArgs,
    out: &Path,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let f = parse_source(&read_text(source_file)?)?;
    let (g, s) = grid(args)?;
    emit(out, &q_transform(&f, &g, prefactor, &s)?, output)
}

pub fn poisson(source_file: &Path, args: &GridArgs, out: &Path, output: &OutputArgs) -> Result<(), CliError> {
    let f = parse_boundary(&read_text(source_file)?)?;
    let (g, s) = grid(args)?;
    emit(out, &poisson_integral(&f, &g, &s)?, output)
}

pub fn project(source_file: &Path, args: &GridArgs, out: &Path, output: &OutputArgs) -> Result<(), CliError> {
    let f = parse_source(&read_text(source_file)?)?;
    let (g, s) = grid(args)?;
    emit(out, &bergman_project(&f, &g, &s)?, output)
}

pub struct NormsArgs {
    pub source_file: Option<PathBuf>,
    pub field: Option<PathBuf>,
    pub kind: Option<NormArg>,
    pub p: f64,
    pub alpha: f64,
    pub truncation: f64,
    pub tol: f64,
}

pub fn norms(args: NormsArgs, out: Option<&Path>) -> Result<(), CliError> {
    enum Loaded {
        Source(SourceFunction),
        Boundary(diskharm::BoundaryFunction),
        Field(Field),
    }
    let loaded = match (&args.source_file, &args.field) {
        (Some(path), _) => match parse_source_config(&read_text(path)?)? {
            ParsedConfig::Source(s) => Loaded::Source(s),
            ParsedConfig::Boundary(b) => Loaded::Boundary(b),
        },
        (None, Some(path)) => Loaded::Field(read_field(path)?),
        (None, None) => return Err(CliError::Usage("give --source-file or --field".into())),
    };
    let default_kind = if matches!(loaded, Loaded::Boundary(_)) { NormArg::CircleL2 } else { NormArg::Bergman };
    let kind = match args.kind.unwrap_or(default_kind) {
        NormArg::Bergman => NormKind::BergmanWeighted { p: args.p, alpha: args.alpha },
        NormArg::HarmonicL2 => NormKind::HarmonicBergmanL2,
        NormArg::HardySup => NormKind::HardySup,
        NormArg::CircleL2 => NormKind::CircleL2,
    };
    let norm_spec = NormSpec { kind, truncation_radius: args.truncation, quadrature: spec(args.tol)? };
    let input = match &loaded {
        Loaded::Source(s) => NormInput::Source(s),
        Loaded::Boundary(b) => NormInput::Boundary(b),
        Loaded::Field(f) => NormInput::Field(f),
    };
    let report = norm(input, &norm_spec)?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{text}");
    if !report.converged {
        eprintln!("warning: the norm quadrature did not reach its tolerance everywhere");
    }
    if let Some(path) = out {
        write_text(path, &(text + "\n"))?;
    }
    Ok(())
}

pub struct VerifyArgs {
    pub r_max: f64,
    pub tol: f64,
    pub catalog: bool,
    pub source_file: Option<PathBuf>,
    pub prefactor: f64,
    pub h: f64,
    pub sign_flipped: bool,
}

fn harmonicity_record<S: DiskSource + ?Sized>(
    name: &str,
    source: &S,
    prefactor: f64,
    h: f64,
    s: &QuadratureSpec,
) -> Result<InvariantRecord, CliError> {
    let rep = q_transform_harmonicity(source, prefactor, Annulus::default(), (h, h), (8, 16), s)?;
    let measured = rep.max_normalized_residual;
    Ok(InvariantRecord {
        id: format!("harmonicity:{name}"),
        description: format!("normalized discrete Laplacian of the transform on [0.1, 0.8] with h = {h}"),
        measured,
        threshold: 1e-3,
        passed: measured.is_finite() && measured <= 1e-3,
    })
}

pub fn verify(args: VerifyArgs, out: Option<&Path>) -> Result<(), CliError> {
    if !(args.r_max > 0.0 && args.r_max < 1.0) {
        return Err(CliError::Usage(format!("--r-max {} must lie in (0, 1)", args.r_max)));
    }
    let s = spec(args.tol)?;
    let config = SuiteConfig {
        r_max: args.r_max,
        quadrature: s,
        kernel_fixture: if args.sign_flipped { KernelFixture::SignFlipped } else { KernelFixture::Exact },
        ..SuiteConfig::default()
    };
    let suite = run_invariant_suite(&config);
    let mut extra = Vec::new();
    if args.catalog {
        for (name, case) in catalog_sources() {
            extra.push(harmonicity_record(&name, &case.source, case.prefactor, args.h, &s)?);
        }
    }
    if let Some(path) = &args.source_file {
        let f = parse_source(&read_text(path)?)?;
        extra.push(harmonicity_record(&path.display().to_string(), &f, args.prefactor, args.h, &s)?);
    }
    let all: Vec<&InvariantRecord> = suite.records.iter().chain(&extra).collect();
    for r in &all {
        println!(
            "{} {:<40} measured {:.3e} threshold {:.1e}",
            if r.passed { "PASS" } else { "FAIL" },
            r.id,
            r.measured,
            r.threshold
        );
    }
    let failed = all.iter().filter(|r| !r.passed).count();
    if let Some(path) = out {
        let doc = serde_json::json!({
            "suite": suite,
            "harmonicity": extra,
            "all_passed": failed == 0,
        });
        write_text(path, &(serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"))?;
    }
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} of {} checks failed", all.len())));
    }
    println!("all {} checks passed", all.len());
    Ok(())
}

pub struct ConjectureArgs {
    pub source_file: Option<PathBuf>,
    pub figure: Option<u32>,
    pub boundary: BoundaryArg,
    pub robin_h: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub tol: f64,
}

pub fn conjecture(args: ConjectureArgs, dir: &Path, output: &OutputArgs) -> Result<(), CliError> {
    let source = match (&args.source_file, args.figure) {
        (Some(path), _) => parse_source(&read_text(path)?)?,
        (None, Some(id)) => {
            let case = figure_case(id)?;
            case.q_cases()
                .first()
                .map(|q| q.source.clone())
                .ok_or_else(|| CliError::Usage(format!("figure {id} has no disk source")))?
        }
        (None, None) => return Err(CliError::Usage("give --source-file or --figure".into())),
    };
    let boundary = match args.boundary {
        BoundaryArg::Dirichlet => HeatBoundary::DirichletZero,
        BoundaryArg::Robin => HeatBoundary::Robin { h: args.robin_h },
    };
    let config =
        ConjectureConfig { n_r: args.n_r, n_theta: args.n_theta, quadrature: spec(args.tol)?, ..Default::default() };
    let outcome = conjecture_compare(&source, boundary, &config)?;
    ensure_dir(dir)?;
    let text = outcome.report.to_json();
    let report_path = dir.join("conjecture_report.json");
    write_text(&report_path, &(text.clone() + "\n"))?;
    println!("{text}");
    println!("wrote {}", report_path.display());
    emit(&dir.join("conjecture_fd.csv"), &outcome.fd_field, output)?;
    emit(&dir.join("conjecture_q.csv"), &outcome.q_field, output)?;
    Ok(())
}
