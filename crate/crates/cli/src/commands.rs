use std::fs;
use std::path::Path;

use qstiefel::covers::{
    ls_bounds, sp2_cover, spk_cover, CayleySet, CoverCheck, CoverFamily, CoverReport, LsBounds,
    Sampler,
};
use qstiefel::relsvd::{decompose_with, rebuild, DecomposeOptions, RelativeSvd};
use qstiefel::stiefel::{complete, is_admissible, sample_sp, sample_stiefel, seeded_rng};
use qstiefel::{Error, QMatrix};
use serde::{Deserialize, Serialize};

use crate::matrix_file::{read_matrix, write_json, MatrixFile};
use crate::{
    CliError, Command, FamilyKind, OutputFormat, RunConfig, SampleKind, SamplerKind, EXIT_NEGATIVE,
    EXIT_OK,
};

pub(crate) fn dispatch(command: &Command, cfg: &RunConfig) -> Result<u8, CliError> {
    match command {
        Command::Decompose { file, k } => decompose(file, *k, cfg),
        Command::Admissible {
            file,
            n,
            complete,
            out,
        } => admissible(file, *n, *complete, out.as_deref(), cfg),
        Command::VerifyCover {
            family,
            k,
            family_file,
            sampler,
            witness_out,
            no_probes,
            membership_tol,
        } => {
            let family = build_family(*family, *k, family_file.as_deref())?;
            let sampler = match sampler {
                SamplerKind::Sp => Sampler::SpEmbedded,
                SamplerKind::Stiefel => Sampler::FullStiefel,
            };
            let check = CoverCheck::new(cfg.samples, cfg.seed)
                .sampler(sampler)
                .tol(*membership_tol)
                .sign_probes(!no_probes);
            verify_cover(&family, &check, witness_out, cfg)
        }
        Command::Bounds { n, k } => bounds(n.zip(*k), cfg),
        Command::Sample {
            what,
            n,
            k,
            count,
            out,
        } => sample(*what, *n, *k, *count, out.as_deref(), cfg),
    }
}

fn emit_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable report")
    );
}

fn library_error(e: Error) -> CliError {
    match e {
        Error::NotSymplectic { .. } | Error::NotSquare { .. } | Error::Inadmissible(_) => {
            CliError::rejected(e.to_string())
        }
        Error::DimensionMismatch(_) | Error::InvalidDimensions(_) => CliError::input(e.to_string()),
        _ => CliError::failure(e.to_string()),
    }
}

#[derive(Serialize)]
struct DecomposeJson {
    n: usize,
    k: usize,
    p: usize,
    q: usize,
    r: usize,
    p_prime: usize,
    thetas: Vec<f64>,
    cosines: Vec<f64>,
    residual: f64,
    a: MatrixFile,
    b: MatrixFile,
    m: MatrixFile,
    l: MatrixFile,
}

impl DecomposeJson {
    fn new(d: &RelativeSvd, residual: f64) -> Self {
        Self {
            n: d.n,
            k: d.k,
            p: d.p,
            q: d.q,
            r: d.r,
            p_prime: d.p_prime,
            thetas: d.thetas.clone(),
            cosines: d.cosines(),
            residual,
            a: MatrixFile::from_matrix(&d.a),
            b: MatrixFile::from_matrix(&d.b),
            m: MatrixFile::from_matrix(&d.m),
            l: MatrixFile::from_matrix(&d.l),
        }
    }
}

fn decompose(file: &Path, k: usize, cfg: &RunConfig) -> Result<u8, CliError> {
    let a = read_matrix(file)?;
    if k > a.rows() {
        return Err(CliError::input(format!("k = {k} exceeds n = {}", a.rows())));
    }
    let opts = DecomposeOptions {
        tol: cfg.tol,
        ..DecomposeOptions::default()
    };
    let d = decompose_with(&a, k, opts).map_err(library_error)?;
    let residual = (&rebuild(&d).map_err(library_error)? - &a).frobenius_norm();
    match cfg.output {
        OutputFormat::Json => emit_json(&DecomposeJson::new(&d, residual)),
        OutputFormat::Text => {
            println!(
                "relative SVD of A in Sp({}) against its {k}x{k} corner",
                d.n
            );
            println!("p = {}, q = {}, r = {}, p' = {}", d.p, d.q, d.r, d.p_prime);
            println!("thetas: {:?}", d.thetas);
            println!("cos thetas: {:?}", d.cosines());
            println!("reconstruction residual: {residual:e}");
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct AdmissibleJson {
    admissible: bool,
    reason: String,
    n: usize,
    k: usize,
    excess: i64,
    sigma: Vec<f64>,
    p: usize,
    q: usize,
    r: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<MatrixFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    frame_defect: Option<f64>,
}

fn admissible(
    file: &Path,
    n: usize,
    want_completion: bool,
    out: Option<&Path>,
    cfg: &RunConfig,
) -> Result<u8, CliError> {
    let p = read_matrix(file)?;
    if !p.is_square() {
        return Err(CliError::input(format!(
            "block must be square, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    let report = is_admissible(&p, n, cfg.tol).map_err(library_error)?;
    let frame = if want_completion && report.admissible {
        Some(complete(&p, n, cfg.tol).map_err(library_error)?)
    } else {
        None
    };
    if let (Some(f), Some(path)) = (&frame, out) {
        write_json(path, &MatrixFile::from_matrix(f.t()))?;
    }
    let inline_t = frame.as_ref().filter(|_| out.is_none());
    match cfg.output {
        OutputFormat::Json => emit_json(&AdmissibleJson {
            admissible: report.admissible,
            reason: report.reason.to_string(),
            n,
            k: report.k,
            excess: report.excess,
            sigma: report.sigma.clone(),
            p: report.classes.p,
            q: report.classes.q,
            r: report.classes.r,
            t: inline_t.map(|f| MatrixFile::from_matrix(f.t())),
            frame_defect: frame.as_ref().map(|f| f.defect()),
        }),
        OutputFormat::Text => {
            let verdict = if report.admissible {
                "admissible"
            } else {
                "not admissible"
            };
            println!(
                "P ({0}x{0}) is {verdict} in X_{{{n},{0}}}: {1}",
                report.k, report.reason
            );
            println!("excess e = 2k - n = {}", report.excess);
            println!("singular values: {:?}", report.sigma);
            println!(
                "classes: p = {}, q = {}, r = {}",
                report.classes.p, report.classes.q, report.classes.r
            );
            if want_completion && !report.admissible {
                println!("no completion exists");
            }
            if let Some(f) = &frame {
                println!("frame defect ||x*x - I||: {:e}", f.defect());
                match out {
                    Some(path) => println!("T written to {}", path.display()),
                    None => println!("T =\n{}", MatrixFile::to_json(f.t())),
                }
            }
        }
    }
    Ok(if report.admissible {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

/// Custom family file: `{"n": 2, "sets": [{"label": "...", "center": <matrix>}]}`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyFile {
    n: usize,
    /// Needed only when `sets` is empty.
    k: Option<usize>,
    sets: Vec<SetEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SetEntry {
    label: Option<String>,
    center: MatrixFile,
}

fn build_family(
    kind: FamilyKind,
    k: Option<usize>,
    file: Option<&Path>,
) -> Result<CoverFamily, CliError> {
    let spk = |j: usize| {
        let k = k.ok_or_else(|| CliError::input("--k is required for the spk families"))?;
        spk_cover(k, j).map_err(library_error)
    };
    match kind {
        FamilyKind::Sp2 => match k {
            Some(k) if k != 2 => Err(CliError::input(format!("sp2 lives in Sp(2), got --k {k}"))),
            _ => Ok(sp2_cover()),
        },
        FamilyKind::SpkJ0 => spk(0),
        FamilyKind::SpkJ1 => spk(1),
        FamilyKind::SpkJ2 => spk(2),
        FamilyKind::Custom => {
            let path = file.ok_or_else(|| CliError::input("custom needs --family FILE"))?;
            custom_family(path, k)
        }
    }
}

fn custom_family(path: &Path, k: Option<usize>) -> Result<CoverFamily, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let parsed: FamilyFile = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut sets = Vec::with_capacity(parsed.sets.len());
    for (i, entry) in parsed.sets.iter().enumerate() {
        let center = entry
            .center
            .to_matrix()
            .map_err(|e| CliError::input(format!("{}: set {i}: {e}", path.display())))?;
        let label = entry.label.clone().unwrap_or_else(|| format!("set {i}"));
        let set = CayleySet::new(center, parsed.n, label.clone()).map_err(|e| match e {
            Error::Inadmissible(r) => CliError::rejected(format!(
                "center of {label} is not {}-admissible: {}",
                parsed.n, r.reason
            )),
            other => library_error(other),
        })?;
        sets.push(set);
    }
    let k = k
        .or(parsed.k)
        .or_else(|| sets.first().map(|s| s.k()))
        .ok_or_else(|| CliError::input("empty family needs k"))?;
    CoverFamily::new(parsed.n, k, sets).map_err(library_error)
}

#[derive(Serialize)]
struct WitnessJson {
    index: usize,
    probe: bool,
    t: MatrixFile,
    p: MatrixFile,
    margins: Vec<f64>,
}

#[derive(Serialize)]
struct WitnessFile {
    n: usize,
    k: usize,
    uncovered: usize,
    witnesses: Vec<WitnessJson>,
}

#[derive(Serialize)]
struct CoverJson {
    n: usize,
    k: usize,
    sets: Vec<String>,
    samples: usize,
    probes: usize,
    seed: u64,
    tol: f64,
    uncovered: usize,
    near_boundary: usize,
    min_best_margin: f64,
    hits: Vec<usize>,
    covered: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_file: Option<String>,
}

fn verify_cover(
    family: &CoverFamily,
    check: &CoverCheck,
    witness_out: &Path,
    cfg: &RunConfig,
) -> Result<u8, CliError> {
    let report: CoverReport = check.run(family);
    let dumped = if report.covered() {
        None
    } else {
        write_json(
            witness_out,
            &WitnessFile {
                n: family.n(),
                k: family.k(),
                uncovered: report.uncovered,
                witnesses: report
                    .witnesses
                    .iter()
                    .map(|w| WitnessJson {
                        index: w.index,
                        probe: w.probe,
                        t: MatrixFile::from_matrix(w.frame.t()),
                        p: MatrixFile::from_matrix(w.frame.p()),
                        margins: w.margins.clone(),
                    })
                    .collect(),
            },
        )?;
        Some(witness_out.display().to_string())
    };
    match cfg.output {
        OutputFormat::Json => emit_json(&CoverJson {
            n: family.n(),
            k: family.k(),
            sets: family
                .sets()
                .iter()
                .map(|s| s.label().to_string())
                .collect(),
            samples: report.samples,
            probes: report.probes,
            seed: report.seed,
            tol: report.tol,
            uncovered: report.uncovered,
            near_boundary: report.near_boundary,
            min_best_margin: report.min_best_margin,
            hits: report.hits.clone(),
            covered: report.covered(),
            witness_file: dumped,
        }),
        OutputFormat::Text => {
            println!("{report}");
            if let Some(path) = dumped {
                println!("witnesses written to {path}");
            }
        }
    }
    Ok(if report.covered() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

#[derive(Serialize)]
struct BoundsJson {
    n: usize,
    k: usize,
    lower: usize,
    upper_dim: usize,
    nishimoto_exact: Option<usize>,
    exact: Option<usize>,
}

impl From<LsBounds> for BoundsJson {
    fn from(b: LsBounds) -> Self {
        Self {
            n: b.n,
            k: b.k,
            lower: b.lower,
            upper_dim: b.upper_dim,
            nishimoto_exact: b.nishimoto_exact,
            exact: b.exact(),
        }
    }
}

fn bounds(nk: Option<(usize, usize)>, cfg: &RunConfig) -> Result<u8, CliError> {
    let pairs = match nk {
        Some(pair) => vec![pair],
        None => {
            let mut v = vec![(3, 2), (4, 3)];
            v.extend((1..=5).map(|k| (2 * k, k)));
            v
        }
    };
    let rows = pairs
        .into_iter()
        .map(|(n, k)| ls_bounds(n, k).map_err(library_error))
        .collect::<Result<Vec<_>, _>>()?;
    let show = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
    match cfg.output {
        OutputFormat::Json => {
            let rows: Vec<BoundsJson> = rows.into_iter().map(Into::into).collect();
            emit_json(&rows);
        }
        OutputFormat::Text => {
            println!(
                "{:>4} {:>4} {:>6} {:>10} {:>10} {:>6}",
                "n", "k", "lower", "upper_dim", "nishimoto", "cat"
            );
            for b in rows {
                println!(
                    "{:>4} {:>4} {:>6} {:>10} {:>10} {:>6}",
                    b.n,
                    b.k,
                    b.lower,
                    b.upper_dim,
                    show(b.nishimoto_exact),
                    show(b.exact())
                );
            }
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SampleSummary {
    path: String,
    count: usize,
    max_defect: f64,
}

fn sample(
    what: SampleKind,
    n: usize,
    k: Option<usize>,
    count: usize,
    out: Option<&Path>,
    cfg: &RunConfig,
) -> Result<u8, CliError> {
    if n == 0 || count == 0 {
        return Err(CliError::input("--n and --count must be at least 1"));
    }
    let mut rng = seeded_rng(cfg.seed);
    let mut max_defect = 0.0f64;
    let mut draw = || -> Result<QMatrix, CliError> {
        let m = match what {
            SampleKind::Sp => {
                let a = sample_sp(n, &mut rng);
                max_defect = max_defect.max((&a * &a.adjoint()).orthonormality_defect());
                a
            }
            SampleKind::Stiefel => {
                let k = k.ok_or_else(|| CliError::input("--k is required for stiefel"))?;
                let f = sample_stiefel(n, k, &mut rng).map_err(library_error)?;
                max_defect = max_defect.max(f.defect());
                f.stacked()
            }
        };
        Ok(m)
    };
    let files = (0..count)
        .map(|_| draw().map(|m| MatrixFile::from_matrix(&m)))
        .collect::<Result<Vec<_>, _>>()?;
    let body = if count == 1 {
        serde_json::to_string_pretty(&files[0])
    } else {
        serde_json::to_string_pretty(&files)
    }
    .expect("finite samples");
    match out {
        Some(path) => {
            fs::write(path, body + "\n")
                .map_err(|e| CliError::failure(format!("{}: {e}", path.display())))?;
            match cfg.output {
                OutputFormat::Json => emit_json(&SampleSummary {
                    path: path.display().to_string(),
                    count,
                    max_defect,
                }),
                OutputFormat::Text => {
                    println!("wrote {count} sample(s) to {}", path.display());
                    println!("max orthonormality defect: {max_defect:e}");
                }
            }
        }
        None => {
            println!("{body}");
            eprintln!("max orthonormality defect: {max_defect:e}");
        }
    }
    Ok(EXIT_OK)
}
