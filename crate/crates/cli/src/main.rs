//! `qwalk`: batch front end for the state-transfer toolkit.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qwalk::family::{Family, FamilySpec};
use qwalk::linalg::{spectral_decomposition, HermitianMatrix, SpectralDecomposition};
use qwalk::star::{classify_star_m, write_csv};
use qwalk::transfer::{
    align_exact_spectrum, certify_pgst_from_quarrels, certify_pgst_looped_path, certify_pst,
    eigenvalue_support, fidelity_sweep, fmt17, recognize_exact_values, strong_cospectrality,
    QuarrelSet, TransferConfig, TransferVerdict, VerdictKind,
};
use qwalk::upst::{search_upst, write_json_lines};
use qwalk::verify;

#[derive(Parser)]
#[command(name = "qwalk", version, about = "State transfer in continuous-time quantum walks on Hermitian graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a family and write its matrix as JSON.
    Construct {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectrum, vertex supports, strongly cospectral pairs and quarrels.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact or numeric perfect state transfer verdict.
    PstCheck(PairArgs),
    /// Exact pretty good state transfer verdict.
    PgstCheck(PairArgs),
    /// Fidelity `|U(t)_{to,from}|` on a uniform grid, as CSV.
    Sweep {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long = "t-max", default_value_t = 100.0)]
        t_max: f64,
        #[arg(long, default_value_t = 100_001)]
        steps: usize,
    },
    /// UPST case analysis on `n` vertices, as JSON lines.
    SearchUpst {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Star-product PGST table for `m` or a range `a..b` (inclusive).
    ClassifyStar {
        #[arg(long, value_parser = parse_range)]
        m: (u64, u64),
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every acceptance check and report one line each.
    VerifyPaper {
        /// Only this criterion.
        #[arg(long)]
        criterion: Option<u8>,
    },
}

#[derive(Args)]
struct Input {
    /// Short name (`star:6`), JSON text, or a path to a JSON file.
    #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
    family: Option<String>,
    /// Matrix JSON (`{"dim", "re", "im"}`).
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Eigenvalue clustering tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args)]
struct PairArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    from: usize,
    #[arg(long)]
    to: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit 2 for bad flags or inputs, 1 when an analysis cannot finish.
enum Failure {
    Usage(String),
    Analysis(String),
}

impl Failure {
    fn analysis(e: impl std::fmt::Display) -> Self {
        Failure::Analysis(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Analysis(e.to_string())
    }
}

type Res<T> = Result<T, Failure>;

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let num = |x: &str| x.trim().parse::<u64>().map_err(|_| format!("bad integer {x:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let m = num(s)?;
            (m, m)
        }
    };
    if lo == 0 || hi < lo {
        return Err(format!("range {s:?} must satisfy 1 ≤ a ≤ b"));
    }
    Ok((lo, hi))
}

fn sink(out: &Option<PathBuf>) -> Res<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(out: &Option<PathBuf>, v: &impl serde::Serialize) -> Res<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(Failure::analysis)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

struct Loaded {
    family: Option<Family>,
    matrix: HermitianMatrix,
    dec: SpectralDecomposition,
}

impl Input {
    fn family(&self) -> Res<Option<Family>> {
        let Some(f) = &self.family else {
            return Ok(None);
        };
        let text = if !f.trim_start().starts_with('{') && Path::new(f).is_file() {
            std::fs::read_to_string(f).map_err(|e| Failure::Usage(format!("{f}: {e}")))?
        } else {
            f.clone()
        };
        let spec: FamilySpec = text.parse().map_err(|e| Failure::Usage(format!("{e}")))?;
        spec.build().map(Some).map_err(|e| Failure::Usage(e.to_string()))
    }

    fn load(&self) -> Res<Loaded> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Failure::Usage("--tol must be positive".into()));
        }
        let family = self.family()?;
        let matrix = match (&family, &self.matrix) {
            (Some(f), _) => f.matrix.clone(),
            (None, Some(p)) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?
            }
            (None, None) => return Err(Failure::Usage("one of --family or --matrix is required".into())),
        };
        let dec = spectral_decomposition(&matrix, self.tol).map_err(Failure::analysis)?;
        Ok(Loaded { family, matrix, dec })
    }
}

impl Loaded {
    /// Exact eigenvalues in decomposition order, from the family's closed
    /// form or by recognition.
    fn exact(&self) -> Option<Vec<qwalk::number::Surd>> {
        match self.family.as_ref().and_then(|f| f.exact.as_ref()) {
            Some(vals) => align_exact_spectrum(&self.dec, vals, 1e-7).ok(),
            None => recognize_exact_values(self.dec.eigenvalues(), 1e-9),
        }
    }

    fn check_pair(&self, a: usize, b: usize) -> Res<()> {
        let n = self.matrix.dim();
        if a >= n || b >= n {
            return Err(Failure::Usage(format!("vertices must be below {n}, got {a} and {b}")));
        }
        if a == b {
            return Err(Failure::Usage("--from and --to must differ".into()));
        }
        Ok(())
    }
}

fn absent(note: String) -> TransferVerdict {
    TransferVerdict {
        kind: VerdictKind::AbsentCertified,
        time: None,
        phase: None,
        fidelity: None,
        witness: None,
        notes: vec![note],
    }
}

fn quarrels_or_verdict(l: &Loaded, a: usize, b: usize, cfg: &TransferConfig) -> Result<QuarrelSet, Box<TransferVerdict>> {
    strong_cospectrality(&l.dec, a, b, cfg)
        .map_err(|e| Box::new(absent(format!("{a} and {b} are not strongly cospectral: {e}"))))
}

fn pst_check(p: &PairArgs) -> Res<()> {
    let l = p.input.load()?;
    l.check_pair(p.from, p.to)?;
    let cfg = TransferConfig::default();
    let verdict = match quarrels_or_verdict(&l, p.from, p.to, &cfg) {
        Err(v) => *v,
        Ok(q) => {
            let exact = l.exact();
            certify_pst(&l.dec, &q, exact.as_deref(), &cfg).map_err(Failure::analysis)?
        }
    };
    write_json(&p.out, &verdict)
}

fn pgst_check(p: &PairArgs) -> Res<()> {
    let l = p.input.load()?;
    l.check_pair(p.from, p.to)?;
    let cfg = TransferConfig::default();
    let q = match quarrels_or_verdict(&l, p.from, p.to, &cfg) {
        Err(v) => return write_json(&p.out, &v),
        Ok(q) => q,
    };
    let looped = l.family.as_ref().and_then(|f| f.looped.as_ref());
    let verdict = if let Some(info) = looped {
        let support: Option<Vec<_>> = q
            .quarrels
            .iter()
            .map(|qr| qr.turns.clone().map(|u| (info.product.label(qr.eigenvalue).0, u)))
            .collect();
        match support {
            Some(s) => certify_pgst_looped_path(&info.theta, &info.gamma, &s),
            None => return Err(Failure::Analysis("quarrels are not rational in turns".into())),
        }
    } else {
        let Some(exact) = l.exact() else {
            return Err(Failure::Analysis(
                "eigenvalues were not recognized in closed form; use pst-check or sweep for numeric evidence".into(),
            ));
        };
        let values: Vec<_> = q.quarrels.iter().map(|qr| exact[qr.eigen_index].clone()).collect();
        certify_pgst_from_quarrels(&values, &q)
    };
    write_json(&p.out, &verdict)
}

fn analyze(input: &Input, out: &Option<PathBuf>) -> Res<()> {
    let l = input.load()?;
    let cfg = TransferConfig::default();
    let n = l.matrix.dim();
    let exact = l.exact();
    let spectrum: Vec<Value> = l
        .dec
        .eigenvalues()
        .iter()
        .zip(l.dec.multiplicities())
        .enumerate()
        .map(|(r, (&v, &mult))| {
            let mut e = json!({ "index": r, "value": fmt17(v), "multiplicity": mult });
            if let Some(x) = &exact {
                e["exact"] = json!(x[r].to_string());
            }
            e
        })
        .collect();
    let supports = (0..n)
        .map(|v| {
            let s = eigenvalue_support(&l.dec, v, cfg.support_tol).map_err(Failure::analysis)?;
            Ok(json!({ "vertex": v, "support": s }))
        })
        .collect::<Res<Vec<Value>>>()?;
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if let Ok(q) = strong_cospectrality(&l.dec, a, b, &cfg) {
                pairs.push(q);
            }
        }
    }
    let mut report = json!({
        "dim": n,
        "spectrum": spectrum,
        "supports": supports,
        "strongly_cospectral": pairs,
    });
    if let Some(f) = &l.family {
        report["family"] = json!(f.name);
        if !f.notes.is_empty() {
            report["notes"] = json!(f.notes);
        }
    }
    write_json(out, &report)
}

fn sweep(p: &PairArgs, t_max: f64, steps: usize) -> Res<()> {
    if !t_max.is_finite() || t_max <= 0.0 {
        return Err(Failure::Usage("--t-max must be positive".into()));
    }
    if steps < 2 {
        return Err(Failure::Usage("--steps must be at least 2".into()));
    }
    let l = p.input.load()?;
    l.check_pair(p.from, p.to)?;
    let s = fidelity_sweep(&l.dec, p.from, p.to, t_max, steps);
    let mut w = sink(&p.out)?;
    s.write_csv(&mut w)?;
    w.flush()?;
    eprintln!("best fidelity {} at t = {}", fmt17(s.best_fidelity), fmt17(s.best_time));
    Ok(())
}

fn verify_paper(criterion: Option<u8>) -> Res<bool> {
    let reports = match criterion {
        Some(id) if verify::CRITERIA.contains(&id) => vec![verify::run(id)],
        Some(id) => return Err(Failure::Usage(format!("no criterion {id}; expected 1 to 9"))),
        None => verify::run_all(),
    };
    for r in &reports {
        println!("{}", r.line());
    }
    for r in &reports {
        println!("\n{}", r.details());
    }
    Ok(reports.iter().all(|r| r.passed()))
}

fn configure_threads() -> Res<()> {
    let Ok(v) = std::env::var("QWALK_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("QWALK_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(Failure::analysis)
}

fn run(cli: Cli) -> Res<bool> {
    configure_threads()?;
    match cli.command {
        Command::Construct { input, out } => {
            let l = input.load()?;
            write_json(&out, l.matrix.matrix())?;
        }
        Command::Analyze { input, out } => analyze(&input, &out)?,
        Command::PstCheck(p) => pst_check(&p)?,
        Command::PgstCheck(p) => pgst_check(&p)?,
        Command::Sweep { pair, t_max, steps } => sweep(&pair, t_max, steps)?,
        Command::SearchUpst { n, out } => {
            let reports = search_upst(n).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut w = sink(&out)?;
            write_json_lines(&reports, &mut w)?;
            w.flush()?;
        }
        Command::ClassifyStar { m: (lo, hi), out } => {
            let rows: Vec<_> = (lo..=hi).map(classify_star_m).collect();
            let mut w = sink(&out)?;
            write_csv(&rows, &mut w)?;
            w.flush()?;
        }
        Command::VerifyPaper { criterion } => return verify_paper(criterion),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Analysis(msg)) => {
            eprintln!("analysis failed: {msg}");
            ExitCode::from(1)
        }
    }
}
