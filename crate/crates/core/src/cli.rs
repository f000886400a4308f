//! Command-line front end.
//!
//! Artifact commands (`cartan build`, `cartan assemble`, `hurwitz family`,
//! `hurwitz split`, `spheremap hopf`) always write JSON to stdout (or
//! `--out`), so they pipe straight into the matching `verify` command; their
//! human summary goes to stderr and is suppressed by `--json`. Report
//! commands print a human rendering by default and JSON with `--json`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use crate::cartan::{
    assemble_cubic, build_cartan, build_f0, congruence_check, feasibility_scan, verify_eiconal,
    verify_harmonic, CubicData,
};
use crate::cdalgebra::{table, verify_norm_composition, DIMS};
use crate::error::Error;
use crate::hurwitz::{
    build_hr_family, build_symmetric_family, composition_from_family, rho, rho_symm,
    split_symmetric_family, verify_hme, FamilyFile, HurwitzFamily, Violation,
};
use crate::matrix::ScalarMatrix;
use crate::poly::Polynomial;
use crate::recognize::{
    classify, tolerances, ClassifyOptions, CubicClass, FloatCubic, FloatCubicFile,
};
use crate::spheremap::{hopf_map, hurwitz_report, sigma, verify_spheremap, QuadraticSphereMap};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// An exact verification came out false.
    pub const FAILED: i32 = 1;
    pub const NOT_EICONAL: i32 = 2;
    pub const INDETERMINATE: i32 = 3;
    pub const USAGE: i32 = 64;
    /// Input parsed as JSON but is not a valid object of the expected kind.
    pub const DATA: i32 = 65;
    pub const IO: i32 = 66;
}

#[derive(Parser, Debug)]
#[command(
    name = "eiconal",
    version,
    about = "Exact construction and numeric recognition of eiconal cubics"
)]
struct Cli {
    /// Machine-readable JSON output only
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cartan cubics, the reducible family, assembly and the dimension scan
    #[command(subcommand)]
    Cartan(CartanCmd),
    /// Hurwitz-Radon numbers and Hurwitz matrix families
    #[command(subcommand)]
    Hurwitz(HurwitzCmd),
    /// Quadratic sphere maps
    #[command(subcommand)]
    Spheremap(SphereCmd),
    /// Classify a floating-point cubic up to rotation
    Recognize(RecognizeArgs),
    /// Cayley-Dickson algebras of dimension 1, 2, 4, 8
    #[command(subcommand)]
    Algebra(AlgebraCmd),
}

#[derive(Args, Debug)]
struct OutArg {
    /// Write the JSON artifact to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InArg {
    /// Input JSON file (stdin when omitted)
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CartanCmd {
    /// Build f_d (d = 1, 2, 4, 8) or the reducible cubic f_0 (d = 0, needs --n)
    Build {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Exact eiconal and harmonicity check of a polynomial
    Verify(InArg),
    /// Assemble the normal-form cubic from (p, q) and a Hopf sphere map
    Assemble {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        /// Algebra dimension of the Hopf map (required when p > 0)
        #[arg(long)]
        hopf: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// All admissible (p, q) with q >= 2 and p <= pmax
    Scan {
        #[arg(long)]
        pmax: u64,
    },
    /// Check f(Mx) = g(x) exactly for an orthogonal M
    Congruent {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        /// Matrix JSON (row-major grid of scalars)
        #[arg(long)]
        m: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum HurwitzCmd {
    /// Hurwitz-Radon number rho(m)
    Rho {
        #[arg(long)]
        m: u64,
    },
    /// Maximal symmetric family size 1 + rho(m/2)
    RhoSymm {
        #[arg(long)]
        m: u64,
    },
    /// Build a Hurwitz family of m x m matrices
    Family {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        symmetric: bool,
        /// Family size (defaults to the maximum)
        #[arg(long)]
        r: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Check a family file against the Hurwitz equations
    Verify(InArg),
    /// Split a symmetric family into a general family of half size
    Split {
        #[command(flatten)]
        input: InArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Check the composition formula built from a family
    Composition(InArg),
}

#[derive(Subcommand, Debug)]
enum SphereCmd {
    /// Hopf map S^(2d-1) -> S^d over the algebra of dimension d
    Hopf {
        #[arg(long)]
        d: usize,
        /// Also verify the map exactly (report on stderr)
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Yiu's sigma(k)
    Sigma {
        #[arg(long)]
        k: u64,
    },
    /// Exact verification of a sphere-map file
    Verify(InArg),
}

#[derive(Subcommand, Debug)]
enum AlgebraCmd {
    /// Multiplication table e_i e_j = sign e_k
    Table {
        #[arg(long)]
        dim: usize,
    },
    /// Exact check of |xy|^2 = |x|^2 |y|^2
    NormCheck {
        /// Only this dimension (all of 1, 2, 4, 8 by default)
        #[arg(long)]
        dim: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct RecognizeArgs {
    #[command(flatten)]
    input: InArg,
    /// Sets all three tolerances at once
    #[arg(long)]
    tol: Option<f64>,
    /// Tolerance of the eiconal sampling test
    #[arg(long)]
    eiconal_tol: Option<f64>,
    /// Tolerance of the eigenvalue clustering at 1/2 and -1
    #[arg(long)]
    eigen_tol: Option<f64>,
    /// Tolerance for the vanishing B components and the Hurwitz residual
    #[arg(long)]
    b_tol: Option<f64>,
    #[arg(long, default_value_t = tolerances::RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = tolerances::SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => exit::USAGE,
            Failure::Data(_) => exit::DATA,
            Failure::Io(_) => exit::IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Io(m) => m,
        }
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn data(e: Error) -> Failure {
    Failure::Data(e.to_string())
}

type Outcome = std::result::Result<i32, Failure>;

struct Ctx<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    json: bool,
}

impl Ctx<'_> {
    fn read_text(&mut self, path: Option<&Path>) -> std::result::Result<String, Failure> {
        match path {
            Some(p) => fs::read_to_string(p)
                .map_err(|e| Failure::Io(format!("cannot read {}: {e}", p.display()))),
            None => {
                let mut s = String::new();
                self.stdin
                    .read_to_string(&mut s)
                    .map_err(|e| Failure::Io(format!("cannot read stdin: {e}")))?;
                Ok(s)
            }
        }
    }

    fn read_json<T: DeserializeOwned>(
        &mut self,
        path: Option<&Path>,
    ) -> std::result::Result<T, Failure> {
        let text = self.read_text(path)?;
        serde_json::from_str(&text).map_err(|e| Failure::Data(format!("invalid input: {e}")))
    }

    fn say(&mut self, text: impl AsRef<str>) -> std::result::Result<(), Failure> {
        writeln!(self.out, "{}", text.as_ref()).map_err(|e| Failure::Io(e.to_string()))
    }

    fn note(&mut self, text: impl AsRef<str>) -> std::result::Result<(), Failure> {
        if self.json {
            return Ok(());
        }
        writeln!(self.err, "{}", text.as_ref()).map_err(|e| Failure::Io(e.to_string()))
    }

    fn emit_json<T: Serialize + ?Sized>(&mut self, value: &T) -> std::result::Result<(), Failure> {
        let text = serde_json::to_string(value).map_err(|e| Failure::Data(e.to_string()))?;
        self.say(text)
    }

    fn artifact<T: Serialize>(
        &mut self,
        value: &T,
        out: &OutArg,
    ) -> std::result::Result<(), Failure> {
        match &out.out {
            Some(path) => {
                let text =
                    serde_json::to_string(value).map_err(|e| Failure::Data(e.to_string()))?;
                fs::write(path, text + "\n")
                    .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
            }
            None => self.emit_json(value),
        }
    }
}

/// Runs the CLI on the process's standard streams and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdin = io::stdin();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(
        args,
        &mut stdin.lock(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    )
}

/// [`run`] with explicit streams. `args` includes the program name.
pub fn run_with<I, T>(
    args: I,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{}", e.render());
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        exit::USAGE
                    } else {
                        exit::OK
                    }
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    exit::USAGE
                }
            };
        }
    };
    let mut ctx = Ctx {
        stdin,
        out,
        err,
        json: cli.json,
    };
    let outcome = match cli.command {
        Command::Cartan(c) => cartan(&mut ctx, c),
        Command::Hurwitz(c) => hurwitz(&mut ctx, c),
        Command::Spheremap(c) => spheremap(&mut ctx, c),
        Command::Recognize(a) => recognize(&mut ctx, a),
        Command::Algebra(c) => algebra(&mut ctx, c),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(ctx.err, "error: {}", f.message());
            f.code()
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn pass(ok: bool) -> i32 {
    if ok {
        exit::OK
    } else {
        exit::FAILED
    }
}

fn cartan(ctx: &mut Ctx, cmd: CartanCmd) -> Outcome {
    match cmd {
        CartanCmd::Build { d, n, out } => {
            let f = match (d, n) {
                (0, None) => return Err(Failure::Usage("--d 0 selects f_0 and needs --n".into())),
                (0, Some(n)) => build_f0(n).map_err(usage)?,
                (d, n) => {
                    let f = build_cartan(d).map_err(usage)?;
                    if let Some(n) = n.filter(|&n| n != f.nvars()) {
                        return Err(Failure::Usage(format!(
                            "f_{d} lives in {} variables, not {n}",
                            f.nvars()
                        )));
                    }
                    f
                }
            };
            ctx.artifact(&f, &out)?;
            ctx.note(format!(
                "f_{d} in {} variables, {} terms:",
                f.nvars(),
                f.num_terms()
            ))?;
            ctx.note(f.to_string())?;
            Ok(exit::OK)
        }
        CartanCmd::Verify(input) => {
            let f: Polynomial = ctx.read_json(input.input.as_deref())?;
            let report = verify_eiconal(&f).map_err(data)?;
            let laplacian = f.laplacian();
            let harmonic = verify_harmonic(&f);
            if ctx.json {
                ctx.emit_json(&json!({
                    "n": f.nvars(),
                    "eiconal": report.ok,
                    "eiconal_residual": report.residual,
                    "harmonic": harmonic,
                    "laplacian": laplacian,
                }))?;
            } else {
                let residual = if report.ok {
                    "0 (exact)".to_string()
                } else {
                    format!("nonzero ({} terms)", report.residual.num_terms())
                };
                let harmonic_text = if harmonic {
                    "yes".to_string()
                } else {
                    format!("no (Δf = {laplacian})")
                };
                ctx.say(format!(
                    "eiconal residual: {residual}; harmonic: {harmonic_text}"
                ))?;
            }
            Ok(pass(report.ok))
        }
        CartanCmd::Assemble { p, q, hopf, out } => {
            let cubic = if p == 0 {
                if hopf.is_some() {
                    return Err(Failure::Usage("--hopf needs p > 0".into()));
                }
                CubicData::reducible(q).map_err(usage)?
            } else {
                let d = hopf.ok_or_else(|| {
                    Failure::Usage("p > 0 needs a sphere map: pass --hopf D".into())
                })?;
                let map = hopf_map(d).map_err(usage)?;
                if (map.p(), map.q()) != (p, q) {
                    return Err(Failure::Usage(format!(
                        "the Hopf map for d = {d} has (p, q) = ({}, {}), not ({p}, {q})",
                        map.p(),
                        map.q()
                    )));
                }
                CubicData::from_map(map).map_err(usage)?
            };
            let f = assemble_cubic(&cubic).map_err(usage)?;
            ctx.artifact(&f, &out)?;
            ctx.note(format!(
                "assembled cubic with (p, q) = ({p}, {q}) in {} variables, {} terms",
                f.nvars(),
                f.num_terms()
            ))?;
            Ok(exit::OK)
        }
        CartanCmd::Scan { pmax } => {
            let rows = feasibility_scan(pmax).map_err(usage)?;
            if ctx.json {
                ctx.emit_json(&rows)?;
            } else {
                ctx.say(format!("{:>3} {:>6} {:>6} {:>6}", "nu", "p", "q", "n"))?;
                for r in &rows {
                    ctx.say(format!("{:>3} {:>6} {:>6} {:>6}", r.nu, r.p, r.q, r.n))?;
                }
            }
            Ok(exit::OK)
        }
        CartanCmd::Congruent { f, g, m } => {
            let f: Polynomial = ctx.read_json(Some(&f))?;
            let g: Polynomial = ctx.read_json(Some(&g))?;
            let m: ScalarMatrix = ctx.read_json(Some(&m))?;
            let ok = congruence_check(&f, &g, &m).map_err(data)?;
            if ctx.json {
                ctx.emit_json(&json!({ "congruent": ok }))?;
            } else {
                ctx.say(format!("congruent: {}", yes_no(ok)))?;
            }
            Ok(pass(ok))
        }
    }
}

fn violation_text(v: &Violation) -> String {
    match v {
        Violation::Orthogonality { i } => format!("A{}ᵀA{} ≠ 1", i + 1, i + 1),
        Violation::Anticommutation { i, j } => {
            format!("A{}ᵀA{} + A{}ᵀA{} ≠ 0", i + 1, j + 1, j + 1, i + 1)
        }
        Violation::Shape { i } => format!("A{} has the wrong shape", i + 1),
        Violation::Asymmetric { i } => format!("A{} is not symmetric", i + 1),
    }
}

fn family_summary(fam: &HurwitzFamily) -> String {
    format!(
        "[r, s, m] = [{}, {}, {}]{}; trace-free: {}",
        fam.r(),
        fam.s(),
        fam.m(),
        if fam.is_symmetric() {
            ", symmetric"
        } else {
            ""
        },
        yes_no(fam.is_trace_free())
    )
}

fn hurwitz(ctx: &mut Ctx, cmd: HurwitzCmd) -> Outcome {
    match cmd {
        HurwitzCmd::Rho { m } => {
            let v = rho(m).map_err(usage)?;
            if ctx.json {
                ctx.emit_json(&json!({ "m": m, "rho": v }))?;
            } else {
                ctx.say(v.to_string())?;
            }
            Ok(exit::OK)
        }
        HurwitzCmd::RhoSymm { m } => {
            let v = rho_symm(m).map_err(usage)?;
            if ctx.json {
                ctx.emit_json(&json!({ "m": m, "rho_symm": v }))?;
            } else {
                ctx.say(v.to_string())?;
            }
            Ok(exit::OK)
        }
        HurwitzCmd::Family {
            m,
            symmetric,
            r,
            out,
        } => {
            let max = if symmetric {
                rho_symm(m as u64)
            } else {
                rho(m as u64)
            }
            .map_err(usage)?;
            let r = r.unwrap_or(max as usize);
            let fam = if symmetric {
                build_symmetric_family(m, r)
            } else {
                build_hr_family(m, r)
            }
            .map_err(usage)?;
            ctx.artifact(&fam, &out)?;
            let summary = family_summary(&fam);
            ctx.note(summary)?;
            Ok(exit::OK)
        }
        HurwitzCmd::Verify(input) => {
            let file: FamilyFile = ctx.read_json(input.input.as_deref())?;
            file.check_header().map_err(data)?;
            let mut report = verify_hme(&file.matrices);
            if file.symmetric {
                for (i, a) in file.matrices.iter().enumerate() {
                    if !a.is_symmetric() {
                        report.violations.push(Violation::Asymmetric { i });
                    }
                }
                report.ok = report.violations.is_empty();
            }
            if ctx.json {
                ctx.emit_json(&report)?;
            } else if report.ok {
                ctx.say(format!(
                    "HME: ok for [r, s, m] = [{}, {}, {}]",
                    file.r, file.s, file.m
                ))?;
            } else {
                ctx.say(format!("HME: {} violation(s)", report.violations.len()))?;
                for v in &report.violations {
                    ctx.say(format!("  {}", violation_text(v)))?;
                }
            }
            Ok(pass(report.ok))
        }
        HurwitzCmd::Split { input, out } => {
            let fam: HurwitzFamily = ctx.read_json(input.input.as_deref())?;
            let split = split_symmetric_family(&fam).map_err(data)?;
            ctx.artifact(&split, &out)?;
            let summary = family_summary(&split);
            ctx.note(summary)?;
            Ok(exit::OK)
        }
        HurwitzCmd::Composition(input) => {
            let fam: HurwitzFamily = ctx.read_json(input.input.as_deref())?;
            let ok = composition_from_family(&fam).map_err(data)?;
            if ctx.json {
                ctx.emit_json(
                    &json!({ "r": fam.r(), "s": fam.s(), "m": fam.m(), "composition": ok }),
                )?;
            } else {
                ctx.say(format!(
                    "composition formula of size [{}, {}, {}]: {}",
                    fam.r(),
                    fam.s(),
                    fam.m(),
                    if ok { "holds" } else { "fails" }
                ))?;
            }
            Ok(pass(ok))
        }
    }
}

fn map_report(ctx: &mut Ctx, map: &QuadraticSphereMap) -> std::result::Result<bool, Failure> {
    let report = verify_spheremap(map).map_err(data)?;
    let hme = hurwitz_report(map);
    let ok = report.ok && hme.ok;
    let text = format!(
        "sphere map S^{} -> S^{}: identities {}; HME: {}",
        map.p() - 1,
        map.q() - 1,
        if report.ok { "exact" } else { "fail" },
        if hme.ok { "ok" } else { "fail" }
    );
    Ok(if ctx.json {
        ctx.emit_json(&json!({
            "p": map.p(),
            "q": map.q(),
            "identities": report.ok,
            "hme": hme.ok,
            "failing_pairs": report.gradient_residuals.iter().map(|(i, j, _)| [i, j]).collect::<Vec<_>>(),
        }))?;
        ok
    } else {
        ctx.say(text)?;
        ok
    })
}

fn spheremap(ctx: &mut Ctx, cmd: SphereCmd) -> Outcome {
    match cmd {
        SphereCmd::Hopf { d, verify, out } => {
            let map = hopf_map(d).map_err(usage)?;
            ctx.artifact(&map, &out)?;
            ctx.note(format!("Hopf map S^{} -> S^{d}", 2 * d - 1))?;
            if verify {
                let report = verify_spheremap(&map).map_err(data)?;
                let hme = hurwitz_report(&map);
                let ok = report.ok && hme.ok;
                writeln!(
                    ctx.err,
                    "identities {}; HME: {}",
                    if report.ok { "exact" } else { "fail" },
                    if hme.ok { "ok" } else { "fail" }
                )
                .map_err(|e| Failure::Io(e.to_string()))?;
                return Ok(pass(ok));
            }
            Ok(exit::OK)
        }
        SphereCmd::Sigma { k } => {
            let v = sigma(k).map_err(usage)?;
            if ctx.json {
                ctx.emit_json(&json!({ "k": k, "sigma": v }))?;
            } else {
                ctx.say(v.to_string())?;
            }
            Ok(exit::OK)
        }
        SphereCmd::Verify(input) => {
            let map: QuadraticSphereMap = ctx.read_json(input.input.as_deref())?;
            let ok = map_report(ctx, &map)?;
            Ok(pass(ok))
        }
    }
}

fn parse_cubic(text: &str) -> std::result::Result<FloatCubic, Failure> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Failure::Data(format!("invalid input: {e}")))?;
    let exact = value
        .get("terms")
        .and_then(|t| t.get(0))
        .is_some_and(|t| t.get("exp").is_some());
    if exact {
        let f: Polynomial = serde_json::from_value(value)
            .map_err(|e| Failure::Data(format!("invalid polynomial: {e}")))?;
        FloatCubic::from_polynomial(&f).map_err(data)
    } else {
        let file: FloatCubicFile = serde_json::from_value(value)
            .map_err(|e| Failure::Data(format!("invalid cubic: {e}")))?;
        FloatCubic::try_from(file).map_err(data)
    }
}

fn recognize(ctx: &mut Ctx, args: RecognizeArgs) -> Outcome {
    let mut opts = match args.tol {
        Some(t) => ClassifyOptions::with_tol(t),
        None => ClassifyOptions::default(),
    };
    if let Some(t) = args.eiconal_tol {
        opts.eiconal_tol = t;
    }
    if let Some(t) = args.eigen_tol {
        opts.eigen_tol = t;
    }
    if let Some(t) = args.b_tol {
        opts.b_tol = t;
    }
    for t in [opts.eiconal_tol, opts.eigen_tol, opts.b_tol] {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::Usage("tolerances must be positive".into()));
        }
    }
    if args.restarts == 0 || args.samples == 0 {
        return Err(Failure::Usage(
            "--restarts and --samples must be >= 1".into(),
        ));
    }
    opts.restarts = args.restarts;
    opts.samples = args.samples;
    opts.seed = args.seed;

    let text = ctx.read_text(args.input.input.as_deref())?;
    let f = parse_cubic(&text)?;
    let report = classify(&f, &opts);
    if ctx.json {
        ctx.emit_json(&report)?;
    } else {
        ctx.say(format!("class: {}", report.class))?;
        if !matches!(report.class, CubicClass::NotEiconal) {
            ctx.say(format!("p = {}, q = {}", report.p, report.q))?;
        }
        if !report.eigenvalues.is_empty() {
            let eig: Vec<String> = report
                .eigenvalues
                .iter()
                .map(|e| format!("{e:.9}"))
                .collect();
            ctx.say(format!("eigenvalues of A: {}", eig.join(", ")))?;
        }
        for (name, value) in &report.residuals {
            ctx.say(format!("{name} residual: {value:.3e}"))?;
        }
        for note in &report.notes {
            ctx.say(format!("note: {note}"))?;
        }
    }
    Ok(match report.class {
        CubicClass::Cartan(_) | CubicClass::F0Reducible => exit::OK,
        CubicClass::NotEiconal => exit::NOT_EICONAL,
        CubicClass::Indeterminate => exit::INDETERMINATE,
    })
}

fn algebra(ctx: &mut Ctx, cmd: AlgebraCmd) -> Outcome {
    match cmd {
        AlgebraCmd::Table { dim } => {
            let t = table(dim).map_err(usage)?;
            if ctx.json {
                ctx.emit_json(&t.to_json())?;
            } else {
                for i in 0..dim {
                    let row: Vec<String> = (0..dim)
                        .map(|j| {
                            let (k, sign) = t.product(i, j);
                            format!("{}e{k}", if sign < 0 { "-" } else { "+" })
                        })
                        .collect();
                    ctx.say(row.join(" "))?;
                }
            }
            Ok(exit::OK)
        }
        AlgebraCmd::NormCheck { dim } => {
            let dims: Vec<usize> = match dim {
                Some(d) => vec![d],
                None => DIMS.to_vec(),
            };
            let mut all = true;
            let mut results = Vec::new();
            for d in dims {
                let ok = verify_norm_composition(d).map_err(usage)?;
                all &= ok;
                results.push(json!({ "dim": d, "ok": ok }));
                if !ctx.json {
                    ctx.say(format!(
                        "dim {d}: |xy|² = |x|²|y|² {}",
                        if ok { "holds" } else { "fails" }
                    ))?;
                }
            }
            if ctx.json {
                ctx.emit_json(&results)?;
            }
            Ok(pass(all))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut input = stdin.as_bytes();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("eiconal").chain(args.iter().copied());
        let code = run_with(argv, &mut input, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn rho_prints_value() {
        assert_eq!(
            call(&["hurwitz", "rho", "--m", "16"], ""),
            (0, "9\n".into(), String::new())
        );
    }

    #[test]
    fn build_pipes_into_verify() {
        let (code, poly, _) = call(&["cartan", "build", "--d", "2"], "");
        assert_eq!(code, 0);
        let (code, report, _) = call(&["cartan", "verify"], &poly);
        assert_eq!(code, 0);
        assert_eq!(report.trim(), "eiconal residual: 0 (exact); harmonic: yes");
    }

    #[test]
    fn reducible_is_not_harmonic() {
        let (_, poly, _) = call(&["cartan", "build", "--d", "0", "--n", "3"], "");
        let (code, report, _) = call(&["cartan", "verify"], &poly);
        assert_eq!(code, 0);
        assert!(report.starts_with("eiconal residual: 0 (exact); harmonic: no"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["cartan", "build", "--d", "0"], "").0, exit::USAGE);
        assert_eq!(call(&["cartan", "build", "--d", "3"], "").0, exit::USAGE);
        assert_eq!(call(&["cartan", "frobnicate"], "").0, exit::USAGE);
        assert_eq!(
            call(&["cartan", "assemble", "--p", "4", "--q", "3"], "").0,
            exit::USAGE
        );
    }

    #[test]
    fn io_and_data_errors() {
        let missing = call(&["cartan", "verify", "--in", "/nonexistent/poly.json"], "");
        assert_eq!(missing.0, exit::IO);
        assert_eq!(call(&["cartan", "verify"], "{not json").0, exit::DATA);
    }

    #[test]
    fn help_lists_subcommands() {
        let (code, out, _) = call(&["--help"], "");
        assert_eq!(code, 0);
        for name in ["cartan", "hurwitz", "spheremap", "recognize", "algebra"] {
            assert!(out.contains(name), "{name} missing from help");
        }
    }

    #[test]
    fn recognize_exit_codes() {
        let cubes = r#"{"n":2,"terms":[{"ijk":[1,1,1],"c":1.0},{"ijk":[2,2,2],"c":1.0}]}"#;
        assert_eq!(call(&["recognize"], cubes).0, exit::NOT_EICONAL);
        let f0 = r#"{"n":2,"terms":[{"ijk":[1,1,2],"c":-3.0},{"ijk":[2,2,2],"c":1.0}]}"#;
        let (code, out, _) = call(&["recognize", "--json"], f0);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["class"], "f0_reducible");
    }
}
