//! Command-line frontend: instance generation, hull construction, oracle
//! verification, MIR cuts and the condition-Phi check.

pub mod format;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use disjhull::cuts::{aggregate, derive_reflected_simplex_cuts, mir};
use disjhull::families::{
    check_phi, common_matrix_hull, common_rhs, gen_hyperrect, gen_padded_reflected_simplex,
    gen_reflected_simplex, gen_rhs_perturbation, hyperrect_hull, hyperrect_matrix,
    padded_reflected_simplex_polytopes, reflected_simplex_hull, BoxBounds, PaddedRow,
};
use disjhull::polyops::{extreme_points, is_full_dimensional, remove_redundant_rows};
use disjhull::{
    compare, enumerate_facets, full_lifting_system, oracle_hull, DisjunctionInstance, Facet,
    FacetList, Provenance, RatVector, Rational, DEFAULT_ORACLE_CAP,
};
use format::{parse_rational, read_json, to_json, FacetFile, FamilyTag, InstanceFile, RatValue};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;

pub const ORACLE_CAP_VAR: &str = "DISJHULL_ORACLE_CAP";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] disjhull::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(disjhull::Error::Hypothesis(_)) => EXIT_HYPOTHESIS,
            _ => EXIT_INPUT,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "disjhull", version, about = "Exact convex hulls of polytope disjunctions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an instance file for one of the built-in families.
    Gen {
        #[command(subcommand)]
        family: Family,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Facets of the disjunction hull.
    Hull {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Signature)]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the signature, lifting-only and oracle hulls.
    Verify { instance: PathBuf },
    /// MIR cuts from aggregated liftings or the reflected-simplex recipes.
    Mir {
        instance: PathBuf,
        /// `idx:weight,...` with indices into the `hull --method lifting` list, from 0.
        #[arg(long, conflicts_with = "reflected_simplex", required_unless_present = "reflected_simplex")]
        combine: Option<String>,
        #[arg(long)]
        reflected_simplex: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Condition Phi for a common-matrix instance.
    CheckPhi { instance: PathBuf },
    /// Dimensions, vertex counts, redundancy and full-dimensionality.
    Info { instance: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum Family {
    /// Boxes; one `--bounds l,u[;l,u...]` value per polytope. Values that
    /// start with `-` need the `--bounds=-1,2` form.
    Hyperrect {
        #[arg(long, num_args = 1.., required = true)]
        bounds: Vec<String>,
    },
    /// Simplex `P_0` and its reflection `P_1`.
    ReflectedSimplex {
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// The padded reflected simplex in R^3, which fails condition Phi.
    PaddedSimplex {
        /// Use `(1, 0, 1)` as the first row, which leaves `P_0` empty.
        #[arg(long)]
        skewed_row: bool,
    },
    /// Right-hand-side perturbations of the first polytope of a base instance.
    Perturb {
        #[arg(long)]
        base: PathBuf,
        /// One comma-separated shift of `b` per extra polytope, as for `--bounds`.
        #[arg(long, num_args = 1.., required = true)]
        delta: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Signature,
    Lifting,
    ClosedForm,
    Oracle,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Signature => "signature",
            Method::Lifting => "lifting",
            Method::ClosedForm => "closed-form",
            Method::Oracle => "oracle",
        }
    }
}

/// What a command prints and how the process should exit.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            ..Outcome::default()
        }
    }

    fn with_code(mut self, code: i32) -> Self {
        self.code = code;
        self
    }
}

pub fn run(cli: Cli) -> Outcome {
    let res = match cli.command {
        Command::Gen { family, out } => cmd_gen(&family, out.as_deref()),
        Command::Hull {
            instance,
            method,
            out,
        } => cmd_hull(&instance, method, out.as_deref()),
        Command::Verify { instance } => cmd_verify(&instance),
        Command::Mir {
            instance,
            combine,
            reflected_simplex,
            out,
        } => cmd_mir(&instance, combine.as_deref(), reflected_simplex, out.as_deref()),
        Command::CheckPhi { instance } => cmd_check_phi(&instance),
        Command::Info { instance } => cmd_info(&instance),
    };
    res.unwrap_or_else(|e| Outcome {
        code: e.exit_code(),
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    })
}

pub fn oracle_cap() -> Result<u128> {
    match std::env::var(ORACLE_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{ORACLE_CAP_VAR} must be a nonnegative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_ORACLE_CAP),
    }
}

pub fn load_instance(path: &Path) -> Result<(InstanceFile, DisjunctionInstance)> {
    let file: InstanceFile = read_json(path)?;
    let inst = file.to_instance()?;
    Ok((file, inst))
}

fn write_or_print(out: Option<&Path>, json: String, summary: String) -> Result<Outcome> {
    match out {
        Some(path) => {
            std::fs::write(path, json)
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
            Ok(Outcome::ok(summary))
        }
        None => Ok(Outcome::ok(json)),
    }
}

pub fn summary(list: &FacetList) -> String {
    let counts = list
        .counts()
        .into_iter()
        .map(|(p, c)| format!("{p} {c}"))
        .collect::<Vec<_>>()
        .join(", ");
    format!("{} facets ({counts})", list.len())
}

fn parse_bounds(spec: &str) -> Result<BoxBounds> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for coord in spec.split(';') {
        let (l, u) = coord
            .split_once(',')
            .ok_or_else(|| CliError::Input(format!("expected l,u in bounds {spec:?}")))?;
        lo.push(parse_rational(l)?);
        hi.push(parse_rational(u)?);
    }
    Ok((lo.into(), hi.into()))
}

fn parse_vector(spec: &str) -> Result<RatVector> {
    spec.split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>>>()
        .map(RatVector::new)
}

pub fn cmd_gen(family: &Family, out: Option<&Path>) -> Result<Outcome> {
    let mut stderr = String::new();
    let file = match family {
        Family::Hyperrect { bounds } => {
            let bounds = bounds.iter().map(|s| parse_bounds(s)).collect::<Result<Vec<_>>>()?;
            InstanceFile::from_instance(&gen_hyperrect(&bounds)?, Some(FamilyTag::Hyperrect))
        }
        Family::ReflectedSimplex { d, a, b } => {
            let (ra, rb) = (parse_rational(a)?, parse_rational(b)?);
            let inst = gen_reflected_simplex(*d, &ra, &rb)?;
            let tag = FamilyTag::ReflectedSimplex {
                a: RatValue::from_rational(&ra),
                b: RatValue::from_rational(&rb),
            };
            InstanceFile::from_instance(&inst, Some(tag))
        }
        Family::PaddedSimplex { skewed_row } => {
            let tag = Some(FamilyTag::PaddedSimplex {
                skewed_row: *skewed_row,
            });
            if *skewed_row {
                stderr.push_str("warning: with first row (1, 0, 1) P0 is empty; the file is not a valid instance\n");
                InstanceFile::from_polytopes(&padded_reflected_simplex_polytopes(PaddedRow::Skewed), tag)
            } else {
                InstanceFile::from_instance(&gen_padded_reflected_simplex(PaddedRow::Shifted)?, tag)
            }
        }
        Family::Perturb { base, delta } => {
            let (_, inst) = load_instance(base)?;
            let deltas = delta.iter().map(|s| parse_vector(s)).collect::<Result<Vec<_>>>()?;
            let (inst, report) = gen_rhs_perturbation(inst.polytope(0), &deltas)?;
            if let Some(e) = report.witness_entry() {
                let tau: Vec<String> = e.partition.tau.iter().map(|i| (i + 1).to_string()).collect();
                return Ok(Outcome {
                    code: EXIT_HYPOTHESIS,
                    stdout: String::new(),
                    stderr: format!("condition Phi fails at tau=({}); no file written\n", tau.join(",")),
                });
            }
            InstanceFile::from_instance(&inst, Some(FamilyTag::RhsPerturbation))
        }
    };
    let summary = format!("d = {}, n = {}\n", file.d, file.n);
    let mut outcome = write_or_print(out, to_json(&file), summary)?;
    outcome.stderr = stderr;
    Ok(outcome)
}

/// Bounds of a box instance, if every polytope uses `[I; -I]`.
fn box_bounds(inst: &DisjunctionInstance) -> Option<Vec<BoxBounds>> {
    let d = inst.d();
    if inst.common_matrix()? != &hyperrect_matrix(d) {
        return None;
    }
    Some(
        inst.polytopes()
            .iter()
            .map(|p| {
                let hi: RatVector = p.b()[..d].iter().cloned().collect();
                let lo: RatVector = p.b()[d..].iter().map(|v| -v).collect();
                (lo, hi)
            })
            .collect(),
    )
}

/// The closed-form hull matching the instance: a tagged reflected simplex,
/// a box family, or any common-matrix instance passing the hypotheses.
pub fn closed_form(file: &InstanceFile, inst: &DisjunctionInstance) -> Result<FacetList> {
    if let Some(FamilyTag::ReflectedSimplex { a, b }) = &file.family {
        let (a, b) = (a.to_rational()?, b.to_rational()?);
        if gen_reflected_simplex(inst.d(), &a, &b)? != *inst {
            return Err(CliError::Input(
                "instance does not match its reflected-simplex parameters".into(),
            ));
        }
        return Ok(reflected_simplex_hull(inst.d(), &a, &b)?);
    }
    if let Some(bounds) = box_bounds(inst) {
        return Ok(hyperrect_hull(&bounds)?);
    }
    if inst.common_matrix().is_some() {
        return Ok(common_matrix_hull(inst)?);
    }
    Err(CliError::Input(
        "no closed form applies: not a recognized family and the matrices differ".into(),
    ))
}

pub fn hull(file: &InstanceFile, inst: &DisjunctionInstance, method: Method) -> Result<FacetList> {
    Ok(match method {
        Method::Signature => enumerate_facets(inst)?,
        Method::Lifting => full_lifting_system(inst)?,
        Method::ClosedForm => closed_form(file, inst)?,
        Method::Oracle => oracle_hull(inst, oracle_cap()?)?,
    })
}

pub fn cmd_hull(path: &Path, method: Method, out: Option<&Path>) -> Result<Outcome> {
    let (file, inst) = load_instance(path)?;
    let list = hull(&file, &inst, method)?;
    let json = to_json(&FacetFile::from_list(&list, method.name()));
    write_or_print(out, json, summary(&list) + "\n")
}

fn list_inequalities(out: &mut String, label: &str, qs: &[disjhull::LinearInequality]) {
    for q in qs {
        let _ = writeln!(out, "  {label}: {q}");
    }
}

pub fn cmd_verify(path: &Path) -> Result<Outcome> {
    let (file, inst) = load_instance(path)?;
    let sig = enumerate_facets(&inst)?;
    let lifting = full_lifting_system(&inst)?;
    let oracle = oracle_hull(&inst, oracle_cap()?)?;
    let mut out = String::new();
    let _ = writeln!(out, "signature: {}", summary(&sig));
    let _ = writeln!(out, "lifting: {}", summary(&lifting));
    let _ = writeln!(out, "oracle: {}", summary(&oracle));

    let so = compare(&sig, &oracle)?;
    if so.equal {
        let _ = writeln!(out, "signature vs oracle: equal");
    } else {
        let _ = writeln!(out, "signature vs oracle: MISMATCH");
        list_inequalities(&mut out, "only signature", &so.only_in_a);
        list_inequalities(&mut out, "only oracle", &so.only_in_b);
    }
    let lo = compare(&lifting, &oracle)?;
    if lo.equal {
        let _ = writeln!(out, "lifting vs oracle: equal");
    } else {
        let _ = writeln!(out, "lifting vs oracle: lifting misses {}", lo.only_in_b.len());
        list_inequalities(&mut out, "missed", &lo.only_in_b);
        list_inequalities(&mut out, "not a facet", &lo.only_in_a);
    }
    if file.family.is_some() || inst.common_matrix().is_some() {
        match closed_form(&file, &inst) {
            Ok(cf) => {
                let co = compare(&cf, &oracle)?;
                let verdict = if co.equal { "equal" } else { "MISMATCH" };
                let _ = writeln!(out, "closed-form vs oracle: {verdict}");
                list_inequalities(&mut out, "only closed-form", &co.only_in_a);
                list_inequalities(&mut out, "only oracle", &co.only_in_b);
            }
            Err(e) => {
                let _ = writeln!(out, "closed-form: not applicable ({e})");
            }
        }
    }
    let code = if so.equal { EXIT_OK } else { EXIT_MISMATCH };
    Ok(Outcome::ok(out).with_code(code))
}

fn parse_combine(spec: &str) -> Result<Vec<(usize, Rational)>> {
    spec.split(',')
        .map(|term| {
            let (i, w) = term
                .split_once(':')
                .ok_or_else(|| CliError::Input(format!("expected idx:weight, got {term:?}")))?;
            let i = i
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("bad index {i:?}")))?;
            Ok((i, parse_rational(w)?))
        })
        .collect()
}

pub fn cmd_mir(
    path: &Path,
    combine: Option<&str>,
    reflected: bool,
    out: Option<&Path>,
) -> Result<Outcome> {
    let (file, inst) = load_instance(path)?;
    if reflected {
        let Some(FamilyTag::ReflectedSimplex { a, b }) = &file.family else {
            return Err(CliError::Input(
                "--reflected-simplex needs an instance written by `gen reflected-simplex`".into(),
            ));
        };
        let (a, b) = (a.to_rational()?, b.to_rational()?);
        let cuts = derive_reflected_simplex_cuts(inst.d(), &a, &b)?;
        let oracle = oracle_hull(&inst, oracle_cap()?)?;
        let missing: Vec<_> = cuts
            .iter()
            .filter(|f| !oracle.contains(&f.inequality))
            .map(|f| f.inequality.clone())
            .collect();
        let mut report = format!(
            "{}\ncertified: {} of {} cuts are facets of the oracle hull\n",
            summary(&cuts),
            cuts.len() - missing.len(),
            cuts.len()
        );
        list_inequalities(&mut report, "not a facet", &missing);
        let json = to_json(&FacetFile::from_list(&cuts, "mir-reflected-simplex"));
        let code = if missing.is_empty() { EXIT_OK } else { EXIT_MISMATCH };
        let mut outcome = write_or_print(out, json, report.clone())?.with_code(code);
        if out.is_none() {
            outcome.stderr = report;
        }
        return Ok(outcome);
    }
    let terms = parse_combine(combine.unwrap_or_default())?;
    let lifting = full_lifting_system(&inst)?;
    let mut qs = Vec::with_capacity(terms.len());
    let mut ws = Vec::with_capacity(terms.len());
    for (i, w) in terms {
        let f = lifting.facets().get(i).ok_or_else(|| {
            CliError::Input(format!("index {i} out of range; the lifting list has {}", lifting.len()))
        })?;
        qs.push(f.inequality.clone());
        ws.push(w);
    }
    let base = aggregate(&qs, &ws)?;
    let cut = mir(&base, &inst)?;
    let list = FacetList::from_facets(inst.d(), inst.n(), [Facet::new(cut.clone(), Provenance::Mir)]);
    let json = to_json(&FacetFile::from_list(&list, "mir"));
    write_or_print(out, json, format!("base: {base}\ncut: {cut}\n"))
}

pub fn cmd_check_phi(path: &Path) -> Result<Outcome> {
    let (_, inst) = load_instance(path)?;
    let (a, bs) = common_rhs(&inst).map_err(|e| CliError::Input(e.to_string()))?;
    let report = check_phi(a, &bs)?;
    let mut out = String::new();
    let _ = writeln!(out, "basic partitions: {}", report.table.len());
    match report.witness_entry() {
        None => {
            let _ = writeln!(out, "condition Phi holds");
            Ok(Outcome::ok(out))
        }
        Some(e) => {
            let tau: Vec<String> = e.partition.tau.iter().map(|i| (i + 1).to_string()).collect();
            let _ = writeln!(out, "condition Phi fails");
            let _ = writeln!(out, "witness tau=({})", tau.join(","));
            for (i, (x, ok)) in e.solutions.iter().zip(&e.feasible).enumerate() {
                let verdict = if *ok { "feasible" } else { "infeasible" };
                let _ = writeln!(out, "  P{i}: x = {x} {verdict}");
            }
            Ok(Outcome::ok(out).with_code(EXIT_HYPOTHESIS))
        }
    }
}

pub fn cmd_info(path: &Path) -> Result<Outcome> {
    let file: InstanceFile = read_json(path)?;
    let polytopes = file.polytopes()?;
    let mut out = String::new();
    let _ = writeln!(out, "d = {}, n = {}", file.d, file.n);
    let common = polytopes.windows(2).all(|w| w[0].a() == w[1].a());
    let _ = writeln!(out, "common matrix: {}", if common { "yes" } else { "no" });
    for (i, p) in polytopes.iter().enumerate() {
        let line = match extreme_points(p) {
            Ok(v) => {
                let irredundant = remove_redundant_rows(p)?.len();
                format!(
                    "{} rows ({} redundant), {} vertices, {}",
                    p.num_rows(),
                    p.num_rows() - irredundant,
                    v.len(),
                    if is_full_dimensional(p) {
                        "full dimensional"
                    } else {
                        "not full dimensional"
                    }
                )
            }
            Err(e) => format!("{} rows, {e}", p.num_rows()),
        };
        let _ = writeln!(out, "P{i}: {line}");
    }
    match DisjunctionInstance::new(polytopes) {
        Ok(_) => Ok(Outcome::ok(out)),
        Err(e) => {
            let _ = writeln!(out, "not a valid instance: {e}");
            Ok(Outcome::ok(out).with_code(EXIT_INPUT))
        }
    }
}
