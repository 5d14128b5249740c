//! One function per subcommand. Reports go to stdout, diagnostics to stderr.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;
use torus_obstruct::clifford_oracle::{
    lift_loop, oracle_sweep, so3_quaternion_check, OracleError, MAX_ORACLE_DIM,
};
use torus_obstruct::exactpoly::IntPoly;
use torus_obstruct::intmatrix::{block_diag, SqIntMatrix};
use torus_obstruct::numberfield::{
    independence_certify, is_unit, new_field, TotallyRealField, UnitCheck,
};
use torus_obstruct::obstruction::{
    build_loop_spec, obstruction_of_pair, pairing, ObstructionClass, SignPattern,
};
use torus_obstruct::recipes::{
    assemble, builtin_field, choose_units, conjugacy_catalog, decode_ints, encode_ints,
    positive_block, unit_search, ConstructionCertificate, RecipeError, CERT_SCHEMA,
};

use crate::input::{parse_input_file, read_json, Generators, InputError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Internal(format!("output failed: {e}"))
    }
}

impl From<RecipeError> for CliError {
    fn from(e: RecipeError) -> Self {
        match e {
            RecipeError::Verification(_) | RecipeError::Oracle(_) => {
                CliError::Internal(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn load_field(poly: IntPoly) -> Result<TotallyRealField, CliError> {
    new_field(poly).map_err(|e| CliError::Input(format!("field rejected: {e}")))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

pub fn verdict_line(class: ObstructionClass) -> &'static str {
    match class {
        ObstructionClass::Generator => "SPLITS-OBSTRUCTED (generator)",
        ObstructionClass::Trivial => "NO OBSTRUCTION (trivial)",
    }
}

// ---------------------------------------------------------------------------

pub fn verify(file: &Path, budget: u32) -> Result<(), CliError> {
    let v = read_json(file)?;
    if v.get("schema").is_some() {
        return verify_certificate(&v);
    }
    let spec = crate::input::parse_input_value(&v)?;
    let field = load_field(spec.field)?;
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "field: {} (degree {}, discriminant {}, totally real, irreducible)",
        field.poly(),
        field.degree(),
        field.discriminant()
    )?;
    let mut problems = Vec::new();
    match spec.generators {
        None => {}
        Some(Generators::Units(units)) => {
            let mut elems = Vec::new();
            for (name, coeffs) in ["u1", "u2"].iter().zip(units) {
                let u = field.element(coeffs).map_err(input)?;
                match is_unit(&u).map_err(input)? {
                    UnitCheck::Unit(c) => {
                        writeln!(
                            out,
                            "{name} = {u}: unit, norm {}, signs {}, hyperbolic {}",
                            c.det_of_mult_matrix, c.conjugate_signs, c.hyperbolic
                        )?;
                        if !c.hyperbolic {
                            problems.push(format!("{name} is not hyperbolic"));
                        }
                        elems.push(u);
                    }
                    UnitCheck::NotAUnit { norm } => {
                        writeln!(out, "{name} = {u}: not a unit (norm {norm})")?;
                        problems.push(format!("{name} is not a unit"));
                    }
                }
            }
            if let [u1, u2] = elems.as_slice() {
                let ind = independence_certify(u1, u2, budget).map_err(input)?;
                let label = if ind.is_independent() {
                    "independent"
                } else {
                    "inconclusive"
                };
                writeln!(out, "independence: {label}")?;
                if !ind.is_independent() {
                    problems.push("independence inconclusive".into());
                }
            }
        }
        Some(Generators::Matrices([a1, a2])) => {
            if a1.dim() != a2.dim() {
                return Err(CliError::Input("matrices have different sizes".into()));
            }
            for (name, a) in [("a1", &a1), ("a2", &a2)] {
                let det = a.det();
                let hyp = a.is_hyperbolic().map_err(input)?;
                writeln!(out, "{name}: det {det}, hyperbolic {hyp}")?;
                if det != 1.into() {
                    problems.push(format!("{name} has determinant {det}"));
                }
                if !hyp {
                    problems.push(format!("{name} is not hyperbolic"));
                }
            }
            let commuting = a1.commutes_with(&a2).map_err(input)?;
            writeln!(out, "commuting: {commuting}")?;
            if !commuting {
                problems.push("matrices do not commute".into());
            }
        }
    }
    if problems.is_empty() {
        writeln!(out, "VERIFIED")?;
    } else {
        writeln!(out, "NOT VERIFIED: {}", problems.join("; "))?;
    }
    Ok(())
}

fn verify_certificate(v: &Value) -> Result<(), CliError> {
    let cert = ConstructionCertificate::from_json(v).map_err(input)?;
    cert.reverify()
        .map_err(|e| CliError::Input(format!("certificate rejected: {e}")))?;
    println!(
        "VERIFIED certificate {CERT_SCHEMA}: d={} obstruction={} theorem_scope={}",
        cert.d,
        cert.obstruction.as_str(),
        cert.theorem_scope
    );
    Ok(())
}

// ---------------------------------------------------------------------------

/// Positive block of the given size appended to keep the pair hyperbolic.
fn padding_block(extra: usize, jobs: usize) -> Result<[SqIntMatrix; 2], CliError> {
    if extra < 3 {
        return Err(CliError::Input(format!(
            "padding adds {extra} dimensions; at least 3 are needed for a hyperbolic positive block"
        )));
    }
    let field = builtin_field(extra)?;
    let (u1, u2) = choose_units(&field, jobs)?;
    let pb = positive_block(&field, &u1, &u2)?;
    Ok(pb.matrices)
}

pub fn obstruct(
    file: &Path,
    d: Option<usize>,
    out: Option<&Path>,
    jobs: usize,
) -> Result<(), CliError> {
    let spec = parse_input_file(file)?;
    let [mut a1, mut a2] = match spec.generators {
        None => {
            return Err(CliError::Input(
                "obstruct needs exactly one of \"units\" or \"matrices\"".into(),
            ))
        }
        Some(Generators::Matrices(m)) => {
            load_field(spec.field)?;
            m
        }
        Some(Generators::Units([u1, u2])) => {
            let field = load_field(spec.field)?;
            [
                field.element(u1).map_err(input)?.mult_matrix(),
                field.element(u2).map_err(input)?.mult_matrix(),
            ]
        }
    };
    if let Some(d) = d {
        let base = a1.dim();
        if d < base {
            return Err(CliError::Input(format!(
                "--d {d} is below the input dimension {base}"
            )));
        }
        if d > base {
            let [c1, c2] = padding_block(d - base, jobs)?;
            a1 = block_diag(&[a1, c1]).map_err(input)?;
            a2 = block_diag(&[a2, c2]).map_err(input)?;
        }
    }
    let obs = obstruction_of_pair(&a1, &a2).map_err(input)?;
    let dim = a1.dim();
    let (oracle_label, oracle_ok) = if dim <= MAX_ORACLE_DIM {
        let spec =
            build_loop_spec(&obs.s1, &obs.s2).map_err(|e| CliError::Internal(e.to_string()))?;
        match lift_loop(&spec, torus_obstruct::clifford_oracle::DEFAULT_STEPS, None) {
            Ok(r) if r.class == obs.class => ("agree", true),
            Ok(_) => ("disagree", false),
            Err(OracleError::IndeterminateLift(_)) => ("indeterminate", false),
            Err(e) => return Err(CliError::Internal(e.to_string())),
        }
    } else {
        ("skipped", true)
    };
    let report = json!({
        "d": dim,
        "matrices": {"a1": matrix_json(&a1), "a2": matrix_json(&a2)},
        "charpolys": {
            "a1": encode_ints(a1.charpoly().coeffs()),
            "a2": encode_ints(a2.charpoly().coeffs()),
        },
        "sign_patterns": {"s1": obs.s1.signs(), "s2": obs.s2.signs()},
        "intersection": obs.intersection,
        "frame_shift": obs.frame_shift,
        "obstruction": obs.class.as_str(),
        "oracle": oracle_label,
    });
    write_output(out, &pretty(&report))?;
    let mut line = verdict_line(obs.class).to_string();
    if !oracle_ok {
        line.push_str(&format!(" [oracle: {oracle_label}]"));
    }
    println!("{line}");
    if oracle_label == "disagree" {
        return Err(CliError::Internal(
            "Clifford oracle disagrees with the pairing formula".into(),
        ));
    }
    Ok(())
}

fn matrix_json(m: &SqIntMatrix) -> Value {
    Value::Array(m.rows().iter().map(|r| encode_ints(r)).collect())
}

// ---------------------------------------------------------------------------

pub fn construct(
    d: usize,
    field: Option<&Path>,
    out: Option<&Path>,
    jobs: usize,
) -> Result<(), CliError> {
    let field = match field {
        Some(path) => Some(load_field(parse_input_file(path)?.field)?),
        None => None,
    };
    let cert = assemble(d, field.as_ref(), jobs)?;
    write_output(out, &cert.to_canonical_string())?;
    if out.is_some() {
        println!(
            "constructed d={}: obstruction={} theorem_scope={}",
            cert.d,
            cert.obstruction.as_str(),
            cert.theorem_scope
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------

pub fn oracle_exhaustive(d: usize, steps: usize, jobs: usize) -> Result<(), CliError> {
    if d < 3 {
        return Err(CliError::Input(format!("dimension {d} is below 3")));
    }
    let report = oracle_sweep(d, steps, jobs).map_err(input)?;
    for disc in &report.discrepancies {
        eprintln!(
            "discrepancy: s1={} s2={} formula={} oracle={:?}",
            disc.s1, disc.s2, disc.formula, disc.oracle
        );
    }
    println!("{}", report.summary_line());
    if !report.all_agree() {
        return Err(CliError::Internal("formula and oracle disagree".into()));
    }
    Ok(())
}

fn read_pattern(v: &Value, key: &str) -> Result<SignPattern, CliError> {
    let raw = v
        .get(key)
        .ok_or_else(|| CliError::Input(format!("missing key {key:?}")))?;
    let signs = decode_ints(raw)
        .map_err(input)?
        .iter()
        .map(|s| i8::try_from(s).map_err(|_| CliError::Input(format!("bad sign {s}"))))
        .collect::<Result<Vec<_>, _>>()?;
    SignPattern::new(signs).map_err(input)
}

pub fn oracle_spec(d: usize, file: &Path, steps: usize, trace: bool) -> Result<(), CliError> {
    let v = read_json(file)?;
    let s1 = read_pattern(&v, "s1")?;
    let s2 = read_pattern(&v, "s2")?;
    if s1.len() != d || s2.len() != d {
        return Err(CliError::Input(format!(
            "patterns have lengths {} and {}, expected {d}",
            s1.len(),
            s2.len()
        )));
    }
    let formula = pairing(&s1, &s2).map_err(input)?;
    let spec = build_loop_spec(&s1, &s2).map_err(input)?;
    let mut stdout = io::stdout().lock();
    let lift = if trace {
        lift_loop(&spec, steps, Some(&mut stdout))
    } else {
        lift_loop(&spec, steps, None)
    };
    writeln!(stdout, "formula: {formula}")?;
    let clifford = match lift {
        Ok(r) => {
            writeln!(
                stdout,
                "clifford: {} (scalar {:.12})",
                r.class, r.final_scalar
            )?;
            Some(r.class)
        }
        Err(OracleError::IndeterminateLift(s)) => {
            writeln!(stdout, "clifford: indeterminate (scalar {s:.12})")?;
            None
        }
        Err(e) => return Err(input(e)),
    };
    let quaternion = match so3_quaternion_check(&spec, steps) {
        Ok(c) => {
            writeln!(stdout, "quaternion: {c}")?;
            Some(Some(c))
        }
        Err(OracleError::NotRank3Confined) => {
            writeln!(
                stdout,
                "quaternion: not applicable (planes span more than 3 coordinates)"
            )?;
            None
        }
        Err(OracleError::IndeterminateLift(s)) => {
            writeln!(stdout, "quaternion: indeterminate (w {s:.12})")?;
            Some(None)
        }
        Err(e) => return Err(input(e)),
    };
    let agree = clifford == Some(formula) && quaternion.is_none_or(|q| q == Some(formula));
    if agree {
        writeln!(stdout, "formula == oracle")?;
        Ok(())
    } else {
        writeln!(stdout, "formula != oracle")?;
        Err(CliError::Internal("formula and oracle disagree".into()))
    }
}

// ---------------------------------------------------------------------------

pub fn search(field: &Path, bound: i64, jobs: usize) -> Result<(), CliError> {
    if bound < 1 {
        return Err(CliError::Input("--bound must be at least 1".into()));
    }
    let field = load_field(parse_input_file(field)?.field)?;
    let units = unit_search(&field, bound, jobs)?;
    let mut out = io::stdout().lock();
    for u in units {
        let line = json!({
            "unit": encode_ints(u.element.coeffs()),
            "det": u.det_of_mult_matrix,
            "signs": u.conjugate_signs.signs(),
            "hyperbolic": u.hyperbolic,
        });
        writeln!(out, "{line}")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------

pub fn catalog(files: &[std::path::PathBuf]) -> Result<(), CliError> {
    let mut certs = Vec::new();
    for f in files {
        let cert = ConstructionCertificate::from_json(&read_json(f)?)
            .map_err(|e| CliError::Input(format!("{}: {e}", f.display())))?;
        cert.reverify()
            .map_err(|e| CliError::Input(format!("{}: certificate rejected: {e}", f.display())))?;
        certs.push(cert);
    }
    let report = conjugacy_catalog(&certs)?;
    let mut v = report.to_json();
    v["files"] = Value::Array(
        files
            .iter()
            .map(|f| json!(f.display().to_string()))
            .collect(),
    );
    print!("{}", pretty(&v));
    println!(
        "{} distinct charpoly classes among {} certificates{}",
        report.distinct_classes(),
        certs.len(),
        report.d.map(|d| format!(" (d={d})")).unwrap_or_default()
    );
    Ok(())
}
