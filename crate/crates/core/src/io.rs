//! JSON formats for systems, lifts and harness configurations.
//!
//! Polynomials are sparse term lists `[[exponents], numerator, denominator]`;
//! integers may be JSON numbers or decimal strings when they do not fit in 64
//! bits. Scalar fields are prefix expressions (see [`crate::algebra::expr`]).

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::algebra::{Poly, ScalarField};
use crate::analysis::TestFunction;
use crate::error::{Error, Result};
use crate::fields::{VectorField, VectorFieldSystem};
use crate::lifting::CarnotGroupSpec;
use crate::quadrature::QuadSettings;
use crate::Rational;

/// Version written into every file and report.
pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntLit {
    Small(i64),
    Big(String),
}

impl IntLit {
    fn from_big(v: &BigInt) -> Self {
        i64::try_from(v).map_or_else(|_| IntLit::Big(v.to_string()), IntLit::Small)
    }

    fn to_big(&self) -> Result<BigInt> {
        match self {
            IntLit::Small(v) => Ok(BigInt::from(*v)),
            IntLit::Big(s) => s.trim().parse().map_err(|_| Error::Format(format!("bad integer `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseTerm(pub Vec<u32>, pub IntLit, pub IntLit);

pub type SparsePoly = Vec<SparseTerm>;

pub fn poly_to_sparse(p: &Poly<Rational>) -> SparsePoly {
    p.terms()
        .map(|(e, c)| SparseTerm(e.clone(), IntLit::from_big(c.numer()), IntLit::from_big(c.denom())))
        .collect()
}

pub fn poly_from_sparse(n_vars: usize, terms: &SparsePoly, context: &str) -> Result<Poly<Rational>> {
    let mut out = Vec::with_capacity(terms.len());
    for (j, SparseTerm(e, num, den)) in terms.iter().enumerate() {
        if e.len() != n_vars {
            return Err(Error::Format(format!(
                "{context}, term {j}: exponent vector has {} entries, expected {n_vars}",
                e.len()
            )));
        }
        let den = den.to_big()?;
        if den == BigInt::from(0) {
            return Err(Error::Format(format!("{context}, term {j}: zero denominator")));
        }
        out.push((e.clone(), Rational::new(num.to_big()?, den)));
    }
    Poly::from_terms(n_vars, out).map_err(|e| Error::Format(format!("{context}: {e}")))
}

fn field_from_sparse(n: usize, comps: &[SparsePoly], context: &str) -> Result<VectorField<Rational>> {
    if comps.len() != n {
        return Err(Error::Format(format!("{context}: {} components, expected {n}", comps.len())));
    }
    let polys = comps
        .iter()
        .enumerate()
        .map(|(k, c)| poly_from_sparse(n, c, &format!("{context}[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    VectorField::new(polys)
}

fn field_to_sparse(f: &VectorField<Rational>) -> Vec<SparsePoly> {
    f.components().iter().map(poly_to_sparse).collect()
}

/// `{ name, n, m, sigma, fields }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    #[serde(default = "schema_default")]
    pub schema: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub n: usize,
    pub m: usize,
    pub sigma: Vec<u32>,
    pub fields: Vec<Vec<SparsePoly>>,
}

fn schema_default() -> u32 {
    SCHEMA
}

fn check_schema(schema: u32) -> Result<()> {
    if schema == SCHEMA {
        Ok(())
    } else {
        Err(Error::Format(format!("unsupported schema version {schema}, expected {SCHEMA}")))
    }
}

impl SystemFile {
    pub fn from_system(sys: &VectorFieldSystem<Rational>) -> Self {
        SystemFile {
            schema: SCHEMA,
            name: sys.name().to_string(),
            description: None,
            n: sys.n(),
            m: sys.m(),
            sigma: sys.sigma().to_vec(),
            fields: sys.fields().iter().map(field_to_sparse).collect(),
        }
    }

    pub fn to_system(&self) -> Result<VectorFieldSystem<Rational>> {
        check_schema(self.schema)?;
        if self.sigma.len() != self.n {
            return Err(Error::Format(format!("sigma: {} entries, expected n = {}", self.sigma.len(), self.n)));
        }
        if self.fields.len() != self.m {
            return Err(Error::Format(format!("fields: {} entries, expected m = {}", self.fields.len(), self.m)));
        }
        let fields = self
            .fields
            .iter()
            .enumerate()
            .map(|(i, f)| field_from_sparse(self.n, f, &format!("fields[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        VectorFieldSystem::new(self.name.clone(), self.sigma.clone(), fields)
    }
}

/// A file reference (resolved against the referring file) or an inline value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Path(String),
    Inline(T),
}

impl<T: for<'de> Deserialize<'de> + Clone> Ref<T> {
    fn resolve(&self, base_dir: &Path) -> Result<T> {
        match self {
            Ref::Inline(v) => Ok(v.clone()),
            Ref::Path(p) => read_json(&base_dir.join(p)),
        }
    }
}

/// `{ name, base_system, N, tau, law, lifted_fields }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftFile {
    #[serde(default = "schema_default")]
    pub schema: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub base_system: Ref<SystemFile>,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub tau: Vec<u32>,
    pub law: Vec<SparsePoly>,
    pub lifted_fields: Vec<Vec<SparsePoly>>,
}

impl LiftFile {
    /// Replaces a path reference by the referenced system.
    pub fn resolved(&self, base_dir: &Path) -> Result<LiftFile> {
        Ok(LiftFile {
            base_system: Ref::Inline(self.base_system.resolve(base_dir)?),
            ..self.clone()
        })
    }

    pub fn to_spec(&self, base_dir: &Path) -> Result<CarnotGroupSpec> {
        check_schema(self.schema)?;
        let base = self.base_system.resolve(base_dir)?.to_system()?;
        let big_n = self.big_n;
        if big_n != base.n() + self.tau.len() {
            return Err(Error::Format(format!(
                "N = {big_n} but base dimension {} plus {} added exponents",
                base.n(),
                self.tau.len()
            )));
        }
        let law = self
            .law
            .iter()
            .enumerate()
            .map(|(j, p)| poly_from_sparse(2 * big_n, p, &format!("law[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        let lifted = self
            .lifted_fields
            .iter()
            .enumerate()
            .map(|(i, f)| field_from_sparse(big_n, f, &format!("lifted_fields[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        CarnotGroupSpec::new(self.name.clone(), base, self.tau.clone(), law, lifted)
    }

    pub fn from_spec(spec: &CarnotGroupSpec) -> Self {
        LiftFile {
            schema: SCHEMA,
            name: spec.name().to_string(),
            description: None,
            base_system: Ref::Inline(SystemFile::from_system(spec.base())),
            big_n: spec.big_n(),
            tau: spec.tau().to_vec(),
            law: spec.law().iter().map(poly_to_sparse).collect(),
            lifted_fields: spec.lifted_fields().iter().map(field_to_sparse).collect(),
        }
    }
}

/// A test function given by an expression with declared support and knots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionEntry {
    pub name: String,
    pub expr: String,
    #[serde(default)]
    pub support: Option<f64>,
    #[serde(default)]
    pub knots: Vec<f64>,
}

impl FunctionEntry {
    pub fn from_test_function(f: &TestFunction) -> Self {
        FunctionEntry {
            name: f.name.clone(),
            expr: f.field.to_string(),
            support: f.support,
            knots: f.knots.clone(),
        }
    }

    pub fn to_test_function(&self, n: usize) -> Result<TestFunction> {
        let field = ScalarField::parse(n, &self.expr)?;
        Ok(TestFunction::new(self.name.clone(), field, self.support, self.knots.clone()))
    }
}

/// `"default"` or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilySpec {
    Named(String),
    List(Vec<FunctionEntry>),
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec::Named("default".into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Interpolation,
    Apriori,
    Sandwich,
    Leibniz,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SandwichSettings {
    /// Expressions in the base variables.
    pub functions: Vec<String>,
    pub radii: Vec<f64>,
    pub exponents: Vec<f64>,
}

impl Default for SandwichSettings {
    fn default() -> Self {
        SandwichSettings {
            functions: vec!["1".into(), "x1".into(), "(* x1 x2)".into()],
            radii: vec![1.0, 2.0],
            exponents: vec![2.0, 3.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LeibnizSettings {
    pub samples: usize,
    /// Cutoff `φ(r1, r2)` multiplied against every family member.
    pub cutoff: [f64; 2],
}

impl Default for LeibnizSettings {
    fn default() -> Self {
        LeibnizSettings {
            samples: 1000,
            cutoff: [1.0, 2.0],
        }
    }
}

/// Harness configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessFile {
    #[serde(default = "schema_default")]
    pub schema: u32,
    pub system: Ref<SystemFile>,
    #[serde(default)]
    pub family: FamilySpec,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub k: usize,
    #[serde(default = "crate::analysis::default_eps_grid")]
    pub eps_grid: Vec<f64>,
    #[serde(rename = "R_grid", default = "default_r_grid")]
    pub r_grid: Vec<f64>,
    #[serde(default = "crate::analysis::default_sigma_grid")]
    pub sigma_grid: Vec<f64>,
    #[serde(default = "crate::analysis::harness::harness_quadrature")]
    pub quadrature: QuadSettings,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift: Option<Ref<LiftFile>>,
    #[serde(default)]
    pub sandwich: SandwichSettings,
    #[serde(default)]
    pub leibniz: LeibnizSettings,
}

fn default_p() -> f64 {
    2.0
}

fn default_r_grid() -> Vec<f64> {
    vec![1.0, 2.0, 4.0]
}

fn default_tolerance() -> f64 {
    crate::analysis::norms::DEFAULT_REL_TOL
}

fn default_checks() -> Vec<Check> {
    vec![Check::Interpolation, Check::Apriori, Check::Leibniz]
}

impl HarnessFile {
    /// Inlines every referenced file and expands a named family, so the
    /// result is self-contained.
    pub fn resolved(&self, base_dir: &Path) -> Result<HarnessFile> {
        check_schema(self.schema)?;
        let system = self.system.resolve(base_dir)?;
        let sys = system.to_system()?;
        let family = FamilySpec::List(self.family_members(&sys)?.iter().map(FunctionEntry::from_test_function).collect());
        let lift = match &self.lift {
            Some(l) => {
                let dir = match l {
                    Ref::Path(p) => base_dir.join(p).parent().map_or_else(|| base_dir.to_path_buf(), Path::to_path_buf),
                    Ref::Inline(_) => base_dir.to_path_buf(),
                };
                Some(Ref::Inline(l.resolve(base_dir)?.resolved(&dir)?))
            }
            None => None,
        };
        Ok(HarnessFile {
            system: Ref::Inline(system),
            family,
            lift,
            ..self.clone()
        })
    }

    pub fn family_members(&self, sys: &VectorFieldSystem<Rational>) -> Result<Vec<TestFunction>> {
        match &self.family {
            FamilySpec::Named(n) if n == "default" => crate::analysis::default_family(sys),
            FamilySpec::Named(n) => Err(Error::Format(format!("unknown family `{n}` (use \"default\" or a list)"))),
            FamilySpec::List(list) => list.iter().map(|e| e.to_test_function(sys.n())).collect(),
        }
    }
}

/// Reads and deserializes a JSON file; errors carry the path and position.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::FileParse {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })
}

pub fn read_system(path: &Path) -> Result<VectorFieldSystem<Rational>> {
    read_json::<SystemFile>(path)?.to_system()
}

pub fn read_lift(path: &Path) -> Result<CarnotGroupSpec> {
    read_json::<LiftFile>(path)?.to_spec(&parent_dir(path))
}

pub fn parent_dir(path: &Path) -> PathBuf {
    path.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf)
}

/// Deterministic pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = parent_dir(path);
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("not a file path: {}", path.display())))?;
    fs::create_dir_all(&dir)?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_round_trip() {
        let p = Poly::from_terms(
            2,
            vec![
                (vec![2, 0], Rational::new(1.into(), 2.into())),
                (vec![0, 1], Rational::new((-3).into(), 1.into())),
            ],
        )
        .unwrap();
        let s = poly_to_sparse(&p);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "[[[0,1],-3,1],[[2,0],1,2]]");
        let back: SparsePoly = serde_json::from_str(&json).unwrap();
        assert_eq!(poly_from_sparse(2, &back, "p").unwrap(), p);
        let big: SparsePoly = serde_json::from_str(r#"[[[1], "123456789012345678901234567890", 7]]"#).unwrap();
        assert!(poly_from_sparse(1, &big, "p").is_ok());
        assert!(poly_from_sparse(2, &big, "p").is_err());
        let zero_den: SparsePoly = serde_json::from_str("[[[1], 1, 0]]").unwrap();
        assert!(poly_from_sparse(1, &zero_den, "p").is_err());
    }

    #[test]
    fn system_validation() {
        let text = r#"{"name":"g","n":2,"m":2,"sigma":[1,2],
            "fields":[[[[[0,0],1,1]],[]],[[],[[[1,0],1,1]]]]}"#;
        let f: SystemFile = serde_json::from_str(text).unwrap();
        let sys = f.to_system().unwrap();
        assert_eq!(sys.q(), 3);
        assert_eq!(SystemFile::from_system(&sys).to_system().unwrap(), sys);
        let mut bad = f.clone();
        bad.m = 3;
        assert!(matches!(bad.to_system(), Err(Error::Format(_))));
        let mut bad = f;
        bad.schema = 2;
        assert!(bad.to_system().is_err());
        assert!(serde_json::from_str::<SystemFile>(r#"{"name":"g","n":2}"#).is_err());
    }
}
