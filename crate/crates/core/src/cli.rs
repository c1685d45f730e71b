//! Configuration-driven runner behind the `kite` binary.
//!
//! A config describes one algebra and lists the suites to run.
//! Reports come back in config order and render as text or JSON; the JSON
//! carries a digest of the config so a report identifies what produced it.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Deserializer, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::kite::{Cone, KiteAlgebra, KiteElement};
use crate::lexext::{check_slices, LexElement, LexGroup, NPerfectAlgebra};
use crate::pea::{self, PeaAmbient, PeaUniverse, Window, WindowSpec, DEFAULT_CAP, DEFAULT_SAMPLES};
use crate::pogroup::{GroupKind, PoGroup};
use crate::rdp::{self, RdpClass, Verdict};
use crate::report::{Check, CheckReport};
use crate::structure::{self, Permutation, Shape};
use crate::Tri;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupConfig {
    Integers,
    IntVectors { dim: usize },
    LexInt,
    AffineRational,
    Trivial,
}

impl GroupConfig {
    fn build(self) -> Result<PoGroup, Error> {
        PoGroup::new(match self {
            GroupConfig::Integers => GroupKind::Integers,
            GroupConfig::IntVectors { dim } => GroupKind::IntVectors(dim),
            GroupConfig::LexInt => GroupKind::LexInt,
            GroupConfig::AffineRational => GroupKind::AffineRational,
            GroupConfig::Trivial => GroupKind::Trivial,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    PeaAxioms,
    Slices,
    RdpClassify,
    Rdp1Refine,
    Rip,
    Iso,
    Mv,
    State,
    Symmetric,
    NormalIdeal,
    Irreducibility,
    Decompose,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::PeaAxioms,
        Suite::Slices,
        Suite::RdpClassify,
        Suite::Rdp1Refine,
        Suite::Rip,
        Suite::Iso,
        Suite::Mv,
        Suite::State,
        Suite::Symmetric,
        Suite::NormalIdeal,
        Suite::Irreducibility,
        Suite::Decompose,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::PeaAxioms => "pea_axioms",
            Suite::Slices => "slices",
            Suite::RdpClassify => "rdp_classify",
            Suite::Rdp1Refine => "rdp1_refine",
            Suite::Rip => "rip",
            Suite::Iso => "iso",
            Suite::Mv => "mv",
            Suite::State => "state",
            Suite::Symmetric => "symmetric",
            Suite::NormalIdeal => "normal_ideal",
            Suite::Irreducibility => "irreducibility",
            Suite::Decompose => "decompose",
        }
    }
}

fn one() -> u32 {
    1
}
fn two() -> u32 {
    2
}
fn default_samples() -> usize {
    DEFAULT_SAMPLES
}
fn default_cap() -> u64 {
    DEFAULT_CAP
}
fn all_suites() -> Vec<Suite> {
    Suite::ALL.to_vec()
}

/// Field order is fixed, so serializing gives the canonical form hashed
/// into the digest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: GroupConfig,
    #[serde(deserialize_with = "finite_index_size")]
    pub index_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<usize>>,
    #[serde(default = "one")]
    pub n: u32,
    #[serde(default = "two")]
    pub bound: u32,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_cap")]
    pub cap: u64,
    #[serde(default = "all_suites")]
    pub suites: Vec<Suite>,
    /// Record wall-clock time per suite. Off by default so that reports
    /// are reproducible byte for byte.
    #[serde(default)]
    pub timing: bool,
}

/// Index sets must be finite: a countably infinite `I` is meaningful but has
/// no finite representation here.
fn finite_index_size<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
    use serde::de::Error as _;
    let v = serde_json::Value::deserialize(d)?;
    match v.as_u64() {
        Some(m) => usize::try_from(m).map_err(D::Error::custom),
        None => Err(D::Error::custom(format!(
            "expected a non-negative integer, got {v}; an index set is at most countable, and only finite \
             index sets can be represented"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
        ConfigError { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "config error: {}", self.message)
        } else {
            write!(f, "config error at {}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de)
        .map_err(|e| ConfigError::at(e.path().to_string(), e.inner().to_string()))?;
    validate(&cfg)?;
    Ok(cfg)
}

pub fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    if let GroupConfig::IntVectors { dim: 0 } = cfg.group {
        return Err(ConfigError::at("group.dim", "must be at least 1"));
    }
    match (&cfg.lambda, &cfg.rho, &cfg.phi) {
        (Some(_), Some(_), None) | (None, None, Some(_)) => {}
        _ => return Err(ConfigError::at(".", "exactly one of (lambda and rho) or phi must be given")),
    }
    for (field, arr) in [("lambda", &cfg.lambda), ("rho", &cfg.rho), ("phi", &cfg.phi)] {
        if let Some(a) = arr {
            if a.len() != cfg.index_size {
                return Err(ConfigError::at(
                    field,
                    format!("has length {} but index_size is {}", a.len(), cfg.index_size),
                ));
            }
            Permutation::new(a.clone()).map_err(|_| ConfigError::at(field, format!("not a bijection at {field}: {a:?}")))?;
        }
    }
    if cfg.n == 0 {
        return Err(ConfigError::at("n", "must be at least 1"));
    }
    if cfg.bound == 0 {
        return Err(ConfigError::at("bound", "must be at least 1"));
    }
    Ok(())
}

/// The universes a config describes, with their windows built once.
pub struct Instance {
    pub kite: Option<(KiteAlgebra, Window<KiteElement>)>,
    pub algebra: NPerfectAlgebra,
    pub window: Window<LexElement>,
    pub shape: Shape,
    pub spec: WindowSpec,
}

impl Instance {
    /// Window-size overruns are config errors.
    pub fn build(cfg: &RunConfig) -> Result<Instance, ConfigError> {
        let group = cfg.group.build().map_err(|e| ConfigError::at("group", e.to_string()))?;
        let spec = WindowSpec { bound: cfg.bound, samples: cfg.samples, seed: cfg.seed, cap: cfg.cap };
        let perm = |a: &Vec<usize>| Permutation::new(a.clone()).expect("validated");
        let (kite, phi) = match (&cfg.lambda, &cfg.rho, &cfg.phi) {
            (Some(l), Some(r), _) => {
                let k = KiteAlgebra::new(group, perm(l), perm(r)).map_err(|e| ConfigError::at("rho", e.to_string()))?;
                let phi = structure::build_phi(k.lambda(), k.rho()).expect("equal lengths");
                (Some(k), phi)
            }
            (_, _, Some(p)) => (None, perm(p)),
            _ => return Err(ConfigError::at(".", "exactly one of (lambda and rho) or phi must be given")),
        };
        let too_large = |e: Error| ConfigError::at("bound", e.to_string());
        let kite = match kite {
            Some(k) => {
                let w = k.window(&spec).map_err(too_large)?;
                Some((k, w))
            }
            None => None,
        };
        let algebra = NPerfectAlgebra::new(LexGroup::new(group, phi.clone()), cfg.n)
            .map_err(|e| ConfigError::at("n", e.to_string()))?;
        let window = algebra.window(&spec).map_err(too_large)?;
        let shape = Shape { group, phi, n: cfg.n };
        Ok(Instance { kite, algebra, window, shape, spec })
    }
}

fn titled(mut r: CheckReport, name: impl Into<String>) -> CheckReport {
    r.name = name.into();
    r
}

fn single(name: &str, check: Check) -> CheckReport {
    let mut r = CheckReport::new(name);
    r.push(check);
    r
}

fn run_suite(inst: &Instance, suite: Suite) -> Vec<CheckReport> {
    let spec = &inst.spec;
    let (a, aw) = (&inst.algebra, &inst.window);
    let name = suite.name();
    let kite_name = format!("{name}/kite");
    let alg_name = format!("{name}/n_perfect");
    let mut out = Vec::new();
    match suite {
        Suite::PeaAxioms => {
            if let Some((k, kw)) = &inst.kite {
                out.push(titled(pea::check_pea_axioms(k, kw, spec), kite_name));
            }
            out.push(titled(pea::check_pea_axioms(a, aw, spec), alg_name));
        }
        Suite::Slices => out.push(match check_slices(a, spec) {
            Ok(r) => r,
            Err(e) => single(name, Check::skipped("slices", e.to_string())),
        }),
        Suite::RdpClassify => {
            if let Some((k, kw)) = &inst.kite {
                out.push(classify(k, kw, spec, &kite_name));
            }
            out.push(classify(a, aw, spec, &alg_name));
        }
        Suite::Rdp1Refine => out.push(match rdp::check_lex_rdp1(a, spec) {
            Ok(r) => r,
            Err(e) => single(name, Check::skipped("constructive RDP1 tables verify", e.to_string())),
        }),
        Suite::Rip => {
            if let Some((k, kw)) = &inst.kite {
                out.push(rip(kw, |x, y| k.leq(x, y), &kite_name));
            }
            out.push(rip(aw, |x, y| a.lex().leq(x, y), &alg_name));
        }
        Suite::Iso => out.push(match &inst.kite {
            Some((k, _)) => match structure::check_iso(k, spec) {
                Ok(r) => r,
                Err(e) => single(name, Check::skipped("Phi is an isomorphism", e.to_string())),
            },
            None => single(name, Check::skipped("Phi is an isomorphism", "config gives phi, not lambda and rho")),
        }),
        Suite::Mv => {
            if let Some((k, kw)) = &inst.kite {
                out.push(titled(pea::check_mv_axioms(k, kw, spec), kite_name));
            }
            out.push(titled(pea::check_mv_axioms(a, aw, spec), alg_name));
        }
        Suite::State => out.push(pea::check_state(a, aw, spec, |x| a.canonical_state(x))),
        Suite::Symmetric => {
            if let Some((k, kw)) = &inst.kite {
                out.push(titled(pea::check_symmetric(k, kw), kite_name));
            }
            out.push(titled(pea::check_symmetric(a, aw), alg_name));
        }
        Suite::NormalIdeal => {
            if let Some((k, kw)) = &inst.kite {
                let r = pea::check_normal_ideal(k, kw, spec, |x: &KiteElement| x.cone == Cone::Lower);
                out.push(titled(r, format!("{kite_name} (lower cone)")));
            }
            let r = pea::check_normal_ideal(a, aw, spec, |x: &LexElement| x.level == 0);
            out.push(titled(r, format!("{alg_name} (E_0)")));
        }
        Suite::Irreducibility => out.push(irreducibility(&inst.shape)),
        Suite::Decompose => out.push(match structure::decompose(&inst.shape, spec) {
            Ok(d) => d.report,
            Err(e) => single(name, Check::skipped("decomposition", e.to_string())),
        }),
    }
    out
}

fn classify<U: PeaUniverse>(u: &U, w: &Window<U::Elem>, spec: &WindowSpec, name: &str) -> CheckReport {
    if !w.exhaustive {
        return single(name, Check::skipped("RDP classification", format!("not enumerable: {}", w.note)));
    }
    let amb = PeaAmbient { universe: u, window: w, spec: *spec };
    titled(rdp::classify_rdp(&amb, &w.elements, &w.note), name)
}

fn rip<E: fmt::Display>(w: &Window<E>, leq: impl Fn(&E, &E) -> bool, name: &str) -> CheckReport {
    let check = if w.exhaustive {
        let (count, witness) = rdp::rip_on_elements(&w.elements, leq);
        Check::from_witness("every interpolation instance has a witness", witness)
            .with_detail(format!("{count} instances, {}", w.note))
    } else {
        Check::skipped("every interpolation instance has a witness", format!("not enumerable: {}", w.note))
    };
    single(name, check)
}

pub fn irreducibility(shape: &Shape) -> CheckReport {
    let d = structure::decide_subdirect_irreducibility(shape);
    let mut r = CheckReport::new("irreducibility");
    let name = format!("subdirectly irreducible: {}", d.verdict);
    r.push(match d.verdict {
        // Undecided for the group, so the direction is not checked at all.
        Tri::Unknown => Check::skipped(name, d.rationale.clone()),
        _ => Check::pass(name).with_detail(d.rationale.clone()),
    });
    r.push(Check::pass(format!("connected components of phi: {}", d.components)));
    let m = shape.phi.len();
    let canon = format!("canonical form phi(i) = i-1 (mod {m})");
    r.push(match &d.canonical {
        Some(sigma) => {
            let conj = shape.phi.conjugate_by(sigma);
            if conj == Permutation::down_cycle(m) {
                Check::pass(canon).with_detail(format!("renumbering {sigma}"))
            } else {
                Check::fail(canon, format!("renumbering {sigma} conjugates phi to {conj}"))
            }
        }
        None => Check::skipped(canon, "only for irreducible instances"),
    });
    r
}

pub fn run_suites(cfg: &RunConfig) -> Result<Vec<CheckReport>, ConfigError> {
    let inst = Instance::build(cfg)?;
    Ok(run_with(&inst, &cfg.suites, cfg.timing))
}

pub fn run_with(inst: &Instance, suites: &[Suite], timing: bool) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for &s in suites {
        // No clock unless asked: `Instant` is unavailable on wasm32.
        let start = timing.then(Instant::now);
        let mut reports = run_suite(inst, s);
        if let Some(start) = start {
            let ms = start.elapsed().as_millis() as u64;
            for r in &mut reports {
                r.elapsed_ms = ms;
            }
        }
        out.extend(reports);
    }
    out
}

pub fn config_digest(cfg: &RunConfig) -> String {
    let canonical = serde_json::to_string(cfg).expect("config serializes");
    let hash = Sha256::digest(canonical.as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
struct Document<'a> {
    config_digest: &'a str,
    suites: &'a [CheckReport],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

pub fn emit_report(digest: &str, reports: &[CheckReport], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Document { config_digest: digest, suites: reports })
                .expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = format!("config {digest}\n");
            for r in reports {
                s.push_str(&r.to_string());
            }
            let fails: usize = reports.iter().map(|r| r.failures()).sum();
            let count = |st| reports.iter().map(|r| r.count(st)).sum::<usize>();
            s.push_str(&format!(
                "\n{} pass, {fails} fail, {} skipped, {} unknown\n",
                count(crate::Status::Pass),
                count(crate::Status::Skipped),
                count(crate::Status::Unknown)
            ));
            s
        }
    }
}

pub fn failures(reports: &[CheckReport]) -> usize {
    reports.iter().map(|r| r.failures()).sum()
}

/// Irreducibility and decomposition as text.
pub fn classify_text(inst: &Instance) -> String {
    let shape = &inst.shape;
    let d = structure::decide_subdirect_irreducibility(shape);
    let mut s = String::new();
    match &inst.kite {
        Some((k, _)) => s.push_str(&format!("{}\n", k.describe())),
        None => s.push_str(&format!("{}\n", PeaUniverse::describe(&inst.algebra))),
    }
    s.push_str(&format!("phi = {}\n", shape.phi));
    s.push_str(&format!("{}\n", d.summary(shape.phi.len())));
    if let Ok(dec) = structure::decompose(shape, &inst.spec) {
        s.push_str(&format!("{} factor(s):\n", dec.factors.len()));
        for f in &dec.factors {
            s.push_str(&format!("  indices {:?}, phi' = {}: {}\n", f.indices, f.phi, f.decision.verdict));
        }
    }
    s
}

/// One refinement of `a1 + a2 = b1 + b2`. Elements written `(k)[..]` are
/// solved in the lexicographic extension by the constructive cases;
/// `L[..]`/`U[..]` elements in the kite by search over its window; plain
/// group elements in the group.
/// Returns the rendering and whether a valid table was found.
pub fn refine_text(inst: &Instance, args: [&str; 4], class: RdpClass) -> Result<(String, bool), ConfigError> {
    let bad = |e: Error| ConfigError::at("refine", e.to_string());
    let first = args[0].trim_start();
    if first.starts_with('(') {
        let lex = inst.algebra.lex();
        let xs: Vec<LexElement> = args.iter().map(|s| lex.parse_element(s)).collect::<Result<_, _>>().map_err(bad)?;
        let r = rdp::lex_refine_rdp1(lex, &xs[0], &xs[1], &xs[2], &xs[3]).map_err(bad)?;
        let v = rdp::verify_table(lex, &r.table, &xs[0], &xs[1], &xs[2], &xs[3], class);
        let mut s = format!("case {:?}{}\n", r.case, if r.transposed { " (transposed)" } else { "" });
        s.push_str(&r.table.grid(&xs[0], &xs[1], &xs[2], &xs[3]));
        s.push_str(&format!("{class}: {}\n", verdict_text(&v)));
        return Ok((s, v.is_valid()));
    }
    if first.starts_with('L') || first.starts_with('U') {
        let Some((k, kw)) = &inst.kite else {
            return Err(ConfigError::at("refine", "kite elements need lambda and rho in the config"));
        };
        let xs: Vec<KiteElement> = args.iter().map(|s| k.parse_element(s)).collect::<Result<_, _>>().map_err(bad)?;
        let amb = PeaAmbient { universe: k, window: kw, spec: inst.spec };
        return Ok(match rdp::brute_search(&amb, &xs[0], &xs[1], &xs[2], &xs[3], class).map_err(bad)? {
            rdp::Search::Found(t) => (format!("{}{class}: valid\n", t.grid(&xs[0], &xs[1], &xs[2], &xs[3])), true),
            rdp::Search::Undecided => (format!("{class}: undecided within {}\n", kw.note), false),
            rdp::Search::Absent => (format!("{class}: no table within {}\n", kw.note), false),
        });
    }
    let g = inst.shape.group;
    let xs: Vec<_> = args.iter().map(|s| g.parse_element(s)).collect::<Result<_, _>>().map_err(bad)?;
    Ok(match g.refine(&xs[0], &xs[1], &xs[2], &xs[3], class).map_err(bad)? {
        Some(t) => (format!("{}{class}: valid\n", t.grid(&xs[0], &xs[1], &xs[2], &xs[3])), true),
        None => (format!("{class}: no table\n"), false),
    })
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Valid => "valid".into(),
        Verdict::Invalid(w) => format!("invalid ({w})"),
        Verdict::Unknown(w) => format!("unknown ({w})"),
        Verdict::Skipped(w) => format!("skipped ({w})"),
    }
}
