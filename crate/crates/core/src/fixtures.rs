//! Bundled reference tables and their verification.
//!
//! Each table lives in a tab-separated file with `@key value` header lines.
//! `MANIFEST.sha256` lists the SHA-256 of every file; a table is only used
//! after its checksum matches. Setting `REID_BASKET_FIXTURES` to a directory
//! reads the files from there instead of the embedded copies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::basket::Basket;
use crate::classify::{enumerate_b0, enumerate_index_profiles, ClassificationConstraints, IndexSlot};
use crate::criteria::{table_pipeline, BoundCase, BranchPolicy, CriterionUsed, N1Policy};
use crate::error::FixtureError;
use crate::par::Execution;
use crate::rational::Rational;
use crate::riemann_roch::{r_index, r_max, sigma, WeightedBasket};

/// Environment variable naming a directory that replaces the embedded fixtures.
pub const FIXTURE_DIR_ENV: &str = "REID_BASKET_FIXTURES";

/// File listing `sha256  file` for every fixture.
pub const MANIFEST: &str = "MANIFEST.sha256";

macro_rules! embedded {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/", $name)))),*]
    };
}

const EMBEDDED: &[(&str, &str)] = embedded![
    "MANIFEST.sha256",
    "table01.tsv",
    "table06.tsv",
    "table07.tsv",
    "table09.tsv",
    "table10.tsv",
    "table11.tsv",
    "table12.tsv",
    "table13.tsv",
    "table14.tsv",
    "table15.tsv",
    "table16.tsv",
    "table17.tsv",
    "table18.tsv",
    "table19.tsv",
    "table20.tsv",
    "table21.tsv",
    "table23.tsv",
    "table24.tsv",
    "table25.tsv",
    "table26.tsv",
    "table27.tsv",
    "table28.tsv",
    "table29.tsv",
    "table30.tsv",
    "table31.tsv",
];

/// Tables without a usable body, with the reason.
pub const ABSENT_TABLES: &[(u32, &str)] = &[
    (8, "referenced in the text but its body is not in the source"),
    (22, "no table with this number exists in the source"),
];

/// Baskets discussed in prose for the absent table 8, reported with
/// recomputed values (`P̃₋₁ = 0`, case 2, six-value window).
pub const TABLE8_PROSE_BASKETS: &[&str] = &[
    "(1,2),(8,17),2x(1,3)",
    "2x(1,2),(6,13),(2,5),(1,3)",
    "(1,2),(6,13),(3,7),(1,3)",
];

/// Where fixture files are read from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixtureSource {
    Embedded,
    Directory(PathBuf),
}

impl FixtureSource {
    /// The directory in `REID_BASKET_FIXTURES` when set, else the embedded copies.
    pub fn from_env() -> Self {
        match std::env::var_os(FIXTURE_DIR_ENV) {
            Some(dir) if !dir.is_empty() => FixtureSource::Directory(dir.into()),
            _ => FixtureSource::Embedded,
        }
    }

    fn read(&self, name: &str) -> Result<Option<String>, FixtureError> {
        match self {
            FixtureSource::Embedded => Ok(EMBEDDED
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, text)| (*text).to_string())),
            FixtureSource::Directory(dir) => {
                let path = dir.join(name);
                match std::fs::read_to_string(&path) {
                    Ok(text) => Ok(Some(text)),
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
                    Err(source) => Err(FixtureError::Io {
                        path: path.display().to_string(),
                        source,
                    }),
                }
            }
        }
    }

    /// File name to expected SHA-256, from the manifest.
    pub fn manifest(&self) -> Result<BTreeMap<String, String>, FixtureError> {
        let text = self
            .read(MANIFEST)?
            .ok_or_else(|| FixtureError::Manifest(format!("{MANIFEST} not found")))?;
        let mut out = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(hash), Some(file), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(FixtureError::Manifest(format!("line {}: `{line}`", n + 1)));
            };
            out.insert(file.to_string(), hash.to_ascii_lowercase());
        }
        Ok(out)
    }

    /// Table numbers with a fixture file, ascending.
    pub fn table_ids(&self) -> Result<Vec<u32>, FixtureError> {
        Ok(self
            .manifest()?
            .keys()
            .filter_map(|f| f.strip_prefix("table")?.strip_suffix(".tsv")?.parse().ok())
            .collect())
    }

    /// Reads a table file after checking it against the manifest.
    pub fn load(&self, id: u32) -> Result<TableFixture, FixtureError> {
        let file = file_name(id);
        let manifest = self.manifest()?;
        let expected = manifest.get(&file).ok_or(FixtureError::Missing(id))?;
        let text = self.read(&file)?.ok_or(FixtureError::Missing(id))?;
        let actual = sha256_hex(&text);
        if &actual != expected {
            return Err(FixtureError::Checksum {
                file,
                expected: expected.clone(),
                actual,
            });
        }
        TableFixture::parse(&file, &text)
    }
}

fn file_name(id: u32) -> String {
    format!("table{id:02}.tsv")
}

/// Lower-case hex SHA-256 of the text.
pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Flag in the last column of a row table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowFlag {
    None,
    /// Settled by an index bound; only the bound and `−K³` are checked.
    Check,
    /// Excluded by its volume; only `−K³` is checked.
    Cross,
    /// Larger `n₂` than wanted, refined in the text; every cell is checked.
    Question,
    /// `n₂` comes from the alternative case.
    Star,
}

impl RowFlag {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "-" => RowFlag::None,
            "check" => RowFlag::Check,
            "cross" => RowFlag::Cross,
            "question" => RowFlag::Question,
            "star" => RowFlag::Star,
            _ => return None,
        })
    }
}

/// The printed `−K³` cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VolumeCell {
    Value(Rational),
    Negative,
}

/// One printed row; `None` cells are blank in the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub line: usize,
    pub basket: Basket,
    pub k3: Option<VolumeCell>,
    pub big_m: Option<Rational>,
    pub lambda: Option<Rational>,
    pub n1: Option<Rational>,
    pub m0: Option<Rational>,
    pub rmax: Option<Rational>,
    pub n2: Option<Rational>,
    pub flag: RowFlag,
}

/// Condition under which a row is settled without computing `n₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckRule {
    pub rx_at_most: u64,
    pub rmax_at_most: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowTable {
    pub p1: u32,
    pub policy: BranchPolicy,
    pub check: Option<CheckRule>,
    pub rows: Vec<TableRow>,
}

/// A list of `B⁽⁰⁾` shapes: fixed `(1,2)`, `(1,3)`, `(1,4)` counts and a
/// number of free `(1,s)` slots with `s ≥ 5`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemplateTable {
    pub constraints: ClassificationConstraints,
    pub rows: Vec<(usize, (u32, u32, u32, u32))>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileTable {
    pub p1: u32,
    pub lcm: u64,
    pub slots: Vec<IndexSlot>,
    pub constraints: ClassificationConstraints,
    pub baskets: Vec<Basket>,
}

/// A claim about `−K³` attached to a parametric row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VolumeClaim {
    Above(Rational),
    Below(Rational),
}

impl VolumeClaim {
    fn holds(&self, k3: &Rational) -> bool {
        match self {
            VolumeClaim::Above(c) => k3 > c,
            VolumeClaim::Below(c) => k3 < c,
        }
    }
}

impl fmt::Display for VolumeClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VolumeClaim::Above(c) => write!(f, "k3>{c}"),
            VolumeClaim::Below(c) => write!(f, "k3<{c}"),
        }
    }
}

/// A parametric row, kept as text and expanded on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParametricRow {
    pub line: usize,
    pub pattern: String,
    pub params: Vec<(String, ParamRange)>,
    pub claim: Option<VolumeClaim>,
}

/// Values of one parameter; bounds may name earlier parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamRange {
    List(Vec<u32>),
    Span { lo: Bound, hi: Option<Bound> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    Value(u32),
    Param(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParametricTable {
    pub p1: u32,
    pub sigma: u64,
    /// Largest value an open range takes.
    pub cap: u32,
    pub rows: Vec<ParametricRow>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixtureBody {
    Rows(RowTable),
    B0Templates(TemplateTable),
    IndexProfile(ProfileTable),
    Parametric(ParametricTable),
}

impl FixtureBody {
    pub fn kind(&self) -> &'static str {
        match self {
            FixtureBody::Rows(_) => "rows",
            FixtureBody::B0Templates(_) => "b0-templates",
            FixtureBody::IndexProfile(_) => "index-profile",
            FixtureBody::Parametric(_) => "parametric",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableFixture {
    pub id: u32,
    pub file: String,
    pub body: FixtureBody,
}

struct Parser<'a> {
    file: &'a str,
    headers: BTreeMap<String, (usize, String)>,
    columns: Option<(usize, String)>,
    rows: Vec<(usize, &'a str)>,
}

impl<'a> Parser<'a> {
    fn new(file: &'a str, text: &'a str) -> Result<Self, FixtureError> {
        let mut p = Parser {
            file,
            headers: BTreeMap::new(),
            columns: None,
            rows: Vec::new(),
        };
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('@') {
                let (key, value) = rest.split_once(' ').unwrap_or((rest, ""));
                if p.headers
                    .insert(key.to_string(), (line_no, value.trim().to_string()))
                    .is_some()
                {
                    return Err(p.error(line_no, format!("duplicate header @{key}")));
                }
            } else if p.columns.is_none() {
                p.columns = Some((line_no, line.to_string()));
            } else {
                p.rows.push((line_no, line));
            }
        }
        Ok(p)
    }

    fn error(&self, line: usize, message: impl Into<String>) -> FixtureError {
        FixtureError::Parse {
            file: self.file.to_string(),
            line,
            message: message.into(),
        }
    }

    fn header(&self, key: &str) -> Result<(usize, &str), FixtureError> {
        self.headers
            .get(key)
            .map(|(l, v)| (*l, v.as_str()))
            .ok_or_else(|| self.error(0, format!("missing header @{key}")))
    }

    fn optional(&self, key: &str) -> Option<(usize, &str)> {
        self.headers.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn number<T: std::str::FromStr>(&self, key: &str) -> Result<T, FixtureError> {
        let (line, v) = self.header(key)?;
        v.parse()
            .map_err(|_| self.error(line, format!("bad value `{v}` for @{key}")))
    }

    fn expect_columns(&self, expected: &str) -> Result<(), FixtureError> {
        match &self.columns {
            Some((_, c)) if c == expected => Ok(()),
            Some((line, c)) => Err(self.error(*line, format!("column header `{c}`, expected `{expected}`"))),
            None => Err(self.error(0, "missing column header")),
        }
    }

    fn cells(&self, line: usize, text: &str, count: usize) -> Result<Vec<String>, FixtureError> {
        let cells: Vec<String> = text.split('\t').map(|c| c.trim().to_string()).collect();
        if cells.len() != count {
            return Err(self.error(line, format!("{} cells, expected {count}", cells.len())));
        }
        Ok(cells)
    }

    fn basket(&self, line: usize, text: &str) -> Result<Basket, FixtureError> {
        text.parse().map_err(|e| self.error(line, format!("{e}")))
    }

    fn constraints(&self) -> Result<ClassificationConstraints, FixtureError> {
        let (line, v) = self.header("constraints")?;
        v.parse().map_err(|e| self.error(line, format!("{e}")))
    }
}

impl TableFixture {
    /// Parses fixture text; `file` is used in error messages and for the id
    /// cross-check.
    pub fn parse(file: &str, text: &str) -> Result<Self, FixtureError> {
        let p = Parser::new(file, text)?;
        let id: u32 = p.number("table")?;
        let (kind_line, kind) = p.header("kind")?;
        let body = match kind {
            "rows" => FixtureBody::Rows(parse_rows(&p)?),
            "b0-templates" => FixtureBody::B0Templates(parse_templates(&p)?),
            "index-profile" => FixtureBody::IndexProfile(parse_profile(&p)?),
            "parametric" => FixtureBody::Parametric(parse_parametric(&p)?),
            other => return Err(p.error(kind_line, format!("unknown kind `{other}`"))),
        };
        Ok(TableFixture {
            id,
            file: file.to_string(),
            body,
        })
    }
}

fn optional_cell(s: &str) -> Option<&str> {
    (s != "-").then_some(s)
}

fn parse_rows(p: &Parser) -> Result<RowTable, FixtureError> {
    p.expect_columns("basket\tk3\tM\tlambda\tn1\tm0\trmax\tn2\tflag")?;
    let p1: u32 = p.number("p1")?;
    let case_of = |key: &str| -> Result<Option<BoundCase>, FixtureError> {
        match p.optional(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .ok()
                .and_then(BoundCase::from_number)
                .map(Some)
                .ok_or_else(|| p.error(line, format!("bad case `{v}`"))),
        }
    };
    let case = case_of("case")?.ok_or_else(|| p.error(0, "missing header @case"))?;
    let alt_case = case_of("alt-case")?;
    let (line, policy_text) = p.header("n1-policy")?;
    let n1 = match policy_text {
        "single" => N1Policy::Single,
        w => w
            .strip_prefix("window")
            .and_then(|n| n.parse().ok())
            .map(N1Policy::Window)
            .ok_or_else(|| p.error(line, format!("bad n1 policy `{w}`")))?,
    };
    let check = match p.optional("check") {
        None => None,
        Some((line, v)) => {
            let bad = || p.error(line, format!("bad check rule `{v}`"));
            let mut rx = None;
            let mut rmax = None;
            for token in v.split_whitespace() {
                if let Some(x) = token.strip_prefix("rx<=") {
                    rx = Some(x.parse().map_err(|_| bad())?);
                } else if let Some(x) = token.strip_prefix("rmax<=") {
                    rmax = Some(x.parse().map_err(|_| bad())?);
                } else {
                    return Err(bad());
                }
            }
            Some(CheckRule {
                rx_at_most: rx.ok_or_else(bad)?,
                rmax_at_most: rmax.ok_or_else(bad)?,
            })
        }
    };
    let mut policy = BranchPolicy::for_p1(p1);
    policy.n1 = n1;
    policy.case = case;
    policy.alt_case = alt_case;
    // Printed rows are already the output of the text's own exclusions.
    policy.filter = None;

    let mut rows = Vec::new();
    for &(line, text) in &p.rows {
        let cells = p.cells(line, text, 9)?;
        let basket = p.basket(line, &cells[0])?;
        let number = |i: usize| -> Result<Option<Rational>, FixtureError> {
            optional_cell(&cells[i])
                .map(|c| c.parse().map_err(|_| p.error(line, format!("bad cell `{c}`"))))
                .transpose()
        };
        let k3 = match optional_cell(&cells[1]) {
            None => None,
            Some("<0") => Some(VolumeCell::Negative),
            Some(c) => Some(VolumeCell::Value(
                c.parse().map_err(|_| p.error(line, format!("bad cell `{c}`")))?,
            )),
        };
        let flag = RowFlag::parse(&cells[8])
            .ok_or_else(|| p.error(line, format!("bad flag `{}`", cells[8])))?;
        if flag == RowFlag::Check && check.is_none() {
            return Err(p.error(line, "check flag without @check rule"));
        }
        if flag == RowFlag::Star && alt_case.is_none() {
            return Err(p.error(line, "star flag without @alt-case"));
        }
        rows.push(TableRow {
            line,
            basket,
            k3,
            big_m: number(2)?,
            lambda: number(3)?,
            n1: number(4)?,
            m0: number(5)?,
            rmax: number(6)?,
            n2: number(7)?,
            flag,
        });
    }
    Ok(RowTable {
        p1,
        policy,
        check,
        rows,
    })
}

fn parse_templates(p: &Parser) -> Result<TemplateTable, FixtureError> {
    p.expect_columns("fixed\tfree")?;
    let constraints = p.constraints()?;
    let mut rows = Vec::new();
    for &(line, text) in &p.rows {
        let cells = p.cells(line, text, 2)?;
        let fixed = p.basket(line, &cells[0])?;
        let free: u32 = cells[1]
            .parse()
            .map_err(|_| p.error(line, format!("bad slot count `{}`", cells[1])))?;
        let mut counts = [0u32; 3];
        for &(pair, k) in fixed.entries() {
            match (pair.b(), pair.r()) {
                (1, r @ 2..=4) => counts[r as usize - 2] += k,
                _ => return Err(p.error(line, format!("fixed part may only hold (1,2), (1,3), (1,4), got {pair}"))),
            }
        }
        rows.push((line, (counts[0], counts[1], counts[2], free)));
    }
    Ok(TemplateTable { constraints, rows })
}

fn parse_profile(p: &Parser) -> Result<ProfileTable, FixtureError> {
    p.expect_columns("basket")?;
    let (line, slots_text) = p.header("slots")?;
    let slots = slots_text
        .split_whitespace()
        .map(|s| s.parse().map_err(|e| p.error(line, format!("{e}"))))
        .collect::<Result<Vec<IndexSlot>, _>>()?;
    let baskets = p
        .rows
        .iter()
        .map(|&(line, text)| p.basket(line, text.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProfileTable {
        p1: p.number("p1")?,
        lcm: p.number("lcm")?,
        slots,
        constraints: p.constraints()?,
        baskets,
    })
}

fn parse_bound(s: &str) -> Option<Bound> {
    if s.chars().all(|c| c.is_ascii_digit()) {
        s.parse().ok().map(Bound::Value)
    } else if is_ident(s) {
        Some(Bound::Param(s.to_string()))
    } else {
        None
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric())
}

fn parse_params(s: &str) -> Option<Vec<(String, ParamRange)>> {
    if s == "-" {
        return Some(Vec::new());
    }
    s.split_whitespace()
        .map(|token| {
            let (name, range) = token.split_once('=')?;
            if !is_ident(name) {
                return None;
            }
            let range = if let Some((lo, hi)) = range.split_once("..") {
                ParamRange::Span {
                    lo: parse_bound(lo)?,
                    hi: if hi.is_empty() { None } else { Some(parse_bound(hi)?) },
                }
            } else {
                ParamRange::List(
                    range
                        .split(',')
                        .map(|v| v.parse().ok())
                        .collect::<Option<Vec<u32>>>()?,
                )
            };
            Some((name.to_string(), range))
        })
        .collect()
}

fn parse_parametric(p: &Parser) -> Result<ParametricTable, FixtureError> {
    p.expect_columns("pattern\tparams\tclaim")?;
    let mut rows = Vec::new();
    for &(line, text) in &p.rows {
        let cells = p.cells(line, text, 3)?;
        let params = parse_params(&cells[1])
            .ok_or_else(|| p.error(line, format!("bad parameters `{}`", cells[1])))?;
        let claim = match cells[2].as_str() {
            "-" => None,
            c => {
                let bad = || p.error(line, format!("bad claim `{c}`"));
                let (ctor, v): (fn(Rational) -> VolumeClaim, &str) =
                    if let Some(v) = c.strip_prefix("k3>") {
                        (VolumeClaim::Above, v)
                    } else if let Some(v) = c.strip_prefix("k3<") {
                        (VolumeClaim::Below, v)
                    } else {
                        return Err(bad());
                    };
                Some(ctor(v.parse().map_err(|_| bad())?))
            }
        };
        let row = ParametricRow {
            line,
            pattern: cells[0].clone(),
            params,
            claim,
        };
        // Surface pattern errors at load time.
        let probe: BTreeMap<String, u32> = row.params.iter().map(|(n, _)| (n.clone(), 5)).collect();
        substitute(&row.pattern, &probe).map_err(|m| p.error(line, m))?;
        rows.push(row);
    }
    Ok(ParametricTable {
        p1: p.number("p1")?,
        sigma: p.number("sigma")?,
        cap: p.number("cap")?,
        rows,
    })
}

/// Replaces parameter names (optionally `name+k`) inside pair brackets.
fn substitute(pattern: &str, values: &BTreeMap<String, u32>) -> Result<String, String> {
    let mut out = String::with_capacity(pattern.len());
    let mut token = String::new();
    let mut inside = false;
    let flush = |token: &mut String, out: &mut String| -> Result<(), String> {
        if token.is_empty() {
            return Ok(());
        }
        let (name, offset) = match token.split_once('+') {
            Some((n, k)) => (n, k.parse::<u32>().map_err(|_| format!("bad offset in `{token}`"))?),
            None => (token.as_str(), 0),
        };
        let value = if name.chars().all(|c| c.is_ascii_digit()) {
            name.parse::<u32>().map_err(|_| format!("bad number `{name}`"))?
        } else {
            *values.get(name).ok_or_else(|| format!("unknown parameter `{name}`"))?
        };
        let _ = write!(out, "{}", value + offset);
        token.clear();
        Ok(())
    };
    for c in pattern.chars() {
        match c {
            '(' => {
                inside = true;
                out.push(c);
            }
            ',' | ')' if inside => {
                flush(&mut token, &mut out)?;
                if c == ')' {
                    inside = false;
                }
                out.push(c);
            }
            _ if inside && !c.is_whitespace() => token.push(c),
            _ => out.push(c),
        }
    }
    Ok(out)
}

impl ParametricRow {
    /// Every basket the row stands for, with open ranges stopped at `cap`.
    /// Instances with an invalid pair or an index above `cap` are dropped.
    pub fn expand(&self, cap: u32) -> Vec<Basket> {
        fn go(
            row: &ParametricRow,
            cap: u32,
            i: usize,
            values: &mut BTreeMap<String, u32>,
            out: &mut BTreeSet<Basket>,
        ) {
            let Some((name, range)) = row.params.get(i) else {
                if let Ok(text) = substitute(&row.pattern, values) {
                    if let Ok(b) = text.parse::<Basket>() {
                        if b.pairs().all(|p| p.r() <= cap) {
                            out.insert(b);
                        }
                    }
                }
                return;
            };
            let resolve = |b: &Bound| match b {
                Bound::Value(v) => Some(*v),
                Bound::Param(n) => values.get(n).copied(),
            };
            let choices: Vec<u32> = match range {
                ParamRange::List(v) => v.clone(),
                ParamRange::Span { lo, hi } => {
                    let (Some(lo), Some(hi)) = (resolve(lo), hi.as_ref().map_or(Some(cap), resolve))
                    else {
                        return;
                    };
                    (lo..=hi).collect()
                }
            };
            for v in choices {
                values.insert(name.clone(), v);
                go(row, cap, i + 1, values, out);
            }
            values.remove(name);
        }
        let mut out = BTreeSet::new();
        go(self, cap, 0, &mut BTreeMap::new(), &mut out);
        out.into_iter().collect()
    }
}

/// One cell that disagrees with the recomputed value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub line: usize,
    pub subject: String,
    pub column: String,
    pub expected: String,
    pub computed: String,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {} {}: {} expected {}, computed {}",
            self.line, self.subject, self.column, self.expected, self.computed
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableStatus {
    Verified,
    Absent { reason: String },
}

/// The outcome of checking one table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableReport {
    pub id: u32,
    pub kind: String,
    pub status: TableStatus,
    /// Rows, templates or expansions examined.
    pub checked: usize,
    pub discrepancies: Vec<Discrepancy>,
    pub notes: Vec<String>,
}

impl TableReport {
    /// No discrepancies. An absent table passes: there is nothing to contradict.
    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut s = match &self.status {
            TableStatus::Absent { reason } => format!("table {}: ABSENT ({reason})\n", self.id),
            TableStatus::Verified => format!(
                "table {} [{}]: {} checked, {} discrepancies: {}\n",
                self.id,
                self.kind,
                self.checked,
                self.discrepancies.len(),
                if self.passed() { "OK" } else { "MISMATCH" }
            ),
        };
        for d in &self.discrepancies {
            let _ = writeln!(s, "  {d}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        s
    }

    /// One `key=value` record per discrepancy, or one summary record.
    pub fn to_records(&self) -> String {
        let status = match &self.status {
            TableStatus::Absent { .. } => "absent",
            TableStatus::Verified if self.passed() => "ok",
            TableStatus::Verified => "mismatch",
        };
        let mut s = format!(
            "table={}\tkind={}\tstatus={status}\tchecked={}\tdiscrepancies={}\n",
            self.id,
            self.kind,
            self.checked,
            self.discrepancies.len()
        );
        for d in &self.discrepancies {
            let _ = writeln!(
                s,
                "table={}\tline={}\tsubject={}\tcolumn={}\texpected={}\tcomputed={}",
                self.id, d.line, d.subject, d.column, d.expected, d.computed
            );
        }
        s
    }
}

/// Checks one table from the given source.
pub fn verify_table(
    source: &FixtureSource,
    id: u32,
    execution: Execution,
) -> Result<TableReport, FixtureError> {
    if let Some((_, reason)) = ABSENT_TABLES.iter().find(|(t, _)| *t == id) {
        return Ok(absent_report(id, reason));
    }
    let fixture = source.load(id)?;
    if fixture.id != id {
        return Err(FixtureError::Parse {
            file: fixture.file,
            line: 0,
            message: format!("@table {} in the file for table {id}", fixture.id),
        });
    }
    let (checked, discrepancies, notes) = match &fixture.body {
        FixtureBody::Rows(t) => verify_rows(t, execution),
        FixtureBody::B0Templates(t) => verify_templates(t)?,
        FixtureBody::IndexProfile(t) => verify_profile(t),
        FixtureBody::Parametric(t) => verify_parametric(t),
    };
    Ok(TableReport {
        id,
        kind: fixture.body.kind().to_string(),
        status: TableStatus::Verified,
        checked,
        discrepancies,
        notes,
    })
}

/// Checks every table with a fixture, plus the absent ones, by number.
pub fn verify_all(source: &FixtureSource, execution: Execution) -> Result<Vec<TableReport>, FixtureError> {
    let mut ids: BTreeSet<u32> = source.table_ids()?.into_iter().collect();
    ids.extend(ABSENT_TABLES.iter().map(|(t, _)| *t));
    ids.into_iter().map(|id| verify_table(source, id, execution)).collect()
}

fn absent_report(id: u32, reason: &str) -> TableReport {
    let mut notes = Vec::new();
    if id == 8 {
        let mut policy = BranchPolicy::for_p1(0);
        policy.filter = None;
        for text in TABLE8_PROSE_BASKETS {
            let basket: Basket = text.parse().expect("built-in basket");
            let wb = WeightedBasket::new(basket, 0);
            notes.push(match table_pipeline(&wb, &policy) {
                Ok(r) => format!(
                    "discussed basket {}: k3={} M={} lambda={} n1={} m0={} rmax={} n2={}",
                    r.basket, r.volume.k3, r.volume.big_m, r.volume.lambda, r.n1, r.m0, r.volume.rmax, r.headline_n2
                ),
                Err(e) => format!("discussed basket {}: {e}", wb.basket()),
            });
        }
    }
    TableReport {
        id,
        kind: "absent".to_string(),
        status: TableStatus::Absent {
            reason: reason.to_string(),
        },
        checked: 0,
        discrepancies: Vec::new(),
        notes,
    }
}

fn verify_rows(t: &RowTable, execution: Execution) -> (usize, Vec<Discrepancy>, Vec<String>) {
    let per_row = execution.map(&t.rows, |row| check_row(t, row));
    let mut notes = Vec::new();
    let blanks = t
        .rows
        .iter()
        .filter(|r| r.flag == RowFlag::None && [&r.big_m, &r.lambda, &r.n1, &r.m0, &r.rmax, &r.n2].iter().any(|c| c.is_none()))
        .count();
    if blanks > 0 {
        notes.push(format!("{blanks} computed row(s) have blank cells, which are not compared"));
    }
    (t.rows.len(), per_row.into_iter().flatten().collect(), notes)
}

/// The cell comparisons for one row.
pub fn check_row(t: &RowTable, row: &TableRow) -> Vec<Discrepancy> {
    let wb = WeightedBasket::new(row.basket.clone(), t.p1);
    let mut out = Vec::new();
    let mut diff = |column: &str, expected: String, computed: String| {
        out.push(Discrepancy {
            line: row.line,
            subject: row.basket.to_string(),
            column: column.to_string(),
            expected,
            computed,
        });
    };
    let k3 = wb.anti_volume();
    match &row.k3 {
        Some(VolumeCell::Negative) if !k3.is_negative() => diff("k3", "<0".into(), k3.to_string()),
        Some(VolumeCell::Value(v)) if v != k3 => diff("k3", v.to_string(), k3.to_string()),
        _ => {}
    }
    // A row printed with a non-positive volume carries nothing else.
    let volume_only = match &row.k3 {
        Some(VolumeCell::Negative) => true,
        Some(VolumeCell::Value(v)) => !v.is_positive(),
        None => false,
    };
    match row.flag {
        RowFlag::Cross => return out,
        RowFlag::None if volume_only => return out,
        RowFlag::Check => {
            let rule = t.check.expect("checked at parse time");
            let rx = r_index(&row.basket);
            let rmax = r_max(&row.basket).unwrap_or(0);
            if rx > rule.rx_at_most || rmax > rule.rmax_at_most {
                diff(
                    "check",
                    format!("rx<={} rmax<={}", rule.rx_at_most, rule.rmax_at_most),
                    format!("rx={rx} rmax={rmax}"),
                );
            }
            return out;
        }
        RowFlag::None | RowFlag::Question | RowFlag::Star => {}
    }
    let report = match table_pipeline(&wb, &t.policy) {
        Ok(r) => r,
        Err(e) => {
            diff("pipeline", "a report".into(), e.to_string());
            return out;
        }
    };
    let n2 = match row.flag {
        RowFlag::Star => {
            let alt = t.policy.alt_case.expect("checked at parse time");
            report
                .bound_for(CriterionUsed::B(alt))
                .expect("every case is computed")
        }
        _ => report.headline_n2,
    };
    let computed: [(&str, &Option<Rational>, Rational); 6] = [
        ("M", &row.big_m, Rational::from(report.volume.big_m)),
        ("lambda", &row.lambda, report.volume.lambda.clone()),
        ("n1", &row.n1, Rational::from(report.n1)),
        ("m0", &row.m0, Rational::from(report.m0)),
        ("rmax", &row.rmax, Rational::from(report.volume.rmax)),
        ("n2", &row.n2, Rational::from(n2)),
    ];
    for (column, expected, value) in computed {
        if let Some(e) = expected {
            if *e != value {
                diff(column, e.to_string(), value.to_string());
            }
        }
    }
    out
}

fn signature_text(s: &(u32, u32, u32, u32)) -> String {
    format!("n12={} n13={} n14={} sigma5={}", s.0, s.1, s.2, s.3)
}

fn verify_templates(t: &TemplateTable) -> Result<(usize, Vec<Discrepancy>, Vec<String>), FixtureError> {
    let computed: BTreeSet<(u32, u32, u32, u32)> = enumerate_b0(&t.constraints)
        .map_err(crate::error::ClassifyError::from)?
        .iter()
        .map(|c| c.signature())
        .collect();
    let printed: BTreeSet<(u32, u32, u32, u32)> = t.rows.iter().map(|(_, s)| *s).collect();
    let mut out = Vec::new();
    for (line, s) in &t.rows {
        if !computed.contains(s) {
            out.push(Discrepancy {
                line: *line,
                subject: signature_text(s),
                column: "template".into(),
                expected: "present".into(),
                computed: "absent".into(),
            });
        }
    }
    for s in computed.difference(&printed) {
        out.push(Discrepancy {
            line: 0,
            subject: signature_text(s),
            column: "template".into(),
            expected: "absent".into(),
            computed: "present".into(),
        });
    }
    let notes = vec![format!("constraints: {}", t.constraints)];
    Ok((t.rows.len(), out, notes))
}

fn verify_profile(t: &ProfileTable) -> (usize, Vec<Discrepancy>, Vec<String>) {
    let computed: BTreeSet<Basket> = enumerate_index_profiles(t.lcm, &t.slots, |b| {
        t.constraints.admits(&WeightedBasket::new(b.clone(), t.p1))
    })
    .into_iter()
    .collect();
    let printed: BTreeSet<Basket> = t.baskets.iter().cloned().collect();
    let mut out = Vec::new();
    for b in printed.difference(&computed) {
        out.push(Discrepancy {
            line: 0,
            subject: b.to_string(),
            column: "basket".into(),
            expected: "present".into(),
            computed: "absent".into(),
        });
    }
    for b in computed.difference(&printed) {
        out.push(Discrepancy {
            line: 0,
            subject: b.to_string(),
            column: "basket".into(),
            expected: "absent".into(),
            computed: "present".into(),
        });
    }
    (t.baskets.len(), out, Vec::new())
}

fn verify_parametric(t: &ParametricTable) -> (usize, Vec<Discrepancy>, Vec<String>) {
    let mut out = Vec::new();
    let mut checked = 0;
    for row in &t.rows {
        let expansions = row.expand(t.cap);
        if expansions.is_empty() {
            out.push(Discrepancy {
                line: row.line,
                subject: row.pattern.clone(),
                column: "expansion".into(),
                expected: "at least one basket".into(),
                computed: "none".into(),
            });
        }
        for b in expansions {
            checked += 1;
            let mut diff = |column: &str, expected: String, computed: String| {
                out.push(Discrepancy {
                    line: row.line,
                    subject: b.to_string(),
                    column: column.to_string(),
                    expected,
                    computed,
                });
            };
            let s = sigma(&b);
            if s != t.sigma {
                diff("sigma", t.sigma.to_string(), s.to_string());
            }
            if let Some(claim) = &row.claim {
                let wb = WeightedBasket::new(b.clone(), t.p1);
                if !claim.holds(wb.anti_volume()) {
                    diff("claim", claim.to_string(), format!("k3={}", wb.anti_volume()));
                }
            }
        }
    }
    let notes = vec![format!("open ranges expanded up to {}", t.cap)];
    (checked, out, notes)
}
