//! Line-oriented ASCII file formats: MFQ (q-expansion), MFB (basis), MFE
//! (eigensystem), MFX (matrix cache), MFR (report). All integers decimal,
//! lines '\n'-terminated; residues canonical in [0, p^prec).

use crate::arith::{kronecker_character, DirichletCharacter, PrimeContext};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::overconv::EigenSystem;
use crate::qseries::{Meta, QExpansion};
use crate::spaces::{BasisMatrix, SourceTag, SpaceDescriptor};
use std::fmt::Write as _;
use std::path::Path;

/// Character spec grammar: "trivial" | "kronecker:<D>" | "table:<m>:<v_1,...>".
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CharSpec {
    Trivial,
    Kronecker(i64),
    Table { modulus: u64, values: Vec<u64> },
}

impl CharSpec {
    pub fn parse(s: &str) -> Result<CharSpec> {
        let s = s.trim();
        if s == "trivial" {
            return Ok(CharSpec::Trivial);
        }
        if let Some(d) = s.strip_prefix("kronecker:") {
            let d: i64 = d
                .parse()
                .map_err(|_| Error::FormatError(format!("bad kronecker discriminant: {d}")))?;
            return Ok(CharSpec::Kronecker(d));
        }
        if let Some(rest) = s.strip_prefix("table:") {
            let (m, vals) = rest
                .split_once(':')
                .ok_or_else(|| Error::FormatError(format!("bad table character spec: {s}")))?;
            let modulus: u64 =
                m.parse().map_err(|_| Error::FormatError(format!("bad table modulus: {m}")))?;
            let values: Result<Vec<u64>> = vals
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::FormatError(format!("bad table value: {v}")))
                })
                .collect();
            return Ok(CharSpec::Table { modulus, values: values? });
        }
        Err(Error::FormatError(format!("unrecognized character spec: {s}")))
    }

    pub fn realize(&self, ctx: &PrimeContext) -> Result<DirichletCharacter> {
        match self {
            CharSpec::Trivial => Ok(DirichletCharacter::trivial(*ctx)),
            CharSpec::Kronecker(d) => kronecker_character(*d, ctx),
            CharSpec::Table { modulus, values } => {
                DirichletCharacter::from_table(*ctx, *modulus, values.clone())
            }
        }
    }

    /// Canonical spec for a character: trivial and Kronecker forms are
    /// recognized, anything else becomes an explicit table.
    pub fn from_character(chi: &DirichletCharacter) -> CharSpec {
        if chi.is_trivial() && chi.modulus() == 1 {
            return CharSpec::Trivial;
        }
        let m = chi.modulus() as i64;
        for d in [-m, m] {
            if let Ok(k) = kronecker_character(d, chi.ctx()) {
                if k == *chi {
                    return CharSpec::Kronecker(d);
                }
            }
        }
        CharSpec::Table {
            modulus: chi.modulus(),
            values: (0..chi.modulus()).map(|x| chi.eval(x)).collect(),
        }
    }
}

impl std::fmt::Display for CharSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CharSpec::Trivial => write!(f, "trivial"),
            CharSpec::Kronecker(d) => write!(f, "kronecker:{d}"),
            CharSpec::Table { modulus, values } => {
                let vals: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                write!(f, "table:{modulus}:{}", vals.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub p: u64,
    pub prec: u32,
    pub qprec: usize,
    pub level: u64,
    pub weight: i64,
    pub char_spec: CharSpec,
}

impl Header {
    pub fn context(&self) -> Result<PrimeContext> {
        PrimeContext::new(self.p, self.prec, self.qprec)
    }

    /// Check ring consistency against a caller-supplied context.
    pub fn check_ctx(&self, ctx: &PrimeContext) -> Result<()> {
        if self.p != ctx.p() || self.prec != ctx.nprec() {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    fn format_into(&self, out: &mut String) {
        let _ = writeln!(out, "p={} prec={} qprec={}", self.p, self.prec, self.qprec);
        let _ =
            writeln!(out, "level={} weight={} char={}", self.level, self.weight, self.char_spec);
    }

    pub fn meta(&self, ctx: &PrimeContext) -> Result<Meta> {
        Ok(Meta {
            level: self.level,
            weight: self.weight,
            character: self.char_spec.realize(ctx)?,
        })
    }
}

fn parse_kv(line: &str, keys: &[&str]) -> Result<Vec<String>> {
    let mut out = Vec::with_capacity(keys.len());
    let mut parts = line.split_whitespace();
    for key in keys {
        let part = parts
            .next()
            .ok_or_else(|| Error::FormatError(format!("missing field {key} in: {line}")))?;
        let value = part
            .strip_prefix(&format!("{key}="))
            .ok_or_else(|| Error::FormatError(format!("expected {key}=... in: {line}")))?;
        out.push(value.to_string());
    }
    Ok(out)
}

fn parse_header(lines: &mut std::str::Lines<'_>) -> Result<Header> {
    let l2 = lines.next().ok_or_else(|| Error::FormatError("missing parameter line".into()))?;
    let v = parse_kv(l2, &["p", "prec", "qprec"])?;
    let p: u64 = v[0].parse().map_err(|_| Error::FormatError("bad p".into()))?;
    let prec: u32 = v[1].parse().map_err(|_| Error::FormatError("bad prec".into()))?;
    let qprec: usize = v[2].parse().map_err(|_| Error::FormatError("bad qprec".into()))?;
    let l3 = lines.next().ok_or_else(|| Error::FormatError("missing metadata line".into()))?;
    let v = parse_kv(l3, &["level", "weight", "char"])?;
    let level: u64 = v[0].parse().map_err(|_| Error::FormatError("bad level".into()))?;
    let weight: i64 = v[1].parse().map_err(|_| Error::FormatError("bad weight".into()))?;
    let char_spec = CharSpec::parse(&v[2])?;
    Ok(Header { p, prec, qprec, level, weight, char_spec })
}

fn parse_residues(s: &str, expect: usize, what: &str) -> Result<Vec<u64>> {
    let vals: std::result::Result<Vec<u64>, _> =
        s.split_whitespace().map(|t| t.parse::<u64>()).collect();
    let vals = vals.map_err(|_| Error::FormatError(format!("bad residue in {what}")))?;
    if vals.len() != expect {
        return Err(Error::FormatError(format!(
            "{what}: expected {expect} residues, found {}",
            vals.len()
        )));
    }
    Ok(vals)
}

fn expect_magic(lines: &mut std::str::Lines<'_>, magic: &str) -> Result<()> {
    match lines.next() {
        Some(l) if l.trim() == magic => Ok(()),
        Some(l) => Err(Error::FormatError(format!("expected `{magic}`, found `{l}`"))),
        None => Err(Error::FormatError("empty file".into())),
    }
}

// ---------------------------------------------------------------- MFQ

pub fn format_mfq(f: &QExpansion) -> String {
    let ctx = f.ctx();
    let (level, weight, char_spec) = match f.meta() {
        Some(m) => (m.level, m.weight, CharSpec::from_character(&m.character)),
        None => (1, 0, CharSpec::Trivial),
    };
    let header =
        Header { p: ctx.p(), prec: ctx.nprec(), qprec: f.trunc(), level, weight, char_spec };
    let mut out = String::from("MFQ 1\n");
    header.format_into(&mut out);
    let coeffs: Vec<String> = f.coeffs().iter().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "coeffs: {}", coeffs.join(" "));
    out
}

pub fn parse_mfq(text: &str) -> Result<(Header, Vec<u64>)> {
    let mut lines = text.lines();
    expect_magic(&mut lines, "MFQ 1")?;
    let header = parse_header(&mut lines)?;
    let l = lines.next().ok_or_else(|| Error::FormatError("missing coeffs line".into()))?;
    let body = l
        .strip_prefix("coeffs:")
        .ok_or_else(|| Error::FormatError("expected coeffs: line".into()))?;
    let coeffs = parse_residues(body, header.qprec + 1, "coeffs")?;
    Ok((header, coeffs))
}

pub fn read_mfq(path: &Path, ctx: &PrimeContext) -> Result<QExpansion> {
    let text = std::fs::read_to_string(path)?;
    let (header, coeffs) = parse_mfq(&text)?;
    header.check_ctx(ctx)?;
    let row_ctx = ctx.with_m(header.qprec.max(1));
    let meta = header.meta(&row_ctx)?;
    QExpansion::new(row_ctx, coeffs, Some(meta))
}

pub fn write_mfq(path: &Path, f: &QExpansion) -> Result<()> {
    std::fs::write(path, format_mfq(f))?;
    Ok(())
}

// ---------------------------------------------------------------- MFB

pub fn format_mfb(b: &BasisMatrix) -> String {
    let ctx = b.ctx();
    let d = b.descriptor();
    let header = Header {
        p: ctx.p(),
        prec: ctx.nprec(),
        qprec: b.trunc(),
        level: d.level,
        weight: d.weight,
        char_spec: CharSpec::from_character(&d.character),
    };
    let mut out = String::from("MFB 1\n");
    header.format_into(&mut out);
    if let Some(dim) = d.dim_hint {
        let _ = writeln!(out, "dim={dim}");
    }
    if let Some(sturm) = d.sturm_bound {
        let _ = writeln!(out, "sturm={sturm}");
    }
    let _ = writeln!(out, "rows={}", b.rank());
    for i in 0..b.rank() {
        let coeffs: Vec<String> = b.echelon().rows[i].iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "coeffs: {}", coeffs.join(" "));
    }
    out
}

pub fn parse_mfb(text: &str) -> Result<(Header, Option<usize>, Option<usize>, Vec<Vec<u64>>)> {
    let mut lines = text.lines();
    expect_magic(&mut lines, "MFB 1")?;
    let header = parse_header(&mut lines)?;
    let mut dim = None;
    let mut sturm = None;
    let mut nrows = None;
    for _ in 0..3 {
        let l = lines.next().ok_or_else(|| Error::FormatError("missing rows= line".into()))?;
        if let Some(v) = l.strip_prefix("dim=") {
            dim = Some(v.parse().map_err(|_| Error::FormatError("bad dim".into()))?);
        } else if let Some(v) = l.strip_prefix("sturm=") {
            sturm = Some(v.parse().map_err(|_| Error::FormatError("bad sturm".into()))?);
        } else if let Some(v) = l.strip_prefix("rows=") {
            nrows = Some(v.parse().map_err(|_| Error::FormatError("bad rows".into()))?);
            break;
        } else {
            return Err(Error::FormatError(format!("unexpected line: {l}")));
        }
    }
    let nrows: usize = nrows.ok_or_else(|| Error::FormatError("missing rows= line".into()))?;
    let mut rows = Vec::with_capacity(nrows);
    for i in 0..nrows {
        let l =
            lines.next().ok_or_else(|| Error::FormatError(format!("file truncated at row {i}")))?;
        let body = l
            .strip_prefix("coeffs:")
            .ok_or_else(|| Error::FormatError(format!("expected coeffs: line for row {i}")))?;
        rows.push(parse_residues(body, header.qprec + 1, &format!("row {i}"))?);
    }
    Ok((header, dim, sturm, rows))
}

pub fn read_mfb(path: &Path, ctx: &PrimeContext) -> Result<BasisMatrix> {
    let text = std::fs::read_to_string(path)?;
    let (header, dim, sturm, rows) = parse_mfb(&text)?;
    header.check_ctx(ctx)?;
    let row_ctx = ctx.with_m(header.qprec.max(1));
    let character = header.char_spec.realize(&row_ctx)?;
    let meta = Meta { level: header.level, weight: header.weight, character: character.clone() };
    let descriptor = SpaceDescriptor {
        level: header.level,
        weight: header.weight,
        character,
        source: SourceTag::Ingested,
        dim_hint: dim,
        sturm_bound: sturm,
    };
    let qrows: Result<Vec<QExpansion>> =
        rows.into_iter().map(|r| QExpansion::new(row_ctx, r, Some(meta.clone()))).collect();
    // Echelonizing is the identity on rows already in echelon form, so
    // write-then-ingest round-trips.
    BasisMatrix::echelonize(row_ctx, descriptor, &qrows?)
}

pub fn write_mfb(path: &Path, b: &BasisMatrix) -> Result<()> {
    std::fs::write(path, format_mfb(b))?;
    Ok(())
}

// ---------------------------------------------------------------- MFE

pub fn format_mfe(e: &EigenSystem) -> String {
    let header = Header {
        p: e.ctx.p(),
        prec: e.ctx.nprec(),
        qprec: e.trunc(),
        level: e.level,
        weight: e.weight,
        char_spec: CharSpec::from_character(&e.character),
    };
    let mut out = String::from("MFE 1\n");
    header.format_into(&mut out);
    let _ = writeln!(out, "eprec={}", e.precision);
    let _ = writeln!(out, "up={}", e.up_eigenvalue);
    let a: Vec<String> = e.a[1..].iter().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "a: {}", a.join(" "));
    out
}

pub fn parse_mfe(text: &str) -> Result<(Header, u32, u64, Vec<u64>)> {
    let mut lines = text.lines();
    expect_magic(&mut lines, "MFE 1")?;
    let header = parse_header(&mut lines)?;
    let l = lines.next().ok_or_else(|| Error::FormatError("missing eprec= line".into()))?;
    let eprec: u32 = l
        .strip_prefix("eprec=")
        .ok_or_else(|| Error::FormatError("expected eprec=".into()))?
        .parse()
        .map_err(|_| Error::FormatError("bad eprec".into()))?;
    let l = lines.next().ok_or_else(|| Error::FormatError("missing up= line".into()))?;
    let up: u64 = l
        .strip_prefix("up=")
        .ok_or_else(|| Error::FormatError("expected up=".into()))?
        .parse()
        .map_err(|_| Error::FormatError("bad up".into()))?;
    let l = lines.next().ok_or_else(|| Error::FormatError("missing a: line".into()))?;
    let body = l.strip_prefix("a:").ok_or_else(|| Error::FormatError("expected a: line".into()))?;
    let a = parse_residues(body, header.qprec, "a")?;
    Ok((header, eprec, up, a))
}

pub fn read_mfe(path: &Path, ctx: &PrimeContext) -> Result<EigenSystem> {
    let text = std::fs::read_to_string(path)?;
    let (header, eprec, up, a_tail) = parse_mfe(&text)?;
    header.check_ctx(ctx)?;
    let row_ctx = ctx.with_m(header.qprec.max(1));
    let character = header.char_spec.realize(&row_ctx)?;
    let mut a = Vec::with_capacity(a_tail.len() + 1);
    a.push(0);
    a.extend(a_tail);
    if a.len() < 2 || a[1] != 1 {
        return Err(Error::FormatError("eigensystem must be normalized with a_1 = 1".into()));
    }
    Ok(EigenSystem {
        ctx: row_ctx,
        weight: header.weight,
        level: header.level,
        character,
        up_eigenvalue: up,
        a,
        precision: eprec,
    })
}

pub fn write_mfe(path: &Path, e: &EigenSystem) -> Result<()> {
    std::fs::write(path, format_mfe(e))?;
    Ok(())
}

// ---------------------------------------------------------------- MFX

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheKey {
    pub p: u64,
    pub prec: u32,
    pub qprec: usize,
    pub level: u64,
    pub weight: i64,
    pub char_spec: CharSpec,
    pub depth: usize,
}

impl std::fmt::Display for CacheKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({},{},{},{},{},{},{})",
            self.p, self.prec, self.qprec, self.level, self.weight, self.char_spec, self.depth
        )
    }
}

impl CacheKey {
    pub fn parse(s: &str) -> Result<CacheKey> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::FormatError(format!("bad cache key: {s}")))?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() < 7 {
            return Err(Error::FormatError(format!("bad cache key: {s}")));
        }
        // The char spec may contain commas (table form); it spans everything
        // between the fifth field and the last.
        let char_text = parts[5..parts.len() - 1].join(",");
        let bad = |what: &str| Error::FormatError(format!("bad cache key {what}: {s}"));
        Ok(CacheKey {
            p: parts[0].parse().map_err(|_| bad("p"))?,
            prec: parts[1].parse().map_err(|_| bad("prec"))?,
            qprec: parts[2].parse().map_err(|_| bad("qprec"))?,
            level: parts[3].parse().map_err(|_| bad("level"))?,
            weight: parts[4].parse().map_err(|_| bad("weight"))?,
            char_spec: CharSpec::parse(&char_text)?,
            depth: parts[parts.len() - 1].parse().map_err(|_| bad("depth"))?,
        })
    }

    /// Filesystem-safe name for this key.
    pub fn file_stem(&self) -> String {
        let chs = self.char_spec.to_string().replace([':', ','], "_").replace('-', "m");
        format!(
            "p{}_n{}_q{}_N{}_k{}_{}_J{}",
            self.p, self.prec, self.qprec, self.level, self.weight, chs, self.depth
        )
    }
}

pub fn format_mfx(key: &CacheKey, m: &Matrix) -> String {
    let mut out = String::from("MFX 1\n");
    let _ = writeln!(out, "{key}");
    let _ = writeln!(out, "n={}", m.nrows());
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn parse_mfx(text: &str) -> Result<(CacheKey, Vec<Vec<u64>>)> {
    let mut lines = text.lines();
    expect_magic(&mut lines, "MFX 1")?;
    let key_line = lines.next().ok_or_else(|| Error::FormatError("missing key line".into()))?;
    let key = CacheKey::parse(key_line)?;
    let l = lines.next().ok_or_else(|| Error::FormatError("missing n= line".into()))?;
    let n: usize = l
        .strip_prefix("n=")
        .ok_or_else(|| Error::FormatError("expected n=".into()))?
        .parse()
        .map_err(|_| Error::FormatError("bad n".into()))?;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let l = lines
            .next()
            .ok_or_else(|| Error::FormatError(format!("matrix truncated at row {i}")))?;
        rows.push(parse_residues(l, n, &format!("matrix row {i}"))?);
    }
    Ok((key, rows))
}

pub fn read_mfx(path: &Path, expected_key: &CacheKey, ctx: &PrimeContext) -> Result<Matrix> {
    let text = std::fs::read_to_string(path)?;
    let (key, rows) = parse_mfx(&text)?;
    if key != *expected_key {
        return Err(Error::ContextMismatch);
    }
    Ok(Matrix::from_rows(*ctx, rows))
}

pub fn write_mfx(path: &Path, key: &CacheKey, m: &Matrix) -> Result<()> {
    std::fs::write(path, format_mfx(key, m))?;
    Ok(())
}

// ---------------------------------------------------------------- MFR

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReportRecord {
    /// (check name, pass, effective precision exponent)
    pub checks: Vec<(String, bool, u32)>,
}

impl ReportRecord {
    pub fn push(&mut self, name: &str, pass: bool, prec: u32) {
        debug_assert!(!name.contains(' '));
        self.checks.push((name.to_string(), pass, prec));
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|&(_, p, _)| p)
    }
}

pub fn format_mfr(r: &ReportRecord) -> String {
    let mut out = String::from("MFR 1\n");
    for (name, pass, prec) in &r.checks {
        let verdict = if *pass { "pass" } else { "fail" };
        let _ = writeln!(out, "check {name} {verdict} prec={prec}");
    }
    out
}

pub fn parse_mfr(text: &str) -> Result<ReportRecord> {
    let mut lines = text.lines();
    expect_magic(&mut lines, "MFR 1")?;
    let mut rec = ReportRecord::default();
    for l in lines {
        if l.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "check" {
            return Err(Error::FormatError(format!("bad report line: {l}")));
        }
        let pass = match parts[2] {
            "pass" => true,
            "fail" => false,
            other => return Err(Error::FormatError(format!("bad verdict: {other}"))),
        };
        let prec: u32 = parts[3]
            .strip_prefix("prec=")
            .ok_or_else(|| Error::FormatError("expected prec=".into()))?
            .parse()
            .map_err(|_| Error::FormatError("bad prec".into()))?;
        rec.checks.push((parts[1].to_string(), pass, prec));
    }
    Ok(rec)
}

pub fn write_mfr(path: &Path, r: &ReportRecord) -> Result<()> {
    std::fs::write(path, format_mfr(r))?;
    Ok(())
}
