//! On-disk formats.
//!
//! * Tree functions: JSON `{"q": 2, "R": 4, "values": {"<vertex>": [re, im], ...}}`.
//!   Vertices absent from `values` are zero.
//! * Nuclear decompositions: JSON `{"q": 2, "R": 4, "pairs": [{"f": {...}, "g": {...}}, ...]}`
//!   where `f` and `g` are `values` maps as above.
//! * Spectral functions, symbols and kernels: CSV with a first line
//!   `#q=<q>,R=<R>,D=<D>,M=<M>` and then one row per entry, with integer index
//!   columns followed by `re,im`:
//!   `c,m,re,im` (spectral function), `x,c,m,re,im` (symbol), `x,y,re,im` (kernel).
//!   Missing rows are zero.
//!
//! Floats are written as `{:.16e}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, ensure, Context as _};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::{fmt_f64, to_json_line};
use crate::context::Context;
use crate::psdo::{GridSymbol, KernelMatrix, NuclearDecomposition};
use crate::transform::{SpectralFunction, TreeFunction};

/// `q`, `R`, `D`, `M` recorded in CSV headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridHeader {
    pub q: usize,
    pub radius: usize,
    pub depth: usize,
    pub nodes: usize,
}

impl GridHeader {
    pub fn of(ctx: &Context) -> Self {
        GridHeader {
            q: ctx.q(),
            radius: ctx.ball().radius(),
            depth: ctx.partition().depth(),
            nodes: ctx.nodes(),
        }
    }

    pub fn line(&self) -> String {
        format!("#q={},R={},D={},M={}", self.q, self.radius, self.depth, self.nodes)
    }

    pub fn parse(line: &str) -> anyhow::Result<Self> {
        let body = line
            .strip_prefix('#')
            .ok_or_else(|| anyhow!("CSV header must start with '#', got {line:?}"))?;
        let mut fields = BTreeMap::new();
        for part in body.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| anyhow!("malformed header field {part:?}"))?;
            let v: usize = v.trim().parse().with_context(|| format!("header field {k}"))?;
            fields.insert(k.trim().to_string(), v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| anyhow!("header lacks {k}"));
        Ok(GridHeader {
            q: get("q")?,
            radius: get("R")?,
            depth: get("D")?,
            nodes: get("M")?,
        })
    }

    fn expect(&self, ctx: &Context, what: &str) -> anyhow::Result<()> {
        let want = GridHeader::of(ctx);
        ensure!(
            *self == want,
            "{what} was written for {} but the configuration is {}",
            self.line(),
            want.line()
        );
        Ok(())
    }
}

type ValueMap = BTreeMap<usize, [f64; 2]>;

#[derive(Serialize, Deserialize)]
struct TreeFunctionFile {
    q: usize,
    #[serde(rename = "R")]
    radius: usize,
    values: ValueMap,
}

#[derive(Serialize, Deserialize)]
struct PairFile {
    f: ValueMap,
    g: ValueMap,
}

#[derive(Serialize, Deserialize)]
struct DecompositionFile {
    q: usize,
    #[serde(rename = "R")]
    radius: usize,
    pairs: Vec<PairFile>,
}

fn to_map(f: &TreeFunction) -> ValueMap {
    f.values.iter().enumerate().map(|(i, v)| (i, [v.re, v.im])).collect()
}

fn from_map(map: &ValueMap, n: usize) -> anyhow::Result<TreeFunction> {
    let mut f = TreeFunction::zeros(n);
    for (&i, &[re, im]) in map {
        ensure!(i < n, "vertex {i} is outside the ball ({n} vertices)");
        f.values[i] = Complex64::new(re, im);
    }
    Ok(f)
}

fn check_tree(ctx: &Context, q: usize, radius: usize) -> anyhow::Result<()> {
    ensure!(
        q == ctx.q() && radius == ctx.ball().radius(),
        "file is for q={q}, R={radius} but the configuration has q={}, R={}",
        ctx.q(),
        ctx.ball().radius()
    );
    Ok(())
}

pub fn tree_function_to_json(ctx: &Context, f: &TreeFunction) -> String {
    let file = TreeFunctionFile {
        q: ctx.q(),
        radius: ctx.ball().radius(),
        values: to_map(f),
    };
    to_json_line(&file).expect("tree function serializes") + "\n"
}

pub fn tree_function_from_json(ctx: &Context, text: &str) -> anyhow::Result<TreeFunction> {
    let file: TreeFunctionFile = serde_json::from_str(text).context("malformed tree function JSON")?;
    check_tree(ctx, file.q, file.radius)?;
    from_map(&file.values, ctx.vertices())
}

pub fn decomposition_to_json(ctx: &Context, d: &NuclearDecomposition) -> String {
    let file = DecompositionFile {
        q: ctx.q(),
        radius: ctx.ball().radius(),
        pairs: d.pairs.iter().map(|(f, g)| PairFile { f: to_map(f), g: to_map(g) }).collect(),
    };
    to_json_line(&file).expect("decomposition serializes") + "\n"
}

pub fn decomposition_from_json(ctx: &Context, text: &str) -> anyhow::Result<NuclearDecomposition> {
    let file: DecompositionFile = serde_json::from_str(text).context("malformed decomposition JSON")?;
    check_tree(ctx, file.q, file.radius)?;
    let n = ctx.vertices();
    let pairs = file
        .pairs
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let pair = (from_map(&p.f, n)?, from_map(&p.g, n)?);
            Ok::<_, anyhow::Error>(pair).with_context(|| format!("pair {k}"))
        })
        .collect::<anyhow::Result<_>>()?;
    Ok(NuclearDecomposition::new(pairs))
}

fn push_row(out: &mut String, idx: &[usize], v: Complex64) {
    for i in idx {
        write!(out, "{i},").unwrap();
    }
    writeln!(out, "{},{}", fmt_f64(v.re), fmt_f64(v.im)).unwrap();
}

/// Reads the header and the rows of a grid CSV, checking index bounds against `dims`.
fn read_grid(ctx: &Context, text: &str, dims: &[usize], what: &str) -> anyhow::Result<Vec<Complex64>> {
    let (header, body) = text.split_once('\n').unwrap_or((text, ""));
    GridHeader::parse(header.trim_end())?.expect(ctx, what)?;
    let total: usize = dims.iter().product();
    let mut values = vec![Complex64::new(0.0, 0.0); total];
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.with_context(|| format!("{what} row {}", line + 2))?;
        let row = || format!("{what} row {}", line + 2);
        ensure!(rec.len() == dims.len() + 2, "{}: expected {} fields, got {}", row(), dims.len() + 2, rec.len());
        let mut flat = 0usize;
        for (k, &d) in dims.iter().enumerate() {
            let i: usize = rec[k].parse().with_context(row)?;
            ensure!(i < d, "{}: index {i} out of range 0..{d}", row());
            flat = flat * d + i;
        }
        let re: f64 = rec[dims.len()].parse().with_context(row)?;
        let im: f64 = rec[dims.len() + 1].parse().with_context(row)?;
        values[flat] = Complex64::new(re, im);
    }
    Ok(values)
}

pub fn spectral_to_csv(ctx: &Context, f: &SpectralFunction) -> String {
    let mut s = GridHeader::of(ctx).line() + "\n";
    for c in 0..f.cylinders {
        for m in 0..f.nodes {
            push_row(&mut s, &[c, m], f.get(c, m));
        }
    }
    s
}

pub fn spectral_from_csv(ctx: &Context, text: &str) -> anyhow::Result<SpectralFunction> {
    let (cyl, nodes) = (ctx.cylinders(), ctx.nodes());
    let values = read_grid(ctx, text, &[cyl, nodes], "spectral function")?;
    let mut f = SpectralFunction::zeros(cyl, nodes);
    f.values = values;
    Ok(f)
}

pub fn symbol_to_csv(ctx: &Context, s: &GridSymbol) -> String {
    let mut out = GridHeader::of(ctx).line() + "\n";
    for x in 0..s.vertices {
        for c in 0..s.cylinders {
            for m in 0..s.nodes {
                push_row(&mut out, &[x, c, m], s.get(x, c, m));
            }
        }
    }
    out
}

pub fn symbol_from_csv(ctx: &Context, text: &str) -> anyhow::Result<GridSymbol> {
    let mut s = GridSymbol::zeros(ctx);
    s.values = read_grid(ctx, text, &[ctx.vertices(), ctx.cylinders(), ctx.nodes()], "symbol")?;
    Ok(s)
}

pub fn kernel_to_csv(ctx: &Context, k: &KernelMatrix) -> String {
    let mut s = GridHeader::of(ctx).line() + "\n";
    for x in 0..k.n {
        for y in 0..k.n {
            push_row(&mut s, &[x, y], k.get(x, y));
        }
    }
    s
}

pub fn kernel_from_csv(ctx: &Context, text: &str) -> anyhow::Result<KernelMatrix> {
    let n = ctx.vertices();
    Ok(KernelMatrix {
        n,
        data: read_grid(ctx, text, &[n, n], "kernel")?,
    })
}

pub fn read_text(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
