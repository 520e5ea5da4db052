//! Plain-text file formats and the instance manifest.
//!
//! Every format starts with a header line naming the kind of object. Blank
//! lines and lines starting with `#` are ignored.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chain_path::Trace;
use crate::error::{Error, Result};
use crate::geometry::{ExactPoint, Rat};
use crate::rsa::{Arborescence, Segment, SinkSet};
use crate::triangulation::{Diagonal, SimplePolygon, Triangulation};

struct Lines<'a> {
    it: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    kind: &'static str,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, kind: &'static str) -> Lines<'a> {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Lines { it: it.peekable(), kind }
    }

    fn err(&self, line: usize, msg: impl std::fmt::Display) -> Error {
        Error::Parse(format!("{} file, line {line}: {msg}", self.kind))
    }

    /// The header's fields after the keyword.
    fn header(&mut self) -> Result<(usize, Vec<&'a str>)> {
        let (n, line) = self.it.next().ok_or_else(|| Error::Parse(format!("empty {} file", self.kind)))?;
        let mut f = line.split_whitespace();
        if f.next() != Some(self.kind) {
            return Err(self.err(n, format!("expected header {:?}", self.kind)));
        }
        Ok((n, f.collect()))
    }

    fn next_fields(&mut self) -> Result<(usize, Vec<&'a str>)> {
        let (n, line) = self.it.next().ok_or_else(|| Error::Parse(format!("{} file ends early", self.kind)))?;
        Ok((n, line.split_whitespace().collect()))
    }

    fn finish(&mut self) -> Result<()> {
        match self.it.next() {
            Some((n, _)) => Err(self.err(n, "unexpected trailing line")),
            None => Ok(()),
        }
    }

    fn int<T: std::str::FromStr>(&self, n: usize, s: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(n, format!("invalid integer {s:?}")))
    }

    fn count(&mut self, fields: &[&str], at: usize, n: usize) -> Result<usize> {
        let s = fields.get(at).ok_or_else(|| self.err(n, "missing count"))?;
        self.int(n, s)
    }
}

pub fn write_polygon(p: &SimplePolygon) -> String {
    let mut out = format!("polygon {}\n", p.len());
    for (i, v) in p.vertices().iter().enumerate() {
        out.push_str(&format!("{} {}", v.x, v.y));
        if let Some(l) = p.label(i) {
            out.push_str(&format!(" {l}"));
        }
        out.push('\n');
    }
    out
}

pub fn parse_polygon(text: &str) -> Result<SimplePolygon> {
    let mut lines = Lines::new(text, "polygon");
    let (h, fields) = lines.header()?;
    let n = lines.count(&fields, 0, h)?;
    let mut pts = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let (k, f) = lines.next_fields()?;
        if f.len() < 2 || f.len() > 3 {
            return Err(lines.err(k, "expected \"x y [label]\""));
        }
        let x: Rat = f[0].parse().map_err(|e| lines.err(k, e))?;
        let y: Rat = f[1].parse().map_err(|e| lines.err(k, e))?;
        pts.push(ExactPoint::new(x, y));
        labels.push(f.get(2).map(|s| s.to_string()));
    }
    lines.finish()?;
    SimplePolygon::with_labels(pts, labels)
}

fn write_pairs(header: String, ds: impl Iterator<Item = Diagonal>) -> String {
    let mut out = header;
    for d in ds {
        out.push_str(&format!("{} {}\n", d.0, d.1));
    }
    out
}

fn parse_pairs(lines: &mut Lines, count: usize) -> Result<Vec<Diagonal>> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (k, f) = lines.next_fields()?;
        if f.len() != 2 {
            return Err(lines.err(k, "expected \"i j\""));
        }
        let (i, j): (usize, usize) = (lines.int(k, f[0])?, lines.int(k, f[1])?);
        if i == j {
            return Err(lines.err(k, "a diagonal needs two distinct vertices"));
        }
        out.push(Diagonal::new(i, j));
    }
    lines.finish()?;
    Ok(out)
}

/// `polygon_file` names the polygon the indices refer to.
pub fn write_triangulation(t: &Triangulation, polygon_file: &str) -> String {
    let header = format!("triangulation {polygon_file} {}\n", t.diagonals().len());
    write_pairs(header, t.diagonals().iter().copied())
}

/// The referenced polygon file name and the diagonals.
pub fn parse_triangulation_header(text: &str) -> Result<(String, Vec<Diagonal>)> {
    let mut lines = Lines::new(text, "triangulation");
    let (h, fields) = lines.header()?;
    if fields.len() != 2 {
        return Err(lines.err(h, "expected \"triangulation <polygon-file> <m>\""));
    }
    let m = lines.count(&fields, 1, h)?;
    Ok((fields[0].to_string(), parse_pairs(&mut lines, m)?))
}

/// Parses a triangulation of `polygon` and validates it.
pub fn parse_triangulation(text: &str, polygon: Arc<SimplePolygon>) -> Result<Triangulation> {
    let (_, ds) = parse_triangulation_header(text)?;
    Triangulation::checked(polygon, ds)
}

pub fn write_flips(flips: &[Diagonal]) -> String {
    write_pairs(format!("flips {}\n", flips.len()), flips.iter().copied())
}

pub fn parse_flips(text: &str) -> Result<Vec<Diagonal>> {
    let mut lines = Lines::new(text, "flips");
    let (h, fields) = lines.header()?;
    let k = lines.count(&fields, 0, h)?;
    parse_pairs(&mut lines, k)
}

/// Sinks and an optional budget `k`.
pub fn write_sinks(s: &SinkSet, k: Option<i64>) -> String {
    let mut out = match k {
        Some(k) => format!("yrsa {} {k}\n", s.len()),
        None => format!("yrsa {}\n", s.len()),
    };
    for (x, y) in &s.sinks {
        out.push_str(&format!("{x} {y}\n"));
    }
    out
}

pub fn parse_sinks(text: &str) -> Result<(SinkSet, Option<i64>)> {
    let mut lines = Lines::new(text, "yrsa");
    let (h, fields) = lines.header()?;
    let n = lines.count(&fields, 0, h)?;
    let k = match fields.get(1) {
        Some(s) => Some(lines.int(h, s)?),
        None => None,
    };
    let mut sinks = Vec::with_capacity(n);
    for _ in 0..n {
        let (i, f) = lines.next_fields()?;
        if f.len() != 2 {
            return Err(lines.err(i, "expected \"x y\""));
        }
        sinks.push((lines.int(i, f[0])?, lines.int(i, f[1])?));
    }
    lines.finish()?;
    Ok((SinkSet::new(sinks)?, k))
}

pub fn write_arborescence(a: &Arborescence) -> String {
    let mut out = format!("rsa {}\n", a.segments.len());
    for s in &a.segments {
        out.push_str(&format!("{} {} {} {}\n", s.a.0, s.a.1, s.b.0, s.b.1));
    }
    out
}

pub fn parse_arborescence(text: &str) -> Result<Arborescence> {
    let mut lines = Lines::new(text, "rsa");
    let (h, fields) = lines.header()?;
    let m = lines.count(&fields, 0, h)?;
    let mut segs = Vec::with_capacity(m);
    for _ in 0..m {
        let (i, f) = lines.next_fields()?;
        if f.len() != 4 {
            return Err(lines.err(i, "expected \"x1 y1 x2 y2\""));
        }
        let c: Vec<i64> = f.iter().map(|s| lines.int(i, s)).collect::<Result<_>>()?;
        if c[0] != c[2] && c[1] != c[3] {
            return Err(lines.err(i, "segment is neither horizontal nor vertical"));
        }
        segs.push(Segment::new((c[0], c[1]), (c[2], c[3])));
    }
    lines.finish()?;
    Ok(Arborescence::new(segs))
}

pub fn write_trace(t: &Trace) -> String {
    let mut out = String::from("trace\n");
    for ((x1, y1), (x2, y2)) in &t.edges {
        out.push_str(&format!("edge {x1} {y1} {x2} {y2}\n"));
    }
    for (x, y) in &t.boxes {
        out.push_str(&format!("box {x} {y}\n"));
    }
    out
}

pub fn parse_trace(text: &str) -> Result<Trace> {
    let mut lines = Lines::new(text, "trace");
    let (h, fields) = lines.header()?;
    if !fields.is_empty() {
        return Err(lines.err(h, "the trace header takes no fields"));
    }
    let mut t = Trace::default();
    while let Some((i, line)) = lines.it.next() {
        let f: Vec<&str> = line.split_whitespace().collect();
        match (f[0], f.len()) {
            ("edge", 5) => {
                let c: Vec<i64> = f[1..].iter().map(|s| lines.int(i, s)).collect::<Result<_>>()?;
                if (c[0] - c[2]).abs() + (c[1] - c[3]).abs() != 1 {
                    return Err(lines.err(i, "an edge joins two adjacent grid points"));
                }
                let (p, q) = ((c[0], c[1]), (c[2], c[3]));
                t.edges.insert(if p <= q { (p, q) } else { (q, p) });
            }
            ("box", 3) => {
                t.boxes.insert((lines.int(i, f[1])?, lines.int(i, f[2])?));
            }
            _ => return Err(lines.err(i, "expected \"edge x1 y1 x2 y2\" or \"box x y\"")),
        }
    }
    Ok(t)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Default,
    Override,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestFile {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

/// Parameters and checksums of a written instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub beta: usize,
    pub d: usize,
    pub sinks: usize,
    pub grid: usize,
    pub k: i64,
    pub budget: i64,
    pub provenance: Provenance,
    pub files: Vec<ManifestFile>,
}

impl Manifest {
    pub fn budget_matches(&self) -> bool {
        self.budget == crate::reduction::budget(self.beta, self.d, self.sinks, self.k)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Manifest> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("manifest: {e}")))
    }

    /// Files under `dir` whose checksum differs from the recorded one.
    pub fn mismatches(&self, dir: &Path) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for f in &self.files {
            let bytes = std::fs::read(dir.join(&f.path))?;
            if sha256_hex(&bytes) != f.sha256 {
                bad.push(f.path.clone());
            }
        }
        Ok(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::double_chain::build_double_chain;

    #[test]
    fn polygon_and_triangulation_roundtrip() {
        let dc = build_double_chain(3).unwrap().polygon_pdp(&ExactPoint::new(Rat::new(7, 2), Rat::zero())).unwrap();
        let text = write_polygon(&dc.polygon);
        assert!(text.starts_with("polygon 7\n"));
        let back = Arc::new(parse_polygon(&text).unwrap());
        assert_eq!(*back, *dc.polygon);
        let (tu, _) = dc.extreme_triangulations();
        let tt = write_triangulation(&tu, "p.txt");
        let (file, _) = parse_triangulation_header(&tt).unwrap();
        assert_eq!(file, "p.txt");
        assert_eq!(parse_triangulation(&tt, back).unwrap().diagonals(), tu.diagonals());
    }

    #[test]
    fn simple_roundtrips() {
        let flips = vec![Diagonal::new(0, 3), Diagonal::new(2, 5)];
        assert_eq!(parse_flips(&write_flips(&flips)).unwrap(), flips);
        let s = SinkSet::new(vec![(1, 2), (3, 0)]).unwrap();
        assert_eq!(parse_sinks(&write_sinks(&s, Some(4))).unwrap(), (s.clone(), Some(4)));
        assert_eq!(parse_sinks(&write_sinks(&s, None)).unwrap(), (s, None));
        let a = Arborescence::new(vec![Segment::new((0, 0), (2, 0)), Segment::new((2, 0), (2, 3))]);
        assert_eq!(parse_arborescence(&write_arborescence(&a)).unwrap(), a);
        let mut t = Trace::from_edges([((1, 1), (2, 1)), ((2, 1), (2, 2))]);
        t.add_box((1, 2));
        assert_eq!(parse_trace(&write_trace(&t)).unwrap(), t);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_flips("flips 2\n0 1\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_flips("flops 0\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_sinks("yrsa 1\n1 x\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_arborescence("rsa 1\n0 0 1 1\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_trace("trace\nedge 1 1 3 1\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_polygon("polygon 3\n0 0\n1 0\n1/0 1\n"), Err(Error::Parse(_))));
        assert!(parse_flips("# comment\nflips 1\n\n0 2\n").is_ok());
    }

    #[test]
    fn manifest_json_and_checksums() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.txt"), "hello").unwrap();
        let m = Manifest {
            beta: 2,
            d: 2,
            sinks: 1,
            grid: 2,
            k: 2,
            budget: 14,
            provenance: Provenance::Default,
            files: vec![ManifestFile { role: "polygon".into(), path: "a.txt".into(), sha256: sha256_hex(b"hello") }],
        };
        assert!(m.budget_matches());
        assert_eq!(Manifest::from_json(&m.to_json()).unwrap(), m);
        assert!(m.mismatches(dir.path()).unwrap().is_empty());
        std::fs::write(dir.path().join("a.txt"), "changed").unwrap();
        assert_eq!(m.mismatches(dir.path()).unwrap(), ["a.txt"]);
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
