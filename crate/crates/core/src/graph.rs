//! Bipartite graphs `G ⊆ K_{n,n}` on sides `X = {0..n}` and `Y = {0..n}`.
//!
//! Every vertex keeps both a sorted neighbor list (for iteration) and a
//! fixed-width bitset row (for word-parallel codegree and rectangle counts).
//!
//! # Text format
//!
//! ```text
//! n m
//! x y      (m lines, ascending lexicographic order, 0-based)
//! ```
//!
//! Lines starting with `#` before the header are comments. The writer always
//! emits LF line endings and sorted edges.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// A position of `K_{n,n}`: `x ∈ X`, `y ∈ Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    pub x: usize,
    pub y: usize,
}

impl Pair {
    #[inline]
    pub const fn new(x: usize, y: usize) -> Self {
        Pair { x, y }
    }
}

impl From<(usize, usize)> for Pair {
    fn from((x, y): (usize, usize)) -> Self {
        Pair { x, y }
    }
}

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    n: usize,
    words: usize,
    adj_x: Vec<Vec<u32>>,
    adj_y: Vec<Vec<u32>>,
    bits_x: Vec<u64>,
    bits_y: Vec<u64>,
    m: u64,
}

impl BipartiteGraph {
    /// Empty graph with `n` vertices on each side.
    pub fn new(n: usize) -> Self {
        let words = words_for(n);
        BipartiteGraph {
            n,
            words,
            adj_x: vec![Vec::new(); n],
            adj_y: vec![Vec::new(); n],
            bits_x: vec![0; n * words],
            bits_y: vec![0; n * words],
            m: 0,
        }
    }

    pub fn from_edges<I, P>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = P>,
        P: Into<Pair>,
    {
        let mut g = BipartiteGraph::new(n);
        for p in edges {
            g.add_edge(p.into())?;
        }
        Ok(g)
    }

    /// `K_{n,n}` with all `n²` edges.
    pub fn complete(n: usize) -> Self {
        let mut g = BipartiteGraph::new(n);
        for x in 0..n {
            for y in 0..n {
                g.insert_unchecked(x, y);
            }
        }
        g
    }

    /// The perfect matching `{(i, i)}`.
    pub fn perfect_matching(n: usize) -> Self {
        let mut g = BipartiteGraph::new(n);
        for i in 0..n {
            g.insert_unchecked(i, i);
        }
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Edge count `m`.
    #[inline]
    pub fn edge_count(&self) -> u64 {
        self.m
    }

    /// Number of 64-bit words in one bitset row.
    #[inline]
    pub fn row_words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        x < self.n && y < self.n && self.bits_x[x * self.words + y / 64] >> (y % 64) & 1 == 1
    }

    pub fn add_edge(&mut self, p: Pair) -> Result<()> {
        if p.x >= self.n || p.y >= self.n {
            return Err(Error::OutOfRange {
                x: p.x,
                y: p.y,
                n: self.n,
            });
        }
        if self.has_edge(p.x, p.y) {
            return Err(Error::DuplicateEdge { x: p.x, y: p.y });
        }
        self.insert_unchecked(p.x, p.y);
        Ok(())
    }

    pub(crate) fn insert_unchecked(&mut self, x: usize, y: usize) {
        let w = self.words;
        self.bits_x[x * w + y / 64] |= 1 << (y % 64);
        self.bits_y[y * w + x / 64] |= 1 << (x % 64);
        insert_sorted(&mut self.adj_x[x], y as u32);
        insert_sorted(&mut self.adj_y[y], x as u32);
        self.m += 1;
    }

    /// Sorted neighbors in `Y` of `x ∈ X`.
    #[inline]
    pub fn neighbors_x(&self, x: usize) -> &[u32] {
        &self.adj_x[x]
    }

    /// Sorted neighbors in `X` of `y ∈ Y`.
    #[inline]
    pub fn neighbors_y(&self, y: usize) -> &[u32] {
        &self.adj_y[y]
    }

    #[inline]
    pub fn degree_x(&self, x: usize) -> usize {
        self.adj_x[x].len()
    }

    #[inline]
    pub fn degree_y(&self, y: usize) -> usize {
        self.adj_y[y].len()
    }

    /// Maximum degree over both sides.
    pub fn max_degree(&self) -> usize {
        let dx = self.adj_x.iter().map(Vec::len).max().unwrap_or(0);
        let dy = self.adj_y.iter().map(Vec::len).max().unwrap_or(0);
        dx.max(dy)
    }

    /// Bitset row of `x`'s neighborhood in `Y`.
    #[inline]
    pub fn row_x(&self, x: usize) -> &[u64] {
        &self.bits_x[x * self.words..(x + 1) * self.words]
    }

    /// Bitset row of `y`'s neighborhood in `X`.
    #[inline]
    pub fn row_y(&self, y: usize) -> &[u64] {
        &self.bits_y[y * self.words..(y + 1) * self.words]
    }

    /// `|N(u) ∩ N(u′)|` for two distinct vertices of `X`.
    pub fn codegree_x(&self, u: usize, v: usize) -> Result<usize> {
        self.check_codegree_args(u, v)?;
        Ok(and_popcount(self.row_x(u), self.row_x(v)))
    }

    /// `|N(u) ∩ N(u′)|` for two distinct vertices of `Y`.
    pub fn codegree_y(&self, u: usize, v: usize) -> Result<usize> {
        self.check_codegree_args(u, v)?;
        Ok(and_popcount(self.row_y(u), self.row_y(v)))
    }

    fn check_codegree_args(&self, u: usize, v: usize) -> Result<()> {
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::VertexOutOfRange { v: w, n: self.n });
            }
        }
        if u == v {
            return Err(Error::SameVertex(u));
        }
        Ok(())
    }

    /// True iff no two distinct `X` vertices share two neighbors.
    pub fn is_k22_free(&self) -> bool {
        // With all codegrees ≤ 1 each pair of Y-vertices is covered at most
        // once, so sum_x C(deg x, 2) ≤ C(n, 2) is a cheap necessary check.
        let wedges: u64 = self
            .adj_x
            .iter()
            .map(|a| (a.len() as u64) * (a.len() as u64).saturating_sub(1) / 2)
            .sum();
        let n = self.n as u64;
        if wedges > n * n.saturating_sub(1) / 2 {
            return false;
        }
        // Mark each pair of neighbors of every x; a repeated mark is a C4.
        let mut seen = vec![0u64; (self.n * self.n).div_ceil(64)];
        for nbrs in &self.adj_x {
            for (i, &a) in nbrs.iter().enumerate() {
                for &b in &nbrs[i + 1..] {
                    let idx = a as usize * self.n + b as usize;
                    let (w, bit) = (idx / 64, 1u64 << (idx % 64));
                    if seen[w] & bit != 0 {
                        return false;
                    }
                    seen[w] |= bit;
                }
            }
        }
        true
    }

    /// `e(A, B)`: number of edges with `x ∈ A`, `y ∈ B`.
    ///
    /// Repeated indices count once. Panics on out-of-range indices.
    pub fn rect_edge_count(&self, a: &[usize], b: &[usize]) -> u64 {
        if a.is_empty() || b.is_empty() {
            return 0;
        }
        let mut mask_b = vec![0u64; self.words];
        for &y in b {
            assert!(y < self.n, "Y index {y} out of range");
            mask_b[y / 64] |= 1 << (y % 64);
        }
        let mut mask_a = vec![0u64; self.words];
        for &x in a {
            assert!(x < self.n, "X index {x} out of range");
            mask_a[x / 64] |= 1 << (x % 64);
        }
        iter_bits(&mask_a)
            .map(|x| and_popcount(self.row_x(x), &mask_b) as u64)
            .sum()
    }

    /// Edges in ascending lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Pair> + '_ {
        self.adj_x
            .iter()
            .enumerate()
            .flat_map(|(x, ys)| ys.iter().map(move |&y| Pair::new(x, y as usize)))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(16 + self.m as usize * 10);
        writeln!(s, "{} {}", self.n, self.m).unwrap();
        for p in self.edges() {
            writeln!(s, "{} {}", p.x, p.y).unwrap();
        }
        s
    }

    /// Writes the text format, optionally preceded by one `# ...` comment line.
    pub fn write_text<W: Write>(&self, mut w: W, comment: Option<&str>) -> io::Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        w.write_all(self.to_text().as_bytes())
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let parse_err = |line: usize, msg: String| Error::Parse { line, msg };
        let body = text.strip_suffix('\n').unwrap_or(text);
        let total_lines = body.split('\n').count();
        let mut lines = body.split('\n').enumerate().map(|(i, l)| (i + 1, l));

        let (header_line, header) = loop {
            match lines.next() {
                Some((_, l)) if l.starts_with('#') => continue,
                Some(h) => break h,
                None => return Err(parse_err(1, "missing header \"n m\"".into())),
            }
        };
        let [n, m] = parse_two(header).map_err(|msg| parse_err(header_line, msg))?;
        let mut g = BipartiteGraph::new(n);
        let mut read = 0usize;
        for (line, l) in lines {
            if read == m {
                return Err(parse_err(line, format!("more than the declared {m} edges")));
            }
            let [x, y] = parse_two(l).map_err(|msg| parse_err(line, msg))?;
            g.add_edge(Pair::new(x, y)).map_err(|e| parse_err(line, e.to_string()))?;
            read += 1;
        }
        if read != m {
            return Err(parse_err(total_lines, format!("expected {m} edges, found {read}")));
        }
        Ok(g)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_text(&text)
    }
}

fn parse_two(line: &str) -> std::result::Result<[usize; 2], String> {
    let mut it = line.split(' ');
    let mut next = || -> std::result::Result<usize, String> {
        let tok = it.next().ok_or_else(|| format!("expected two integers, got {line:?}"))?;
        tok.parse::<usize>()
            .map_err(|_| format!("invalid integer {tok:?}"))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(format!("expected two integers, got {line:?}"));
    }
    Ok([a, b])
}

fn insert_sorted(v: &mut Vec<u32>, val: u32) {
    let pos = v.binary_search(&val).unwrap_or_else(|p| p);
    v.insert(pos, val);
}

#[inline]
pub(crate) fn and_popcount(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum()
}

/// Iterates set bit positions of a word slice in ascending order.
pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            }
        })
    })
}
