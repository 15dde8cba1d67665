//! Todd–Coxeter coset enumeration.
//!
//! Two strategies share one table implementation: HLT (scan-and-fill every
//! relator at every live coset, in order) and Felsch (define the first gap,
//! then close all consequences by scanning relator rotations). Coincidences
//! are merged with a union-find on coset numbers.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::words::{parse_word, Alphabet, Generator, Word, WordError};

pub const DEFAULT_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CosetError {
    #[error("coset table exceeded {0} cosets; enumeration inconclusive")]
    Overflow(usize),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("presentation line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl Presentation {
    /// Empty relators are dropped; every relator must be over `alphabet`.
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self, CosetError> {
        for r in &relators {
            alphabet.check(r)?;
        }
        let relators = relators.into_iter().filter(|r| !r.is_empty()).collect();
        Ok(Presentation { alphabet, relators })
    }

    /// ⟨x, y | x^4, y^3, x y x^2 y^-1 x^-1 y^-1 x^-2 y⟩, the central quotient of B4.
    pub fn g0() -> Self {
        let a = Alphabet::xy();
        let rels = ["x^4", "y^3", "x y x^2 Y X Y x^-2 y"].iter().map(|r| parse_word(r, &a).unwrap()).collect();
        Presentation::new(a, rels).unwrap()
    }

    /// ⟨S, T | S^4, (ST)^3 S^-2⟩, written over the letters s, t.
    pub fn sl2z() -> Self {
        let a = Alphabet::st();
        let rels = ["s^4", "ststst s^-2"].iter().map(|r| parse_word(r, &a).unwrap()).collect();
        Presentation::new(a, rels).unwrap()
    }

    pub fn fixture(name: &str) -> Option<Self> {
        match name {
            "g0" => Some(Self::g0()),
            "sl2z" => Some(Self::sl2z()),
            _ => None,
        }
    }

    /// Line format: `generators <letters>` once, then `relator <word>` lines.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, CosetError> {
        let mut alphabet: Option<Alphabet> = None;
        let mut rels = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let syntax = |msg: &str| CosetError::Syntax { line: n + 1, msg: msg.into() };
            match key {
                "generators" => {
                    let letters: String = rest.split_whitespace().collect();
                    alphabet = Some(Alphabet::new(&letters)?);
                }
                "relator" => {
                    let a = alphabet.as_ref().ok_or_else(|| syntax("relator before generators"))?;
                    rels.push(parse_word(rest, a)?);
                }
                _ => return Err(syntax("expected 'generators' or 'relator'")),
            }
        }
        let alphabet = alphabet.ok_or(CosetError::Syntax { line: 0, msg: "no generators line".into() })?;
        Presentation::new(alphabet, rels)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn with_relators(&self, relators: Vec<Word>) -> Self {
        Presentation { alphabet: self.alphabet.clone(), relators }
    }

    /// Column of a letter: `2i` for generator i, `2i + 1` for its inverse.
    fn columns(&self, w: &Word) -> Vec<usize> {
        w.letters()
            .iter()
            .map(|l| 2 * self.alphabet.index_of(l.gen).expect("checked alphabet") + usize::from(l.inverse))
            .collect()
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| r.to_string()).collect();
        let gens: Vec<String> = self.alphabet.generators().map(|g| g.to_string()).collect();
        write!(f, "< {} | {} >", gens.join(", "), rels.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Hlt,
    Felsch,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hlt" => Ok(Strategy::Hlt),
            "felsch" => Ok(Strategy::Felsch),
            other => Err(format!("unknown strategy '{other}' (expected hlt|felsch)")),
        }
    }
}

/// A completed, compacted and standardized coset table.
///
/// Cosets are numbered `0..count` internally; coset 0 is the subgroup
/// itself. Rows are in breadth-first order of first appearance, so equal
/// actions give identical tables regardless of strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetTable {
    generators: Vec<Generator>,
    // rows[c][col], col = 2i (generator) or 2i+1 (inverse)
    rows: Vec<Vec<usize>>,
    defined: usize,
    strategy: Strategy,
}

impl CosetTable {
    /// Number of cosets, i.e. the index of the subgroup.
    pub fn count(&self) -> usize {
        self.rows.len()
    }

    /// Cosets defined during the run, before compaction.
    pub fn total_defined(&self) -> usize {
        self.defined
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    fn column_of(&self, g: Generator, inverse: bool) -> Option<usize> {
        self.generators.iter().position(|&h| h == g).map(|i| 2 * i + usize::from(inverse))
    }

    /// Image of `coset` under the word, or `None` if the word leaves the alphabet.
    pub fn trace(&self, coset: usize, w: &Word) -> Option<usize> {
        w.letters().iter().try_fold(coset, |c, l| self.column_of(l.gen, l.inverse).map(|col| self.rows[c][col]))
    }

    /// Swaps two entries of one column (and repairs the inverse column), for
    /// negative controls.
    pub fn with_swapped_entries(&self, g: Generator, c1: usize, c2: usize) -> CosetTable {
        let mut t = self.clone();
        let col = t.column_of(g, false).expect("generator in table");
        let (i1, i2) = (t.rows[c1][col], t.rows[c2][col]);
        t.rows[c1][col] = i2;
        t.rows[c2][col] = i1;
        t.rows[i2][col + 1] = c1;
        t.rows[i1][col + 1] = c2;
        t
    }

    /// JSON export: `{"count": n, "action": {gen: [1-based images]}}`.
    pub fn to_json(&self) -> serde_json::Value {
        let action: BTreeMap<String, Vec<usize>> = permutation_image(self)
            .into_iter()
            .zip(&self.generators)
            .map(|(p, g)| (g.to_string(), p.into_iter().map(|i| i + 1).collect()))
            .collect();
        serde_json::json!({ "count": self.count(), "action": action })
    }
}

/// Images of the cosets under each generator, in alphabet order (0-based).
pub fn permutation_image(t: &CosetTable) -> Vec<Vec<usize>> {
    (0..t.generators.len()).map(|i| t.rows.iter().map(|row| row[2 * i]).collect()).collect()
}

/// Independent re-check of a completed table: every column is a
/// permutation inverse to its partner, every relator closes at every coset,
/// subgroup generators fix coset 0, and the action is transitive.
pub fn verify_table(p: &Presentation, subgens: &[Word], t: &CosetTable) -> bool {
    let n = t.count();
    if n == 0 || t.generators != p.alphabet.generators().collect::<Vec<_>>() {
        return false;
    }
    for row in &t.rows {
        if row.len() != 2 * t.generators.len() || row.iter().any(|&c| c >= n) {
            return false;
        }
    }
    for c in 0..n {
        for col in (0..t.rows[c].len()).step_by(2) {
            if t.rows[t.rows[c][col]][col + 1] != c {
                return false;
            }
        }
    }
    for r in p.relators() {
        if (0..n).any(|c| t.trace(c, r) != Some(c)) {
            return false;
        }
    }
    if subgens.iter().any(|h| t.trace(0, h) != Some(0)) {
        return false;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(c) = stack.pop() {
        for &d in &t.rows[c] {
            if !seen[d] {
                seen[d] = true;
                stack.push(d);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// HLT enumeration of the cosets of ⟨subgens⟩.
pub fn enumerate(p: &Presentation, subgens: &[Word], cap: usize) -> Result<CosetTable, CosetError> {
    enumerate_with(p, subgens, cap, Strategy::Hlt)
}

pub fn enumerate_with(
    p: &Presentation,
    subgens: &[Word],
    cap: usize,
    strategy: Strategy,
) -> Result<CosetTable, CosetError> {
    for h in subgens {
        p.alphabet.check(h)?;
    }
    let relators: Vec<Vec<usize>> = p.relators.iter().map(|r| p.columns(r)).collect();
    let subgens: Vec<Vec<usize>> = subgens.iter().map(|h| p.columns(h)).collect();
    let mut e = Enumerator::new(2 * p.alphabet.len(), cap.max(1), strategy == Strategy::Felsch);
    match strategy {
        Strategy::Hlt => e.run_hlt(&relators, &subgens)?,
        Strategy::Felsch => {
            let rotations = relator_rotations(p);
            e.run_felsch(&rotations, &subgens)?
        }
    }
    Ok(e.finish(p.alphabet.generators().collect(), strategy))
}

/// All cyclic rotations of the relators and their inverses, grouped by
/// leading column.
fn relator_rotations(p: &Presentation) -> Vec<Vec<Vec<usize>>> {
    let mut by_col = vec![Vec::new(); 2 * p.alphabet.len()];
    for r in &p.relators {
        for w in [r.clone(), r.inverse()] {
            let cols = p.columns(&w);
            for i in 0..cols.len() {
                let mut rot = cols[i..].to_vec();
                rot.extend_from_slice(&cols[..i]);
                if !by_col[rot[0]].contains(&rot) {
                    by_col[rot[0]].push(rot);
                }
            }
        }
    }
    by_col
}

struct Overflow;

struct Enumerator {
    ncols: usize,
    table: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
    cap: usize,
    track_deductions: bool,
    deductions: Vec<(usize, usize)>,
    coincided: bool,
}

impl Enumerator {
    fn new(ncols: usize, cap: usize, track_deductions: bool) -> Self {
        Enumerator {
            ncols,
            table: vec![vec![None; ncols]],
            parent: vec![0],
            cap,
            track_deductions,
            deductions: Vec::new(),
            coincided: false,
        }
    }

    fn overflow(&self) -> CosetError {
        CosetError::Overflow(self.cap)
    }

    fn live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut root = c;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut k = c;
        while self.parent[k] != root {
            let next = self.parent[k];
            self.parent[k] = root;
            k = next;
        }
        root
    }

    fn set(&mut self, c: usize, col: usize, d: usize) {
        self.table[c][col] = Some(d);
        self.table[d][col ^ 1] = Some(c);
        if self.track_deductions {
            self.deductions.push((c, col));
        }
    }

    fn define(&mut self, c: usize, col: usize) -> Result<usize, Overflow> {
        let n = self.table.len();
        if n >= self.cap {
            return Err(Overflow);
        }
        self.table.push(vec![None; self.ncols]);
        self.parent.push(n);
        self.set(c, col, n);
        Ok(n)
    }

    fn merge(&mut self, k: usize, l: usize, queue: &mut Vec<usize>) {
        let (k, l) = (self.rep(k), self.rep(l));
        if k != l {
            let (lo, hi) = if k < l { (k, l) } else { (l, k) };
            self.parent[hi] = lo;
            queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.coincided = true;
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let dead = queue[i];
            i += 1;
            for col in 0..self.ncols {
                let Some(f) = self.table[dead][col] else { continue };
                if self.table[f][col ^ 1] == Some(dead) {
                    self.table[f][col ^ 1] = None;
                }
                let (e1, f1) = (self.rep(dead), self.rep(f));
                if let Some(t) = self.table[e1][col] {
                    self.merge(f1, t, &mut queue);
                } else if let Some(t) = self.table[f1][col ^ 1] {
                    self.merge(e1, t, &mut queue);
                } else {
                    self.set(e1, col, f1);
                }
            }
        }
    }

    /// Traces `word` from `c` in both directions, defining new cosets when
    /// `fill` is set; closes single gaps as deductions and reports clashes as
    /// coincidences.
    fn scan(&mut self, c: usize, word: &[usize], fill: bool) -> Result<(), Overflow> {
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0, word.len());
        loop {
            while i < j {
                match self.table[f][word[i]] {
                    Some(t) => {
                        f = t;
                        i += 1;
                    }
                    None => break,
                }
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i {
                match self.table[b][word[j - 1] ^ 1] {
                    Some(t) => {
                        b = t;
                        j -= 1;
                    }
                    None => break,
                }
            }
            if j == i {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i + 1 {
                self.set(f, word[i], b);
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            self.define(f, word[i])?;
        }
    }

    fn run_hlt(&mut self, relators: &[Vec<usize>], subgens: &[Vec<usize>]) -> Result<(), CosetError> {
        for h in subgens {
            self.scan(0, h, true).map_err(|_| self.overflow())?;
        }
        let mut c = 0;
        while c < self.table.len() {
            for r in relators {
                if !self.live(c) {
                    break;
                }
                self.scan(c, r, true).map_err(|_| self.overflow())?;
            }
            if self.live(c) {
                for col in 0..self.ncols {
                    if self.table[c][col].is_none() {
                        self.define(c, col).map_err(|_| self.overflow())?;
                    }
                }
            }
            c += 1;
        }
        Ok(())
    }

    fn process_deductions(&mut self, rotations: &[Vec<Vec<usize>>]) {
        while let Some((c, col)) = self.deductions.pop() {
            if !self.live(c) {
                continue;
            }
            for rot in &rotations[col] {
                if !self.live(c) {
                    break;
                }
                let _ = self.scan(c, rot, false);
            }
            if let Some(d) = self.table[c][col] {
                for rot in &rotations[col ^ 1] {
                    if !self.live(d) {
                        break;
                    }
                    let _ = self.scan(d, rot, false);
                }
            }
        }
    }

    fn run_felsch(&mut self, rotations: &[Vec<Vec<usize>>], subgens: &[Vec<usize>]) -> Result<(), CosetError> {
        for h in subgens {
            self.scan(0, h, true).map_err(|_| self.overflow())?;
        }
        self.process_deductions(rotations);
        let mut start = 0;
        loop {
            if self.coincided {
                start = 0;
                self.coincided = false;
            }
            let gap = (start..self.table.len())
                .filter(|&c| self.live(c))
                .find_map(|c| (0..self.ncols).find(|&col| self.table[c][col].is_none()).map(|col| (c, col)));
            let Some((c, col)) = gap else { break };
            start = c;
            self.define(c, col).map_err(|_| self.overflow())?;
            self.process_deductions(rotations);
        }
        Ok(())
    }

    fn finish(mut self, generators: Vec<Generator>, strategy: Strategy) -> CosetTable {
        let defined = self.table.len();
        let live: Vec<usize> = (0..defined).filter(|&c| self.live(c)).collect();
        let mut order = vec![usize::MAX; defined];
        let mut bfs = vec![0usize];
        order[0] = 0;
        let mut k = 0;
        while k < bfs.len() {
            let c = bfs[k];
            k += 1;
            for col in 0..self.ncols {
                let d = self.rep(self.table[c][col].expect("complete table"));
                if order[d] == usize::MAX {
                    order[d] = bfs.len();
                    bfs.push(d);
                }
            }
        }
        debug_assert_eq!(bfs.len(), live.len());
        let rows = bfs
            .iter()
            .map(|&c| {
                (0..self.ncols)
                    .map(|col| {
                        let d = self.table[c][col].unwrap();
                        order[self.rep(d)]
                    })
                    .collect()
            })
            .collect();
        CosetTable { generators, rows, defined, strategy }
    }
}
