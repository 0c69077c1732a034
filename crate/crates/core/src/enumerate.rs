//! Brute-force enumeration of fixed polycubes with perimeter and spanned
//! dimension, using Redelmeier's untried-set recursion.
//!
//! Cells live in a box of side `2n + 1` per axis with the root at the centre.
//! A cell may join the polycube only if its linear index is on one side of
//! the root (the root convention), which fixes the translation.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::BigCount;
use crate::proper::PerimeterTable;

/// Dimension limit from packing neighbour counts into five bits.
pub const MAX_DIM: usize = 15;

/// Boxes with up to this many cells get a flat array; larger ones a hash map.
pub const DENSE_CELLS: u64 = 1 << 25;

/// Default cost budget in estimated search nodes.
pub const DEFAULT_BUDGET: u128 = 20_000_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "POLYCUBES_BUDGET";

const NBR_MASK: u8 = 0x1f;
const OCCUPIED: u8 = 0x20;
const MARKED: u8 = 0x40;

pub fn default_budget() -> u128 {
    std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

/// Upper estimate of the number of polycubes of size at most `nmax` in `d`
/// dimensions: the `(2d-1)`-ary tree counts `C(km, m) / ((k-1)m + 1)`.
pub fn estimate_nodes(nmax: usize, d: usize) -> u128 {
    let k = 2 * d as u64 - 1;
    let mut total = BigUint::zero();
    for m in 1..=nmax as u64 {
        let mut c = BigUint::from(1u32);
        for j in 0..m {
            c *= k * m - j;
            c /= j + 1;
        }
        total += c / ((k - 1) * m + 1);
    }
    u128::try_from(total).unwrap_or(u128::MAX)
}

/// Which cells count as later than the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootConvention {
    /// The root is the lexicographically smallest cell.
    LexMin,
    /// The root is the largest.
    LexMax,
}

/// A unit of work from [`Enumerator::split_work`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Job {
    /// The whole search.
    Full,
    /// Every polycube smaller than the prefix depth.
    Shallow { below: usize },
    /// The polycube reached by popping the untried lists in the given order,
    /// and everything grown from it. Entry `k` is how many cells were popped
    /// and skipped at depth `k` before the one taken.
    Subtree { path: Vec<u32> },
}

/// What the enumerator hands to a visitor.
pub struct PolycubeView<'a> {
    state: &'a State,
}

impl PolycubeView<'_> {
    pub fn size(&self) -> usize {
        self.state.cells.len()
    }

    pub fn dim(&self) -> usize {
        self.state.d
    }

    pub fn perimeter(&self) -> i64 {
        self.state.perimeter
    }

    /// Number of axes along which the cells are not all equal.
    pub fn spanned(&self) -> usize {
        self.state.spanned
    }

    /// Cell coordinates relative to the root, in the order they were added.
    pub fn cells(&self) -> Vec<Vec<i32>> {
        self.state.cells.iter().map(|&c| self.state.coords(c)).collect()
    }
}

/// Counts keyed by `(size, spanned axes, perimeter)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationTable {
    pub nmax: usize,
    pub d: usize,
    /// Whether the search skipped polycubes that could not reach `d` spanned axes.
    pub proper_only: bool,
    counts: BTreeMap<(usize, usize, i64), BigCount>,
}

impl EnumerationTable {
    fn new(nmax: usize, d: usize, proper_only: bool) -> Self {
        Self { nmax, d, proper_only, counts: BTreeMap::new() }
    }

    fn merge(&mut self, part: &JobResult) {
        for (size, spanned, t, c) in &part.counts {
            *self.counts.entry((*size, *spanned, *t)).or_default() += BigCount::from(c.clone());
        }
    }

    pub fn counts(&self) -> &BTreeMap<(usize, usize, i64), BigCount> {
        &self.counts
    }

    /// `g^{(d)}_{n,t}`: everything of size `n`.
    pub fn lattice(&self, n: usize) -> Result<PerimeterTable> {
        if self.proper_only {
            return Err(Error::InvalidInput("a proper-only enumeration has no lattice counts".into()));
        }
        self.check_size(n)?;
        let mut table = PerimeterTable::new(n, self.d);
        for (&(_, _, t), c) in self.counts.range((n, 0, i64::MIN)..=(n, self.d, i64::MAX)) {
            table.add(t, c);
        }
        Ok(table)
    }

    /// `G^{(d)}_{n,t}`: size `n`, spanning all `d` axes.
    pub fn proper(&self, n: usize) -> Result<PerimeterTable> {
        self.check_size(n)?;
        let mut table = PerimeterTable::new(n, self.d);
        for (&(_, _, t), c) in self.counts.range((n, self.d, i64::MIN)..=(n, self.d, i64::MAX)) {
            table.add(t, c);
        }
        Ok(table)
    }

    fn check_size(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.nmax {
            return Err(Error::InvalidInput(format!("size {n} outside 1..={}", self.nmax)));
        }
        Ok(())
    }
}

/// Raw counts of one job, serializable as a checkpoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobResult {
    pub nmax: usize,
    pub d: usize,
    pub convention: RootConvention,
    pub proper_only: bool,
    pub job: Job,
    /// `(size, spanned, perimeter, count)`, sorted.
    pub counts: Vec<(usize, usize, i64, BigUint)>,
}

#[derive(Clone, Copy, Debug)]
pub struct Enumerator {
    nmax: usize,
    d: usize,
    convention: RootConvention,
    proper_only: bool,
}

impl Enumerator {
    pub fn new(nmax: usize, d: usize) -> Result<Self> {
        if nmax == 0 || d == 0 || d > MAX_DIM {
            return Err(Error::InvalidInput(format!("need n >= 1 and 1 <= d <= {MAX_DIM}, got n = {nmax}, d = {d}")));
        }
        Ok(Self { nmax, d, convention: RootConvention::LexMin, proper_only: false })
    }

    pub fn convention(mut self, convention: RootConvention) -> Self {
        self.convention = convention;
        self
    }

    /// Skip branches that cannot reach `d` spanned axes by size `nmax`. Only
    /// [`EnumerationTable::proper`] is then meaningful.
    pub fn proper_only(mut self, yes: bool) -> Self {
        self.proper_only = yes;
        self
    }

    pub fn estimate(&self) -> u128 {
        estimate_nodes(self.nmax, self.d)
    }

    pub fn check_budget(&self, budget: u128) -> Result<()> {
        let estimate = self.estimate();
        if estimate > budget {
            return Err(Error::BudgetExceeded { estimate, budget });
        }
        Ok(())
    }

    /// Sequential run as a single job.
    pub fn run(&self) -> Result<EnumerationTable> {
        self.run_jobs(&[Job::Full], 1, None)
    }

    /// Calls `visit` on every polycube of size at most `nmax`, sequentially.
    pub fn visit(&self, mut visit: impl FnMut(&PolycubeView<'_>)) -> Result<()> {
        self.check_budget(default_budget())?;
        let mut state = State::new(self);
        state.execute(&Job::Full, Some(&mut visit));
        Ok(())
    }

    /// Cuts the search tree at size `prefix_depth`: one job per polycube of
    /// that size plus one for everything smaller. Depth 0 gives one job.
    pub fn split_work(&self, prefix_depth: usize) -> Vec<Job> {
        if prefix_depth == 0 {
            return vec![Job::Full];
        }
        let mut state = State::new(self);
        let mut jobs = vec![Job::Shallow { below: prefix_depth }];
        if prefix_depth <= self.nmax {
            jobs.extend(state.collect_paths(prefix_depth).into_iter().map(|path| Job::Subtree { path }));
        }
        jobs
    }

    pub fn run_job(&self, job: &Job) -> JobResult {
        let mut state = State::new(self);
        state.execute(job, None);
        state.result(job)
    }

    /// Runs `jobs` on `threads` worker threads, optionally resuming from and
    /// writing to per-job checkpoint files. The merged table does not depend
    /// on the thread count or the schedule.
    pub fn run_jobs(&self, jobs: &[Job], threads: usize, checkpoint_dir: Option<&Path>) -> Result<EnumerationTable> {
        self.check_budget(default_budget())?;
        if let Some(dir) = checkpoint_dir {
            fs::create_dir_all(dir)?;
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
        let results: Vec<Result<JobResult>> = pool.install(|| {
            jobs.par_iter()
                .enumerate()
                .map_init(
                    || State::new(self),
                    |state, (index, job)| {
                        let file = checkpoint_dir.map(|dir| checkpoint_path(dir, index));
                        if let Some(done) = file.as_deref().and_then(|f| self.load_checkpoint(f, job)) {
                            return Ok(done);
                        }
                        state.execute(job, None);
                        let result = state.result(job);
                        if let Some(f) = file {
                            write_checkpoint(&f, &result)?;
                        }
                        Ok(result)
                    },
                )
                .collect()
        });
        let mut table = EnumerationTable::new(self.nmax, self.d, self.proper_only);
        for r in results {
            table.merge(&r?);
        }
        Ok(table)
    }

    fn load_checkpoint(&self, file: &Path, job: &Job) -> Option<JobResult> {
        let text = fs::read_to_string(file).ok()?;
        let r: JobResult = serde_json::from_str(&text).ok()?;
        let same = r.nmax == self.nmax
            && r.d == self.d
            && r.convention == self.convention
            && r.proper_only == self.proper_only
            && &r.job == job;
        same.then_some(r)
    }
}

pub fn checkpoint_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("job-{index:06}.json"))
}

fn write_checkpoint(file: &Path, result: &JobResult) -> Result<()> {
    let tmp = file.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_vec(result)?)?;
    fs::rename(&tmp, file)?;
    Ok(())
}

/// `g^{(d)}_{n,t}` for `n = 1..=nmax`.
pub fn enumerate_g(nmax: usize, d: usize) -> Result<Vec<PerimeterTable>> {
    let table = Enumerator::new(nmax, d)?.run()?;
    (1..=nmax).map(|n| table.lattice(n)).collect()
}

/// `G^{(i)}_{n,t}` for `n = 1..=nmax`, enumerated in `i` dimensions and
/// filtered to polycubes spanning all of them.
pub fn enumerate_proper(nmax: usize, i: usize) -> Result<Vec<PerimeterTable>> {
    let table = Enumerator::new(nmax, i)?.proper_only(true).run()?;
    (1..=nmax).map(|n| table.proper(n)).collect()
}

enum Grid {
    Dense(Vec<u8>),
    Sparse(FxHashMap<i64, u8>),
}

impl Grid {
    #[inline]
    fn get(&self, c: i64) -> u8 {
        match self {
            Grid::Dense(v) => v[c as usize],
            Grid::Sparse(m) => m.get(&c).copied().unwrap_or(0),
        }
    }

    #[inline]
    fn update(&mut self, c: i64, f: impl FnOnce(u8) -> u8) -> u8 {
        match self {
            Grid::Dense(v) => {
                let slot = &mut v[c as usize];
                *slot = f(*slot);
                *slot
            }
            Grid::Sparse(m) => {
                let new = f(m.get(&c).copied().unwrap_or(0));
                if new == 0 {
                    m.remove(&c);
                } else {
                    m.insert(c, new);
                }
                new
            }
        }
    }
}

/// Flat `u64` tally with overflow spilling into big integers.
struct Tally {
    stride_size: usize,
    stride_spanned: usize,
    slots: Vec<u64>,
    spill: BTreeMap<usize, BigUint>,
    cap: u64,
}

impl Tally {
    fn new(nmax: usize, d: usize) -> Self {
        let t_len = 2 * d * nmax + 1;
        let stride_spanned = t_len;
        let stride_size = (d + 1) * t_len;
        Self { stride_size, stride_spanned, slots: vec![0; (nmax + 1) * stride_size], spill: BTreeMap::new(), cap: u64::MAX }
    }

    #[inline]
    fn bump(&mut self, size: usize, spanned: usize, t: i64) {
        let k = size * self.stride_size + spanned * self.stride_spanned + t as usize;
        let slot = &mut self.slots[k];
        if *slot == self.cap {
            *self.spill.entry(k).or_default() += *slot;
            *slot = 0;
        }
        *slot += 1;
    }

    fn drain(&mut self) -> Vec<(usize, usize, i64, BigUint)> {
        let mut out = Vec::new();
        for (k, slot) in self.slots.iter_mut().enumerate() {
            let spilled = self.spill.remove(&k);
            if *slot == 0 && spilled.is_none() {
                continue;
            }
            let total = spilled.unwrap_or_default() + BigUint::from(*slot);
            *slot = 0;
            let size = k / self.stride_size;
            let spanned = (k % self.stride_size) / self.stride_spanned;
            let t = (k % self.stride_spanned) as i64;
            out.push((size, spanned, t, total));
        }
        out
    }
}

type Visitor<'v> = Option<&'v mut dyn FnMut(&PolycubeView<'_>)>;

struct State {
    nmax: usize,
    d: usize,
    convention: RootConvention,
    proper_only: bool,
    side: i64,
    strides: Vec<i64>,
    root: i64,
    grid: Grid,
    cells: Vec<i64>,
    perimeter: i64,
    axis_count: Vec<u32>,
    spanned: usize,
    untried: Vec<Vec<i64>>,
    added: Vec<Vec<i64>>,
    tally: Tally,
}

impl State {
    fn new(e: &Enumerator) -> Self {
        let side = 2 * e.nmax as i64 + 1;
        let strides: Vec<i64> = (0..e.d).map(|k| side.pow(k as u32)).collect();
        let volume = (side as u64).saturating_pow(e.d as u32);
        let root = strides.iter().map(|s| s * e.nmax as i64).sum();
        let grid = if volume <= DENSE_CELLS { Grid::Dense(vec![0; volume as usize]) } else { Grid::Sparse(FxHashMap::default()) };
        Self {
            nmax: e.nmax,
            d: e.d,
            convention: e.convention,
            proper_only: e.proper_only,
            side,
            strides,
            root,
            grid,
            cells: Vec::with_capacity(e.nmax),
            perimeter: 0,
            axis_count: vec![0; e.d],
            spanned: 0,
            untried: vec![Vec::new(); e.nmax + 2],
            added: vec![Vec::new(); e.nmax + 2],
            tally: Tally::new(e.nmax, e.d),
        }
    }

    fn coords(&self, c: i64) -> Vec<i32> {
        let centre = self.nmax as i64;
        self.strides.iter().map(|&s| ((c / s) % self.side - centre) as i32).collect()
    }

    #[inline]
    fn allowed(&self, c: i64) -> bool {
        match self.convention {
            RootConvention::LexMin => c > self.root,
            RootConvention::LexMax => c < self.root,
        }
    }

    fn add_cell(&mut self, c: i64) {
        let before = self.grid.update(c, |s| s | OCCUPIED);
        if before & NBR_MASK != 0 {
            self.perimeter -= 1;
        }
        for k in 0..self.d {
            for m in [c - self.strides[k], c + self.strides[k]] {
                let s = self.grid.update(m, |s| s + 1);
                if s & OCCUPIED == 0 && s & NBR_MASK == 1 {
                    self.perimeter += 1;
                }
            }
        }
        let centre = self.nmax as i64;
        for k in 0..self.d {
            if (c / self.strides[k]) % self.side != centre {
                self.axis_count[k] += 1;
                if self.axis_count[k] == 1 {
                    self.spanned += 1;
                }
            }
        }
        self.cells.push(c);
    }

    fn remove_cell(&mut self, c: i64) {
        debug_assert_eq!(self.cells.last(), Some(&c));
        self.cells.pop();
        let centre = self.nmax as i64;
        for k in 0..self.d {
            if (c / self.strides[k]) % self.side != centre {
                self.axis_count[k] -= 1;
                if self.axis_count[k] == 0 {
                    self.spanned -= 1;
                }
            }
        }
        for k in 0..self.d {
            for m in [c - self.strides[k], c + self.strides[k]] {
                let s = self.grid.update(m, |s| s - 1);
                if s & OCCUPIED == 0 && s & NBR_MASK == 0 {
                    self.perimeter -= 1;
                }
            }
        }
        let after = self.grid.update(c, |s| s & !OCCUPIED);
        if after & NBR_MASK != 0 {
            self.perimeter += 1;
        }
    }

    fn set_mark(&mut self, c: i64, on: bool) {
        self.grid.update(c, |s| if on { s | MARKED } else { s & !MARKED });
    }

    /// Whether growing the current polycube can still reach `d` spanned axes.
    #[inline]
    fn worth_growing(&self) -> bool {
        !self.proper_only || self.spanned + (self.nmax - self.cells.len()) >= self.d
    }

    /// Fills `untried[depth + 1]` from `untried[depth]` and the unmarked
    /// neighbours of `c`, remembering the newly marked ones in `added[depth]`.
    fn extend_untried(&mut self, depth: usize, c: i64) {
        let mut next = std::mem::take(&mut self.untried[depth + 1]);
        let mut added = std::mem::take(&mut self.added[depth]);
        next.clear();
        added.clear();
        next.extend_from_slice(&self.untried[depth]);
        for k in 0..self.d {
            for m in [c - self.strides[k], c + self.strides[k]] {
                if self.allowed(m) && self.grid.get(m) & MARKED == 0 {
                    self.set_mark(m, true);
                    next.push(m);
                    added.push(m);
                }
            }
        }
        self.untried[depth + 1] = next;
        self.added[depth] = added;
    }

    fn clear_added(&mut self, depth: usize) {
        let added = std::mem::take(&mut self.added[depth]);
        for &m in &added {
            self.set_mark(m, false);
        }
        self.added[depth] = added;
    }

    fn record(&mut self, visit: &mut Visitor<'_>) {
        self.tally.bump(self.cells.len(), self.spanned, self.perimeter);
        if let Some(v) = visit.as_deref_mut() {
            v(&PolycubeView { state: self });
        }
    }

    /// Pops `untried[depth]` until empty, recording each polycube of size up
    /// to `limit`.
    fn search(&mut self, depth: usize, limit: usize, visit: &mut Visitor<'_>) {
        while let Some(c) = self.untried[depth].pop() {
            self.add_cell(c);
            self.record(visit);
            if self.cells.len() < limit && self.worth_growing() {
                self.extend_untried(depth, c);
                self.search(depth + 1, limit, visit);
                self.clear_added(depth);
            }
            self.remove_cell(c);
        }
    }

    fn start(&mut self) {
        self.set_mark(self.root, true);
        self.untried[0].clear();
        self.untried[0].push(self.root);
    }

    fn finish(&mut self) {
        self.set_mark(self.root, false);
        debug_assert!(self.cells.is_empty() && self.perimeter == 0 && self.spanned == 0);
    }

    fn execute(&mut self, job: &Job, mut visit: Visitor<'_>) {
        self.start();
        match job {
            Job::Full => self.search(0, self.nmax, &mut visit),
            Job::Shallow { below } => {
                if *below > 1 {
                    self.search(0, (*below - 1).min(self.nmax), &mut visit);
                }
            }
            Job::Subtree { path } => {
                let p = path.len();
                let mut taken = Vec::with_capacity(p);
                for (depth, &skip) in path.iter().enumerate() {
                    for _ in 0..skip {
                        self.untried[depth].pop();
                    }
                    let c = self.untried[depth].pop().expect("job path within the search tree");
                    self.add_cell(c);
                    taken.push(c);
                    if depth + 1 < p {
                        self.extend_untried(depth, c);
                    }
                }
                self.record(&mut visit);
                if p < self.nmax && self.worth_growing() {
                    let c = *taken.last().expect("non-empty path");
                    self.extend_untried(p - 1, c);
                    self.search(p, self.nmax, &mut visit);
                    self.clear_added(p - 1);
                }
                for depth in (0..p).rev() {
                    if depth + 1 < p {
                        self.clear_added(depth);
                    }
                    self.remove_cell(taken[depth]);
                }
            }
        }
        for list in &mut self.untried {
            list.clear();
        }
        self.finish();
    }

    fn collect_paths(&mut self, p: usize) -> Vec<Vec<u32>> {
        let mut paths = Vec::new();
        let mut path = Vec::new();
        self.start();
        self.collect(0, p, &mut path, &mut paths);
        self.untried[0].clear();
        self.finish();
        paths
    }

    fn collect(&mut self, depth: usize, p: usize, path: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let mut skipped = 0u32;
        while let Some(c) = self.untried[depth].pop() {
            self.add_cell(c);
            path.push(skipped);
            if self.cells.len() == p {
                out.push(path.clone());
            } else if self.worth_growing() {
                self.extend_untried(depth, c);
                self.collect(depth + 1, p, path, out);
                self.clear_added(depth);
            }
            path.pop();
            self.remove_cell(c);
            skipped += 1;
        }
    }

    fn result(&mut self, job: &Job) -> JobResult {
        JobResult {
            nmax: self.nmax,
            d: self.d,
            convention: self.convention,
            proper_only: self.proper_only,
            job: job.clone(),
            counts: self.tally.drain(),
        }
    }
}
