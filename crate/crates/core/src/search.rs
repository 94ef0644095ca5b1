//! Canonical paths through a potential torus.
//!
//! A walk starts at a minimal cell and repeatedly moves to the cheapest of
//! the three forward neighbors `(i, j+1)`, `(i+1, j+1)`, `(i+1, j)` (indices
//! wrap), until it reaches a cell it has already visited. The cycle between
//! the two visits is the path; its mean potential is the score.
//!
//! Three variants are provided: start at the global minimum ([`Method::Base`]),
//! start from every cell of one row and keep the best cycle
//! ([`Method::MultiStart`]), or guide both start and steps by minimal
//! continuation sums of length `n` ([`Method::Lookahead`]).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::potential::PotentialTorus;

pub type Cell = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    /// `(i, j+1)`: advance along curve Y only.
    Down,
    /// `(i+1, j+1)`
    Diagonal,
    /// `(i+1, j)`: advance along curve X only.
    Right,
}

impl Step {
    pub const ALL: [Step; 3] = [Step::Down, Step::Diagonal, Step::Right];

    pub fn delta(self) -> (usize, usize) {
        match self {
            Step::Down => (0, 1),
            Step::Diagonal => (1, 1),
            Step::Right => (1, 0),
        }
    }

    pub fn apply(self, (i, j): Cell, rows: usize, cols: usize) -> Cell {
        let (di, dj) = self.delta();
        ((i + di) % rows, (j + dj) % cols)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Method {
    Base,
    #[serde(rename = "multistart")]
    MultiStart {
        row: usize,
    },
    Lookahead {
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TieRule {
    /// Uniform choice among equal minima, reproducible from the seed.
    Random { seed: u64 },
    /// First entry of [`SearchConfig::preference`] among equal step
    /// candidates; first cell in row-major order among equal start cells.
    Deterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub method: Method,
    pub tie_rule: TieRule,
    pub preference: [Step; 3],
    pub step_budget: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            method: Method::Base,
            tie_rule: TieRule::Random { seed: 0 },
            preference: [Step::Diagonal, Step::Right, Step::Down],
            step_budget: 36_000,
        }
    }
}

impl SearchConfig {
    pub fn deterministic(method: Method) -> Self {
        Self {
            method,
            tie_rule: TieRule::Deterministic,
            ..Self::default()
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("walk exceeded the step budget of {0}")]
    StepBudget(usize),
    #[error("step budget {budget} is below {needed}, the torus cell count plus one")]
    BudgetTooSmall { budget: usize, needed: usize },
    #[error("start row {row} outside torus with {rows} rows")]
    StartRow { row: usize, rows: usize },
    #[error("guide torus is {0}x{1}, potential is {2}x{3}")]
    GuideShape(usize, usize, usize, usize),
}

/// Cyclic walk on the torus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusPath {
    pub cells: Vec<Cell>,
    /// Full cycles of the X index (rows) completed by one traversal.
    pub wrap_x: usize,
    /// Full cycles of the Y index (columns) completed by one traversal.
    pub wrap_y: usize,
}

impl TorusPath {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Checks every cyclic step is one of the three forward moves.
    pub fn is_legal(&self, rows: usize, cols: usize) -> bool {
        let n = self.cells.len();
        n > 0
            && (0..n).all(|k| {
                let (a, b) = (self.cells[k], self.cells[(k + 1) % n]);
                Step::ALL.iter().any(|s| s.apply(a, rows, cols) == b)
            })
    }

    pub fn mean_over(&self, v: &PotentialTorus) -> f64 {
        let sum: f64 = self.cells.iter().map(|&(i, j)| v.get(i, j)).sum();
        sum / self.cells.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub path: TorusPath,
    pub mean_potential: f64,
    pub method: Method,
    /// Number of times a start or step choice had several equal minima.
    pub tie_events: usize,
    pub seed: Option<u64>,
}

enum Picker<'a> {
    Random(Box<ChaCha8Rng>),
    Deterministic(&'a [Step; 3]),
}

impl<'a> Picker<'a> {
    fn new(config: &'a SearchConfig, stream: u64) -> Self {
        match config.tie_rule {
            TieRule::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(stream);
                Picker::Random(Box::new(rng))
            }
            TieRule::Deterministic => Picker::Deterministic(&config.preference),
        }
    }

    /// Picks among `count` tied options, given in canonical order.
    fn pick_index(&mut self, count: usize) -> usize {
        match self {
            Picker::Random(rng) if count > 1 => rng.random_range(0..count),
            _ => 0,
        }
    }

    fn pick_step(&mut self, guide: &PotentialTorus, cell: Cell) -> (Step, bool) {
        let value = |s: Step| {
            let (i, j) = s.apply(cell, guide.rows, guide.cols);
            guide.get(i, j)
        };
        let best = Step::ALL.iter().map(|&s| value(s)).fold(f64::INFINITY, f64::min);
        let order: &[Step; 3] = match self {
            Picker::Deterministic(pref) => pref,
            Picker::Random(_) => &Step::ALL,
        };
        let tied: Vec<Step> = order.iter().copied().filter(|&s| value(s) == best).collect();
        let pick = self.pick_index(tied.len());
        (tied[pick], tied.len() > 1)
    }

    fn pick_min_cell(&mut self, guide: &PotentialTorus) -> (Cell, bool) {
        let (lo, _) = guide.min_max();
        let tied: Vec<usize> = (0..guide.len()).filter(|&n| guide.values[n] == lo).collect();
        let n = tied[self.pick_index(tied.len())];
        ((n / guide.cols, n % guide.cols), tied.len() > 1)
    }
}

fn check_budget(v: &PotentialTorus, config: &SearchConfig) -> Result<(), SearchError> {
    let needed = v.len() + 1;
    if config.step_budget < needed {
        return Err(SearchError::BudgetTooSmall {
            budget: config.step_budget,
            needed,
        });
    }
    Ok(())
}

fn walk(
    guide: &PotentialTorus,
    start: Cell,
    picker: &mut Picker,
    budget: usize,
) -> Result<(TorusPath, usize), SearchError> {
    let (rows, cols) = (guide.rows, guide.cols);
    let mut visit = vec![usize::MAX; rows * cols];
    let mut cells = Vec::new();
    let mut steps = Vec::new();
    let mut ties = 0;
    let mut cur = (start.0 % rows, start.1 % cols);
    loop {
        let slot = cur.0 * cols + cur.1;
        if visit[slot] != usize::MAX {
            let first = visit[slot];
            let cycle_steps = &steps[first..];
            let advance = |s: &&Step| matches!(s, Step::Diagonal | Step::Right);
            let wrap_x = cycle_steps.iter().filter(advance).count() / rows;
            let wrap_y = cycle_steps
                .iter()
                .filter(|s| matches!(s, Step::Diagonal | Step::Down))
                .count()
                / cols;
            let path = TorusPath {
                cells: cells.split_off(first),
                wrap_x,
                wrap_y,
            };
            return Ok((path, ties));
        }
        if cells.len() >= budget {
            return Err(SearchError::StepBudget(budget));
        }
        visit[slot] = cells.len();
        cells.push(cur);
        let (step, tied) = picker.pick_step(guide, cur);
        ties += usize::from(tied);
        steps.push(step);
        cur = step.apply(cur, rows, cols);
    }
}

/// Greedy walk from `start` guided by `guide`; the score averages `v`.
pub fn greedy_walk(
    v: &PotentialTorus,
    start: Cell,
    guide: &PotentialTorus,
    config: &SearchConfig,
) -> Result<TorusPath, SearchError> {
    check_guide(v, guide)?;
    check_budget(v, config)?;
    let mut picker = Picker::new(config, 0);
    walk(guide, start, &mut picker, config.step_budget).map(|(path, _)| path)
}

fn check_guide(v: &PotentialTorus, guide: &PotentialTorus) -> Result<(), SearchError> {
    if (v.rows, v.cols) != (guide.rows, guide.cols) {
        return Err(SearchError::GuideShape(guide.rows, guide.cols, v.rows, v.cols));
    }
    Ok(())
}

fn seed_of(config: &SearchConfig) -> Option<u64> {
    match config.tie_rule {
        TieRule::Random { seed } => Some(seed),
        TieRule::Deterministic => None,
    }
}

fn guided(v: &PotentialTorus, guide: &PotentialTorus, config: &SearchConfig) -> Result<MatchResult, SearchError> {
    check_budget(v, config)?;
    let mut picker = Picker::new(config, 0);
    let (start, start_tie) = picker.pick_min_cell(guide);
    let (path, ties) = walk(guide, start, &mut picker, config.step_budget)?;
    Ok(MatchResult {
        mean_potential: path.mean_over(v),
        path,
        method: config.method,
        tie_events: ties + usize::from(start_tie),
        seed: seed_of(config),
    })
}

/// Walk from the global minimum of `v`, guided by `v`.
pub fn canonical_path_base(v: &PotentialTorus, config: &SearchConfig) -> Result<MatchResult, SearchError> {
    guided(v, v, config).map(|r| MatchResult {
        method: Method::Base,
        ..r
    })
}

/// Walks from every cell of row `row`; keeps the cycle with the lowest mean.
pub fn canonical_path_multistart(
    v: &PotentialTorus,
    row: usize,
    config: &SearchConfig,
) -> Result<MatchResult, SearchError> {
    check_budget(v, config)?;
    if row >= v.rows {
        return Err(SearchError::StartRow { row, rows: v.rows });
    }
    let mut candidates = Vec::with_capacity(v.cols);
    for j in 0..v.cols {
        // one stream per start cell keeps every walk independent of the others
        let mut picker = Picker::new(config, j as u64 + 1);
        let (path, ties) = walk(v, (row, j), &mut picker, config.step_budget)?;
        candidates.push((path.mean_over(v), path, ties));
    }
    let best = candidates.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = (0..candidates.len()).filter(|&k| candidates[k].0 == best).collect();
    let pick = Picker::new(config, 0).pick_index(tied.len());
    let (mean_potential, path, ties) = candidates.swap_remove(tied[pick]);
    Ok(MatchResult {
        path,
        mean_potential,
        method: Method::MultiStart { row },
        tie_events: ties + usize::from(tied.len() > 1),
        seed: seed_of(config),
    })
}

/// `S_0 = V`, `S_m(i,j) = V(i,j) + min(S_{m-1}` over the three forward
/// neighbors`)`: the cheapest sum over all continuations of length `n`.
pub fn lookahead_sums(v: &PotentialTorus, n: usize) -> PotentialTorus {
    let mut s = v.clone();
    for _ in 0..n {
        let prev = s;
        s = PotentialTorus::from_fn(v.rows, v.cols, |i, j| {
            let next = Step::ALL
                .iter()
                .map(|st| {
                    let (a, b) = st.apply((i, j), v.rows, v.cols);
                    prev.get(a, b)
                })
                .fold(f64::INFINITY, f64::min);
            v.get(i, j) + next
        });
    }
    s
}

/// Start and steps chosen by the lookahead sums; the score still averages `v`.
pub fn canonical_path_lookahead(
    v: &PotentialTorus,
    n: usize,
    config: &SearchConfig,
) -> Result<MatchResult, SearchError> {
    let guide = lookahead_sums(v, n);
    guided(v, &guide, config).map(|r| MatchResult {
        method: Method::Lookahead { n },
        ..r
    })
}

/// Runs the method selected in `config`.
pub fn canonical_path(v: &PotentialTorus, config: &SearchConfig) -> Result<MatchResult, SearchError> {
    match config.method {
        Method::Base => canonical_path_base(v, config),
        Method::MultiStart { row } => canonical_path_multistart(v, row, config),
        Method::Lookahead { n } => canonical_path_lookahead(v, n, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det() -> SearchConfig {
        SearchConfig::deterministic(Method::Base)
    }

    #[test]
    fn flat_torus_gives_diagonal() {
        let v = PotentialTorus::from_fn(60, 60, |_, _| 0.0);
        let r = canonical_path_base(&v, &det()).unwrap();
        assert_eq!(r.path.cells, (0..60).map(|k| (k, k)).collect::<Vec<_>>());
        assert_eq!((r.path.wrap_x, r.path.wrap_y), (1, 1));
        assert_eq!(r.mean_potential, 0.0);
        assert!(r.tie_events > 0);

        let r = canonical_path(&v, &SearchConfig::deterministic(Method::Lookahead { n: 4 })).unwrap();
        assert_eq!(r.path.len(), 60);
        assert_eq!(r.mean_potential, 0.0);
        let r = canonical_path(&v, &SearchConfig::deterministic(Method::MultiStart { row: 0 })).unwrap();
        assert_eq!(r.mean_potential, 0.0);
    }

    #[test]
    fn tail_is_excluded() {
        // forced route (0,0) then around the cycle through (0,1), never back
        let mut v = PotentialTorus::from_fn(4, 4, |_, _| 9.0);
        let route = [
            (0, 0, 0.0),
            (0, 1, 1.0),
            (1, 2, 2.0),
            (2, 3, 3.0),
            (2, 0, 4.0),
            (3, 1, 5.0),
        ];
        for &(i, j, x) in &route {
            v.values[i * 4 + j] = x;
        }
        let r = canonical_path_base(&v, &det()).unwrap();
        assert_eq!(r.path.cells, vec![(0, 1), (1, 2), (2, 3), (2, 0), (3, 1)]);
        assert_eq!(r.mean_potential, 3.0);
        assert_eq!((r.path.wrap_x, r.path.wrap_y), (1, 1));
        assert!(r.path.is_legal(4, 4));
        assert_eq!(r.tie_events, 0);
    }

    #[test]
    fn lookahead_base_cases() {
        let v = PotentialTorus::from_fn(5, 7, |i, j| ((i * 7 + j) as f64 * 1.3).sin().abs());
        assert_eq!(lookahead_sums(&v, 0), v);
        let c = PotentialTorus::from_fn(6, 6, |_, _| 0.5);
        assert!(lookahead_sums(&c, 9).values.iter().all(|&x| x == 5.0));
    }

    #[test]
    fn lookahead_zero_matches_base() {
        let v = PotentialTorus::from_fn(9, 9, |i, j| ((i * 3 + j * 5) % 7) as f64);
        for tie_rule in [TieRule::Deterministic, TieRule::Random { seed: 11 }] {
            let config = SearchConfig {
                tie_rule,
                ..SearchConfig::default()
            };
            let base = canonical_path_base(&v, &config).unwrap();
            let look = canonical_path_lookahead(&v, 0, &config).unwrap();
            assert_eq!(base.path, look.path);
            assert_eq!(base.mean_potential, look.mean_potential);
            assert_eq!(base.tie_events, look.tie_events);
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let v = PotentialTorus::from_fn(12, 12, |i, j| ((i + 2 * j) % 3) as f64);
        for method in [Method::Base, Method::MultiStart { row: 3 }, Method::Lookahead { n: 3 }] {
            let config = SearchConfig {
                method,
                tie_rule: TieRule::Random { seed: 42 },
                ..SearchConfig::default()
            };
            let a = canonical_path(&v, &config).unwrap();
            let b = canonical_path(&v, &config).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.seed, Some(42));
            assert!(a.path.is_legal(12, 12));
        }
    }

    #[test]
    fn config_errors() {
        let v = PotentialTorus::from_fn(4, 4, |_, _| 0.0);
        let config = SearchConfig {
            step_budget: 16,
            ..det()
        };
        assert_eq!(
            canonical_path_base(&v, &config),
            Err(SearchError::BudgetTooSmall { budget: 16, needed: 17 })
        );
        assert_eq!(
            canonical_path_multistart(&v, 4, &det()),
            Err(SearchError::StartRow { row: 4, rows: 4 })
        );
        let g = PotentialTorus::from_fn(3, 4, |_, _| 0.0);
        assert!(matches!(
            greedy_walk(&v, (0, 0), &g, &det()),
            Err(SearchError::GuideShape(..))
        ));
    }

    #[test]
    fn preference_order_is_respected() {
        let v = PotentialTorus::from_fn(4, 4, |_, _| 1.0);
        let config = SearchConfig {
            preference: [Step::Right, Step::Diagonal, Step::Down],
            ..det()
        };
        let path = greedy_walk(&v, (0, 0), &v, &config).unwrap();
        assert_eq!(path.cells, vec![(0, 0), (1, 0), (2, 0), (3, 0)]);
        assert_eq!((path.wrap_x, path.wrap_y), (1, 0));
    }

    #[test]
    fn method_json_shape() {
        let json = serde_json::to_string(&Method::Lookahead { n: 20 }).unwrap();
        assert_eq!(json, r#"{"kind":"lookahead","n":20}"#);
        let json = serde_json::to_string(&Method::MultiStart { row: 0 }).unwrap();
        assert_eq!(json, r#"{"kind":"multistart","row":0}"#);
    }
}
