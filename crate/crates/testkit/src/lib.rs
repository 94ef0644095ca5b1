//! Brute-force oracles for the closed-curves test suites.
//!
//! Everything here works on plain `Vec<Vec<f64>>` grids indexed `[i][j]` and
//! shares no code with the library it checks.

/// Forward moves on the torus: `(i, j+1)`, `(i+1, j+1)`, `(i+1, j)`.
pub const MOVES: [(usize, usize); 3] = [(0, 1), (1, 1), (1, 0)];

pub fn step(grid: &[Vec<f64>], (i, j): (usize, usize), (di, dj): (usize, usize)) -> (usize, usize) {
    ((i + di) % grid.len(), (j + dj) % grid[0].len())
}

/// Minimal sum over all `3^n` continuations of length `n` from `(i, j)`,
/// the start cell included, found by enumerating every move sequence. Each
/// sum is accumulated from the far end back to the start.
pub fn enumerate_continuations(grid: &[Vec<f64>], start: (usize, usize), n: usize) -> f64 {
    let mut best = f64::INFINITY;
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let mut cells = vec![start];
        for _ in 0..n {
            cells.push(step(grid, *cells.last().unwrap(), MOVES[c % 3]));
            c /= 3;
        }
        let sum = cells
            .iter()
            .rev()
            .skip(1)
            .fold(grid[cells[n].0][cells[n].1], |acc, &(i, j)| grid[i][j] + acc);
        best = best.min(sum);
    }
    best
}

/// Naive weighted L1 distance between every row pair.
pub fn naive_potential(fx: &[Vec<f64>], fy: &[Vec<f64>], weights: &[f64]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; fy.len()]; fx.len()];
    for i in 0..fx.len() {
        for j in 0..fy.len() {
            let mut total = 0.0;
            for k in 0..weights.len() {
                total += weights[k] * (fx[i][k] - fy[j][k]).abs();
            }
            out[i][j] = total;
        }
    }
    out
}

/// Minimum mean cell value over all cycles of the forward-move graph
/// (Karp's minimum mean cycle recurrence).
pub fn min_mean_cycle(grid: &[Vec<f64>]) -> f64 {
    let (rows, cols) = (grid.len(), grid[0].len());
    let n = rows * cols;
    let id = |i: usize, j: usize| i * cols + j;
    // d[k][v]: cheapest walk with exactly k edges ending at v, edge weight is
    // the value of the cell it leaves
    let mut d = vec![vec![f64::INFINITY; n]; n + 1];
    d[0].iter_mut().for_each(|x| *x = 0.0);
    for k in 1..=n {
        for i in 0..rows {
            for j in 0..cols {
                let u = id(i, j);
                if d[k - 1][u].is_infinite() {
                    continue;
                }
                for m in MOVES {
                    let (a, b) = step(grid, (i, j), m);
                    let cand = d[k - 1][u] + grid[i][j];
                    if cand < d[k][id(a, b)] {
                        d[k][id(a, b)] = cand;
                    }
                }
            }
        }
    }
    (0..n)
        .filter(|&v| d[n][v].is_finite())
        .map(|v| {
            (0..n)
                .filter(|&k| d[k][v].is_finite())
                .map(|k| (d[n][v] - d[k][v]) / (n - k) as f64)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Minimum mean over all simple cycles, by depth-first enumeration. Only for
/// very small grids.
pub fn min_mean_simple_cycle(grid: &[Vec<f64>]) -> f64 {
    let (rows, cols) = (grid.len(), grid[0].len());
    let mut best = f64::INFINITY;
    let mut on_path = vec![vec![false; cols]; rows];
    // cycles are enumerated once per smallest cell, which is their start
    fn dfs(
        grid: &[Vec<f64>],
        start: (usize, usize),
        cell: (usize, usize),
        sum: f64,
        len: usize,
        on_path: &mut Vec<Vec<bool>>,
        best: &mut f64,
    ) {
        let cols = grid[0].len();
        for m in MOVES {
            let next = step(grid, cell, m);
            if next == start {
                *best = best.min(sum / len as f64);
            } else if !on_path[next.0][next.1] && next.0 * cols + next.1 > start.0 * cols + start.1 {
                on_path[next.0][next.1] = true;
                dfs(grid, start, next, sum + grid[next.0][next.1], len + 1, on_path, best);
                on_path[next.0][next.1] = false;
            }
        }
    }
    for i in 0..rows {
        for j in 0..cols {
            on_path[i][j] = true;
            dfs(grid, (i, j), (i, j), grid[i][j], 1, &mut on_path, &mut best);
            on_path[i][j] = false;
        }
    }
    best
}

/// Step-by-step simulation of the greedy rule with a fixed preference among
/// equal candidates. Returns the cycle between the first repeated cell's
/// two visits.
pub fn simulate_greedy(
    guide: &[Vec<f64>],
    start: (usize, usize),
    preference: [(usize, usize); 3],
) -> Vec<(usize, usize)> {
    let mut visited: Vec<(usize, usize)> = Vec::new();
    let mut cell = start;
    loop {
        if let Some(pos) = visited.iter().position(|&c| c == cell) {
            return visited[pos..].to_vec();
        }
        visited.push(cell);
        let mut best = preference[0];
        for &m in &preference[1..] {
            let (a, b) = step(guide, cell, m);
            let (c, d) = step(guide, cell, best);
            if guide[a][b] < guide[c][d] {
                best = m;
            }
        }
        cell = step(guide, cell, best);
    }
}

/// Row-major first cell holding the minimum.
pub fn argmin(grid: &[Vec<f64>]) -> (usize, usize) {
    let mut best = (0, 0);
    for i in 0..grid.len() {
        for j in 0..grid[0].len() {
            if grid[i][j] < grid[best.0][best.1] {
                best = (i, j);
            }
        }
    }
    best
}

pub fn mean_over(grid: &[Vec<f64>], cells: &[(usize, usize)]) -> f64 {
    cells.iter().map(|&(i, j)| grid[i][j]).sum::<f64>() / cells.len() as f64
}

/// 12x12 torus whose global minimum sits at the mouth of a short valley
/// that runs out into a flat plateau, while the main diagonal is a long
/// valley of value 1. A plain greedy walk from the minimum stays on the
/// plateau; a walk that looks 6 cells ahead starts on the diagonal.
pub fn dead_end_valley() -> Vec<Vec<f64>> {
    let mut grid = vec![vec![10.0; 12]; 12];
    for (k, row) in grid.iter_mut().enumerate() {
        row[k] = 1.0;
    }
    grid[0][6] = 0.0;
    for k in 1..4 {
        grid[k][k + 6] = 0.5;
    }
    grid
}

/// 12x12 torus with a groove that alternates `(i+1, j)` and `(i+1, j+1)`:
/// the groove closes after 24 cells, circling `i` twice and `j` once.
pub fn slope_two_groove() -> Vec<Vec<f64>> {
    let mut grid = vec![vec![10.0; 12]; 12];
    for t in 0..24 {
        grid[t % 12][(t / 2) % 12] = if t == 0 { 0.0 } else { 1.0 };
    }
    grid
}

/// Decoded binary PPM.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ppm {
    pub width: usize,
    pub height: usize,
    pub maxval: usize,
    pub rgb: Vec<u8>,
}

impl Ppm {
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let k = (y * self.width + x) * 3;
        [self.rgb[k], self.rgb[k + 1], self.rgb[k + 2]]
    }
}

/// Reads a P6 image: magic, width, height and maxval separated by
/// whitespace (comments allowed), one whitespace byte, then the raster.
pub fn parse_ppm(bytes: &[u8]) -> Result<Ppm, String> {
    let mut pos = 0;
    let mut fields = Vec::new();
    while fields.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err("truncated header".into());
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if fields[0] != "P6" {
        return Err(format!("magic {:?}", fields[0]));
    }
    let number = |k: usize| fields[k].parse::<usize>().map_err(|e| format!("{}: {e}", fields[k]));
    let (width, height, maxval) = (number(1)?, number(2)?, number(3)?);
    if maxval == 0 || maxval > 255 {
        return Err(format!("maxval {maxval}"));
    }
    pos += 1;
    let raster = bytes.get(pos..).unwrap_or_default();
    if raster.len() != width * height * 3 {
        return Err(format!(
            "raster holds {} bytes, expected {}",
            raster.len(),
            width * height * 3
        ));
    }
    Ok(Ppm {
        width,
        height,
        maxval,
        rgb: raster.to_vec(),
    })
}
