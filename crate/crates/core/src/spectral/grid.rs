use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::symbols::C64;
use crate::{Error, Result};

/// Uniform grid on `[0, 2π) × [−X, X)`.
///
/// `t_j = jΔt`, `x_i = −X + iΔx`, `ξ_m = πm/X` for `m ∈ [−N/2, N/2)` and
/// `k ∈ [−M/2, M/2)`; `Δx·Δξ = 2π/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderGrid {
    pub m: usize,
    pub n: usize,
    pub x_half: f64,
}

impl Default for CylinderGrid {
    fn default() -> Self {
        Self { m: 64, n: 512, x_half: 12.0 }
    }
}

impl CylinderGrid {
    pub fn new(m: usize, n: usize, x_half: f64) -> Result<Self> {
        let mut bad = Vec::new();
        if !m.is_power_of_two() || m < 2 {
            bad.push(format!("M = {m} is not a power of two >= 2"));
        }
        if !n.is_power_of_two() || n < 2 {
            bad.push(format!("N = {n} is not a power of two >= 2"));
        }
        if !(x_half.is_finite() && x_half > 0.0) {
            bad.push(format!("X = {x_half} is not positive"));
        }
        if bad.is_empty() {
            Ok(Self { m, n, x_half })
        } else {
            Err(Error::Malformed(bad.join("; ")))
        }
    }

    pub fn dt(&self) -> f64 {
        TAU / self.m as f64
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.x_half / self.n as f64
    }

    pub fn dxi(&self) -> f64 {
        PI / self.x_half
    }

    pub fn t(&self, j: usize) -> f64 {
        j as f64 * self.dt()
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.x_half + i as f64 * self.dx()
    }

    /// Frequency `k` stored in spectrum row `r`.
    pub fn k_of_row(&self, r: usize) -> i64 {
        r as i64 - (self.m / 2) as i64
    }

    /// Bin index `m` stored in spectrum column `c`.
    pub fn m_of_col(&self, c: usize) -> i64 {
        c as i64 - (self.n / 2) as i64
    }

    pub fn xi_of_col(&self, c: usize) -> f64 {
        self.m_of_col(c) as f64 * self.dxi()
    }

    pub fn ts(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.t(j)).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn xis(&self) -> Vec<f64> {
        (0..self.n).map(|c| self.xi_of_col(c)).collect()
    }

    pub fn len(&self) -> usize {
        self.m * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Samples `f(t_j, x_i)`, row-major in `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: CylinderGrid,
    pub values: Vec<C64>,
}

impl GridFunction {
    pub fn zeros(grid: CylinderGrid) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: CylinderGrid, f: impl Fn(f64, f64) -> C64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.m {
            let t = grid.t(j);
            for i in 0..grid.n {
                values.push(f(t, grid.x(i)));
            }
        }
        Self { grid, values }
    }

    pub fn at(&self, j: usize, i: usize) -> C64 {
        self.values[j * self.grid.n + i]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |self − other|`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect() }
    }

    /// Multiplies row `j` by `g(t_j)`.
    pub fn scale_rows(&self, g: impl Fn(f64) -> C64) -> Self {
        let mut out = self.clone();
        for (j, row) in out.values.chunks_mut(self.grid.n).enumerate() {
            let s = g(self.grid.t(j));
            row.iter_mut().for_each(|v| *v *= s);
        }
        out
    }

    /// `(1/2π)∫∫|f|² dt dx` by the rectangle rule.
    pub fn norm_sq(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        s * self.grid.dx() / self.grid.m as f64
    }

    /// Largest `|f|` at `|x| > X − margin`.
    pub fn boundary_max(&self, margin: f64) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.grid.m {
            for i in 0..self.grid.n {
                if self.grid.x(i).abs() > self.grid.x_half - margin {
                    m = m.max(self.at(j, i).norm());
                }
            }
        }
        m
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x,re,im\n");
        for j in 0..self.grid.m {
            for i in 0..self.grid.n {
                let v = self.at(j, i);
                let _ = writeln!(s, "{:.16e},{:.16e},{:.16e},{:.16e}", self.grid.t(j), self.grid.x(i), v.re, v.im);
            }
        }
        s
    }

    /// Parses the output of [`to_csv`](Self::to_csv); the grid is inferred.
    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = parse_rows(text, "t,x,re,im")?;
        let n = rows.iter().take_while(|r| r[0] == rows[0][0]).count();
        if n == 0 || rows.len() % n != 0 {
            return Err(Error::Malformed("rows do not form a rectangular t-by-x grid".into()));
        }
        let grid = CylinderGrid::new(rows.len() / n, n, -rows[0][1])?;
        let values = rows.iter().map(|r| C64::new(r[2], r[3])).collect();
        Ok(Self { grid, values })
    }
}

/// `f̃(k, ξ_m)`, row `r ↔ k = r − M/2`, column `c ↔ m = c − N/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedSpectrum {
    pub grid: CylinderGrid,
    pub values: Vec<C64>,
}

impl MixedSpectrum {
    pub fn zeros(grid: CylinderGrid) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.len()] }
    }

    pub fn at(&self, r: usize, c: usize) -> C64 {
        self.values[r * self.grid.n + c]
    }

    /// Value at frequency `k` and bin `m`, zero outside the stored range.
    pub fn get(&self, k: i64, m: i64) -> C64 {
        let r = k + (self.grid.m / 2) as i64;
        let c = m + (self.grid.n / 2) as i64;
        if r < 0 || c < 0 || r >= self.grid.m as i64 || c >= self.grid.n as i64 {
            return C64::new(0.0, 0.0);
        }
        self.at(r as usize, c as usize)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `Σ_k ∫|f̃(k, ξ)|² dξ / 2π` by the rectangle rule.
    pub fn norm_sq(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        s * self.grid.dxi() / TAU
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,xi,re,im\n");
        for r in 0..self.grid.m {
            for c in 0..self.grid.n {
                let v = self.at(r, c);
                let _ = writeln!(
                    s,
                    "{},{:.16e},{:.16e},{:.16e}",
                    self.grid.k_of_row(r),
                    self.grid.xi_of_col(c),
                    v.re,
                    v.im
                );
            }
        }
        s
    }

    /// Parses the output of [`to_csv`](Self::to_csv); the grid is inferred.
    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = parse_rows(text, "k,xi,re,im")?;
        let n = rows.iter().take_while(|r| r[0] == rows[0][0]).count();
        if n < 2 || rows.len() % n != 0 {
            return Err(Error::Malformed("rows do not form a rectangular k-by-xi grid".into()));
        }
        let grid = CylinderGrid::new(rows.len() / n, n, infer_x_half(&rows[..n])?)?;
        let values = rows.iter().map(|r| C64::new(r[2], r[3])).collect();
        Ok(Self { grid, values })
    }
}

/// Recovers `X` from one row of `ξ` values. Inversion is exact only up to
/// a few ulps, so nearby floats that reproduce every column are tried and
/// the shortest decimal wins.
fn infer_x_half(row: &[[f64; 4]]) -> Result<f64> {
    let n = row.len();
    let guess = PI * -((n / 2) as f64) / row[0][1];
    if !(guess.is_finite() && guess > 0.0) {
        return Err(Error::Malformed("xi column does not start at -pi*N/(2X)".into()));
    }
    let reproduces =
        |x: f64| row.iter().enumerate().all(|(c, r)| (c as i64 - (n / 2) as i64) as f64 * (PI / x) == r[1]);
    (-4i64..=4)
        .map(|d| f64::from_bits((guess.to_bits() as i64 + d) as u64))
        .filter(|&x| reproduces(x))
        .min_by_key(|x| x.to_string().len())
        .ok_or_else(|| Error::Malformed("xi column is not an equispaced grid".into()))
}

fn parse_rows(text: &str, header: &str) -> Result<Vec<[f64; 4]>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == header => {}
        other => return Err(Error::Malformed(format!("expected header {header:?}, found {other:?}"))),
    }
    let mut rows = Vec::new();
    for (ln, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Malformed(format!("line {}: expected 4 fields", ln + 2)));
        }
        let mut row = [0.0; 4];
        for (slot, f) in row.iter_mut().zip(&fields) {
            *slot = f.trim().parse().map_err(|_| Error::Malformed(format!("line {}: bad number {f:?}", ln + 2)))?;
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Malformed("no data rows".into()));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_identities() {
        let g = CylinderGrid::default();
        assert!((g.dx() * g.dxi() - TAU / g.n as f64).abs() < 1e-15);
        assert_eq!(g.x(0), -12.0);
        assert_eq!(g.k_of_row(0), -32);
        assert_eq!(g.m_of_col(g.n - 1), 255);
    }

    #[test]
    fn rejects_bad_sizes_together() {
        let e = CylinderGrid::new(48, 100, -1.0).unwrap_err().to_string();
        assert!(e.contains("M = 48") && e.contains("N = 100") && e.contains("X = -1"));
    }

    #[test]
    fn csv_roundtrip_is_bit_exact() {
        let g = CylinderGrid::new(4, 8, 3.0).unwrap();
        let f = GridFunction::from_fn(g, |t, x| C64::new((t * x).sin() / 3.0, (x - t).exp()));
        let back = GridFunction::from_csv(&f.to_csv()).unwrap();
        assert_eq!(back, f);
        let s = MixedSpectrum { grid: g, values: f.values.clone() };
        let back = MixedSpectrum::from_csv(&s.to_csv()).unwrap();
        assert_eq!(back.values, s.values);
        assert_eq!(back.grid.m, 4);
        assert!((back.grid.x_half - 3.0).abs() < 1e-12);
    }
}
