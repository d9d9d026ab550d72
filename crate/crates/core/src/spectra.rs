//! Nonnegative rational matrices: the Perron root by power iteration, an
//! exact test for spectral radius below one, and a growth-rate estimator
//! for abelian virtual endomorphisms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use thiserror::Error;

pub const ITERATION_CAP: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectraError {
    #[error("matrix must be square with {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("negative entry at ({row}, {col})")]
    Negative { row: usize, col: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("power iteration did not converge within {cap} iterations")]
    NoConvergence { cap: usize },
    #[error("domain scale {0} does not clear the denominators")]
    BadDomainScale(BigInt),
}

/// Square matrix of nonnegative rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn new(n: usize, entries: Vec<BigRational>) -> Result<Self, SpectraError> {
        if entries.len() != n * n {
            return Err(SpectraError::Shape {
                expected: n * n,
                got: entries.len(),
            });
        }
        if let Some(i) = entries.iter().position(|e| e.is_negative()) {
            return Err(SpectraError::Negative {
                row: i / n,
                col: i % n,
            });
        }
        Ok(RationalMatrix { n, entries })
    }

    pub fn from_integers(n: usize, entries: &[i64]) -> Result<Self, SpectraError> {
        Self::new(
            n,
            entries
                .iter()
                .map(|&e| BigRational::from_integer(e.into()))
                .collect(),
        )
    }

    pub fn from_ratios(n: usize, entries: &[(i64, i64)]) -> Result<Self, SpectraError> {
        Self::new(
            n,
            entries
                .iter()
                .map(|&(p, q)| BigRational::new(p.into(), q.into()))
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigRational::one();
        }
        RationalMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &BigRational {
        &self.entries[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: BigRational) {
        assert!(!value.is_negative(), "entries must be nonnegative");
        self.entries[row * self.n + col] = value;
    }

    /// Matrix file format: `n` on the first line, then `n` rows of `n`
    /// entries written `p/q` or as integers.
    pub fn parse(text: &str) -> Result<Self, SpectraError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (first, head) = lines.next().ok_or(SpectraError::Parse {
            line: 1,
            message: "empty input".into(),
        })?;
        let n: usize = head.parse().map_err(|_| SpectraError::Parse {
            line: first,
            message: format!("expected dimension, got `{head}`"),
        })?;
        let mut entries = Vec::with_capacity(n * n);
        for _ in 0..n {
            let (line, row) = lines.next().ok_or(SpectraError::Parse {
                line: first + n,
                message: "missing rows".into(),
            })?;
            let toks: Vec<&str> = row.split_whitespace().collect();
            if toks.len() != n {
                return Err(SpectraError::Parse {
                    line,
                    message: format!("expected {n} entries, got {}", toks.len()),
                });
            }
            for t in toks {
                entries.push(parse_rational(t).ok_or_else(|| SpectraError::Parse {
                    line,
                    message: format!("bad rational `{t}`"),
                })?);
            }
        }
        if let Some((line, _)) = lines.next() {
            return Err(SpectraError::Parse {
                line,
                message: "trailing content".into(),
            });
        }
        RationalMatrix::new(n, entries)
    }

    fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j).to_f64().unwrap_or(f64::INFINITY))
                    .collect()
            })
            .collect()
    }

    /// Strongly connected components of the support graph.
    fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| !self.get(i, j).is_zero()).collect())
            .collect();
        let reach = |from: usize| {
            let mut seen = vec![false; n];
            let mut stack = vec![from];
            seen[from] = true;
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen
        };
        let reach: Vec<Vec<bool>> = (0..n).map(reach).collect();
        let mut assigned = vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if assigned[i] {
                continue;
            }
            let comp: Vec<usize> = (0..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
            for &j in &comp {
                assigned[j] = true;
            }
            out.push(comp);
        }
        out
    }

    /// Spectral radius by power iteration from the all-ones vector.
    ///
    /// The spectral radius is the largest over irreducible diagonal blocks;
    /// each block is iterated separately so its Perron root is simple. The
    /// per-step growth factors are averaged geometrically over a window that
    /// is a multiple of every possible period, which cancels the rotation of
    /// imprimitive blocks.
    pub fn leading_eigenvalue(&self, tol: f64) -> Result<f64, SpectraError> {
        let a = self.to_f64_rows();
        let mut best = 0.0f64;
        for comp in self.components() {
            let m = comp.len();
            let block: Vec<Vec<f64>> = comp
                .iter()
                .map(|&i| comp.iter().map(|&j| a[i][j]).collect())
                .collect();
            let rho = if m == 1 {
                block[0][0]
            } else {
                block_radius(&block, tol)?
            };
            best = best.max(rho);
        }
        Ok(best)
    }

    /// Exact decision of `ρ(A) < 1`: true iff `I − A` is invertible with an
    /// entrywise nonnegative inverse.
    pub fn is_contracting(&self) -> bool {
        let n = self.n;
        let mut m: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let d = if i == j { BigRational::one() } else { BigRational::zero() };
                        d - self.get(i, j)
                    })
                    .collect()
            })
            .collect();
        match invert(&mut m) {
            Some(inv) => inv.iter().flatten().all(|e| !e.is_negative()),
            None => false,
        }
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .filter(|&j| !self.get(i, j).is_zero())
                    .fold(BigRational::zero(), |acc, j| acc + self.get(i, j) * &v[j])
            })
            .collect()
    }

    /// Conjugation `D⁻¹ A D` by a positive diagonal matrix.
    pub fn diagonal_similarity(&self, d: &[BigRational]) -> RationalMatrix {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.get(i, j) * &d[j] / &d[i]);
            }
        }
        RationalMatrix { n, entries }
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

pub fn parse_rational(t: &str) -> Option<BigRational> {
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p.parse::<BigInt>().ok()?, q.parse::<BigInt>().ok()?),
        None => (t.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if q.is_zero() {
        return None;
    }
    Some(BigRational::new(p, q))
}

fn lcm_upto(m: usize) -> usize {
    (1..=m.min(12)).fold(1usize, |acc, k| acc.lcm(&k))
}

fn block_radius(block: &[Vec<f64>], tol: f64) -> Result<f64, SpectraError> {
    let m = block.len();
    let period = lcm_upto(m);
    let window = period * 10usize.div_ceil(period);
    let mut v = vec![1.0 / m as f64; m];
    let mut logs: Vec<f64> = Vec::with_capacity(ITERATION_CAP);
    let mut prev: Option<f64> = None;
    let mut stable = 0usize;
    for _ in 0..ITERATION_CAP {
        let mut u = vec![0.0; m];
        for i in 0..m {
            for j in 0..m {
                u[i] += block[i][j] * v[j];
            }
        }
        let norm: f64 = u.iter().sum();
        if norm == 0.0 {
            return Ok(0.0);
        }
        logs.push(norm.ln());
        for (vi, ui) in v.iter_mut().zip(&u) {
            *vi = ui / norm;
        }
        if logs.len() < window {
            continue;
        }
        let est = (logs[logs.len() - window..].iter().sum::<f64>() / window as f64).exp();
        if let Some(p) = prev {
            if (est - p).abs() <= tol * est.max(1.0) {
                stable += 1;
                if stable >= window {
                    return Ok(est);
                }
            } else {
                stable = 0;
            }
        }
        prev = Some(est);
    }
    Err(SpectraError::NoConvergence { cap: ITERATION_CAP })
}

/// Gauss–Jordan inverse; `None` when singular.
fn invert(m: &mut [Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col].clone();
        for j in 0..n {
            m[col][j] = &m[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in 0..n {
                let a = &m[col][j] * &f;
                m[r][j] -= a;
                let b = &inv[col][j] * &f;
                inv[r][j] -= b;
            }
        }
    }
    Some(inv)
}

/// `φ: Zⁿ ⇢ Zⁿ` given by a nonnegative rational matrix, defined on
/// `L · Zⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianVirtualEndo {
    matrix: RationalMatrix,
    domain_scale: BigInt,
}

impl AbelianVirtualEndo {
    pub fn new(matrix: RationalMatrix, domain_scale: BigInt) -> Result<Self, SpectraError> {
        if domain_scale <= BigInt::zero()
            || matrix
                .entries
                .iter()
                .any(|e| !(e * &domain_scale).is_integer())
        {
            return Err(SpectraError::BadDomainScale(domain_scale));
        }
        Ok(AbelianVirtualEndo {
            matrix,
            domain_scale,
        })
    }

    /// Domain scale taken as the LCM of the entry denominators.
    pub fn with_default_scale(matrix: RationalMatrix) -> Self {
        let l = matrix
            .entries
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        AbelianVirtualEndo {
            matrix,
            domain_scale: l,
        }
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    pub fn domain_scale(&self) -> &BigInt {
        &self.domain_scale
    }

    /// `max_v (|Aⁿ v|₁ / |v|₁)^{1/n}` over `trials` random nonzero
    /// `v ∈ L · Zⁿ`, computed exactly before the final root.
    pub fn contraction_coefficient_estimate(&self, n_steps: usize, trials: usize, seed: u64) -> f64 {
        assert!(n_steps >= 1, "n_steps must be positive");
        let n = self.matrix.dim();
        // D·A is integral, and Aⁿv = (D·A)ⁿv / Dⁿ.
        let d = self
            .matrix
            .entries
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        let scaled: Vec<BigInt> = self
            .matrix
            .entries
            .iter()
            .map(|e| e.numer() * (&d / e.denom()))
            .collect();
        let ln_d = big_ln(&d);
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut best = 0.0f64;
        for _ in 0..trials.max(1) {
            let raw: Vec<i64> = loop {
                let v: Vec<i64> = (0..n).map(|_| rng.random_range(-10..=10)).collect();
                if v.iter().any(|&x| x != 0) {
                    break v;
                }
            };
            let v: Vec<BigInt> = raw.iter().map(|&x| BigInt::from(x) * &self.domain_scale).collect();
            let v_norm = l1(&v);
            let mut u = v;
            for _ in 0..n_steps {
                u = (0..n)
                    .map(|i| (0..n).map(|j| &scaled[i * n + j] * &u[j]).sum())
                    .collect();
            }
            let top = l1(&u);
            let est = if top.is_zero() {
                0.0
            } else {
                ((big_ln(&top) - big_ln(&v_norm)) / n_steps as f64 - ln_d).exp()
            };
            best = best.max(est);
        }
        best
    }
}

fn l1(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).sum()
}

fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}
