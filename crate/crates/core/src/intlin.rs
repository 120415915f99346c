//! Integer matrices, Smith normal form and row-lattice membership modulo q.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * if n == 0 { BigInt::one() } else { a[(n - 1, n - 1)].clone() })
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row[dst] += f · row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for c in 0..self.cols {
            let v = &self[(src, c)] * f;
            self[(dst, c)] += v;
        }
    }

    /// col[dst] += f · col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for r in 0..self.rows {
            let v = &self[(r, src)] * f;
            self[(r, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -&self[(i, c)];
            self[(i, c)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// The `(m−1)×m` relation matrix: row 1 is `(1, 0, …, 0, −1)`, row `i ≥ 2`
/// has `−1` in column `i−1` and `+1` in column `i` (1-based).
pub fn build_matrix_a(m: usize) -> IntMatrix {
    let mut a = IntMatrix::zeros(m.saturating_sub(1), m);
    for i in 0..m.saturating_sub(1) {
        if i == 0 {
            a[(0, 0)] = BigInt::one();
            a[(0, m - 1)] = -BigInt::one();
        } else {
            a[(i, i - 1)] = -BigInt::one();
            a[(i, i)] = BigInt::one();
        }
    }
    a
}

/// Smith normal form `S = U·M·V` with `U`, `V` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    /// Nonzero diagonal entries, each dividing the next.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s[(i, i)].clone())
            .take_while(|d| !d.is_zero())
            .collect()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let r = m.rows.min(m.cols);
    for t in 0..r {
        loop {
            // pivot: smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..s.rows {
                for j in t..s.cols {
                    let x = &s[(i, j)];
                    if !x.is_zero()
                        && best.is_none_or(|(bi, bj)| x.abs() < s[(bi, bj)].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Smith { s, u, v };
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..s.rows {
                let q = s[(i, t)].div_floor(&s[(t, t)]);
                if !q.is_zero() {
                    s.add_row(i, t, &-&q);
                    u.add_row(i, t, &-&q);
                }
                clean &= s[(i, t)].is_zero();
            }
            for j in t + 1..s.cols {
                let q = s[(t, j)].div_floor(&s[(t, t)]);
                if !q.is_zero() {
                    s.add_col(j, t, &-&q);
                    v.add_col(j, t, &-&q);
                }
                clean &= s[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block
            let bad = (t + 1..s.rows).find(|&i| {
                (t + 1..s.cols).any(|j| !s[(i, j)].is_multiple_of(&s[(t, t)]))
            });
            match bad {
                Some(i) => {
                    s.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    Smith { s, u, v }
}

/// Whether some integer row vector `x` has `x·M ≡ v (mod q)`.
pub fn row_space_contains_mod(m: &IntMatrix, v: &[BigInt], q: &BigInt) -> Result<bool> {
    if v.len() != m.cols {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against {} columns",
            v.len(),
            m.cols
        )));
    }
    if q < &BigInt::from(2) {
        return Err(Error::BadModulus(q.try_into().unwrap_or(i64::MIN)));
    }
    let smith = smith_normal_form(m);
    // x·M = v  ⇔  (x·U⁻¹)·S = v·V
    let diag = smith.invariant_factors();
    for j in 0..m.cols {
        let mut w = BigInt::zero();
        for (k, vk) in v.iter().enumerate() {
            w += vk * &smith.v[(k, j)];
        }
        let w = w.mod_floor(q);
        let g = match diag.get(j) {
            Some(d) => d.gcd(q),
            None => q.clone(),
        };
        if !w.is_multiple_of(&g) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn row_space_contains_mod_i64(m: &IntMatrix, v: &[i64], q: i64) -> Result<bool> {
    let v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
    row_space_contains_mod(m, &v, &BigInt::from(q))
}
