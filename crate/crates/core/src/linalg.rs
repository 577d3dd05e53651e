//! Dense exact linear algebra over ℚ and ℤ: row reduction, kernels,
//! inverses and Smith normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Rational;

pub type QVec = Vec<Rational>;

pub fn zero_vec(n: usize) -> QVec {
    vec![Rational::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> QVec {
    let mut v = zero_vec(n);
    v[i] = Rational::one();
    v
}

pub fn add(a: &[Rational], b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rational], c: &Rational) -> QVec {
    a.iter().map(|x| x * c).collect()
}

pub fn neg(a: &[Rational]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// `Σ c_i v_i` for row vectors `v_i` of length `n`.
pub fn combine(coeffs: &[Rational], rows: &[QVec], n: usize) -> QVec {
    let mut out = zero_vec(n);
    for (c, row) in coeffs.iter().zip(rows) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            *o += c * x;
        }
    }
    out
}

pub fn int_combine(coeffs: &[BigInt], rows: &[QVec], n: usize) -> QVec {
    let q: Vec<Rational> = coeffs
        .iter()
        .map(|c| Rational::from_integer(c.clone()))
        .collect();
    combine(&q, rows, n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Rows must share a length; `cols` fixes the width when `rows` is empty.
    pub fn from_rows(rows: &[QVec], cols: usize) -> Self {
        let mut m = QMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, x) in r.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<QVec> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// `M v` with `v` a column.
    pub fn mul_vec(&self, v: &[Rational]) -> QVec {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = Rational::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s += a * b;
                    }
                }
                s
            })
            .collect()
    }

    /// `vᵀ M` with `v` a row.
    pub fn vec_mul(&self, v: &[Rational]) -> QVec {
        assert_eq!(self.rows, v.len());
        let mut out = zero_vec(self.cols);
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(self.row(i)) {
                if !x.is_zero() {
                    *o += c * x;
                }
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = &m[(r, j)] * &f;
                        m[(i, j)] -= v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> Rational {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let mut det = Rational::one();
        for c in 0..m.cols {
            let Some(p) = (c..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            det *= &pivot;
            for i in c + 1..m.rows {
                if !m[(i, c)].is_zero() {
                    let f = &m[(i, c)] / &pivot;
                    for j in c..m.cols {
                        let v = &m[(c, j)] * &f;
                        m[(i, j)] -= v;
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return Some(QMatrix::zeros(0, 0));
        }
        let mut aug = QMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Basis of `{x : M x = 0}`.
    pub fn kernel(&self) -> Vec<QVec> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = zero_vec(self.cols);
                x[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    x[p] = -r[(row, f)].clone();
                }
                x
            })
            .collect()
    }

    /// Some `x` with `M x = b`, if one exists.
    pub fn solve(&self, b: &[Rational]) -> Option<QVec> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = zero_vec(self.cols);
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r[(row, self.cols)].clone();
        }
        Some(x)
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

/// Rows of `rows` extended by standard basis vectors to a basis of ℚⁿ,
/// scanning `e_0, e_1, …` in order.
pub fn extend_to_basis(rows: &[QVec], n: usize) -> Vec<QVec> {
    let mut out = rows.to_vec();
    let mut rank = QMatrix::from_rows(&out, n).rank();
    for i in 0..n {
        if rank == n {
            break;
        }
        out.push(unit_vec(n, i));
        let r = QMatrix::from_rows(&out, n).rank();
        if r > rank {
            rank = r;
        } else {
            out.pop();
        }
    }
    out
}

pub type IMatrix = Vec<Vec<BigInt>>;

pub fn to_integer_matrix(m: &QMatrix) -> Option<IMatrix> {
    (0..m.nrows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|x| x.is_integer().then(|| x.to_integer()))
                .collect::<Option<Vec<_>>>()
        })
        .collect()
}

pub fn from_integer_matrix(m: &IMatrix, cols: usize) -> QMatrix {
    let rows: Vec<QVec> = m
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| Rational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    QMatrix::from_rows(&rows, cols)
}

/// `P · A · Q = diag(d_1, …)` with `P`, `Q` unimodular, `d_i ≥ 0` and
/// `d_i | d_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub p: IMatrix,
    pub q: IMatrix,
    pub diag: Vec<BigInt>,
}

fn identity_int(n: usize) -> IMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Smith normal form of an `m × n` integer matrix.
///
/// Pivot choice is deterministic: smallest nonzero absolute value in the
/// trailing block, first in row-major order.
pub fn smith(a: &IMatrix, m: usize, n: usize) -> Smith {
    let mut a = a.clone();
    let mut p = identity_int(m);
    let mut q = identity_int(n);
    let k = m.min(n);
    for t in 0..k {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if a[bi][bj].abs() <= a[i][j].abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = best else {
                let diag = (0..k).map(|i| a[i][i].clone()).collect();
                return finish(Smith { p, q, diag });
            };
            a.swap(t, pi);
            p.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in q.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let f = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &f);
                row_axpy(&mut p, i, t, &f);
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let f = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &f);
                col_axpy(&mut q, j, t, &f);
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into row t and retry.
            let pivot = a[t][t].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !a[i][j].is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    let neg_one = -BigInt::one();
                    row_axpy(&mut a, t, i, &neg_one);
                    row_axpy(&mut p, t, i, &neg_one);
                }
                None => break,
            }
        }
    }
    let diag = (0..k).map(|i| a[i][i].clone()).collect();
    finish(Smith { p, q, diag })
}

fn finish(mut s: Smith) -> Smith {
    for (i, d) in s.diag.iter_mut().enumerate() {
        if d.is_negative() {
            *d = -d.clone();
            for x in s.p[i].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    s
}

/// `row_i -= f · row_j`.
fn row_axpy(m: &mut IMatrix, i: usize, j: usize, f: &BigInt) {
    let src = m[j].clone();
    for (x, y) in m[i].iter_mut().zip(src) {
        *x -= f * y;
    }
}

/// `col_i -= f · col_j`.
fn col_axpy(m: &mut IMatrix, i: usize, j: usize, f: &BigInt) {
    for row in m.iter_mut() {
        let y = row[j].clone();
        row[i] -= f * y;
    }
}

pub fn int_mat_mul(a: &IMatrix, b: &IMatrix, inner: usize, cols: usize) -> IMatrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Inverse of a unimodular integer matrix.
pub fn unimodular_inverse(m: &IMatrix) -> IMatrix {
    let n = m.len();
    let inv = from_integer_matrix(m, n)
        .inverse()
        .expect("unimodular matrix is invertible");
    to_integer_matrix(&inv).expect("inverse of unimodular matrix is integral")
}
