//! Exact dense matrices over the rationals, plus Smith normal form over
//! the integers for lattice-index computations.

use crate::constants::Rat;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Dense rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub rows: Vec<Vec<Rat>>,
}

impl QMat {
    pub fn new(rows: Vec<Vec<Rat>>) -> Self {
        if let Some(w) = rows.first().map(|r| r.len()) {
            assert!(rows.iter().all(|r| r.len() == w), "ragged matrix");
        }
        QMat { rows }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        QMat::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect())
                .collect(),
        )
    }

    pub fn zero(n: usize, m: usize) -> Self {
        QMat { rows: vec![vec![Rat::zero(); m]; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            m.rows[i][i] = Rat::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }

    pub fn get(&self, i: usize, j: usize) -> Rat {
        self.rows[i][j].clone()
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.rows[i][j] = v;
    }

    pub fn transpose(&self) -> QMat {
        let (n, m) = (self.nrows(), self.ncols());
        let mut out = QMat::zero(m, n);
        for i in 0..n {
            for j in 0..m {
                out.rows[j][i] = self.rows[i][j].clone();
            }
        }
        out
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!((self.nrows(), self.ncols()), (other.nrows(), other.ncols()));
        let mut out = self.clone();
        for (r, or) in out.rows.iter_mut().zip(&other.rows) {
            for (x, y) in r.iter_mut().zip(or) {
                *x += y;
            }
        }
        out
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> QMat {
        let mut out = self.clone();
        for r in out.rows.iter_mut() {
            for x in r.iter_mut() {
                *x *= c;
            }
        }
        out
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.ncols(), other.nrows(), "dimension mismatch");
        let (n, k, m) = (self.nrows(), self.ncols(), other.ncols());
        let mut out = QMat::zero(n, m);
        for i in 0..n {
            for l in 0..k {
                if self.rows[i][l].is_zero() {
                    continue;
                }
                for j in 0..m {
                    if other.rows[l][j].is_zero() {
                        continue;
                    }
                    let p = &self.rows[i][l] * &other.rows[l][j];
                    out.rows[i][j] += p;
                }
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> QMat {
        assert_eq!(self.nrows(), self.ncols());
        let mut acc = QMat::identity(self.nrows());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Apply a row vector on the left: v * self.
    pub fn row_apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.nrows());
        let m = self.ncols();
        let mut out = vec![Rat::zero(); m];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for j in 0..m {
                out[j] += vi * &self.rows[i][j];
            }
        }
        out
    }

    /// exp(A) for nilpotent A, exact (the series terminates).
    pub fn nilpotent_exp(&self) -> QMat {
        let n = self.nrows();
        assert_eq!(n, self.ncols());
        let mut out = QMat::identity(n);
        let mut term = QMat::identity(n);
        let mut k: i64 = 0;
        loop {
            k += 1;
            term = term.mul(self).scale(&Rat::new(BigInt::one(), BigInt::from(k)));
            if term.is_zero() {
                break;
            }
            assert!(k as usize <= n, "matrix is not nilpotent");
            out = out.add(&term);
        }
        out
    }

    /// log(M) for unipotent M = I + S with S nilpotent, exact.
    pub fn unipotent_log(&self) -> QMat {
        let n = self.nrows();
        assert_eq!(n, self.ncols());
        let s = self.sub(&QMat::identity(n));
        let mut out = QMat::zero(n, n);
        let mut pow = QMat::identity(n);
        let mut k: i64 = 0;
        loop {
            k += 1;
            pow = pow.mul(&s);
            if pow.is_zero() {
                break;
            }
            assert!(k as usize <= n, "matrix is not unipotent");
            let sign = if k % 2 == 1 { Rat::one() } else { -Rat::one() };
            out = out.add(&pow.scale(&(sign / Rat::from_integer(BigInt::from(k)))));
        }
        out
    }

    /// Reduced row echelon form in place; returns the rank.
    pub fn rref_in_place(&mut self) -> usize {
        let (n, m) = (self.nrows(), self.ncols());
        let mut pivot_row = 0;
        for col in 0..m {
            if pivot_row >= n {
                break;
            }
            let Some(src) = (pivot_row..n).find(|&r| !self.rows[r][col].is_zero()) else {
                continue;
            };
            self.rows.swap(pivot_row, src);
            let inv = Rat::one() / self.rows[pivot_row][col].clone();
            for x in self.rows[pivot_row].iter_mut() {
                *x *= &inv;
            }
            for r in 0..n {
                if r != pivot_row && !self.rows[r][col].is_zero() {
                    let f = self.rows[r][col].clone();
                    for c in 0..m {
                        let d = &self.rows[pivot_row][c] * &f;
                        self.rows[r][c] -= d;
                    }
                }
            }
            pivot_row += 1;
        }
        pivot_row
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place()
    }

    /// Inverse of a square matrix, or None if singular.
    pub fn inverse(&self) -> Option<QMat> {
        let n = self.nrows();
        if n != self.ncols() {
            return None;
        }
        let mut aug = QMat::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.rows[i][j] = self.rows[i][j].clone();
            }
            aug.rows[i][n + i] = Rat::one();
        }
        aug.rref_in_place();
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { Rat::one() } else { Rat::zero() };
                if aug.rows[i][j] != expect {
                    return None;
                }
            }
        }
        let mut inv = QMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.rows[i][j] = aug.rows[i][n + j].clone();
            }
        }
        Some(inv)
    }

    /// Basis of the right kernel {v : A v = 0}, as column vectors.
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        let mut r = self.clone();
        r.rref_in_place();
        let (n, m) = (r.nrows(), r.ncols());
        let mut pivot_of_col = vec![None; m];
        for i in 0..n {
            if let Some(c) = (0..m).find(|&c| !r.rows[i][c].is_zero()) {
                pivot_of_col[c] = Some(i);
            }
        }
        let mut basis = Vec::new();
        for free in 0..m {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![Rat::zero(); m];
            v[free] = Rat::one();
            for c in 0..m {
                if let Some(i) = pivot_of_col[c] {
                    v[c] = -r.rows[i][free].clone();
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Rank of the row span of a list of vectors.
pub fn span_rank(rows: &[Vec<Rat>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    QMat::new(rows.to_vec()).rank()
}

/// Does every vector in `vectors` lie in the row span of `span`?
pub fn span_contains(span: &[Vec<Rat>], vectors: &[Vec<Rat>]) -> bool {
    if vectors.is_empty() {
        return true;
    }
    if span.is_empty() {
        return vectors.iter().all(|v| v.iter().all(|x| x.is_zero()));
    }
    let base = span_rank(span);
    let mut all: Vec<Vec<Rat>> = span.to_vec();
    all.extend_from_slice(vectors);
    span_rank(&all) == base
}

/// Intersection of two row spans, as a basis.
pub fn span_intersection(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    // Zassenhaus: row reduce [A | A; B | 0]; rows with zero left half carry
    // the intersection in their right half.
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let m = a[0].len();
    let mut rows = Vec::new();
    for v in a {
        let mut r = v.clone();
        r.extend(v.iter().cloned());
        rows.push(r);
    }
    for v in b {
        let mut r = v.clone();
        r.extend(std::iter::repeat(Rat::zero()).take(m));
        rows.push(r);
    }
    let mut mat = QMat::new(rows);
    mat.rref_in_place();
    let mut out = Vec::new();
    for r in &mat.rows {
        let left_zero = r[..m].iter().all(|x| x.is_zero());
        let right = r[m..].to_vec();
        if left_zero && right.iter().any(|x| !x.is_zero()) {
            out.push(right);
        }
    }
    out
}

/// Smith normal form diagonal of an integer matrix (nonnegative entries,
/// each dividing the next). Returned without trailing zeros.
pub fn smith_diagonal(mat: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = mat.len();
    if n == 0 {
        return Vec::new();
    }
    let m = mat[0].len();
    let mut a: Vec<Vec<BigInt>> = mat.to_vec();
    let mut diag = Vec::new();
    let mut top = 0;

    while top < n.min(m) {
        // find a nonzero pivot in the remaining block
        let mut pivot = None;
        'search: for i in top..n {
            for j in top..m {
                if !a[i][j].is_zero() {
                    pivot = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(top, pi);
        for row in a.iter_mut() {
            row.swap(top, pj);
        }

        // clear row and column by repeated division; restart whenever a
        // remainder strictly smaller than the pivot appears
        loop {
            let mut done = true;
            for i in (top + 1)..n {
                if a[i][top].is_zero() {
                    continue;
                }
                let q = div_round(&a[i][top], &a[top][top]);
                for j in top..m {
                    let d = &q * &a[top][j];
                    a[i][j] -= d;
                }
                if !a[i][top].is_zero() {
                    a.swap(top, i);
                    done = false;
                }
            }
            for j in (top + 1)..m {
                if a[top][j].is_zero() {
                    continue;
                }
                let q = div_round(&a[top][j], &a[top][top]);
                for row in a.iter_mut().skip(top) {
                    let d = &q * &row[top];
                    row[j] -= d;
                }
                if !a[top][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(top, j);
                    }
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        diag.push(a[top][top].abs());
        top += 1;
    }

    // enforce the divisibility chain d_i | d_{i+1}
    let mut changed = true;
    while changed {
        changed = false;
        for i in 1..diag.len() {
            if diag[i - 1].is_zero() {
                continue;
            }
            if (&diag[i] % &diag[i - 1]).is_zero() {
                continue;
            }
            let g = gcd_big(&diag[i - 1], &diag[i]);
            let l = (&diag[i - 1] * &diag[i]) / &g;
            diag[i - 1] = g;
            diag[i] = l;
            changed = true;
        }
    }
    diag.retain(|d| !d.is_zero());
    diag
}

fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.gcd(b)
}

/// Rounded integer division used for Euclidean size reduction.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    let (q, r) = a.div_rem(b);
    // shift quotient so the remainder has at most half the pivot size
    let two_r = BigInt::from(2) * r.abs();
    if two_r > b.abs() {
        if (a * b).is_negative() {
            q - BigInt::one()
        } else {
            q + BigInt::one()
        }
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::rat_i;

    #[test]
    fn exp_log_round_trip() {
        let n = QMat::from_i64(&[&[0, 0, 0], &[1, 0, 0], &[0, 2, 0]]);
        let m = n.nilpotent_exp();
        assert_eq!(m.unipotent_log(), n);
        assert_eq!(m.rows[1][0], rat_i(1));
        assert_eq!(m.rows[2][0], rat_i(1));
    }

    #[test]
    fn rank_and_kernel() {
        let a = QMat::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        for row in &a.rows {
            let dot: Rat = row.iter().zip(&k[0]).map(|(x, y)| x * y).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn span_operations() {
        let e1 = vec![rat_i(1), rat_i(0), rat_i(0)];
        let e2 = vec![rat_i(0), rat_i(1), rat_i(0)];
        let d = vec![rat_i(1), rat_i(1), rat_i(0)];
        assert!(span_contains(&[e1.clone(), e2.clone()], &[d.clone()]));
        assert!(!span_contains(&[e1.clone()], &[e2.clone()]));
        let inter = span_intersection(&[e1.clone(), e2.clone()], &[d.clone()]);
        assert_eq!(span_rank(&inter), 1);
        assert!(span_contains(&[d], &inter));
    }

    #[test]
    fn smith_form() {
        let m: Vec<Vec<BigInt>> = vec![
            vec![BigInt::from(2), BigInt::from(4)],
            vec![BigInt::from(6), BigInt::from(8)],
        ];
        let d = smith_diagonal(&m);
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(4)]);
        let id: Vec<Vec<BigInt>> = vec![
            vec![BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(2)],
        ];
        assert_eq!(smith_diagonal(&id), vec![BigInt::from(1), BigInt::from(2)]);
    }
}
