//! Exact integer and rational linear algebra.
//!
//! Smith normal form with unimodular transforms, saturated integer kernel
//! bases, rational linear solving, and exact cone membership via
//! Fourier-Motzkin elimination. All operations are total and pure.

use crate::num::{int, rat, Int, Rat};
use num_traits::{One, Signed, Zero};

/// Dense integer matrix with arbitrary-precision entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Int>,
}

/// Rational vector, component-wise exact.
pub type RatVector = Vec<Rat>;

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged row in matrix literal");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = int(v);
            }
        }
        m
    }

    pub fn from_bigint_rows(rows: &[Vec<Int>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged row in matrix literal");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Determinant by exact fraction-free expansion (Bareiss); square only.
    pub fn determinant(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let q: Vec<RatVector> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| Rat::from_integer(v.clone())).collect())
            .collect();
        let d = rat_determinant(&q);
        debug_assert!(d.denom().is_one());
        d.to_integer()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.entries[i * self.cols + j]
    }
}

/// Smith normal form `A = U * D * V` with `U`, `V` unimodular and `D`
/// diagonal with `d_k | d_{k+1}`.
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfDecomposition {
    /// Diagonal entries of `D`, including trailing zeros.
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.d.rows.min(self.d.cols)).map(|k| self.d[(k, k)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

/// Smith normal form over Z. Pivot choice: smallest nonzero absolute value
/// in the remaining block, which keeps entry growth in check.
pub fn smith_normal_form(a: &IntMatrix) -> SnfDecomposition {
    let (rows, cols) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    // Row op on d is mirrored by the same op on u (tracking U^-1 applied to A),
    // column ops mirrored on v. At the end A = U D V with U, V accumulated
    // inverses of the applied transforms.
    let n = rows.min(cols);
    for k in 0..n {
        loop {
            let pivot = smallest_nonzero(&d, k);
            let (pi, pj) = match pivot {
                Some(p) => p,
                None => break, // remaining block is zero
            };
            swap_rows(&mut d, &mut u, k, pi, rows);
            swap_cols(&mut d, &mut v, k, pj, cols);
            if d[(k, k)].is_negative() {
                negate_row(&mut d, &mut u, k);
            }
            // Clear column k below and row k to the right.
            let mut dirty = false;
            for i in k + 1..rows {
                if !d[(i, k)].is_zero() {
                    let q = div_floor_nearest(&d[(i, k)], &d[(k, k)]);
                    row_axpy(&mut d, &mut u, i, k, &q);
                    if !d[(i, k)].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in k + 1..cols {
                if !d[(k, j)].is_zero() {
                    let q = div_floor_nearest(&d[(k, j)], &d[(k, k)]);
                    col_axpy(&mut d, &mut v, j, k, &q);
                    if !d[(k, j)].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue; // remainders became new, smaller pivot candidates
            }
            // Divisibility: fold in any entry of the trailing block that the
            // pivot does not divide, then restart this k.
            let mut fixed = true;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if !(&d[(i, j)] % &d[(k, k)]).is_zero() {
                        // add row i to row k, creating a non-divisible entry in row k
                        add_row(&mut d, &mut u, k, i);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
    }
    SnfDecomposition { u, d, v }
}

fn smallest_nonzero(d: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in k..d.rows {
        for j in k..d.cols {
            if d[(i, j)].is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if d[(i, j)].abs() < d[(bi, bj)].abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

/// Quotient minimizing the remainder's absolute value.
fn div_floor_nearest(a: &Int, b: &Int) -> Int {
    let q = Int::from(a / b);
    let r = a - &q * b;
    if &r.abs() * 2 > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

fn swap_rows(d: &mut IntMatrix, u: &mut IntMatrix, a: usize, b: usize, _rows: usize) {
    if a == b {
        return;
    }
    for j in 0..d.cols {
        let (x, y) = (d[(a, j)].clone(), d[(b, j)].clone());
        d[(a, j)] = y;
        d[(b, j)] = x;
    }
    // mirror on U columns: swapping rows of D means U gets its columns swapped
    for i in 0..u.rows {
        let (x, y) = (u[(i, a)].clone(), u[(i, b)].clone());
        u[(i, a)] = y;
        u[(i, b)] = x;
    }
}

fn swap_cols(d: &mut IntMatrix, v: &mut IntMatrix, a: usize, b: usize, _cols: usize) {
    if a == b {
        return;
    }
    for i in 0..d.rows {
        let (x, y) = (d[(i, a)].clone(), d[(i, b)].clone());
        d[(i, a)] = y;
        d[(i, b)] = x;
    }
    for j in 0..v.cols {
        let (x, y) = (v[(a, j)].clone(), v[(b, j)].clone());
        v[(a, j)] = y;
        v[(b, j)] = x;
    }
}

fn negate_row(d: &mut IntMatrix, u: &mut IntMatrix, k: usize) {
    for j in 0..d.cols {
        let x = -d[(k, j)].clone();
        d[(k, j)] = x;
    }
    for i in 0..u.rows {
        let x = -u[(i, k)].clone();
        u[(i, k)] = x;
    }
}

/// d.row(i) -= q * d.row(k), mirrored as u.col(k) += q * u.col(i).
fn row_axpy(d: &mut IntMatrix, u: &mut IntMatrix, i: usize, k: usize, q: &Int) {
    for j in 0..d.cols {
        let t = q * &d[(k, j)];
        d[(i, j)] -= t;
    }
    for r in 0..u.rows {
        let t = q * &u[(r, i)];
        u[(r, k)] += t;
    }
}

/// d.col(j) -= q * d.col(k), mirrored as v.row(k) += q * v.row(j).
fn col_axpy(d: &mut IntMatrix, v: &mut IntMatrix, j: usize, k: usize, q: &Int) {
    for i in 0..d.rows {
        let t = q * &d[(i, k)];
        d[(i, j)] -= t;
    }
    for c in 0..v.cols {
        let t = q * &v[(j, c)];
        v[(k, c)] += t;
    }
}

/// d.row(k) += d.row(i), mirrored as u.col(i) -= u.col(k).
fn add_row(d: &mut IntMatrix, u: &mut IntMatrix, k: usize, i: usize) {
    for j in 0..d.cols {
        let t = d[(i, j)].clone();
        d[(k, j)] += t;
    }
    for r in 0..u.rows {
        let t = u[(r, k)].clone();
        u[(r, i)] -= t;
    }
}

/// Saturated integral basis of `ker(A) ∩ Z^cols`: every integer kernel
/// vector is an integer combination of the returned vectors.
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vec<Int>> {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    // A = U D V, so A x = 0 iff D (V x) = 0 iff the first `rank` coords of
    // V x vanish. Kernel basis: columns of V^-1 past the rank. V unimodular,
    // so V^-1 is integral and the basis is saturated.
    let vinv = unimodular_inverse(&snf.v);
    let mut basis = Vec::new();
    for j in rank..a.cols {
        let col: Vec<Int> = (0..a.cols).map(|i| vinv[(i, j)].clone()).collect();
        basis.push(col);
    }
    basis
}

/// Inverse of a unimodular integer matrix, exact and integral.
pub fn unimodular_inverse(m: &IntMatrix) -> IntMatrix {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let rows: Vec<RatVector> = (0..n)
        .map(|i| m.row(i).iter().map(|v| Rat::from_integer(v.clone())).collect())
        .collect();
    let inv = rat_inverse(&rows).expect("unimodular matrix must be invertible");
    let mut out = IntMatrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            assert!(inv[i][j].denom().is_one(), "inverse of unimodular matrix must be integral");
            out[(i, j)] = inv[i][j].numer().clone();
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Rational Gaussian elimination
// ---------------------------------------------------------------------------

pub fn rat_determinant(m: &[RatVector]) -> Rat {
    let n = m.len();
    if n == 0 {
        return rat(1);
    }
    assert!(m.iter().all(|r| r.len() == n));
    let mut a: Vec<RatVector> = m.to_vec();
    let mut det = rat(1);
    for i in 0..n {
        let pivot = (i..n).find(|&r| !a[r][i].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => return rat(0),
        };
        if p != i {
            a.swap(i, p);
            det = -det;
        }
        det *= a[i][i].clone();
        let inv = a[i][i].clone();
        for j in i..n {
            a[i][j] = &a[i][j] / &inv;
        }
        for r in i + 1..n {
            if a[r][i].is_zero() {
                continue;
            }
            let f = a[r][i].clone();
            for j in i..n {
                let t = &f * &a[i][j];
                a[r][j] = &a[r][j] - t;
            }
        }
    }
    det
}

pub fn rat_inverse(m: &[RatVector]) -> Option<Vec<RatVector>> {
    let n = m.len();
    let mut a: Vec<RatVector> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { rat(1) } else { rat(0) });
            }
            r
        })
        .collect();
    for i in 0..n {
        let p = (i..n).find(|&r| !a[r][i].is_zero())?;
        a.swap(i, p);
        let inv = a[i][i].clone();
        for j in 0..2 * n {
            a[i][j] = &a[i][j] / &inv;
        }
        for r in 0..n {
            if r == i || a[r][i].is_zero() {
                continue;
            }
            let f = a[r][i].clone();
            for j in 0..2 * n {
                let t = &f * &a[i][j];
                a[r][j] = &a[r][j] - t;
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// General solution of `A x = b` over Q: returns `(particular, nullspace basis)`
/// or `None` when inconsistent.
pub fn solve_rational(a: &[RatVector], b: &RatVector) -> Option<(RatVector, Vec<RatVector>)> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    assert_eq!(b.len(), rows);
    let mut m: Vec<RatVector> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    // reduced row echelon form on the augmented matrix
    let mut pivots: Vec<usize> = Vec::new();
    let mut lead = 0usize;
    for col in 0..cols {
        let p = (lead..rows).find(|&r| !m[r][col].is_zero());
        let p = match p {
            Some(p) => p,
            None => continue,
        };
        m.swap(lead, p);
        let inv = m[lead][col].clone();
        for j in col..=cols {
            m[lead][j] = &m[lead][j] / &inv;
        }
        for r in 0..rows {
            if r == lead || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in col..=cols {
                let t = &f * &m[lead][j];
                m[r][j] = &m[r][j] - t;
            }
        }
        pivots.push(col);
        lead += 1;
        if lead == rows {
            break;
        }
    }
    // inconsistency: a zero row with nonzero rhs
    for r in lead..rows {
        if !m[r][cols].is_zero() {
            return None;
        }
    }
    let mut particular = vec![rat(0); cols];
    for (r, &col) in pivots.iter().enumerate() {
        particular[col] = m[r][cols].clone();
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut nullspace = Vec::new();
    for &f in &free {
        let mut v = vec![rat(0); cols];
        v[f] = rat(1);
        for (r, &col) in pivots.iter().enumerate() {
            v[col] = -m[r][f].clone();
        }
        nullspace.push(v);
    }
    Some((particular, nullspace))
}

// ---------------------------------------------------------------------------
// Exact cone membership
// ---------------------------------------------------------------------------

/// Does `x` lie in the closed cone generated by `generators`?
///
/// Decides feasibility of `x = Σ c_i g_i, c_i >= 0` exactly: the equality
/// system is solved by Gaussian elimination, the sign constraints are then
/// eliminated variable by variable (Fourier-Motzkin). Only feasibility is
/// queried, so degeneracy is harmless.
pub fn cone_member(x: &RatVector, generators: &[RatVector]) -> bool {
    let dim = x.len();
    assert!(generators.iter().all(|g| g.len() == dim), "generator dimension mismatch");
    if x.iter().all(|c| c.is_zero()) {
        return true;
    }
    if generators.is_empty() {
        return false;
    }
    // Equality system: for each ambient coordinate, Σ_i g_i[row] c_i = x[row].
    let a: Vec<RatVector> = (0..dim)
        .map(|row| generators.iter().map(|g| g[row].clone()).collect())
        .collect();
    let (particular, nullspace) = match solve_rational(&a, x) {
        Some(s) => s,
        None => return false,
    };
    // c = particular + Σ_k t_k * nullspace[k]; require c_i >= 0.
    // Inequalities in t: particular[i] + Σ_k nullspace[k][i] t_k >= 0.
    let n_ineq = generators.len();
    let n_t = nullspace.len();
    let mut ineqs: Vec<RatVector> = Vec::with_capacity(n_ineq);
    for i in 0..n_ineq {
        let mut row = Vec::with_capacity(n_t + 1);
        row.push(particular[i].clone());
        for ns in &nullspace {
            row.push(ns[i].clone());
        }
        ineqs.push(row); // row[0] + Σ row[k+1] t_k >= 0
    }
    fourier_motzkin_feasible(ineqs, n_t)
}

/// Feasibility of a system `row[0] + Σ row[k] t_k >= 0` by eliminating all t.
fn fourier_motzkin_feasible(mut ineqs: Vec<RatVector>, mut vars: usize) -> bool {
    while vars > 0 {
        let v = vars; // eliminate the last variable (index `vars` in rows)
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut rest = Vec::new();
        for row in ineqs {
            let c = row[v].clone();
            if c.is_zero() {
                rest.push(row);
            } else if c.is_positive() {
                pos.push(row);
            } else {
                neg.push(row);
            }
        }
        // Combine each (pos, neg) pair to cancel t_v.
        for p in &pos {
            for q in &neg {
                // p: t_v >= -(p'/p_v); q: t_v <= -(q'/q_v) with q_v < 0.
                // combined: p_v * q' - q_v * p' scaled to >= 0 form.
                let mut row = vec![rat(0); v];
                for j in 0..v {
                    row[j] = &p[v] * &q[j] - &q[v] * &p[j];
                }
                rest.push(row);
            }
        }
        ineqs = rest;
        vars -= 1;
    }
    ineqs.iter().all(|row| !row[0].is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::frac;

    fn rv(v: &[i64]) -> RatVector {
        v.iter().map(|&x| rat(x)).collect()
    }

    fn check_snf(a: &IntMatrix) {
        let snf = smith_normal_form(a);
        // reconstruction
        assert_eq!(snf.u.mul(&snf.d).mul(&snf.v), *a, "A != U D V");
        // unimodularity
        assert_eq!(snf.u.determinant().abs(), int(1), "U not unimodular");
        assert_eq!(snf.v.determinant().abs(), int(1), "V not unimodular");
        // diagonal with divisibility chain
        for i in 0..snf.d.rows {
            for j in 0..snf.d.cols {
                if i != j {
                    assert!(snf.d[(i, j)].is_zero(), "D not diagonal");
                }
            }
        }
        let diag = snf.diagonal();
        for w in diag.windows(2) {
            if !w[0].is_zero() {
                assert!(w[1].is_zero() || (&w[1] % &w[0]).is_zero(), "divisibility chain broken");
            } else {
                assert!(w[1].is_zero(), "zero before nonzero on diagonal");
            }
        }
    }

    #[test]
    fn snf_identity() {
        let a = IntMatrix::identity(2);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.d, IntMatrix::identity(2));
        check_snf(&a);
    }

    #[test]
    fn snf_diag_2_3() {
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.diagonal(), vec![int(1), int(6)]);
        check_snf(&a);
    }

    #[test]
    fn snf_weighted_p1_ray_map() {
        let a = IntMatrix::from_rows(&[vec![1, -2]]);
        let snf = smith_normal_form(&a);
        assert_eq!(snf.diagonal(), vec![int(1)]);
        check_snf(&a);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 1);
        // kernel of (1,-2): a = 2b, basis (2,1) up to sign
        let v = &k[0];
        assert_eq!(&v[0], &(&v[1] * 2));
        assert_eq!(v[1].abs(), int(1));
    }

    #[test]
    fn kernel_identity_trivial() {
        assert!(kernel_basis(&IntMatrix::identity(3)).is_empty());
    }

    #[test]
    fn kernel_hirzebruch_rays() {
        // rays of the Hirzebruch-2 fan as columns
        let a = IntMatrix::from_rows(&[vec![1, 0, -1, 0], vec![0, 1, 2, -1]]);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 2);
        // every kernel vector satisfies (a, b, a, b + 2a)
        for v in &k {
            assert_eq!(v[2], v[0]);
            assert_eq!(v[3], &v[1] + &v[0] * 2);
        }
    }

    #[test]
    fn snf_random_reconstruction() {
        // deterministic LCG; entries <= 9 in magnitude, dims <= 5
        let mut state: u64 = 0x5eed_cafe;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as i64
        };
        for _ in 0..200 {
            let r = (next().unsigned_abs() as usize % 5) + 1;
            let c = (next().unsigned_abs() as usize % 5) + 1;
            let mut rows = Vec::new();
            for _ in 0..r {
                rows.push((0..c).map(|_| (next() % 10) - 5).collect::<Vec<_>>());
            }
            check_snf(&IntMatrix::from_rows(&rows));
        }
    }

    #[test]
    fn kernel_saturation_vs_brute_force() {
        // For random small matrices, every integer kernel vector with entries
        // in [-5, 5] must be an exact integer combination of the basis.
        let mut state: u64 = 0xfeed_5eed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as i64
        };
        for _ in 0..100 {
            let r = (next().unsigned_abs() as usize % 2) + 1;
            let c = (next().unsigned_abs() as usize % 3) + 2; // 2..4 cols
            let mut rows = Vec::new();
            for _ in 0..r {
                rows.push((0..c).map(|_| (next() % 5) - 2).collect::<Vec<_>>());
            }
            let a = IntMatrix::from_rows(&rows);
            let basis = kernel_basis(&a);
            // brute-force scan of candidate kernel vectors
            let mut idx = vec![0i64; c];
            loop {
                let in_kernel = (0..a.rows).all(|i| {
                    (0..c).map(|j| &a[(i, j)] * int(idx[j])).fold(Int::zero(), |s, t| s + t).is_zero()
                });
                if in_kernel && idx.iter().any(|&x| x != 0) {
                    assert_integer_combination(&idx, &basis);
                }
                // odometer over [-5, 5]^c
                let mut k = 0;
                loop {
                    if k == c {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] <= 5 {
                        break;
                    }
                    idx[k] = -5;
                    k += 1;
                }
                if k == c {
                    break;
                }
            }
        }
    }

    fn assert_integer_combination(target: &[i64], basis: &[Vec<Int>]) {
        let cols = target.len();
        let a: Vec<RatVector> = (0..cols)
            .map(|i| basis.iter().map(|b| Rat::from_integer(b[i].clone())).collect())
            .collect();
        let b: RatVector = target.iter().map(|&x| rat(x)).collect();
        let (part, _null) = solve_rational(&a, &b)
            .unwrap_or_else(|| panic!("kernel vector {:?} not in span of basis", target));
        // the system has full column rank (basis is a basis), so the
        // particular solution is the only one; it must be integral
        for q in &part {
            assert!(q.denom().is_one(), "kernel vector {:?} needs fractional combination", target);
        }
    }

    #[test]
    fn cone_member_orthant() {
        let gens = vec![rv(&[1, 0]), rv(&[0, 1])];
        assert!(cone_member(&rv(&[1, 1]), &gens));
        assert!(cone_member(&rv(&[0, 0]), &gens));
        assert!(!cone_member(&rv(&[-1, 0]), &gens));
    }

    #[test]
    fn cone_member_solves_system() {
        // x = (2,1) in cone{(1,1),(1,-1)} with c = (3/2, 1/2)
        let gens = vec![rv(&[1, 1]), rv(&[1, -1])];
        assert!(cone_member(&rv(&[2, 1]), &gens));
        assert!(!cone_member(&rv(&[-1, 2]), &gens));
        assert!(cone_member(&vec![frac(3, 2), frac(1, 2)], &gens));
    }

    #[test]
    fn cone_member_zero_in_empty_cone() {
        assert!(cone_member(&rv(&[0, 0]), &[]));
        assert!(!cone_member(&rv(&[1, 0]), &[]));
    }

    /// Caratheodory oracle: x is in the cone iff some linearly independent
    /// subset of generators expresses it with nonnegative coefficients.
    fn cone_member_oracle(x: &RatVector, gens: &[RatVector]) -> bool {
        if x.iter().all(|c| c.is_zero()) {
            return true;
        }
        let n = gens.len();
        for mask in 1u32..(1 << n) {
            let subset: Vec<&RatVector> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &gens[i]).collect();
            if subset.len() > x.len() {
                continue;
            }
            let a: Vec<RatVector> = (0..x.len())
                .map(|row| subset.iter().map(|g| g[row].clone()).collect())
                .collect();
            if let Some((part, null)) = solve_rational(&a, x) {
                if null.is_empty() && part.iter().all(|c| !c.is_negative()) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn cone_member_matches_oracle() {
        let mut state: u64 = 0xabcd_0123;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as i64
        };
        for _case in 0..60 {
            let dim = (next().unsigned_abs() as usize % 3) + 1;
            let ngen = (next().unsigned_abs() as usize % 4) + 1;
            let gens: Vec<RatVector> = (0..ngen)
                .map(|_| (0..dim).map(|_| rat((next() % 5) - 2)).collect())
                .collect();
            // all test points with coordinates in {-2..2}
            let mut pt = vec![-2i64; dim];
            loop {
                let x: RatVector = pt.iter().map(|&c| rat(c)).collect();
                assert_eq!(
                    cone_member(&x, &gens),
                    cone_member_oracle(&x, &gens),
                    "disagreement at x={:?} gens={:?}",
                    pt,
                    gens
                );
                let mut k = 0;
                loop {
                    if k == dim {
                        break;
                    }
                    pt[k] += 1;
                    if pt[k] <= 2 {
                        break;
                    }
                    pt[k] = -2;
                    k += 1;
                }
                if k == dim {
                    break;
                }
            }
        }
    }
}
