//! Dense linear algebra over the prime field F_p.
//!
//! Vectors are plain `Vec<u32>` with entries in `[0, p)`. Matrices act on row
//! vectors from the right (`v * A`), which is the convention used by every
//! module action in this crate.

use std::fmt;

/// Multiplicative inverse of `a` modulo the prime `p`. Panics on `a == 0`.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    assert!(a % p != 0, "zero has no inverse mod {p}");
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(a: u32, mut e: u32, p: u32) -> u32 {
    let (mut base, mut acc) = (a as u64 % p as u64, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `n choose k` reduced modulo `p`.
pub fn binomial_mod(n: u64, k: u64, p: u32) -> u32 {
    if k > n {
        return 0;
    }
    // Lucas' theorem keeps this exact for large n.
    let p64 = p as u64;
    let (mut n, mut k, mut acc) = (n, k, 1u64);
    while n > 0 || k > 0 {
        let (ni, ki) = (n % p64, k % p64);
        if ki > ni {
            return 0;
        }
        let mut c = 1u64;
        for j in 0..ki {
            c = c * ((ni - j) % p64) % p64;
            c = c * inv_mod(((j + 1) % p64) as u32, p) as u64 % p64;
        }
        acc = acc * c % p64;
        n /= p64;
        k /= p64;
    }
    acc as u32
}

pub fn vec_add(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| (x + y) % p).collect()
}

pub fn vec_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| (x + p - y) % p).collect()
}

pub fn vec_scale(a: &[u32], s: u32, p: u32) -> Vec<u32> {
    a.iter().map(|x| (*x as u64 * s as u64 % p as u64) as u32).collect()
}

pub fn vec_neg(a: &[u32], p: u32) -> Vec<u32> {
    a.iter().map(|x| (p - x) % p).collect()
}

pub fn is_zero(a: &[u32]) -> bool {
    a.iter().all(|x| *x == 0)
}

/// Row-major dense matrix over F_p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix over F_{} ({}x{})", self.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        Matrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed to make 0-row matrices well-formed.
    pub fn from_rows(p: u32, cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix row");
            data.extend(r.iter().map(|x| x % p));
        }
        Matrix { p, rows: rows.len(), cols, data }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == (r == c) as u32))
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.data)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let p = self.p as u64;
        let mut out = Matrix::zeros(self.p, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                for (c, slot) in acc.iter_mut().enumerate() {
                    *slot += a * other.get(k, c) as u64;
                }
                if k % 1024 == 1023 {
                    acc.iter_mut().for_each(|x| *x %= p);
                }
            }
            for (c, v) in acc.iter().enumerate() {
                out.data[r * other.cols + c] = (v % p) as u32;
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix { data: vec_add(&self.data, &other.data, self.p), ..self.clone() }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix { data: vec_sub(&self.data, &other.data, self.p), ..self.clone() }
    }

    pub fn scale(&self, s: u32) -> Matrix {
        Matrix { data: vec_scale(&self.data, s, self.p), ..self.clone() }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.p, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Row vector times matrix.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.rows, "vector length does not match matrix rows");
        let p = self.p as u64;
        let mut acc = vec![0u64; self.cols];
        for (k, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (c, slot) in acc.iter_mut().enumerate() {
                *slot = (*slot + a as u64 * self.get(k, c) as u64) % p;
            }
        }
        acc.into_iter().map(|x| x as u32).collect()
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut out = Matrix::zeros(self.p, self.rows, cols);
        for r in 0..self.rows {
            out.data[r * cols..r * cols + self.cols].copy_from_slice(self.row(r));
            out.data[r * cols + self.cols..(r + 1) * cols].copy_from_slice(other.row(r));
        }
        out
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { p: self.p, rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..self.cols {
            if lead >= self.rows {
                break;
            }
            let Some(piv) = (lead..self.rows).find(|&r| self.get(r, c) != 0) else {
                continue;
            };
            if piv != lead {
                for k in 0..self.cols {
                    self.data.swap(piv * self.cols + k, lead * self.cols + k);
                }
            }
            let inv = inv_mod(self.get(lead, c), p);
            for k in 0..self.cols {
                let v = self.get(lead, k);
                self.data[lead * self.cols + k] = (v as u64 * inv as u64 % p as u64) as u32;
            }
            for r in 0..self.rows {
                let f = self.get(r, c);
                if r == lead || f == 0 {
                    continue;
                }
                for k in c..self.cols {
                    let sub = (f as u64 * self.get(lead, k) as u64 % p as u64) as u32;
                    let v = self.get(r, k);
                    self.data[r * self.cols + k] = (v + p - sub) % p;
                }
            }
            pivots.push(c);
            lead += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    /// Basis of `{x : A x = 0}` (column vectors, returned as plain vectors).
    pub fn right_nullspace(&self) -> Vec<Vec<u32>> {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let p = self.p;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u32; self.cols];
                v[f] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = (p - m.get(r, f)) % p;
                }
                v
            })
            .collect()
    }

    /// Basis of `{v : v A = 0}`.
    pub fn left_nullspace(&self) -> Vec<Vec<u32>> {
        self.transpose().right_nullspace()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = self.hstack(&Matrix::identity(self.p, n));
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(self.p, n, n);
        for r in 0..n {
            inv.data[r * n..(r + 1) * n].copy_from_slice(&aug.row(r)[n..]);
        }
        Some(inv)
    }
}

/// A subspace of F_p^n held as a reduced echelon basis. Two equal subspaces
/// always have identical bases, so derived `Eq` is subspace equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    p: u32,
    ambient: usize,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(p: u32, ambient: usize) -> Self {
        Subspace { p, ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(p: u32, ambient: usize) -> Self {
        Self::span(p, ambient, Matrix::identity(p, ambient).to_rows())
    }

    pub fn span<I: IntoIterator<Item = Vec<u32>>>(p: u32, ambient: usize, vectors: I) -> Self {
        let rows: Vec<Vec<u32>> = vectors.into_iter().collect();
        let mut m = Matrix::from_rows(p, ambient, &rows);
        let pivots = m.rref_in_place();
        let basis = (0..pivots.len()).map(|r| m.row(r).to_vec()).collect();
        Subspace { p, ambient, basis, pivots }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_rows(self.p, self.ambient, &self.basis)
    }

    /// Subtracts the span's components at pivot positions; zero iff `v` is in the span.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let mut r = v.to_vec();
        for (b, &pc) in self.basis.iter().zip(&self.pivots) {
            let f = r[pc];
            if f != 0 {
                r = vec_sub(&r, &vec_scale(b, f, self.p), self.p);
            }
        }
        r
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        is_zero(&self.reduce(v))
    }

    /// Coordinates of `v` with respect to the echelon basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&pc| v[pc]).collect())
    }

    pub fn from_coordinates(&self, coords: &[u32]) -> Vec<u32> {
        let mut v = vec![0u32; self.ambient];
        for (b, &c) in self.basis.iter().zip(coords) {
            if c != 0 {
                v = vec_add(&v, &vec_scale(b, c, self.p), self.p);
            }
        }
        v
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Subspace::span(self.p, self.ambient, self.basis.iter().chain(&other.basis).cloned())
    }

    /// Columns spanning `{c : b . c = 0 for every basis vector b}`.
    pub fn annihilator(&self) -> Matrix {
        let cols = if self.basis.is_empty() {
            Matrix::identity(self.p, self.ambient).to_rows()
        } else {
            self.basis_matrix().right_nullspace()
        };
        Matrix::from_rows(self.p, self.ambient, &cols).transpose()
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.p, self.ambient);
        }
        let ann = other.annihilator();
        if ann.cols() == 0 {
            return self.clone();
        }
        let b = self.basis_matrix();
        let coeffs = b.mul(&ann).left_nullspace();
        Subspace::span(self.p, self.ambient, coeffs.iter().map(|a| b.apply(a)))
    }

    /// Vectors of `self` that extend a basis of `sub` to a basis of `self`,
    /// chosen greedily from the echelon basis of `self`.
    pub fn complement_in(&self, sub: &Subspace) -> Vec<Vec<u32>> {
        let mut acc = sub.clone();
        let mut out = Vec::new();
        for b in &self.basis {
            if !acc.contains(b) {
                out.push(b.clone());
                acc = acc.sum(&Subspace::span(self.p, self.ambient, [b.clone()]));
            }
        }
        out
    }

    /// Every vector of the subspace, in coordinate-lexicographic order.
    pub fn elements(&self) -> Vec<Vec<u32>> {
        let k = self.dim();
        let total = (self.p as usize).pow(k as u32);
        (0..total)
            .map(|mut idx| {
                let mut coords = vec![0u32; k];
                for c in coords.iter_mut().rev() {
                    *c = (idx % self.p as usize) as u32;
                    idx /= self.p as usize;
                }
                self.from_coordinates(&coords)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_mod_small_primes() {
        for p in [3, 5, 7, 11] {
            for a in 1..p {
                assert_eq!(a * inv_mod(a, p) % p, 1);
            }
        }
    }

    #[test]
    fn binomials_match_pascal() {
        let p = 5;
        let mut row = vec![1u64];
        for n in 0..30u64 {
            for (k, &c) in row.iter().enumerate() {
                assert_eq!(binomial_mod(n, k as u64, p), (c % p as u64) as u32, "C({n},{k})");
            }
            let mut next = vec![1u64; row.len() + 1];
            for k in 1..row.len() {
                next[k] = (row[k - 1] + row[k]) % 1_000_000_007;
            }
            row = next;
        }
    }

    #[test]
    fn nullspace_of_stacked_system() {
        // x + y + z = 0 over F_3
        let a = Matrix::from_rows(3, 3, &[vec![1, 1, 1]]);
        let ns = a.right_nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert_eq!(v.iter().sum::<u32>() % 3, 0);
        }
        let left = Matrix::from_rows(3, 2, &[vec![1, 2], vec![2, 1], vec![0, 0]]).left_nullspace();
        assert_eq!(left.len(), 2);
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_rows(5, 3, &[vec![1, 2, 0], vec![0, 1, 4], vec![3, 0, 2]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        let singular = Matrix::from_rows(5, 2, &[vec![1, 2], vec![2, 4]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn subspace_intersection_and_sum() {
        let p = 3;
        let u = Subspace::span(p, 3, [vec![1, 0, 0], vec![0, 1, 0]]);
        let v = Subspace::span(p, 3, [vec![0, 1, 0], vec![0, 0, 1]]);
        let w = u.intersect(&v);
        assert_eq!(w.dim(), 1);
        assert!(w.contains(&[0, 2, 0]));
        assert_eq!(u.sum(&v).dim(), 3);
        assert_eq!(u.complement_in(&w).len(), 1);
        assert_eq!(u.elements().len(), 9);
    }
}
