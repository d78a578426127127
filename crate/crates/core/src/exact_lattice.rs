//! Quadratic forms on free Z-modules: discriminants, kernels, short vectors,
//! sublattice enumeration and domination.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{ceil, floor, qi, to_i64, Q};

/// Symmetric positive-semidefinite rational Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QForm {
    gram: Vec<Vec<Q>>,
    kernel_rank: usize,
}

/// Returns `Some(kernel rank)` when `m` is positive semidefinite, `None` otherwise.
///
/// Symmetric elimination pivoting on positive diagonal entries; once only zero
/// diagonals remain, the residual block must vanish.
pub fn psd_kernel_rank(m: &[Vec<Q>]) -> Option<usize> {
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut active: Vec<usize> = (0..m.len()).collect();
    loop {
        if active.is_empty() {
            return Some(0);
        }
        if active.iter().any(|&i| a[i][i].is_negative()) {
            return None;
        }
        let pivot = active.iter().position(|&i| a[i][i].is_positive());
        let Some(p) = pivot else {
            for &i in &active {
                for &j in &active {
                    if !a[i][j].is_zero() {
                        return None;
                    }
                }
            }
            return Some(active.len());
        };
        let i = active.remove(p);
        let piv = a[i][i].clone();
        for &j in &active {
            if a[j][i].is_zero() {
                continue;
            }
            let f = &a[j][i] / &piv;
            for &k in &active {
                let t = &f * &a[i][k];
                a[j][k] -= t;
            }
        }
    }
}

/// Exact determinant by fraction-exact Gaussian elimination.
pub fn determinant(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut det = Q::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Q::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let piv = a[col][col].clone();
        det *= &piv;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &piv;
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    det
}

/// Rank over Q of a list of integer rows.
pub fn rank_of_rows(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let width = rows[0].len();
    let mut a: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| qi(x)).collect())
        .collect();
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(p, rank);
        let piv = a[rank][col].clone();
        for r in 0..a.len() {
            if r == rank || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &piv;
            for c in col..width {
                let t = &f * &a[rank][c];
                a[r][c] -= t;
            }
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

impl QForm {
    pub fn new(gram: Vec<Vec<Q>>) -> Result<Self> {
        let n = gram.len();
        if gram.iter().any(|row| row.len() != n) {
            return Err(Error::Dimension("Gram matrix is not square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::validation(
                        format!("[{i}][{j}]"),
                        "Gram matrix is not symmetric",
                    ));
                }
            }
        }
        let kernel_rank = psd_kernel_rank(&gram)
            .ok_or_else(|| Error::validation("", "Gram matrix is not positive semidefinite"))?;
        Ok(QForm { gram, kernel_rank })
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        QForm::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| qi(x)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let mut gram = vec![vec![Q::zero(); n]; n];
        for (i, row) in gram.iter_mut().enumerate() {
            row[i] = Q::one();
        }
        QForm {
            gram,
            kernel_rank: 0,
        }
    }

    pub fn zero(n: usize) -> Self {
        QForm {
            gram: vec![vec![Q::zero(); n]; n],
            kernel_rank: n,
        }
    }

    pub fn diag(entries: &[Q]) -> Result<Self> {
        let n = entries.len();
        let mut gram = vec![vec![Q::zero(); n]; n];
        for (i, e) in entries.iter().enumerate() {
            gram[i][i] = e.clone();
        }
        QForm::new(gram)
    }

    pub fn diag_int(entries: &[i64]) -> Result<Self> {
        QForm::diag(&entries.iter().map(|&x| qi(x)).collect::<Vec<_>>())
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<Q>] {
        &self.gram
    }

    pub fn entry(&self, i: usize, j: usize) -> &Q {
        &self.gram[i][j]
    }

    pub fn kernel_rank(&self) -> usize {
        self.kernel_rank
    }

    pub fn is_positive_definite(&self) -> bool {
        self.kernel_rank == 0
    }

    pub fn is_zero(&self) -> bool {
        self.kernel_rank == self.rank()
    }

    pub fn determinant(&self) -> Q {
        determinant(&self.gram)
    }

    pub fn bilinear(&self, u: &[i64], v: &[i64]) -> Q {
        let mut acc = Q::zero();
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for (j, &vj) in v.iter().enumerate() {
                if vj == 0 {
                    continue;
                }
                acc += &self.gram[i][j] * qi(ui * vj);
            }
        }
        acc
    }

    pub fn eval(&self, v: &[i64]) -> Q {
        self.bilinear(v, v)
    }

    /// Gram matrix of the form on the rows of `basis`.
    pub fn gram_on(&self, basis: &[Vec<i64>]) -> Vec<Vec<Q>> {
        basis
            .iter()
            .map(|u| basis.iter().map(|v| self.bilinear(u, v)).collect())
            .collect()
    }

    pub fn direct_sum(forms: &[QForm]) -> QForm {
        let n: usize = forms.iter().map(|f| f.rank()).sum();
        let mut gram = vec![vec![Q::zero(); n]; n];
        let mut off = 0;
        for f in forms {
            for i in 0..f.rank() {
                for j in 0..f.rank() {
                    gram[off + i][off + j] = f.gram[i][j].clone();
                }
            }
            off += f.rank();
        }
        QForm {
            gram,
            kernel_rank: forms.iter().map(|f| f.kernel_rank).sum(),
        }
    }

    /// Principal block on coordinates `start..start+len`.
    pub fn block(&self, start: usize, len: usize) -> QForm {
        let gram: Vec<Vec<Q>> = (start..start + len)
            .map(|i| self.gram[i][start..start + len].to_vec())
            .collect();
        QForm::new(gram).expect("principal block of a PSD form is PSD")
    }

    pub fn add(&self, other: &QForm) -> Result<QForm> {
        if self.rank() != other.rank() {
            return Err(Error::Dimension(format!(
                "cannot add forms of rank {} and {}",
                self.rank(),
                other.rank()
            )));
        }
        let gram = self
            .gram
            .iter()
            .zip(&other.gram)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        QForm::new(gram)
    }

    /// `M^T G M` where the columns of `m` are images of the standard basis.
    pub fn pullback_by(&self, m: &[Vec<i64>]) -> Result<QForm> {
        let n = self.rank();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("pullback matrix has wrong shape".into()));
        }
        let cols: Vec<Vec<i64>> = (0..n).map(|j| (0..n).map(|i| m[i][j]).collect()).collect();
        QForm::new(self.gram_on(&cols))
    }

    /// Upper LDL data of a positive-definite form:
    /// `q(x) = sum_i d_i (x_i + sum_{j>i} u_ij x_j)^2`.
    fn ldl_upper(&self) -> (Vec<Q>, Vec<Vec<Q>>) {
        let n = self.rank();
        let mut a = self.gram.clone();
        let mut d = Vec::with_capacity(n);
        let mut u = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            let piv = a[i][i].clone();
            for j in i + 1..n {
                u[i][j] = &a[i][j] / &piv;
            }
            for j in i + 1..n {
                for k in i + 1..n {
                    let t = &u[i][j] * &a[i][k];
                    a[j][k] -= t;
                }
            }
            d.push(piv);
        }
        (d, u)
    }

    /// A positive rational lower bound for the minimum of the form on nonzero
    /// integer vectors (the smallest LDL pivot).
    pub fn minimum_lower_bound(&self) -> Result<Q> {
        if !self.is_positive_definite() {
            return Err(Error::Precondition("form is not positive-definite".into()));
        }
        let (d, _) = self.ldl_upper();
        Ok(d.into_iter().min().unwrap_or_else(Q::one))
    }

    /// All integer vectors `x` (including 0) with `q(x) < bound`, or `<=` when
    /// `inclusive`. Sorted lexicographically.
    pub fn vectors_below(&self, bound: &Q, inclusive: bool) -> Result<Vec<Vec<i64>>> {
        if !self.is_positive_definite() {
            return Err(Error::Precondition(
                "short-vector search needs a positive-definite form".into(),
            ));
        }
        let n = self.rank();
        let mut out = Vec::new();
        if bound.is_negative() || (!inclusive && bound.is_zero()) {
            return Ok(out);
        }
        let (d, u) = self.ldl_upper();
        let mut x = vec![0i64; n];
        #[allow(clippy::too_many_arguments)]
        fn rec(
            i: usize,
            x: &mut Vec<i64>,
            remaining: Q,
            d: &[Q],
            u: &[Vec<Q>],
            bound: &Q,
            inclusive: bool,
            form: &QForm,
            out: &mut Vec<Vec<i64>>,
        ) {
            let n = x.len();
            let mut center = Q::zero();
            for j in i + 1..n {
                center -= &u[i][j] * qi(x[j]);
            }
            let t = &remaining / &d[i];
            let s = floor(&t).sqrt() + BigInt::one();
            let lo = floor(&(&center - Q::from_integer(s.clone())));
            let hi = ceil(&(&center + Q::from_integer(s)));
            let lo = to_i64(&lo).expect("short-vector range overflow");
            let hi = to_i64(&hi).expect("short-vector range overflow");
            for xi in lo..=hi {
                let diff = qi(xi) - &center;
                let term = &d[i] * &diff * &diff;
                if term > remaining {
                    continue;
                }
                x[i] = xi;
                let rest = &remaining - &term;
                if i == 0 {
                    let val = form.eval(x);
                    if val < *bound || (inclusive && val == *bound) {
                        out.push(x.clone());
                    }
                } else {
                    rec(i - 1, x, rest, d, u, bound, inclusive, form, out);
                }
            }
            x[i] = 0;
        }
        if n == 0 {
            if Q::zero() < *bound || inclusive {
                out.push(vec![]);
            }
            return Ok(out);
        }
        rec(
            n - 1,
            &mut x,
            bound.clone(),
            &d,
            &u,
            bound,
            inclusive,
            self,
            &mut out,
        );
        out.sort();
        Ok(out)
    }

    /// Minimum of the form over nonzero integer vectors (positive-definite only).
    pub fn minimum(&self) -> Result<Q> {
        let cap = (0..self.rank())
            .map(|i| self.gram[i][i].clone())
            .min()
            .ok_or_else(|| Error::Precondition("rank-0 form has no minimum".into()))?;
        let vs = self.vectors_below(&cap, true)?;
        Ok(vs
            .iter()
            .filter(|v| v.iter().any(|&x| x != 0))
            .map(|v| self.eval(v))
            .min()
            .expect("basis vectors are within the cap"))
    }
}

/// Finitely generated free submodule of Z^n given by Q-independent rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sublattice {
    ambient_rank: usize,
    basis: Vec<Vec<i64>>,
}

impl Sublattice {
    pub fn new(ambient_rank: usize, basis: Vec<Vec<i64>>) -> Result<Self> {
        for (i, row) in basis.iter().enumerate() {
            if row.len() != ambient_rank {
                return Err(Error::validation(
                    format!("[{i}]"),
                    format!(
                        "basis vector has length {}, expected {ambient_rank}",
                        row.len()
                    ),
                ));
            }
        }
        if basis.len() > ambient_rank || rank_of_rows(&basis) != basis.len() {
            return Err(Error::validation(
                "",
                "basis vectors are linearly dependent",
            ));
        }
        Ok(Sublattice {
            ambient_rank,
            basis,
        })
    }

    pub fn full(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        Sublattice {
            ambient_rank: n,
            basis,
        }
    }

    pub fn zero(n: usize) -> Self {
        Sublattice {
            ambient_rank: n,
            basis: vec![],
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    /// Row-style Hermite normal form: echelon rows, positive pivots, entries
    /// above each pivot reduced into `[0, pivot)`.
    pub fn hermite_normal_form(&self) -> Sublattice {
        let mut a: Vec<Vec<i128>> = self
            .basis
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let k = a.len();
        let n = self.ambient_rank;
        let mut row = 0;
        for col in 0..n {
            if row == k {
                break;
            }
            loop {
                let nonzero: Vec<usize> = (row..k).filter(|&r| a[r][col] != 0).collect();
                if nonzero.is_empty() {
                    break;
                }
                let p = *nonzero
                    .iter()
                    .min_by_key(|&&r| a[r][col].abs())
                    .expect("nonempty");
                a.swap(p, row);
                let mut done = true;
                for r in row + 1..k {
                    if a[r][col] != 0 {
                        let f = a[r][col].div_euclid(a[row][col]);
                        for c in 0..n {
                            a[r][c] -= f * a[row][c];
                        }
                        if a[r][col] != 0 {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            if a[row][col] == 0 {
                continue;
            }
            if a[row][col] < 0 {
                for c in 0..n {
                    a[row][c] = -a[row][c];
                }
            }
            for r in 0..row {
                let f = a[r][col].div_euclid(a[row][col]);
                if f != 0 {
                    for c in 0..n {
                        a[r][c] -= f * a[row][c];
                    }
                }
            }
            row += 1;
        }
        let basis = a
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| i64::try_from(x).expect("HNF entry overflow"))
                    .collect()
            })
            .collect();
        Sublattice {
            ambient_rank: n,
            basis,
        }
    }
}

/// `det(B G B^T)` for the basis matrix `B` of `w`.
pub fn discriminant(w: &Sublattice, q: &QForm) -> Result<Q> {
    if w.ambient_rank() != q.rank() {
        return Err(Error::Dimension(format!(
            "sublattice lives in rank {}, form has rank {}",
            w.ambient_rank(),
            q.rank()
        )));
    }
    Ok(determinant(&q.gram_on(w.basis())))
}

/// True iff `q1 - q2` is positive semidefinite.
pub fn dominates(q1: &QForm, q2: &QForm) -> Result<bool> {
    if q1.rank() != q2.rank() {
        return Err(Error::Dimension(format!(
            "cannot compare forms of rank {} and {}",
            q1.rank(),
            q2.rank()
        )));
    }
    let diff: Vec<Vec<Q>> = q1
        .gram()
        .iter()
        .zip(q2.gram())
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
        .collect();
    Ok(psd_kernel_rank(&diff).is_some())
}

fn sign_normalized(v: &[i64]) -> Vec<i64> {
    match v.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => v.iter().map(|&y| -y).collect(),
        _ => v.to_vec(),
    }
}

/// Rank-`k` submodules `W` of Z^n with `discriminant(W, q) < c`, in Hermite
/// normal form, ordered by discriminant and then by basis.
///
/// Search radius: every lattice has an LLL-reduced basis, whose vectors
/// satisfy `q(b_i) <= 2^(k(k-1)/2) * disc / m^(k-1)` with `m` a lower bound
/// for the minimum of `q`; only vectors below that radius are combined.
pub fn enumerate_small_sublattices(q: &QForm, k: usize, c: &Q) -> Result<Vec<Sublattice>> {
    if !q.is_positive_definite() {
        return Err(Error::Precondition(
            "sublattice enumeration needs a positive-definite form".into(),
        ));
    }
    let n = q.rank();
    if k > n {
        return Err(Error::Precondition(format!("k = {k} exceeds rank {n}")));
    }
    if !c.is_positive() {
        return Err(Error::Precondition("bound C must be positive".into()));
    }
    if k == 0 {
        return Ok(if Q::one() < *c {
            vec![Sublattice::zero(n)]
        } else {
            vec![]
        });
    }
    let m = q.minimum_lower_bound()?;
    let factor = Q::from_integer(Pow::pow(BigInt::from(2), (k * (k - 1) / 2) as u64));
    let radius = factor * c / Pow::pow(m, (k - 1) as u64);
    let vectors: Vec<Vec<i64>> = q
        .vectors_below(&radius, false)?
        .into_iter()
        .filter(|v| v.iter().any(|&x| x != 0))
        .map(|v| sign_normalized(&v))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut found: BTreeSet<(Q, Sublattice)> = BTreeSet::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if vectors.len() < k {
        return Ok(vec![]);
    }
    loop {
        let basis: Vec<Vec<i64>> = idx.iter().map(|&i| vectors[i].clone()).collect();
        let disc = determinant(&q.gram_on(&basis));
        if disc.is_positive() && disc < *c {
            let w = Sublattice {
                ambient_rank: n,
                basis,
            }
            .hermite_normal_form();
            found.insert((disc, w));
        }
        // advance the combination
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(found.into_iter().map(|(_, w)| w).collect());
            }
            pos -= 1;
            if idx[pos] < vectors.len() - (k - pos) {
                idx[pos] += 1;
                for j in pos + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    fn span(rows: &[&[i64]]) -> Sublattice {
        Sublattice::new(rows[0].len(), rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn discriminant_examples() {
        let id = QForm::identity(2);
        assert_eq!(discriminant(&Sublattice::full(2), &id).unwrap(), qi(1));
        assert_eq!(discriminant(&span(&[&[1, 1]]), &id).unwrap(), qi(2));
        let d01 = QForm::diag_int(&[0, 1]).unwrap();
        assert_eq!(discriminant(&span(&[&[1, 0]]), &d01).unwrap(), qi(0));
        assert!(matches!(
            discriminant(&Sublattice::full(3), &id),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn psd_detection() {
        assert_eq!(psd_kernel_rank(QForm::identity(3).gram()), Some(0));
        let m = vec![vec![qi(0), qi(1)], vec![qi(1), qi(0)]];
        assert_eq!(psd_kernel_rank(&m), None);
        let m = vec![vec![qi(1), qi(1)], vec![qi(1), qi(1)]];
        assert_eq!(psd_kernel_rank(&m), Some(1));
        let m = vec![vec![qi(0), qi(0)], vec![qi(0), qi(-1)]];
        assert_eq!(psd_kernel_rank(&m), None);
        let m = vec![vec![qi(1), qi(2)], vec![qi(2), qi(1)]];
        assert_eq!(psd_kernel_rank(&m), None);
        assert!(QForm::new(vec![vec![qi(1), qi(2)], vec![qi(3), qi(1)]]).is_err());
    }

    #[test]
    fn small_sublattices_rank_one() {
        let id = QForm::identity(2);
        let got = enumerate_small_sublattices(&id, 1, &qi(2)).unwrap();
        assert_eq!(got, vec![span(&[&[0, 1]]), span(&[&[1, 0]])]);
        assert!(enumerate_small_sublattices(&id, 1, &qi(1))
            .unwrap()
            .is_empty());
        let got = enumerate_small_sublattices(&id, 1, &qi(3)).unwrap();
        assert_eq!(got.len(), 4);
        assert!(got.contains(&span(&[&[1, 1]])));
        assert!(got.contains(&span(&[&[1, -1]])));
    }

    #[test]
    fn small_sublattices_full_rank() {
        let id = QForm::identity(2);
        // Z^2 itself plus the three index-2 sublattices (discriminant 4)
        let got = enumerate_small_sublattices(&id, 2, &qi(5)).unwrap();
        assert_eq!(got.len(), 4);
        assert_eq!(got[0], Sublattice::full(2));
    }

    #[test]
    fn degenerate_form_rejected() {
        let q = QForm::diag_int(&[1, 0]).unwrap();
        assert!(matches!(
            enumerate_small_sublattices(&q, 1, &qi(2)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn domination_examples() {
        let id = QForm::identity(2);
        let two = QForm::diag_int(&[2, 2]).unwrap();
        assert!(dominates(&two, &id).unwrap());
        assert!(!dominates(&id, &QForm::diag_int(&[2, 0]).unwrap()).unwrap());
        assert!(dominates(&id, &id).unwrap());
    }

    #[test]
    fn hnf_canonical() {
        let w = span(&[&[2, 4], &[1, 3]]).hermite_normal_form();
        assert_eq!(w.basis(), &[vec![1, 1], vec![0, 2]]);
        let w = span(&[&[-1, 1]]).hermite_normal_form();
        assert_eq!(w.basis(), &[vec![1, -1]]);
    }

    #[test]
    fn short_vectors_rational_form() {
        let q = QForm::new(vec![vec![qr(3, 2), qr(1, 2)], vec![qr(1, 2), qi(1)]]).unwrap();
        let vs = q.vectors_below(&qi(2), false).unwrap();
        for v in &vs {
            assert!(q.eval(v) < qi(2));
        }
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                if q.eval(&[a, b]) < qi(2) {
                    assert!(vs.contains(&vec![a, b]));
                }
            }
        }
        assert_eq!(q.minimum().unwrap(), qi(1));
    }
}
