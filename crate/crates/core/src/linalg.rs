//! Dense symmetric linear algebra: eigendecomposition, Cholesky-based log
//! determinants and Schur-complement determinant ratios.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Diagonal ridge added on every factorization path. Duplicate data points
/// make principal submatrices of a Gram matrix exactly singular.
pub const DEFAULT_RIDGE: f64 = 1e-10;

/// Jacobi sweeps are used up to this dimension; larger inputs go through
/// Householder tridiagonalization and implicit QL.
pub const JACOBI_MAX_DIM: usize = 48;

const MAX_JACOBI_SWEEPS: usize = 100;

/// Dense symmetric matrix stored row-major (both triangles).
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> SymMatrix<T> {
    /// Builds a matrix from rows, rejecting ragged or asymmetric input.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix must have dimension >= 1".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::NotSquare { row, len: r.len(), dim });
            }
            data.extend_from_slice(r);
        }
        let tol = T::symmetry_tolerance();
        for i in 0..dim {
            for j in (i + 1)..dim {
                let gap = (data[i * dim + j] - data[j * dim + i]).abs();
                if !(gap <= tol) {
                    return Err(Error::NotSymmetric { row: i, col: j, gap: gap.as_f64() });
                }
            }
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix by evaluating `f(i, j)` on the upper triangle and
    /// mirroring it.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(dim >= 1, "matrix must have dimension >= 1");
        let mut data = vec![T::zero(); dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        Self { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { T::zero() })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    /// Restriction to the rows and columns listed in `indices`, in that order.
    pub fn principal_submatrix(&self, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            self.check_index(i)?;
        }
        if indices.is_empty() {
            return Err(Error::InvalidArgument("empty principal submatrix".into()));
        }
        Ok(Self::from_fn(indices.len(), |a, b| self.get(indices[a], indices[b])))
    }

    /// `self + shift * I`.
    pub fn shifted(&self, shift: T) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.data[i * self.dim + i] += shift;
        }
        out
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i < self.dim {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.dim })
        }
    }
}

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    values: Vec<T>,
    /// Eigenvector `k` occupies `vectors[k * dim..(k + 1) * dim]`.
    vectors: Vec<T>,
    dim: usize,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.values
    }

    pub fn eigenvector(&self, k: usize) -> &[T] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    /// Replaces negative eigenvalues (round-off on PSD input) with zero.
    pub fn clamp_nonnegative(&mut self) {
        for v in &mut self.values {
            if !(*v >= T::zero()) {
                *v = T::zero();
            }
        }
    }

    /// Number of eigenvalues strictly above `threshold`.
    pub fn rank(&self, threshold: T) -> usize {
        self.values.iter().filter(|&&v| v > threshold).count()
    }

    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> SymMatrix<T> {
        let n = self.dim;
        SymMatrix::from_fn(n, |i, j| {
            let mut acc = T::zero();
            for k in 0..n {
                acc += self.values[k] * self.vectors[k * n + i] * self.vectors[k * n + j];
            }
            acc
        })
    }
}

/// Full symmetric eigendecomposition.
///
/// Eigenvalues come back in descending order (stable, ties keep the
/// solver's index order) and each eigenvector is signed so that its largest
/// magnitude component is positive. Output is deterministic for a fixed
/// input.
pub fn sym_eig<T: Real>(m: &SymMatrix<T>) -> Result<EigenDecomposition<T>> {
    if m.dim() <= JACOBI_MAX_DIM {
        sym_eig_jacobi(m)
    } else {
        sym_eig_tridiagonal(m)
    }
}

/// Cyclic Jacobi rotations until the largest off-diagonal entry falls below
/// `1e-12 * ||m||_F`.
pub fn sym_eig_jacobi<T: Real>(m: &SymMatrix<T>) -> Result<EigenDecomposition<T>> {
    let n = m.dim();
    let mut a = m.data.clone();
    let mut vt = SymMatrix::<T>::identity(n).data;
    let tol = T::lit(1e-12).max(T::epsilon()) * m.frobenius_norm();

    let max_off = |a: &[T]| {
        let mut best = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max(a[i * n + j].abs());
            }
        }
        best
    };

    let mut sweeps = 0;
    while max_off(&a) > tol {
        if sweeps == MAX_JACOBI_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= tol * T::lit(1e-3) {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();
                for k in 0..n {
                    let vp = vt[p * n + k];
                    let vq = vt[q * n + k];
                    vt[p * n + k] = c * vp - s * vq;
                    vt[q * n + k] = s * vp + c * vq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    Ok(finish(values, vt, n))
}

/// Householder reduction to tridiagonal form followed by implicit QL with
/// Wilkinson-style shifts. Eigenvectors are accumulated row-wise.
pub fn sym_eig_tridiagonal<T: Real>(m: &SymMatrix<T>) -> Result<EigenDecomposition<T>> {
    let n = m.dim();
    // `w` holds the transpose of the working matrix so the hot loops walk
    // contiguous memory; `w[c * n + r]` is element (r, c).
    let mut w = m.data.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut w, &mut d, &mut e, n);
    tridiagonal_ql(&mut w, &mut d, &mut e, n)?;
    Ok(finish(d, w, n))
}

macro_rules! at {
    ($w:expr, $n:expr, $r:expr, $c:expr) => {
        $w[($c) * $n + ($r)]
    };
}

fn tridiagonalize<T: Real>(w: &mut [T], d: &mut [T], e: &mut [T], n: usize) {
    for j in 0..n {
        d[j] = at!(w, n, n - 1, j);
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = at!(w, n, i - 1, j);
                at!(w, n, i, j) = T::zero();
                at!(w, n, j, i) = T::zero();
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = T::zero();
            }
            for j in 0..i {
                f = d[j];
                at!(w, n, j, i) = f;
                g = e[j] + at!(w, n, j, j) * f;
                let col = &w[j * n..j * n + i];
                for k in (j + 1)..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let col = &mut w[j * n..j * n + i];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = at!(w, n, i - 1, j);
                at!(w, n, i, j) = T::zero();
            }
        }
        d[i] = h;
    }

    for i in 0..n.saturating_sub(1) {
        at!(w, n, n - 1, i) = at!(w, n, i, i);
        at!(w, n, i, i) = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = at!(w, n, k, i + 1) / h;
            }
            let (head, tail) = w.split_at_mut((i + 1) * n);
            let pivot_col = &tail[..i + 1];
            for j in 0..=i {
                let col = &mut head[j * n..j * n + i + 1];
                let mut g = T::zero();
                for k in 0..=i {
                    g += pivot_col[k] * col[k];
                }
                for k in 0..=i {
                    col[k] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            at!(w, n, k, i + 1) = T::zero();
        }
    }
    for j in 0..n {
        d[j] = at!(w, n, n - 1, j);
        at!(w, n, n - 1, j) = T::zero();
    }
    at!(w, n, n - 1, n - 1) = T::one();
    e[0] = T::zero();
}

fn tridiagonal_ql<T: Real>(w: &mut [T], d: &mut [T], e: &mut [T], n: usize) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();

    let eps = T::epsilon();
    let max_iter = 30 * n.max(1);
    let mut total_iter = 0;
    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                total_iter += 1;
                if total_iter > max_iter {
                    return Err(Error::NoConvergence { sweeps: total_iter });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (e[l] + e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (left, right) = w.split_at_mut((i + 1) * n);
                    let vi = &mut left[i * n..];
                    let vi1 = &mut right[..n];
                    for k in 0..n {
                        let h = vi1[k];
                        vi1[k] = s * vi[k] + c * h;
                        vi[k] = c * vi[k] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if !(e[l].abs() > eps * tst1) {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}

/// Sorts eigenpairs descending and fixes eigenvector signs. `vt` holds
/// eigenvector `k` in row `k`.
fn finish<T: Real>(values: Vec<T>, vt: Vec<T>, n: usize) -> EigenDecomposition<T> {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut sorted_values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        sorted_values.push(values[k]);
        let v = &vt[k * n..(k + 1) * n];
        let mut lead = 0;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > v[lead].abs() {
                lead = i;
            }
        }
        let sign = if v[lead] < T::zero() { -T::one() } else { T::one() };
        vectors.extend(v.iter().map(|&x| x * sign));
    }
    EigenDecomposition { values: sorted_values, vectors, dim: n }
}

/// Lower-triangular Cholesky factor of `m + ridge * I`.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    dim: usize,
    lower: Vec<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn factor(m: &SymMatrix<T>, ridge: T) -> Result<Self> {
        let n = m.dim();
        let mut lower = vec![T::zero(); n * n];
        for j in 0..n {
            let mut diag = m.get(j, j) + ridge;
            for k in 0..j {
                diag -= lower[j * n + k] * lower[j * n + k];
            }
            if !(diag > T::zero()) {
                return Err(Error::Singular { index: j, pivot: diag.as_f64() });
            }
            let ljj = diag.sqrt();
            lower[j * n + j] = ljj;
            for i in (j + 1)..n {
                let mut acc = m.get(i, j);
                for k in 0..j {
                    acc -= lower[i * n + k] * lower[j * n + k];
                }
                lower[i * n + j] = acc / ljj;
            }
        }
        Ok(Self { dim: n, lower })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `2 Σ ln L_ii`.
    pub fn logdet(&self) -> T {
        let two = T::lit(2.0);
        (0..self.dim).map(|i| self.lower[i * self.dim + i].ln()).sum::<T>() * two
    }

    /// Solves `L y = b` by forward substitution.
    pub fn solve_lower(&self, b: &[T]) -> Vec<T> {
        let n = self.dim;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut acc = y[i];
            for k in 0..i {
                acc -= self.lower[i * n + k] * y[k];
            }
            y[i] = acc / self.lower[i * n + i];
        }
        y
    }
}

/// `ln det(m + ridge * I)` through a Cholesky factorization.
pub fn logdet_psd<T: Real>(m: &SymMatrix<T>, ridge: T) -> Result<T> {
    Ok(Cholesky::factor(m, ridge)?.logdet())
}

/// Determinant by Gaussian elimination with partial pivoting. Works on
/// singular input (returns a value at round-off level).
pub fn determinant<T: Real>(m: &SymMatrix<T>) -> T {
    let n = m.dim();
    let mut a = m.data.clone();
    let mut det = T::one();
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col] == T::zero() {
            return T::zero();
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for r in (col + 1)..n {
            let factor = a[r * n + col] / p;
            if factor != T::zero() {
                for c in col..n {
                    let v = a[col * n + c];
                    a[r * n + c] -= factor * v;
                }
            }
        }
    }
    det
}

/// Factorization of a principal submatrix `m[S, S]` reused to evaluate
/// `det(m[S ∪ {x}]) / det(m[S])` for many candidates `x`.
#[derive(Clone, Debug)]
pub struct SchurComplement<'a, T> {
    matrix: &'a SymMatrix<T>,
    subset: Vec<usize>,
    factor: Option<Cholesky<T>>,
}

impl<'a, T: Real> SchurComplement<'a, T> {
    pub fn new(matrix: &'a SymMatrix<T>, subset: &[usize], ridge: T) -> Result<Self> {
        let mut seen = vec![false; matrix.dim()];
        for &i in subset {
            matrix.check_index(i)?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!("index {i} repeated in subset")));
            }
        }
        let factor = if subset.is_empty() {
            None
        } else {
            Some(Cholesky::factor(&matrix.principal_submatrix(subset)?, ridge)?)
        };
        Ok(Self { matrix, subset: subset.to_vec(), factor })
    }

    /// `m(x,x) − k_xᵀ m[S,S]⁻¹ k_x`, clamped to `[0, m(x,x)]`.
    pub fn ratio(&self, x: usize) -> Result<T> {
        self.matrix.check_index(x)?;
        if self.subset.contains(&x) {
            return Err(Error::InvalidArgument(format!("candidate {x} already in subset")));
        }
        let kxx = self.matrix.get(x, x);
        let Some(factor) = &self.factor else {
            return Ok(kxx);
        };
        let kx: Vec<T> = self.subset.iter().map(|&s| self.matrix.get(s, x)).collect();
        let y = factor.solve_lower(&kx);
        let schur = kxx - y.iter().map(|&v| v * v).sum::<T>();
        Ok(schur.max(T::zero()).min(kxx.max(T::zero())))
    }
}

/// `det(m[S ∪ {x}]) / det(m[S])` as a Schur complement, with the default
/// ridge on `m[S]`. For an empty `s` this is `m(x,x)`.
pub fn det_ratio<T: Real>(m: &SymMatrix<T>, s: &[usize], x: usize) -> Result<T> {
    SchurComplement::new(m, s, T::lit(DEFAULT_RIDGE))?.ratio(x)
}
