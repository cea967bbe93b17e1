//! Dense linear algebra on `rug::Float`.

use std::ops::{Index, IndexMut};

use rug::{Assign, Float};

use crate::error::{Error, Result};

/// Row-major square or rectangular matrix of `Float`s sharing one precision.
#[derive(Debug, Clone, PartialEq)]
pub struct FMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Float>,
}

impl FMatrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        Self { rows, cols, data: vec![Float::new(prec); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Float) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prec(&self) -> u32 {
        self.data.first().map_or(53, Float::prec)
    }

    /// Leading `k x k` block.
    pub fn leading(&self, k: usize) -> Self {
        Self::from_fn(k, k, |i, j| self[(i, j)].clone())
    }

    pub fn mul_vec(&self, v: &[Float]) -> Vec<Float> {
        assert_eq!(v.len(), self.cols);
        let prec = self.prec();
        let mut tmp = Float::new(prec);
        (0..self.rows)
            .map(|i| {
                let mut acc = Float::new(prec);
                for (j, vj) in v.iter().enumerate() {
                    tmp.assign(&self[(i, j)] * vj);
                    acc += &tmp;
                }
                acc
            })
            .collect()
    }

    /// `u^T A v`.
    pub fn bilinear(&self, u: &[Float], v: &[Float]) -> Float {
        dot(u, &self.mul_vec(v))
    }
}

impl Index<(usize, usize)> for FMatrix {
    type Output = Float;
    fn index(&self, (i, j): (usize, usize)) -> &Float {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for FMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Float {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(u: &[Float], v: &[Float]) -> Float {
    assert_eq!(u.len(), v.len());
    let prec = u.first().map_or(53, Float::prec);
    let mut acc = Float::new(prec);
    let mut tmp = Float::new(prec);
    for (a, b) in u.iter().zip(v) {
        tmp.assign(a * b);
        acc += &tmp;
    }
    acc
}

/// Cholesky factor `L` of a symmetric positive-definite matrix, `A = L L^T`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: FMatrix,
}

impl Cholesky {
    /// Factorises the lower triangle of `a`. A non-positive pivot means the
    /// matrix is not numerically positive definite at this precision.
    pub fn new(a: &FMatrix) -> Result<Self> {
        assert_eq!(a.rows, a.cols);
        let n = a.rows;
        let prec = a.prec();
        let mut l = FMatrix::zeros(n, n, prec);
        let mut tmp = Float::new(prec);
        for j in 0..n {
            let mut d = a[(j, j)].clone();
            for k in 0..j {
                tmp.assign(l[(j, k)].square_ref());
                d -= &tmp;
            }
            if !d.is_sign_positive() || d.is_zero() {
                return Err(Error::Precision { bits: prec, pivot: j });
            }
            let djj = d.sqrt();
            for i in (j + 1)..n {
                let mut s = a[(i, j)].clone();
                for k in 0..j {
                    tmp.assign(&l[(i, k)] * &l[(j, k)]);
                    s -= &tmp;
                }
                s /= &djj;
                l[(i, j)] = s;
            }
            l[(j, j)] = djj;
        }
        Ok(Self { l })
    }

    /// Wraps an existing lower-triangular factor.
    pub fn from_factor(l: FMatrix) -> Self {
        Self { l }
    }

    pub fn factor(&self) -> &FMatrix {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows
    }

    /// `log det A = 2 sum log L_ii`.
    pub fn log_det(&self) -> Float {
        let prec = self.l.prec();
        let mut acc = Float::new(prec);
        for i in 0..self.l.rows {
            acc += Float::with_val(prec, self.l[(i, i)].ln_ref());
        }
        acc * 2u32
    }

    /// Solves `L y = b`.
    pub fn forward(&self, b: &[Float]) -> Vec<Float> {
        let n = self.dim();
        let prec = self.l.prec();
        let mut y: Vec<Float> = Vec::with_capacity(n);
        let mut tmp = Float::new(prec);
        for i in 0..n {
            let mut s = Float::with_val(prec, &b[i]);
            for (k, yk) in y.iter().enumerate() {
                tmp.assign(&self.l[(i, k)] * yk);
                s -= &tmp;
            }
            s /= &self.l[(i, i)];
            y.push(s);
        }
        y
    }

    /// Solves `L^T x = y`.
    pub fn backward(&self, y: &[Float]) -> Vec<Float> {
        let n = self.dim();
        let prec = self.l.prec();
        let mut x = vec![Float::new(prec); n];
        let mut tmp = Float::new(prec);
        for i in (0..n).rev() {
            let mut s = Float::with_val(prec, &y[i]);
            for k in (i + 1)..n {
                tmp.assign(&self.l[(k, i)] * &x[k]);
                s -= &tmp;
            }
            s /= &self.l[(i, i)];
            x[i] = s;
        }
        x
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Float]) -> Vec<Float> {
        self.backward(&self.forward(b))
    }
}

fn hypot(a: &Float, b: &Float) -> Float {
    Float::with_val(a.prec(), a.hypot_ref(b))
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e[i]` couples rows `i` and `i+1`), by implicit QL with
/// Wilkinson shifts. When `first_components` is set, also returns the first
/// component of each normalised eigenvector. Output is sorted ascending.
pub fn tridiagonal_eigen(
    mut d: Vec<Float>,
    e: &[Float],
    first_components: bool,
) -> Result<(Vec<Float>, Option<Vec<Float>>)> {
    let n = d.len();
    assert!(e.len() + 1 >= n);
    if n == 0 {
        return Ok((d, first_components.then(Vec::new)));
    }
    let prec = d[0].prec();
    let eps = Float::with_val(prec, 1) >> (prec - 2);
    let mut e: Vec<Float> = e.iter().take(n.saturating_sub(1)).map(|x| Float::with_val(prec, x)).collect();
    e.push(Float::new(prec));
    let mut z: Vec<Float> = (0..n).map(|i| Float::with_val(prec, (i == 0) as u32)).collect();
    let max_iter = 60 * n.max(4);
    let mut tmp = Float::new(prec);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let mut dd = Float::with_val(prec, d[m].abs_ref());
                dd += Float::with_val(prec, d[m + 1].abs_ref());
                tmp.assign(&eps * &dd);
                if e[m].clone().abs() <= tmp {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(Error::NoConvergence { what: "tridiagonal QL", iterations: iter });
            }
            let two_e = Float::with_val(prec, &e[l] * 2u32);
            let mut g = Float::with_val(prec, &d[l + 1] - &d[l]) / &two_e;
            let mut r = hypot(&g, &Float::with_val(prec, 1));
            let shift_den = if g.is_sign_negative() { Float::with_val(prec, &g - &r) } else { Float::with_val(prec, &g + &r) };
            g = Float::with_val(prec, &d[m] - &d[l]) + Float::with_val(prec, &e[l] / &shift_den);
            let mut s = Float::with_val(prec, 1);
            let mut c = Float::with_val(prec, 1);
            let mut p = Float::new(prec);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = Float::with_val(prec, &s * &e[i]);
                let b = Float::with_val(prec, &c * &e[i]);
                r = hypot(&f, &g);
                e[i + 1].assign(&r);
                if r.is_zero() {
                    d[i + 1] -= &p;
                    e[m] = Float::new(prec);
                    underflow = true;
                    break;
                }
                s = Float::with_val(prec, &f / &r);
                c = Float::with_val(prec, &g / &r);
                g = Float::with_val(prec, &d[i + 1] - &p);
                r = Float::with_val(prec, &d[i] - &g) * &s;
                tmp.assign(&c * &b);
                r += &tmp;
                r += &tmp;
                p = Float::with_val(prec, &s * &r);
                d[i + 1] = Float::with_val(prec, &g + &p);
                g = Float::with_val(prec, &c * &r) - &b;
                if first_components {
                    let fz = z[i + 1].clone();
                    z[i + 1] = Float::with_val(prec, &s * &z[i]) + Float::with_val(prec, &c * &fz);
                    z[i] = Float::with_val(prec, &c * &z[i]) - Float::with_val(prec, &s * &fz);
                }
            }
            if underflow {
                continue;
            }
            d[l] -= &p;
            e[l] = g;
            e[m] = Float::new(prec);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("eigenvalues are finite"));
    let values = order.iter().map(|&i| d[i].clone()).collect();
    let comps = first_components.then(|| order.iter().map(|&i| z[i].clone()).collect());
    Ok((values, comps))
}

/// Reduces a symmetric matrix (lower triangle used) to tridiagonal form by
/// Householder reflections. Returns `(diagonal, off_diagonal)`.
pub fn householder_tridiagonal(mut a: FMatrix) -> (Vec<Float>, Vec<Float>) {
    let n = a.rows;
    assert_eq!(n, a.cols);
    let prec = a.prec();
    let mut d = vec![Float::new(prec); n];
    let mut e = vec![Float::new(prec); n];
    let mut tmp = Float::new(prec);
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = Float::new(prec);
        if l > 0 {
            let mut scale = Float::new(prec);
            for k in 0..=l {
                scale += Float::with_val(prec, a[(i, k)].abs_ref());
            }
            if scale.is_zero() {
                e[i] = a[(i, l)].clone();
            } else {
                for k in 0..=l {
                    a[(i, k)] /= &scale;
                    tmp.assign(a[(i, k)].square_ref());
                    h += &tmp;
                }
                let mut f = a[(i, l)].clone();
                let root = Float::with_val(prec, h.sqrt_ref());
                let g = if f.is_sign_negative() { root } else { -root };
                e[i] = Float::with_val(prec, &scale * &g);
                tmp.assign(&f * &g);
                h -= &tmp;
                a[(i, l)] = Float::with_val(prec, &f - &g);
                f = Float::new(prec);
                for j in 0..=l {
                    let mut gj = Float::new(prec);
                    for k in 0..=j {
                        tmp.assign(&a[(j, k)] * &a[(i, k)]);
                        gj += &tmp;
                    }
                    for k in (j + 1)..=l {
                        tmp.assign(&a[(k, j)] * &a[(i, k)]);
                        gj += &tmp;
                    }
                    e[j] = gj / &h;
                    tmp.assign(&e[j] * &a[(i, j)]);
                    f += &tmp;
                }
                let hh = Float::with_val(prec, &f / (Float::with_val(prec, &h * 2u32)));
                for j in 0..=l {
                    let fj = a[(i, j)].clone();
                    let gj = Float::with_val(prec, &e[j] - Float::with_val(prec, &hh * &fj));
                    e[j].assign(&gj);
                    for k in 0..=j {
                        tmp.assign(&fj * &e[k]);
                        let mut t2 = Float::with_val(prec, &gj * &a[(i, k)]);
                        t2 += &tmp;
                        a[(j, k)] -= &t2;
                    }
                }
            }
        } else {
            e[i] = a[(i, l)].clone();
        }
        d[i] = h;
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[(i, i)].clone();
    }
    e.remove(0);
    (d, e)
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: FMatrix) -> Result<Vec<Float>> {
    let (d, e) = householder_tridiagonal(a);
    Ok(tridiagonal_eigen(d, &e, false)?.0)
}
