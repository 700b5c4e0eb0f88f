//! Dense double-precision linear algebra for small matrices: a symmetric
//! eigensolver (Householder tridiagonalization followed by implicit-shift QL)
//! and LU factorization with partial pivoting.

use std::ops::{Index, IndexMut};

/// Row-major square matrix.
#[derive(Clone, Debug)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Symmetric Toeplitz matrix with entry `first_row[|i-j|]`.
    pub fn sym_toeplitz(first_row: &[f64]) -> Self {
        let n = first_row.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = first_row[i.abs_diff(j)];
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Submatrix with row `r` and column `c` removed.
    pub fn minor(&self, r: usize, c: usize) -> SquareMatrix {
        let mut out = SquareMatrix::zeros(self.n - 1);
        let mut ii = 0;
        for i in 0..self.n {
            if i == r {
                continue;
            }
            let mut jj = 0;
            for j in 0..self.n {
                if j == c {
                    continue;
                }
                out[(ii, jj)] = self[(i, j)];
                jj += 1;
            }
            ii += 1;
        }
        out
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalues of a real symmetric matrix, ascending. The input is consumed
/// as workspace. Accuracy is absolute, of order `eps * ||A||`; eigenvalues far
/// below that level are returned as roundoff-sized numbers.
pub fn sym_eigenvalues(mut a: SquareMatrix) -> Result<Vec<f64>, String> {
    let n = a.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = tridiagonalize(&mut a);
    ql_implicit(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(d)
}

/// Householder reduction of a symmetric matrix to tridiagonal form
/// (eigenvalues-only variant; transforms are not accumulated).
fn tridiagonalize(a: &mut SquareMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.n();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];

    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..i {
                scale += a[(i, k)].abs();
            }
            if scale == 0.0 {
                e[i] = a[(i, l)];
            } else {
                for k in 0..i {
                    a[(i, k)] /= scale;
                    h += a[(i, k)] * a[(i, k)];
                }
                let f = a[(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[(i, l)] = f - g;
                let mut fsum = 0.0;
                for j in 0..i {
                    let mut g2 = 0.0;
                    for k in 0..=j {
                        g2 += a[(j, k)] * a[(i, k)];
                    }
                    for k in (j + 1)..i {
                        g2 += a[(k, j)] * a[(i, k)];
                    }
                    e[j] = g2 / h;
                    fsum += e[j] * a[(i, j)];
                }
                let hh = fsum / (h + h);
                for j in 0..i {
                    let f2 = a[(i, j)];
                    let g2 = e[j] - hh * f2;
                    e[j] = g2;
                    for k in 0..=j {
                        let delta = f2 * e[k] + g2 * a[(i, k)];
                        a[(j, k)] -= delta;
                    }
                }
            }
        } else {
            e[i] = a[(i, l)];
        }
        d[i] = h;
    }
    for i in 0..n {
        d[i] = a[(i, i)];
    }
    e[0] = 0.0;
    (d, e)
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix
/// (diagonal `d`, subdiagonal `e` with `e[0]` unused).
fn ql_implicit(d: &mut [f64], e: &mut [f64]) -> Result<(), String> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err("QL iteration failed to converge".to_string());
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// LU factorization with partial pivoting.
pub struct Lu {
    lu: SquareMatrix,
    piv: Vec<usize>,
    perm_sign: f64,
    singular: bool,
}

pub fn lu_factor(m: &SquareMatrix) -> Lu {
    let n = m.n();
    let mut lu = m.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    let mut perm_sign = 1.0;
    let mut singular = false;

    for k in 0..n {
        let mut p = k;
        let mut best = lu[(k, k)].abs();
        for i in (k + 1)..n {
            let v = lu[(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            singular = true;
            continue;
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
            piv.swap(k, p);
            perm_sign = -perm_sign;
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            for j in (k + 1)..n {
                let delta = factor * lu[(k, j)];
                lu[(i, j)] -= delta;
            }
        }
    }

    Lu {
        lu,
        piv,
        perm_sign,
        singular,
    }
}

impl Lu {
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Sign of the determinant and natural log of its absolute value.
    pub fn log_abs_det(&self) -> (f64, f64) {
        if self.singular {
            return (0.0, f64::NEG_INFINITY);
        }
        let n = self.lu.n();
        let mut sign = self.perm_sign;
        let mut log = 0.0;
        for k in 0..n {
            let u = self.lu[(k, k)];
            if u < 0.0 {
                sign = -sign;
            }
            log += u.abs().ln();
        }
        (sign, log)
    }

    /// Solves `A x = b` for the factored matrix.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, String> {
        if self.singular {
            return Err("singular matrix".to_string());
        }
        let n = self.lu.n();
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut sum = x[i];
            for j in 0..i {
                sum -= self.lu[(i, j)] * x[j];
            }
            x[i] = sum;
        }
        for i in (0..n).rev() {
            let mut sum = x[i];
            for j in (i + 1)..n {
                sum -= self.lu[(i, j)] * x[j];
            }
            x[i] = sum / self.lu[(i, i)];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> SquareMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = rng.random_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    #[test]
    fn eigenvalues_2x2_analytic() {
        let mut m = SquareMatrix::zeros(2);
        m[(0, 0)] = 2.0;
        m[(1, 1)] = 3.0;
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 1.0;
        let ev = sym_eigenvalues(m).unwrap();
        // lambda = (5 +- sqrt(5)) / 2
        let lo = (5.0 - 5f64.sqrt()) / 2.0;
        let hi = (5.0 + 5f64.sqrt()) / 2.0;
        assert!((ev[0] - lo).abs() < 1e-14);
        assert!((ev[1] - hi).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_tridiagonal_toeplitz_analytic() {
        // diag a, off-diag b: lambda_k = a + 2 b cos(k pi / (n+1))
        let n = 12;
        let (a, b) = (1.5, -0.7);
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = a;
            if i + 1 < n {
                m[(i, i + 1)] = b;
                m[(i + 1, i)] = b;
            }
        }
        let mut expected: Vec<f64> = (1..=n)
            .map(|k| a + 2.0 * b * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        expected.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let ev = sym_eigenvalues(m).unwrap();
        for (got, want) in ev.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn eigen_trace_frobenius_and_det_agree_with_lu() {
        for seed in 0..5u64 {
            let n = 15;
            let m = random_symmetric(n, seed);
            let trace: f64 = (0..n).map(|i| m[(i, i)]).sum();
            let frob2: f64 = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)] * m[(i, j)])
                .sum();
            let (sign, logdet) = lu_factor(&m).log_abs_det();
            let ev = sym_eigenvalues(m).unwrap();
            let ev_trace: f64 = ev.iter().sum();
            let ev_frob2: f64 = ev.iter().map(|l| l * l).sum();
            assert!((ev_trace - trace).abs() < 1e-11);
            assert!((ev_frob2 - frob2).abs() < 1e-10);
            let ev_logdet: f64 = ev.iter().map(|l| l.abs().ln()).sum();
            let ev_sign = ev.iter().map(|l| l.signum()).product::<f64>();
            assert!((ev_logdet - logdet).abs() < 1e-9, "{ev_logdet} vs {logdet}");
            assert_eq!(ev_sign, sign);
        }
    }

    #[test]
    fn lu_solve_roundtrip() {
        let n = 10;
        let m = random_symmetric(n, 42);
        let lu = lu_factor(&m);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = lu.solve(&b).unwrap();
        for i in 0..n {
            let mut ax = 0.0;
            for j in 0..n {
                ax += m[(i, j)] * x[j];
            }
            assert!((ax - b[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn lu_detects_singular() {
        let mut m = SquareMatrix::zeros(3);
        for j in 0..3 {
            m[(0, j)] = 1.0;
            m[(1, j)] = 2.0;
            m[(2, j)] = j as f64;
        }
        // rows 0 and 1 proportional
        let lu = lu_factor(&m);
        assert!(lu.is_singular() || lu.log_abs_det().1 < -30.0);
    }
}
