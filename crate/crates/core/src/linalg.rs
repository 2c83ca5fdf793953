//! Small dense matrices over MPFR reals and MPC complexes.

use nalgebra::DMatrix;
use rug::{Complex, Float};

#[derive(Clone, Debug)]
pub struct RealMatrix {
    n: usize,
    data: Vec<Float>,
}

impl RealMatrix {
    pub fn from_fn(n: usize, prec: u32, f: impl Fn(usize, usize) -> Float) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(Float::with_val(prec, f(i, j)));
            }
        }
        RealMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Float {
        &self.data[i * self.n + j]
    }

    fn prec(&self) -> u32 {
        self.data[0].prec()
    }

    pub fn trace(&self) -> Float {
        let mut t = Float::with_val(self.prec(), 0);
        for i in 0..self.n {
            t += self.get(i, i);
        }
        t
    }

    /// Lower Cholesky factor, or `None` when the matrix is not positive definite.
    pub fn cholesky(&self) -> Option<RealMatrix> {
        let n = self.n;
        let p = self.prec();
        let mut l = vec![Float::with_val(p, 0); n * n];
        for j in 0..n {
            let mut d = self.get(j, j).clone();
            for k in 0..j {
                d -= Float::with_val(p, l[j * n + k].square_ref());
            }
            if d <= 0 {
                return None;
            }
            let djj = d.sqrt();
            for i in j + 1..n {
                let mut s = self.get(i, j).clone();
                for k in 0..j {
                    s -= Float::with_val(p, &l[i * n + k] * &l[j * n + k]);
                }
                l[i * n + j] = s / &djj;
            }
            l[j * n + j] = djj;
        }
        Some(RealMatrix { n, data: l })
    }

    pub fn is_positive_definite(&self) -> bool {
        self.cholesky().is_some()
    }

    /// Leading principal minors, in order.
    pub fn leading_minors(&self) -> Vec<Float> {
        (1..=self.n)
            .map(|k| {
                RealMatrix::from_fn(k, self.prec(), |i, j| self.get(i, j).clone()).det()
            })
            .collect()
    }

    pub fn det(&self) -> Float {
        let n = self.n;
        let p = self.prec();
        let mut a = self.data.clone();
        let mut det = Float::with_val(p, 1);
        for c in 0..n {
            let piv = (c..n)
                .max_by(|&x, &y| {
                    a[x * n + c]
                        .clone()
                        .abs()
                        .partial_cmp(&a[y * n + c].clone().abs())
                        .unwrap()
                })
                .unwrap();
            if a[piv * n + c].is_zero() {
                return Float::with_val(p, 0);
            }
            if piv != c {
                for k in 0..n {
                    a.swap(piv * n + k, c * n + k);
                }
                det = -det;
            }
            let pv = a[c * n + c].clone();
            det *= &pv;
            for r in c + 1..n {
                let f = Float::with_val(p, &a[r * n + c] / &pv);
                for k in c..n {
                    let t = Float::with_val(p, &f * &a[c * n + k]);
                    a[r * n + k] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<RealMatrix> {
        let n = self.n;
        let p = self.prec();
        let mut a = self.data.clone();
        let mut inv: Vec<Float> = (0..n * n)
            .map(|k| Float::with_val(p, if k / n == k % n { 1 } else { 0 }))
            .collect();
        for c in 0..n {
            let piv = (c..n)
                .max_by(|&x, &y| {
                    a[x * n + c]
                        .clone()
                        .abs()
                        .partial_cmp(&a[y * n + c].clone().abs())
                        .unwrap()
                })
                .unwrap();
            if a[piv * n + c].is_zero() {
                return None;
            }
            for k in 0..n {
                a.swap(piv * n + k, c * n + k);
                inv.swap(piv * n + k, c * n + k);
            }
            let pv = a[c * n + c].clone();
            for k in 0..n {
                a[c * n + k] /= &pv;
                inv[c * n + k] /= &pv;
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[r * n + c].clone();
                if f.is_zero() {
                    continue;
                }
                for k in 0..n {
                    let t = Float::with_val(p, &f * &a[c * n + k]);
                    a[r * n + k] -= t;
                    let t = Float::with_val(p, &f * &inv[c * n + k]);
                    inv[r * n + k] -= t;
                }
            }
        }
        Some(RealMatrix { n, data: inv })
    }

    pub fn mul_vec(&self, v: &[Float]) -> Vec<Float> {
        (0..self.n)
            .map(|i| {
                let mut s = Float::with_val(self.prec(), 0);
                for j in 0..self.n {
                    s += Float::with_val(self.prec(), self.get(i, j) * &v[j]);
                }
                s
            })
            .collect()
    }

    /// vᵀ M v
    pub fn quad(&self, v: &[Float]) -> Float {
        let mv = self.mul_vec(v);
        let mut s = Float::with_val(self.prec(), 0);
        for (a, b) in v.iter().zip(&mv) {
            s += Float::with_val(self.prec(), a * b);
        }
        s
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).to_f64())
    }

    /// Smallest eigenvalue (double precision, used only for truncation planning).
    pub fn lambda_min(&self) -> f64 {
        let m = self.to_f64();
        let m = (&m + m.transpose()) * 0.5;
        m.symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    pub fn from_fn(n: usize, prec: u32, f: impl Fn(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(Complex::with_val(prec, f(i, j)));
            }
        }
        ComplexMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Complex {
        &self.data[i * self.n + j]
    }

    pub fn entries(&self) -> &[Complex] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<Complex> {
        self.data
    }

    fn prec(&self) -> u32 {
        self.data[0].prec().0
    }

    pub fn mul(&self, o: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        let p = self.prec();
        ComplexMatrix::from_fn(n, p, |i, j| {
            let mut s = Complex::with_val(p, 0);
            for k in 0..n {
                s += Complex::with_val(p, self.get(i, k) * o.get(k, j));
            }
            s
        })
    }

    pub fn add(&self, o: &ComplexMatrix) -> ComplexMatrix {
        let p = self.prec();
        ComplexMatrix::from_fn(self.n, p, |i, j| Complex::with_val(p, self.get(i, j) + o.get(i, j)))
    }

    pub fn det(&self) -> Complex {
        let n = self.n;
        let p = self.prec();
        let mut a = self.data.clone();
        let mut det = Complex::with_val(p, 1);
        for c in 0..n {
            let piv = (c..n)
                .max_by(|&x, &y| {
                    let ax = Float::with_val(p, a[x * n + c].abs_ref());
                    let ay = Float::with_val(p, a[y * n + c].abs_ref());
                    ax.partial_cmp(&ay).unwrap()
                })
                .unwrap();
            if a[piv * n + c].is_zero() {
                return Complex::with_val(p, 0);
            }
            if piv != c {
                for k in 0..n {
                    a.swap(piv * n + k, c * n + k);
                }
                det = -det;
            }
            let pv = a[c * n + c].clone();
            det *= &pv;
            for r in c + 1..n {
                let f = Complex::with_val(p, &a[r * n + c] / &pv);
                for k in c..n {
                    let t = Complex::with_val(p, &f * &a[c * n + k]);
                    a[r * n + k] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<ComplexMatrix> {
        let n = self.n;
        let p = self.prec();
        let mut a = self.data.clone();
        let mut inv: Vec<Complex> = (0..n * n)
            .map(|k| Complex::with_val(p, if k / n == k % n { 1 } else { 0 }))
            .collect();
        for c in 0..n {
            let piv = (c..n)
                .max_by(|&x, &y| {
                    let ax = Float::with_val(p, a[x * n + c].abs_ref());
                    let ay = Float::with_val(p, a[y * n + c].abs_ref());
                    ax.partial_cmp(&ay).unwrap()
                })
                .unwrap();
            if a[piv * n + c].is_zero() {
                return None;
            }
            for k in 0..n {
                a.swap(piv * n + k, c * n + k);
                inv.swap(piv * n + k, c * n + k);
            }
            let pv = a[c * n + c].clone();
            for k in 0..n {
                a[c * n + k] /= &pv;
                inv[c * n + k] /= &pv;
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[r * n + c].clone();
                if f.is_zero() {
                    continue;
                }
                for k in 0..n {
                    let t = Complex::with_val(p, &f * &a[c * n + k]);
                    a[r * n + k] -= t;
                    let t = Complex::with_val(p, &f * &inv[c * n + k]);
                    inv[r * n + k] -= t;
                }
            }
        }
        Some(ComplexMatrix { n, data: inv })
    }
}
