//! Small dense linear algebra on numeric and jet-valued square matrices.

use crate::error::{GeomError, Result};
use crate::jet::Jet;
use crate::scalar::Real;
use crate::tensor::{JTensor, Tensor};

/// Inverse and determinant by Gauss-Jordan elimination with partial pivoting.
pub fn inverse_det<T: Real>(m: &Tensor<T>) -> Result<(Tensor<T>, T)> {
    let n = m.n();
    let mut a = m.rows();
    let mut inv = Tensor::<T>::identity(n).rows();
    let mut det = T::one();
    let scale = m.max_abs().max(T::min_positive_value());
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[piv][col].abs() <= scale * T::epsilon() * T::lit(16.0) {
            return Err(GeomError::DegenerateMetric {
                point: vec![],
                detail: format!("singular {n}x{n} matrix (pivot {:e})", a[piv][col].to_f64_lossy()),
            });
        }
        if piv != col {
            a.swap(piv, col);
            inv.swap(piv, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        let r = p.recip();
        for k in 0..n {
            a[col][k] *= r;
            inv[col][k] *= r;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                if f != T::zero() {
                    for k in 0..n {
                        let (ack, ick) = (a[col][k], inv[col][k]);
                        a[i][k] -= f * ack;
                        inv[i][k] -= f * ick;
                    }
                }
            }
        }
    }
    Ok((Tensor::from_fn(n, 2, |i| inv[i[0]][i[1]]), det))
}

pub fn inverse<T: Real>(m: &Tensor<T>) -> Result<Tensor<T>> {
    inverse_det(m).map(|(i, _)| i)
}

pub fn matmul<T: Real>(a: &Tensor<T>, b: &Tensor<T>) -> Tensor<T> {
    let n = a.n();
    Tensor::from_fn(n, 2, |i| (0..n).map(|k| a.at(&[i[0], k]) * b.at(&[k, i[1]])).sum())
}

pub fn transpose<T: Real>(a: &Tensor<T>) -> Tensor<T> {
    Tensor::from_fn(a.n(), 2, |i| a.at(&[i[1], i[0]]))
}

pub fn mat_vec<T: Real>(a: &Tensor<T>, v: &[T]) -> Vec<T> {
    (0..a.n()).map(|i| (0..a.n()).map(|k| a.at(&[i, k]) * v[k]).sum()).collect()
}

/// Lower Cholesky factor; fails unless the matrix is symmetric positive definite.
pub fn cholesky<T: Real>(m: &Tensor<T>) -> Result<Tensor<T>> {
    let n = m.n();
    let mut l = Tensor::<T>::zeros(n, 2);
    for i in 0..n {
        for j in 0..=i {
            let mut s = m.at(&[i, j]);
            for k in 0..j {
                s -= l.at(&[i, k]) * l.at(&[j, k]);
            }
            if i == j {
                if s <= T::zero() || !s.is_finite() {
                    return Err(GeomError::DegenerateMetric {
                        point: vec![],
                        detail: format!("not positive definite (pivot {i}: {:e})", s.to_f64_lossy()),
                    });
                }
                l.set(&[i, i], s.sqrt());
            } else {
                l.set(&[i, j], s / l.at(&[j, j]));
            }
        }
    }
    Ok(l)
}

/// Gram-Schmidt in the inner product `g`, applied to the coordinate axes.
/// Row `a` of the result holds the components of the `a`-th orthonormal vector.
pub fn orthonormal_frame<T: Real>(g: &Tensor<T>) -> Result<Tensor<T>> {
    let n = g.n();
    let ip = |u: &[T], v: &[T]| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                s += g.at(&[i, j]) * u[i] * v[j];
            }
        }
        s
    };
    let mut frame: Vec<Vec<T>> = Vec::with_capacity(n);
    for a in 0..n {
        let mut v = vec![T::zero(); n];
        v[a] = T::one();
        for e in &frame {
            let c = ip(&v, e);
            for i in 0..n {
                v[i] -= c * e[i];
            }
        }
        let nn = ip(&v, &v);
        if nn <= T::zero() {
            return Err(GeomError::DegenerateMetric { point: vec![], detail: "Gram-Schmidt breakdown".into() });
        }
        let r = nn.sqrt().recip();
        frame.push(v.into_iter().map(|x| x * r).collect());
    }
    Ok(Tensor::from_fn(n, 2, |i| frame[i[0]][i[1]]))
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues<T: Real>(m: &Tensor<T>) -> Vec<T> {
    let n = m.n();
    let mut a = m.rows();
    for _sweep in 0..100 {
        let off: T = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off <= T::epsilon() * T::epsilon() * T::lit(1e-4) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

pub fn jet_identity<T: Real>(like: &JTensor<T>) -> JTensor<T> {
    let layout = like.layout().clone();
    JTensor::from_fn(like.n(), 2, |i| Jet::constant(&layout, if i[0] == i[1] { T::one() } else { T::zero() }))
}

pub fn jet_matmul<T: Real>(a: &JTensor<T>, b: &JTensor<T>) -> JTensor<T> {
    let n = a.n();
    let layout = a.layout().clone();
    JTensor::from_fn(n, 2, |i| {
        let mut acc = Jet::zero(&layout);
        for k in 0..n {
            acc.fma_assign(a.at(&[i[0], k]), b.at(&[k, i[1]]));
        }
        acc
    })
}

pub fn jet_transpose<T: Real>(a: &JTensor<T>) -> JTensor<T> {
    JTensor::from_fn(a.n(), 2, |i| a.at(&[i[1], i[0]]).clone())
}

/// Exact truncated inverse of a jet matrix: with `M = M0 + E` (E without constant
/// part) the Neumann series `sum_k (-M0^{-1} E)^k M0^{-1}` terminates at the jet order.
pub fn jet_inverse<T: Real>(m: &JTensor<T>) -> Result<JTensor<T>> {
    let layout = m.layout().clone();
    let m0 = m.values();
    let x0 = JTensor::constant(&layout, &inverse(&m0)?);
    let e = m.sub(&JTensor::constant(&layout, &m0));
    let step = jet_matmul(&x0, &e).scale(-T::one());
    let mut term = jet_identity(m);
    let mut sum = term.clone();
    for _ in 0..m.order() {
        term = jet_matmul(&term, &step);
        sum = sum.add(&term);
    }
    Ok(jet_matmul(&sum, &x0))
}

/// Principal square root and inverse square root of a jet matrix whose constant
/// part has positive real spectrum (Denman-Beavers iteration, scaled).
pub fn jet_sqrt_pair<T: Real>(a: &JTensor<T>) -> Result<(JTensor<T>, JTensor<T>)> {
    let n = a.n();
    let a0 = a.values();
    let c = (0..n).map(|i| a0.at(&[i, i])).sum::<T>() / T::lit(n as f64);
    if c <= T::zero() || !c.is_finite() {
        return Err(GeomError::Numerical("matrix square root: nonpositive trace".into()));
    }
    let mut y = a.scale(c.recip());
    let mut z = jet_identity(a);
    let half = T::lit(0.5);
    let tol = T::epsilon() * T::lit(64.0);
    let mut converged = false;
    for _ in 0..100 {
        let yi = jet_inverse(&y)?;
        let zi = jet_inverse(&z)?;
        let y1 = y.add(&zi).scale(half);
        let z1 = z.add(&yi).scale(half);
        let dy = y1.sub(&y).max_abs_coeff();
        y = y1;
        z = z1;
        if dy <= tol * y.max_abs_coeff().max(T::one()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(GeomError::Numerical("Denman-Beavers iteration did not converge".into()));
    }
    let sc = c.sqrt();
    Ok((y.scale(sc), z.scale(sc.recip())))
}
