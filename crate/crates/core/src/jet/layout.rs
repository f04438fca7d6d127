use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{GeomError, Result};

/// Largest supported number of independent variables.
pub const MAX_DIM: usize = 8;
/// Largest supported truncation order.
pub const MAX_ORDER: usize = 3;

/// Multi-index bookkeeping for jets of a fixed `(dim, order)`.
///
/// Monomials are stored in graded-lexicographic order, so the layout of a lower
/// order is always a prefix of this one.
#[derive(Debug)]
pub struct JetLayout {
    dim: usize,
    order: usize,
    exps: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    factorial: Vec<f64>,
    products: Vec<(u32, u32, u32)>,
    // per variable: (source index here, target index in `lower`, multiplier)
    derivs: Vec<Vec<(u32, u32, f64)>>,
    lower: Option<Arc<JetLayout>>,
}

fn monomials(dim: usize, degree: usize) -> Vec<Vec<u8>> {
    // lexicographically descending: x0^d first
    fn rec(dim: usize, pos: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if pos + 1 == dim {
            cur[pos] = left as u8;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[pos] = k as u8;
            rec(dim, pos + 1, left - k, cur, out);
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0u8; dim];
    rec(dim, 0, degree, &mut cur, &mut out);
    out
}

impl JetLayout {
    fn build(dim: usize, order: usize, lower: Option<Arc<JetLayout>>) -> Self {
        let mut exps = Vec::new();
        for d in 0..=order {
            exps.extend(monomials(dim, d));
        }
        let index: HashMap<Vec<u8>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let factorial = exps
            .iter()
            .map(|e| e.iter().map(|&k| (1..=k as u32).product::<u32>() as f64).product())
            .collect();
        let mut products = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            let da: usize = a.iter().map(|&k| k as usize).sum();
            for (j, b) in exps.iter().enumerate() {
                let db: usize = b.iter().map(|&k| k as usize).sum();
                if da + db > order {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                products.push((i as u32, j as u32, index[&sum] as u32));
            }
        }
        let derivs = match &lower {
            None => vec![Vec::new(); dim],
            Some(low) => (0..dim)
                .map(|var| {
                    low.exps
                        .iter()
                        .enumerate()
                        .map(|(t, beta)| {
                            let mut up = beta.clone();
                            up[var] += 1;
                            (index[&up] as u32, t as u32, up[var] as f64)
                        })
                        .collect()
                })
                .collect(),
        };
        JetLayout { dim, order, exps, index, factorial, products, derivs, lower }
    }

    /// Shared layout for `(dim, order)`; layouts are interned process-wide.
    pub fn get(dim: usize, order: usize) -> Result<Arc<JetLayout>> {
        if dim == 0 || dim > MAX_DIM {
            return Err(GeomError::Usage(format!("jet dimension {dim} outside 1..={MAX_DIM}")));
        }
        if order > MAX_ORDER {
            return Err(GeomError::Usage(format!("jet order {order} exceeds {MAX_ORDER}")));
        }
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetLayout>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(l) = cache.lock().unwrap().get(&(dim, order)) {
            return Ok(l.clone());
        }
        let lower = if order == 0 { None } else { Some(Self::get(dim, order - 1)?) };
        let built = Arc::new(Self::build(dim, order, lower));
        let mut guard = cache.lock().unwrap();
        Ok(guard.entry((dim, order)).or_insert(built).clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of stored coefficients, `C(dim + order, order)`.
    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u8>] {
        &self.exps
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    /// `alpha!` for the monomial stored at `idx`.
    pub fn factorial(&self, idx: usize) -> f64 {
        self.factorial[idx]
    }

    pub(crate) fn products(&self) -> &[(u32, u32, u32)] {
        &self.products
    }

    pub(crate) fn derivative_map(&self, var: usize) -> &[(u32, u32, f64)] {
        &self.derivs[var]
    }

    pub fn lower(&self) -> Option<&Arc<JetLayout>> {
        self.lower.as_ref()
    }

    /// Layout of order `k <= self.order`.
    pub fn truncated(self: &Arc<Self>, k: usize) -> Arc<JetLayout> {
        let mut cur = self.clone();
        while cur.order > k {
            cur = cur.lower.clone().expect("order > 0 has a lower layout");
        }
        cur
    }
}
