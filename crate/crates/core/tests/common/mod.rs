//! Random instances and independent oracles shared by the integration tests.
//! Nothing here calls into the code paths it is used to check.
#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use wtn::{CountryRegistry, TradeMatrix};

pub fn registry(n: usize) -> Arc<CountryRegistry> {
    Arc::new(CountryRegistry::from_pairs((0..n).map(|i| (format!("X{i:02}"), format!("Country {i}")))).unwrap())
}

/// Random non-negative money matrix with zero diagonal. Each off-diagonal
/// link exists with probability `density`; values span four decades.
pub fn random_values<R: Rng>(rng: &mut R, n: usize, density: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |r, c| {
        if r != c && rng.random::<f64>() < density {
            10f64.powf(rng.random_range(0.0..4.0))
        } else {
            0.0
        }
    })
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize, density: f64) -> TradeMatrix {
    TradeMatrix::new(2015, random_values(rng, n, density), registry(n)).unwrap()
}

/// Random matrix in which every country trades with at least one partner.
pub fn connected_matrix<R: Rng>(rng: &mut R, n: usize, density: f64) -> TradeMatrix {
    let mut v = random_values(rng, n, density);
    for c in 0..n {
        let next = (c + 1) % n;
        if v[(next, c)] == 0.0 {
            v[(next, c)] = 1.0 + rng.random::<f64>();
        }
        if v[(c, next)] == 0.0 {
            v[(c, next)] = 1.0 + rng.random::<f64>();
        }
    }
    TradeMatrix::new(2015, v, registry(n)).unwrap()
}

/// Google matrix assembled entry by entry from the money matrix.
pub fn explicit_google(m: &DMatrix<f64>, alpha: f64, inverted: bool) -> DMatrix<f64> {
    let n = m.nrows();
    let flows = if inverted { m.transpose() } else { m.clone() };
    let col_sums: Vec<f64> = (0..n).map(|c| flows.column(c).iter().sum()).collect();
    DMatrix::from_fn(n, n, |r, c| {
        let s = if col_sums[c] > 0.0 { flows[(r, c)] / col_sums[c] } else { 1.0 / n as f64 };
        alpha * s + (1.0 - alpha) / n as f64
    })
}

/// Stationary vector from the linear system `(I - G) x = 0`, `sum x = 1`.
pub fn dense_stationary(g: &DMatrix<f64>) -> DVector<f64> {
    let n = g.nrows();
    let mut a = DMatrix::<f64>::identity(n, n) - g;
    let mut b = DVector::zeros(n);
    for c in 0..n {
        a[(n - 1, c)] = 1.0;
    }
    b[n - 1] = 1.0;
    a.lu().solve(&b).expect("singular stationary system")
}

/// `G_rr + G_rs (1 - G_ss)^-1 G_sr` by a direct LU solve.
pub fn schur_reduced(g: &DMatrix<f64>, subset: &[usize]) -> DMatrix<f64> {
    let n = g.nrows();
    let rest: Vec<usize> = (0..n).filter(|i| !subset.contains(i)).collect();
    let pick = |rows: &[usize], cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |i, j| g[(rows[i], cols[j])]);
    let g_rr = pick(subset, subset);
    if rest.is_empty() {
        return g_rr;
    }
    let g_rs = pick(subset, &rest);
    let g_sr = pick(&rest, subset);
    let g_ss = pick(&rest, &rest);
    let lhs = DMatrix::<f64>::identity(rest.len(), rest.len()) - g_ss;
    let solved = lhs.lu().solve(&g_sr).expect("singular scattering block");
    g_rr + g_rs * solved
}

/// Volume shares and ranks straight from the money matrix.
pub struct DirectWeights {
    pub s: DMatrix<f64>,
    pub s_star: DMatrix<f64>,
    pub p: Vec<f64>,
    pub p_star: Vec<f64>,
}

pub fn direct_weights(m: &DMatrix<f64>) -> DirectWeights {
    let n = m.nrows();
    let imports: Vec<f64> = (0..n).map(|c| (0..n).map(|k| m[(c, k)]).sum()).collect();
    let exports: Vec<f64> = (0..n).map(|c| (0..n).map(|k| m[(k, c)]).sum()).collect();
    let total: f64 = imports.iter().sum();
    let s = DMatrix::from_fn(n, n, |c, cp| if exports[cp] > 0.0 { m[(c, cp)] / exports[cp] } else { 0.0 });
    let s_star = DMatrix::from_fn(n, n, |c, cp| if imports[cp] > 0.0 { m[(cp, c)] / imports[cp] } else { 0.0 });
    DirectWeights {
        s,
        s_star,
        p: imports.iter().map(|x| x / total).collect(),
        p_star: exports.iter().map(|x| x / total).collect(),
    }
}

/// `Z_c = sum_{c' != c} sigma_{c'} (S_{c'c} + S*_{c'c}) (P_{c'} + P*_{c'}) / 2`,
/// with `sigma = -1` for label 0 and `+1` for label 1. `uniform` replaces the
/// weight factor by 1.
pub fn signed_score(w: &DirectWeights, tcp: &[u8], c: usize, uniform: bool) -> f64 {
    let mut z = 0.0;
    for cp in 0..tcp.len() {
        if cp == c {
            continue;
        }
        let sigma = if tcp[cp] == 0 { -1.0 } else { 1.0 };
        let factor = if uniform { 1.0 } else { (w.p[cp] + w.p_star[cp]) / 2.0 };
        z += sigma * (w.s[(cp, c)] + w.s_star[(cp, c)]) * factor;
    }
    z
}

/// Normalized per-currency score over partners holding each label.
pub fn normalized_scores(w: &DirectWeights, tcp: &[u8], c: usize, k: usize) -> Vec<f64> {
    let mut num = vec![0.0; k];
    let mut den = 0.0;
    for cp in 0..tcp.len() {
        if cp == c {
            continue;
        }
        let term = (w.s[(cp, c)] + w.s_star[(cp, c)]) * (w.p[cp] + w.p_star[cp]);
        num[tcp[cp] as usize] += term;
        den += term;
    }
    num.into_iter().map(|x| x / den).collect()
}

/// All assignments of two labels to `free` that no update would change,
/// found by scoring every free country directly.
pub fn enumerate_fixed_points(w: &DirectWeights, base: &[u8], free: &[usize], uniform: bool) -> Vec<Vec<u8>> {
    assert!(free.len() <= 16);
    let mut out = Vec::new();
    for mask in 0u32..(1 << free.len()) {
        let mut tcp = base.to_vec();
        for (bit, &c) in free.iter().enumerate() {
            tcp[c] = ((mask >> bit) & 1) as u8;
        }
        let stable = free.iter().all(|&c| {
            let want = u8::from(signed_score(w, &tcp, c, uniform) >= 0.0);
            want == tcp[c]
        });
        if stable {
            out.push(tcp);
        }
    }
    out
}

pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}
