//! Eigenvalues of real symmetric matrices: Householder reduction to
//! tridiagonal form followed by implicit QL, and a deflated power iteration
//! for graphs too large for the dense solver.

use num_traits::Float;

use super::cayley::CayleyGraph;
use crate::error::{Error, Result};

/// Reduces the symmetric `n x n` matrix `a` (row-major, overwritten) to
/// tridiagonal form, returning `(diagonal, off-diagonal)` with `e[0] = 0`.
fn tridiagonalize<T: Float>(a: &mut [T], n: usize) -> (Vec<T>, Vec<T>) {
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    let idx = |i: usize, j: usize| i * n + j;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let scale = (0..=l).fold(T::zero(), |s, k| s + a[idx(i, k)].abs());
            if scale == T::zero() {
                e[i] = a[idx(i, l)];
            } else {
                for k in 0..=l {
                    a[idx(i, k)] = a[idx(i, k)] / scale;
                    h = h + a[idx(i, k)] * a[idx(i, k)];
                }
                let f = a[idx(i, l)];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h = h - f * g;
                a[idx(i, l)] = f - g;
                let mut ff = T::zero();
                for j in 0..=l {
                    let mut g = T::zero();
                    for k in 0..=j {
                        g = g + a[idx(j, k)] * a[idx(i, k)];
                    }
                    for k in j + 1..=l {
                        g = g + a[idx(k, j)] * a[idx(i, k)];
                    }
                    e[j] = g / h;
                    ff = ff + e[j] * a[idx(i, j)];
                }
                let hh = ff / (h + h);
                for j in 0..=l {
                    let f = a[idx(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[idx(j, k)] = a[idx(j, k)] - (f * e[k] + g * a[idx(i, k)]);
                    }
                }
            }
        } else {
            e[i] = a[idx(i, l)];
        }
        d[i] = h;
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[idx(i, i)];
    }
    (d, e)
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with Wilkinson
/// shifts. `e[i]` couples rows `i - 1` and `i`.
fn tql<T: Float>(d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let two = T::one() + T::one();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Convergence(format!(
                    "QL iteration stalled at row {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// All eigenvalues of the symmetric `n x n` matrix `a` (row-major), ascending.
pub fn symmetric_eigenvalues<T: Float>(a: &[T], n: usize) -> Result<Vec<T>> {
    if a.len() != n * n {
        return Err(Error::Invalid(format!(
            "expected {} entries, got {}",
            n * n,
            a.len()
        )));
    }
    let mut work = a.to_vec();
    let (mut d, mut e) = tridiagonalize(&mut work, n);
    tql(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(d)
}

/// Spectrum of a `k`-regular graph with the trivial eigenvalues identified.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub degree: usize,
    pub eigenvalues: Vec<f64>,
    pub bipartite: bool,
    /// Largest `|lambda|` over the nontrivial eigenvalues.
    pub second: f64,
}

impl Spectrum {
    /// From the full spectrum: drops one eigenvalue `k` and, when
    /// `bipartite`, one eigenvalue `-k`.
    pub fn from_eigenvalues(degree: usize, mut eigenvalues: Vec<f64>, bipartite: bool) -> Spectrum {
        eigenvalues.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let n = eigenvalues.len();
        let lo = usize::from(bipartite);
        let hi = n.saturating_sub(1);
        let second = eigenvalues[lo.min(hi)..hi]
            .iter()
            .fold(0.0f64, |m, &x| m.max(x.abs()));
        Spectrum {
            degree,
            eigenvalues,
            bipartite,
            second,
        }
    }

    /// `|lambda| <= 2 sqrt(k - 1) + tol` for all nontrivial eigenvalues.
    pub fn is_ramanujan(&self, tol: f64) -> bool {
        self.second <= 2.0 * ((self.degree - 1) as f64).sqrt() + tol
    }

    /// Largest deviation from symmetry about 0 (`lambda_i + lambda_{n-1-i}`).
    pub fn pairing_defect(&self) -> f64 {
        let n = self.eigenvalues.len();
        (0..n)
            .map(|i| (self.eigenvalues[i] + self.eigenvalues[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }
}

impl CayleyGraph {
    /// Dense spectrum; refuses graphs above `max_dense` vertices.
    pub fn spectrum(&self, max_dense: usize) -> Result<Spectrum> {
        let n = self.len();
        if n > max_dense {
            return Err(Error::Budget {
                what: "dense eigensolve vertices".into(),
                needed: n as u128,
                budget: max_dense as u128,
            });
        }
        let ev = symmetric_eigenvalues(&self.dense_adjacency(), n)?;
        Ok(Spectrum::from_eigenvalues(
            self.degree(),
            ev,
            self.is_bipartite(),
        ))
    }
}

/// Largest nontrivial `|lambda|` by power iteration on `A^2`, projecting out
/// the constant vector and (for bipartite graphs) the sign vector. Returns
/// `(estimate, residual)` with residual `||A^2 v - mu v||`; fails if the
/// residual stays above `tol` after `max_iter` steps.
pub fn power_second_eigenvalue(
    g: &CayleyGraph,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    use rand::{Rng, SeedableRng};
    let n = g.len();
    if n < 3 {
        return Err(Error::Invalid("graph too small".into()));
    }
    let dist = g.bfs(0);
    let bip = g.is_bipartite();
    let sign: Vec<f64> = dist
        .iter()
        .map(|&d| if d % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    let project = |v: &mut [f64]| {
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        if bip {
            let s = v.iter().zip(&sign).map(|(a, b)| a * b).sum::<f64>() / n as f64;
            v.iter_mut().zip(&sign).for_each(|(x, b)| *x -= s * b);
        }
    };
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    project(&mut v);
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut tmp = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut last = (0.0, f64::INFINITY);
    for _ in 0..max_iter {
        g.apply(&v, &mut tmp);
        g.apply(&tmp, &mut w);
        project(&mut w);
        let mu: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let res = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - mu * b).powi(2))
            .sum::<f64>()
            .sqrt();
        last = (mu.max(0.0).sqrt(), res);
        if res <= tol {
            return Ok(last);
        }
        let nw = norm(&w);
        if nw == 0.0 {
            return Ok((0.0, 0.0));
        }
        for (x, y) in v.iter_mut().zip(&w) {
            *x = y / nw;
        }
    }
    Err(Error::Convergence(format!(
        "power iteration residual {:.3e} > {tol:.1e} after {max_iter} steps (estimate {:.6})",
        last.1, last.0
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_spectrum() {
        // K_5: eigenvalues 4 and -1 (four times)
        let n = 5;
        let a: Vec<f64> = (0..n * n)
            .map(|i| if i / n == i % n { 0.0 } else { 1.0 })
            .collect();
        let ev = symmetric_eigenvalues(&a, n).unwrap();
        for x in &ev[..4] {
            assert!((x + 1.0).abs() < 1e-12);
        }
        assert!((ev[4] - 4.0).abs() < 1e-12);
        let s = Spectrum::from_eigenvalues(4, ev, false);
        assert!((s.second - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cycle_spectrum_f32_and_f64() {
        // C_n has eigenvalues 2 cos(2 pi j / n)
        let n = 12;
        let mut a = vec![0.0f64; n * n];
        for i in 0..n {
            a[i * n + (i + 1) % n] = 1.0;
            a[((i + 1) % n) * n + i] = 1.0;
        }
        let mut want: Vec<f64> = (0..n)
            .map(|j| 2.0 * (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos())
            .collect();
        want.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let got = symmetric_eigenvalues(&a, n).unwrap();
        for (x, y) in got.iter().zip(&want) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
        let a32: Vec<f32> = a.iter().map(|&x| x as f32).collect();
        let got32 = symmetric_eigenvalues(&a32, n).unwrap();
        for (x, y) in got32.iter().zip(&want) {
            assert!((*x as f64 - y).abs() < 1e-4);
        }
        let s = Spectrum::from_eigenvalues(2, got, true);
        assert!(s.pairing_defect() < 1e-10);
    }
}
