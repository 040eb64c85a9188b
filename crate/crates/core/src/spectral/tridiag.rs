use rayon::prelude::*;

/// Real symmetric tridiagonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTriMatrix {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows i and i+1.
    pub off: Vec<f64>,
}

impl SymTriMatrix {
    /// Panics unless `off.len() + 1 == diag.len()`.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty() && off.len() + 1 == diag.len(), "inconsistent tridiagonal sizes");
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { diag: self.diag.iter().map(|d| d * s).collect(), off: self.off.iter().map(|o| o * s).collect() }
    }

    pub fn add_diagonal(&mut self, extra: &[f64]) {
        assert_eq!(extra.len(), self.diag.len());
        for (d, e) in self.diag.iter_mut().zip(extra) {
            *d += e;
        }
    }

    /// Elementwise max |Δ|; infinite when the sizes differ.
    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        if self.dim() != o.dim() {
            return f64::INFINITY;
        }
        let d = self.diag.iter().zip(&o.diag).map(|(a, b)| (a - b).abs());
        let e = self.off.iter().zip(&o.off).map(|(a, b)| (a - b).abs());
        d.chain(e).fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.diag.iter().chain(&self.off).fold(0.0, |m, v| m.max(v.abs()))
    }

    /// y = T·x.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    fn pivmin(&self) -> f64 {
        let max_e2 = self.off.iter().fold(1.0f64, |m, e| m.max(e * e));
        f64::MIN_POSITIVE * max_e2
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence via LDLᵀ pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = self.pivmin();
        let mut count = 0;
        let mut d = self.diag[0] - x;
        for i in 0.. {
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
            if i + 1 == self.dim() {
                break;
            }
            let e = self.off[i];
            d = self.diag[i + 1] - x - e * e / d;
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        let pad = f64::EPSILON * lo.abs().max(hi.abs()) * 4.0 + self.pivmin();
        (lo - pad, hi + pad)
    }

    /// The k-th smallest eigenvalue (0-based), bisected to machine precision.
    pub fn kth_eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + self.pivmin() {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `count` smallest eigenvalues, ascending. Each is bisected
    /// independently, so the parallel map is deterministic.
    pub fn lowest(&self, count: usize) -> Vec<f64> {
        (0..count).into_par_iter().map(|k| self.kth_eigenvalue(k)).collect()
    }

    /// Solves (T − σI)y = b by Gaussian elimination with partial pivoting.
    fn shifted_solve(&self, sigma: f64, b: &mut [f64]) {
        let n = self.dim();
        let tiny = f64::EPSILON * self.max_abs_entry().max(f64::MIN_POSITIVE);
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - sigma).collect();
        let dl = &self.off;
        let mut du = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let guard = |v: f64| if v == 0.0 { tiny } else { v };
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                d[i] = guard(d[i]);
                let fact = dl[i] / d[i];
                d[i + 1] -= fact * du[i];
                b[i + 1] -= fact * b[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du2[i];
                }
                du[i] = temp;
                let t = b[i];
                b[i] = b[i + 1];
                b[i + 1] = t - fact * b[i + 1];
            }
        }
        d[n - 1] = guard(d[n - 1]);
        b[n - 1] /= d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
        }
    }

    /// Unit eigenvector for an (accurately known) eigenvalue by inverse
    /// iteration; the largest component is made positive.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.25 * ((i as f64) * 0.7).sin()).collect();
        normalize(&mut v);
        for _ in 0..4 {
            self.shifted_solve(lambda, &mut v);
            normalize(&mut v);
        }
        let (imax, _) = v.iter().enumerate().fold((0, 0.0), |(bi, bv), (i, x)| if x.abs() > bv { (i, x.abs()) } else { (bi, bv) });
        if v[imax] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 && norm.is_finite() {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTriMatrix {
        SymTriMatrix::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 50;
        let t = laplacian(n);
        let got = t.lowest(n);
        for (k, l) in got.iter().enumerate() {
            let theta = (k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64;
            let want = 2.0 - 2.0 * theta.cos();
            assert!((l - want).abs() < 1e-13, "{k}: {l} vs {want}");
        }
        assert!(got.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eigenvectors_satisfy_equation() {
        let n = 40;
        let t = SymTriMatrix::new((0..n).map(|i| (i as f64).sqrt()).collect(), vec![0.7; n - 1]);
        for k in [0, 3, 17] {
            let l = t.kth_eigenvalue(k);
            let v = t.eigenvector(l);
            let tv = t.apply(&v);
            let r = tv.iter().zip(&v).map(|(a, b)| (a - l * b).abs()).fold(0.0, f64::max);
            assert!(r < 1e-12, "residual {r}");
        }
    }

    #[test]
    fn sturm_count() {
        let t = laplacian(10);
        assert_eq!(t.count_below(-1.0), 0);
        assert_eq!(t.count_below(5.0), 10);
        assert_eq!(t.count_below(2.0 + 1e-12), 5);
    }

    #[test]
    fn one_by_one() {
        let t = SymTriMatrix::new(vec![3.5], vec![]);
        assert!((t.lowest(1)[0] - 3.5).abs() < 4.0 * f64::EPSILON);
        assert_eq!(t.eigenvector(3.5), vec![1.0]);
    }
}
