//! Strongly convex regularizers on the simplex and their conjugate maps.
//!
//! A regularizer `v` is finite on the relative interior, smooth, strongly
//! convex, and steep (its gradient norm blows up at the boundary). Given a
//! noise level `eps > 0`, the regularized best response to a payoff vector
//! `u` is the unique maximizer
//!
//! ```text
//! b(u) = argmax_{y in simplex} <y, u> - eps * v(y)
//! ```
//!
//! which coincides with the gradient of the convex conjugate of `eps * v`,
//! and is therefore `1/(eps*gamma)`-Lipschitz in `u`, where `gamma` is the
//! strong-convexity modulus of `v`.
//!
//! Three families are provided. All satisfy the interior first-order
//! condition `u - eps * grad v(y) = lambda * 1`, which each solver exploits:
//!
//! - Shannon negentropy `sum x_j ln x_j`: closed-form logit/softmax solution.
//! - Tsallis `1/(1-q) * sum (x_j - x_j^q)`, `q in (0,1)`: the multiplier
//!   equation is strictly monotone, solved by bisection.
//! - Burg `-sum ln x_j`: the multiplier equation `sum eps/(lambda - u_j) = 1`
//!   is convex and decreasing, solved by safeguarded Newton.

use crate::simplex::SimplexPoint;
use crate::{Error, Result};

/// Residual tolerance on the simplex-sum equation solved for the multiplier.
const ROOT_TOL: f64 = 1e-12;
const MAX_ROOT_ITER: usize = 200;

/// A positive noise level; payoff units per entropy unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseLevel(f64);

impl NoiseLevel {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::Config(format!(
                "noise level must be positive and finite, got {epsilon}"
            )));
        }
        Ok(Self(epsilon))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Shannon,
    Tsallis { q: f64 },
    Burg,
}

/// One of the three regularizer families, optionally rescaled by a positive
/// weight (`w * v` has modulus `w * gamma` and leaves `eps * v` invariant
/// under `eps -> eps/w`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularizer {
    kind: Kind,
    weight: f64,
}

impl Regularizer {
    /// Shannon negentropy `sum x_j ln x_j` (convex; the sign makes the
    /// regularized argmax reproduce the logit formula).
    pub fn shannon() -> Self {
        Self {
            kind: Kind::Shannon,
            weight: 1.0,
        }
    }

    /// Tsallis entropy `1/(1-q) * sum (x_j - x_j^q)` with `q` in (0,1).
    pub fn tsallis(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 || q >= 1.0 {
            return Err(Error::Config(format!(
                "Tsallis parameter must lie in (0,1), got {q}"
            )));
        }
        Ok(Self {
            kind: Kind::Tsallis { q },
            weight: 1.0,
        })
    }

    /// Burg entropy `-sum ln x_j`.
    pub fn burg() -> Self {
        Self {
            kind: Kind::Burg,
            weight: 1.0,
        }
    }

    /// The regularizer `factor * v`. Noise and weight enter every formula
    /// only through the product `eps * weight`, so `v.scaled(c)` at noise
    /// `eps` behaves exactly like `v` at noise `c * eps`.
    pub fn scaled(self, factor: f64) -> Result<Self> {
        if !factor.is_finite() || factor <= 0.0 {
            return Err(Error::Config(format!(
                "scale factor must be positive and finite, got {factor}"
            )));
        }
        Ok(Self {
            kind: self.kind,
            weight: self.weight * factor,
        })
    }

    /// Certified lower bound on the Hessian eigenvalues over the interior,
    /// with respect to the Euclidean norm: 1 for Shannon and Burg, `q` for
    /// Tsallis, times the scale weight.
    pub fn strong_convexity_modulus(&self) -> f64 {
        let base = match self.kind {
            Kind::Shannon => 1.0,
            Kind::Tsallis { q } => q,
            Kind::Burg => 1.0,
        };
        base * self.weight
    }

    /// Evaluates `v(x)`. Burg returns `+inf` on the boundary; Shannon and
    /// Tsallis extend continuously (`0 ln 0 = 0`).
    pub fn value(&self, x: &SimplexPoint) -> f64 {
        let v = match self.kind {
            Kind::Shannon => x
                .entries()
                .iter()
                .map(|&p| if p > 0.0 { p * p.ln() } else { 0.0 })
                .sum(),
            Kind::Tsallis { q } => {
                x.entries().iter().map(|&p| p - p.powf(q)).sum::<f64>() / (1.0 - q)
            }
            Kind::Burg => {
                if x.is_interior() {
                    -x.entries().iter().map(|&p| p.ln()).sum::<f64>()
                } else {
                    f64::INFINITY
                }
            }
        };
        v * self.weight
    }

    /// Componentwise gradient at a strictly interior point.
    pub fn gradient(&self, x: &SimplexPoint) -> Result<Vec<f64>> {
        if !x.is_interior() {
            return Err(Error::Domain(
                "regularizer gradient requires a strictly interior point".into(),
            ));
        }
        let g: Vec<f64> = match self.kind {
            Kind::Shannon => x.entries().iter().map(|&p| 1.0 + p.ln()).collect(),
            Kind::Tsallis { q } => x
                .entries()
                .iter()
                .map(|&p| (1.0 - q * p.powf(q - 1.0)) / (1.0 - q))
                .collect(),
            Kind::Burg => x.entries().iter().map(|&p| -1.0 / p).collect(),
        };
        Ok(g.into_iter().map(|v| v * self.weight).collect())
    }

    /// The unique maximizer of `<y,u> - eps * v(y)` over the simplex.
    pub fn conjugate_argmax(&self, eps: NoiseLevel, u: &[f64]) -> Result<SimplexPoint> {
        if u.len() < 2 {
            return Err(Error::Shape(format!(
                "payoff vector needs at least 2 entries, got {}",
                u.len()
            )));
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("conjugate_argmax"));
        }
        let eff = eps.get() * self.weight;
        match self.kind {
            Kind::Shannon => shannon_argmax(eff, u),
            Kind::Tsallis { q } => tsallis_argmax(eff, q, u),
            Kind::Burg => burg_argmax(eff, u),
        }
    }

    /// The conjugate value `<y*, u> - eps * v(y*)` at the maximizer.
    pub fn conjugate_value(&self, eps: NoiseLevel, u: &[f64]) -> Result<f64> {
        let y = self.conjugate_argmax(eps, u)?;
        let inner: f64 = y.entries().iter().zip(u).map(|(a, b)| a * b).sum();
        Ok(inner - eps.get() * self.value(&y))
    }
}

/// The logit choice map `y_j = exp(u_j/eps) / sum_i exp(u_i/eps)`, computed
/// with a max shift so the exponentials never overflow.
pub fn logit_map(eps: NoiseLevel, u: &[f64]) -> Result<SimplexPoint> {
    if u.len() < 2 {
        return Err(Error::Shape(format!(
            "payoff vector needs at least 2 entries, got {}",
            u.len()
        )));
    }
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("logit_map"));
    }
    let m = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = u.iter().map(|&x| ((x - m) / eps.get()).exp()).collect();
    let s: f64 = exps.iter().sum();
    SimplexPoint::new(exps.into_iter().map(|e| e / s).collect())
}

/// Shannon solution through the multiplier: `lambda = eps * lse(u/eps)`,
/// then `y_j = exp((u_j - lambda)/eps)`.
fn shannon_argmax(eff: f64, u: &[f64]) -> Result<SimplexPoint> {
    let m = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = u.iter().map(|&x| ((x - m) / eff).exp()).sum();
    let lambda = m + eff * s.ln();
    let y: Vec<f64> = u.iter().map(|&x| ((x - lambda) / eff).exp()).collect();
    // The exponentials are exact to a few ulps; their sum sits within the
    // membership tolerance of 1.
    SimplexPoint::new(y)
}

/// Burg multiplier equation `f(lambda) = sum eps/(lambda - u_j) - 1 = 0` on
/// the bracket `(max u, max u + n*eps]`. `f` is convex and decreasing, so
/// Newton from the left end converges monotonically; bisection guards the
/// rare step that exits the bracket.
fn burg_argmax(eff: f64, u: &[f64]) -> Result<SimplexPoint> {
    let n = u.len() as f64;
    let m = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut lo = m; // f -> +inf as lambda -> lo+
    let mut hi = m + n * eff; // f(hi) <= 0
    let mut lambda = m + eff; // f(lambda) >= 0 since the max coordinate alone contributes 1
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ROOT_ITER {
        let f: f64 = u.iter().map(|&x| eff / (lambda - x)).sum::<f64>() - 1.0;
        residual = f.abs();
        if residual <= ROOT_TOL {
            let y: Vec<f64> = u.iter().map(|&x| eff / (lambda - x)).collect();
            return SimplexPoint::new(y);
        }
        if f > 0.0 {
            lo = lo.max(lambda);
        } else {
            hi = hi.min(lambda);
        }
        let fp: f64 = -u.iter().map(|&x| (eff / (lambda - x)).powi(2) / eff).sum::<f64>();
        let newton = lambda - f / fp;
        lambda = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::Solver {
        iterations: MAX_ROOT_ITER,
        lo,
        hi,
        residual,
    })
}

/// Tsallis multiplier equation: with
/// `c_j(lambda) = (lambda - u_j + eps/(1-q)) * (1-q) / (eps*q)`
/// the stationary point is `y_j = c_j(lambda)^(1/(q-1))`, and the sum of the
/// `y_j` is strictly decreasing in `lambda`. Bisection on the bracket whose
/// left end is the singularity of the max coordinate and whose right end
/// forces every `y_j <= 1/n`.
fn tsallis_argmax(eff: f64, q: f64, u: &[f64]) -> Result<SimplexPoint> {
    let n = u.len() as f64;
    let m = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let expo = 1.0 / (q - 1.0);
    let coeff = (1.0 - q) / (eff * q);
    let shift = eff / (1.0 - q);
    let y_at = |lambda: f64| -> Vec<f64> {
        u.iter()
            .map(|&x| {
                let c = (lambda - x + shift) * coeff;
                if c <= 0.0 {
                    f64::INFINITY
                } else {
                    c.powf(expo)
                }
            })
            .collect()
    };
    let sum_at = |lambda: f64| -> f64 { y_at(lambda).iter().sum() };

    let mut lo = m - shift; // sum -> +inf
    let mut hi = m - shift + (eff * q / (1.0 - q)) * n.powf(1.0 - q); // every y_j <= 1/n
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ROOT_ITER {
        let lambda = 0.5 * (lo + hi);
        let g = sum_at(lambda) - 1.0;
        residual = g.abs();
        if residual <= ROOT_TOL {
            return SimplexPoint::new(y_at(lambda));
        }
        if g > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
    }
    Err(Error::Solver {
        iterations: MAX_ROOT_ITER,
        lo,
        hi,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eps(e: f64) -> NoiseLevel {
        NoiseLevel::new(e).unwrap()
    }

    fn point(v: &[f64]) -> SimplexPoint {
        SimplexPoint::new(v.to_vec()).unwrap()
    }

    /// Brute-force conjugate oracle for n = 2: scans the simplex at the
    /// given step and returns the best grid point and objective value.
    fn grid_oracle_2d(v: &Regularizer, e: NoiseLevel, u: &[f64], step: f64) -> (Vec<f64>, f64) {
        assert_eq!(u.len(), 2);
        let mut best = (vec![0.5, 0.5], f64::NEG_INFINITY);
        let m = (1.0 / step).round() as usize;
        for i in 0..=m {
            let a = i as f64 * step;
            let y = point(&[a, 1.0 - a]);
            let obj =
                y.entries().iter().zip(u).map(|(p, q)| p * q).sum::<f64>() - e.get() * v.value(&y);
            if obj > best.1 {
                best = (y.entries().to_vec(), obj);
            }
        }
        best
    }

    /// KKT stationarity residual: the spread of `u - eps*grad v(y)` around
    /// its mean (zero iff the vector is a multiple of the all-ones vector).
    fn kkt_residual(v: &Regularizer, e: NoiseLevel, u: &[f64], y: &SimplexPoint) -> f64 {
        let g = v.gradient(y).unwrap();
        let r: Vec<f64> = u
            .iter()
            .zip(&g)
            .map(|(ui, gi)| ui - e.get() * gi)
            .collect();
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        r.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn shannon_value_examples() {
        let v = Regularizer::shannon();
        assert!((v.value(&point(&[0.5, 0.5])) + std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(v.value(&point(&[1.0, 0.0])), 0.0);
    }

    #[test]
    fn burg_value_examples() {
        let v = Regularizer::burg();
        assert!((v.value(&point(&[0.5, 0.5])) - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(v.value(&point(&[1.0, 0.0])), f64::INFINITY);
    }

    #[test]
    fn gradient_examples() {
        let v = Regularizer::shannon();
        let g = v.gradient(&point(&[0.5, 0.5])).unwrap();
        for gi in &g {
            assert!((gi - (1.0 - std::f64::consts::LN_2)).abs() < 1e-12);
        }
        let g = Regularizer::burg().gradient(&point(&[0.5, 0.5])).unwrap();
        assert_eq!(g, vec![-2.0, -2.0]);
        let v = Regularizer::tsallis(0.5).unwrap();
        let g = v.gradient(&point(&[0.25, 0.75])).unwrap();
        assert!(g[0].abs() < 1e-12); // 2*(1 - 0.5*0.25^{-1/2}) = 0
        assert!((g[1] - 2.0 * (1.0 - 0.5 / 0.75f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn gradient_rejects_boundary() {
        let v = Regularizer::shannon();
        assert!(v.gradient(&point(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        // Central differences along tangent directions on an interior grid.
        let h = 1e-6;
        for v in [
            Regularizer::shannon(),
            Regularizer::tsallis(0.5).unwrap(),
            Regularizer::tsallis(0.9).unwrap(),
            Regularizer::burg(),
        ] {
            for a in [0.2, 0.35, 0.5, 0.7] {
                let x = point(&[a, 1.0 - a]);
                let g = v.gradient(&x).unwrap();
                let xp = point(&[a + h, 1.0 - a - h]);
                let xm = point(&[a - h, 1.0 - a + h]);
                let fd = (v.value(&xp) - v.value(&xm)) / (2.0 * h);
                let directional = g[0] - g[1];
                assert!(
                    (fd - directional).abs() <= 1e-5 * directional.abs().max(1.0),
                    "fd {fd} vs analytic {directional} for {v:?} at {a}"
                );
            }
        }
    }

    #[test]
    fn modulus_certified_on_interior_grid() {
        // All three Hessians are diagonal; the certified modulus must lower
        // bound the smallest diagonal entry everywhere on an interior grid.
        let grid: Vec<SimplexPoint> = (1..20)
            .map(|i| {
                let a = i as f64 / 20.0;
                point(&[a, 1.0 - a])
            })
            .collect();
        for (v, hess): (Regularizer, fn(f64) -> f64) in [
            (Regularizer::shannon(), (|p| 1.0 / p) as fn(f64) -> f64),
            (Regularizer::burg(), (|p| 1.0 / (p * p)) as fn(f64) -> f64),
        ] {
            let gamma = v.strong_convexity_modulus();
            for x in &grid {
                for &p in x.entries() {
                    assert!(hess(p) >= gamma - 1e-12);
                }
            }
        }
        let q = 0.5;
        let v = Regularizer::tsallis(q).unwrap();
        assert_eq!(v.strong_convexity_modulus(), q);
        for x in &grid {
            for &p in x.entries() {
                assert!(q * p.powf(q - 2.0) >= q - 1e-12);
            }
        }
    }

    #[test]
    fn shannon_argmax_examples() {
        let v = Regularizer::shannon();
        let y = v.conjugate_argmax(eps(1.0), &[0.0, 0.0]).unwrap();
        assert!((y.entries()[0] - 0.5).abs() < 1e-12);
        let y = v.conjugate_argmax(eps(1.0), &[1.0, 0.0]).unwrap();
        let e = std::f64::consts::E;
        assert!((y.entries()[0] - e / (1.0 + e)).abs() < 1e-12);
        assert!((y.entries()[1] - 1.0 / (1.0 + e)).abs() < 1e-12);
        // grid cross-check at step 1e-4
        let (gy, _) = grid_oracle_2d(&v, eps(1.0), &[1.0, 0.0], 1e-4);
        assert!((y.entries()[0] - gy[0]).abs() <= 1e-4);
    }

    #[test]
    fn burg_argmax_example() {
        // lambda solves 1/(l-1) + 1/l = 1  =>  l = (3+sqrt5)/2
        let v = Regularizer::burg();
        let y = v.conjugate_argmax(eps(1.0), &[1.0, 0.0]).unwrap();
        let golden = (5.0f64.sqrt() - 1.0) / 2.0;
        assert!((y.entries()[0] - golden).abs() < 1e-10);
        assert!((y.entries()[1] - (1.0 - golden)).abs() < 1e-10);
        let (gy, gobj) = grid_oracle_2d(&v, eps(1.0), &[1.0, 0.0], 1e-4);
        assert!((y.entries()[0] - gy[0]).abs() <= 1e-4);
        let obj = y.entries()[0] - v.value(&y);
        assert!(obj >= gobj - 1e-12);
    }

    #[test]
    fn tsallis_argmax_against_grid() {
        let v = Regularizer::tsallis(0.5).unwrap();
        for u in [[1.0, 0.0], [2.5, -2.5], [0.3, 0.1]] {
            let y = v.conjugate_argmax(eps(0.7), &u).unwrap();
            let (gy, gobj) = grid_oracle_2d(&v, eps(0.7), &u, 1e-4);
            assert!((y.entries()[0] - gy[0]).abs() <= 1e-4);
            let obj: f64 =
                y.entries().iter().zip(&u).map(|(p, q)| p * q).sum::<f64>() - 0.7 * v.value(&y);
            assert!(obj >= gobj - 1e-12);
        }
    }

    #[test]
    fn conjugate_value_examples() {
        let v = Regularizer::shannon();
        let c = v.conjugate_value(eps(1.0), &[0.0, 0.0]).unwrap();
        assert!((c - std::f64::consts::LN_2).abs() < 1e-12);

        // constant payoffs shift the value by the constant
        for reg in [
            Regularizer::shannon(),
            Regularizer::tsallis(0.5).unwrap(),
            Regularizer::burg(),
        ] {
            let c0 = reg.conjugate_value(eps(1.0), &[0.0, 0.0, 0.0]).unwrap();
            let c3 = reg.conjugate_value(eps(1.0), &[3.0, 3.0, 3.0]).unwrap();
            assert!((c3 - c0 - 3.0).abs() < 1e-9);
            let uni = SimplexPoint::uniform(3);
            assert!((c0 + reg.value(&uni)).abs() < 1e-9);
        }

        // Burg at (1,0): value frozen from the solved multiplier and
        // verified against the grid oracle.
        let v = Regularizer::burg();
        let c = v.conjugate_value(eps(1.0), &[1.0, 0.0]).unwrap();
        assert!((c - (-0.8256015)).abs() < 1e-6);
        let (_, gobj) = grid_oracle_2d(&v, eps(1.0), &[1.0, 0.0], 1e-4);
        assert!(c >= gobj - 1e-12 && c - gobj < 1e-6);
    }

    #[test]
    fn logit_examples() {
        let y = logit_map(eps(1.0), &[0.0, 0.0, 0.0]).unwrap();
        for p in y.entries() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        let y = logit_map(eps(0.5), &[1.0, 0.0]).unwrap();
        let expect = 1.0 / (1.0 + (-2.0f64).exp());
        assert!((y.entries()[0] - expect).abs() < 1e-12);
        // grid oracle for the same map through the Shannon conjugate
        let (gy, _) = grid_oracle_2d(&Regularizer::shannon(), eps(0.5), &[1.0, 0.0], 1e-4);
        assert!((y.entries()[0] - gy[0]).abs() <= 1e-4);
    }

    #[test]
    fn logit_survives_huge_spread() {
        let y = logit_map(eps(1.0), &[800.0, 0.0]).unwrap();
        assert!((y.entries()[0] - 1.0).abs() < 1e-300);
        assert!(y.entries()[1] >= 0.0);
    }

    #[test]
    fn argmax_beats_random_feasible_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for reg in [
            Regularizer::shannon(),
            Regularizer::tsallis(0.5).unwrap(),
            Regularizer::burg(),
        ] {
            for _ in 0..1000 {
                let n = rng.gen_range(2..=4);
                let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let e = eps(*[0.1, 1.0].iter().nth(rng.gen_range(0..2)).unwrap());
                let y = reg.conjugate_argmax(e, &u).unwrap();
                let fy: f64 = y.entries().iter().zip(&u).map(|(a, b)| a * b).sum::<f64>()
                    - e.get() * reg.value(&y);
                // random interior competitor
                let raw: Vec<f64> = (0..n).map(|_| -rng.gen_range(0.0f64..1.0).ln()).collect();
                let s: f64 = raw.iter().sum();
                let z = point(&raw.iter().map(|x| x / s).collect::<Vec<_>>());
                let fz: f64 = z.entries().iter().zip(&u).map(|(a, b)| a * b).sum::<f64>()
                    - e.get() * reg.value(&z);
                assert!(fy >= fz - 1e-10, "{reg:?} {u:?}");
            }
        }
    }

    #[test]
    fn argmax_satisfies_interior_kkt() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for reg in [
            Regularizer::shannon(),
            Regularizer::tsallis(0.3).unwrap(),
            Regularizer::burg(),
        ] {
            for _ in 0..200 {
                let n = rng.gen_range(2..=4);
                let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let e = eps(1.0);
                let y = reg.conjugate_argmax(e, &u).unwrap();
                assert!(y.is_interior());
                assert!(kkt_residual(&reg, e, &u, &y) <= 1e-10);
            }
        }
    }

    #[test]
    fn conjugate_map_is_lipschitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for reg in [
            Regularizer::shannon(),
            Regularizer::tsallis(0.5).unwrap(),
            Regularizer::burg(),
        ] {
            let gamma = reg.strong_convexity_modulus();
            for _ in 0..500 {
                let n = rng.gen_range(2..=4);
                let e = eps(*[0.1, 0.5, 1.0, 2.0].iter().nth(rng.gen_range(0..4)).unwrap());
                let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let yu = reg.conjugate_argmax(e, &u).unwrap();
                let yw = reg.conjugate_argmax(e, &w).unwrap();
                let dy = yu.distance(&yw);
                let du: f64 = u
                    .iter()
                    .zip(&w)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                assert!(dy <= du / (e.get() * gamma) + 1e-9, "{reg:?}");
            }
        }
    }

    #[test]
    fn scaled_regularizer_shifts_noise() {
        // v.scaled(c) at eps behaves like v at c*eps.
        let base = Regularizer::tsallis(0.5).unwrap();
        let scaled = base.scaled(2.5).unwrap();
        let u = [1.0, -0.3, 0.4];
        let a = scaled.conjugate_argmax(eps(1.0), &u).unwrap();
        let b = base.conjugate_argmax(eps(2.5), &u).unwrap();
        assert!(a.distance(&b) < 1e-12);
        assert!((scaled.strong_convexity_modulus() - 2.5 * 0.5).abs() < 1e-15);
    }

    proptest! {
        /// Adding a constant to every payoff leaves the argmax unchanged.
        #[test]
        fn shift_invariance(
            u in proptest::collection::vec(-5.0f64..5.0, 2..5),
            c in -10.0f64..10.0,
            pick in 0usize..3,
        ) {
            let reg = match pick {
                0 => Regularizer::shannon(),
                1 => Regularizer::tsallis(0.5).unwrap(),
                _ => Regularizer::burg(),
            };
            let e = eps(1.0);
            let shifted: Vec<f64> = u.iter().map(|x| x + c).collect();
            let a = reg.conjugate_argmax(e, &u).unwrap();
            let b = reg.conjugate_argmax(e, &shifted).unwrap();
            for (x, y) in a.entries().iter().zip(b.entries()) {
                prop_assert!((x - y).abs() <= 1e-10);
            }
        }

        /// The logit map agrees with the Shannon conjugate route.
        #[test]
        fn logit_equals_shannon_argmax(
            u in proptest::collection::vec(-8.0f64..8.0, 2..6),
            e in 0.05f64..2.0,
        ) {
            let e = eps(e);
            let a = logit_map(e, &u).unwrap();
            let b = Regularizer::shannon().conjugate_argmax(e, &u).unwrap();
            for (x, y) in a.entries().iter().zip(b.entries()) {
                prop_assert!((x - y).abs() <= 1e-10);
            }
        }
    }
}
