//! Simplex geometry shared by every other module.
//!
//! The strategy simplex is `{ x in R^n : x_j >= 0, sum x_j = 1 }` with the
//! Euclidean norm throughout. Its tangent space is the set of vectors whose
//! components sum to zero.

use crate::{Error, Result};

/// Tolerance for simplex membership after construction.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// A point of the probability simplex: nonnegative entries summing to one
/// (within [`MEMBERSHIP_TOL`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    entries: Vec<f64>,
}

impl SimplexPoint {
    /// Validates and wraps a probability vector.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::Shape(format!(
                "simplex point needs at least 2 entries, got {}",
                entries.len()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("SimplexPoint::new"));
        }
        let sum: f64 = entries.iter().sum();
        let min = entries.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < 0.0 || (sum - 1.0).abs() > MEMBERSHIP_TOL {
            return Err(Error::Drift {
                context: "SimplexPoint::new",
                tol: MEMBERSHIP_TOL,
                sum,
                min,
                entries,
            });
        }
        Ok(Self { entries })
    }

    /// The uniform distribution over `n` strategies.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 2, "simplex dimension must be at least 2");
        Self {
            entries: vec![1.0 / n as f64; n],
        }
    }

    /// The vertex placing all mass on strategy `k`.
    pub fn vertex(n: usize, k: usize) -> Self {
        assert!(n >= 2 && k < n, "vertex index out of range");
        let mut entries = vec![0.0; n];
        entries[k] = 1.0;
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    /// Smallest coordinate.
    pub fn min_entry(&self) -> f64 {
        self.entries.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// True iff the point lies in the relative interior (all entries > 0).
    pub fn is_interior(&self) -> bool {
        self.min_entry() > 0.0
    }

    /// Euclidean distance to another point of the same simplex.
    pub fn distance(&self, other: &SimplexPoint) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// A tangent direction: components sum to zero (within [`MEMBERSHIP_TOL`]).
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    entries: Vec<f64>,
}

impl TangentVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("TangentVector::new"));
        }
        let sum: f64 = entries.iter().sum();
        if sum.abs() > MEMBERSHIP_TOL {
            return Err(Error::Domain(format!(
                "tangent vector components sum to {sum:e}, expected 0"
            )));
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Orthogonal projection of an arbitrary vector onto the tangent space:
/// subtracts the mean from every component.
pub fn tangent_project(u: &[f64]) -> Result<TangentVector> {
    if u.len() < 2 {
        return Err(Error::Shape(format!(
            "tangent projection needs at least 2 entries, got {}",
            u.len()
        )));
    }
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("tangent_project"));
    }
    let mean = u.iter().sum::<f64>() / u.len() as f64;
    let mut entries: Vec<f64> = u.iter().map(|x| x - mean).collect();
    // One correction pass kills the rounding residue of the first subtraction.
    let residue = entries.iter().sum::<f64>() / entries.len() as f64;
    for e in &mut entries {
        *e -= residue;
    }
    TangentVector::new(entries)
}

/// Repairs a vector that drifted off the simplex by at most `tol`:
/// clamps small negatives to zero and rescales to unit sum.
///
/// A vector that already satisfies the membership tolerance is returned
/// unchanged, so the map is the identity on valid simplex points.
pub fn renormalize(x: &[f64], tol: f64) -> Result<SimplexPoint> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("renormalize"));
    }
    let sum: f64 = x.iter().sum();
    let min = x.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -tol || (sum - 1.0).abs() > tol {
        return Err(Error::Drift {
            context: "renormalize",
            tol,
            sum,
            min,
            entries: x.to_vec(),
        });
    }
    if min >= 0.0 && (sum - 1.0).abs() <= MEMBERSHIP_TOL {
        return SimplexPoint::new(x.to_vec());
    }
    let clamped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let s: f64 = clamped.iter().sum();
    if s <= 0.0 {
        return Err(Error::Drift {
            context: "renormalize (zero mass)",
            tol,
            sum,
            min,
            entries: x.to_vec(),
        });
    }
    SimplexPoint::new(clamped.iter().map(|v| v / s).collect())
}
