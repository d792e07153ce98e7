//! Geometry of a finite union of disjoint real intervals
//! `E = [a_0, a_1] ∪ [a_2, a_3] ∪ … ∪ [a_{2l-2}, a_{2l-1}]`
//! and the algebraic function `√H` attached to it.
//!
//! Bands are indexed `0..l`, gaps `0..l-1`; gap `j` separates band `j`
//! from band `j + 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Validated, immutable union of `l` disjoint closed intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemSpec", into = "SystemSpec")]
pub struct IntervalSystem {
    a: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SystemSpec {
    endpoints: Vec<f64>,
}

impl TryFrom<SystemSpec> for IntervalSystem {
    type Error = Error;
    fn try_from(s: SystemSpec) -> Result<Self> {
        IntervalSystem::new(&s.endpoints)
    }
}

impl From<IntervalSystem> for SystemSpec {
    fn from(s: IntervalSystem) -> Self {
        SystemSpec { endpoints: s.a }
    }
}

/// Where a real point sits relative to `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// Strictly left of `a_0`.
    Left,
    /// Strictly right of `a_{2l-1}`.
    Right,
    /// Interior of band `k`.
    Band(usize),
    /// Interior of gap `j`.
    Gap(usize),
    /// Exactly endpoint `a_i`.
    Endpoint(usize),
}

/// Pointwise value of the signed density `1/h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HInv {
    Value(f64),
    /// Band endpoint: the density is not integrable pointwise there.
    Endpoint,
}

impl IntervalSystem {
    /// Validates `endpoints` as `a_0 < a_1 < … < a_{2l-1}`.
    pub fn new(endpoints: &[f64]) -> Result<Self> {
        if endpoints.len() < 2 {
            return Err(Error::InvalidSystem("fewer than two endpoints".into()));
        }
        if endpoints.len() % 2 != 0 {
            return Err(Error::InvalidSystem(format!(
                "odd number of endpoints ({})",
                endpoints.len()
            )));
        }
        if endpoints.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSystem("non-finite endpoint".into()));
        }
        for (i, w) in endpoints.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::InvalidSystem(format!(
                    "endpoints not strictly increasing at index {}",
                    i + 1
                )));
            }
        }
        Ok(IntervalSystem {
            a: endpoints.to_vec(),
        })
    }

    /// Number of bands `l`.
    pub fn l(&self) -> usize {
        self.a.len() / 2
    }

    pub fn endpoints(&self) -> &[f64] {
        &self.a
    }

    pub fn band(&self, k: usize) -> (f64, f64) {
        (self.a[2 * k], self.a[2 * k + 1])
    }

    pub fn gap(&self, j: usize) -> (f64, f64) {
        (self.a[2 * j + 1], self.a[2 * j + 2])
    }

    pub fn left(&self) -> f64 {
        self.a[0]
    }

    pub fn right(&self) -> f64 {
        self.a[self.a.len() - 1]
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.left() + self.right())
    }

    /// Half-width of the convex hull.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.right() - self.left())
    }

    pub fn diam(&self) -> f64 {
        self.right() - self.left()
    }

    /// Image of the system under `x ↦ s·x + t` with `s > 0`.
    pub fn affine(&self, s: f64, t: f64) -> Result<Self> {
        if s <= 0.0 {
            return Err(Error::InvalidArgument("affine scale must be positive".into()));
        }
        IntervalSystem::new(&self.a.iter().map(|x| s * x + t).collect::<Vec<_>>())
    }

    pub fn locate(&self, x: f64) -> Location {
        if x < self.left() {
            return Location::Left;
        }
        if x > self.right() {
            return Location::Right;
        }
        match self.a.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => Location::Endpoint(i),
            Err(i) => {
                // a[i-1] < x < a[i]
                if i % 2 == 1 {
                    Location::Band((i - 1) / 2)
                } else {
                    Location::Gap(i / 2 - 1)
                }
            }
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        matches!(self.locate(x), Location::Band(_) | Location::Endpoint(_))
    }

    /// `H(z) = ∏ (z − a_i)`.
    pub fn h_poly(&self, z: Complex64) -> Complex64 {
        self.a.iter().fold(Complex64::new(1.0, 0.0), |acc, &ai| acc * (z - ai))
    }

    /// Branch of `√H` analytic off `E`, positive right of `E`; real `z` is
    /// read as `z + i0`.
    pub fn sqrt_h(&self, z: Complex64) -> Complex64 {
        let z = if z.im == 0.0 { Complex64::new(z.re, 0.0) } else { z };
        self.a
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &ai| acc * (z - ai).sqrt())
    }

    /// Upper boundary value `√H⁺(x)`; purely imaginary on `E`.
    pub fn sqrt_h_plus(&self, x: f64) -> Complex64 {
        self.sqrt_h(Complex64::new(x, 0.0))
    }

    /// Sign of `√H⁺ / i` on band `k`, equal to `(−1)^{l−1−k}`.
    pub fn band_sign(&self, k: usize) -> f64 {
        if (self.l() - 1 - k) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Sign of the real value `√H` on gap `j`, equal to `(−1)^{l−1−j}`.
    pub fn gap_sign(&self, j: usize) -> f64 {
        self.band_sign(j)
    }

    /// Signed density `1/h = (−1)^{l−1−k}/(π√(−H))` on band `k`, zero off `E`.
    pub fn h_inv(&self, x: f64) -> HInv {
        match self.locate(x) {
            Location::Band(k) => {
                let hx = self.h_poly(Complex64::new(x, 0.0)).re;
                HInv::Value(self.band_sign(k) / (PI * (-hx).sqrt()))
            }
            Location::Endpoint(_) => HInv::Endpoint,
            _ => HInv::Value(0.0),
        }
    }

    /// Point of band `k` at angle `θ`: `a_{2k} ↔ 0`, `a_{2k+1} ↔ π`.
    pub fn band_point(&self, k: usize, theta: f64) -> f64 {
        let (lo, hi) = self.band(k);
        0.5 * (lo + hi) - 0.5 * (hi - lo) * theta.cos()
    }

    /// Point of gap `j` at angle `θ`: `a_{2j+1} ↔ 0`, `a_{2j+2} ↔ π`.
    pub fn gap_point(&self, j: usize, theta: f64) -> f64 {
        let (lo, hi) = self.gap(j);
        0.5 * (lo + hi) - 0.5 * (hi - lo) * theta.cos()
    }

    /// Within `1e-7·diam` of an endpoint; such points are treated as the endpoint.
    pub fn near_endpoint(&self, x: f64) -> bool {
        let tol = 1e-7 * self.diam();
        self.a.iter().any(|a| (a - x).abs() <= tol)
    }

    /// Angle of `x` inside `[lo, hi]`.
    pub fn theta_of(lo: f64, hi: f64, x: f64) -> f64 {
        let c = ((0.5 * (lo + hi) - x) / (0.5 * (hi - lo))).clamp(-1.0, 1.0);
        c.acos()
    }

    /// `√|∏_{i ∉ {i0, i0+1}} (x − a_i)|`, the smooth part of `√|H|` on the
    /// interval `[a_{i0}, a_{i0+1}]`.
    pub fn sqrt_abs_other(&self, i0: usize, x: f64) -> f64 {
        self.a
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != i0 && *i != i0 + 1)
            .map(|(_, &ai)| (x - ai).abs())
            .product::<f64>()
            .sqrt()
    }
}
