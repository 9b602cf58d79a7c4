//! Fundamental solutions of `-y'' + q(x) y = z y` on a single edge.
//!
//! For each edge we track the pair `s` (with `s(0) = 0`, `s'(0) = 1`) and
//! `c` (with `c(0) = 1`, `c'(0) = 0`) evaluated at the far end `x = length`.
//! Their Wronskian `c s' - c' s` is identically 1, which the tests lean on
//! heavily.
//!
//! Constant pieces are evaluated in closed form with a series fallback near
//! `z = q` so the pair is smooth across the trig/hyperbolic crossover.
//! Piecewise-constant potentials chain exact 2x2 transfer matrices; sampled
//! potentials are integrated with an adaptive embedded Runge-Kutta 4(5)
//! scheme, restarted at every grid node so the right-hand side stays smooth
//! inside each step.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Edge, PotentialSpec};

/// Real spectral parameter `z = lambda^2`.  Negative values probe the
/// hyperbolic (below-threshold) regime.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SpectralPoint(pub f64);

impl fmt::Display for SpectralPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z={}", self.0)
    }
}

/// Values of the fundamental pair at the far end of an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalPair {
    /// `s(length)` where `s(0) = 0`, `s'(0) = 1`.
    pub s: f64,
    /// `s'(length)`.
    pub s_prime: f64,
    /// `c(length)` where `c(0) = 1`, `c'(0) = 0`.
    pub c: f64,
    /// `c'(length)`.
    pub c_prime: f64,
}

/// `c s' - c' s`; identically 1 for exact solutions.
pub fn wronskian(p: &FundamentalPair) -> f64 {
    p.c * p.s_prime - p.c_prime * p.s
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolutionError {
    /// The potential description is malformed.
    InvalidPotential(String),
    /// The integrator or the closed forms cannot deliver the requested
    /// accuracy (step underflow, overflow of hyperbolic factors, ...).
    ToleranceNotMet(String),
}

impl fmt::Display for SolutionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionError::InvalidPotential(m) => write!(f, "invalid potential: {m}"),
            SolutionError::ToleranceNotMet(m) => write!(f, "tolerance not met: {m}"),
        }
    }
}

/// Growth cap for the hyperbolic branch: `exp(700)` is near the `f64`
/// overflow threshold, so `nu * h > 700` is reported instead of returning
/// infinities.
const HYPERBOLIC_CAP: f64 = 700.0;

/// Below `|z - q| h^2 = 1e-6` the closed forms switch to a 6-term series in
/// `u = (z - q) h^2`; the truncation error is O(u^6) ~ 1e-36, far below f64
/// resolution, and the branch point at `u = 0` is crossed smoothly.
const SERIES_CROSSOVER: f64 = 1e-6;

/// Fundamental pair over a single cell of length `h` with constant `q`,
/// where `mu2 = z - q`.
fn constant_cell(mu2: f64, h: f64) -> Result<FundamentalPair, SolutionError> {
    let u = mu2 * h * h;
    let (s, c) = if libm::fabs(u) < SERIES_CROSSOVER {
        let s = h * (1.0
            - u * (1.0 / 6.0)
            + u * u * (1.0 / 120.0)
            - u * u * u * (1.0 / 5040.0)
            + u * u * u * u * (1.0 / 362880.0)
            - u * u * u * u * u * (1.0 / 39916800.0));
        let c = 1.0
            - u * 0.5
            + u * u * (1.0 / 24.0)
            - u * u * u * (1.0 / 720.0)
            + u * u * u * u * (1.0 / 40320.0)
            - u * u * u * u * u * (1.0 / 3628800.0);
        (s, c)
    } else if mu2 > 0.0 {
        let mu = libm::sqrt(mu2);
        (libm::sin(mu * h) / mu, libm::cos(mu * h))
    } else {
        let nu = libm::sqrt(-mu2);
        if nu * h > HYPERBOLIC_CAP {
            return Err(SolutionError::ToleranceNotMet(format!(
                "hyperbolic factor exp({:.1}) overflows; z too far below the potential",
                nu * h
            )));
        }
        (libm::sinh(nu * h) / nu, libm::cosh(nu * h))
    };
    // For constant q: s' = c and c' = -(z - q) s in every branch.
    Ok(FundamentalPair { s, s_prime: c, c, c_prime: -mu2 * s })
}

/// Transfer matrix `[[c, s], [c', s']]` of a cell, mapping `(y, y')` at the
/// cell start to the cell end.
type Transfer = [[f64; 2]; 2];

fn pair_to_transfer(p: &FundamentalPair) -> Transfer {
    [[p.c, p.s], [p.c_prime, p.s_prime]]
}

fn transfer_to_pair(m: &Transfer) -> FundamentalPair {
    FundamentalPair { s: m[0][1], s_prime: m[1][1], c: m[0][0], c_prime: m[1][0] }
}

fn mat_mul(a: &Transfer, b: &Transfer) -> Transfer {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Evaluate the fundamental pair of `edge` at `z`.
///
/// `tol` is the local error tolerance of the adaptive integrator used for
/// sampled potentials; closed-form branches ignore it.
pub fn fundamental_pair(
    edge: &Edge,
    z: SpectralPoint,
    tol: f64,
) -> Result<FundamentalPair, SolutionError> {
    fundamental_pair_of(&edge.potential, edge.length, z, tol)
}

/// As [`fundamental_pair`], for a bare potential + length.
pub fn fundamental_pair_of(
    potential: &PotentialSpec,
    length: f64,
    z: SpectralPoint,
    tol: f64,
) -> Result<FundamentalPair, SolutionError> {
    if !(length.is_finite() && length > 0.0) {
        return Err(SolutionError::InvalidPotential(String::from(
            "edge length must be finite and positive",
        )));
    }
    match potential {
        PotentialSpec::Zero => constant_cell(z.0, length),
        PotentialSpec::Constant(q) => constant_cell(z.0 - q, length),
        PotentialSpec::PiecewiseConstant { breakpoints, values } => {
            if values.len() != breakpoints.len() + 1 {
                return Err(SolutionError::InvalidPotential(String::from(
                    "need exactly one more value than breakpoints",
                )));
            }
            let mut m: Transfer = [[1.0, 0.0], [0.0, 1.0]];
            let mut x = 0.0;
            for (i, q) in values.iter().enumerate() {
                let x_next = if i < breakpoints.len() { breakpoints[i] } else { length };
                if !(x_next > x && x_next <= length) {
                    return Err(SolutionError::InvalidPotential(String::from(
                        "breakpoints must be strictly increasing inside (0, length)",
                    )));
                }
                let cell = constant_cell(z.0 - q, x_next - x)?;
                m = mat_mul(&pair_to_transfer(&cell), &m);
                x = x_next;
            }
            Ok(transfer_to_pair(&m))
        }
        PotentialSpec::Sampled { grid, values } => {
            integrate_sampled(grid, values, length, z.0, tol)
        }
    }
}

/// Piecewise-linear interpolation through the sample nodes with constant
/// extrapolation outside the grid span.
fn q_sampled(grid: &[f64], values: &[f64], x: f64) -> f64 {
    if x <= grid[0] {
        return values[0];
    }
    if x >= grid[grid.len() - 1] {
        return values[values.len() - 1];
    }
    // grid is strictly increasing; find the bracketing interval.
    let mut lo = 0;
    let mut hi = grid.len() - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if grid[mid] <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = (x - grid[lo]) / (grid[hi] - grid[lo]);
    values[lo] + t * (values[hi] - values[lo])
}

// Dormand-Prince 5(4) coefficients.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 200_000;

/// State vector `(c, c', s, s')`; the RHS is `-y'' + (q - z) y = 0` applied
/// to both columns.
fn rhs(q: f64, z: f64, y: &[f64; 4]) -> [f64; 4] {
    [y[1], (q - z) * y[0], y[3], (q - z) * y[2]]
}

fn integrate_sampled(
    grid: &[f64],
    values: &[f64],
    length: f64,
    z: f64,
    tol: f64,
) -> Result<FundamentalPair, SolutionError> {
    if grid.is_empty() || values.len() != grid.len() {
        return Err(SolutionError::InvalidPotential(String::from(
            "sample grid and values must be non-empty and equally long",
        )));
    }
    for i in 1..grid.len() {
        if grid[i - 1] >= grid[i] {
            return Err(SolutionError::InvalidPotential(String::from(
                "grid nodes must be strictly increasing",
            )));
        }
    }
    let tol = tol.clamp(1e-14, 1e-2);
    let q = |x: f64| q_sampled(grid, values, x);

    // Segment boundaries: 0, interior grid nodes, length.  q is linear on
    // each segment, so the integrand is smooth within every step.
    let mut cuts: Vec<f64> = Vec::with_capacity(grid.len() + 2);
    cuts.push(0.0);
    for &gx in grid {
        if gx > 0.0 && gx < length {
            cuts.push(gx);
        }
    }
    cuts.push(length);

    let mut y: [f64; 4] = [1.0, 0.0, 0.0, 1.0];
    let mut steps = 0usize;
    // Conservative initial step: resolve the local wavelength.
    let scale = libm::sqrt(libm::fabs(z) + values.iter().fold(0.0f64, |a, v| a.max(libm::fabs(*v))) + 1.0);
    let mut h = (0.1 / scale).min(length * 0.1);

    for w in cuts.windows(2) {
        let (xa, xb) = (w[0], w[1]);
        let mut x = xa;
        let min_h = (xb - xa) * 1e-13 + 1e-300;
        while x < xb {
            let hs = h.min(xb - x);
            let k1 = rhs(q(x), z, &y);
            let mut yt = add_scaled(&y, hs, &[(A2[0], &k1)]);
            let k2 = rhs(q(x + hs / 5.0), z, &yt);
            yt = add_scaled(&y, hs, &[(A3[0], &k1), (A3[1], &k2)]);
            let k3 = rhs(q(x + hs * 3.0 / 10.0), z, &yt);
            yt = add_scaled(&y, hs, &[(A4[0], &k1), (A4[1], &k2), (A4[2], &k3)]);
            let k4 = rhs(q(x + hs * 4.0 / 5.0), z, &yt);
            yt = add_scaled(&y, hs, &[(A5[0], &k1), (A5[1], &k2), (A5[2], &k3), (A5[3], &k4)]);
            let k5 = rhs(q(x + hs * 8.0 / 9.0), z, &yt);
            yt = add_scaled(
                &y,
                hs,
                &[(A6[0], &k1), (A6[1], &k2), (A6[2], &k3), (A6[3], &k4), (A6[4], &k5)],
            );
            let k6 = rhs(q(x + hs), z, &yt);
            let y5 = add_scaled(
                &y,
                hs,
                &[(B5[0], &k1), (B5[1], &k2), (B5[2], &k3), (B5[3], &k4), (B5[4], &k5), (B5[5], &k6)],
            );
            let k7 = rhs(q(x + hs), z, &y5);

            let mut err_norm = 0.0f64;
            for i in 0..4 {
                let e = hs
                    * (ERR[0] * k1[i]
                        + ERR[1] * k2[i]
                        + ERR[2] * k3[i]
                        + ERR[3] * k4[i]
                        + ERR[4] * k5[i]
                        + ERR[5] * k6[i]
                        + ERR[6] * k7[i]);
                let sc = tol + tol * libm::fabs(y[i]).max(libm::fabs(y5[i]));
                err_norm = err_norm.max(libm::fabs(e) / sc);
            }
            if !err_norm.is_finite() || !y5.iter().all(|v| v.is_finite()) {
                return Err(SolutionError::ToleranceNotMet(String::from(
                    "integration overflowed; z too far below the potential",
                )));
            }

            if err_norm <= 1.0 {
                x += hs;
                y = y5;
            }
            let factor = if err_norm > 0.0 {
                (0.9 * libm::pow(err_norm, -0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            h = hs * factor;
            if h < min_h {
                return Err(SolutionError::ToleranceNotMet(String::from(
                    "step size underflow in the adaptive integrator",
                )));
            }
            steps += 1;
            if steps > MAX_STEPS {
                return Err(SolutionError::ToleranceNotMet(String::from(
                    "step budget exhausted in the adaptive integrator",
                )));
            }
        }
    }
    Ok(FundamentalPair { c: y[0], c_prime: y[1], s: y[2], s_prime: y[3] })
}

fn add_scaled(y: &[f64; 4], h: f64, terms: &[(f64, &[f64; 4])]) -> [f64; 4] {
    let mut out = *y;
    for (coeff, k) in terms {
        for i in 0..4 {
            out[i] += h * coeff * k[i];
        }
    }
    out
}
