//! Next-generation matrices and the epidemic threshold.
//!
//! `F` collects the new-infection rates at the disease-free equilibrium and
//! `V` the transition/recovery rates; the threshold is the Perron root of
//! `M = F V^-1`. Because `M` has rank two, the root is shared with the 2x2
//! reduced matrix `[[q11, q12], [q21, q22]]`, which yields a closed form and
//! an equivalent convex-combination form `alpha R1 + (1 - alpha) R2`.

use crate::error::{Error, Result};
use crate::model::{Scenario, G_11, G_12, G_1R, G_21, G_22, G_2R, GROUP_COUNT};

/// Power-iteration relative tolerance used by [`ThresholdReport::for_scenario`].
pub const POWER_ITERATION_TOL: f64 = 1e-12;

/// Power-iteration budget before reporting non-convergence.
pub const POWER_ITERATION_MAX: usize = 10_000;

/// Cross-check tolerance between the closed form and the eigensolve.
pub const EIGEN_CROSS_CHECK_TOL: f64 = 1e-9;

/// Relative group size under which the eigensolve cross-check is skipped
/// (empty groups make the matrix reducible).
pub const EMPTY_GROUP_THRESHOLD: f64 = 1e-12;

/// Dense 6x6 matrix in canonical group order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix6(pub [[f64; GROUP_COUNT]; GROUP_COUNT]);

impl Matrix6 {
    pub fn zero() -> Self {
        Self([[0.0; GROUP_COUNT]; GROUP_COUNT])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for k in 0..GROUP_COUNT {
            m.0[k][k] = 1.0;
        }
        m
    }

    pub fn mul_vec(&self, x: &[f64; GROUP_COUNT]) -> [f64; GROUP_COUNT] {
        let mut y = [0.0; GROUP_COUNT];
        for (row, out) in self.0.iter().zip(y.iter_mut()) {
            *out = row.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        }
        y
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().flatten().all(|&v| v >= 0.0)
    }
}

/// LU factorization with partial pivoting, in place.
struct Lu {
    lu: [[f64; GROUP_COUNT]; GROUP_COUNT],
    perm: [usize; GROUP_COUNT],
}

impl Lu {
    #[allow(clippy::needless_range_loop)]
    fn factor(a: &Matrix6) -> Result<Self> {
        let mut lu = a.0;
        let mut perm = [0usize; GROUP_COUNT];
        for (k, p) in perm.iter_mut().enumerate() {
            *p = k;
        }
        let scale: f64 = a.0.iter().flatten().fold(0.0, |acc, v| acc.max(v.abs()));
        for col in 0..GROUP_COUNT {
            let mut pivot_row = col;
            let mut pivot = lu[col][col].abs();
            for (row, entries) in lu.iter().enumerate().skip(col + 1) {
                if entries[col].abs() > pivot {
                    pivot = entries[col].abs();
                    pivot_row = row;
                }
            }
            if pivot <= f64::EPSILON * scale {
                return Err(Error::Consistency(
                    "transition matrix is numerically singular".into(),
                ));
            }
            if pivot_row != col {
                lu.swap(col, pivot_row);
                perm.swap(col, pivot_row);
            }
            for row in col + 1..GROUP_COUNT {
                let factor = lu[row][col] / lu[col][col];
                lu[row][col] = factor;
                for j in col + 1..GROUP_COUNT {
                    lu[row][j] -= factor * lu[col][j];
                }
            }
        }
        Ok(Self { lu, perm })
    }

    fn solve(&self, b: &[f64; GROUP_COUNT]) -> [f64; GROUP_COUNT] {
        let mut x = [0.0; GROUP_COUNT];
        for (k, &p) in self.perm.iter().enumerate() {
            x[k] = b[p];
        }
        for row in 1..GROUP_COUNT {
            for col in 0..row {
                x[row] -= self.lu[row][col] * x[col];
            }
        }
        for row in (0..GROUP_COUNT).rev() {
            for col in row + 1..GROUP_COUNT {
                x[row] -= self.lu[row][col] * x[col];
            }
            x[row] /= self.lu[row][row];
        }
        x
    }
}

/// The new-infection matrix `F`, the transition matrix `V` and their
/// product `M = F V^-1`.
#[derive(Debug, Clone, Copy)]
pub struct NextGenMatrices {
    pub f: Matrix6,
    pub v: Matrix6,
    pub m: Matrix6,
}

/// Assembles `F` and `V` at the disease-free equilibrium and computes
/// `M = F V^-1` by solving one linear system per row of `F` (never by
/// forming `V^-1` explicitly).
pub fn build_next_generation(scenario: &Scenario) -> Result<NextGenMatrices> {
    let ep = scenario.epidemic();
    let mo = scenario.mobility();
    let eq = scenario.equilibrium();
    let sizes = scenario.group_sizes();
    let gamma = ep.gamma();
    let (l1, m1, l2, m2) = (mo.lambda1(), mo.mu1(), mo.lambda2(), mo.mu2());

    // Infecteds present in patch 1 sit in columns (1r, 11, 21), patch 2 in
    // (12, 2r, 22); row g receives beta_patch(g) * N_g / N_patch(g),p.
    let mut f = Matrix6::zero();
    for (g, w) in [
        (G_1R, ep.beta1() * sizes[G_1R] / eq.n1p()),
        (G_11, ep.beta1() * sizes[G_11] / eq.n1p()),
        (G_21, ep.beta1() * sizes[G_21] / eq.n1p()),
    ] {
        f.0[g][G_1R] = w;
        f.0[g][G_11] = w;
        f.0[g][G_21] = w;
    }
    for (g, w) in [
        (G_12, ep.beta2() * sizes[G_12] / eq.n2p()),
        (G_2R, ep.beta2() * sizes[G_2R] / eq.n2p()),
        (G_22, ep.beta2() * sizes[G_22] / eq.n2p()),
    ] {
        f.0[g][G_12] = w;
        f.0[g][G_2R] = w;
        f.0[g][G_22] = w;
    }

    let mut v = Matrix6::zero();
    v.0[G_1R][G_1R] = gamma;
    v.0[G_11][G_11] = gamma + l1;
    v.0[G_11][G_12] = -m1;
    v.0[G_12][G_11] = -l1;
    v.0[G_12][G_12] = gamma + m1;
    v.0[G_2R][G_2R] = gamma;
    v.0[G_22][G_22] = gamma + l2;
    v.0[G_22][G_21] = -m2;
    v.0[G_21][G_22] = -l2;
    v.0[G_21][G_21] = gamma + m2;

    // Row r of M solves M V = F, i.e. V^T m_r^T = f_r^T.
    let mut vt = Matrix6::zero();
    for row in 0..GROUP_COUNT {
        for col in 0..GROUP_COUNT {
            vt.0[row][col] = v.0[col][row];
        }
    }
    let lu = Lu::factor(&vt)?;
    let mut m = Matrix6::zero();
    for row in 0..GROUP_COUNT {
        m.0[row] = lu.solve(&f.0[row]);
        // Tiny negative round-off is possible; M is nonnegative by theory.
        for entry in m.0[row].iter_mut() {
            if *entry < 0.0 && *entry > -1e-14 {
                *entry = 0.0;
            }
        }
    }
    Ok(NextGenMatrices { f, v, m })
}

/// Spectral radius of a nonnegative matrix by power iteration from the
/// all-ones vector, with convergence tested on successive Rayleigh
/// quotients at relative tolerance `tol`.
///
/// Reports non-convergence after [`POWER_ITERATION_MAX`] iterations, which
/// signals a reducible or degenerate matrix; callers fall back to the
/// closed form in that case.
pub fn spectral_radius(m: &Matrix6, tol: f64) -> Result<f64> {
    debug_assert!(m.is_nonnegative());
    let mut x = [1.0; GROUP_COUNT];
    let mut rayleigh_prev = f64::NAN;
    for _ in 0..POWER_ITERATION_MAX {
        let y = m.mul_vec(&x);
        let num: f64 = y.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        let den: f64 = x.iter().map(|v| v * v).sum();
        let rayleigh = num / den;
        let norm = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if norm == 0.0 {
            // x is annihilated by a nilpotent direction: rho = 0.
            return Ok(0.0);
        }
        for (xi, yi) in x.iter_mut().zip(y.iter()) {
            *xi = yi / norm;
        }
        if (rayleigh - rayleigh_prev).abs() <= tol * rayleigh.abs().max(f64::MIN_POSITIVE) {
            return Ok(rayleigh);
        }
        rayleigh_prev = rayleigh;
    }
    Err(Error::NonConvergence(format!(
        "power iteration stalled after {POWER_ITERATION_MAX} iterations"
    )))
}

/// The four coefficients of the 2x2 reduced matrix sharing its Perron root
/// with the full next-generation matrix. They satisfy `q11 + q21 = R1` and
/// `q22 + q12 = R2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedMatrix {
    pub q11: f64,
    pub q12: f64,
    pub q21: f64,
    pub q22: f64,
}

impl ReducedMatrix {
    /// The reduced matrix of the scenario with patch labels exchanged.
    pub fn swap_patches(&self) -> Self {
        Self { q11: self.q22, q12: self.q21, q21: self.q12, q22: self.q11 }
    }
}

/// Closed-form reduced coefficients evaluated at the balanced populations.
pub fn reduced_coefficients(scenario: &Scenario) -> ReducedMatrix {
    let ep = scenario.epidemic();
    let mo = scenario.mobility();
    let eq = scenario.equilibrium();
    let pop = scenario.population();
    let (r1, r2) = ep.intrinsic_reproduction();
    let gamma = ep.gamma();
    let d1 = gamma + mo.lambda1() + mo.mu1();
    let d2 = gamma + mo.lambda2() + mo.mu2();

    let q11 = r1
        * (pop.n1r()
            + eq.n11() * (gamma + mo.mu1()) / d1
            + eq.n21() * (gamma + mo.lambda2()) / d2)
        / eq.n1p();
    let q22 = r2
        * (pop.n2r()
            + eq.n22() * (gamma + mo.mu2()) / d2
            + eq.n12() * (gamma + mo.lambda1()) / d1)
        / eq.n2p();
    let q21 = r1 * (eq.n11() * mo.lambda1() / d1 + eq.n21() * mo.mu2() / d2) / eq.n1p();
    let q12 = r2 * (eq.n12() * mo.mu1() / d1 + eq.n22() * mo.lambda2() / d2) / eq.n2p();
    ReducedMatrix { q11, q12, q21, q22 }
}

/// Epidemic threshold by the closed form: the larger eigenvalue of the
/// reduced matrix, `(q11 + q22 + sqrt((q22 - q11)^2 + 4 q12 q21)) / 2`.
pub fn threshold_explicit(q: &ReducedMatrix) -> f64 {
    let disc = (q.q22 - q.q11) * (q.q22 - q.q11) + 4.0 * q.q12 * q.q21;
    (q.q11 + q.q22 + disc.sqrt()) / 2.0
}

/// Epidemic threshold as the convex combination `alpha R1 + (1 - alpha) R2`
/// where `alpha` is the smallest root of
/// `P(a) = a^2 (R2 - R1) - a (R2 - R1 + q12 + q21) + q12`.
///
/// Requires `R2 > R1`; callers with the opposite ordering must swap patch
/// labels first. Returns `(r12, alpha)` with `alpha` in `[0, 1)`.
pub fn threshold_via_alpha(q: &ReducedMatrix, r1: f64, r2: f64) -> Result<(f64, f64)> {
    if r2 <= r1 || !r1.is_finite() || !r2.is_finite() {
        return Err(Error::HypothesisViolated(format!(
            "threshold_via_alpha requires R2 > R1, got R1 = {r1}, R2 = {r2}"
        )));
    }
    let a = r2 - r1;
    let sum = a + q.q12 + q.q21;
    let disc = sum * sum - 4.0 * a * q.q12;
    // Smallest root in product-of-roots form; robust when q12 is tiny.
    let alpha = 2.0 * q.q12 / (sum + disc.max(0.0).sqrt());
    Ok((alpha * r1 + (1.0 - alpha) * r2, alpha))
}

/// Largest root of `(x - q11)(x - q22) = q12 q21` located by bisection.
///
/// Deflation-free fallback used when the power iteration stalls; a second
/// route to the Perron root that does not share the closed form's algebra.
fn perron_root_bisect(q: &ReducedMatrix) -> f64 {
    let p = |x: f64| (x - q.q11) * (x - q.q22) - q.q12 * q.q21;
    let mut lo = q.q11.max(q.q22);
    if p(lo) == 0.0 {
        return lo;
    }
    // p(lo) <= 0 and p grows without bound to the right.
    let mut hi = lo + q.q12.max(q.q21).max(1.0);
    while p(hi) < 0.0 {
        hi = lo + 2.0 * (hi - lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact threshold of one scenario with its eigensolve cross-check.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdReport {
    /// Threshold from the closed form (authoritative).
    pub r12_explicit: f64,
    /// Threshold from the power iteration on `F V^-1`; equals
    /// `r12_explicit` when the cross-check is skipped for empty groups.
    pub r12_eigen: f64,
    /// Convex weight on the smaller intrinsic number: `r12 = alpha R_min +
    /// (1 - alpha) R_max`, in `[0, 1)`; `0` when `R1 = R2`.
    pub alpha: f64,
    pub reduced: ReducedMatrix,
}

impl ThresholdReport {
    pub fn for_scenario(scenario: &Scenario) -> Result<Self> {
        let reduced = reduced_coefficients(scenario);
        let (r1, r2) = scenario.epidemic().intrinsic_reproduction();
        let r12_explicit = threshold_explicit(&reduced);

        let alpha = if r1 == r2 {
            0.0
        } else if r2 > r1 {
            threshold_via_alpha(&reduced, r1, r2)?.1
        } else {
            threshold_via_alpha(&reduced.swap_patches(), r2, r1)?.1
        };

        let sizes = scenario.group_sizes();
        let total = scenario.population().n1() + scenario.population().n2();
        let any_empty = sizes.iter().any(|&n| n < EMPTY_GROUP_THRESHOLD * total);
        let r12_eigen = if any_empty {
            r12_explicit
        } else {
            let matrices = build_next_generation(scenario)?;
            match spectral_radius(&matrices.m, POWER_ITERATION_TOL) {
                Ok(rho) => rho,
                Err(_) => perron_root_bisect(&reduced),
            }
        };
        if (r12_explicit - r12_eigen).abs() > EIGEN_CROSS_CHECK_TOL * r12_explicit.abs().max(1.0)
        {
            return Err(Error::Consistency(format!(
                "closed form {r12_explicit} and eigensolve {r12_eigen} disagree beyond {EIGEN_CROSS_CHECK_TOL:e}"
            )));
        }
        Ok(Self { r12_explicit, r12_eigen, alpha, reduced })
    }
}
