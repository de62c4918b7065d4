//! Fast-mixing approximation of the threshold and its minimization over
//! the commuter sizes.
//!
//! When commuting is fast compared to recovery, setting `gamma = 0` inside
//! the reduced coefficients gives the approximation `R~12`, which depends
//! on mobility only through `eta_i = lambda_i / (lambda_i + mu_i)`. The
//! map `N2c -> R~12` is always decreasing (for `R2 > R1`); the map
//! `N1c -> R~12` is decreasing, increasing, or decreasing-then-increasing
//! with a single interior minimum, and the minimizer over the box
//! `[0, N1] x [0, N2]` always sits at `N2c = N2`.

use crate::error::{Error, Result};
use crate::model::{MobilityParams, Scenario};
use crate::ngm::reduced_coefficients;

/// Golden-section tolerance on the argument, relative to `N1`.
pub const MINIMIZER_TOL: f64 = 1e-9;

/// Central-difference step for endpoint derivative signs, relative to `N1`.
const ENDPOINT_DIFF_STEP: f64 = 1e-6;

/// Commuting fractions `eta_i = lambda_i / (lambda_i + mu_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaPair {
    pub eta1: f64,
    pub eta2: f64,
}

/// `eta_i = lambda_i / (lambda_i + mu_i)`; well defined because
/// [`MobilityParams`] guarantees `lambda_i + mu_i > 0`.
pub fn eta(mobility: &MobilityParams) -> EtaPair {
    EtaPair {
        eta1: mobility.lambda1() / (mobility.lambda1() + mobility.mu1()),
        eta2: mobility.lambda2() / (mobility.lambda2() + mobility.mu2()),
    }
}

/// Fast-mixing off-diagonal coefficients (`gamma = 0` in the reduced
/// coefficients).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxCoefficients {
    pub tq12: f64,
    pub tq21: f64,
}

/// `tq21 = R1 [(1-eta1) eta1 N1c + eta2 (1-eta2) N2c] / (N1 - eta1 N1c + eta2 N2c)`
/// and symmetrically for `tq12`.
pub fn approx_coefficients(scenario: &Scenario) -> Result<ApproxCoefficients> {
    let t = ApproxTemplate::new(scenario);
    t.coefficients(scenario.population().n1c(), scenario.population().n2c())
}

/// Fast-mixing threshold `(r12_tilde, alpha_tilde)`.
///
/// Patch labels are swapped internally when `R1 > R2`; `alpha_tilde` is
/// always the convex weight on the smaller intrinsic number. Ties
/// (`R1 = R2`) collapse to `R` directly.
pub fn approx_threshold(scenario: &Scenario) -> Result<(f64, f64)> {
    let t = ApproxTemplate::new(scenario);
    t.threshold(scenario.population().n1c(), scenario.population().n2c())
}

/// Sufficient condition for `N1c -> R~12` to be increasing at the point:
/// `eta2 (1-eta2) N2c > (1-eta1)(N2 - eta2 N2c)`.
///
/// Reads the patches in the caller's labeling; meaningful under the
/// ordering hypothesis `R2 > R1`.
pub fn increase_condition_a(scenario: &Scenario) -> bool {
    let e = eta(scenario.mobility());
    let n2 = scenario.population().n2();
    let n2c = scenario.population().n2c();
    e.eta2 * (1.0 - e.eta2) * n2c > (1.0 - e.eta1) * (n2 - e.eta2 * n2c)
}

/// The sign indicators `A` and `B`: both negative forces `N1c -> R~12`
/// increasing at the point, both positive forces it decreasing.
///
/// `A < 0` is equivalent to `alpha~ > 1/2` and `B < 0` to
/// `d tq12/d N1c < d tq21/d N1c`.
pub fn sign_indicators_ab(scenario: &Scenario) -> Result<(f64, f64)> {
    let e = eta(scenario.mobility());
    let pop = scenario.population();
    let (r1, r2) = scenario.epidemic().intrinsic_reproduction();
    let (n1, n2) = (pop.n1(), pop.n2());
    let (n1c, n2c) = (pop.n1c(), pop.n2c());
    let den2 = n2 - e.eta2 * n2c + e.eta1 * n1c; // N2p at the balanced split
    let den1 = n1 - e.eta1 * n1c + e.eta2 * n2c; // N1p
    if den1 <= 0.0 || den2 <= 0.0 {
        return Err(Error::InvalidParameter(
            "sign indicators undefined: a patch has no population present".into(),
        ));
    }
    let a = r2 * (n2 / 2.0 - e.eta1 * (0.5 - e.eta1) * n1c - (1.5 - e.eta2) * e.eta2 * n2c) / den2
        - r1 * (n1 / 2.0 - (1.5 - e.eta1) * e.eta1 * n1c - e.eta2 * (0.5 - e.eta2) * n2c) / den1;
    let b = r2 * ((1.0 - e.eta1) * (n2 - e.eta2 * n2c) - e.eta2 * (1.0 - e.eta2) * n2c)
        / (den2 * den2)
        - r1 * ((1.0 - e.eta1) * (n1 + e.eta2 * n2c) + e.eta2 * (1.0 - e.eta2) * n2c)
            / (den1 * den1);
    Ok((a, b))
}

/// Shape of `N1c -> R~12(N1c, n2c)` on `[0, N1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MonotonicityClass {
    Decreasing,
    Increasing,
    /// Decreasing then increasing, with the interior minimizer.
    Unimodal { n1c_star: f64 },
}

/// Classifies `N1c -> R~12(N1c, n2c)` by the derivative signs at the two
/// endpoints (central differences); a `(-, +)` pattern is unimodal and the
/// interior minimizer is located by golden-section search. The pattern
/// `(+, -)` cannot occur and raises a consistency error.
///
/// Requires `R2 > R1` and `mu_i > 0` for both patches (the fast-mixing
/// fractions must satisfy `eta_i < 1`).
pub fn classify_monotonicity(scenario: &Scenario, n2c: f64) -> Result<MonotonicityClass> {
    let t = ApproxTemplate::checked(scenario)?;
    let n2 = scenario.population().n2();
    if !(0.0..=n2).contains(&n2c) {
        return Err(Error::InvalidParameter(format!(
            "N2c must lie in [0, N2 = {n2}], got {n2c}"
        )));
    }
    t.classify(n2c)
}

/// Which bounds of the search box the minimizer sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BoundaryFlags {
    pub n1c_at_lower: bool,
    pub n1c_at_upper: bool,
    pub n2c_at_lower: bool,
    pub n2c_at_upper: bool,
}

/// Minimizer of the threshold over `(N1c, N2c) in [0, N1] x [0, N2]`.
#[derive(Debug, Clone, Copy)]
pub struct MinimizerResult {
    pub n1c_star: f64,
    pub n2c_star: f64,
    /// Exact threshold at the optimum.
    pub r12_min: f64,
    /// Fast-mixing threshold at the optimum (the search objective), kept
    /// next to the exact value so the approximation gap is visible.
    pub r12_min_approx: f64,
    pub boundary: BoundaryFlags,
}

/// Minimizes the threshold over the commuter sizes.
///
/// `N2c* = N2` always (the map is decreasing in `N2c`); `N1c*` follows the
/// classification at `N2c = N2`: `N1` when decreasing, `0` when increasing,
/// the golden-section minimizer when unimodal. The reported `r12_min` is
/// the exact threshold at the optimum; the approximation is used only to
/// drive the search.
///
/// Requires `R2 > R1`, `N1 R2 > N2 R1`, and `mu_i > 0` for both patches.
pub fn minimize_threshold(scenario: &Scenario) -> Result<MinimizerResult> {
    let t = ApproxTemplate::checked(scenario)?;
    let (n1, n2) = (t.n1, t.n2);
    if n1 * t.r2 <= n2 * t.r1 {
        return Err(Error::HypothesisViolated(format!(
            "minimize_threshold requires N1 R2 > N2 R1, got {} <= {}",
            n1 * t.r2,
            n2 * t.r1
        )));
    }
    let mut boundary = BoundaryFlags { n2c_at_upper: true, ..Default::default() };
    let n1c_star = match t.classify(n2)? {
        MonotonicityClass::Decreasing => {
            boundary.n1c_at_upper = true;
            n1
        }
        MonotonicityClass::Increasing => {
            boundary.n1c_at_lower = true;
            0.0
        }
        MonotonicityClass::Unimodal { n1c_star } => n1c_star,
    };
    let optimum = scenario.with_commuters(n1c_star, n2)?;
    let r12_min = crate::ngm::threshold_explicit(&reduced_coefficients(&optimum));
    let (r12_min_approx, _) = t.threshold(n1c_star, n2)?;
    Ok(MinimizerResult { n1c_star, n2c_star: n2, r12_min, r12_min_approx, boundary })
}

/// Fast-mixing threshold as a function of the commuter sizes, with all
/// other scenario parameters frozen. Evaluation slightly outside the box is
/// allowed (the rational expressions extend smoothly); used for endpoint
/// finite differences.
pub(crate) struct ApproxTemplate {
    r1: f64,
    r2: f64,
    eta1: f64,
    eta2: f64,
    n1: f64,
    n2: f64,
}

impl ApproxTemplate {
    pub(crate) fn new(scenario: &Scenario) -> Self {
        let (r1, r2) = scenario.epidemic().intrinsic_reproduction();
        let e = eta(scenario.mobility());
        Self {
            r1,
            r2,
            eta1: e.eta1,
            eta2: e.eta2,
            n1: scenario.population().n1(),
            n2: scenario.population().n2(),
        }
    }

    /// As [`Self::new`], additionally enforcing `R2 > R1` and interior
    /// `eta` (so every denominator stays positive across the whole box).
    fn checked(scenario: &Scenario) -> Result<Self> {
        let t = Self::new(scenario);
        if t.r2 <= t.r1 {
            return Err(Error::HypothesisViolated(format!(
                "requires R2 > R1, got R1 = {}, R2 = {}",
                t.r1, t.r2
            )));
        }
        if t.eta1 >= 1.0 || t.eta2 >= 1.0 {
            return Err(Error::HypothesisViolated(
                "requires mu1 > 0 and mu2 > 0 (eta_i < 1) for the fast-mixing analysis".into(),
            ));
        }
        Ok(t)
    }

    fn coefficients(&self, n1c: f64, n2c: f64) -> Result<ApproxCoefficients> {
        let num = self.eta1 * (1.0 - self.eta1) * n1c + self.eta2 * (1.0 - self.eta2) * n2c;
        let den1 = self.n1 - self.eta1 * n1c + self.eta2 * n2c;
        let den2 = self.n2 - self.eta2 * n2c + self.eta1 * n1c;
        if den1 <= 0.0 || den2 <= 0.0 {
            return Err(Error::InvalidParameter(
                "fast-mixing coefficients undefined: a patch has no population present".into(),
            ));
        }
        Ok(ApproxCoefficients { tq12: self.r2 * num / den2, tq21: self.r1 * num / den1 })
    }

    /// `(r12_tilde, alpha_tilde)` at the point, in canonical label order.
    pub(crate) fn threshold(&self, n1c: f64, n2c: f64) -> Result<(f64, f64)> {
        let q = self.coefficients(n1c, n2c)?;
        let (r_lo, r_hi, q_lo_hi, q_hi_lo) = if self.r2 >= self.r1 {
            (self.r1, self.r2, q.tq12, q.tq21)
        } else {
            (self.r2, self.r1, q.tq21, q.tq12)
        };
        if r_lo == r_hi {
            // Collapse: the threshold equals the common intrinsic number.
            let total = q_lo_hi + q_hi_lo;
            let alpha = if total > 0.0 { q_lo_hi / total } else { 0.0 };
            return Ok((r_lo, alpha));
        }
        let a = r_hi - r_lo;
        let sum = a + q_lo_hi + q_hi_lo;
        let disc = sum * sum - 4.0 * a * q_lo_hi;
        let alpha = 2.0 * q_lo_hi / (sum + disc.max(0.0).sqrt());
        Ok((alpha * r_lo + (1.0 - alpha) * r_hi, alpha))
    }

    fn value(&self, n1c: f64, n2c: f64) -> Result<f64> {
        Ok(self.threshold(n1c, n2c)?.0)
    }

    fn classify(&self, n2c: f64) -> Result<MonotonicityClass> {
        let h = ENDPOINT_DIFF_STEP * self.n1;
        let d_left = (self.value(h, n2c)? - self.value(-h, n2c)?) / (2.0 * h);
        let d_right = (self.value(self.n1 + h, n2c)? - self.value(self.n1 - h, n2c)?) / (2.0 * h);
        if d_left < 0.0 {
            if d_right > 0.0 {
                let n1c_star = self.golden_section(n2c, MINIMIZER_TOL * self.n1)?;
                Ok(MonotonicityClass::Unimodal { n1c_star })
            } else {
                Ok(MonotonicityClass::Decreasing)
            }
        } else if d_right >= 0.0 {
            Ok(MonotonicityClass::Increasing)
        } else {
            Err(Error::Consistency(format!(
                "endpoint derivative signs (+, -) are impossible for a map that is \
                 decreasing, increasing, or unimodal (d_left = {d_left:e}, d_right = {d_right:e})"
            )))
        }
    }

    /// Golden-section search for the minimum of `n1c -> r12~` on `[0, N1]`.
    fn golden_section(&self, n2c: f64, tol: f64) -> Result<f64> {
        const INV_PHI: f64 = 0.618_033_988_749_895;
        let mut a = 0.0;
        let mut b = self.n1;
        let mut x1 = b - INV_PHI * (b - a);
        let mut x2 = a + INV_PHI * (b - a);
        let mut f1 = self.value(x1, n2c)?;
        let mut f2 = self.value(x2, n2c)?;
        while b - a > tol {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - INV_PHI * (b - a);
                f1 = self.value(x1, n2c)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + INV_PHI * (b - a);
                f2 = self.value(x2, n2c)?;
            }
        }
        Ok(0.5 * (a + b))
    }

    /// Closed-form `d tq12 / d N1c`; negative exactly when
    /// [`increase_condition_a`] holds.
    #[cfg(test)]
    fn dq12_dn1c(&self, n1c: f64, n2c: f64) -> f64 {
        let den2 = self.n2 - self.eta2 * n2c + self.eta1 * n1c;
        self.r2 * self.eta1
            * ((1.0 - self.eta1) * (self.n2 - self.eta2 * n2c)
                - self.eta2 * (1.0 - self.eta2) * n2c)
            / (den2 * den2)
    }

    /// Closed-form `d tq21 / d N1c`; always positive.
    #[cfg(test)]
    fn dq21_dn1c(&self, n1c: f64, n2c: f64) -> f64 {
        let den1 = self.n1 - self.eta1 * n1c + self.eta2 * n2c;
        self.r1 * self.eta1
            * ((1.0 - self.eta1) * (self.n1 + self.eta2 * n2c)
                + self.eta2 * (1.0 - self.eta2) * n2c)
            / (den1 * den1)
    }
}
