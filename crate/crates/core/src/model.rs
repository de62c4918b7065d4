//! Parameter and state types for the two-patch SIR commuter model.
//!
//! Each patch hosts a permanently resident sub-population and a commuter
//! sub-population that travels to the other patch and back. The six
//! population groups are ordered `(1r, 11, 12, 2r, 22, 21)` everywhere:
//! residents of patch 1, commuters of patch 1 at home, commuters of
//! patch 1 visiting patch 2, and the mirrored three groups for patch 2.

use crate::error::{Error, Result};

/// Number of population groups.
pub const GROUP_COUNT: usize = 6;

/// Canonical group order used by state vectors and all matrices.
pub const GROUP_LABELS: [&str; GROUP_COUNT] = ["1r", "11", "12", "2r", "22", "21"];

/// Indices into the canonical group order.
pub const G_1R: usize = 0;
pub const G_11: usize = 1;
pub const G_12: usize = 2;
pub const G_2R: usize = 3;
pub const G_22: usize = 4;
pub const G_21: usize = 5;

/// Transmission and recovery rates (1/time).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpidemicParams {
    beta1: f64,
    beta2: f64,
    gamma: f64,
}

impl EpidemicParams {
    /// Requires `beta1 >= 0`, `beta2 >= 0`, `gamma > 0`.
    pub fn new(beta1: f64, beta2: f64, gamma: f64) -> Result<Self> {
        if !beta1.is_finite() || beta1 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "beta1 must be finite and >= 0, got {beta1}"
            )));
        }
        if !beta2.is_finite() || beta2 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "beta2 must be finite and >= 0, got {beta2}"
            )));
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        Ok(Self { beta1, beta2, gamma })
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn beta2(&self) -> f64 {
        self.beta2
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Intrinsic reproduction numbers `(R1, R2)` of the isolated patches,
    /// `Ri = beta_i / gamma`.
    pub fn intrinsic_reproduction(&self) -> (f64, f64) {
        (self.beta1 / self.gamma, self.beta2 / self.gamma)
    }
}

/// Intrinsic reproduction numbers `(R1, R2)` with `Ri = beta_i / gamma`.
pub fn intrinsic_reproduction(epidemic: &EpidemicParams) -> (f64, f64) {
    epidemic.intrinsic_reproduction()
}

/// Commuting departure (`lambda_i`) and return (`mu_i`) rates (1/time).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityParams {
    lambda1: f64,
    mu1: f64,
    lambda2: f64,
    mu2: f64,
}

impl MobilityParams {
    /// Requires all rates `>= 0` and `lambda_i + mu_i > 0` for each patch.
    pub fn new(lambda1: f64, mu1: f64, lambda2: f64, mu2: f64) -> Result<Self> {
        for (name, v) in [
            ("lambda1", lambda1),
            ("mu1", mu1),
            ("lambda2", lambda2),
            ("mu2", mu2),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if lambda1 + mu1 <= 0.0 {
            return Err(Error::InvalidParameter(
                "lambda1 + mu1 must be positive".into(),
            ));
        }
        if lambda2 + mu2 <= 0.0 {
            return Err(Error::InvalidParameter(
                "lambda2 + mu2 must be positive".into(),
            ));
        }
        Ok(Self { lambda1, mu1, lambda2, mu2 })
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }
}

/// Permanently resident (`N_ir`) and total commuter (`N_ic`) population sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationSplit {
    n1r: f64,
    n1c: f64,
    n2r: f64,
    n2c: f64,
}

impl PopulationSplit {
    /// Requires all sizes `>= 0` and `N_i = N_ir + N_ic > 0` for each patch.
    pub fn new(n1r: f64, n1c: f64, n2r: f64, n2c: f64) -> Result<Self> {
        for (name, v) in [("N1r", n1r), ("N1c", n1c), ("N2r", n2r), ("N2c", n2c)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if n1r + n1c <= 0.0 {
            return Err(Error::InvalidParameter("N1 = N1r + N1c must be positive".into()));
        }
        if n2r + n2c <= 0.0 {
            return Err(Error::InvalidParameter("N2 = N2r + N2c must be positive".into()));
        }
        Ok(Self { n1r, n1c, n2r, n2c })
    }

    /// Split defined by total sizes and resident proportions `p_i = N_ir / N_i`.
    pub fn from_proportions(n1: f64, n2: f64, p1: f64, p2: f64) -> Result<Self> {
        for (name, p) in [("p1", p1), ("p2", p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, 1], got {p}"
                )));
            }
        }
        Self::new(p1 * n1, (1.0 - p1) * n1, p2 * n2, (1.0 - p2) * n2)
    }

    pub fn n1r(&self) -> f64 {
        self.n1r
    }

    pub fn n1c(&self) -> f64 {
        self.n1c
    }

    pub fn n2r(&self) -> f64 {
        self.n2r
    }

    pub fn n2c(&self) -> f64 {
        self.n2c
    }

    /// Total population housed in patch 1.
    pub fn n1(&self) -> f64 {
        self.n1r + self.n1c
    }

    /// Total population housed in patch 2.
    pub fn n2(&self) -> f64 {
        self.n2r + self.n2c
    }

    /// Resident proportions `(p1, p2)` with `p_i = N_ir / N_i`.
    pub fn resident_proportions(&self) -> (f64, f64) {
        (self.n1r / self.n1(), self.n2r / self.n2())
    }
}

/// Balanced commuter sub-population sizes and the resulting per-patch
/// present populations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumPopulations {
    n11: f64,
    n12: f64,
    n22: f64,
    n21: f64,
    n1p: f64,
    n2p: f64,
}

impl EquilibriumPopulations {
    pub fn n11(&self) -> f64 {
        self.n11
    }

    pub fn n12(&self) -> f64 {
        self.n12
    }

    pub fn n22(&self) -> f64 {
        self.n22
    }

    pub fn n21(&self) -> f64 {
        self.n21
    }

    /// Population present in patch 1: `N1p = N1r + N11 + N21`.
    pub fn n1p(&self) -> f64 {
        self.n1p
    }

    /// Population present in patch 2: `N2p = N2r + N22 + N12`.
    pub fn n2p(&self) -> f64 {
        self.n2p
    }

    /// Balanced sizes in canonical group order `(1r, 11, 12, 2r, 22, 21)`.
    pub fn group_sizes(&self, population: &PopulationSplit) -> [f64; GROUP_COUNT] {
        [
            population.n1r(),
            self.n11,
            self.n12,
            population.n2r(),
            self.n22,
            self.n21,
        ]
    }
}

/// Balanced commuter split: `N_ii = mu_i/(lambda_i+mu_i) N_ic`,
/// `N_ij = lambda_i/(lambda_i+mu_i) N_ic`, the stationary point of the
/// linear commuter-exchange subsystem.
///
/// Rejects `lambda_i + mu_i = 0` with commuters present, and splits that
/// leave a patch with no population present.
pub fn equilibrium_split(
    mobility: &MobilityParams,
    population: &PopulationSplit,
) -> Result<EquilibriumPopulations> {
    let split_pair = |lambda: f64, mu: f64, nc: f64, patch: usize| -> Result<(f64, f64)> {
        if lambda + mu <= 0.0 {
            if nc > 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "balanced split undefined: lambda{patch} + mu{patch} = 0 with N{patch}c > 0"
                )));
            }
            return Ok((0.0, 0.0));
        }
        Ok((mu / (lambda + mu) * nc, lambda / (lambda + mu) * nc))
    };
    let (n11, n12) = split_pair(mobility.lambda1(), mobility.mu1(), population.n1c(), 1)?;
    let (n22, n21) = split_pair(mobility.lambda2(), mobility.mu2(), population.n2c(), 2)?;
    let n1p = population.n1r() + n11 + n21;
    let n2p = population.n2r() + n22 + n12;
    if n1p <= 0.0 {
        return Err(Error::InvalidParameter(
            "no population present in patch 1 at the balanced split".into(),
        ));
    }
    if n2p <= 0.0 {
        return Err(Error::InvalidParameter(
            "no population present in patch 2 at the balanced split".into(),
        ));
    }
    Ok(EquilibriumPopulations { n11, n12, n22, n21, n1p, n2p })
}

/// One complete model instance: epidemic rates, mobility rates and the
/// population split, with the balanced commuter populations precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    epidemic: EpidemicParams,
    mobility: MobilityParams,
    population: PopulationSplit,
    equilibrium: EquilibriumPopulations,
}

impl Scenario {
    pub fn new(
        epidemic: EpidemicParams,
        mobility: MobilityParams,
        population: PopulationSplit,
    ) -> Result<Self> {
        let equilibrium = equilibrium_split(&mobility, &population)?;
        Ok(Self { epidemic, mobility, population, equilibrium })
    }

    pub fn epidemic(&self) -> &EpidemicParams {
        &self.epidemic
    }

    pub fn mobility(&self) -> &MobilityParams {
        &self.mobility
    }

    pub fn population(&self) -> &PopulationSplit {
        &self.population
    }

    pub fn equilibrium(&self) -> &EquilibriumPopulations {
        &self.equilibrium
    }

    /// Same rates and patch totals, different commuter sizes.
    pub fn with_commuters(&self, n1c: f64, n2c: f64) -> Result<Self> {
        let n1 = self.population.n1();
        let n2 = self.population.n2();
        if !(0.0..=n1).contains(&n1c) {
            return Err(Error::InvalidParameter(format!(
                "N1c must lie in [0, N1 = {n1}], got {n1c}"
            )));
        }
        if !(0.0..=n2).contains(&n2c) {
            return Err(Error::InvalidParameter(format!(
                "N2c must lie in [0, N2 = {n2}], got {n2c}"
            )));
        }
        let population = PopulationSplit::new(n1 - n1c, n1c, n2 - n2c, n2c)?;
        Self::new(self.epidemic, self.mobility, population)
    }

    /// Same rates and patch totals, resident proportions `(p1, p2)`.
    pub fn with_proportions(&self, p1: f64, p2: f64) -> Result<Self> {
        let population = PopulationSplit::from_proportions(
            self.population.n1(),
            self.population.n2(),
            p1,
            p2,
        )?;
        Self::new(self.epidemic, self.mobility, population)
    }

    /// Balanced group sizes in canonical order.
    pub fn group_sizes(&self) -> [f64; GROUP_COUNT] {
        self.equilibrium.group_sizes(&self.population)
    }
}

/// The 18 compartment sizes: susceptible, infected and recovered for each
/// of the six groups, in canonical group order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub s: [f64; GROUP_COUNT],
    pub i: [f64; GROUP_COUNT],
    pub r: [f64; GROUP_COUNT],
}

impl StateVector {
    pub fn zero() -> Self {
        Self { s: [0.0; GROUP_COUNT], i: [0.0; GROUP_COUNT], r: [0.0; GROUP_COUNT] }
    }

    /// Disease-free equilibrium: everyone susceptible at the balanced split.
    pub fn disease_free(scenario: &Scenario) -> Self {
        Self { s: scenario.group_sizes(), i: [0.0; GROUP_COUNT], r: [0.0; GROUP_COUNT] }
    }

    /// Moves the fraction `seed_fraction` of each group's susceptibles into
    /// the infected compartment, starting from the disease-free equilibrium.
    pub fn seeded(scenario: &Scenario, seed_fraction: f64) -> Result<Self> {
        if !(seed_fraction > 0.0 && seed_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "seed fraction must lie in (0, 1], got {seed_fraction}"
            )));
        }
        let sizes = scenario.group_sizes();
        let mut state = Self::zero();
        state.i = std::array::from_fn(|g| seed_fraction * sizes[g]);
        state.s = std::array::from_fn(|g| sizes[g] - state.i[g]);
        Ok(state)
    }

    pub fn total_infected(&self) -> f64 {
        self.i.iter().sum()
    }

    pub fn total_susceptible(&self) -> f64 {
        self.s.iter().sum()
    }

    /// `S_g + I_g + R_g` for each group.
    pub fn group_totals(&self) -> [f64; GROUP_COUNT] {
        std::array::from_fn(|g| self.s[g] + self.i[g] + self.r[g])
    }

    /// Conserved home totals `(N1r, N1c, N2r, N2c)`: resident groups alone,
    /// commuter groups summed over both locations.
    pub fn home_totals(&self) -> [f64; 4] {
        let t = self.group_totals();
        [t[G_1R], t[G_11] + t[G_12], t[G_2R], t[G_22] + t[G_21]]
    }

    pub fn min_component(&self) -> f64 {
        let mut m = f64::INFINITY;
        for g in 0..GROUP_COUNT {
            m = m.min(self.s[g]).min(self.i[g]).min(self.r[g]);
        }
        m
    }

    /// Flat layout `[S; I; R]`, each block in canonical group order.
    pub fn to_flat(&self) -> [f64; 18] {
        let mut y = [0.0; 18];
        y[..6].copy_from_slice(&self.s);
        y[6..12].copy_from_slice(&self.i);
        y[12..].copy_from_slice(&self.r);
        y
    }

    pub fn from_flat(y: &[f64; 18]) -> Self {
        let mut state = Self::zero();
        state.s.copy_from_slice(&y[..6]);
        state.i.copy_from_slice(&y[6..12]);
        state.r.copy_from_slice(&y[12..]);
        state
    }
}

/// Time derivative of the 18 compartments.
///
/// The force of infection in patch i is `beta_i (I_ir + I_ii + I_ji) / N_ip`
/// with the constant present populations of the balanced split in the
/// denominator.
pub fn ode_rhs(scenario: &Scenario, state: &StateVector) -> StateVector {
    let eq = scenario.equilibrium();
    debug_assert!(eq.n1p() > 0.0 && eq.n2p() > 0.0);
    let ep = scenario.epidemic();
    let mo = scenario.mobility();
    let gamma = ep.gamma();
    let (l1, m1, l2, m2) = (mo.lambda1(), mo.mu1(), mo.lambda2(), mo.mu2());

    let foi1 = ep.beta1() * (state.i[G_1R] + state.i[G_11] + state.i[G_21]) / eq.n1p();
    let foi2 = ep.beta2() * (state.i[G_2R] + state.i[G_22] + state.i[G_12]) / eq.n2p();

    let s = &state.s;
    let i = &state.i;
    let r = &state.r;
    let mut d = StateVector::zero();

    // residents
    d.s[G_1R] = -foi1 * s[G_1R];
    d.i[G_1R] = foi1 * s[G_1R] - gamma * i[G_1R];
    d.r[G_1R] = gamma * i[G_1R];
    d.s[G_2R] = -foi2 * s[G_2R];
    d.i[G_2R] = foi2 * s[G_2R] - gamma * i[G_2R];
    d.r[G_2R] = gamma * i[G_2R];

    // commuters of patch 1: at home (exposed to patch 1), away (exposed to patch 2)
    d.s[G_11] = -foi1 * s[G_11] - l1 * s[G_11] + m1 * s[G_12];
    d.i[G_11] = foi1 * s[G_11] - gamma * i[G_11] - l1 * i[G_11] + m1 * i[G_12];
    d.r[G_11] = gamma * i[G_11] - l1 * r[G_11] + m1 * r[G_12];
    d.s[G_12] = -foi2 * s[G_12] + l1 * s[G_11] - m1 * s[G_12];
    d.i[G_12] = foi2 * s[G_12] - gamma * i[G_12] + l1 * i[G_11] - m1 * i[G_12];
    d.r[G_12] = gamma * i[G_12] + l1 * r[G_11] - m1 * r[G_12];

    // commuters of patch 2
    d.s[G_22] = -foi2 * s[G_22] - l2 * s[G_22] + m2 * s[G_21];
    d.i[G_22] = foi2 * s[G_22] - gamma * i[G_22] - l2 * i[G_22] + m2 * i[G_21];
    d.r[G_22] = gamma * i[G_22] - l2 * r[G_22] + m2 * r[G_21];
    d.s[G_21] = -foi1 * s[G_21] + l2 * s[G_22] - m2 * s[G_21];
    d.i[G_21] = foi1 * s[G_21] - gamma * i[G_21] + l2 * i[G_22] - m2 * i[G_21];
    d.r[G_21] = gamma * i[G_21] + l2 * r[G_22] - m2 * r[G_21];

    d
}
