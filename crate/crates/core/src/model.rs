//! Model parameters, spin configurations and the finite-volume Hamiltonian
//!
//!   H(σ) = −J · Σ_{>x,y<} σ(x)σ(y) − J₁ · Σ_{<x,y>} σ(x)σ(y)
//!
//! with the ternary coupling J on sibling pairs and the binary coupling J₁
//! on nearest-neighbor bonds. Bond sums are accumulated as exact integers
//! (A over sibling pairs, B over edges, C over sites) and multiplied by the
//! couplings at the end.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::tree::{Vertex, Volume};

/// Couplings, inverse temperature and the derived weights θ = e^{2βJ},
/// θ₁ = e^{2βJ₁}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    j: f64,
    j1: f64,
    beta: f64,
    theta: f64,
    theta1: f64,
}

impl ModelParams {
    pub fn new(j: f64, j1: f64, beta: f64) -> Result<Self> {
        if !j.is_finite() || !j1.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter(
                "couplings and beta must be finite".into(),
            ));
        }
        if beta <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive, got {beta}"
            )));
        }
        let theta = (2.0 * beta * j).exp();
        let theta1 = (2.0 * beta * j1).exp();
        if !theta.is_finite() || theta == 0.0 || !theta1.is_finite() || theta1 == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "theta = exp(2*beta*J) not representable for beta={beta}, J={j}, J1={j1}"
            )));
        }
        Ok(ModelParams {
            j,
            j1,
            beta,
            theta,
            theta1,
        })
    }

    /// Canonical lift of a (θ, θ₁) point: β = 1, J = ½ log θ, J₁ = ½ log θ₁.
    /// Everything downstream depends on the couplings only through θ and θ₁.
    pub fn from_thetas(theta: f64, theta1: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0 && theta1.is_finite() && theta1 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "theta and theta1 must be finite and positive, got ({theta}, {theta1})"
            )));
        }
        ModelParams::new(0.5 * theta.ln(), 0.5 * theta1.ln(), 1.0)
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn j1(&self) -> f64 {
        self.j1
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }
}

/// A spin assignment on V_n, stored densely in the volume's vertex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    depth: usize,
    spins: Vec<i8>,
}

impl Configuration {
    /// Builds a configuration from a per-vertex assignment.
    pub fn from_fn(vol: &Volume, f: impl Fn(&Vertex) -> i8) -> Result<Self> {
        let spins: Vec<i8> = vol.vertices().iter().map(&f).collect();
        if let Some(s) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter(format!(
                "spin value {s} not in {{-1,+1}}"
            )));
        }
        Ok(Configuration {
            depth: vol.depth(),
            spins,
        })
    }

    /// Decodes a counter value: bit i set means spin −1 at vertex i, so
    /// counter 0 is the all-plus configuration. This is the enumeration
    /// order used by the exhaustive scans.
    pub fn from_bits(vol: &Volume, bits: u64) -> Self {
        let spins = (0..vol.len())
            .map(|i| if bits >> i & 1 == 1 { -1 } else { 1 })
            .collect();
        Configuration {
            depth: vol.depth(),
            spins,
        }
    }

    pub fn all_plus(vol: &Volume) -> Self {
        Configuration::from_bits(vol, 0)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn spin(&self, index: usize) -> i8 {
        self.spins[index]
    }

    pub fn spin_of(&self, vol: &Volume, v: &Vertex) -> Option<i8> {
        vol.index_of(v).map(|i| self.spins[i])
    }

    /// Global spin flip σ → −σ.
    pub fn flipped(&self) -> Self {
        Configuration {
            depth: self.depth,
            spins: self.spins.iter().map(|s| -s).collect(),
        }
    }
}

/// Exact integer bond and site sums of a configuration:
/// A over ternary (sibling) pairs, B over nearest-neighbor bonds, C over
/// sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConfigStats {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// Computes (A, B, C) for a configuration on `vol`.
pub fn stats(vol: &Volume, cfg: &Configuration) -> ConfigStats {
    assert_eq!(cfg.depth(), vol.depth(), "configuration depth mismatch");
    let s = cfg.spins();
    let a = vol
        .ternary_bonds()
        .iter()
        .map(|&(x, y)| (s[x as usize] * s[y as usize]) as i64)
        .sum();
    let b = vol
        .nn_bonds()
        .iter()
        .map(|&(x, y)| (s[x as usize] * s[y as usize]) as i64)
        .sum();
    let c = s.iter().map(|&x| x as i64).sum();
    ConfigStats { a, b, c }
}

/// H(σ) = −J·A(σ) − J₁·B(σ).
pub fn energy(params: &ModelParams, vol: &Volume, cfg: &Configuration) -> f64 {
    let st = stats(vol, cfg);
    -params.j() * st.a as f64 - params.j1() * st.b as f64
}

/// Nearest-neighbor boundary ∂K and ternary boundary ∂²K of a connected
/// vertex set K within V_n: the outside vertices adjacent to K through an
/// edge, respectively through a sibling pair. Cardinalities are reported,
/// not compared; for K touching the outer shell or attached to the root by
/// a single child, |∂²K| can exceed |∂K|.
pub fn boundary_sets(vol: &Volume, k: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if k.is_empty() {
        return Err(Error::Domain("K must be nonempty".into()));
    }
    let k_set: BTreeSet<usize> = k.iter().copied().collect();
    if let Some(&bad) = k_set.iter().find(|&&i| i >= vol.len()) {
        return Err(Error::Domain(format!(
            "vertex index {bad} outside volume of size {}",
            vol.len()
        )));
    }

    // adjacency from the bond list
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); vol.len()];
    for &(x, y) in vol.nn_bonds() {
        adj[x as usize].push(y as usize);
        adj[y as usize].push(x as usize);
    }

    // connectivity of K in the nearest-neighbor graph
    let start = *k_set.iter().next().unwrap();
    let mut seen = BTreeSet::new();
    seen.insert(start);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if k_set.contains(&y) && seen.insert(y) {
                stack.push(y);
            }
        }
    }
    if seen.len() != k_set.len() {
        return Err(Error::Domain(
            "K is not connected in the nearest-neighbor graph".into(),
        ));
    }

    let mut nn_boundary = BTreeSet::new();
    for &(x, y) in vol.nn_bonds() {
        let (x, y) = (x as usize, y as usize);
        if k_set.contains(&x) && !k_set.contains(&y) {
            nn_boundary.insert(y);
        }
        if k_set.contains(&y) && !k_set.contains(&x) {
            nn_boundary.insert(x);
        }
    }

    let mut ternary_boundary = BTreeSet::new();
    for &(x, y) in vol.ternary_bonds() {
        let (x, y) = (x as usize, y as usize);
        if k_set.contains(&x) && !k_set.contains(&y) {
            ternary_boundary.insert(y);
        }
        if k_set.contains(&y) && !k_set.contains(&x) {
            ternary_boundary.insert(x);
        }
    }

    Ok((
        nn_boundary.into_iter().collect(),
        ternary_boundary.into_iter().collect(),
    ))
}

/// Result of the exhaustive bond-gap scan: gap(σ) = B(σ) − A(σ) compared
/// against the all-plus value gap(σ₊) = B − A.
#[derive(Clone, Debug)]
pub struct BondGapScan {
    pub depth: usize,
    pub configs_checked: u64,
    /// gap(σ₊) = B − A.
    pub gap_plus: i64,
    /// Largest gap(σ) over all configurations.
    pub max_gap: i64,
    /// Largest slack gap(σ₊) − gap(σ).
    pub max_slack: i64,
    /// Smallest slack; negative values are violations of gap(σ) ≤ gap(σ₊).
    pub min_slack: i64,
    /// Number of configurations with gap(σ) > gap(σ₊).
    pub violations: u64,
    /// Counter value of the first violating configuration, if any.
    pub first_violation: Option<u64>,
    /// Whether gap(σ) ≤ gap(σ₊) held for every configuration.
    pub holds: bool,
}

/// Default depth cap for the exhaustive bond-gap scan (2^10 configurations).
pub const BOND_GAP_DEFAULT_CAP: usize = 2;

/// Exhaustively scans all 2^{|V_n|} configurations and compares
/// B(σ) − A(σ) with the all-plus value B − A. Depth 3 (~4.2M
/// configurations) must be requested explicitly with `allow_deep`.
pub fn bond_gap_scan(depth: usize, allow_deep: bool) -> Result<BondGapScan> {
    if depth == 0 {
        return Err(Error::Domain("depth must be at least 1".into()));
    }
    let cap = if allow_deep { 3 } else { BOND_GAP_DEFAULT_CAP };
    if depth > cap {
        return Err(Error::ResourceLimit(format!(
            "bond-gap scan at depth {depth} exceeds cap {cap}; pass allow_deep for depth 3"
        )));
    }
    let vol = Volume::new(depth)?;
    let nn: Vec<(u32, u32)> = vol.nn_bonds().to_vec();
    let ternary: Vec<(u32, u32)> = vol.ternary_bonds().to_vec();
    let gap_plus = nn.len() as i64 - ternary.len() as i64;

    let total: u64 = 1u64 << vol.len();
    let mut max_gap = i64::MIN;
    let mut min_slack = i64::MAX;
    let mut max_slack = i64::MIN;
    let mut violations = 0u64;
    let mut first_violation = None;

    for bits in 0..total {
        // bond product is +1 when the two bits agree, −1 otherwise
        let mut broken_nn = 0i64;
        for &(x, y) in &nn {
            broken_nn += ((bits >> x ^ bits >> y) & 1) as i64;
        }
        let mut broken_ternary = 0i64;
        for &(x, y) in &ternary {
            broken_ternary += ((bits >> x ^ bits >> y) & 1) as i64;
        }
        let b = nn.len() as i64 - 2 * broken_nn;
        let a = ternary.len() as i64 - 2 * broken_ternary;
        let gap = b - a;
        let slack = gap_plus - gap;
        if gap > max_gap {
            max_gap = gap;
        }
        if slack < min_slack {
            min_slack = slack;
        }
        if slack > max_slack {
            max_slack = slack;
        }
        if slack < 0 {
            violations += 1;
            if first_violation.is_none() {
                first_violation = Some(bits);
            }
        }
    }

    Ok(BondGapScan {
        depth,
        configs_checked: total,
        gap_plus,
        max_gap,
        max_slack,
        min_slack,
        violations,
        first_violation,
        holds: violations == 0,
    })
}
