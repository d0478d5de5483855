//! Conserved/primitive state algebra for the 1D gas with `E = rho u^2/2 + rho T/2`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Result, SolverError};

/// Ratio of specific heats for a monatomic 1D gas, `(d + 2) / d` with `d = 1`.
pub const GAMMA: f64 = 3.0;

/// Conserved vector `(rho, rho u, E)`. Also used for moment and flux triples.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConservedState {
    pub rho: f64,
    pub mom: f64,
    pub energy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: f64,
    pub temp: f64,
    pub p: f64,
}

impl ConservedState {
    pub const ZERO: Self = Self {
        rho: 0.0,
        mom: 0.0,
        energy: 0.0,
    };

    pub const fn new(rho: f64, mom: f64, energy: f64) -> Self {
        Self { rho, mom, energy }
    }

    pub fn from_primitive(rho: f64, u: f64, temp: f64) -> Self {
        Self {
            rho,
            mom: rho * u,
            energy: 0.5 * rho * u * u + 0.5 * rho * temp,
        }
    }

    pub fn to_primitive(&self) -> Result<PrimitiveState> {
        let p = self.primitive_unchecked();
        if !(p.rho > 0.0) || !(p.temp > 0.0) || !p.u.is_finite() {
            return Err(SolverError::InvalidState {
                rho: p.rho,
                temperature: p.temp,
            });
        }
        Ok(p)
    }

    /// Primitive variables without the positivity check, for hot loops over
    /// states that were validated earlier in the stage.
    #[inline]
    pub fn primitive_unchecked(&self) -> PrimitiveState {
        let u = self.mom / self.rho;
        let temp = (2.0 * self.energy - self.mom * u) / self.rho;
        PrimitiveState {
            rho: self.rho,
            u,
            temp,
            p: self.rho * temp,
        }
    }

    pub fn is_physical(&self) -> bool {
        let p = self.primitive_unchecked();
        p.rho > 0.0 && p.temp > 0.0 && p.u.is_finite()
    }

    pub fn components(&self) -> [f64; 3] {
        [self.rho, self.mom, self.energy]
    }

    pub fn from_components(c: [f64; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    pub fn max_abs(&self) -> f64 {
        self.rho.abs().max(self.mom.abs()).max(self.energy.abs())
    }

    /// Mirror image across a wall: momentum flips sign.
    pub fn reflected(&self) -> Self {
        Self::new(self.rho, -self.mom, self.energy)
    }
}

impl Add for ConservedState {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.rho + o.rho, self.mom + o.mom, self.energy + o.energy)
    }
}

impl Sub for ConservedState {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.rho - o.rho, self.mom - o.mom, self.energy - o.energy)
    }
}

impl Mul<f64> for ConservedState {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.rho * s, self.mom * s, self.energy * s)
    }
}

impl Neg for ConservedState {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.rho, -self.mom, -self.energy)
    }
}

impl AddAssign for ConservedState {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        self.rho += o.rho;
        self.mom += o.mom;
        self.energy += o.energy;
    }
}

pub fn to_primitive(state: &ConservedState) -> Result<PrimitiveState> {
    state.to_primitive()
}

#[inline]
fn euler_flux_prim(state: &ConservedState, p: &PrimitiveState) -> ConservedState {
    ConservedState::new(state.mom, state.mom * p.u + p.p, (state.energy + p.p) * p.u)
}

/// Physical flux `(rho u, rho u^2 + p, (E + p) u)`.
pub fn euler_flux(state: &ConservedState) -> Result<ConservedState> {
    let p = state.to_primitive()?;
    Ok(euler_flux_prim(state, &p))
}

#[inline]
pub(crate) fn euler_flux_unchecked(state: &ConservedState) -> ConservedState {
    euler_flux_prim(state, &state.primitive_unchecked())
}

/// Odd cubic `B(V) = (V^2 - 3) V / 2` of the 1D heat-flux closure.
#[inline]
pub fn b_function(v: f64) -> f64 {
    0.5 * (v * v - 3.0) * v
}

/// Heat conductivity `kappa = 3/2 rho T` and the viscosity scale `mu = rho T`
/// entering the Burnett correction.
pub fn transport_coefficients(prim: &PrimitiveState) -> (f64, f64) {
    let rt = prim.rho * prim.temp;
    (1.5 * rt, rt)
}

/// Global Lax-Friedrichs flux with dissipation speed `lambda`.
pub fn lax_friedrichs_flux(
    left: &ConservedState,
    right: &ConservedState,
    lambda: f64,
) -> Result<ConservedState> {
    if !(lambda >= 0.0) {
        return Err(SolverError::InvalidArgument(format!(
            "Lax-Friedrichs speed must be non-negative, got {lambda}"
        )));
    }
    let fl = euler_flux(left)?;
    let fr = euler_flux(right)?;
    Ok((fl + fr - (*right - *left) * lambda) * 0.5)
}

#[inline]
pub(crate) fn lax_friedrichs_unchecked(
    left: &ConservedState,
    right: &ConservedState,
    lambda: f64,
) -> ConservedState {
    (euler_flux_unchecked(left) + euler_flux_unchecked(right) - (*right - *left) * lambda) * 0.5
}

#[inline]
pub fn wave_speed(prim: &PrimitiveState) -> f64 {
    prim.u.abs() + (GAMMA * prim.temp).sqrt()
}

/// `max |u| + sqrt(gamma T)` over all states.
pub fn max_wave_speed<'a>(states: impl IntoIterator<Item = &'a ConservedState>) -> Result<f64> {
    let mut lam: f64 = 0.0;
    for s in states {
        lam = lam.max(wave_speed(&s.to_primitive()?));
    }
    Ok(lam)
}

/// Fluid heat flux `eps * kappa * T_x`.
pub fn heat_flux_fluid(prim: &PrimitiveState, temp_x: f64, eps: f64) -> f64 {
    let (kappa, _) = transport_coefficients(prim);
    eps * kappa * temp_x
}
