//! Exponent lattice enumeration and truncated series arithmetic.
//!
//! Exponent points are the fractional lattice points indexing I-function
//! summands. Series are finite maps from (y-exponent vector, z-power) to
//! cohomology classes, truncated by per-variable exponent caps. Every series
//! carries a trusted region: the componentwise bound below which its stored
//! terms are exact. Since all enumeration exponents are nonnegative, the
//! trusted region of a product is the componentwise minimum of the factors'.

use crate::coh::{CohClass, RelationIdeal};
use crate::error::{Error, Result};
use crate::fan::{BoxElement, ExtendedStackyFan};
use crate::lattice::RatVector;
use crate::num::{is_integer, rat, Rat};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

/// A point of the scaled relation lattice with its cached pairings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentPoint {
    /// Pairing coordinates <D_i, d> over rays then extensions.
    pub pairings: RatVector,
    /// <p_a, d> per basis row; these are the y-exponents.
    pub y_exponents: RatVector,
    /// <rho, d>: sum of all pairings.
    pub degree: Rat,
    /// Sector index of the reduction v(d) in the fan's box list.
    pub sector: usize,
    /// Sorted indices i with <D_i, d> a nonnegative integer.
    pub integrality_pattern: Vec<usize>,
}

impl ExponentPoint {
    pub fn is_origin(&self) -> bool {
        self.pairings.iter().all(|c| c.is_zero())
    }

    /// All pairings integral (the point lies in the unscaled lattice).
    pub fn is_integral(&self) -> bool {
        self.pairings.iter().all(is_integer)
    }
}

/// Budget guard for enumeration grids.
pub const DEFAULT_TERM_BUDGET: u128 = 2_000_000;

/// Enumerate every exponent point with componentwise y-exponents within
/// `caps` whose integrality pattern is an anticone. The scan walks the
/// y-exponent grid (1/M) Z_{>=0} up to the caps, M being the fan's scale.
pub fn enumerate_keff(
    fan: &ExtendedStackyFan,
    caps: &RatVector,
    budget: u128,
) -> Result<Vec<ExponentPoint>> {
    let vars = fan.basis_len();
    assert_eq!(caps.len(), vars, "one cap per mirror variable");
    if caps.iter().any(|c| c.is_negative()) {
        return Err(Error::Validation {
            invariant: "caps nonnegative".into(),
            detail: "negative exponent cap".into(),
        });
    }
    let scale = Rat::from_integer(fan.scale.clone());
    // steps per variable: floor(M * cap) + 1 grid values
    let mut steps: Vec<u128> = Vec::with_capacity(vars);
    let mut grid: u128 = 1;
    for cap in caps {
        let s = (cap * &scale).floor().to_integer();
        let s: u128 = s.try_into().map_err(|_| Error::CapsExplosion { terms: u128::MAX, budget })?;
        let s = s + 1;
        steps.push(s);
        grid = grid.saturating_mul(s);
        if grid > budget {
            return Err(Error::CapsExplosion { terms: grid, budget });
        }
    }

    let total = fan.pairing_len();
    let mut out = Vec::new();
    let mut idx = vec![0u128; vars];
    loop {
        // t_a = idx_a / M; d = sum t_a * dual_kernel_a
        let t: RatVector = idx
            .iter()
            .map(|&k| Rat::new((k as i128).into(), fan.scale.clone()))
            .collect();
        let mut pairings = vec![rat(0); total];
        for (a, ta) in t.iter().enumerate() {
            if ta.is_zero() {
                continue;
            }
            for (i, p) in pairings.iter_mut().enumerate() {
                *p += ta * &fan.dual_kernel[a][i];
            }
        }
        let pattern: Vec<usize> = (0..total)
            .filter(|&i| is_integer(&pairings[i]) && !pairings[i].is_negative())
            .collect();
        if fan.is_anticone(&pattern) {
            let boxed: BoxElement = fan.reduction(&pairings)?;
            let sector = fan.sector_index(&boxed.vector).ok_or(Error::NotABox)?;
            let degree = fan.degree(&pairings);
            out.push(ExponentPoint {
                pairings,
                y_exponents: t,
                degree,
                sector,
                integrality_pattern: pattern,
            });
        }
        // odometer
        let mut k = 0;
        loop {
            if k == vars {
                break;
            }
            idx[k] += 1;
            if idx[k] < steps[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == vars {
            break;
        }
    }
    out.sort_by(|a, b| a.y_exponents.cmp(&b.y_exponents));
    Ok(out)
}

/// Finite truncated series: cohomology-valued coefficients indexed by a
/// y-exponent vector and a z-power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    pub caps: RatVector,
    /// Componentwise exactness bound; terms with exponents at or below it are
    /// exact. Entries may drop below zero, in which case the trusted region
    /// of nonnegative exponents is empty.
    pub trusted: RatVector,
    pub z_min: i64,
    pub z_max: i64,
    pub terms: BTreeMap<(RatVector, i64), CohClass>,
}

impl Series {
    pub fn zero(caps: &RatVector, z_min: i64, z_max: i64) -> Self {
        Series {
            caps: caps.clone(),
            trusted: caps.clone(),
            z_min,
            z_max,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(caps: &RatVector, z_min: i64, z_max: i64, ray_count: usize) -> Self {
        let mut s = Self::zero(caps, z_min, z_max);
        s.insert(vec![rat(0); caps.len()], 0, CohClass::unit(0, ray_count));
        s
    }

    pub fn vars(&self) -> usize {
        self.caps.len()
    }

    /// Insert respecting the trusted region and z-window; zero classes and
    /// terms outside the exactness region are dropped.
    pub fn insert(&mut self, exps: RatVector, z: i64, class: CohClass) {
        if class.is_zero() || z < self.z_min || z > self.z_max {
            return;
        }
        if exps.iter().zip(&self.trusted).any(|(e, t)| e > t) {
            return;
        }
        let key = (exps, z);
        match self.terms.get_mut(&key) {
            Some(existing) => {
                existing.add_assign(&class);
                if existing.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, class);
            }
        }
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.combine(other, rat(1))
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.combine(other, rat(-1))
    }

    fn combine(&self, other: &Series, sign: Rat) -> Result<Series> {
        if self.vars() != other.vars() {
            return Err(Error::IncompatibleCaps);
        }
        let caps = min_vec(&self.caps, &other.caps);
        let trusted = min_vec(&self.trusted, &other.trusted);
        let mut out = Series {
            caps,
            trusted,
            z_min: self.z_min.max(other.z_min),
            z_max: self.z_max.min(other.z_max),
            terms: BTreeMap::new(),
        };
        for ((e, z), c) in &self.terms {
            out.insert(e.clone(), *z, c.clone());
        }
        for ((e, z), c) in &other.terms {
            out.insert(e.clone(), *z, c.scale(&sign));
        }
        Ok(out)
    }

    pub fn scale(&self, q: &Rat) -> Series {
        let mut out = self.clone();
        if q.is_zero() {
            out.terms.clear();
            return out;
        }
        out.terms = self.terms.iter().map(|(k, c)| (k.clone(), c.scale(q))).collect();
        out
    }

    /// Convolution product. At most one factor may carry twisted sectors;
    /// coefficients multiply through the module action.
    pub fn product(&self, other: &Series, ideal: &RelationIdeal) -> Result<Series> {
        if self.vars() != other.vars() {
            return Err(Error::IncompatibleCaps);
        }
        let caps = min_vec(&self.caps, &other.caps);
        let trusted = min_vec(&self.trusted, &other.trusted);
        let mut out = Series {
            caps,
            trusted,
            z_min: self.z_min.max(other.z_min),
            z_max: self.z_max.min(other.z_max),
            terms: BTreeMap::new(),
        };
        for ((ea, za), ca) in &self.terms {
            for ((eb, zb), cb) in &other.terms {
                let z = za + zb;
                if z < out.z_min || z > out.z_max {
                    continue;
                }
                let exps: RatVector = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if exps.iter().zip(&out.trusted).any(|(e, t)| e > t) {
                    continue;
                }
                let c = ideal.multiply(ca, cb);
                out.insert(exps, z, c);
            }
        }
        Ok(out)
    }

    /// exp(sign * A) for a scalar-valued series with zero constant term.
    pub fn exp(&self, sign: i64, ideal: &RelationIdeal, ray_count: usize) -> Result<Series> {
        if !self.terms.values().all(|c| c.is_scalar()) {
            return Err(Error::Validation {
                invariant: "scalar series".into(),
                detail: "exponential of a class-valued series".into(),
            });
        }
        let zero_exps = vec![rat(0); self.vars()];
        if self.terms.keys().any(|(e, _)| *e == zero_exps) {
            return Err(Error::NonzeroConstantTerm);
        }
        let arg = if sign >= 0 { self.clone() } else { self.scale(&rat(-1)) };
        let mut out = Series::one(&self.caps, self.z_min, self.z_max, ray_count);
        out.trusted = self.trusted.clone();
        let mut power = Series::one(&self.caps, self.z_min, self.z_max, ray_count);
        power.trusted = self.trusted.clone();
        let mut k: i64 = 1;
        loop {
            power = power.product(&arg, ideal)?;
            if power.terms.is_empty() {
                break;
            }
            let inv_k = Rat::new(1.into(), k.into());
            power = power.scale(&inv_k);
            out = out.add(&power)?;
            k += 1;
        }
        Ok(out)
    }

    /// The operator y_a d/dy_a: multiplies each term by its a-th exponent.
    pub fn log_derivation(&self, a: usize) -> Series {
        let mut out = self.clone();
        out.terms = BTreeMap::new();
        for ((e, z), c) in &self.terms {
            let factor = e[a].clone();
            if factor.is_zero() {
                continue;
            }
            out.terms.insert((e.clone(), *z), c.scale(&factor));
        }
        out
    }

    /// Multiply by the monomial with exponent vector `shift`. Stored terms
    /// pushed below zero are an error; the trusted region moves with the
    /// shift and is capped by the caps.
    pub fn monomial_shift(&self, shift: &RatVector) -> Result<Series> {
        assert_eq!(shift.len(), self.vars());
        let mut out = self.clone();
        out.trusted = self
            .trusted
            .iter()
            .zip(shift)
            .zip(&self.caps)
            .map(|((t, s), cap)| {
                let moved = t + s;
                if &moved > cap {
                    cap.clone()
                } else {
                    moved
                }
            })
            .collect();
        out.terms = BTreeMap::new();
        for ((e, z), c) in &self.terms {
            let exps: RatVector = e.iter().zip(shift).map(|(x, s)| x + s).collect();
            for (variable, v) in exps.iter().enumerate() {
                if v.is_negative() {
                    return Err(Error::NegativeExponentEscape {
                        variable,
                        exponent: crate::num::show_rat(v),
                    });
                }
            }
            if exps.iter().zip(&out.trusted).any(|(x, t)| x > t) {
                continue;
            }
            out.terms.insert((exps, *z), c.clone());
        }
        Ok(out)
    }

    /// True when no stored term survives; `conclusive` additionally requires
    /// a nonempty trusted region.
    pub fn is_zero_series(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn trusted_nonempty(&self) -> bool {
        self.trusted.iter().all(|t| !t.is_negative())
    }

    /// Restrict to terms with z-power `z`, dropping the z index.
    pub fn z_slice(&self, z: i64) -> BTreeMap<RatVector, CohClass> {
        self.terms
            .iter()
            .filter(|((_, zz), _)| *zz == z)
            .map(|((e, _), c)| (e.clone(), c.clone()))
            .collect()
    }
}

pub fn min_vec(a: &RatVector, b: &RatVector) -> RatVector {
    a.iter().zip(b).map(|(x, y)| if x < y { x.clone() } else { y.clone() }).collect()
}
