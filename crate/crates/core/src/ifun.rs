//! Reduced I-functions and differential-operator residuals.
//!
//! The reduced series has the exponential prefactor stripped: all operators
//! act through the conjugation rule, under which y_a d/d(log y_a) becomes
//! multiplication by the basis class over z plus the log derivation. Each
//! summand's infinite factor ratio collapses to a finite product of linear
//! factors, expanded exactly using nilpotency of the divisor classes.

use crate::bundle::{BundleData, BundleKind};
use crate::coh::{basis_classes_as_divisors, CohClass, RelationIdeal};
use crate::error::{Error, Result};
use crate::fan::ExtendedStackyFan;
use crate::lattice::RatVector;
use crate::num::{ceil, factorial, is_integer, rat, Int, Rat};
use crate::series::{enumerate_keff, ExponentPoint, Series};
use num_integer::Integer as _;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

/// Expansion of one summand's product factor.
#[derive(Clone, Debug)]
pub struct FactorExpansion {
    /// Nominal leading power -w(d); the reduced leading class can vanish.
    pub leading_z_power: i64,
    /// Closed-form leading coefficient.
    pub leading_coefficient: Rat,
    /// Indices with negative integer pairing; their divisors multiply the
    /// leading term.
    pub class_factor: Vec<usize>,
    /// Full expansion applied to the sector unit, keyed by z-power.
    pub tail: BTreeMap<i64, CohClass>,
}

/// Closed-form leading data: z-weight w(d) and coefficient C_d.
pub fn leading_data(point: &ExponentPoint) -> (Int, Rat) {
    let mut w = Int::zero();
    let mut c = rat(1);
    for d in &point.pairings {
        w += ceil(d);
        if d.is_negative() {
            if is_integer(d) {
                w += 1;
                // (-1)^{-d-1} (-d-1)!
                let n = -d.to_integer() - 1;
                let mut f = Rat::from_integer(factorial(&n));
                if n.is_odd() {
                    f = -f;
                }
                c *= f;
            } else {
                // product of (d - k) over integers d < k < 0
                let mut k = Rat::from_integer(ceil(d));
                while k < rat(0) {
                    c *= d - &k;
                    k += rat(1);
                }
            }
        } else if d.is_positive() {
            // 1 / product of (d - k) over integers 0 <= k < d
            let mut k = rat(0);
            while &k < d {
                c /= d - &k;
                k += rat(1);
            }
        }
    }
    (w, c)
}

/// Expand the factor ratio of one exponent point on its sector, exactly,
/// within the requested z-window.
pub fn factor_expansion(
    fan: &ExtendedStackyFan,
    ideal: &RelationIdeal,
    point: &ExponentPoint,
    z_min: i64,
    z_max: i64,
) -> FactorExpansion {
    let m = fan.ray_count();
    // numerator factors can raise the z-power; widen the working window
    let raise: i64 = point
        .pairings
        .iter()
        .map(|d| if d.is_negative() { (-d.floor().to_integer()).try_into().unwrap_or(0i64) } else { 0 })
        .sum();
    let work_min = z_min - raise;
    let work_max = z_max + raise;

    let mut acc: BTreeMap<i64, CohClass> = BTreeMap::new();
    acc.insert(0, CohClass::unit(point.sector, m));

    for (i, d) in point.pairings.iter().enumerate() {
        // extension slots have zero class in cohomology; only rays carry a
        // divisor symbol
        let divisor = if i < m { Some(CohClass::divisor(i, m)) } else { None };
        if d.is_positive() {
            // one inverse factor (D_i + kappa z)^-1 per integer step below d
            let mut step = rat(0);
            while &step < d {
                let kappa = d - &step;
                acc = inverse_factor(ideal, &acc, divisor.as_ref(), &kappa, work_min);
                step += rat(1);
            }
        } else if d.is_negative() {
            // factors (D_i + k z) for k = d+1, d+2, ... up to <= 0
            let mut k = d + rat(1);
            while !k.is_positive() {
                acc = linear_factor(ideal, &acc, divisor.as_ref(), &k, work_min, work_max);
                k += rat(1);
            }
        }
    }
    acc.retain(|z, c| *z >= z_min && *z <= z_max && !c.is_zero());

    let (w, c_d) = leading_data(point);
    let class_factor: Vec<usize> = point
        .pairings
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_negative() && is_integer(d))
        .map(|(i, _)| i)
        .collect();
    let leading_z_power = -i64::try_from(w.clone()).unwrap_or(i64::MAX);

    let out = FactorExpansion {
        leading_z_power,
        leading_coefficient: c_d,
        class_factor,
        tail: acc,
    };
    debug_assert!(check_leading(fan, ideal, point, &out, z_min, z_max));
    out
}

/// Cross-check of the two code paths: the expansion's top entry must equal
/// the closed-form leading term, and nothing may sit above it.
fn check_leading(
    fan: &ExtendedStackyFan,
    ideal: &RelationIdeal,
    point: &ExponentPoint,
    exp: &FactorExpansion,
    z_min: i64,
    z_max: i64,
) -> bool {
    let m = fan.ray_count();
    if exp.leading_z_power > z_max || exp.leading_z_power < z_min {
        return exp.tail.keys().all(|z| *z < exp.leading_z_power);
    }
    let mut lead = CohClass::unit(point.sector, m).scale(&exp.leading_coefficient);
    for &i in &exp.class_factor {
        lead = ideal.multiply(&CohClass::divisor(i, m), &lead);
    }
    let got = exp.tail.get(&exp.leading_z_power).cloned().unwrap_or_default();
    got == lead && exp.tail.keys().all(|z| *z <= exp.leading_z_power)
}

fn linear_factor(
    ideal: &RelationIdeal,
    acc: &BTreeMap<i64, CohClass>,
    divisor: Option<&CohClass>,
    k: &Rat,
    work_min: i64,
    work_max: i64,
) -> BTreeMap<i64, CohClass> {
    let mut out: BTreeMap<i64, CohClass> = BTreeMap::new();
    for (w, c) in acc {
        if let Some(divisor) = divisor {
            let dc = ideal.multiply(divisor, c);
            if !dc.is_zero() && *w >= work_min && *w <= work_max {
                out.entry(*w).or_insert_with(CohClass::zero).add_assign(&dc);
            }
        }
        if !k.is_zero() && w + 1 >= work_min && *w < work_max {
            let kc = c.scale(k);
            out.entry(w + 1).or_insert_with(CohClass::zero).add_assign(&kc);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn inverse_factor(
    ideal: &RelationIdeal,
    acc: &BTreeMap<i64, CohClass>,
    divisor: Option<&CohClass>,
    kappa: &Rat,
    work_min: i64,
) -> BTreeMap<i64, CohClass> {
    // (D + kappa z)^-1 = sum_{t>=0} (-1)^t D^t kappa^{-(t+1)} z^{-(t+1)}
    let mut out: BTreeMap<i64, CohClass> = BTreeMap::new();
    for (w, c) in acc {
        let mut power = c.clone();
        let mut t: i64 = 0;
        loop {
            let z = w - t - 1;
            if z < work_min {
                break;
            }
            let mut coeff = rat(1) / kappa.clone();
            for _ in 0..t {
                coeff = -coeff / kappa.clone();
            }
            let term = power.scale(&coeff);
            if !term.is_zero() {
                out.entry(z).or_insert_with(CohClass::zero).add_assign(&term);
            }
            match divisor {
                Some(divisor) => {
                    power = ideal.multiply(divisor, &power);
                    if power.is_zero() {
                        break;
                    }
                }
                None => break, // zero class: only the scalar term survives
            }
            t += 1;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// The reduced I-function: per-point Laurent coefficients in z.
#[derive(Clone, Debug)]
pub struct IFunction {
    pub caps: RatVector,
    pub z_min: i64,
    pub z_max: i64,
    pub points: Vec<PointTerm>,
}

#[derive(Clone, Debug)]
pub struct PointTerm {
    pub point: ExponentPoint,
    pub coeffs: BTreeMap<i64, CohClass>,
}

pub fn ifunction_reduced(
    fan: &ExtendedStackyFan,
    ideal: &RelationIdeal,
    caps: &RatVector,
    z_min: i64,
    z_max: i64,
    budget: u128,
) -> Result<IFunction> {
    let points = enumerate_keff(fan, caps, budget)?;
    let mut out = Vec::with_capacity(points.len());
    for point in points {
        // section-class exponents of a bundle must be nonnegative integers
        if let Some(p0) = fan.p0_index {
            let t0 = &point.y_exponents[p0];
            if !is_integer(t0) || t0.is_negative() {
                return Err(Error::Validation {
                    invariant: "section exponent integrality".into(),
                    detail: format!("point {:?} has section exponent {}", point.pairings, t0),
                });
            }
        }
        let expansion = factor_expansion(fan, ideal, &point, z_min, z_max);
        if point.is_origin() {
            let unit = CohClass::unit(0, fan.ray_count());
            if expansion.tail.len() != 1 || expansion.tail.get(&0) != Some(&unit) {
                return Err(Error::Validation {
                    invariant: "constant term".into(),
                    detail: "the origin must contribute exactly 1".into(),
                });
            }
        }
        out.push(PointTerm { point, coeffs: expansion.tail });
    }
    Ok(IFunction { caps: caps.clone(), z_min, z_max, points: out })
}

impl IFunction {
    pub fn to_series(&self) -> Series {
        let mut s = Series::zero(&self.caps, self.z_min, self.z_max);
        for pt in &self.points {
            for (z, c) in &pt.coeffs {
                s.insert(pt.point.y_exponents.clone(), *z, c.clone());
            }
        }
        s
    }

    /// Coefficient classes of one z-power, keyed by exponent vector, with
    /// the contributing exponent point alongside.
    pub fn z_slice(&self, z: i64) -> Vec<(&ExponentPoint, &CohClass)> {
        self.points
            .iter()
            .filter_map(|pt| pt.coeffs.get(&z).map(|c| (&pt.point, c)))
            .collect()
    }
}

/// One conjugated operator application: (D_i + z * pairing_i) on a point's
/// Laurent coefficients, minus k z when requested.
fn apply_conjugated_factor(
    ideal: &RelationIdeal,
    ray_count: usize,
    coeffs: &BTreeMap<i64, CohClass>,
    divisor_index: usize,
    pairing: &Rat,
    k: &Rat,
) -> BTreeMap<i64, CohClass> {
    // extension slots have zero divisor class
    let divisor = (divisor_index < ray_count).then(|| CohClass::divisor(divisor_index, ray_count));
    let scalar = pairing - k;
    let mut out: BTreeMap<i64, CohClass> = BTreeMap::new();
    for (w, c) in coeffs {
        if let Some(divisor) = &divisor {
            let dc = ideal.multiply(divisor, c);
            if !dc.is_zero() {
                out.entry(*w).or_insert_with(CohClass::zero).add_assign(&dc);
            }
        }
        if !scalar.is_zero() {
            let sc = c.scale(&scalar);
            out.entry(w + 1).or_insert_with(CohClass::zero).add_assign(&sc);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Residual of the hypergeometric operator attached to an integral lattice
/// vector d, applied to the reduced I-function. Expected identically zero on
/// the trusted region.
pub fn pd_operator_residual(
    fan: &ExtendedStackyFan,
    ideal: &RelationIdeal,
    ifn: &IFunction,
    d: &[Int],
) -> Result<Series> {
    let total = fan.pairing_len();
    if d.len() != total {
        return Err(Error::NonIntegralD);
    }
    // membership in the relation lattice
    for row in 0..fan.base.dim {
        let mut acc = Int::zero();
        for (i, di) in d.iter().enumerate() {
            let b = if i < fan.ray_count() {
                &fan.base.rays[i][row]
            } else {
                &fan.extensions[i - fan.ray_count()].vector[row]
            };
            acc += di * b;
        }
        if !acc.is_zero() {
            return Err(Error::NonIntegralD);
        }
    }
    let shift: RatVector = fan
        .p_basis
        .iter()
        .map(|p| {
            d.iter()
                .zip(p)
                .fold(rat(0), |s, (di, pi)| s + pi * Rat::from_integer(di.clone()))
        })
        .collect();

    let neg: Vec<(usize, Int)> = d
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_negative())
        .map(|(i, v)| (i, -v.clone()))
        .collect();
    let pos: Vec<(usize, Int)> = d
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_positive())
        .map(|(i, v)| (i, v.clone()))
        .collect();
    let ops_neg: i64 = neg.iter().map(|(_, n)| i64::try_from(n.clone()).unwrap()).sum();
    let ops_pos: i64 = pos.iter().map(|(_, n)| i64::try_from(n.clone()).unwrap()).sum();
    let valid_z_min = ifn.z_min + ops_neg.max(ops_pos);

    let ray_count = fan.ray_count();
    let apply_block = |factors: &[(usize, Int)], pt: &PointTerm| -> BTreeMap<i64, CohClass> {
        let mut acc = pt.coeffs.clone();
        for (i, count) in factors {
            let mut k = rat(0);
            let count_i64: i64 = i64::try_from(count.clone()).unwrap();
            for _ in 0..count_i64 {
                acc = apply_conjugated_factor(
                    ideal,
                    ray_count,
                    &acc,
                    *i,
                    &pt.point.pairings[*i],
                    &k,
                );
                k += rat(1);
            }
        }
        acc
    };

    let mut residual = Series::zero(&ifn.caps, valid_z_min, ifn.z_max);
    // trusted region shrinks by the monomial shift on the y^d side
    residual.trusted = ifn
        .caps
        .iter()
        .zip(&shift)
        .map(|(cap, s)| {
            let moved = cap + s;
            if &moved > cap {
                cap.clone()
            } else {
                moved
            }
        })
        .collect();
    for pt in &ifn.points {
        let left = apply_block(&neg, pt);
        for (z, c) in left {
            let exps: RatVector =
                pt.point.y_exponents.iter().zip(&shift).map(|(e, s)| e + s).collect();
            residual.insert(exps, z, c);
        }
        let right = apply_block(&pos, pt);
        for (z, c) in right {
            residual.insert(pt.point.y_exponents.clone(), z, c.scale(&rat(-1)));
        }
    }
    Ok(residual)
}

/// Residual of the bundle's vertical differential equation on the reduced
/// I-function of the total space. In the box case the right-hand side picks
/// up the monomial correction of the dual vector.
pub fn bundle_pde_residual(
    bundle: &BundleData,
    ideal: &RelationIdeal,
    ifn: &IFunction,
) -> Result<Series> {
    let total = &bundle.total;
    let basis_polys = basis_classes_as_divisors(total)?;
    let p0_poly = basis_polys[0].clone();

    // Fiber divisor column; in the box case also the monomial correction.
    // The vertical term -y0 d/dy0 belongs to the divisor case only: there it
    // supplies the -p0 twist of the acting ray's weight. A box extension has
    // weight (D_{m+j}, 0), so its equation carries no vertical term.
    let (fiber_m_col, shift, vertical): (Vec<Rat>, Option<RatVector>, bool) = match &bundle.kind {
        BundleKind::Divisor { ray } => (fiber_column(bundle, *ray), None, true),
        BundleKind::BoxElement { ext } => {
            let col = bundle.fiber_ray_count + ext;
            let mut s: RatVector = vec![rat(0)];
            let dual = bundle.dual_shift_exps.as_ref().expect("box bundle carries its dual shift");
            for v in dual {
                s.push(-v.clone());
            }
            (fiber_column(bundle, col), Some(s), false)
        }
    };

    // lift of the fiber divisor class, twisted by -p0 in the divisor case
    let fiber_r = basis_polys.len() - 1; // rank of the fiber H^2
    let mut rhs_poly = if vertical { p0_poly.scale(&rat(-1)) } else { CohClass::zero() };
    for a in 0..fiber_r {
        if !fiber_m_col[a].is_zero() {
            rhs_poly.add_assign(&basis_polys[1 + a].scale(&fiber_m_col[a]));
        }
    }
    let rhs_poly = ideal.reduce(&rhs_poly);

    let z_lo = ifn.z_min + 1;
    let z_hi = ifn.z_max - 1;
    let mut lhs = Series::zero(&ifn.caps, z_lo, z_hi);
    lhs.trusted = ifn.caps.clone();
    if !lhs.trusted.is_empty() {
        lhs.trusted[0] = &lhs.trusted[0] - rat(1);
    }
    let mut rhs = Series::zero(&ifn.caps, z_lo, z_hi);
    if let Some(s) = &shift {
        rhs.trusted = ifn
            .caps
            .iter()
            .zip(s)
            .map(|(cap, sh)| {
                let moved = cap + sh;
                if &moved > cap {
                    cap.clone()
                } else {
                    moved
                }
            })
            .collect();
    }

    for pt in &ifn.points {
        let t0 = pt.point.y_exponents[0].clone();
        // left side: z y0^-1 (p0/z + y0 d/dy0)^2, with p0^2 = 0 by the ideal
        if !t0.is_zero() {
            let mut exps = pt.point.y_exponents.clone();
            exps[0] = &exps[0] - rat(1);
            for (w, c) in &pt.coeffs {
                let p0c = ideal.multiply(&p0_poly, c);
                let p0p0c = ideal.multiply(&p0_poly, &p0c);
                lhs.insert(exps.clone(), w - 1, p0p0c);
                lhs.insert(exps.clone(), *w, p0c.scale(&(&t0 * rat(2))));
                lhs.insert(exps.clone(), w + 1, c.scale(&(&t0 * &t0)));
            }
        }
        // right side: class/z + (sum_a m_a t_a [- t0])
        let mut scalar = if vertical { -t0 } else { rat(0) };
        for (a, m) in fiber_m_col.iter().enumerate() {
            scalar += m * &pt.point.y_exponents[1 + a];
        }
        let exps = match &shift {
            Some(s) => pt
                .point
                .y_exponents
                .iter()
                .zip(s)
                .map(|(e, sh)| e + sh)
                .collect::<RatVector>(),
            None => pt.point.y_exponents.clone(),
        };
        for (w, c) in &pt.coeffs {
            let pc = ideal.multiply(&rhs_poly, c);
            rhs.insert(exps.clone(), w - 1, pc);
            if !scalar.is_zero() {
                rhs.insert(exps.clone(), *w, c.scale(&scalar));
            }
        }
    }
    lhs.sub(&rhs)
}

/// Residual of the fiber-restriction identity: pulling back the bundle's
/// reduced I-function at section exponent zero must reproduce the fiber's,
/// term by term.
pub fn fiber_restriction_residual(
    bundle: &BundleData,
    fiber_ideal: &RelationIdeal,
    ifn_bundle: &IFunction,
    ifn_fiber: &IFunction,
) -> Result<Series> {
    let fiber_caps: RatVector = ifn_bundle.caps[1..].to_vec();
    let z_min = ifn_bundle.z_min.max(ifn_fiber.z_min);
    let z_max = ifn_bundle.z_max.min(ifn_fiber.z_max);
    let mut residual = Series::zero(&crate::series::min_vec(&fiber_caps, &ifn_fiber.caps), z_min, z_max);
    for pt in &ifn_bundle.points {
        if !pt.point.y_exponents[0].is_zero() {
            continue;
        }
        let exps: RatVector = pt.point.y_exponents[1..].to_vec();
        for (z, c) in &pt.coeffs {
            let pulled = crate::coh::pullback_fiber(
                c,
                bundle.new_ray_positions,
                &bundle.sector_map,
                fiber_ideal,
            );
            residual.insert(exps.clone(), *z, pulled);
        }
    }
    for pt in &ifn_fiber.points {
        for (z, c) in &pt.coeffs {
            residual.insert(pt.point.y_exponents.clone(), *z, c.scale(&rat(-1)));
        }
    }
    Ok(residual)
}

/// Column of the fiber's divisor-in-basis matrix, as used by the vertical
/// differential equation.
fn fiber_column(bundle: &BundleData, index: usize) -> Vec<Rat> {
    // the bundle's basis rows 1.. are the lifted fiber rows, so the fiber
    // matrix is recoverable from the bundle's: drop the section column
    let row = &bundle.total.divisor_in_basis[map_to_bundle_index(bundle, index)];
    row[1..].to_vec()
}

fn map_to_bundle_index(bundle: &BundleData, fiber_index: usize) -> usize {
    if fiber_index < bundle.fiber_ray_count {
        fiber_index
    } else {
        fiber_index + 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::{BasisMode, ExtensionData, StackyFan};
    use crate::num::{frac, int};
    use crate::series::DEFAULT_TERM_BUDGET;

    fn p1() -> ExtendedStackyFan {
        let base =
            StackyFan::new(1, vec![vec![int(1)], vec![int(-1)]], vec![vec![0], vec![1]]).unwrap();
        ExtendedStackyFan::build(
            base,
            vec![],
            vec![vec![rat(1), rat(0)]],
            vec![],
            None,
            BasisMode::Integral,
        )
        .unwrap()
    }

    fn p12() -> ExtendedStackyFan {
        let base =
            StackyFan::new(1, vec![vec![int(1)], vec![int(-2)]], vec![vec![0], vec![1]]).unwrap();
        ExtendedStackyFan::build(
            base,
            vec![ExtensionData {
                vector: vec![int(-1)],
                anticone: vec![0, 2],
                coeffs: vec![(1, frac(1, 2))],
            }],
            vec![vec![rat(0), rat(1), rat(1)], vec![rat(0), rat(0), rat(1)]],
            vec![1],
            None,
            BasisMode::Integral,
        )
        .unwrap()
    }

    fn h2() -> ExtendedStackyFan {
        let base = StackyFan::new(
            2,
            vec![
                vec![int(1), int(0)],
                vec![int(0), int(1)],
                vec![int(-1), int(2)],
                vec![int(0), int(-1)],
            ],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
        .unwrap();
        ExtendedStackyFan::build(
            base,
            vec![],
            vec![
                vec![rat(0), rat(0), rat(0), rat(1)],
                vec![rat(0), rat(0), rat(1), rat(0)],
            ],
            vec![],
            None,
            BasisMode::Integral,
        )
        .unwrap()
    }

    fn point_for(fan: &ExtendedStackyFan, caps: &[Rat], pairings: &[Rat]) -> ExponentPoint {
        enumerate_keff(fan, &caps.to_vec(), DEFAULT_TERM_BUDGET)
            .unwrap()
            .into_iter()
            .find(|p| p.pairings == pairings)
            .expect("expected point not enumerated")
    }

    #[test]
    fn p1_degree_one_factor() {
        let fan = p1();
        let ideal = RelationIdeal::for_fan(&fan);
        let pt = point_for(&fan, &[rat(1)], &[rat(1), rat(1)]);
        let e = factor_expansion(&fan, &ideal, &pt, -4, 0);
        // 1/((D1+z)(D2+z)) with D1 = D2 = p, p^2 = 0: z^-2 - 2 p z^-3
        assert_eq!(e.leading_z_power, -2);
        assert_eq!(e.leading_coefficient, rat(1));
        assert!(e.class_factor.is_empty());
        let at2 = e.tail.get(&-2).unwrap();
        assert_eq!(*at2, CohClass::unit(0, 2));
        let at3 = e.tail.get(&-3).unwrap();
        let p = ideal.reduce(&CohClass::divisor(0, 2));
        assert_eq!(*at3, p.scale(&rat(-2)));
        // p^2 = 0 terminates the expansion: exactly two entries
        assert_eq!(e.tail.len(), 2);
    }

    #[test]
    fn h2_degree_zero_ray_factor() {
        let fan = h2();
        let ideal = RelationIdeal::for_fan(&fan);
        let d0 = [rat(1), rat(-2), rat(1), rat(0)];
        let pt = point_for(&fan, &[rat(1), rat(1)], &d0);
        let e = factor_expansion(&fan, &ideal, &pt, -4, 0);
        assert_eq!(e.leading_z_power, -1);
        assert_eq!(e.leading_coefficient, rat(-1));
        assert_eq!(e.class_factor, vec![1]);
        let lead = e.tail.get(&-1).unwrap();
        assert_eq!(*lead, ideal.reduce(&CohClass::divisor(1, 4)).scale(&rat(-1)));
    }

    #[test]
    fn p12_twisted_point_leads_at_z_minus_one() {
        let fan = p12();
        let ideal = RelationIdeal::for_fan(&fan);
        let dual = [rat(0), frac(-1, 2), rat(1)];
        let pt = point_for(&fan, &[rat(1), rat(1)], &dual);
        let e = factor_expansion(&fan, &ideal, &pt, -4, 0);
        // w = ceil(0) + ceil(-1/2) + ceil(1) = 1, C = 1, no negative integers
        assert_eq!(e.leading_z_power, -1);
        assert_eq!(e.leading_coefficient, rat(1));
        assert!(e.class_factor.is_empty());
        let twisted = fan.sector_index(&[int(-1)]).unwrap();
        assert_eq!(pt.sector, twisted);
        assert_eq!(*e.tail.get(&-1).unwrap(), CohClass::unit(twisted, 2));
    }

    #[test]
    fn origin_contributes_one() {
        let fan = p1();
        let ideal = RelationIdeal::for_fan(&fan);
        let ifn = ifunction_reduced(&fan, &ideal, &vec![rat(2)], -4, 0, DEFAULT_TERM_BUDGET).unwrap();
        let origin = ifn.points.iter().find(|p| p.point.is_origin()).unwrap();
        assert_eq!(origin.coeffs.len(), 1);
        assert_eq!(*origin.coeffs.get(&0).unwrap(), CohClass::unit(0, 2));
    }

    #[test]
    fn p1_pd_residual_vanishes() {
        let fan = p1();
        let ideal = RelationIdeal::for_fan(&fan);
        let ifn = ifunction_reduced(&fan, &ideal, &vec![rat(3)], -5, 0, DEFAULT_TERM_BUDGET).unwrap();
        // d = (1, 1): operator y - D1 D2 annihilates the reduced series
        let res = pd_operator_residual(&fan, &ideal, &ifn, &[int(1), int(1)]).unwrap();
        assert!(res.trusted_nonempty());
        assert!(res.is_zero_series(), "residual terms: {:?}", res.terms.keys().collect::<Vec<_>>());
    }

    #[test]
    fn h2_pd_residual_vanishes_for_kernel_basis() {
        let fan = h2();
        let ideal = RelationIdeal::for_fan(&fan);
        let ifn =
            ifunction_reduced(&fan, &ideal, &vec![rat(2), rat(2)], -6, 0, DEFAULT_TERM_BUDGET)
                .unwrap();
        for d in [
            [int(0), int(1), int(0), int(1)],  // fiber class
            [int(1), int(-2), int(1), int(0)], // degree-zero class
        ] {
            let res = pd_operator_residual(&fan, &ideal, &ifn, &d).unwrap();
            assert!(res.trusted_nonempty());
            assert!(
                res.is_zero_series(),
                "residual for {:?}: {:?}",
                d,
                res.terms.iter().take(3).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn pd_rejects_non_kernel_vector() {
        let fan = p1();
        let ideal = RelationIdeal::for_fan(&fan);
        let ifn = ifunction_reduced(&fan, &ideal, &vec![rat(1)], -4, 0, DEFAULT_TERM_BUDGET).unwrap();
        assert!(matches!(
            pd_operator_residual(&fan, &ideal, &ifn, &[int(1), int(0)]),
            Err(Error::NonIntegralD)
        ));
    }

    #[test]
    fn p1_bundle_pde_residual_vanishes() {
        let fan = p1();
        let bundle = crate::bundle::bundle_divisor(&fan, 0).unwrap();
        let ideal = RelationIdeal::for_fan(&bundle.total);
        let caps = vec![rat(2), rat(2)];
        let ifn = ifunction_reduced(&bundle.total, &ideal, &caps, -5, 1, DEFAULT_TERM_BUDGET).unwrap();
        let res = bundle_pde_residual(&bundle, &ideal, &ifn).unwrap();
        assert!(res.trusted_nonempty());
        assert!(res.is_zero_series(), "residual: {:?}", res.terms.iter().take(4).collect::<Vec<_>>());
    }

    #[test]
    fn p12_box_bundle_pde_residual_vanishes() {
        let fan = p12();
        let bundle = crate::bundle::bundle_box(&fan, 0).unwrap();
        let ideal = RelationIdeal::for_fan(&bundle.total);
        let caps = vec![rat(1), rat(1), rat(1)];
        let ifn = ifunction_reduced(&bundle.total, &ideal, &caps, -5, 1, DEFAULT_TERM_BUDGET).unwrap();
        let res = bundle_pde_residual(&bundle, &ideal, &ifn).unwrap();
        assert!(res.trusted_nonempty());
        assert!(res.is_zero_series(), "residual: {:?}", res.terms.iter().take(4).collect::<Vec<_>>());
    }
}
