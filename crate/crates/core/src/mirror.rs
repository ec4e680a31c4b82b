//! Mirror-map extraction and the Seidel/Batyrev element routes.
//!
//! Everything here reads coefficients out of reduced I-functions. The z^-1
//! slice yields the divisor-logarithm corrections g_a and the twisted part
//! of the mirror map; a bundle's z^-2 slice yields the section-linear
//! coefficient whose fiber restriction is the Batyrev element. The main
//! theorem's identities are verified as exact residuals on trusted regions.

use crate::bundle::{BundleData, BundleKind};
use crate::coh::{basis_classes_as_divisors, pullback_fiber, CohClass, Monomial, RelationIdeal};
use crate::error::{Error, Result};
use crate::fan::ExtendedStackyFan;
use crate::lattice::{solve_rational, RatVector};
use crate::num::{factorial, is_integer, rat, show_rat, Rat};
use crate::series::{enumerate_keff, ExponentPoint, Series};
use num_integer::Integer as _;
use num_traits::{Signed, Zero};

/// Mirror map data of the fiber: log q_a = log y_a + g_a(y) for the nef
/// part of the basis, plus the twisted part of the mirror map.
#[derive(Clone, Debug)]
pub struct MirrorData {
    /// Scalar correction series g_1..g_r.
    pub g: Vec<Series>,
    /// Twisted part: sums of sector units with scalar series coefficients.
    pub tau_tw: Series,
}

/// Decomposition workspace for reading degree-2 slices in the chosen basis.
struct SliceDecomposer {
    ray_count: usize,
    /// Reduced coordinate vectors of the basis classes over the degree-1
    /// monomials.
    basis_columns: Vec<Vec<Rat>>,
    basis_polys: Vec<CohClass>,
}

impl SliceDecomposer {
    fn new(fan: &ExtendedStackyFan, ideal: &RelationIdeal) -> Result<Self> {
        let m = fan.ray_count();
        let basis_polys = basis_classes_as_divisors(fan)?;
        let basis_columns = basis_polys
            .iter()
            .map(|p| degree_one_vector(&ideal.reduce(p), m))
            .collect();
        Ok(SliceDecomposer { ray_count: m, basis_columns, basis_polys })
    }

    /// Express an untwisted degree-2 class as coordinates in the basis.
    fn decompose(&self, class_deg1: &CohClass) -> Result<Vec<Rat>> {
        let target = degree_one_vector(class_deg1, self.ray_count);
        let rows: Vec<Vec<Rat>> = (0..self.ray_count)
            .map(|mono| self.basis_columns.iter().map(|col| col[mono].clone()).collect())
            .collect();
        let (solution, null) = solve_rational(&rows, &target).ok_or_else(|| Error::Validation {
            invariant: "degree-2 slice decomposition".into(),
            detail: "slice is outside the span of the basis classes".into(),
        })?;
        if !null.is_empty() {
            return Err(Error::Validation {
                invariant: "degree-2 slice decomposition".into(),
                detail: "basis classes are dependent in cohomology".into(),
            });
        }
        Ok(solution)
    }
}

fn degree_one_vector(c: &CohClass, ray_count: usize) -> Vec<Rat> {
    let mut v = vec![rat(0); ray_count];
    for ((sector, mono), coeff) in &c.terms {
        if *sector != 0 {
            continue;
        }
        let deg: usize = mono.iter().map(|&e| e as usize).sum();
        if deg != 1 {
            continue;
        }
        let i = mono.iter().position(|&e| e == 1).unwrap();
        v[i] = coeff.clone();
    }
    v
}

/// Split one z^-1 class into its untwisted degree-2 part and its twisted
/// unit part, enforcing the weak Fano shape of the slice.
fn split_slice_class(
    ideal: &RelationIdeal,
    point: &ExponentPoint,
    class: &CohClass,
    is_origin_allowed: bool,
) -> Result<(CohClass, Vec<(usize, Rat)>)> {
    let mut untwisted = CohClass::zero();
    let mut twisted: Vec<(usize, Rat)> = Vec::new();
    for ((sector, mono), coeff) in &class.terms {
        let k: usize = mono.iter().map(|&e| e as usize).sum();
        let real_degree = &ideal.sector_age2[*sector] + rat(2 * k as i64);
        if real_degree > rat(2) {
            return Err(Error::NotWeakFanoBehavior);
        }
        if *sector == 0 {
            if k == 0 {
                if !is_origin_allowed {
                    return Err(Error::Validation {
                        invariant: "z^-1 slice shape".into(),
                        detail: format!(
                            "untwisted scalar at z^-1 for point {:?}",
                            point.pairings
                        ),
                    });
                }
            } else {
                let mut single = CohClass::zero();
                single.terms.insert((0, mono.clone()), coeff.clone());
                untwisted.add_assign(&single);
            }
        } else {
            if k != 0 {
                return Err(Error::NotWeakFanoBehavior);
            }
            twisted.push((*sector, coeff.clone()));
        }
    }
    Ok((untwisted, twisted))
}

/// Classification of untwisted z^-1 contributors: apart from the origin,
/// only degree-zero integral points with exactly one negative pairing may
/// appear.
fn assert_untwisted_contributor(point: &ExponentPoint) -> Result<()> {
    if point.is_origin() {
        return Ok(());
    }
    let negatives = point.pairings.iter().filter(|d| d.is_negative()).count();
    if !point.is_integral() || !point.degree.is_zero() || negatives != 1 {
        return Err(Error::Validation {
            invariant: "z^-1 contributor classification".into(),
            detail: format!(
                "point {:?} (degree {}) contributes an untwisted z^-1 class",
                point.pairings,
                show_rat(&point.degree)
            ),
        });
    }
    Ok(())
}

/// Extract the mirror map of the fiber from its reduced I-function.
pub fn extract_mirror(
    fan: &ExtendedStackyFan,
    ideal: &RelationIdeal,
    ifn: &crate::ifun::IFunction,
) -> Result<MirrorData> {
    if fan.p0_index.is_some() {
        return Err(Error::Validation {
            invariant: "fiber extraction".into(),
            detail: "extract_mirror expects the fiber, not a bundle".into(),
        });
    }
    let decomposer = SliceDecomposer::new(fan, ideal)?;
    let r = decomposer.basis_columns.len();
    let mut g: Vec<Series> = (0..r).map(|_| Series::zero(&ifn.caps, 0, 0)).collect();
    let mut tau = Series::zero(&ifn.caps, 0, 0);

    for (point, class) in ifn.z_slice(-1) {
        let (untwisted, twisted) = split_slice_class(ideal, point, class, false)?;
        if !untwisted.is_zero() {
            assert_untwisted_contributor(point)?;
            let coords = decomposer.decompose(&untwisted)?;
            for (a, q) in coords.into_iter().enumerate() {
                if !q.is_zero() {
                    g[a].insert(
                        point.y_exponents.clone(),
                        0,
                        CohClass::scalar(0, fan.ray_count(), q),
                    );
                }
            }
        }
        for (sector, q) in twisted {
            let mut unit = CohClass::zero();
            unit.terms.insert((sector, vec![0u16; fan.ray_count()]), q);
            tau.insert(point.y_exponents.clone(), 0, unit);
        }
    }
    // corrections have no constant term and are degree-zero homogeneous
    let zero_exps = vec![rat(0); ifn.caps.len()];
    for ga in &g {
        if ga.terms.keys().any(|(e, _)| *e == zero_exps) {
            return Err(Error::Validation {
                invariant: "mirror corrections vanish at the origin".into(),
                detail: "g series has a constant term".into(),
            });
        }
    }
    Ok(MirrorData { g, tau_tw: tau })
}

/// Extraction results from a bundle's reduced I-function, restricted to the
/// fiber variables.
#[derive(Clone, Debug)]
pub struct BundleExtraction {
    /// Correction series of the section variable.
    pub g0: Series,
    /// g_i for the lifted nef basis, one per fiber H^2 generator.
    pub g_fiber: Vec<Series>,
    /// Twisted z^-1 part, pulled back to the fiber.
    pub tau_tw: Series,
    /// Fiber restriction of the section-linear z^-2 coefficient.
    pub iota_g1: Series,
}

/// Read g_0, the fiber corrections, the twisted part, and the restriction
/// of the section-linear z^-2 coefficient from a bundle I-function.
pub fn extract_bundle(
    bundle: &BundleData,
    bundle_ideal: &RelationIdeal,
    fiber_ideal: &RelationIdeal,
    ifn: &crate::ifun::IFunction,
) -> Result<BundleExtraction> {
    let total = &bundle.total;
    let decomposer = SliceDecomposer::new(total, bundle_ideal)?;
    let fiber_caps: RatVector = ifn.caps[1..].to_vec();
    let fiber_r = decomposer.basis_columns.len() - 1;

    let mut g0 = Series::zero(&fiber_caps, 0, 0);
    let mut g_fiber: Vec<Series> =
        (0..fiber_r).map(|_| Series::zero(&fiber_caps, 0, 0)).collect();
    let mut tau = Series::zero(&fiber_caps, 0, 0);
    let fiber_ray_count = bundle.fiber_ray_count;

    for (point, class) in ifn.z_slice(-1) {
        // the z^-1 slice must not involve the section variable at all
        if !point.y_exponents[0].is_zero() {
            return Err(Error::Y0DependenceDetected {
                context: format!(
                    "z^-1 coefficient at section exponent {}",
                    show_rat(&point.y_exponents[0])
                ),
            });
        }
        let (untwisted, twisted) = split_slice_class(bundle_ideal, point, class, false)?;
        let fiber_exps: RatVector = point.y_exponents[1..].to_vec();
        if !untwisted.is_zero() {
            assert_untwisted_contributor(point)?;
            let coords = decomposer.decompose(&untwisted)?;
            if !coords[0].is_zero() {
                g0.insert(
                    fiber_exps.clone(),
                    0,
                    CohClass::scalar(0, fiber_ray_count, coords[0].clone()),
                );
            }
            for (a, q) in coords.into_iter().skip(1).enumerate() {
                if !q.is_zero() {
                    g_fiber[a].insert(
                        fiber_exps.clone(),
                        0,
                        CohClass::scalar(0, fiber_ray_count, q),
                    );
                }
            }
        }
        if !twisted.is_empty() {
            let mut cls = CohClass::zero();
            for (sector, q) in twisted {
                cls.terms.insert((sector, vec![0u16; total.ray_count()]), q);
            }
            let pulled =
                pullback_fiber(&cls, bundle.new_ray_positions, &bundle.sector_map, fiber_ideal);
            tau.insert(fiber_exps, 0, pulled);
        }
    }

    // section-linear part of the z^-2 coefficient, restricted to the fiber
    let mut iota_g1 = Series::zero(&fiber_caps, 0, 0);
    for (point, class) in ifn.z_slice(-2) {
        let t0 = &point.y_exponents[0];
        if !is_integer(t0) {
            return Err(Error::Validation {
                invariant: "integral section exponents".into(),
                detail: format!("section exponent {}", show_rat(t0)),
            });
        }
        if *t0 != rat(1) {
            continue;
        }
        let pulled =
            pullback_fiber(class, bundle.new_ray_positions, &bundle.sector_map, fiber_ideal);
        iota_g1.insert(point.y_exponents[1..].to_vec(), 0, pulled);
    }

    Ok(BundleExtraction { g0, g_fiber, tau_tw: tau, iota_g1 })
}

/// Verify that the z^-1 slice of a bundle I-function carries no positive
/// power of the section variable up to the enumerated cap. Complements
/// `extract_bundle`, which already hard-fails on violations.
pub fn section_independence_report(ifn: &crate::ifun::IFunction) -> bool {
    ifn.z_slice(-1).iter().all(|(p, _)| p.y_exponents[0].is_zero())
}

/// Which correction coefficient to evaluate.
#[derive(Clone, Copy, Debug)]
pub enum CorrectionCase {
    Divisor { ray: usize },
    BoxElement { ext: usize },
}

/// Closed-form correction coefficient: the weighted count of degree-zero
/// integral points with a single negative pairing at the acting index.
pub fn g0_closed_form(
    fan: &ExtendedStackyFan,
    which: CorrectionCase,
    caps: &RatVector,
    budget: u128,
) -> Result<Series> {
    let points = enumerate_keff(fan, caps, budget)?;
    let mut out = Series::zero(caps, 0, 0);
    let m = fan.ray_count();
    // (index, weight) pairs: a single ray for the divisor case, the rays of
    // the containing cone weighted by c_jk for the box case
    let weighted: Vec<(usize, Rat)> = match which {
        CorrectionCase::Divisor { ray } => {
            if ray >= m {
                return Err(Error::IndexOutOfRange { index: ray, limit: m });
            }
            vec![(ray, rat(1))]
        }
        CorrectionCase::BoxElement { ext } => {
            if ext >= fan.extension_count() {
                return Err(Error::IndexOutOfRange { index: ext, limit: fan.extension_count() });
            }
            fan.extensions[ext].coeffs.clone()
        }
    };
    for point in &points {
        if !point.is_integral() || !point.degree.is_zero() {
            continue;
        }
        for (k, weight) in &weighted {
            if weight.is_zero() {
                continue;
            }
            let dk = &point.pairings[*k];
            if !dk.is_negative() {
                continue;
            }
            if point.pairings.iter().enumerate().any(|(i, d)| i != *k && d.is_negative()) {
                continue;
            }
            // (-1)^{-dk} (-dk - 1)! / prod_{i != k} d_i!
            let neg = -dk.to_integer();
            let mut coeff = Rat::from_integer(factorial(&(&neg - 1)));
            if neg.is_odd() {
                coeff = -coeff;
            }
            for (i, d) in point.pairings.iter().enumerate() {
                if i != *k {
                    coeff /= Rat::from_integer(factorial(&d.to_integer()));
                }
            }
            coeff *= weight;
            out.insert(
                point.y_exponents.clone(),
                0,
                CohClass::scalar(0, m, coeff),
            );
        }
    }
    Ok(out)
}

/// Logarithmic derivative of the mirror map in one basis direction: the
/// basis class itself (nef part only) plus the derivatives of the
/// corrections and of the twisted part.
pub fn mirror_log_derivative(
    fan: &ExtendedStackyFan,
    ideal: &RelationIdeal,
    mirror: &MirrorData,
    caps: &RatVector,
    a: usize,
) -> Result<Series> {
    if a >= fan.basis_len() {
        return Err(Error::IndexOutOfRange { index: a, limit: fan.basis_len() });
    }
    let decomposer = SliceDecomposer::new(fan, ideal)?;
    let r = decomposer.basis_polys.len();
    let mut out = Series::zero(caps, 0, 0);
    if a < r {
        out.insert(vec![rat(0); caps.len()], 0, ideal.reduce(&decomposer.basis_polys[a]));
    }
    for (b, g_b) in mirror.g.iter().enumerate() {
        for ((exps, _), c) in &g_b.terms {
            let factor = &exps[a] * c.scalar_part(fan.ray_count());
            if factor.is_zero() {
                continue;
            }
            out.insert(exps.clone(), 0, ideal.reduce(&decomposer.basis_polys[b].scale(&factor)));
        }
    }
    for ((exps, _), c) in &mirror.tau_tw.terms {
        if exps[a].is_zero() {
            continue;
        }
        out.insert(exps.clone(), 0, c.scale(&exps[a]));
    }
    Ok(out)
}

/// Batyrev element through the mirror map: the combination of logarithmic
/// derivatives prescribed by the divisor's basis coordinates.
pub fn batyrev_derivative(
    fan: &ExtendedStackyFan,
    ideal: &RelationIdeal,
    mirror: &MirrorData,
    caps: &RatVector,
    index: usize,
) -> Result<Series> {
    if index >= fan.pairing_len() {
        return Err(Error::IndexOutOfRange { index, limit: fan.pairing_len() });
    }
    let m_row = &fan.divisor_in_basis[index];
    let mut out = Series::zero(caps, 0, 0);
    for (a, m_a) in m_row.iter().enumerate() {
        if m_a.is_zero() {
            continue;
        }
        let part = mirror_log_derivative(fan, ideal, mirror, caps, a)?;
        for ((exps, z), c) in &part.terms {
            out.insert(exps.clone(), *z, c.scale(m_a));
        }
    }
    Ok(out)
}

/// Batyrev element by the closed form: constant class plus the two leading
/// sums over degree-zero and fractional exponent points.
pub fn batyrev_closed_form(
    fan: &ExtendedStackyFan,
    ideal: &RelationIdeal,
    caps: &RatVector,
    index: usize,
    budget: u128,
) -> Result<Series> {
    if index >= fan.pairing_len() {
        return Err(Error::IndexOutOfRange { index, limit: fan.pairing_len() });
    }
    let m = fan.ray_count();
    let decomposer = SliceDecomposer::new(fan, ideal)?;
    let m_row = &fan.divisor_in_basis[index];
    let mut out = Series::zero(caps, 0, 0);
    let mut constant = CohClass::zero();
    for (b, poly) in decomposer.basis_polys.iter().enumerate() {
        if !m_row[b].is_zero() {
            constant.add_assign(&poly.scale(&m_row[b]));
        }
    }
    out.insert(vec![rat(0); caps.len()], 0, ideal.reduce(&constant));

    for point in enumerate_keff(fan, caps, budget)? {
        if point.is_origin() {
            continue;
        }
        let pairing_j = &point.pairings[index];
        if pairing_j.is_zero() {
            continue;
        }
        let (_, c_d) = crate::ifun::leading_data(&point);
        if point.is_integral() && point.degree.is_zero() {
            // single negative pairing: contributes along that ray's divisor
            let negatives: Vec<usize> = (0..fan.pairing_len())
                .filter(|&i| point.pairings[i].is_negative())
                .collect();
            if negatives.len() != 1 {
                continue;
            }
            let i = negatives[0];
            debug_assert!(i < m, "negative pairing at an extension slot");
            let coeff = &c_d * pairing_j;
            out.insert(
                point.y_exponents.clone(),
                0,
                ideal.reduce(&CohClass::divisor(i, m).scale(&coeff)),
            );
        } else {
            // fractional points with ceiling sum one and no negative integers
            let ceil_sum: Rat = point
                .pairings
                .iter()
                .map(|d| Rat::from_integer(crate::num::ceil(d)))
                .fold(rat(0), |s, v| s + v);
            if ceil_sum != rat(1) {
                continue;
            }
            if point.pairings.iter().any(|d| d.is_negative() && is_integer(d)) {
                continue;
            }
            let coeff = &c_d * pairing_j;
            let mut unit = CohClass::zero();
            unit.terms.insert((point.sector, vec![0u16; m]), coeff);
            out.insert(point.y_exponents.clone(), 0, ideal.reduce(&unit));
        }
    }
    Ok(out)
}

/// One verified identity of the report.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: String,
    /// Number of surviving residual terms; zero means the identity holds on
    /// the trusted region.
    pub residual_terms: usize,
    /// A check is conclusive only when the common trusted region is nonempty.
    pub conclusive: bool,
    pub pass: bool,
    pub residual: Series,
}

fn check(name: &str, residual: Series) -> IdentityCheck {
    let conclusive = residual.trusted_nonempty();
    let pass = conclusive && residual.is_zero_series();
    IdentityCheck {
        name: name.to_string(),
        residual_terms: residual.terms.len(),
        conclusive,
        pass,
        residual,
    }
}

/// Full Seidel-element report: the element itself plus every route the main
/// theorem equates, with exact residuals.
#[derive(Clone, Debug)]
pub struct SeidelReport {
    pub kind: BundleKind,
    pub seidel: Series,
    pub batyrev_derivative: Series,
    pub batyrev_closed: Series,
    pub iota_g1: Series,
    pub g0_extracted: Series,
    pub g0_closed: Series,
    pub checks: Vec<IdentityCheck>,
}

impl SeidelReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Assemble the Seidel element of one action and verify the theorem's
/// identities three ways.
#[allow(clippy::too_many_arguments)]
pub fn seidel_element(
    fan: &ExtendedStackyFan,
    ideal: &RelationIdeal,
    mirror: &MirrorData,
    bundle: &BundleData,
    extraction: &BundleExtraction,
    caps: &RatVector,
    budget: u128,
) -> Result<SeidelReport> {
    let (index, correction) = match &bundle.kind {
        BundleKind::Divisor { ray } => (*ray, CorrectionCase::Divisor { ray: *ray }),
        BundleKind::BoxElement { ext } => {
            (fan.ray_count() + ext, CorrectionCase::BoxElement { ext: *ext })
        }
    };
    let g0_closed = g0_closed_form(fan, correction, caps, budget)?;
    let bat_der = batyrev_derivative(fan, ideal, mirror, caps, index)?;
    let bat_closed = batyrev_closed_form(fan, ideal, caps, index, budget)?;

    // the G1 route equals the Batyrev element, shifted by the dual-vector
    // monomial in the box case
    let bat_der_cmp = match &bundle.dual_shift_exps {
        Some(shift) => {
            let neg: RatVector = shift.iter().map(|s| -s.clone()).collect();
            bat_der.monomial_shift(&neg)?
        }
        None => bat_der.clone(),
    };
    let bat_closed_cmp = match &bundle.dual_shift_exps {
        Some(shift) => {
            let neg: RatVector = shift.iter().map(|s| -s.clone()).collect();
            bat_closed.monomial_shift(&neg)?
        }
        None => bat_closed.clone(),
    };

    let exp_g0 = extraction.g0.exp(-1, ideal, fan.ray_count())?;
    let seidel = exp_g0.product(&extraction.iota_g1, ideal)?;
    // theorem right-hand side through the independent closed-form routes
    let exp_g0_closed = g0_closed.exp(-1, ideal, fan.ray_count())?;
    let rhs = exp_g0_closed.product(&bat_der_cmp, ideal)?;

    let checks = vec![
        check("g0 closed form = g0 extracted", g0_closed.sub(&extraction.g0)?),
        check(
            "batyrev derivative = batyrev closed form",
            bat_der.sub(&bat_closed)?,
        ),
        check(
            "fiber restriction of G1 = batyrev element",
            extraction.iota_g1.sub(&bat_der_cmp)?,
        ),
        check(
            "fiber restriction of G1 = batyrev closed form",
            extraction.iota_g1.sub(&bat_closed_cmp)?,
        ),
        check("seidel element = exp(-g0) * batyrev element", seidel.sub(&rhs)?),
    ];

    Ok(SeidelReport {
        kind: bundle.kind.clone(),
        seidel,
        batyrev_derivative: bat_der,
        batyrev_closed: bat_closed,
        iota_g1: extraction.iota_g1.clone(),
        g0_extracted: extraction.g0.clone(),
        g0_closed,
        checks,
    })
}

/// Scalar coefficient of a unit monomial in a series term, used by reports.
pub fn unit_coefficient(series: &Series, exps: &RatVector, sector: usize, ray_count: usize) -> Rat {
    let mono: Monomial = vec![0u16; ray_count];
    series
        .terms
        .get(&(exps.clone(), 0))
        .and_then(|c| c.terms.get(&(sector, mono)).cloned())
        .unwrap_or_else(|| rat(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{bundle_box, bundle_divisor};
    use crate::fan::{BasisMode, ExtensionData, StackyFan};
    use crate::ifun::ifunction_reduced;
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

    #[test]
    fn p1_mirror_is_trivial() {
        let fan = p1();
        let ideal = RelationIdeal::for_fan(&fan);
        let ifn = ifunction_reduced(&fan, &ideal, &vec![rat(3)], -4, 0, DEFAULT_TERM_BUDGET).unwrap();
        let mirror = extract_mirror(&fan, &ideal, &ifn).unwrap();
        assert!(mirror.g[0].is_zero_series());
        assert!(mirror.tau_tw.is_zero_series());
    }

    #[test]
    fn p12_twisted_mirror_leading_term() {
        let fan = p12();
        let ideal = RelationIdeal::for_fan(&fan);
        let ifn =
            ifunction_reduced(&fan, &ideal, &vec![rat(2), rat(2)], -4, 0, DEFAULT_TERM_BUDGET)
                .unwrap();
        let mirror = extract_mirror(&fan, &ideal, &ifn).unwrap();
        // leading term: 1 * y^(1/2, 1) on the sector of -1
        let sector = fan.sector_index(&[int(-1)]).unwrap();
        let lead = unit_coefficient(&mirror.tau_tw, &vec![frac(1, 2), rat(1)], sector, 2);
        assert_eq!(lead, rat(1));
    }

    #[test]
    fn h2_mirror_g_series() {
        let fan = h2();
        let ideal = RelationIdeal::for_fan(&fan);
        let caps = vec![rat(3), rat(3)];
        let ifn = ifunction_reduced(&fan, &ideal, &caps, -4, 0, DEFAULT_TERM_BUDGET).unwrap();
        let mirror = extract_mirror(&fan, &ideal, &ifn).unwrap();
        assert!(mirror.tau_tw.is_zero_series());
        // z^-1 slice is C_k D_2 y2^k with C_k = -(2k-1)!/(k!)^2 and
        // D_2 = p_1 - 2 p_2
        for k in 1..=3i64 {
            let exps = vec![rat(0), rat(k)];
            let kk = factorial(&int_big(k));
            let c_k = -Rat::new(factorial(&int_big(2 * k - 1)), &kk * &kk);
            let g1 = unit_coefficient(&mirror.g[0], &exps, 0, 4);
            let g2 = unit_coefficient(&mirror.g[1], &exps, 0, 4);
            assert_eq!(g1, c_k, "g1 coefficient at k={}", k);
            assert_eq!(g2, -&c_k * rat(2), "g2 coefficient at k={}", k);
        }
    }

    fn int_big(n: i64) -> crate::num::Int {
        crate::num::int(n)
    }

    #[test]
    fn h2_g0_closed_form_values() {
        let fan = h2();
        let caps = vec![rat(4), rat(4)];
        // acting ray (0,1): g0 = y + 3/2 y^2 + 10/3 y^3 + 35/4 y^4
        let g0 = g0_closed_form(&fan, CorrectionCase::Divisor { ray: 1 }, &caps, DEFAULT_TERM_BUDGET)
            .unwrap();
        let expected = [
            (1i64, rat(1)),
            (2, frac(3, 2)),
            (3, frac(10, 3)),
            (4, frac(35, 4)),
        ];
        for (k, want) in expected {
            let got = unit_coefficient(&g0, &vec![rat(0), rat(k)], 0, 4);
            assert_eq!(got, want, "g0 coefficient at k={}", k);
        }
        // acting ray (1,0): empty sum
        let g0_trivial =
            g0_closed_form(&fan, CorrectionCase::Divisor { ray: 0 }, &caps, DEFAULT_TERM_BUDGET)
                .unwrap();
        assert!(g0_trivial.is_zero_series());
    }

    #[test]
    fn h2_batyrev_routes_agree() {
        let fan = h2();
        let ideal = RelationIdeal::for_fan(&fan);
        let caps = vec![rat(3), rat(3)];
        let ifn = ifunction_reduced(&fan, &ideal, &caps, -4, 0, DEFAULT_TERM_BUDGET).unwrap();
        let mirror = extract_mirror(&fan, &ideal, &ifn).unwrap();
        let der = batyrev_derivative(&fan, &ideal, &mirror, &caps, 1).unwrap();
        let closed = batyrev_closed_form(&fan, &ideal, &caps, 1, DEFAULT_TERM_BUDGET).unwrap();
        let diff = der.sub(&closed).unwrap();
        assert!(diff.is_zero_series(), "residual: {:?}", diff.terms.keys().take(3).collect::<Vec<_>>());
        // D_2 (1 + 2y + 6y^2 + 20y^3): binomial central coefficients on the
        // reduced class of D_2
        let d2 = ideal.reduce(&CohClass::divisor(1, 4));
        for (k, want) in [(0i64, rat(1)), (1, rat(2)), (2, rat(6)), (3, rat(20))] {
            let got = closed.terms.get(&(vec![rat(0), rat(k)], 0)).cloned().unwrap_or_default();
            assert_eq!(got, d2.scale(&want), "closed-form coefficient at k={}", k);
        }
    }

    #[test]
    fn batyrev_linear_relation_reconstructs() {
        // D~_j = sum_a m_ja p~_a by construction; spot-check the
        // reconstruction against the materialized log derivatives
        let fan = p12();
        let ideal = RelationIdeal::for_fan(&fan);
        let caps = vec![rat(2), rat(2)];
        let ifn = ifunction_reduced(&fan, &ideal, &caps, -4, 0, DEFAULT_TERM_BUDGET).unwrap();
        let mirror = extract_mirror(&fan, &ideal, &ifn).unwrap();
        for j in 0..fan.pairing_len() {
            let direct = batyrev_derivative(&fan, &ideal, &mirror, &caps, j).unwrap();
            let mut rebuilt = Series::zero(&caps, 0, 0);
            for (a, m_a) in fan.divisor_in_basis[j].iter().enumerate() {
                if m_a.is_zero() {
                    continue;
                }
                let part = mirror_log_derivative(&fan, &ideal, &mirror, &caps, a).unwrap();
                for ((e, z), c) in &part.terms {
                    rebuilt.insert(e.clone(), *z, c.scale(m_a));
                }
            }
            assert!(direct.sub(&rebuilt).unwrap().is_zero_series());
        }
    }

    #[test]
    fn p1_seidel_element_is_the_divisor() {
        let fan = p1();
        let ideal = RelationIdeal::for_fan(&fan);
        let caps = vec![rat(2)];
        let ifn = ifunction_reduced(&fan, &ideal, &caps, -4, 0, DEFAULT_TERM_BUDGET).unwrap();
        let mirror = extract_mirror(&fan, &ideal, &ifn).unwrap();
        let bundle = bundle_divisor(&fan, 0).unwrap();
        let bundle_ideal = RelationIdeal::for_fan(&bundle.total);
        let bundle_caps = vec![rat(2), rat(2)];
        let ifn_e =
            ifunction_reduced(&bundle.total, &bundle_ideal, &bundle_caps, -5, 0, DEFAULT_TERM_BUDGET)
                .unwrap();
        let extraction = extract_bundle(&bundle, &bundle_ideal, &ideal, &ifn_e).unwrap();
        assert!(extraction.g0.is_zero_series());
        let report =
            seidel_element(&fan, &ideal, &mirror, &bundle, &extraction, &caps, DEFAULT_TERM_BUDGET)
                .unwrap();
        assert!(report.all_pass(), "checks: {:?}", report.checks.iter().map(|c| (&c.name, c.pass)).collect::<Vec<_>>());
        // the element is exactly the divisor class
        let d1 = ideal.reduce(&CohClass::divisor(0, 2));
        assert_eq!(report.seidel.terms.len(), 1);
        assert_eq!(
            report.seidel.terms.get(&(vec![rat(0)], 0)),
            Some(&d1)
        );
    }

    #[test]
    fn h2_seidel_element_series() {
        let fan = h2();
        let ideal = RelationIdeal::for_fan(&fan);
        let caps = vec![rat(3), rat(3)];
        let ifn = ifunction_reduced(&fan, &ideal, &caps, -4, 0, DEFAULT_TERM_BUDGET).unwrap();
        let mirror = extract_mirror(&fan, &ideal, &ifn).unwrap();
        let bundle = bundle_divisor(&fan, 1).unwrap();
        let bundle_ideal = RelationIdeal::for_fan(&bundle.total);
        let bundle_caps = vec![rat(2), rat(3), rat(3)];
        let ifn_e =
            ifunction_reduced(&bundle.total, &bundle_ideal, &bundle_caps, -6, 0, DEFAULT_TERM_BUDGET)
                .unwrap();
        let extraction = extract_bundle(&bundle, &bundle_ideal, &ideal, &ifn_e).unwrap();
        let report =
            seidel_element(&fan, &ideal, &mirror, &bundle, &extraction, &caps, DEFAULT_TERM_BUDGET)
                .unwrap();
        for c in &report.checks {
            assert!(c.pass, "{} failed with {} residual terms", c.name, c.residual_terms);
        }
        // S = D_2 (1 + y + 3y^2 + 10y^3)
        let d2 = ideal.reduce(&CohClass::divisor(1, 4));
        for (k, want) in [(0i64, rat(1)), (1, rat(1)), (2, rat(3)), (3, rat(10))] {
            let got =
                report.seidel.terms.get(&(vec![rat(0), rat(k)], 0)).cloned().unwrap_or_default();
            assert_eq!(got, d2.scale(&want), "seidel coefficient at k={}", k);
        }
    }

    #[test]
    fn p12_box_seidel_three_way() {
        let fan = p12();
        let ideal = RelationIdeal::for_fan(&fan);
        let caps = vec![rat(2), rat(2)];
        let ifn = ifunction_reduced(&fan, &ideal, &caps, -4, 0, DEFAULT_TERM_BUDGET).unwrap();
        let mirror = extract_mirror(&fan, &ideal, &ifn).unwrap();
        let bundle = bundle_box(&fan, 0).unwrap();
        let bundle_ideal = RelationIdeal::for_fan(&bundle.total);
        let bundle_caps = vec![rat(1), rat(2), rat(2)];
        let ifn_e =
            ifunction_reduced(&bundle.total, &bundle_ideal, &bundle_caps, -6, 0, DEFAULT_TERM_BUDGET)
                .unwrap();
        let extraction = extract_bundle(&bundle, &bundle_ideal, &ideal, &ifn_e).unwrap();
        let report =
            seidel_element(&fan, &ideal, &mirror, &bundle, &extraction, &caps, DEFAULT_TERM_BUDGET)
                .unwrap();
        for c in &report.checks {
            assert!(c.pass, "{}: {} residual terms, conclusive={}", c.name, c.residual_terms, c.conclusive);
        }
        // leading term after the monomial shift: the twisted unit at order 0
        let sector = fan.sector_index(&[int(-1)]).unwrap();
        let lead = unit_coefficient(&report.seidel, &vec![rat(0), rat(0)], sector, 2);
        assert_eq!(lead, rat(1));
    }
}
