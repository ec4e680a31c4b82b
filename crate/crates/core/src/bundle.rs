//! Associated orbifiber bundles of circle actions.
//!
//! For a ray divisor D_j or a box extension s_j, the total space is again a
//! toric stack over an ambient lattice one rank higher: two section rays are
//! appended and every maximal cone lifts twice. The total space's Gale data
//! is derived generically and then checked against the expected weight table
//! (D_i, -c_ji) with both section classes equal to the fiber class p0.

use crate::error::{Error, Result};
use crate::fan::{BasisMode, ExtendedStackyFan, ExtensionData, StackyFan};
use crate::lattice::RatVector;
use crate::num::{rat, Int, Rat};
use num_integer::Integer;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleKind {
    /// Action fixing the toric divisor of the given ray (0-based).
    Divisor { ray: usize },
    /// Action attached to the given extension box element (0-based).
    BoxElement { ext: usize },
}

/// Total space of an associated bundle together with the bookkeeping needed
/// to restrict computations back to the fiber.
#[derive(Clone, Debug)]
pub struct BundleData {
    pub kind: BundleKind,
    /// Extended stacky fan of the total space. Basis rows are ordered with
    /// the section class first, then the lifted fiber basis.
    pub total: ExtendedStackyFan,
    /// Circle-action denominator: 1 for divisor actions, the least common
    /// denominator of the c_ji for box actions.
    pub n_j: Int,
    pub fiber_ray_count: usize,
    /// Positions of the two section rays in the total fan's ray list.
    pub new_ray_positions: (usize, usize),
    /// c_ji per fiber ray; the divisor case is the indicator of ray j.
    pub fiber_coeffs: Vec<Rat>,
    /// Section class sigma_0 in pairing coordinates of the total space.
    pub section_class: RatVector,
    /// Bundle sector index -> fiber sector index.
    pub sector_map: Vec<usize>,
    /// Box case: fiber y-exponents of the dual vector of s_j, the exponent
    /// of the monomial correction in the main theorem.
    pub dual_shift_exps: Option<RatVector>,
}

impl BundleData {
    /// The coordinate vector whose subtraction trivializes the section
    /// direction: both section slots carry 1 and the acted-on slot carries
    /// -1 (the ray for a divisor action, the extension for a box action).
    pub fn section_unit(&self) -> RatVector {
        let total_len = self.total.pairing_len();
        let mut v = vec![rat(0); total_len];
        let (n1, n2) = self.new_ray_positions;
        v[n1] = rat(1);
        v[n2] = rat(1);
        match &self.kind {
            BundleKind::Divisor { ray } => v[*ray] = rat(-1),
            BundleKind::BoxElement { ext } => v[self.fiber_ray_count + 2 + ext] = rat(-1),
        }
        v
    }

    /// Project a bundle exponent vector to the fiber: subtract the section
    /// coordinate times the section unit, then drop the two section slots.
    pub fn fiber_projection(&self, pairings: &RatVector) -> RatVector {
        let (n1, n2) = self.new_ray_positions;
        let t0 = pairings[n1].clone();
        let unit = self.section_unit();
        let adjusted: Vec<Rat> =
            pairings.iter().zip(&unit).map(|(p, u)| p - &t0 * u).collect();
        debug_assert!(adjusted[n1].is_zero() && adjusted[n2].is_zero());
        adjusted
            .into_iter()
            .enumerate()
            .filter(|(i, _)| *i != n1 && *i != n2)
            .map(|(_, v)| v)
            .collect()
    }
}

pub fn bundle_divisor(fiber: &ExtendedStackyFan, ray: usize) -> Result<BundleData> {
    if ray >= fiber.ray_count() {
        return Err(Error::IndexOutOfRange { index: ray, limit: fiber.ray_count() });
    }
    if !fiber.weak_fano {
        return Err(Error::WeakFanoViolation {
            reason: "fiber is not weak Fano; the bundle mirror theorem does not apply".into(),
        });
    }
    let m = fiber.ray_count();
    let mut coeffs = vec![rat(0); m];
    coeffs[ray] = rat(1);
    let mut target = Vec::with_capacity(fiber.base.dim + 1);
    for c in &fiber.base.rays[ray] {
        target.push(c.clone());
    }
    target.push(-Int::one());
    build_bundle(fiber, BundleKind::Divisor { ray }, target, coeffs, Int::one())
}

pub fn bundle_box(fiber: &ExtendedStackyFan, ext: usize) -> Result<BundleData> {
    if ext >= fiber.extension_count() {
        return Err(Error::IndexOutOfRange { index: ext, limit: fiber.extension_count() });
    }
    if !fiber.weak_fano {
        return Err(Error::WeakFanoViolation {
            reason: "fiber is not weak Fano; the bundle mirror theorem does not apply".into(),
        });
    }
    let m = fiber.ray_count();
    let extension = &fiber.extensions[ext];
    let mut coeffs = vec![rat(0); m];
    for (i, c) in &extension.coeffs {
        coeffs[*i] = c.clone();
    }
    let mut n_j = Int::one();
    for c in &coeffs {
        n_j = n_j.lcm(c.denom());
    }
    let mut target = Vec::with_capacity(fiber.base.dim + 1);
    for c in &extension.vector {
        target.push(c.clone());
    }
    target.push(-Int::one());
    let mut data = build_bundle(fiber, BundleKind::BoxElement { ext }, target, coeffs, n_j)?;
    // fiber y-exponents of the dual vector, for the monomial correction
    let dual = fiber.dual_vector(ext)?;
    let exps: RatVector = fiber
        .p_basis
        .iter()
        .map(|p| p.iter().zip(&dual).fold(rat(0), |s, (a, b)| s + a * b))
        .collect();
    data.dual_shift_exps = Some(exps);
    Ok(data)
}

fn build_bundle(
    fiber: &ExtendedStackyFan,
    kind: BundleKind,
    target_ray: Vec<Int>,
    fiber_coeffs: Vec<Rat>,
    n_j: Int,
) -> Result<BundleData> {
    let m = fiber.ray_count();
    let l = fiber.extension_count();
    let dim = fiber.base.dim + 1;
    let (new1, new2) = (m, m + 1);
    let total_len = m + 2 + l;

    let mut rays: Vec<Vec<Int>> = fiber
        .base
        .rays
        .iter()
        .map(|r| {
            let mut v = r.clone();
            v.push(Int::zero());
            v
        })
        .collect();
    let mut vertical = vec![Int::zero(); dim];
    vertical[dim - 1] = Int::one();
    rays.push(vertical);
    rays.push(target_ray);

    let mut max_cones = Vec::new();
    for cone in &fiber.base.max_cones {
        for new in [new1, new2] {
            let mut lifted = cone.clone();
            lifted.push(new);
            lifted.sort_unstable();
            max_cones.push(lifted);
        }
    }
    let base = StackyFan::new(dim, rays, max_cones)?;

    let extensions: Vec<ExtensionData> = fiber
        .extensions
        .iter()
        .map(|e| {
            let cone: Vec<usize> = e.coeffs.iter().map(|(i, _)| *i).collect();
            let anticone: Vec<usize> = (0..total_len).filter(|i| !cone.contains(i)).collect();
            let mut vector = e.vector.clone();
            vector.push(Int::zero());
            ExtensionData { vector, anticone, coeffs: e.coeffs.clone() }
        })
        .collect();

    // section class in pairing coordinates: -c on the fiber rays, 1 on both
    // section rays
    let mut section = vec![rat(0); total_len];
    for (i, c) in fiber_coeffs.iter().enumerate() {
        section[i] = -c.clone();
    }
    section[new1] = rat(1);
    section[new2] = rat(1);

    // basis: the section generator first, then lifts of the fiber basis
    // chosen to vanish on the section class
    let mut p_basis: Vec<RatVector> = Vec::with_capacity(1 + fiber.basis_len());
    let mut p0 = vec![rat(0); total_len];
    p0[new1] = rat(1);
    p_basis.push(p0);
    for row in &fiber.p_basis {
        let mut padded = vec![rat(0); total_len];
        padded[..m].clone_from_slice(&row[..m]);
        for j in 0..l {
            padded[m + 2 + j] = row[m + j].clone();
        }
        let pairing: Rat = padded.iter().zip(&section).fold(rat(0), |s, (a, b)| s + a * b);
        padded[new1] = &padded[new1] - pairing;
        p_basis.push(padded);
    }
    let ext_p_indices: Vec<usize> = fiber.ext_p_indices.iter().map(|a| a + 1).collect();

    let mode = if n_j.is_one() { BasisMode::Integral } else { BasisMode::Scaled(n_j.clone()) };
    let total = ExtendedStackyFan::build(base, extensions, p_basis, ext_p_indices, Some(0), mode)?;

    if !total.weak_fano {
        return Err(Error::WeakFanoViolation {
            reason: "total space of the bundle failed the weak Fano check".into(),
        });
    }

    // section rays never share a cone, so the square of the fiber class
    // vanishes in cohomology
    let mut pair = vec![new1, new2];
    pair.sort_unstable();
    if total.cone_sets.contains(&pair) {
        return Err(Error::Validation {
            invariant: "section rays share no cone".into(),
            detail: "both section rays appear in one cone".into(),
        });
    }

    validate_weights(fiber, &total, &fiber_coeffs, new1, new2)?;

    // every bundle box must project to a fiber box by dropping the last
    // (zero) coordinate
    let mut sector_map = Vec::with_capacity(total.boxes.len());
    for b in &total.boxes {
        let descr: Vec<String> = b.vector.iter().map(|c| c.to_string()).collect();
        if !b.vector[dim - 1].is_zero() || b.minimal_cone.contains(&new1) || b.minimal_cone.contains(&new2) {
            return Err(Error::SectorProjectionFailure { sector: descr });
        }
        let fiber_vec: Vec<Int> = b.vector[..dim - 1].to_vec();
        match fiber.sector_index(&fiber_vec) {
            Some(s) => sector_map.push(s),
            None => return Err(Error::SectorProjectionFailure { sector: descr }),
        }
    }

    Ok(BundleData {
        kind,
        total,
        n_j,
        fiber_ray_count: m,
        new_ray_positions: (new1, new2),
        fiber_coeffs,
        section_class: section,
        sector_map,
        dual_shift_exps: None,
    })
}

/// Check the derived divisor images against the expected weight table:
/// ray i carries (D_i, -c_ji), both section rays carry the fiber class, the
/// extensions carry (D_{m+j}, 0), and the first Chern class gains
/// (2 - sum_i c_ji) times the fiber class.
fn validate_weights(
    fiber: &ExtendedStackyFan,
    total: &ExtendedStackyFan,
    coeffs: &[Rat],
    new1: usize,
    new2: usize,
) -> Result<()> {
    let m = fiber.ray_count();
    let l = fiber.extension_count();
    let width = total.basis_len();
    let expect = |p0: Rat, fiber_row: Option<&RatVector>| -> RatVector {
        let mut row = Vec::with_capacity(width);
        row.push(p0);
        match fiber_row {
            Some(f) => row.extend(f.iter().cloned()),
            None => row.extend(std::iter::repeat_n(rat(0), width - 1)),
        }
        row
    };
    let mismatch = |what: String| -> Error {
        Error::Validation { invariant: "bundle weight table".into(), detail: what }
    };
    for i in 0..m {
        let want = expect(-coeffs[i].clone(), Some(&fiber.divisor_in_basis[i]));
        if total.divisor_in_basis[i] != want {
            return Err(mismatch(format!("ray {} weight differs from (D_i, -c_ji)", i + 1)));
        }
    }
    for new in [new1, new2] {
        let want = expect(rat(1), None);
        if total.divisor_in_basis[new] != want {
            return Err(mismatch(format!("section ray {} is not the fiber class", new + 1)));
        }
    }
    for j in 0..l {
        let want = expect(rat(0), Some(&fiber.divisor_in_basis[m + j]));
        if total.divisor_in_basis[m + 2 + j] != want {
            return Err(mismatch(format!("extension {} weight differs from (D, 0)", j + 1)));
        }
    }
    // first Chern class: fiber part unchanged, section part 2 - age of the
    // acting element (equal to 1 in the divisor case)
    let csum = coeffs.iter().fold(rat(0), |s, c| s + c);
    let want_rho = {
        let mut row = Vec::with_capacity(width);
        row.push(rat(2) - csum);
        row.extend(fiber.rho.iter().cloned());
        row
    };
    if total.rho != want_rho {
        return Err(mismatch("first Chern class of the total space is off".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{frac, int};

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

    #[test]
    fn p1_divisor_bundle_is_a_hirzebruch_type_surface() {
        let fiber = p1();
        let b = bundle_divisor(&fiber, 0).unwrap();
        assert_eq!(b.total.base.rays.len(), 4);
        assert_eq!(
            b.total.base.rays,
            vec![
                vec![int(1), int(0)],
                vec![int(-1), int(0)],
                vec![int(0), int(1)],
                vec![int(1), int(-1)],
            ]
        );
        // cone count doubles
        assert_eq!(b.total.base.max_cones.len(), 4);
        assert!(b.total.weak_fano);
        // weight table: D^_1 = (D_1, -1), D^_2 = (D_2, 0), sections = (0, 1)
        assert_eq!(b.total.divisor_in_basis[0], vec![rat(-1), rat(1)]);
        assert_eq!(b.total.divisor_in_basis[1], vec![rat(0), rat(1)]);
        assert_eq!(b.total.divisor_in_basis[2], vec![rat(1), rat(0)]);
        assert_eq!(b.total.divisor_in_basis[3], vec![rat(1), rat(0)]);
        assert_eq!(b.total.rho, vec![rat(1), rat(2)]);
        assert_eq!(b.n_j, int(1));
    }

    #[test]
    fn h2_bundle_has_eight_cones() {
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
        let fiber = ExtendedStackyFan::build(
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
        .unwrap();
        let b = bundle_divisor(&fiber, 1).unwrap();
        assert_eq!(b.total.base.max_cones.len(), 8);
        assert!(b.total.weak_fano);
    }

    #[test]
    fn p12_box_bundle_weights() {
        let fiber = p12();
        let b = bundle_box(&fiber, 0).unwrap();
        assert_eq!(b.n_j, int(2));
        // rays: (1,0), (-2,0), (0,1), (-1,-1)
        assert_eq!(b.total.base.rays[3], vec![int(-1), int(-1)]);
        // weights: D^_1 = (D_1, 0), D^_2 = (D_2, -1/2 p0), D^_3 = (D_3, 0)
        assert_eq!(b.fiber_coeffs, vec![rat(0), frac(1, 2)]);
        assert_eq!(b.total.divisor_in_basis[0][0], rat(0));
        assert_eq!(b.total.divisor_in_basis[1][0], frac(-1, 2));
        assert_eq!(b.total.divisor_in_basis[4][0], rat(0));
        // both section rays carry the fiber class
        assert_eq!(b.total.divisor_in_basis[2], vec![rat(1), rat(0), rat(0)]);
        assert_eq!(b.total.divisor_in_basis[3], vec![rat(1), rat(0), rat(0)]);
        // sectors of the bundle match the fiber's
        assert_eq!(b.total.boxes.len(), fiber.boxes.len());
        // dual shift: y-exponents of the dual vector (1/2, 1)
        assert_eq!(b.dual_shift_exps, Some(vec![frac(1, 2), rat(1)]));
    }

    #[test]
    fn fiber_projection_splits_the_section_class() {
        let fiber = p12();
        let b = bundle_box(&fiber, 0).unwrap();
        // padded fiber point projects to itself
        let dual = fiber.dual_vector(0).unwrap();
        let mut padded = dual.clone();
        padded.insert(2, rat(0));
        padded.insert(3, rat(0));
        assert_eq!(b.fiber_projection(&padded), dual);
        // the section class projects onto the dual vector of the box element
        assert_eq!(b.fiber_projection(&b.section_class), dual);
        // a divisor bundle's section class projects to zero
        let bd = bundle_divisor(&fiber, 0).unwrap();
        let projected = bd.fiber_projection(&bd.section_class);
        assert!(projected.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn bundle_of_non_weak_fano_fiber_is_rejected() {
        // Hirzebruch-3: rho pairs negatively with the -3 curve class
        let base = StackyFan::new(
            2,
            vec![
                vec![int(1), int(0)],
                vec![int(0), int(1)],
                vec![int(-1), int(3)],
                vec![int(0), int(-1)],
            ],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
        .unwrap();
        let fiber = ExtendedStackyFan::build(
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
        .unwrap();
        assert!(!fiber.weak_fano);
        assert!(matches!(
            bundle_divisor(&fiber, 0),
            Err(Error::WeakFanoViolation { .. })
        ));
    }
}
