//! Stacky fans, extended stacky fans, and their derived combinatorics.
//!
//! An extended stacky fan carries the ray data plus a chosen integral basis
//! of the divisor class lattice. From those we derive everything the series
//! layer needs: box elements, anticones, divisor images, dual vectors of
//! extension elements, and the weak Fano verdict. All data is validated at
//! construction and immutable afterwards.

use crate::error::{Error, Result};
use crate::lattice::{
    cone_member, kernel_basis, rat_inverse, smith_normal_form, IntMatrix, RatVector,
};
use crate::num::{fract, int, is_integer, rat, show_rat, Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Rational simplicial fan together with (possibly non-primitive) ray vectors.
#[derive(Clone, Debug)]
pub struct StackyFan {
    /// Ambient lattice rank.
    pub dim: usize,
    /// Ray vectors b_i in Z^dim; not required to be primitive.
    pub rays: Vec<Vec<Int>>,
    /// Maximal cones as sorted 0-based ray index sets.
    pub max_cones: Vec<Vec<usize>>,
}

/// Twisted sector label: a lattice vector with fractional coordinates in
/// [0, 1) over its minimal cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxElement {
    pub vector: Vec<Int>,
    pub minimal_cone: Vec<usize>,
    pub fractional_coords: Vec<Rat>,
    pub age: Rat,
}

impl BoxElement {
    pub fn is_zero(&self) -> bool {
        self.vector.iter().all(|c| c.is_zero())
    }
}

impl StackyFan {
    pub fn new(dim: usize, rays: Vec<Vec<Int>>, max_cones: Vec<Vec<usize>>) -> Result<Self> {
        let fan = StackyFan { dim, rays, max_cones };
        fan.validate()?;
        Ok(fan)
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    /// Simpliciality and completeness. Completeness uses the facet-pairing
    /// criterion: every facet of a maximal cone lies in exactly two maximal
    /// cones and the adjacency graph is connected. Valid for simplicial
    /// complete fans; dimension one is the two-ray special case.
    pub fn validate(&self) -> Result<()> {
        if self.rays.is_empty() {
            return Err(Error::NotComplete { reason: "fan has no rays".into() });
        }
        for ray in &self.rays {
            if ray.len() != self.dim {
                return Err(Error::Validation {
                    invariant: "ray dimension".into(),
                    detail: format!("expected {} coordinates, got {}", self.dim, ray.len()),
                });
            }
            if ray.iter().all(|c| c.is_zero()) {
                return Err(Error::Validation {
                    invariant: "nonzero rays".into(),
                    detail: "the zero vector is not a ray".into(),
                });
            }
        }
        for (i, a) in self.rays.iter().enumerate() {
            for b in self.rays.iter().skip(i + 1) {
                if a == b {
                    return Err(Error::Validation {
                        invariant: "no ray repeated".into(),
                        detail: format!("ray {:?} appears twice", a),
                    });
                }
            }
        }
        for (ci, cone) in self.max_cones.iter().enumerate() {
            for &i in cone {
                if i >= self.rays.len() {
                    return Err(Error::IndexOutOfRange { index: i, limit: self.rays.len() });
                }
            }
            let mut sorted = cone.clone();
            sorted.dedup();
            if sorted.len() != cone.len() {
                return Err(Error::NotSimplicial { cone: ci });
            }
            if self.cone_rank(cone) != cone.len() {
                return Err(Error::NotSimplicial { cone: ci });
            }
        }
        let used: BTreeSet<usize> = self.max_cones.iter().flatten().copied().collect();
        if used.len() != self.rays.len() {
            return Err(Error::NotComplete {
                reason: "some ray belongs to no maximal cone".into(),
            });
        }
        self.check_complete()
    }

    fn cone_rank(&self, cone: &[usize]) -> usize {
        let rows: Vec<RatVector> = (0..self.dim)
            .map(|r| cone.iter().map(|&i| Rat::from_integer(self.rays[i][r].clone())).collect())
            .collect();
        rank_of(&rows)
    }

    fn check_complete(&self) -> Result<()> {
        // completeness needs pure dimension
        for (ci, cone) in self.max_cones.iter().enumerate() {
            if cone.len() != self.dim {
                return Err(Error::NotComplete {
                    reason: format!("maximal cone {} has {} rays, expected {}", ci, cone.len(), self.dim),
                });
            }
        }
        if self.dim == 1 {
            // complete iff exactly one positive and one negative ray
            let pos = self.rays.iter().filter(|r| r[0].is_positive()).count();
            let neg = self.rays.iter().filter(|r| r[0].is_negative()).count();
            if pos == 1 && neg == 1 && self.max_cones.len() == 2 {
                return Ok(());
            }
            return Err(Error::NotComplete {
                reason: "a complete one-dimensional fan has exactly one positive and one negative ray".into(),
            });
        }
        let mut facet_count: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (ci, cone) in self.max_cones.iter().enumerate() {
            for drop in cone {
                let facet: Vec<usize> = cone.iter().copied().filter(|i| i != drop).collect();
                facet_count.entry(facet).or_default().push(ci);
            }
        }
        for (facet, cones) in &facet_count {
            if cones.len() != 2 {
                return Err(Error::NotComplete {
                    reason: format!("facet {:?} belongs to {} maximal cones, expected 2", facet, cones.len()),
                });
            }
        }
        // adjacency graph connected
        let n = self.max_cones.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(c) = stack.pop() {
            for cones in facet_count.values() {
                if cones.contains(&c) {
                    for &other in cones {
                        if !seen[other] {
                            seen[other] = true;
                            stack.push(other);
                        }
                    }
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::NotComplete {
                reason: "maximal-cone adjacency graph is disconnected".into(),
            });
        }
        Ok(())
    }

    /// All cones of the fan as sorted ray index sets (faces of maximal cones,
    /// including the zero cone).
    pub fn cone_sets(&self) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for cone in &self.max_cones {
            let k = cone.len();
            for mask in 0u32..(1 << k) {
                let face: Vec<usize> =
                    (0..k).filter(|b| mask & (1 << b) != 0).map(|b| cone[b]).collect();
                out.insert(face);
            }
        }
        out
    }

    fn ray_matrix(&self, cone: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zero(self.dim, cone.len());
        for (col, &i) in cone.iter().enumerate() {
            for row in 0..self.dim {
                m[(row, col)] = self.rays[i][row].clone();
            }
        }
        m
    }

    /// Index of a maximal cone: |det| of its ray matrix.
    pub fn cone_index(&self, cone: &[usize]) -> Int {
        self.ray_matrix(cone).determinant().abs()
    }

    /// lcm of all maximal-cone indices.
    pub fn index_lcm(&self) -> Int {
        let mut m = Int::one();
        for cone in &self.max_cones {
            m = m.lcm(&self.cone_index(cone));
        }
        m
    }

    /// Every box element of the fan, sorted by vector. Enumeration scans the
    /// half-open fundamental parallelepiped of each maximal cone through coset
    /// representatives of Z^n / B_sigma Z^n and deduplicates across cones.
    pub fn box_elements(&self) -> Result<Vec<BoxElement>> {
        let mut found: BTreeMap<Vec<Int>, BoxElement> = BTreeMap::new();
        for cone in &self.max_cones {
            let b = self.ray_matrix(cone);
            let snf = smith_normal_form(&b);
            let diag = snf.diagonal();
            if diag.iter().any(|d| d.is_zero()) {
                return Err(Error::Validation {
                    invariant: "maximal cone nonsingular".into(),
                    detail: format!("cone {:?} has singular ray matrix", cone),
                });
            }
            let b_rows: Vec<RatVector> = (0..self.dim)
                .map(|i| b.row(i).iter().map(|v| Rat::from_integer(v.clone())).collect())
                .collect();
            let b_inv = rat_inverse(&b_rows).expect("nonsingular ray matrix");
            // coset representatives x = U * t, t in prod [0, d_k)
            let mut t = vec![Int::zero(); self.dim];
            loop {
                let x: Vec<Rat> = (0..self.dim)
                    .map(|i| {
                        let mut acc = Int::zero();
                        for (k, tk) in t.iter().enumerate() {
                            acc += &snf.u[(i, k)] * tk;
                        }
                        Rat::from_integer(acc)
                    })
                    .collect();
                let coords: Vec<Rat> = (0..self.dim)
                    .map(|i| {
                        let mut acc = rat(0);
                        for (k, xk) in x.iter().enumerate() {
                            acc += &b_inv[i][k] * xk;
                        }
                        fract(&acc)
                    })
                    .collect();
                let v: Vec<Rat> = (0..self.dim)
                    .map(|i| {
                        let mut acc = rat(0);
                        for (k, c) in coords.iter().enumerate() {
                            acc += &b_rows[i][k] * c;
                        }
                        acc
                    })
                    .collect();
                debug_assert!(v.iter().all(is_integer), "box vector must be integral");
                let vector: Vec<Int> = v.iter().map(|q| q.to_integer()).collect();
                let mut minimal_cone = Vec::new();
                let mut fractional = Vec::new();
                for (k, c) in coords.iter().enumerate() {
                    if !c.is_zero() {
                        minimal_cone.push(cone[k]);
                        fractional.push(c.clone());
                    }
                }
                // sort by global ray index
                let mut paired: Vec<(usize, Rat)> =
                    minimal_cone.iter().copied().zip(fractional).collect();
                paired.sort_by_key(|(i, _)| *i);
                let minimal_cone: Vec<usize> = paired.iter().map(|(i, _)| *i).collect();
                let fractional_coords: Vec<Rat> = paired.into_iter().map(|(_, c)| c).collect();
                let age = fractional_coords.iter().fold(rat(0), |s, c| s + c);
                let elem = BoxElement { vector: vector.clone(), minimal_cone, fractional_coords, age };
                if let Some(prev) = found.get(&vector) {
                    if prev != &elem {
                        return Err(Error::Validation {
                            invariant: "box uniqueness".into(),
                            detail: format!("vector {:?} has two fractional presentations", vector),
                        });
                    }
                } else {
                    found.insert(vector, elem);
                }
                // odometer over prod [0, d_k)
                let mut k = 0;
                loop {
                    if k == self.dim {
                        break;
                    }
                    t[k] += 1;
                    if t[k] < diag[k] {
                        break;
                    }
                    t[k] = Int::zero();
                    k += 1;
                }
                if k == self.dim {
                    break;
                }
            }
        }
        // untwisted sector first, the rest ordered by vector
        let mut out: Vec<BoxElement> = Vec::with_capacity(found.len());
        let zero = vec![Int::zero(); self.dim];
        if let Some(z) = found.remove(&zero) {
            out.push(z);
        }
        out.extend(found.into_values());
        Ok(out)
    }
}

fn rank_of(rows: &[RatVector]) -> usize {
    let mut m: Vec<RatVector> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let p = (rank..m.len()).find(|&r| !m[r][col].is_zero());
        let p = match p {
            Some(p) => p,
            None => continue,
        };
        m.swap(rank, p);
        let inv = m[rank][col].clone();
        for j in 0..cols {
            m[rank][j] = &m[rank][j] / &inv;
        }
        for r in 0..m.len() {
            if r == rank || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in 0..cols {
                let t = &f * &m[rank][j];
                m[r][j] = &m[r][j] - t;
            }
        }
        rank += 1;
    }
    rank
}

/// One extension element s_j with its user-declared anticone and the
/// coefficients expressing s_j over the complementary cone's rays.
#[derive(Clone, Debug)]
pub struct ExtensionData {
    pub vector: Vec<Int>,
    /// Anticone I_j as sorted 0-based indices into 0..m+l.
    pub anticone: Vec<usize>,
    /// (ray index, c_ji) for the rays outside the anticone, sorted by index.
    pub coeffs: Vec<(usize, Rat)>,
}

/// How the chosen basis of the divisor class lattice is validated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisMode {
    /// Integral basis: pairings with the kernel lattice are unimodular.
    Integral,
    /// Pairings may pick up denominators dividing the given scale; used by
    /// the orbifiber bundle of a box element.
    Scaled(Int),
}

/// Extended stacky fan with all derived Gale-dual data.
#[derive(Clone, Debug)]
pub struct ExtendedStackyFan {
    pub base: StackyFan,
    pub extensions: Vec<ExtensionData>,
    /// Chosen basis of the divisor class lattice as pairing-coordinate rows
    /// of length ray_count + extension count.
    pub p_basis: Vec<RatVector>,
    /// Indices into `p_basis` whose rows must lie in the extension part of
    /// the class lattice (and project to zero in H^2).
    pub ext_p_indices: Vec<usize>,
    /// Index into `p_basis` of the section class generator, for bundles.
    pub p0_index: Option<usize>,

    // derived data
    /// Saturated integral basis of the relation lattice (kernel of the ray map).
    pub kernel: Vec<Vec<Int>>,
    /// Dual basis to `p_basis` inside the rational relation lattice.
    pub dual_kernel: Vec<RatVector>,
    /// Row i: coordinates of the i-th divisor class in `p_basis`.
    pub divisor_in_basis: Vec<RatVector>,
    /// Coordinates of the extended first Chern class in `p_basis`.
    pub rho: RatVector,
    pub boxes: Vec<BoxElement>,
    pub cone_sets: BTreeSet<Vec<usize>>,
    /// lcm of maximal-cone indices; grid denominator for exponent enumeration.
    pub scale: Int,
    pub weak_fano: bool,
}

impl ExtendedStackyFan {
    pub fn ray_count(&self) -> usize {
        self.base.rays.len()
    }

    pub fn extension_count(&self) -> usize {
        self.extensions.len()
    }

    /// Length of pairing-coordinate vectors: rays then extension slots.
    pub fn pairing_len(&self) -> usize {
        self.ray_count() + self.extension_count()
    }

    pub fn basis_len(&self) -> usize {
        self.p_basis.len()
    }

    pub fn build(
        base: StackyFan,
        extensions: Vec<ExtensionData>,
        p_basis: Vec<RatVector>,
        ext_p_indices: Vec<usize>,
        p0_index: Option<usize>,
        mode: BasisMode,
    ) -> Result<Self> {
        base.validate()?;
        let boxes = base.box_elements()?;
        let m = base.rays.len();
        let l = extensions.len();
        let total = m + l;

        validate_extensions(&base, &boxes, &extensions)?;
        check_generation(&base, &extensions)?;

        // kernel of the extended ray map
        let mut beta = IntMatrix::zero(base.dim, total);
        for (col, ray) in base.rays.iter().enumerate() {
            for row in 0..base.dim {
                beta[(row, col)] = ray[row].clone();
            }
        }
        for (j, ext) in extensions.iter().enumerate() {
            for row in 0..base.dim {
                beta[(row, m + j)] = ext.vector[row].clone();
            }
        }
        let kernel = kernel_basis(&beta);
        let expected_rank = total - base.dim;
        if kernel.len() != expected_rank {
            return Err(Error::GenerationFailure);
        }
        if p_basis.len() != expected_rank {
            return Err(Error::NonIntegralBasis {
                reason: format!("expected {} basis rows, got {}", expected_rank, p_basis.len()),
            });
        }
        for row in &p_basis {
            if row.len() != total {
                return Err(Error::NonIntegralBasis {
                    reason: format!("basis rows must have {} pairing coordinates", total),
                });
            }
        }

        // Gram matrix of basis rows against the kernel basis
        let gram: Vec<RatVector> = p_basis
            .iter()
            .map(|p| kernel.iter().map(|k| dot_int(p, k)).collect())
            .collect();
        match &mode {
            BasisMode::Integral => {
                for row in &gram {
                    for e in row {
                        if !is_integer(e) {
                            return Err(Error::NonIntegralBasis {
                                reason: format!("kernel pairing {} is not an integer", show_rat(e)),
                            });
                        }
                    }
                }
                let det = crate::lattice::rat_determinant(&gram);
                if det.abs() != rat(1) {
                    return Err(Error::NonIntegralBasis {
                        reason: format!("kernel pairing determinant is {}, not ±1", show_rat(&det)),
                    });
                }
            }
            BasisMode::Scaled(s) => {
                let srat = Rat::from_integer(s.clone());
                for row in &gram {
                    for e in row {
                        if !is_integer(&(e * &srat)) {
                            return Err(Error::ScaleTooSmall {
                                denom: e.denom().to_string(),
                                scale: s.to_string(),
                            });
                        }
                    }
                }
                if crate::lattice::rat_determinant(&gram).is_zero() {
                    return Err(Error::NonIntegralBasis {
                        reason: "basis rows are dependent on the relation lattice".into(),
                    });
                }
            }
        }
        let gram_inv = rat_inverse(&gram).ok_or_else(|| Error::NonIntegralBasis {
            reason: "kernel pairing matrix is singular".into(),
        })?;

        // dual basis: k̂_a = sum_b gram_inv[b][a] * kernel_b
        let dual_kernel: Vec<RatVector> = (0..expected_rank)
            .map(|a| {
                (0..total)
                    .map(|i| {
                        let mut acc = rat(0);
                        for (b, k) in kernel.iter().enumerate() {
                            acc += &gram_inv[b][a] * Rat::from_integer(k[i].clone());
                        }
                        acc
                    })
                    .collect()
            })
            .collect();

        // divisor classes in the chosen basis: m_i solves m_i · gram = kernel row i
        let divisor_in_basis: Vec<RatVector> = (0..total)
            .map(|i| {
                (0..expected_rank)
                    .map(|a| {
                        let mut acc = rat(0);
                        for (b, k) in kernel.iter().enumerate() {
                            acc += &gram_inv[b][a] * Rat::from_integer(k[i].clone());
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        if mode == BasisMode::Integral {
            for (i, row) in divisor_in_basis.iter().enumerate() {
                for e in row {
                    if !is_integer(e) {
                        return Err(Error::NonIntegralBasis {
                            reason: format!("divisor {} has non-integral coordinate {}", i + 1, show_rat(e)),
                        });
                    }
                }
            }
        }

        let rho: RatVector = (0..expected_rank)
            .map(|a| divisor_in_basis.iter().fold(rat(0), |s, row| s + &row[a]))
            .collect();

        let cone_sets = base.cone_sets();
        let mut scale = base.index_lcm();
        if let BasisMode::Scaled(s) = &mode {
            scale = scale.lcm(s);
        }
        // validate that box denominators divide the scale
        for b in &boxes {
            for c in &b.fractional_coords {
                if !(Rat::from_integer(scale.clone()) * c).is_integer() {
                    return Err(Error::ScaleTooSmall {
                        denom: c.denom().to_string(),
                        scale: scale.to_string(),
                    });
                }
            }
        }

        let mut fan = ExtendedStackyFan {
            base,
            extensions,
            p_basis,
            ext_p_indices,
            p0_index,
            kernel,
            dual_kernel,
            divisor_in_basis,
            rho,
            boxes,
            cone_sets,
            scale,
            weak_fano: false,
        };
        fan.validate_basis_cones()?;
        fan.weak_fano = fan.weak_fano_check();
        Ok(fan)
    }

    /// Sorted anticone index sets that actually constrain cone membership:
    /// complements of the maximal cones.
    pub fn minimal_anticones(&self) -> Vec<Vec<usize>> {
        let total = self.pairing_len();
        self.base
            .max_cones
            .iter()
            .map(|cone| (0..total).filter(|i| !cone.contains(i)).collect())
            .collect()
    }

    /// Is the given sorted index set an anticone, i.e. is its complement a
    /// cone of the fan? Extension indices must belong to every anticone.
    pub fn is_anticone(&self, indices: &[usize]) -> bool {
        let total = self.pairing_len();
        let complement: Vec<usize> = (0..total).filter(|i| !indices.contains(i)).collect();
        if complement.iter().any(|&i| i >= self.ray_count()) {
            return false;
        }
        self.cone_sets.contains(&complement)
    }

    fn validate_basis_cones(&self) -> Result<()> {
        let anticones = self.minimal_anticones();
        for (a, _row) in self.p_basis.iter().enumerate() {
            let coords = unit_vector(self.basis_len(), a);
            for anticone in &anticones {
                let gens: Vec<RatVector> =
                    anticone.iter().map(|&i| self.divisor_in_basis[i].clone()).collect();
                if !cone_member(&coords, &gens) {
                    return Err(Error::BasisConeCondition {
                        index: a + 1,
                        reason: format!("row is outside the closed cone of anticone {:?}", anticone),
                    });
                }
            }
        }
        // extension-part rows must lie in the cone of the extension divisors
        let ext_gens: Vec<RatVector> = (0..self.extension_count())
            .map(|j| self.divisor_in_basis[self.ray_count() + j].clone())
            .collect();
        for &a in &self.ext_p_indices {
            let coords = unit_vector(self.basis_len(), a);
            if !cone_member(&coords, &ext_gens) {
                return Err(Error::BasisConeCondition {
                    index: a + 1,
                    reason: "row is outside the cone of the extension divisor classes".into(),
                });
            }
        }
        Ok(())
    }

    /// Does the extended first Chern class lie in the closure of the
    /// extended Kähler cone?
    pub fn weak_fano_check(&self) -> bool {
        let total = self.pairing_len();
        self.cone_sets.iter().all(|cone| {
            let anticone: Vec<usize> = (0..total).filter(|i| !cone.contains(i)).collect();
            let gens: Vec<RatVector> =
                anticone.iter().map(|&i| self.divisor_in_basis[i].clone()).collect();
            cone_member(&self.rho, &gens)
        })
    }

    /// Pairing-coordinate vector of the dual element attached to extension j
    /// (0-based): coordinate m+j is 1, coordinate i is -c_ji off the
    /// anticone, 0 elsewhere. Validated to lie in the rational relation lattice.
    pub fn dual_vector(&self, j: usize) -> Result<RatVector> {
        if j >= self.extension_count() {
            return Err(Error::IndexOutOfRange { index: j, limit: self.extension_count() });
        }
        let total = self.pairing_len();
        let ext = &self.extensions[j];
        let mut d = vec![rat(0); total];
        d[self.ray_count() + j] = rat(1);
        for (i, c) in &ext.coeffs {
            d[*i] = -c.clone();
        }
        // kernel relation: sum_i d_i b_i = 0
        for row in 0..self.base.dim {
            let mut acc = rat(0);
            for (i, di) in d.iter().enumerate() {
                let b = if i < self.ray_count() {
                    &self.base.rays[i][row]
                } else {
                    &self.extensions[i - self.ray_count()].vector[row]
                };
                acc += di * Rat::from_integer(b.clone());
            }
            if !acc.is_zero() {
                return Err(Error::InconsistentAnticone {
                    index: j + 1,
                    reason: format!("kernel relation fails in coordinate {}", row),
                });
            }
        }
        Ok(d)
    }

    /// Reduction of an exponent point to its box element:
    /// v(d) = sum_i {-d_i} b_i over the rays. Requires integral extension pairings.
    pub fn reduction(&self, pairings: &RatVector) -> Result<BoxElement> {
        for j in 0..self.extension_count() {
            if !is_integer(&pairings[self.ray_count() + j]) {
                return Err(Error::NotInK { index: self.ray_count() + j });
            }
        }
        let v: Vec<Rat> = (0..self.base.dim)
            .map(|row| {
                let mut acc = rat(0);
                for i in 0..self.ray_count() {
                    let f = fract(&-pairings[i].clone());
                    acc += f * Rat::from_integer(self.base.rays[i][row].clone());
                }
                acc
            })
            .collect();
        if !v.iter().all(is_integer) {
            return Err(Error::NotABox);
        }
        let vector: Vec<Int> = v.iter().map(|q| q.to_integer()).collect();
        self.boxes
            .iter()
            .find(|b| b.vector == vector)
            .cloned()
            .ok_or(Error::NotABox)
    }

    /// Look up the sector index of a box vector.
    pub fn sector_index(&self, vector: &[Int]) -> Option<usize> {
        self.boxes.iter().position(|b| b.vector == vector)
    }

    /// Degree pairing <rho, d> = sum of pairing coordinates.
    pub fn degree(&self, pairings: &RatVector) -> Rat {
        pairings.iter().fold(rat(0), |s, c| s + c)
    }

    /// Images of the divisor classes in the unextended lattice: the
    /// restriction of each basis-coordinate row to the H^2 part. Extension
    /// divisors map to zero.
    pub fn divisor_images(&self) -> Vec<RatVector> {
        let h2 = self.h2_indices();
        self.divisor_in_basis
            .iter()
            .map(|row| h2.iter().map(|&a| row[a].clone()).collect())
            .collect()
    }

    /// H^2 part of the basis: the section class (bundles) followed by the
    /// rows whose images span H^2 of the underlying stack.
    pub fn h2_indices(&self) -> Vec<usize> {
        let r = self.basis_len() - self.extension_count() - usize::from(self.p0_index.is_some());
        let mut out = Vec::new();
        if let Some(p0) = self.p0_index {
            out.push(p0);
        }
        let skip = usize::from(self.p0_index.is_some());
        for a in 0..r {
            out.push(skip + a);
        }
        out
    }
}

fn dot_int(p: &RatVector, k: &[Int]) -> Rat {
    let mut acc = rat(0);
    for (pi, ki) in p.iter().zip(k) {
        acc += pi * Rat::from_integer(ki.clone());
    }
    acc
}

pub fn unit_vector(len: usize, at: usize) -> RatVector {
    let mut v = vec![rat(0); len];
    v[at] = rat(1);
    v
}

fn validate_extensions(
    base: &StackyFan,
    boxes: &[BoxElement],
    extensions: &[ExtensionData],
) -> Result<()> {
    let m = base.rays.len();
    let l = extensions.len();
    for (j, ext) in extensions.iter().enumerate() {
        if ext.vector.len() != base.dim {
            return Err(Error::InvalidExtension {
                index: j + 1,
                reason: "wrong dimension".into(),
            });
        }
        if ext.vector.iter().all(|c| c.is_zero()) {
            return Err(Error::InvalidExtension {
                index: j + 1,
                reason: "the zero vector gives a trivial circle action".into(),
            });
        }
        let boxed = boxes.iter().find(|b| b.vector == ext.vector).ok_or_else(|| {
            Error::InvalidExtension {
                index: j + 1,
                reason: format!("{:?} is not a box element", ext.vector),
            }
        })?;
        if boxed.age > rat(1) {
            return Err(Error::InvalidExtension {
                index: j + 1,
                reason: format!("age({:?}) = {} > 1", ext.vector, show_rat(&boxed.age)),
            });
        }
        // anticone must contain every extension slot and its complement must
        // span a cone of the fan
        for jj in 0..l {
            if !ext.anticone.contains(&(m + jj)) {
                return Err(Error::InconsistentAnticone {
                    index: j + 1,
                    reason: format!("anticone must contain extension slot {}", m + jj + 1),
                });
            }
        }
        let complement: Vec<usize> =
            (0..m + l).filter(|i| !ext.anticone.contains(i)).collect();
        if complement.iter().any(|&i| i >= m) {
            return Err(Error::InconsistentAnticone {
                index: j + 1,
                reason: "anticone complement contains an extension slot".into(),
            });
        }
        if !base.cone_sets().contains(&complement) {
            return Err(Error::InconsistentAnticone {
                index: j + 1,
                reason: format!("complement {:?} spans no cone", complement),
            });
        }
        // coefficients: supported exactly off the anticone, in [0, 1),
        // reproducing the extension vector
        let coeff_idx: Vec<usize> = ext.coeffs.iter().map(|(i, _)| *i).collect();
        if coeff_idx != complement {
            return Err(Error::InconsistentAnticone {
                index: j + 1,
                reason: format!("coefficients given for {:?}, expected {:?}", coeff_idx, complement),
            });
        }
        for (_, c) in &ext.coeffs {
            if c.is_negative() || *c >= rat(1) {
                return Err(Error::InconsistentAnticone {
                    index: j + 1,
                    reason: format!("coefficient {} outside [0, 1)", show_rat(c)),
                });
            }
        }
        for row in 0..base.dim {
            let mut acc = rat(0);
            for (i, c) in &ext.coeffs {
                acc += c * Rat::from_integer(base.rays[*i][row].clone());
            }
            if acc != Rat::from_integer(ext.vector[row].clone()) {
                return Err(Error::InconsistentAnticone {
                    index: j + 1,
                    reason: "coefficients do not reproduce the extension vector".into(),
                });
            }
        }
    }
    Ok(())
}

/// The rays together with the extension vectors must generate the ambient
/// lattice over Z.
fn check_generation(base: &StackyFan, extensions: &[ExtensionData]) -> Result<()> {
    let total = base.rays.len() + extensions.len();
    let mut m = IntMatrix::zero(base.dim, total);
    for (col, ray) in base.rays.iter().enumerate() {
        for row in 0..base.dim {
            m[(row, col)] = ray[row].clone();
        }
    }
    for (j, ext) in extensions.iter().enumerate() {
        for row in 0..base.dim {
            m[(row, base.rays.len() + j)] = ext.vector[row].clone();
        }
    }
    let snf = smith_normal_form(&m);
    let diag = snf.diagonal();
    if diag.len() < base.dim || diag.iter().take(base.dim).any(|d| d.abs() != int(1)) {
        return Err(Error::GenerationFailure);
    }
    Ok(())
}
