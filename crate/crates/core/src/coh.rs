//! Truncated orbifold cohomology classes and the fan's relation ideal.
//!
//! A class is a sector-indexed polynomial in the ray divisor symbols with
//! rational coefficients. Equality is decided by reducing against the ideal
//! spanned degree by degree by: linear relations times monomials,
//! Stanley-Reisner monomials times monomials, and per-sector annihilated
//! divisors times monomials. Reduction is exact linear algebra with a fixed
//! lexicographic pivot order, so representatives are canonical.

use crate::error::{Error, Result};
use crate::fan::ExtendedStackyFan;
use crate::num::{rat, Rat};
use num_traits::Zero;
use std::collections::BTreeMap;

/// Exponent vector over the ray divisor symbols.
pub type Monomial = Vec<u16>;

/// Sector-indexed divisor polynomial; kept in reduced normal form by all
/// operations that take a `RelationIdeal`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CohClass {
    pub terms: BTreeMap<(usize, Monomial), Rat>,
}

impl CohClass {
    pub fn zero() -> Self {
        CohClass::default()
    }

    pub fn unit(sector: usize, ray_count: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((sector, vec![0u16; ray_count]), rat(1));
        CohClass { terms }
    }

    pub fn scalar(sector: usize, ray_count: usize, q: Rat) -> Self {
        if q.is_zero() {
            return CohClass::zero();
        }
        let mut terms = BTreeMap::new();
        terms.insert((sector, vec![0u16; ray_count]), q);
        CohClass { terms }
    }

    /// Single divisor symbol on the untwisted sector.
    pub fn divisor(i: usize, ray_count: usize) -> Self {
        let mut mono = vec![0u16; ray_count];
        mono[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert((0usize, mono), rat(1));
        CohClass { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every term is a constant multiple of an untwisted unit.
    pub fn is_scalar(&self) -> bool {
        self.terms
            .keys()
            .all(|(s, mono)| *s == 0 && mono.iter().all(|&e| e == 0))
    }

    pub fn is_untwisted(&self) -> bool {
        self.terms.keys().all(|(s, _)| *s == 0)
    }

    /// Coefficient of the untwisted unit.
    pub fn scalar_part(&self, ray_count: usize) -> Rat {
        self.terms
            .get(&(0usize, vec![0u16; ray_count]))
            .cloned()
            .unwrap_or_else(|| rat(0))
    }

    pub fn add_assign(&mut self, other: &CohClass) {
        for (key, coeff) in &other.terms {
            let entry = self.terms.entry(key.clone()).or_insert_with(|| rat(0));
            *entry += coeff;
            if entry.is_zero() {
                self.terms.remove(key);
            }
        }
    }

    pub fn scale(&self, q: &Rat) -> CohClass {
        if q.is_zero() {
            return CohClass::zero();
        }
        CohClass {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c * q)).collect(),
        }
    }

    pub fn sub(&self, other: &CohClass) -> CohClass {
        let mut out = self.clone();
        out.add_assign(&other.scale(&rat(-1)));
        out
    }
}

/// Presentation of the sector modules: linear relations, Stanley-Reisner
/// generators, and per-sector annihilated divisors, with precomputed
/// row-echelon reducers per sector and monomial degree.
#[derive(Clone, Debug)]
pub struct RelationIdeal {
    pub ray_count: usize,
    /// Real cohomological degree cap (divisors have degree 2).
    pub degree_cap: Rat,
    /// Coefficient rows of the n linear relations over the divisor symbols.
    pub linear_relations: Vec<Vec<Rat>>,
    /// Minimal non-faces, as sorted ray index sets.
    pub sr_monomials: Vec<Vec<usize>>,
    /// Per sector: divisors i whose product with the sector unit vanishes
    /// because {i} together with the sector's minimal cone spans no cone.
    pub sector_kill: Vec<Vec<usize>>,
    /// Twice the age of each sector.
    pub sector_age2: Vec<Rat>,
    /// reducers[sector][monomial degree] = echelonized relation rows.
    reducers: Vec<Vec<Reducer>>,
    /// monomial bases per degree (shared across sectors).
    bases: Vec<Vec<Monomial>>,
}

#[derive(Clone, Debug)]
struct Reducer {
    /// (pivot column, normalized row) in elimination order.
    rows: Vec<(usize, Vec<Rat>)>,
}

impl RelationIdeal {
    pub fn for_fan(fan: &ExtendedStackyFan) -> Self {
        // default cap 2(n+1): one divisor degree of headroom over the top
        // real degree 2n of the stack
        Self::with_cap(fan, Rat::from_integer(((fan.base.dim + 1) * 2).into()))
    }

    pub fn with_cap(fan: &ExtendedStackyFan, degree_cap: Rat) -> Self {
        let m = fan.ray_count();
        let n = fan.base.dim;
        let linear_relations: Vec<Vec<Rat>> = (0..n)
            .map(|row| {
                (0..m)
                    .map(|i| Rat::from_integer(fan.base.rays[i][row].clone()))
                    .collect()
            })
            .collect();
        let sr_monomials = minimal_non_faces(fan);
        let sector_kill: Vec<Vec<usize>> = fan
            .boxes
            .iter()
            .map(|b| {
                (0..m)
                    .filter(|&i| {
                        if b.minimal_cone.contains(&i) {
                            return false;
                        }
                        let mut set = b.minimal_cone.clone();
                        set.push(i);
                        set.sort_unstable();
                        !fan.cone_sets.contains(&set)
                    })
                    .collect()
            })
            .collect();
        let sector_age2: Vec<Rat> = fan.boxes.iter().map(|b| &b.age * rat(2)).collect();

        let max_k = sector_age2
            .iter()
            .map(|a2| {
                let room = &degree_cap - a2;
                if room < rat(0) {
                    0usize
                } else {
                    (room / rat(2)).floor().to_integer().try_into().unwrap_or(0usize)
                }
            })
            .max()
            .unwrap_or(0);
        let bases: Vec<Vec<Monomial>> = (0..=max_k).map(|k| monomials_of_degree(m, k)).collect();

        let mut ideal = RelationIdeal {
            ray_count: m,
            degree_cap,
            linear_relations,
            sr_monomials,
            sector_kill,
            sector_age2,
            reducers: Vec::new(),
            bases,
        };
        ideal.reducers = (0..ideal.sector_age2.len())
            .map(|s| {
                let kmax = ideal.sector_max_degree(s);
                (0..=kmax).map(|k| ideal.build_reducer(s, k)).collect()
            })
            .collect();
        ideal
    }

    fn sector_max_degree(&self, sector: usize) -> usize {
        let room = &self.degree_cap - &self.sector_age2[sector];
        if room < rat(0) {
            return 0;
        }
        (room / rat(2)).floor().to_integer().try_into().unwrap_or(0usize)
    }

    fn build_reducer(&self, sector: usize, k: usize) -> Reducer {
        let basis = &self.bases[k];
        let index: BTreeMap<&Monomial, usize> =
            basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        // linear relations times degree k-1 monomials
        if k >= 1 {
            for rel in &self.linear_relations {
                for mu in &self.bases[k - 1] {
                    let mut row = vec![rat(0); basis.len()];
                    for (i, c) in rel.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let mut mono = mu.clone();
                        mono[i] += 1;
                        row[index[&mono]] += c.clone();
                    }
                    rows.push(row);
                }
            }
            // killed divisors times degree k-1 monomials
            for &i in &self.sector_kill[sector] {
                for mu in &self.bases[k - 1] {
                    let mut row = vec![rat(0); basis.len()];
                    let mut mono = mu.clone();
                    mono[i] += 1;
                    row[index[&mono]] = rat(1);
                    rows.push(row);
                }
            }
        }
        // Stanley-Reisner monomials times complementary-degree monomials
        for sr in &self.sr_monomials {
            if sr.len() > k {
                continue;
            }
            for mu in &self.bases[k - sr.len()] {
                let mut row = vec![rat(0); basis.len()];
                let mut mono = mu.clone();
                for &i in sr {
                    mono[i] += 1;
                }
                row[index[&mono]] = rat(1);
                rows.push(row);
            }
        }
        Reducer { rows: echelonize(rows) }
    }

    /// Canonical representative modulo the ideal slice; drops terms above the
    /// degree cap. Idempotent and linear.
    pub fn reduce(&self, c: &CohClass) -> CohClass {
        // group terms by (sector, degree)
        let mut groups: BTreeMap<(usize, usize), Vec<(Monomial, Rat)>> = BTreeMap::new();
        for ((sector, mono), coeff) in &c.terms {
            let k: usize = mono.iter().map(|&e| e as usize).sum();
            let real_degree =
                &self.sector_age2[*sector] + Rat::from_integer((2 * k).into());
            if real_degree > self.degree_cap {
                continue;
            }
            groups
                .entry((*sector, k))
                .or_default()
                .push((mono.clone(), coeff.clone()));
        }
        let mut out = CohClass::zero();
        for ((sector, k), terms) in groups {
            let basis = &self.bases[k];
            let index: BTreeMap<&Monomial, usize> =
                basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
            let mut vec = vec![rat(0); basis.len()];
            for (mono, coeff) in &terms {
                vec[index[mono]] += coeff.clone();
            }
            let reducer = &self.reducers[sector][k];
            for (pivot, row) in &reducer.rows {
                if vec[*pivot].is_zero() {
                    continue;
                }
                let f = vec[*pivot].clone();
                for (j, r) in row.iter().enumerate() {
                    if !r.is_zero() {
                        let t = &f * r;
                        vec[j] = &vec[j] - t;
                    }
                }
            }
            for (j, q) in vec.into_iter().enumerate() {
                if !q.is_zero() {
                    out.terms.insert((sector, basis[j].clone()), q);
                }
            }
        }
        out
    }

    /// Module action: multiply by an untwisted divisor polynomial, truncate,
    /// reduce. At least one factor must be untwisted; sector-sector cup
    /// products are out of scope.
    pub fn multiply(&self, a: &CohClass, b: &CohClass) -> CohClass {
        let (poly, class) = if a.is_untwisted() {
            (a, b)
        } else if b.is_untwisted() {
            (b, a)
        } else {
            panic!("product of two twisted classes is not defined here");
        };
        let mut out = CohClass::zero();
        for ((ps, pm), pc) in &poly.terms {
            debug_assert_eq!(*ps, 0);
            for ((cs, cm), cc) in &class.terms {
                let mono: Monomial = pm.iter().zip(cm).map(|(x, y)| x + y).collect();
                let coeff = pc * cc;
                let key = (*cs, mono);
                let entry = out.terms.entry(key.clone()).or_insert_with(|| rat(0));
                *entry += coeff;
                if entry.is_zero() {
                    out.terms.remove(&key);
                }
            }
        }
        self.reduce(&out)
    }

    /// Real cohomological degrees present in a class, each 2*age + 2*#factors.
    pub fn degrees(&self, c: &CohClass) -> Vec<Rat> {
        let mut ds: Vec<Rat> = c
            .terms
            .keys()
            .map(|(s, mono)| {
                let k: usize = mono.iter().map(|&e| e as usize).sum();
                &self.sector_age2[*s] + Rat::from_integer((2 * k).into())
            })
            .collect();
        ds.sort();
        ds.dedup();
        ds
    }
}

/// Restrict a class on an orbifiber bundle to its fiber: the two section-ray
/// symbols map to zero, the remaining ray symbols map to the fiber divisors,
/// and each bundle sector maps through `sector_map`.
pub fn pullback_fiber(
    c: &CohClass,
    new_ray_positions: (usize, usize),
    sector_map: &[usize],
    fiber_ideal: &RelationIdeal,
) -> CohClass {
    let (n1, n2) = new_ray_positions;
    let mut out = CohClass::zero();
    for ((sector, mono), coeff) in &c.terms {
        if mono[n1] > 0 || mono[n2] > 0 {
            continue; // section classes restrict to zero
        }
        let fiber_mono: Monomial = mono
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != n1 && *i != n2)
            .map(|(_, e)| *e)
            .collect();
        let key = (sector_map[*sector], fiber_mono);
        let entry = out.terms.entry(key.clone()).or_insert_with(|| rat(0));
        *entry += coeff.clone();
        if entry.is_zero() {
            out.terms.remove(&key);
        }
    }
    fiber_ideal.reduce(&out)
}

/// Solve for a divisor polynomial representing each listed basis class: a
/// vector lambda with sum_i lambda_i D_i = p_a in the class lattice.
pub fn basis_classes_as_divisors(fan: &ExtendedStackyFan) -> Result<Vec<CohClass>> {
    let m = fan.ray_count();
    let h2 = fan.h2_indices();
    // system rows: for each h2 column b, sum_i lambda_i m[i][b] = delta_ab
    let a_rows: Vec<Vec<Rat>> = h2
        .iter()
        .map(|&b| (0..m).map(|i| fan.divisor_in_basis[i][b].clone()).collect())
        .collect();
    let mut out = Vec::new();
    for (idx, _) in h2.iter().enumerate() {
        let rhs: Vec<Rat> = (0..h2.len()).map(|b| if b == idx { rat(1) } else { rat(0) }).collect();
        let (lambda, _null) = crate::lattice::solve_rational(&a_rows, &rhs).ok_or_else(|| {
            Error::Validation {
                invariant: "H^2 basis representable by divisors".into(),
                detail: format!("basis class {} is not in the divisor span", idx),
            }
        })?;
        let mut class = CohClass::zero();
        for (i, l) in lambda.iter().enumerate() {
            if !l.is_zero() {
                class.add_assign(&CohClass::divisor(i, m).scale(l));
            }
        }
        out.push(class);
    }
    Ok(out)
}

fn minimal_non_faces(fan: &ExtendedStackyFan) -> Vec<Vec<usize>> {
    let m = fan.ray_count();
    let mut non_faces = Vec::new();
    for mask in 1u32..(1 << m) {
        let set: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        if fan.cone_sets.contains(&set) {
            continue;
        }
        // minimal: every proper subset obtained by dropping one element is a face
        let minimal = set.iter().all(|drop| {
            let sub: Vec<usize> = set.iter().copied().filter(|i| i != drop).collect();
            fan.cone_sets.contains(&sub)
        });
        if minimal {
            non_faces.push(set);
        }
    }
    non_faces
}

fn monomials_of_degree(vars: usize, k: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = vec![0u16; vars];
    fill_monomials(&mut out, &mut current, 0, k);
    out.sort();
    out
}

fn fill_monomials(out: &mut Vec<Monomial>, current: &mut Monomial, pos: usize, remaining: usize) {
    if pos == current.len() {
        if remaining == 0 {
            out.push(current.clone());
        }
        return;
    }
    if pos + 1 == current.len() {
        current[pos] = remaining as u16;
        out.push(current.clone());
        current[pos] = 0;
        return;
    }
    for e in 0..=remaining {
        current[pos] = e as u16;
        fill_monomials(out, current, pos + 1, remaining - e);
    }
    current[pos] = 0;
}

/// Row-echelonize with leftmost-pivot (lexicographic monomial) order; rows
/// are normalized to pivot 1 and fully back-substituted.
fn echelonize(mut rows: Vec<Vec<Rat>>) -> Vec<(usize, Vec<Rat>)> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut result: Vec<(usize, Vec<Rat>)> = Vec::new();
    for col in 0..cols {
        // eliminate existing pivots from all remaining rows lazily: pick a row
        // with nonzero entry at col after reduction by chosen rows
        let mut chosen: Option<Vec<Rat>> = None;
        for row in rows.iter_mut() {
            for (pivot, prow) in &result {
                if !row[*pivot].is_zero() {
                    let f = row[*pivot].clone();
                    for (j, p) in prow.iter().enumerate() {
                        if !p.is_zero() {
                            let t = &f * p;
                            row[j] = &row[j] - t;
                        }
                    }
                }
            }
            if chosen.is_none() && !row[col].is_zero() {
                chosen = Some(row.clone());
            }
        }
        if let Some(mut r) = chosen {
            let inv = r[col].clone();
            for v in r.iter_mut() {
                *v = &*v / &inv;
            }
            // back-substitute into earlier rows
            for (_, prow) in result.iter_mut() {
                if !prow[col].is_zero() {
                    let f = prow[col].clone();
                    for (j, rv) in r.iter().enumerate() {
                        if !rv.is_zero() {
                            let t = &f * rv;
                            prow[j] = &prow[j] - t;
                        }
                    }
                }
            }
            result.push((col, r));
        }
    }
    result
}
