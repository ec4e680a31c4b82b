//! Fan-description files.
//!
//! A model is a JSON object with exact rationals written as `"p/q"` strings
//! (plain integers also accepted); ray and cone indices are 1-based:
//!
//! ```json
//! {
//!   "rank": 1,
//!   "rays": [[1], [-2]],
//!   "max_cones": [[1], [2]],
//!   "extension": [ { "vector": [-1], "anticone": [1, 3], "c": ["1/2"] } ],
//!   "p_basis": [["0", "1", "1"], ["0", "0", "1"]],
//!   "caps": ["2", "2"],
//!   "z_window": [-4, 0]
//! }
//! ```
//!
//! `p_basis` rows are pairing-coordinate representatives, the nef part first
//! and the extension part last; `c` lists the coefficients over the rays
//! outside the anticone, in increasing ray order.

use crate::error::{Error, Result};
use crate::fan::{BasisMode, ExtendedStackyFan, ExtensionData, StackyFan};
use crate::lattice::RatVector;
use crate::num::{parse_rat, Int, Rat};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RatLit {
    Int(i64),
    Str(String),
}

impl RatLit {
    fn to_rat(&self, field: &str) -> Result<Rat> {
        match self {
            RatLit::Int(n) => Ok(crate::num::rat(*n)),
            RatLit::Str(s) => {
                parse_rat(s).ok_or_else(|| Error::Parse(format!("{}: bad rational '{}'", field, s)))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
struct ExtensionFile {
    vector: Vec<i64>,
    anticone: Vec<usize>,
    c: Vec<RatLit>,
}

#[derive(Debug, Deserialize)]
struct ModelFile {
    rank: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    #[serde(default)]
    extension: Vec<ExtensionFile>,
    p_basis: Vec<Vec<RatLit>>,
    #[serde(default)]
    caps: Option<Vec<RatLit>>,
    #[serde(default)]
    z_window: Option<[i64; 2]>,
}

/// A parsed and fully validated model plus its optional run defaults.
#[derive(Debug)]
pub struct ParsedInput {
    pub fan: ExtendedStackyFan,
    pub caps: Option<RatVector>,
    pub z_window: Option<(i64, i64)>,
}

pub fn parse_input(text: &str) -> Result<ParsedInput> {
    let file: ModelFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("json: {}", e)))?;
    let m = file.rays.len();
    let l = file.extension.len();

    let rays: Vec<Vec<Int>> = file
        .rays
        .iter()
        .map(|r| r.iter().map(|&v| Int::from(v)).collect())
        .collect();
    let mut max_cones = Vec::with_capacity(file.max_cones.len());
    for cone in &file.max_cones {
        let mut c = Vec::with_capacity(cone.len());
        for &i in cone {
            if i == 0 || i > m {
                return Err(Error::Parse(format!("max_cones: ray index {} out of 1..={}", i, m)));
            }
            c.push(i - 1);
        }
        c.sort_unstable();
        max_cones.push(c);
    }
    let base = StackyFan::new(file.rank, rays, max_cones)?;

    let mut extensions = Vec::with_capacity(l);
    for (j, e) in file.extension.iter().enumerate() {
        let vector: Vec<Int> = e.vector.iter().map(|&v| Int::from(v)).collect();
        let mut anticone = Vec::with_capacity(e.anticone.len());
        for &i in &e.anticone {
            if i == 0 || i > m + l {
                return Err(Error::Parse(format!(
                    "extension {}: anticone index {} out of 1..={}",
                    j + 1,
                    i,
                    m + l
                )));
            }
            anticone.push(i - 1);
        }
        anticone.sort_unstable();
        let complement: Vec<usize> = (0..m + l).filter(|i| !anticone.contains(i)).collect();
        if complement.len() != e.c.len() {
            return Err(Error::Parse(format!(
                "extension {}: {} coefficients for {} rays outside the anticone",
                j + 1,
                e.c.len(),
                complement.len()
            )));
        }
        let coeffs: Vec<(usize, Rat)> = complement
            .iter()
            .zip(&e.c)
            .map(|(&i, lit)| Ok((i, lit.to_rat("extension.c")?)))
            .collect::<Result<_>>()?;
        extensions.push(ExtensionData { vector, anticone, coeffs });
    }

    let p_basis: Vec<RatVector> = file
        .p_basis
        .iter()
        .map(|row| row.iter().map(|lit| lit.to_rat("p_basis")).collect::<Result<RatVector>>())
        .collect::<Result<_>>()?;
    // the extension part of the basis is its last l rows
    let r_plus_l = p_basis.len();
    if r_plus_l < l {
        return Err(Error::Parse(format!(
            "p_basis has {} rows but there are {} extension elements",
            r_plus_l, l
        )));
    }
    let ext_p_indices: Vec<usize> = (r_plus_l - l..r_plus_l).collect();

    let fan =
        ExtendedStackyFan::build(base, extensions, p_basis, ext_p_indices, None, BasisMode::Integral)?;

    let caps = match &file.caps {
        Some(lits) => {
            if lits.len() != fan.basis_len() {
                return Err(Error::Parse(format!(
                    "caps has {} entries, expected {}",
                    lits.len(),
                    fan.basis_len()
                )));
            }
            Some(lits.iter().map(|l| l.to_rat("caps")).collect::<Result<RatVector>>()?)
        }
        None => None,
    };
    let z_window = file.z_window.map(|[a, b]| (a, b));
    Ok(ParsedInput { fan, caps, z_window })
}
