//! The five Euclidean imaginary-quadratic rings, their elements, the quotient field and the
//! symmetry group generated by negation and complex conjugation.
//!
//! Every ring is `Z[g]` with `g² = t·g − n`; the discriminant of the norm form is
//! `D = 4n − t²`, so `Re g = t/2` and `Im g = √D/2`.

mod element;
mod kelem;
mod symmetry;

pub use element::{is_even_gaussian, RingElement};
pub use kelem::json as kelem_json;
pub use kelem::KElem;
pub use symmetry::SymmetryElement;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::arithmetic::locate::{Locatable, Quadric};
use crate::error::{Error, Result};
use crate::util::rat_to_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ring {
    /// Gaussian integers `Z[i]`.
    #[serde(rename = "G")]
    Gaussian,
    /// Eisenstein integers `Z[ω]`, `ω = (−1 + i√3)/2`.
    #[serde(rename = "E")]
    Eisenstein,
    #[serde(rename = "Z_i√2", alias = "Zi2")]
    Sqrt2,
    #[serde(rename = "Z_(1+i√7)/2", alias = "Z7")]
    Disc7,
    #[serde(rename = "Z_(1+i√11)/2", alias = "Z11")]
    Disc11,
}

/// Static description of a ring: generator, norm form and `ν(Γ)`.
#[derive(Debug, Clone, Serialize)]
pub struct RingDescriptor {
    pub id: &'static str,
    pub generator: &'static str,
    pub trace: i64,
    pub norm: i64,
    /// `ν(Γ)²`, the least norm exceeding 1.
    pub nu_squared: i64,
    pub nu: &'static str,
}

impl Ring {
    pub const ALL: [Ring; 5] = [
        Ring::Gaussian,
        Ring::Eisenstein,
        Ring::Sqrt2,
        Ring::Disc7,
        Ring::Disc11,
    ];

    /// Trace of the generator.
    pub fn t(self) -> i64 {
        match self {
            Ring::Gaussian | Ring::Sqrt2 => 0,
            Ring::Eisenstein => -1,
            Ring::Disc7 | Ring::Disc11 => 1,
        }
    }

    /// Norm of the generator.
    pub fn n(self) -> i64 {
        match self {
            Ring::Gaussian | Ring::Eisenstein => 1,
            Ring::Sqrt2 | Ring::Disc7 => 2,
            Ring::Disc11 => 3,
        }
    }

    /// `4n − t²`, so that `|Im g| = √D / 2`.
    pub fn d(self) -> i64 {
        4 * self.n() - self.t() * self.t()
    }

    /// Discriminant of the field: the squarefree kernel times 1 or 4.
    pub fn field_discriminant(self) -> i64 {
        match self {
            Ring::Gaussian => -4,
            Ring::Eisenstein => -3,
            Ring::Sqrt2 => -8,
            Ring::Disc7 => -7,
            Ring::Disc11 => -11,
        }
    }

    pub fn nu_squared(self) -> i64 {
        match self {
            Ring::Gaussian | Ring::Sqrt2 | Ring::Disc7 => 2,
            Ring::Eisenstein | Ring::Disc11 => 3,
        }
    }

    pub fn nu(self) -> f64 {
        (self.nu_squared() as f64).sqrt()
    }

    pub fn id(self) -> &'static str {
        match self {
            Ring::Gaussian => "G",
            Ring::Eisenstein => "E",
            Ring::Sqrt2 => "Z_i√2",
            Ring::Disc7 => "Z_(1+i√7)/2",
            Ring::Disc11 => "Z_(1+i√11)/2",
        }
    }

    /// Symbol used for the generator when printing elements.
    pub fn gen_symbol(self) -> &'static str {
        match self {
            Ring::Gaussian => "i",
            Ring::Eisenstein => "w",
            _ => "g",
        }
    }

    pub fn descriptor(self) -> RingDescriptor {
        let generator = match self {
            Ring::Gaussian => "i",
            Ring::Eisenstein => "(-1+i√3)/2",
            Ring::Sqrt2 => "i√2",
            Ring::Disc7 => "(1+i√7)/2",
            Ring::Disc11 => "(1+i√11)/2",
        };
        RingDescriptor {
            id: self.id(),
            generator,
            trace: self.t(),
            norm: self.n(),
            nu_squared: self.nu_squared(),
            nu: if self.nu_squared() == 2 { "√2" } else { "√3" },
        }
    }

    /// Cartesian coordinates of `u + v·g`.
    pub fn to_cartesian(self, u: f64, v: f64) -> (f64, f64) {
        let t = self.t() as f64;
        let d = self.d() as f64;
        (u + t * v / 2.0, v * d.sqrt() / 2.0)
    }

    /// Lattice coordinates `(u, v)` with `x + iy = u + v·g`.
    pub fn from_cartesian(self, x: f64, y: f64) -> (f64, f64) {
        let v = 2.0 * y / (self.d() as f64).sqrt();
        (x - self.t() as f64 * v / 2.0, v)
    }

    pub fn units(self) -> Vec<RingElement> {
        let pairs: &[(i64, i64)] = match self {
            Ring::Gaussian => &[(1, 0), (0, 1), (-1, 0), (0, -1)],
            Ring::Eisenstein => &[(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)],
            _ => &[(1, 0), (-1, 0)],
        };
        pairs
            .iter()
            .map(|&(a, b)| RingElement::from_i64(self, a, b))
            .collect()
    }

    /// All elements of norm at most `bound`, by exhaustive search of a bounding box.
    pub fn elements_of_norm_at_most(self, bound: i64) -> Vec<RingElement> {
        let d = self.d() as f64;
        // |v|·√D/2 ≤ √bound and |u + tv/2| ≤ √bound.
        let vmax = (2.0 * (bound as f64).sqrt() / d.sqrt()).floor() as i64 + 1;
        let umax = (bound as f64).sqrt().floor() as i64 + vmax + 1;
        let mut out = Vec::new();
        for b in -vmax..=vmax {
            for a in -umax..=umax {
                let x = RingElement::from_i64(self, a, b);
                if x.norm() <= BigInt::from(bound) {
                    out.push(x);
                }
            }
        }
        out.sort_by(|x, y| x.norm().cmp(&y.norm()).then(y.lex_cmp(x)));
        out
    }

    /// Recomputes `ν(Γ)²` as the least norm exceeding 1.
    pub fn nu_squared_by_enumeration(self) -> i64 {
        self.elements_of_norm_at_most(4)
            .iter()
            .filter_map(|x| x.norm().to_i64())
            .filter(|&n| n > 1)
            .min()
            .expect("a ring element of norm in (1, 4]")
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Ring {
    type Err = Error;
    fn from_str(s: &str) -> Result<Ring> {
        match s.trim() {
            "G" | "g" | "Z[i]" => Ok(Ring::Gaussian),
            "E" | "e" | "Z[w]" => Ok(Ring::Eisenstein),
            "Z_i√2" | "Zi2" | "Z[i√2]" => Ok(Ring::Sqrt2),
            "Z_(1+i√7)/2" | "Z7" => Ok(Ring::Disc7),
            "Z_(1+i√11)/2" | "Z11" => Ok(Ring::Disc11),
            other => Err(Error::Parse(format!("unknown ring {other:?}"))),
        }
    }
}

/// The ring elements within `radius` of `center`, i.e. with `|γ − center|² ≤ radius2`.
///
/// Membership is decided exactly for exact centers; a ball center whose membership test
/// straddles a boundary yields `PrecisionExhausted`.
pub fn elements_in_disc<P: Locatable>(
    ring: Ring,
    center: &P,
    radius2: &BigRational,
) -> Result<Vec<RingElement>> {
    if radius2.is_negative() {
        return Err(Error::ParameterOutOfRange("negative squared radius".into()));
    }
    let (cx, cy) = center.approx();
    let r = rat_to_f64(radius2).sqrt() + center.approx_radius() + 1e-9 * (1.0 + cx.abs() + cy.abs());
    let (_, cv) = ring.from_cartesian(cx, cy);
    let d = ring.d() as f64;
    let vr = 2.0 * r / d.sqrt();
    let mut out = Vec::new();
    for b in (cv - vr).floor() as i64 - 1..=(cv + vr).ceil() as i64 + 1 {
        let half = ring.t() as f64 * (b as f64) / 2.0;
        for a in (cx - half - r).floor() as i64 - 1..=(cx - half + r).ceil() as i64 + 1 {
            let g = RingElement::from_i64(ring, a, b);
            let q = Quadric::disc(&KElem::from(&g), radius2.clone());
            match center.quadric_sign(&q) {
                Some(std::cmp::Ordering::Greater) => {}
                Some(_) => out.push(g),
                None => return Err(Error::PrecisionExhausted { bits: center.precision_bits() }),
            }
        }
    }
    out.sort_by(|x, y| x.lex_cmp(y));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_matches_enumeration() {
        for r in Ring::ALL {
            assert_eq!(r.nu_squared_by_enumeration(), r.nu_squared(), "{r}");
        }
    }

    #[test]
    fn ring_ids_round_trip() {
        for r in Ring::ALL {
            assert_eq!(r.id().parse::<Ring>().unwrap(), r);
            let j = serde_json::to_string(&r).unwrap();
            assert_eq!(serde_json::from_str::<Ring>(&j).unwrap(), r);
        }
        assert_eq!(serde_json::from_str::<Ring>("\"Z7\"").unwrap(), Ring::Disc7);
    }

    #[test]
    fn unit_counts() {
        assert_eq!(Ring::Gaussian.units().len(), 4);
        assert_eq!(Ring::Eisenstein.units().len(), 6);
        for r in Ring::ALL {
            assert!(r.units().iter().all(|u| u.is_unit()));
        }
    }

    #[test]
    fn discs_around_zero() {
        let zero = KElem::zero(Ring::Gaussian);
        let one = BigRational::from_integer(1.into());
        let two = BigRational::from_integer(2.into());
        assert_eq!(elements_in_disc(Ring::Gaussian, &zero, &one).unwrap().len(), 5);
        assert_eq!(elements_in_disc(Ring::Gaussian, &zero, &two).unwrap().len(), 9);
        let ez = KElem::zero(Ring::Eisenstein);
        let e = elements_in_disc(Ring::Eisenstein, &ez, &one).unwrap();
        assert_eq!(e.len(), 7);
        for u in Ring::Eisenstein.units() {
            assert!(e.contains(&u));
        }
    }

    #[test]
    fn euclidean_covering_on_grid() {
        // Every grid point of a fundamental cell has a ring element at distance < 1.
        for r in Ring::ALL {
            for i in 0..40 {
                for j in 0..40 {
                    let u = BigRational::new(BigInt::from(2 * i + 1), BigInt::from(80));
                    let v = BigRational::new(BigInt::from(2 * j + 1), BigInt::from(80));
                    let z = KElem::from_coords(r, u, v);
                    let near = z.nearest_element();
                    assert!((&z - &KElem::from(&near)).norm() < BigRational::from_integer(1.into()));
                }
            }
        }
    }
}
