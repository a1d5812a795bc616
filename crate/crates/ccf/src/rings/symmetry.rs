use serde::{Deserialize, Serialize};
use std::fmt;

use super::{KElem, RingElement};

/// One of the four maps generated by `z ↦ −z` and `z ↦ z̄`; conjugation is applied first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymmetryElement {
    pub negate: bool,
    pub conjugate: bool,
}

impl SymmetryElement {
    pub const IDENTITY: Self = SymmetryElement {
        negate: false,
        conjugate: false,
    };
    pub const NEGATE: Self = SymmetryElement {
        negate: true,
        conjugate: false,
    };
    pub const CONJUGATE: Self = SymmetryElement {
        negate: false,
        conjugate: true,
    };
    /// `σ_y(z) = −z̄`, the reflection in the imaginary axis.
    pub const SIGMA_Y: Self = SymmetryElement {
        negate: true,
        conjugate: true,
    };

    pub const ALL: [Self; 4] = [Self::IDENTITY, Self::NEGATE, Self::CONJUGATE, Self::SIGMA_Y];

    /// `self ∘ other`; the group is abelian.
    pub fn compose(self, other: Self) -> Self {
        SymmetryElement {
            negate: self.negate ^ other.negate,
            conjugate: self.conjugate ^ other.conjugate,
        }
    }

    pub fn pow(self, k: usize) -> Self {
        if k % 2 == 0 {
            Self::IDENTITY
        } else {
            self
        }
    }

    pub fn apply(self, x: &RingElement) -> RingElement {
        let y = if self.conjugate { x.conj() } else { x.clone() };
        if self.negate {
            -y
        } else {
            y
        }
    }

    pub fn apply_k(self, x: &KElem) -> KElem {
        let y = if self.conjugate { x.conj() } else { x.clone() };
        if self.negate {
            -y
        } else {
            y
        }
    }

    pub fn apply_f64(self, (x, y): (f64, f64)) -> (f64, f64) {
        let y = if self.conjugate { -y } else { y };
        if self.negate {
            (-x, -y)
        } else {
            (x, y)
        }
    }
}

impl fmt::Display for SymmetryElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match (self.negate, self.conjugate) {
            (false, false) => "id",
            (true, false) => "neg",
            (false, true) => "conj",
            (true, true) => "sigma_y",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::Ring;

    #[test]
    fn sigma_y_on_one_plus_i() {
        let x = RingElement::from_i64(Ring::Gaussian, 1, 1);
        let s = SymmetryElement::SIGMA_Y;
        assert_eq!(s.apply(&x), RingElement::from_i64(Ring::Gaussian, -1, 1));
        assert_eq!(s.apply(&s.apply(&x)), x);
        assert_eq!(SymmetryElement::IDENTITY.apply(&x), x);
    }

    #[test]
    fn klein_four_group() {
        for a in SymmetryElement::ALL {
            assert_eq!(a.compose(a), SymmetryElement::IDENTITY);
            assert_eq!(a.compose(SymmetryElement::IDENTITY), a);
            for b in SymmetryElement::ALL {
                assert_eq!(a.compose(b), b.compose(a));
                let c = a.compose(b);
                assert!(SymmetryElement::ALL.contains(&c));
            }
        }
        assert_eq!(
            SymmetryElement::NEGATE.compose(SymmetryElement::CONJUGATE),
            SymmetryElement::SIGMA_Y
        );
    }

    #[test]
    fn symmetries_preserve_lattices() {
        for ring in [Ring::Gaussian, Ring::Eisenstein] {
            let disc = ring.elements_of_norm_at_most(100);
            for s in SymmetryElement::ALL {
                let mut image: Vec<_> = disc.iter().map(|x| s.apply(x)).collect();
                image.sort_by(|x, y| x.lex_cmp(y));
                let mut sorted = disc.clone();
                sorted.sort_by(|x, y| x.lex_cmp(y));
                assert_eq!(image, sorted, "{ring} {s}");
            }
        }
    }
}
