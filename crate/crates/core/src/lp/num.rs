//! Exact rationals with a machine-word fast path.
//!
//! Values that fit `i64 / i64` stay inline and are combined in `i128`;
//! anything larger is promoted to a `BigRational` and demoted again once it
//! fits. Results are always exact and in lowest terms.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Q {
    /// Lowest terms, positive denominator.
    Small(i64, i64),
    Big(Rational),
}

impl Q {
    pub(crate) const ZERO: Q = Q::Small(0, 1);
    pub(crate) const ONE: Q = Q::Small(1, 1);

    fn reduce(n: i128, d: i128) -> Q {
        debug_assert!(d != 0);
        let (mut n, mut d) = if d < 0 { (-n, -d) } else { (n, d) };
        let g = n.gcd(&d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Q::Small(n, d),
            _ => Q::Big(Rational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_big(r: Rational) -> Q {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Q::Small(n, d),
            _ => Q::Big(r),
        }
    }

    pub(crate) fn to_rational(&self) -> Rational {
        match self {
            Q::Small(n, d) => Rational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Q::Big(r) => r.clone(),
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        match self {
            Q::Small(n, _) => *n == 0,
            Q::Big(r) => r.is_zero(),
        }
    }

    pub(crate) fn is_negative(&self) -> bool {
        match self {
            Q::Small(n, _) => *n < 0,
            Q::Big(r) => r.is_negative(),
        }
    }

    pub(crate) fn is_positive(&self) -> bool {
        match self {
            Q::Small(n, _) => *n > 0,
            Q::Big(r) => r.is_positive(),
        }
    }

    fn big(&self) -> std::borrow::Cow<'_, Rational> {
        match self {
            Q::Small(..) => std::borrow::Cow::Owned(self.to_rational()),
            Q::Big(r) => std::borrow::Cow::Borrowed(r),
        }
    }
}

impl From<&Rational> for Q {
    fn from(r: &Rational) -> Q {
        Q::from_big(r.clone())
    }
}

impl<'a> Add<&'a Q> for &'a Q {
    type Output = Q;
    fn add(self, rhs: &Q) -> Q {
        match (self, rhs) {
            (Q::Small(a, b), Q::Small(c, d)) => {
                if b == d {
                    Q::reduce(*a as i128 + *c as i128, *b as i128)
                } else {
                    Q::reduce(
                        *a as i128 * *d as i128 + *c as i128 * *b as i128,
                        *b as i128 * *d as i128,
                    )
                }
            }
            _ => Q::from_big(self.big().as_ref() + rhs.big().as_ref()),
        }
    }
}

impl<'a> Sub<&'a Q> for &'a Q {
    type Output = Q;
    fn sub(self, rhs: &Q) -> Q {
        self + &(-rhs)
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        match self {
            Q::Small(n, d) => match n.checked_neg() {
                Some(m) => Q::Small(m, *d),
                None => Q::reduce(-(*n as i128), *d as i128),
            },
            Q::Big(r) => Q::from_big(-r),
        }
    }
}

impl<'a> Mul<&'a Q> for &'a Q {
    type Output = Q;
    fn mul(self, rhs: &Q) -> Q {
        match (self, rhs) {
            (Q::Small(a, b), Q::Small(c, d)) => {
                Q::reduce(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Q::from_big(self.big().as_ref() * rhs.big().as_ref()),
        }
    }
}

impl<'a> Div<&'a Q> for &'a Q {
    type Output = Q;
    fn div(self, rhs: &Q) -> Q {
        assert!(!rhs.is_zero(), "division by zero");
        match (self, rhs) {
            (Q::Small(a, b), Q::Small(c, d)) => {
                Q::reduce(*a as i128 * *d as i128, *b as i128 * *c as i128)
            }
            _ => Q::from_big(self.big().as_ref() / rhs.big().as_ref()),
        }
    }
}

impl SubAssign<Q> for Q {
    fn sub_assign(&mut self, rhs: Q) {
        *self = &*self - &rhs;
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, other: &Q) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Q {
    fn cmp(&self, other: &Q) -> Ordering {
        match (self, other) {
            (Q::Small(a, b), Q::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.big().as_ref().cmp(other.big().as_ref()),
        }
    }
}
