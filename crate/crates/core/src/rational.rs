//! Exact rational scalars and planar points.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used for every coordinate in the crate.
pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational literal {0:?}")]
pub struct ParseRationalError(pub String);

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `p/q`, or a decimal literal such as `-1.25` or `3e-2`
/// into an exact rational. Decimals are converted digit by digit, never
/// through a float.
pub fn parse_rational(s: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let s = s.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = parse_int(n).ok_or_else(err)?;
        let d: BigInt = parse_int(d).ok_or_else(err)?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| err())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, body) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| err())?
    };
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Q::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

fn parse_int(s: &str) -> Option<BigInt> {
    let t = s.trim();
    let body = t.strip_prefix(['-', '+']).unwrap_or(t);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    t.parse().ok()
}

/// Formats as `p` for integers and `p/q` otherwise.
pub fn format_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point2 {
    pub x: Q,
    pub y: Q,
}

impl Point2 {
    pub fn new(x: Q, y: Q) -> Self {
        Point2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point2::new(q(x), q(y))
    }

    pub fn dot(&self, o: &Point2) -> Q {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn cross(&self, o: &Point2) -> Q {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn norm2(&self) -> Q {
        self.dot(self)
    }

    pub fn dist2(&self, o: &Point2) -> Q {
        (self - o).norm2()
    }

    pub fn scale(&self, s: &Q) -> Point2 {
        Point2::new(&self.x * s, &self.y * s)
    }

    /// `self + t * (o - self)`.
    pub fn lerp(&self, o: &Point2, t: &Q) -> Point2 {
        Point2::new(lerp1(&self.x, &o.x, t), lerp1(&self.y, &o.y, t))
    }

    pub fn midpoint(&self, o: &Point2) -> Point2 {
        self.lerp(o, &q_frac(1, 2))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.x), to_f64(&self.y))
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}",
            format_rational(&self.x),
            format_rational(&self.y)
        )
    }
}

impl<'a> Sub<&'a Point2> for &'a Point2 {
    type Output = Point2;
    fn sub(self, o: &Point2) -> Point2 {
        Point2::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl<'a> Add<&'a Point2> for &'a Point2 {
    type Output = Point2;
    fn add(self, o: &Point2) -> Point2 {
        Point2::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl<'a> Mul<&'a Q> for &'a Point2 {
    type Output = Point2;
    fn mul(self, s: &Q) -> Point2 {
        self.scale(s)
    }
}

/// Twice the signed area of `abc`.
/// `a + t (b - a)` over a common denominator, reduced once.
fn lerp1(a: &Q, b: &Q, t: &Q) -> Q {
    if let Some(x) = lerp1_small(a, b, t) {
        return x;
    }
    let (an, ad) = (a.numer(), a.denom());
    let (bn, bd) = (b.numer(), b.denom());
    let (tn, td) = (t.numer(), t.denom());
    let num = an * bd * (td - tn) + bn * ad * tn;
    Q::new(num, ad * bd * td)
}

/// [`lerp1`] in machine integers when nothing overflows.
fn lerp1_small(a: &Q, b: &Q, t: &Q) -> Option<Q> {
    use num_integer::Integer;
    let small = |x: &BigInt| x.to_i64().map(i128::from);
    let (an, ad, bn, bd) = (
        small(a.numer())?,
        small(a.denom())?,
        small(b.numer())?,
        small(b.denom())?,
    );
    let (tn, td) = (small(t.numer())?, small(t.denom())?);
    let num = an
        .checked_mul(bd)?
        .checked_mul(td - tn)?
        .checked_add(bn.checked_mul(ad)?.checked_mul(tn)?)?;
    let den = ad.checked_mul(bd)?.checked_mul(td)?;
    let g = num.gcd(&den);
    Some(Q::new_raw(BigInt::from(num / g), BigInt::from(den / g)))
}

pub fn area2(a: &Point2, b: &Point2, c: &Point2) -> Q {
    (b - a).cross(&(c - a))
}

/// Orientation of `abc`: `Greater` for counterclockwise, `Less` for
/// clockwise, `Equal` for collinear.
pub fn orient(a: &Point2, b: &Point2, c: &Point2) -> Ordering {
    sign(&area2(a, b, c))
}

pub fn sign(x: &Q) -> Ordering {
    if x.is_positive() {
        Ordering::Greater
    } else if x.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// Twice the signed area of a closed polygon.
pub fn polygon_area2(pts: &[&Point2]) -> Q {
    let n = pts.len();
    let mut s = Q::zero();
    for i in 0..n {
        s += pts[i].cross(pts[(i + 1) % n]);
    }
    s
}

/// True when `p` lies on the closed segment `ab`.
pub fn on_segment(a: &Point2, b: &Point2, p: &Point2) -> bool {
    if orient(a, b, p) != Ordering::Equal {
        return false;
    }
    let d = (p - a).dot(&(b - a));
    !d.is_negative() && d <= (b - a).norm2()
}

/// Proper or improper intersection test for closed segments `ab` and `cd`.
pub fn segments_intersect(a: &Point2, b: &Point2, c: &Point2, d: &Point2) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    let proper = [o1, o2, o3, o4].iter().all(|o| *o != Ordering::Equal);
    if proper {
        return o1 != o2 && o3 != o4;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}
