//! Extended-precision evaluation of `alpha_S(m) / alpha_A(m) - 1`.
//!
//! For growing `m` the symmetric and asymmetric optima separate by amounts far
//! below `f64` resolution (about `1e-37` at `m = 25`), so the ratio is refined
//! here in binary fixed point with 288 fractional bits. The `f64` optimizer
//! supplies the starting point; golden-section search then narrows `p` until
//! the bracket is far below the size of the gap being measured.

use core::cmp::Ordering;
use core::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::alpha::alpha_opt;
use crate::error::{check_probability, domain, Result};
use crate::info::{Family, PartitionIndex};

const FRAC: u64 = 288;
/// Half-width of the refinement bracket around the `f64` optimum.
const BRACKET: f64 = 1e-5;
/// Golden-section steps; shrinks the bracket by `0.618^STEPS` (to ~1e-41).
const STEPS: usize = 170;

/// Signed binary fixed point, value `raw * 2^-FRAC`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Fixed(BigInt);

impl Fixed {
    fn zero() -> Self {
        Fixed(BigInt::zero())
    }

    fn one() -> Self {
        Fixed(BigInt::one() << FRAC)
    }

    /// Exact conversion of a finite float.
    fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1 << 52) - 1);
        let (mant, exp) = if exp == 0 { (frac, -1074) } else { (frac | (1 << 52), exp - 1075) };
        let shift = exp + FRAC as i64;
        let raw = if shift >= 0 { BigInt::from(mant) << shift as u64 } else { BigInt::from(mant) >> (-shift) as u64 };
        Fixed(if negative { -raw } else { raw })
    }

    fn to_f64(&self) -> f64 {
        let bits = self.0.bits();
        // keep 64 significant bits before converting
        let drop = bits.saturating_sub(64);
        let top = (&self.0 >> drop).to_f64().unwrap_or(f64::NAN);
        top * libm::exp2(drop as f64 - FRAC as f64)
    }

    fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    fn div_int(&self, d: i64) -> Self {
        Fixed(&self.0 / d)
    }

    fn mul_int(&self, k: i64) -> Self {
        Fixed(&self.0 * k)
    }

    fn powi(&self, k: usize) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }
}

impl Add for &Fixed {
    type Output = Fixed;
    fn add(self, rhs: &Fixed) -> Fixed {
        Fixed(&self.0 + &rhs.0)
    }
}

impl Sub for &Fixed {
    type Output = Fixed;
    fn sub(self, rhs: &Fixed) -> Fixed {
        Fixed(&self.0 - &rhs.0)
    }
}

impl Mul for &Fixed {
    type Output = Fixed;
    fn mul(self, rhs: &Fixed) -> Fixed {
        // truncate toward zero; a flooring shift leaves negative series terms stuck at -1
        let prod = &self.0 * &rhs.0;
        Fixed(if prod.is_negative() { -((-prod) >> FRAC) } else { prod >> FRAC })
    }
}

impl Div for &Fixed {
    type Output = Fixed;
    fn div(self, rhs: &Fixed) -> Fixed {
        Fixed((&self.0 << FRAC) / &rhs.0)
    }
}

/// Shared constants for logarithms.
struct Ctx {
    ln2: Fixed,
    one: Fixed,
    three_halves: Fixed,
}

impl Ctx {
    fn new() -> Self {
        let one = Fixed::one();
        let third = one.div_int(3);
        let ln2 = atanh_series(&third).mul_int(2);
        let three_halves = &one + &one.div_int(2);
        Self { ln2, one, three_halves }
    }

    /// Natural log of a positive value.
    fn ln(&self, x: &Fixed) -> Fixed {
        debug_assert!(x.is_positive());
        let mut k = x.0.bits() as i64 - 1 - FRAC as i64;
        let mut y = if k >= 0 { Fixed(&x.0 >> k as u64) } else { Fixed(&x.0 << (-k) as u64) };
        if y >= self.three_halves {
            y = Fixed(y.0 >> 1u32);
            k += 1;
        }
        // y in [0.75, 1.5): ln y = 2 atanh((y - 1) / (y + 1))
        let s = &(&y - &self.one) / &(&y + &self.one);
        &atanh_series(&s).mul_int(2) + &self.ln2.mul_int(k)
    }

    /// `-x log2 x`, zero at `x <= 0`.
    fn neg_x_log2(&self, x: &Fixed) -> Fixed {
        if !x.is_positive() {
            return Fixed::zero();
        }
        let v = &(x * &self.ln(x)) / &self.ln2;
        Fixed(-v.0)
    }

    fn h2(&self, z: &Fixed) -> Fixed {
        &self.neg_x_log2(z) + &self.neg_x_log2(&(&self.one - z))
    }

    fn h3(&self, z: &Fixed, g: &Fixed) -> Fixed {
        let rest = &(&self.one - z) - g;
        &(&self.neg_x_log2(z) + &self.neg_x_log2(g)) + &self.neg_x_log2(&rest)
    }
}

/// `atanh(s) = s + s^3/3 + s^5/5 + ...` for `|s| <= 1/3`.
fn atanh_series(s: &Fixed) -> Fixed {
    let s2 = s * s;
    let mut term = s.clone();
    let mut sum = Fixed::zero();
    let mut j = 1;
    while !term.0.is_zero() {
        sum = &sum + &term.div_int(j);
        term = &term * &s2;
        j += 2;
    }
    sum
}

/// `alpha(m, p)` for symmetric or asymmetric tests, optionally noisy.
fn alpha_fixed(ctx: &Ctx, m: usize, family: Family, p: &Fixed, q: Option<&Fixed>) -> Fixed {
    let r = &ctx.one - p;
    let pw: alloc::vec::Vec<Fixed> = (0..=m).map(|k| p.powi(k)).collect();
    let rw: alloc::vec::Vec<Fixed> = (0..=m).map(|k| r.powi(k)).collect();
    let (q, nq) = match q {
        Some(q) => (q.clone(), &ctx.one - q),
        None => (ctx.one.clone(), ctx.one.clone()),
    };
    let noise_h = ctx.h2(&q);
    let mut best: Option<Fixed> = None;
    for i in 1..=m {
        let mi = match family {
            Family::Agt => &(&rw[m - i] * &ctx.h2(&(&rw[i] * &nq))) - &(&rw[m] * &noise_h),
            _ => {
                let given_d2 = if i < m {
                    &(&rw[m - i] * &ctx.h2(&(&rw[i] * &nq))) + &(&pw[m - i] * &ctx.h2(&(&pw[i] * &q)))
                } else {
                    ctx.h3(&(&pw[m] * &q), &(&rw[m] * &nq))
                };
                &given_d2 - &(&(&rw[m] + &pw[m]) * &noise_h)
            }
        };
        let ratio = mi.div_int(i as i64);
        best = Some(match best {
            Some(b) if b <= ratio => b,
            _ => ratio,
        });
    }
    best.expect("m >= 1")
}

fn refine(ctx: &Ctx, m: usize, family: Family, p0: f64, q: Option<&Fixed>) -> (Fixed, Fixed) {
    let f = |p: &Fixed| alpha_fixed(ctx, m, family, p, q);
    let mut lo = Fixed::from_f64((p0 - BRACKET).max(0.0));
    let mut hi = Fixed::from_f64((p0 + BRACKET).min(1.0));
    // (sqrt 5 - 1) / 2 at full precision; point reuse amplifies its error
    let golden = Fixed(((BigInt::from(5) << (2 * FRAC)).sqrt() - (BigInt::one() << FRAC)) >> 1u32);
    let mut c = &hi - &(&golden * &(&hi - &lo));
    let mut d = &lo + &(&golden * &(&hi - &lo));
    let (mut fc, mut fd) = (f(&c), f(&d));
    let mut best = (Fixed::from_f64(p0), f(&Fixed::from_f64(p0)));
    for _ in 0..STEPS {
        for (x, fx) in [(&c, &fc), (&d, &fd)] {
            if *fx > best.1 {
                best = (x.clone(), fx.clone());
            }
        }
        if fc.cmp(&fd) != Ordering::Less {
            hi = d;
            d = c;
            fd = fc;
            c = &hi - &(&golden * &(&hi - &lo));
            fc = f(&c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = &lo + &(&golden * &(&hi - &lo));
            fd = f(&d);
        }
    }
    for (x, fx) in [(c, fc), (d, fd)] {
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Extended-precision comparison of the optimized symmetric and asymmetric
/// criteria at one `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub m: usize,
    pub q: Option<f64>,
    pub alpha_s: f64,
    pub alpha_a: f64,
    pub p_s: f64,
    pub p_a: f64,
    /// `alpha_S / alpha_A - 1`, accurate far below `f64` spacing near 1.
    pub excess: f64,
    /// `alpha_A - 1/m`; zero up to refinement error in the noise-free case.
    pub agt_offset: f64,
}

impl RatioReport {
    pub fn ratio(&self) -> f64 {
        1.0 + self.excess
    }
}

/// Computes `alpha_S(m) / alpha_A(m) - 1` with both optima refined in
/// extended precision.
pub fn sgt_agt_ratio(m: usize, q: Option<f64>) -> Result<RatioReport> {
    PartitionIndex::new(m, 1)?;
    if let Some(q) = q {
        check_probability("q", q)?;
    }
    let s = alpha_opt(m, Family::Sgt, q)?;
    let a = alpha_opt(m, Family::Agt, q)?;
    if a.value <= 0.0 {
        return Err(domain("asymmetric criterion vanishes; ratio undefined"));
    }
    let ctx = Ctx::new();
    let qf = q.map(Fixed::from_f64);
    let (ps, vs) = refine(&ctx, m, Family::Sgt, s.best().p, qf.as_ref());
    let (pa, va) = refine(&ctx, m, Family::Agt, a.best().p, qf.as_ref());
    let excess = &(&vs - &va) / &va;
    let inv_m = ctx.one.div_int(m as i64);
    Ok(RatioReport {
        m,
        q,
        alpha_s: vs.to_f64(),
        alpha_a: va.to_f64(),
        p_s: ps.to_f64(),
        p_a: pa.to_f64(),
        excess: excess.to_f64(),
        agt_offset: (&va - &inv_m).to_f64(),
    })
}
