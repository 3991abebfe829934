//! Decoding radii in exact rational arithmetic.

use std::fmt;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = Ratio<i128>;

/// Length, degree of `G`, genus and characteristic of a code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodeShape {
    pub n: u64,
    pub deg_g: u64,
    pub g: u64,
    pub p: u64,
}

impl CodeShape {
    pub fn designed_distance(&self) -> i64 {
        self.n as i64 - self.deg_g as i64
    }
}

/// Multiplicity `s`, list size `ell` and inseparability exponent `e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GsParams {
    pub s: u64,
    pub ell: u64,
    pub e: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("multiplicity {s} exceeds list size {ell}")]
    MultiplicityExceedsList { s: u64, ell: u64 },
    #[error("deg G = {deg_g} exceeds s*n/ell = {s}*{n}/{ell}")]
    DegreeTooLarge { deg_g: u64, s: u64, n: u64, ell: u64 },
    #[error("best radius is negative")]
    NegativeRadius,
}

fn binom2(k: i128) -> i128 {
    k * (k - 1) / 2
}

pub fn tau_classic(shape: &CodeShape, s: u64, ell: u64) -> Rational {
    let (n, d, g) = (shape.n as i128, shape.deg_g as i128, shape.g as i128);
    let (s, l) = (s as i128, ell as i128);
    Rational::new(s * (2 * l - s + 1) * n - l * (l + 1) * d - 2, 2 * s * (l + 1)) - Rational::new(g, s)
}

/// Radius guaranteed by the interpolation counting argument for auxiliary
/// parameter `t` in `0..=s`.
pub fn tau_general(shape: &CodeShape, params: &GsParams, t: u64) -> Rational {
    let (n, d, g) = (shape.n as i128, shape.deg_g as i128, shape.g as i128);
    let (s, l, t) = (params.s as i128, params.ell as i128, t as i128);
    let pe = (shape.p as i128).pow(params.e);
    let tail = s * (l - t + 1) - binom2(s - t + 1);
    let den = binom2(s + 1) + tail;
    let num = n * tail - (binom2(l + 1) - binom2(t)) * d;
    Rational::new(num, den) - Rational::new(1 + g * (l - t + 1), pe * den)
}

/// Maximum of [`tau_general`] over `t`, with the smallest maximizing `t`.
pub fn tau_best(shape: &CodeShape, params: &GsParams) -> (Rational, u64) {
    let mut best = (tau_general(shape, params, 0), 0);
    for t in 1..=params.s {
        let v = tau_general(shape, params, t);
        if v > best.0 {
            best = (v, t);
        }
    }
    best
}

/// Smallest `e` with `p^e >= 1 + g*ell`.
pub fn e_for_no_penalty(p: u64, g: u64, ell: u64) -> u32 {
    let target = 1 + g * ell;
    let mut e = 0;
    let mut pe = 1u64;
    while pe < target {
        pe *= p;
        e += 1;
    }
    e
}

pub fn check_feasible(shape: &CodeShape, params: &GsParams) -> Result<(), Violation> {
    if params.s > params.ell {
        return Err(Violation::MultiplicityExceedsList { s: params.s, ell: params.ell });
    }
    if params.s == 0 || shape.deg_g * params.ell > params.s * shape.n {
        return Err(Violation::DegreeTooLarge {
            deg_g: shape.deg_g,
            s: params.s,
            n: shape.n,
            ell: params.ell,
        });
    }
    if tau_best(shape, params).0 < Rational::zero() {
        return Err(Violation::NegativeRadius);
    }
    Ok(())
}

/// Largest admissible degree of the divisor `A = alpha * P_inf` when
/// correcting `tau` errors: `p^e s (n - tau) - 1`.
pub fn choose_a_degree(p: u64, e: u32, s: u64, n: u64, tau: u64) -> i64 {
    (p as i64).pow(e) * s as i64 * (n as i64 - tau as i64) - 1
}

/// `floor(x)` as an integer.
pub fn floor(x: &Rational) -> i64 {
    x.floor().to_integer() as i64
}

/// Formats as `a/b`, or `a` when integral.
pub struct Frac<'a>(pub &'a Rational);

impl fmt::Display for Frac<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(a: i128, b: i128) -> Rational {
        Rational::new(a, b)
    }

    fn shape(n: u64, deg_g: u64, g: u64, p: u64) -> CodeShape {
        CodeShape { n, deg_g, g, p }
    }

    // Independent evaluation straight from the binomial form.
    fn tau_oracle(sh: &CodeShape, s: u64, l: u64, e: u32, t: u64) -> Rational {
        let c = |a: i128, b: i128| -> i128 {
            if b < 0 || a < b {
                return 0;
            }
            (0..b).fold(1, |acc, i| acc * (a - i) / (i + 1))
        };
        let (n, d, g) = (sh.n as i128, sh.deg_g as i128, sh.g as i128);
        let (s, l, t) = (s as i128, l as i128, t as i128);
        let den = c(s + 1, 2) + s * (l - t + 1) - c(s - t + 1, 2);
        let num = n * (s * (l - t + 1) - c(s - t + 1, 2)) - (c(l + 1, 2) - c(t, 2)) * d;
        r(num, den) - r(1 + g * (l - t + 1), (sh.p as i128).pow(e) * den)
    }

    #[test]
    fn classic_examples() {
        assert_eq!(tau_classic(&shape(8, 4, 1, 2), 1, 1), r(1, 2));
        // s(2l - s + 1) = 10 for s = 2, l = 3
        assert_eq!(tau_classic(&shape(15, 6, 0, 2), 2, 3), r(76, 16));
        for n in 2..30 {
            for d in 0..n {
                assert_eq!(tau_classic(&shape(n, d, 0, 2), 1, 1), r(n as i128 - d as i128 - 1, 2));
            }
        }
    }

    #[test]
    fn general_examples() {
        let sh = shape(26, 14, 3, 3);
        let p = |e| GsParams { s: 1, ell: 1, e };
        assert_eq!(tau_general(&sh, &p(1), 1), r(16, 3));
        assert_eq!(tau_general(&sh, &p(0), 1), r(4, 1));
        assert_eq!(tau_best(&sh, &p(1)), (r(16, 3), 1));
        assert_eq!(tau_best(&sh, &p(2)), (r(52, 9), 1));
        let big = shape(64, 20, 6, 2);
        let prm = GsParams { s: 2, ell: 3, e: 3 };
        assert_eq!(tau_best(&big, &prm), (r(1581, 64), 1));
        for t in 0..=2 {
            assert_eq!(tau_general(&big, &prm, t), tau_oracle(&big, 2, 3, 3, t));
        }
        // ties go to the smaller t
        let rs = shape(15, 6, 0, 2);
        assert_eq!(tau_best(&rs, &GsParams { s: 2, ell: 3, e: 0 }), (r(19, 4), 0));
    }

    #[test]
    fn penalty_exponents() {
        assert_eq!(e_for_no_penalty(2, 1, 2), 2);
        assert_eq!(e_for_no_penalty(3, 3, 1), 2);
        assert_eq!(e_for_no_penalty(5, 0, 4), 0);
        assert_eq!(e_for_no_penalty(2, 6, 1), 3);
    }

    #[test]
    fn feasibility() {
        let p = |s, ell| GsParams { s, ell, e: 0 };
        assert_eq!(check_feasible(&shape(7, 3, 0, 2), &p(1, 2)), Ok(()));
        assert!(matches!(
            check_feasible(&shape(7, 4, 0, 2), &p(1, 2)),
            Err(Violation::DegreeTooLarge { .. })
        ));
        assert!(matches!(
            check_feasible(&shape(7, 3, 0, 2), &p(2, 1)),
            Err(Violation::MultiplicityExceedsList { .. })
        ));
        assert_eq!(check_feasible(&shape(8, 7, 3, 2), &p(1, 1)), Err(Violation::NegativeRadius));
    }

    #[test]
    fn a_degree() {
        assert_eq!(choose_a_degree(3, 1, 1, 26, 5), 62);
        assert_eq!(choose_a_degree(2, 0, 1, 8, 1), 6);
    }

    #[test]
    fn frac_format() {
        assert_eq!(Frac(&r(16, 3)).to_string(), "16/3");
        assert_eq!(Frac(&r(8, 2)).to_string(), "4");
        assert_eq!(Frac(&r(-1, 2)).to_string(), "-1/2");
    }

    fn shapes() -> impl Strategy<Value = (CodeShape, GsParams)> {
        (2u64..200, 0u64..40, prop::sample::select(vec![2u64, 3, 5, 7]), 1u64..5, 0u64..4, 0u32..5)
            .prop_flat_map(|(n, g, p, s, extra, e)| {
                let ell = s + extra;
                (0..=n * s / ell).prop_map(move |d| {
                    (CodeShape { n, deg_g: d, g, p }, GsParams { s, ell, e })
                })
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn matches_oracle((sh, prm) in shapes()) {
            for t in 0..=prm.s {
                prop_assert_eq!(tau_general(&sh, &prm, t), tau_oracle(&sh, prm.s, prm.ell, prm.e, t));
            }
        }

        #[test]
        fn t_zero_e_zero_is_classic((sh, prm) in shapes()) {
            let p0 = GsParams { e: 0, ..prm };
            prop_assert_eq!(tau_general(&sh, &p0, 0), tau_classic(&sh, prm.s, prm.ell));
        }

        #[test]
        fn nondecreasing_in_e((sh, prm) in shapes()) {
            let next = GsParams { e: prm.e + 1, ..prm };
            for t in 0..=prm.s {
                prop_assert!(tau_general(&sh, &next, t) >= tau_general(&sh, &prm, t));
            }
        }

        #[test]
        fn no_penalty_bound((sh, prm) in shapes()) {
            let e = e_for_no_penalty(sh.p, sh.g, prm.ell);
            let p = GsParams { e, ..prm };
            let (s, l) = (prm.s as i128, prm.ell as i128);
            let free = Rational::new(
                s * (2 * l - s + 1) * sh.n as i128 - l * (l + 1) * sh.deg_g as i128 - 2,
                2 * s * (l + 1),
            );
            prop_assert!(tau_general(&sh, &p, 1) >= free);
        }

        #[test]
        fn improvement_over_classic((sh, prm) in shapes()) {
            let p0 = GsParams { e: 0, ..prm };
            let diff = tau_general(&sh, &p0, 1) - tau_classic(&sh, prm.s, prm.ell);
            let expected = Rational::new(sh.g as i128, prm.s as i128 * (prm.ell as i128 + 1));
            prop_assert_eq!(diff, expected);
        }

        #[test]
        fn genus_zero_best_beats_classic((sh, prm) in shapes()) {
            let sh0 = CodeShape { g: 0, ..sh };
            let p0 = GsParams { e: 0, ..prm };
            prop_assert!(tau_best(&sh0, &p0).0 >= tau_classic(&sh0, prm.s, prm.ell));
        }

        #[test]
        fn interpolation_degree_covers_s_blocks((sh, prm) in shapes()) {
            let (best, _) = tau_best(&sh, &prm);
            prop_assume!(best >= Rational::zero());
            let tau = floor(&best) as u64;
            let alpha = choose_a_degree(sh.p, prm.e, prm.s, sh.n, tau);
            let pe = (sh.p as i64).pow(prm.e);
            prop_assert!(alpha - pe * prm.s as i64 * sh.deg_g as i64 >= 0);
        }

        #[test]
        fn unique_decoding_specialization(n in 2u64..200, g in 0u64..30, p in prop::sample::select(vec![2u64, 3, 5]), frac in 0.0f64..1.0) {
            let d = ((n as f64) * frac) as u64;
            let sh = CodeShape { n, deg_g: d, g, p };
            let e = e_for_no_penalty(p, g, 1);
            let prm = GsParams { s: 1, ell: 1, e };
            let v = tau_general(&sh, &prm, 1);
            let dstar = sh.designed_distance() as i128;
            let expected = Rational::new(dstar, 2) - Rational::new(1 + g as i128, 2 * (p as i128).pow(e));
            prop_assert_eq!(v, expected);
            prop_assert!(floor(&v) >= (dstar - 1).div_euclid(2) as i64);
        }
    }
}
