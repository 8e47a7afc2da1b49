//! The built-in identity catalog.
//!
//! Naming: `m4`, `m3`, `m5`, `m8`, `m12` refer to the real characters of
//! modulus 4, 3, 5, 8 and 12, i.e. the Kronecker symbols (-4|.), (-3|.),
//! (5|.), (8|.) and (12|.). Each entry cites the classical source or
//! describes the identity; limit metadata records the constant that
//! (1-q)^w times the series tends to as q -> 1.

use super::{Expr, IdentityEntry, LimitMeta, PiExpr};
use crate::qforms::{alternating_signs, signs_k_k_plus_1_half, LambertSpec};

fn poch(c: usize, b: usize) -> Expr {
    Expr::Poch { c, b }
}

fn eta(d: usize) -> Expr {
    Expr::Eta { d }
}

fn entry(
    id: &str,
    lhs: Expr,
    rhs: Expr,
    citation: &str,
    limit_meta: Option<LimitMeta>,
) -> IdentityEntry {
    IdentityEntry {
        id: id.to_string(),
        lhs,
        rhs,
        citation: citation.to_string(),
        limit_meta,
    }
}

fn limit(weight: u32, num: i64, den: i64, pi_power: u32, sqrt_divisor: u64) -> Option<LimitMeta> {
    Some(LimitMeta {
        weight,
        constant: PiExpr::new(num, den, pi_power, sqrt_divisor),
    })
}

/// Lambert shape sum (-1)^k q^{2k} (1 + q^{2k+1}) / (1 - q^{2k+1})^3,
/// the q-analogue of the alternating odd cube sum.
fn beta3_lambert() -> Expr {
    Expr::LambertGen(LambertSpec {
        signs: alternating_signs(),
        quad: 0,
        lin: 4,
        offset: 0,
        denom_step: 2,
        denom_offset: 1,
        denom_power: 3,
        numerator: vec![1, 1],
    })
}

/// (q^2;q^4)^2 (q^4;q^4)^6 / (q;q^2)^4, the product side of the beta(3)
/// q-analogue.
fn beta3_product() -> Expr {
    Expr::div(
        Expr::mul(Expr::pow(poch(2, 4), 2), Expr::pow(poch(4, 4), 6)),
        Expr::pow(poch(1, 2), 4),
    )
}

/// Builds the full catalog. Ordering is stable and ids are unique.
pub fn builtin_registry() -> Vec<IdentityEntry> {
    let mut entries = Vec::new();

    entries.push(entry(
        "beta3_q",
        beta3_lambert(),
        beta3_product(),
        "q-analogue of the alternating sum of inverse odd cubes, \
         sum (-1)^k/(2k+1)^3 = pi^3/32",
        limit(3, 1, 16, 3, 1),
    ));

    entries.push(entry(
        "beta3_rhs_forms",
        Expr::div(
            Expr::mul(Expr::pow(poch(2, 2), 2), Expr::pow(poch(4, 4), 4)),
            Expr::pow(poch(1, 2), 4),
        ),
        beta3_product(),
        "even/odd interleaving (q^2;q^2) = (q^2;q^4)(q^4;q^4) rewrites the \
         beta(3) product between its two displayed forms",
        None,
    ));

    entries.push(entry(
        "sun_zeta2_q",
        Expr::LambertGen(LambertSpec {
            signs: vec![1],
            quad: 0,
            lin: 2,
            offset: 0,
            denom_step: 2,
            denom_offset: 1,
            denom_power: 2,
            numerator: vec![1, 1],
        }),
        Expr::div(Expr::pow(poch(2, 2), 4), Expr::pow(poch(1, 2), 4)),
        "Sun's q-analogue of zeta(2) = pi^2/6",
        limit(2, 1, 4, 2, 1),
    ));

    entries.push(entry(
        "sun_zeta4_q",
        Expr::LambertGen(LambertSpec {
            signs: vec![1],
            quad: 0,
            lin: 4,
            offset: 0,
            denom_step: 2,
            denom_offset: 1,
            denom_power: 4,
            numerator: vec![1, 4, 1],
        }),
        Expr::div(Expr::pow(poch(2, 2), 8), Expr::pow(poch(1, 2), 8)),
        "Sun's q-analogue of zeta(4) = pi^4/90",
        limit(4, 1, 16, 4, 1),
    ));

    entries.push(entry(
        "ramanujan_beta1_q",
        Expr::LambertGen(LambertSpec {
            signs: alternating_signs(),
            quad: 0,
            lin: 2,
            offset: 0,
            denom_step: 2,
            denom_offset: 1,
            denom_power: 1,
            numerator: vec![1],
        }),
        Expr::div(Expr::pow(poch(4, 4), 2), Expr::pow(poch(2, 4), 2)),
        "Ramanujan's q-analogue of Leibniz's beta(1) = pi/4 \
         (Berndt, Ramanujan's Notebooks III, Entry p. 139, Example (iv))",
        limit(1, 1, 4, 1, 1),
    ));

    entries.push(entry(
        "hks_beta1_q",
        Expr::LambertGen(LambertSpec {
            signs: alternating_signs(),
            quad: 1,
            lin: 3,
            offset: 0,
            denom_step: 2,
            denom_offset: 1,
            denom_power: 1,
            numerator: vec![1],
        }),
        Expr::div(
            Expr::mul(poch(2, 2), poch(8, 8)),
            Expr::mul(poch(1, 2), poch(4, 8)),
        ),
        "Hou-Krattenthaler-Sun q-analogue of Leibniz's beta(1) = pi/4",
        limit(1, 1, 4, 1, 1),
    ));

    entries.push(entry(
        "chi3_cubic",
        Expr::LambertCubic { top: -3 },
        Expr::div(Expr::pow(eta(3), 9), Expr::pow(eta(1), 3)),
        "q-analogue of sum (n|3)/n^3 = 4 pi^3 / (81 sqrt(3)); product side \
         from Carlitz's (2.1)",
        limit(3, 8, 81, 3, 3),
    ));

    entries.push(entry(
        "ramanujan_chi5",
        Expr::LambertSquare { top: 5 },
        Expr::div(Expr::pow(eta(5), 5), eta(1)),
        "Ramanujan's identity behind p(5n+4) = 0 (mod 5); q-analogue of \
         sum (n|5)/n^2 = 4 pi^2 / (25 sqrt(5))",
        limit(2, 4, 25, 2, 5),
    ));

    entries.push(entry(
        "chi8_square",
        Expr::LambertSquare { top: 8 },
        Expr::div(
            Expr::mul(
                Expr::mul(Expr::pow(eta(2), 3), eta(4)),
                Expr::pow(eta(8), 2),
            ),
            Expr::pow(eta(1), 2),
        ),
        "q-analogue of sum (-1)^{k(k+1)/2}/(2k+1)^2 = pi^2 / (8 sqrt(2))",
        limit(2, 1, 8, 2, 2),
    ));

    entries.push(entry(
        "chi8_sign_form",
        Expr::LambertGen(LambertSpec {
            signs: signs_k_k_plus_1_half(),
            quad: 0,
            lin: 4,
            offset: 0,
            denom_step: 2,
            denom_offset: 1,
            denom_power: 2,
            numerator: vec![1],
        }),
        Expr::LambertSquare { top: 8 },
        "the sign pattern (-1)^{k(k+1)/2} on odd arguments is the modulus-8 \
         character: both encodings of the same sum",
        None,
    ));

    entries.push(entry(
        "chi12_square",
        Expr::LambertSquare { top: 12 },
        Expr::div(
            Expr::mul(
                Expr::mul(Expr::pow(eta(2), 2), Expr::pow(eta(3), 2)),
                Expr::mul(eta(4), eta(12)),
            ),
            Expr::pow(eta(1), 2),
        ),
        "q-analogue of sum (3|2k+1)/(2k+1)^2 = pi^2 / (6 sqrt(3))",
        limit(2, 1, 6, 2, 3),
    ));

    entries.push(entry(
        "chi12_difference_form",
        Expr::sub(
            Expr::LambertGen(LambertSpec {
                signs: alternating_signs(),
                quad: 0,
                lin: 12,
                offset: 0,
                denom_step: 6,
                denom_offset: 1,
                denom_power: 2,
                numerator: vec![1],
            }),
            Expr::LambertGen(LambertSpec {
                signs: alternating_signs(),
                quad: 0,
                lin: 12,
                offset: 4,
                denom_step: 6,
                denom_offset: 5,
                denom_power: 2,
                numerator: vec![1],
            }),
        ),
        Expr::LambertSquare { top: 12 },
        "the modulus-12 sum written as an alternating difference over the \
         residues 1 and 5 (mod 6) equals its character form; the symbol \
         (12|.) alternates along both progressions",
        None,
    ));

    entries.push(entry(
        "carlitz_m4",
        Expr::DivSer { top: -4, weight: 2 },
        Expr::div(
            Expr::mul(Expr::pow(eta(2), 6), Expr::pow(eta(4), 4)),
            Expr::pow(eta(1), 4),
        ),
        "Carlitz's (4.1): eta product for the weight-2 divisor sum twisted \
         by the modulus-4 character",
        limit(3, 1, 16, 3, 1),
    ));

    entries.push(entry(
        "carlitz_m3",
        Expr::DivSer { top: -3, weight: 2 },
        Expr::div(Expr::pow(eta(3), 9), Expr::pow(eta(1), 3)),
        "Carlitz's (2.1): eta product for the weight-2 divisor sum twisted \
         by the modulus-3 character",
        limit(3, 8, 81, 3, 3),
    ));

    entries.push(entry(
        "ramanujan_div5",
        Expr::DivSer { top: 5, weight: 1 },
        Expr::div(Expr::pow(eta(5), 5), eta(1)),
        "Ramanujan's eta product for the weight-1 divisor sum twisted by the \
         modulus-5 character",
        limit(2, 4, 25, 2, 5),
    ));

    entries.push(entry(
        "aaw_m8",
        Expr::DivSer { top: 8, weight: 1 },
        Expr::div(
            Expr::mul(
                Expr::mul(Expr::pow(eta(2), 3), eta(4)),
                Expr::pow(eta(8), 2),
            ),
            Expr::pow(eta(1), 2),
        ),
        "Alaca-Alaca-Williams eta product for the weight-1 divisor sum \
         twisted by the modulus-8 character",
        limit(2, 1, 8, 2, 2),
    ));

    entries.push(entry(
        "aaw_m12",
        Expr::DivSer { top: 12, weight: 1 },
        Expr::div(
            Expr::mul(
                Expr::mul(Expr::pow(eta(2), 2), Expr::pow(eta(3), 2)),
                Expr::mul(eta(4), eta(12)),
            ),
            Expr::pow(eta(1), 2),
        ),
        "Alaca-Alaca-Williams eta product for the weight-1 divisor sum \
         twisted by the modulus-12 character",
        limit(2, 1, 6, 2, 3),
    ));

    // The two parametric families: for every character used above, the
    // cubic Lambert sum equals the weight-2 divisor series and the square
    // Lambert sum equals the weight-1 divisor series.
    for top in [-4i64, -3, 5, 8, 12] {
        let tag = format!("m{}", top.unsigned_abs());
        entries.push(entry(
            &format!("lemma21_{tag}"),
            Expr::LambertCubic { top },
            Expr::DivSer { top, weight: 2 },
            "cubic Lambert sum rearranged as a weight-2 twisted divisor sum \
             via (1+x)/(1-x)^3 = sum (k+1)^2 x^k",
            None,
        ));
    }
    for top in [-4i64, -3, 5, 8, 12] {
        let tag = format!("m{}", top.unsigned_abs());
        entries.push(entry(
            &format!("eq33_{tag}"),
            Expr::LambertSquare { top },
            Expr::DivSer { top, weight: 1 },
            "square Lambert sum rearranged as a weight-1 twisted divisor sum \
             via 1/(1-x)^2 = sum (k+1) x^k",
            None,
        ));
    }

    entries
}
