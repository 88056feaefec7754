//! Middle-layer supply bounds per family and scheme, and the inverse
//! search: the smallest prime power whose scalar bound admits a given `r`.

use anyhow::{bail, Result};
use num_bigint::BigUint;
use num_traits::ToPrimitive;

use netgap_core::algebra::FieldCtx;
use netgap_core::subspace::{
    factor_prime_power, pairwise_distance_code, q_binomial, triple_span_search,
};

/// Family selector for bound queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundFamily {
    Combination { h: usize },
    Star { ell: usize },
    Plus { ell: usize },
    Tilde,
}

impl BoundFamily {
    pub fn name(&self) -> &'static str {
        match self {
            BoundFamily::Combination { .. } => "combination",
            BoundFamily::Star { .. } => "star",
            BoundFamily::Plus { .. } => "plus",
            BoundFamily::Tilde => "tilde",
        }
    }

    pub fn messages(&self, t_is_vector: bool) -> usize {
        let _ = t_is_vector;
        match *self {
            BoundFamily::Combination { h } => h,
            BoundFamily::Star { ell } | BoundFamily::Plus { ell } => 2 * ell,
            BoundFamily::Tilde => 3,
        }
    }
}

/// Largest middle layer a scalar solution over `F_{q_s}` supports.
///
/// Closed forms everywhere except star with `ell >= 3`, where the operative
/// bound is the size of the deterministic greedy distance-(2 ell - 2) code
/// (the exact maximum is an open quantity; the greedy supply is what the
/// solver can actually use).
pub fn max_middle_nodes_scalar(family: &BoundFamily, qs: u64) -> Result<BigUint> {
    let q = BigUint::from(qs);
    Ok(match *family {
        BoundFamily::Combination { h } => {
            let (p, _) = factor_prime_power(qs)
                .ok_or_else(|| anyhow::anyhow!("{qs} is not a prime power"))?;
            let extended = p == 2 && (h == 3 || h as u64 == qs - 1);
            &q + BigUint::from(if extended { 2u32 } else { 1u32 })
        }
        BoundFamily::Star { ell } => {
            if ell == 2 {
                // (q^2 + 1)(q^2 + q + 1)
                q_binomial(4, 2, qs)?
            } else {
                let field = build_field(qs)?;
                let code = pairwise_distance_code(&field, 2 * ell, ell, 2 * ell - 2)?;
                BigUint::from(code.len())
            }
        }
        BoundFamily::Plus { ell } => q_binomial(2 * ell, ell, qs)?,
        BoundFamily::Tilde => BigUint::from(2u32) * (&q * &q + &q + BigUint::from(1u32)),
    })
}

/// Largest middle layer a vector solution of dimension `t` over `F_q`
/// supports.
///
/// For the combination family this is the headline bound `q^t + 1`; the
/// solver additionally accepts one more node when `h = 3` over even `q^t`.
/// For tilde the bound is the deterministic triple-span search supply.
pub fn max_middle_nodes_vector(family: &BoundFamily, q: u64, t: usize) -> Result<BigUint> {
    let qb = BigUint::from(q);
    Ok(match *family {
        BoundFamily::Combination { .. } => qb.pow(t as u32) + BigUint::from(1u32),
        BoundFamily::Star { ell } => qb.pow((ell * t * (t + 1)) as u32),
        BoundFamily::Plus { ell } => qb.pow((ell * (ell - 1) * t * t + ell * t) as u32),
        BoundFamily::Tilde => {
            let field = build_field(q)?;
            let code = triple_span_search(&field, 3 * t, t, 2 * t, usize::MAX)?;
            BigUint::from(code.len())
        }
    })
}

/// Capacity of the alternative star block scheme that spends one rank-one
/// block: `1 + [3 choose 2]_{q_s}` blocks, strictly below the subspace
/// supply.
pub fn star_rank_one_alternative(qs: u64) -> Result<BigUint> {
    Ok(BigUint::from(1u32) + q_binomial(3, 2, qs)?)
}

/// Ascending prime powers: 2, 3, 4, 5, 7, 8, 9, 11, ...
pub fn prime_powers() -> impl Iterator<Item = u64> {
    (2u64..).filter(|&n| factor_prime_power(n).is_some())
}

/// Smallest prime power `q_s` whose scalar bound admits `r` middle nodes.
pub fn min_scalar_field_size(family: &BoundFamily, r: usize) -> Result<u64> {
    let target = BigUint::from(r);
    for qs in prime_powers() {
        if max_middle_nodes_scalar(family, qs)? >= target {
            return Ok(qs);
        }
    }
    unreachable!("the scalar bound is unbounded in q_s")
}

/// Evaluates a bound as `u64` when it fits (for display).
pub fn as_u64(b: &BigUint) -> Option<u64> {
    b.to_u64()
}

fn build_field(q: u64) -> Result<std::sync::Arc<FieldCtx>> {
    let Some((p, m)) = factor_prime_power(q) else {
        bail!("{q} is not a prime power");
    };
    Ok(FieldCtx::new(p, m)?)
}
