use sha2::{Digest, Sha256};

use crate::analysis::Certificate;
use crate::caps::Caps;
use crate::codes::decode_lex;
use crate::engine::{Pattern, PeriodizedMap};
use crate::error::Result;
use crate::rules::RuleConfig;
use crate::universe::{box_reduce, boundary_sets, same_dim, CellSet, Cuboid};

/// `s(g) = s(k_g)` for every `g` in the exterior boundary `KE \ K`.
pub fn wrap_compatibility(s: &RuleConfig, k: &Cuboid, e: &CellSet) -> Result<bool> {
    same_dim(s.dim(), k.dim())?;
    same_dim(s.dim(), e.dim())?;
    let sets = boundary_sets(&k.cells(), e)?;
    for g in sets.exterior.iter() {
        if s.rule_at(g) != s.rule_at(&box_reduce(g, k)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Inverse table of `Ψ_{K,s}` on lexicographic codes, or the first
/// colliding pair `(x, x', image)` in code order.
pub fn psi_inverse_table(
    s: &RuleConfig,
    k: &Cuboid,
    caps: &Caps,
) -> Result<std::result::Result<Vec<u64>, (u64, u64, u64)>> {
    let mut psi = PeriodizedMap::new(s, k)?;
    let forward = psi.materialize(caps)?;
    let mut inverse = vec![u64::MAX; forward.len()];
    for (code, &img) in forward.iter().enumerate() {
        let slot = &mut inverse[img as usize];
        if *slot != u64::MAX {
            return Ok(Err((*slot, code as u64, img)));
        }
        *slot = code as u64;
    }
    Ok(Ok(inverse))
}

/// Materializes `Ψ_{K,s}` and certifies it bijective or exhibits a collision.
pub fn psi_invertibility_check(s: &RuleConfig, k: &Cuboid, caps: &Caps) -> Result<Certificate> {
    let cells = k.cells();
    let q = s.alphabet();
    let pattern = |code: u64| -> Result<Pattern> {
        let mut v = vec![0; cells.len()];
        decode_lex(code, q, &mut v);
        Pattern::new(cells.clone(), v)
    };
    match psi_inverse_table(s, k, caps)? {
        Ok(inverse) => {
            let mut h = Sha256::new();
            for v in &inverse {
                h.update(v.to_le_bytes());
            }
            Ok(Certificate::PsiBijection {
                period_box: k.clone(),
                table_size: inverse.len() as u64,
                inverse_digest: hex::encode(h.finalize()),
            })
        }
        Err((a, b, img)) => Ok(Certificate::PsiCollision {
            period_box: k.clone(),
            left: pattern(a)?,
            right: pattern(b)?,
            image: pattern(img)?,
        }),
    }
}
