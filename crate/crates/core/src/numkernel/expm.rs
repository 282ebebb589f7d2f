use super::{c, check_finite, check_square, CMatrix};
use crate::error::{Error, Result};

// Degree-13 diagonal Padé coefficients and the 1-norm bound below which the
// approximant is accurate to double precision without further scaling.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(tM)` by scaling and squaring with a fixed-order rational approximant.
pub fn mat_exp(m: &CMatrix, t: f64) -> Result<CMatrix> {
    let n = check_square(m)?;
    check_finite(m)?;
    if !t.is_finite() {
        return Err(Error::InvalidInput(format!("time {t} is not finite")));
    }
    let eye = CMatrix::identity(n, n);
    if n == 0 || t == 0.0 {
        return Ok(eye);
    }
    let mut a = m * c(t, 0.0);
    let norm = one_norm(&a);
    if norm == 0.0 {
        return Ok(eye);
    }
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    if squarings > 0 {
        a *= c(0.5f64.powi(squarings), 0.0);
    }

    let b = |k: usize| c(PADE13[k], 0.0);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9));
    let u = &a * (u_inner + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &eye * b(1));
    let v_inner = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8));
    let v = v_inner + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &eye * b(0);

    let numerator = &v + &u;
    let denominator = &v - &u;
    let mut r = denominator
        .lu()
        .solve(&numerator)
        .ok_or_else(|| Error::Inconsistency("singular Padé denominator".into()))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}
