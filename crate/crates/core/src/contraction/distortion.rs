use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Curvature and dimension bounds `(K, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionParams {
    k: f64,
    n: f64,
}

impl DistortionParams {
    /// Requires `N > 1`, or `N = 1` together with `K <= 0`.
    pub fn new(k: f64, n: f64) -> Result<Self> {
        let ok = k.is_finite() && n.is_finite() && (n > 1.0 || (n == 1.0 && k <= 0.0));
        if ok {
            Ok(Self { k, n })
        } else {
            Err(Error::InvalidParams { k, n })
        }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn n(&self) -> f64 {
        self.n
    }
}

/// `sin(sqrt(K) θ)/sqrt(K)`, `θ`, or `sinh(sqrt(-K) θ)/sqrt(-K)` by the sign of `K`.
pub fn s_k(k: f64, theta: f64) -> Result<f64> {
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(domain("theta", theta, "must be finite and nonnegative"));
    }
    if k > 0.0 {
        let r = k.sqrt();
        if theta >= std::f64::consts::PI / r {
            return Err(domain("theta", theta, "must be below pi/sqrt(K)"));
        }
        Ok((r * theta).sin() / r)
    } else if k == 0.0 {
        Ok(theta)
    } else {
        let r = (-k).sqrt();
        Ok((r * theta).sinh() / r)
    }
}

/// The distortion coefficient `ς_{K,N}^{(t)}(d)`.
///
/// At `d = 0` the limit `t^N` is returned for every `K`; for `K = 0` the
/// value is `t^N` as well.
pub fn sigma(params: DistortionParams, t: f64, d: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(domain("t", t, "must lie in [0, 1]"));
    }
    if !(d >= 0.0) || !d.is_finite() {
        return Err(domain("d", d, "must be finite and nonnegative"));
    }
    let DistortionParams { k, n } = params;
    if n == 1.0 {
        return Ok(t);
    }
    if d == 0.0 || k == 0.0 {
        return Ok(t.powf(n));
    }
    if t == 1.0 {
        // the ratio is exactly one, but keep the domain check
        s_k(k, d / (n - 1.0).sqrt())?;
        return Ok(1.0);
    }
    let scale = (n - 1.0).sqrt();
    let num = s_k(k, t * d / scale)?;
    let den = s_k(k, d / scale)?;
    Ok(t * (num / den).powf(n - 1.0))
}

/// The admissible density-ratio ceiling `1 / ς_{K,N}^{(t)}(l)`.
pub fn mcp_bound(params: DistortionParams, t: f64, l: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain("t", t, "must be positive"));
    }
    Ok(1.0 / sigma(params, t, l)?)
}
