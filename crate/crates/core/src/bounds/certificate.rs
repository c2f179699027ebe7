use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{GammaParam, Profile1D, StripSpec};

/// Relative drift allowed between the full and the coarse sample sets.
pub const REFINEMENT_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    UpperPower,
    LowerPower,
    LinearGrowth,
    GradientStrip,
    GradientFar,
}

/// Outcome of checking one inequality on a computed object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub kind: CertificateKind,
    pub region: String,
    /// Best constant over the samples (attained at one of them).
    pub empirical_constant: f64,
    /// Smallest relative slack against the certified constant
    /// `C*_coarse · (1 ± tol)`, capped by `tol − refinement_drift`.
    pub margin: f64,
    pub pass: bool,
    pub samples: usize,
    /// `|C*_full − C*_coarse| / C*_full`.
    pub refinement_drift: f64,
    /// `(c₁, c₂)` with `u ≤ c₁ + c₂ x_N` on the far region.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub affine_fit: Option<(f64, f64)>,
    /// Log–log slope of `|∇u|` against `x_N` in the strip.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fitted_exponent: Option<f64>,
    /// Position `x_N` of the sample attaining the constant.
    pub argmax_height: f64,
}

impl BoundCertificate {
    /// Smallest relative slack against an externally given constant; 0 in
    /// the equality case.
    pub fn margin_against(&self, reference: f64) -> f64 {
        match self.kind {
            CertificateKind::LowerPower => (self.empirical_constant - reference) / reference,
            _ => (reference - self.empirical_constant) / reference,
        }
    }
}

/// Objects that can be scanned for certificates: 1-D profiles and 2-D
/// fields. Level 0 is the full sample set, level 1 the set at twice the
/// spacing.
pub trait SampleSource {
    fn gamma(&self) -> GammaParam;

    /// Pairs `(x_N, u)` with `x_N > 0`.
    fn value_samples(&self, level: usize) -> Vec<(f64, f64)>;

    /// Pairs `(x_N, |∇u|)`.
    fn gradient_samples(&self, level: usize) -> Vec<(f64, f64)>;

    /// Largest `x_N` covered.
    fn extent(&self) -> f64;
}

impl SampleSource for Profile1D {
    fn gamma(&self) -> GammaParam {
        Profile1D::gamma(self)
    }

    fn value_samples(&self, level: usize) -> Vec<(f64, f64)> {
        let step = 1 << level;
        self.grid()
            .iter()
            .zip(self.values())
            .step_by(step)
            .filter(|(t, _)| **t > 0.0)
            .map(|(t, v)| (*t, *v))
            .collect()
    }

    fn gradient_samples(&self, level: usize) -> Vec<(f64, f64)> {
        let step = 1 << level;
        self.grid()
            .iter()
            .zip(self.derivs())
            .step_by(step)
            .filter(|(t, d)| **t > 0.0 && d.is_finite())
            .map(|(t, d)| (*t, d.abs()))
            .collect()
    }

    fn extent(&self) -> f64 {
        self.t_max()
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Extremum {
    Sup,
    Inf,
}

/// Extremum of `f(x, u)` with its location.
fn scan<F: Fn(f64, f64) -> f64>(samples: &[(f64, f64)], ext: Extremum, f: F) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for &(x, u) in samples {
        let r = f(x, u);
        best = match best {
            None => Some((r, x)),
            Some((b, bx)) => {
                let better = match ext {
                    Extremum::Sup => r > b,
                    Extremum::Inf => r < b,
                };
                Some(if better { (r, x) } else { (b, bx) })
            }
        };
    }
    best
}

#[allow(clippy::too_many_arguments)]
fn certify(
    kind: CertificateKind,
    region: String,
    ext: Extremum,
    full: &[(f64, f64)],
    coarse: &[(f64, f64)],
    f: impl Fn(f64, f64) -> f64 + Copy,
) -> Result<BoundCertificate> {
    let (c_full, at) = scan(full, ext, f).ok_or_else(|| Error::EmptySample(region.clone()))?;
    let c_coarse = scan(coarse, ext, f).map(|(c, _)| c).unwrap_or(c_full);
    let drift = ((c_full - c_coarse) / c_full).abs();
    let slack = match ext {
        Extremum::Sup => {
            let cert = c_coarse * (1.0 + REFINEMENT_TOL);
            (cert - c_full) / cert
        }
        Extremum::Inf => {
            let cert = c_coarse * (1.0 - REFINEMENT_TOL);
            (c_full - cert) / cert
        }
    };
    let margin = slack.min(REFINEMENT_TOL - drift);
    let pass = margin.is_finite() && margin >= 0.0 && c_full.is_finite() && c_full > 0.0;
    Ok(BoundCertificate {
        kind,
        region,
        empirical_constant: c_full,
        margin,
        pass,
        samples: full.len(),
        refinement_drift: drift,
        affine_fit: None,
        fitted_exponent: None,
        argmax_height: at,
    })
}

/// `sup u / x_N^{2/(γ+1)}` over `0 < x_N ≤ strip.height`.
pub fn check_upper_power<S: SampleSource + ?Sized>(p: &S, strip: StripSpec) -> Result<BoundCertificate> {
    let a = p.gamma().alpha_pow();
    let h = strip.height;
    if h > p.extent() * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "strip height {h} exceeds the object's extent {}",
            p.extent()
        )));
    }
    let sel = |lv| -> Vec<(f64, f64)> { p.value_samples(lv).into_iter().filter(|s| s.0 <= h).collect() };
    certify(
        CertificateKind::UpperPower,
        format!("0 < x_N <= {h}"),
        Extremum::Sup,
        &sel(0),
        &sel(1),
        |x, u| u / x.powf(a),
    )
}

/// `inf u / x_N^{2/(γ+1)}` over all interior samples.
pub fn check_lower_power<S: SampleSource + ?Sized>(p: &S) -> Result<BoundCertificate> {
    let a = p.gamma().alpha_pow();
    let full = p.value_samples(0);
    if let Some(&(x, u)) = full.iter().find(|s| !(s.1 > 0.0)) {
        return Err(Error::Invariant(format!(
            "nonpositive interior sample u = {u} at x_N = {x}"
        )));
    }
    certify(
        CertificateKind::LowerPower,
        format!("0 < x_N <= {}", p.extent()),
        Extremum::Inf,
        &full,
        &p.value_samples(1),
        |x, u| u / x.powf(a),
    )
}

/// `sup u / x_N` over `x_N > strip.height`, with an affine majorant
/// `c₁ + c₂ x_N` fitted on the same region.
pub fn check_linear_growth<S: SampleSource + ?Sized>(p: &S, strip: StripSpec) -> Result<BoundCertificate> {
    let h = strip.height;
    if !(p.extent() > h) {
        return Err(Error::EmptySample(format!(
            "object ends at {} <= strip height {h}",
            p.extent()
        )));
    }
    let sel = |lv| -> Vec<(f64, f64)> { p.value_samples(lv).into_iter().filter(|s| s.0 > h).collect() };
    let full = sel(0);
    let mut cert = certify(
        CertificateKind::LinearGrowth,
        format!("x_N > {h}"),
        Extremum::Sup,
        &full,
        &sel(1),
        |x, u| u / x,
    )?;
    cert.affine_fit = Some(affine_majorant(&full));
    Ok(cert)
}

/// Least-squares slope `c₂`, then the smallest `c₁` with `u ≤ c₁ + c₂ x`.
fn affine_majorant(s: &[(f64, f64)]) -> (f64, f64) {
    let n = s.len() as f64;
    let mx = s.iter().map(|p| p.0).sum::<f64>() / n;
    let mu = s.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = s.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxu: f64 = s.iter().map(|p| (p.0 - mx) * (p.1 - mu)).sum();
    let c2 = if sxx > 0.0 { sxu / sxx } else { 0.0 };
    let c1 = s.iter().map(|p| p.1 - c2 * p.0).fold(f64::NEG_INFINITY, f64::max);
    (c1, c2)
}

/// Strip certificate `sup |∇u| x_N^{(γ−1)/(γ+1)}` and far certificate
/// `sup |∇u|` beyond the strip. The strip certificate also carries the
/// log–log exponent of `|∇u|`, fitted on `[10^{−4} h, 10^{−2} h]` (or on the
/// whole strip when that window holds fewer than 8 samples).
pub fn check_gradient<S: SampleSource + ?Sized>(
    p: &S,
    strip: StripSpec,
) -> Result<(BoundCertificate, BoundCertificate)> {
    let g = p.gamma();
    let e = -g.grad_exp();
    let h = strip.height;
    let full = p.gradient_samples(0);
    let coarse = p.gradient_samples(1);
    let in_strip = |s: &[(f64, f64)]| -> Vec<(f64, f64)> { s.iter().copied().filter(|q| q.0 <= h).collect() };
    let far = |s: &[(f64, f64)]| -> Vec<(f64, f64)> { s.iter().copied().filter(|q| q.0 > h).collect() };
    let strip_full = in_strip(&full);
    if strip_full.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "gradient strip 0 < x_N <= {h} holds {} samples, need 8",
            strip_full.len()
        )));
    }
    let mut c1 = certify(
        CertificateKind::GradientStrip,
        format!("0 < x_N <= {h}"),
        Extremum::Sup,
        &strip_full,
        &in_strip(&coarse),
        |x, d| d * x.powf(e),
    )?;
    let window: Vec<(f64, f64)> = strip_full
        .iter()
        .copied()
        .filter(|q| q.0 >= 1e-4 * h && q.0 <= 1e-2 * h && q.1 > 0.0)
        .collect();
    let fit_set = if window.len() >= 8 { window } else { strip_full.clone() };
    c1.fitted_exponent = loglog_slope(&fit_set);
    let c2 = certify(
        CertificateKind::GradientFar,
        format!("x_N > {h}"),
        Extremum::Sup,
        &far(&full),
        &far(&coarse),
        |_, d| d,
    )?;
    Ok((c1, c2))
}

fn loglog_slope(s: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = s
        .iter()
        .filter(|q| q.0 > 0.0 && q.1 > 0.0)
        .map(|q| (q.0.ln(), q.1.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
