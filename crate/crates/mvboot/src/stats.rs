//! Scalar distribution helpers: standard normal quantile and CDF, and a
//! one-sample Kolmogorov-Smirnov test against N(0, 1).
//!
//! The quantile is Wichura's rational approximation (absolute error below
//! 1e-9 over (0, 1), in practice near machine precision), kept internal so
//! interval endpoints do not depend on an external special-functions crate.

/// Standard normal quantile (inverse CDF).
///
/// Panics if `p` is outside (0, 1).
// Coefficients carry their published digits verbatim even where f64
// rounds them; the extra digits document the source values.
#[allow(clippy::excessive_precision)]
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile requires p in (0,1), got {p}");
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        // Central region: rational in q^2.
        let r = 0.180625 - q * q;
        let num = q
            * (((((((2.509_080_928_730_122_7e3 * r + 3.343_057_558_358_813e4) * r
                + 6.726_577_092_700_87e4)
                * r
                + 4.592_195_393_154_987e4)
                * r
                + 1.373_169_376_550_946e4)
                * r
                + 1.971_590_950_306_551_3e3)
                * r
                + 1.331_416_678_917_843_8e2)
                * r
                + 3.387_132_872_796_366_5);
        let den = ((((((5.226_495_278_852_545_5e3 * r + 2.872_908_573_572_194_3e4) * r
            + 3.930_789_580_009_271e4)
            * r
            + 2.121_379_430_158_659_7e4)
            * r
            + 5.394_196_021_424_751e3)
            * r
            + 6.871_870_074_920_579e2)
            * r
            + 4.231_333_070_160_091e1)
            * r
            + 1.0;
        return num / den;
    }
    let tail_p = if q < 0.0 { p } else { 1.0 - p };
    let r = (-tail_p.ln()).sqrt();
    let x = if r <= 5.0 {
        let s = r - 1.6;
        let num = ((((((7.745_450_142_783_414e-4 * s + 2.272_384_498_926_918_4e-2) * s
            + 2.417_807_251_774_506e-1)
            * s
            + 1.270_458_252_452_368_4)
            * s
            + 3.647_848_324_763_204_5)
            * s
            + 5.769_497_221_460_691)
            * s
            + 4.630_337_846_156_546)
            * s
            + 1.423_437_110_749_683_5;
        let den = ((((((1.050_750_071_644_416_9e-9 * s + 5.475_938_084_995_345e-4) * s
            + 1.519_866_656_361_645_7e-2)
            * s
            + 1.481_039_764_274_8e-1)
            * s
            + 6.897_673_349_851e-1)
            * s
            + 1.676_384_830_183_803_8)
            * s
            + 2.053_191_626_637_758_8)
            * s
            + 1.0;
        num / den
    } else {
        let s = r - 5.0;
        let num = ((((((2.010_334_399_292_288_1e-7 * s + 2.711_555_568_743_487_6e-5) * s
            + 1.242_660_947_388_078_4e-3)
            * s
            + 2.653_218_952_657_612_3e-2)
            * s
            + 2.965_605_718_285_048_7e-1)
            * s
            + 1.784_826_539_917_291_3)
            * s
            + 5.463_784_911_164_114)
            * s
            + 6.657_904_643_501_103;
        let den = ((((((2.044_263_103_389_939_7e-15 * s + 1.421_511_758_316_446e-7) * s
            + 1.846_318_317_510_054_8e-5)
            * s
            + 7.868_691_311_456_133e-4)
            * s
            + 1.487_536_129_085_061_5e-2)
            * s
            + 1.369_298_809_227_358e-1)
            * s
            + 5.998_322_065_558_88e-1)
            * s
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

/// Standard normal CDF.
///
/// Series expansion through the density for |x| <= 6, Mills-ratio continued
/// fraction in the far tail; both branches are accurate to roughly machine
/// precision.
pub fn normal_cdf(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - normal_cdf(-x);
    }
    let phi = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if x <= 6.0 {
        // Phi(x) = 1/2 + phi(x) * sum_{k>=0} x^(2k+1) / (1 * 3 * ... * (2k+1))
        let mut term = x;
        let mut sum = x;
        let mut k = 0u32;
        while term.abs() > 1e-18 * sum.abs() && k < 500 {
            k += 1;
            term *= x * x / (2 * k + 1) as f64;
            sum += term;
        }
        0.5 + phi * sum
    } else {
        // Upper tail via the continued fraction for the Mills ratio.
        let mut cf = 0.0;
        for j in (1..=60).rev() {
            cf = j as f64 / (x + cf);
        }
        1.0 - phi / (x + cf)
    }
}

/// Result of a one-sample Kolmogorov-Smirnov test.
#[derive(Clone, Copy, Debug)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample Kolmogorov-Smirnov test of `samples` against N(0, 1).
///
/// The p-value uses the asymptotic Kolmogorov distribution with Stephens'
/// small-sample correction on the argument.
pub fn ks_test_standard_normal(samples: &[f64]) -> KsResult {
    assert!(!samples.is_empty(), "KS test requires samples");
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("KS samples must not contain NaN"));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let cdf = normal_cdf(*x);
        let upper = (i as f64 + 1.0) / n - cdf;
        let lower = cdf - i as f64 / n;
        d = d.max(upper).max(lower);
    }
    let arg = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    KsResult {
        statistic: d,
        p_value: kolmogorov_tail(arg),
    }
}

/// P(K > x) for the Kolmogorov distribution: 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 x^2).
fn kolmogorov_tail(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64) * (j as f64) * x * x).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
