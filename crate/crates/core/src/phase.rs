//! Diagonal phase kernels used by the propagator.
//!
//! The split-step loop spends most of its time in `e^{-iθ}` for thousands of
//! angles per step, so the bulk kernels use a branch-free sincos that the
//! compiler can vectorize. Arguments are reduced by `π/2` with a three-part
//! Cody-Waite split and evaluated with the fdlibm kernel polynomials; the
//! result is within a few ulp of `f64::sin_cos` for `|θ| ≤ FAST_LIMIT`.
//! Slices holding larger angles fall back to the libm path.

use num_complex::Complex64;

#[inline]
pub(crate) fn cis(theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

const FAST_LIMIT: f64 = 1.0e5;

const TWO_OVER_PI: f64 = 6.366_197_723_675_813_4e-1;
const PIO2_1: f64 = 1.570_796_326_734_125_614_17;
const PIO2_2: f64 = 6.077_100_506_303_965_976_60e-11;
const PIO2_3: f64 = 2.022_266_248_711_166_455_80e-21;
// 1.5 · 2^52: adding it rounds to the nearest integer, held in the low bits.
const ROUND_MAGIC: f64 = 6_755_399_441_055_744.0;

const S1: f64 = -1.666_666_666_666_663_243_48e-1;
const S2: f64 = 8.333_333_333_322_489_461_24e-3;
const S3: f64 = -1.984_126_982_985_794_931_34e-4;
const S4: f64 = 2.755_731_370_707_006_767_89e-6;
const S5: f64 = -2.505_076_025_340_686_341_95e-8;
const S6: f64 = 1.589_690_995_211_550_102_21e-10;

const C1: f64 = 4.166_666_666_666_660_190_37e-2;
const C2: f64 = -1.388_888_888_887_410_957_49e-3;
const C3: f64 = 2.480_158_728_947_672_941_78e-5;
const C4: f64 = -2.755_731_435_139_066_330_35e-7;
const C5: f64 = 2.087_572_321_298_174_827_90e-9;
const C6: f64 = -1.135_964_755_778_819_482_65e-11;

/// `(sin θ, cos θ)` for `|θ| ≤ FAST_LIMIT`, branch free.
#[inline(always)]
fn sincos_reduced(theta: f64) -> (f64, f64) {
    let shifted = theta * TWO_OVER_PI + ROUND_MAGIC;
    let q = shifted.to_bits();
    let qf = shifted - ROUND_MAGIC;
    let r = ((theta - qf * PIO2_1) - qf * PIO2_2) - qf * PIO2_3;
    let z = r * r;
    let s = r + r * z * (S1 + z * (S2 + z * (S3 + z * (S4 + z * (S5 + z * S6)))));
    let hz = 0.5 * z;
    let w = 1.0 - hz;
    let c = w + (((1.0 - w) - hz) + z * z * (C1 + z * (C2 + z * (C3 + z * (C4 + z * (C5 + z * C6))))));
    // Quadrant q mod 4: odd quadrants swap sin and cos, sign bits follow.
    let swap = 0u64.wrapping_sub(q & 1);
    let (sb, cb) = (s.to_bits(), c.to_bits());
    let sv = (sb & !swap) | (cb & swap);
    let cv = (cb & !swap) | (sb & swap);
    let sin_neg = (q & 2) << 62;
    let cos_neg = (q.wrapping_add(1) & 2) << 62;
    (f64::from_bits(sv ^ sin_neg), f64::from_bits(cv ^ cos_neg))
}

fn max_angle(w: &[f64], beta: f64) -> f64 {
    w.iter().fold(0.0f64, |m, &v| m.max(v.abs())) * beta.abs()
}

macro_rules! bulk_kernels {
    ($apply:ident, $fill:ident $(, #[$attr:meta])*) => {
        $(#[$attr])*
        unsafe fn $apply(data: &mut [Complex64], w: &[f64], beta: f64, scale: f64) {
            for (a, &wk) in data.iter_mut().zip(w) {
                let (s, c) = sincos_reduced(-beta * wk);
                let (s, c) = (s * scale, c * scale);
                *a = Complex64::new(a.re * c - a.im * s, a.re * s + a.im * c);
            }
        }

        $(#[$attr])*
        unsafe fn $fill(out: &mut [Complex64], w: &[f64], beta: f64) {
            for (o, &wk) in out.iter_mut().zip(w) {
                let (s, c) = sincos_reduced(-beta * wk);
                *o = Complex64::new(c, s);
            }
        }
    };
}

bulk_kernels!(apply_generic, fill_generic);
#[cfg(target_arch = "x86_64")]
bulk_kernels!(apply_avx2, fill_avx2, #[target_feature(enable = "avx2,fma")]);

#[cfg(target_arch = "x86_64")]
fn has_avx2() -> bool {
    use std::sync::OnceLock;
    static HAS: OnceLock<bool> = OnceLock::new();
    *HAS.get_or_init(|| is_x86_feature_detected!("avx2") && is_x86_feature_detected!("fma"))
}

/// `data[k] *= scale · e^{-i β w[k]}`.
pub(crate) fn apply_diag_phase(data: &mut [Complex64], w: &[f64], beta: f64, scale: f64) {
    if !(max_angle(w, beta) <= FAST_LIMIT) {
        for (a, &wk) in data.iter_mut().zip(w) {
            *a *= cis(-beta * wk) * scale;
        }
        return;
    }
    #[cfg(target_arch = "x86_64")]
    if has_avx2() {
        // SAFETY: the required CPU features were detected at runtime.
        unsafe { apply_avx2(data, w, beta, scale) };
        return;
    }
    // SAFETY: no target features are required.
    unsafe { apply_generic(data, w, beta, scale) }
}

/// `out[k] = e^{-i β w[k]}`.
pub(crate) fn fill_diag_phase(out: &mut [Complex64], w: &[f64], beta: f64) {
    if !(max_angle(w, beta) <= FAST_LIMIT) {
        for (o, &wk) in out.iter_mut().zip(w) {
            *o = cis(-beta * wk);
        }
        return;
    }
    #[cfg(target_arch = "x86_64")]
    if has_avx2() {
        // SAFETY: the required CPU features were detected at runtime.
        unsafe { fill_avx2(out, w, beta) };
        return;
    }
    // SAFETY: no target features are required.
    unsafe { fill_generic(out, w, beta) }
}
