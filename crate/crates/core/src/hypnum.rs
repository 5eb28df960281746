//! Complex log-gamma and log-sine in overflow-safe form, unit-argument
//! `q+1 F q` summation, and the J, L and M functions built from them.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CNum = Complex64;

/// Distance below which an argument counts as sitting on a pole.
pub const POLE_EPS: f64 = 1e-12;
/// Required distance of every gamma argument from the poles.
pub const GAMMA_MARGIN: f64 = 0.1;
/// Required distance of every `sin(pi z)` argument from the integers.
pub const SIN_MARGIN: f64 = 0.05;
/// Tolerance for hyperplane identities on numeric points.
pub const HYPERPLANE_TOL: f64 = 1e-9;

const LN_PI: f64 = 1.144_729_885_849_400_2;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `log_mag + i*phase`, the logarithm of a non-zero complex number.
/// The phase is never reduced, so products keep their winding.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct LogC {
    pub log_mag: f64,
    pub phase: f64,
}

impl LogC {
    pub const ONE: LogC = LogC { log_mag: 0.0, phase: 0.0 };

    pub fn new(log_mag: f64, phase: f64) -> LogC {
        LogC { log_mag, phase }
    }

    pub fn from_log(z: CNum) -> LogC {
        LogC { log_mag: z.re, phase: z.im }
    }

    /// Principal logarithm of a non-zero value.
    pub fn of(z: CNum) -> LogC {
        LogC::from_log(z.ln())
    }

    pub fn of_real(x: f64) -> LogC {
        LogC::of(CNum::new(x, 0.0))
    }

    pub fn as_log(self) -> CNum {
        CNum::new(self.log_mag, self.phase)
    }

    pub fn exp(self) -> CNum {
        CNum::from_polar(self.log_mag.exp(), self.phase)
    }

    pub fn inv(self) -> LogC {
        LogC { log_mag: -self.log_mag, phase: -self.phase }
    }

    pub fn powi(self, k: i32) -> LogC {
        LogC { log_mag: self.log_mag * k as f64, phase: self.phase * k as f64 }
    }

    /// `self * z` for a plain complex factor.
    pub fn times(self, z: CNum) -> CNum {
        if z == CNum::new(0.0, 0.0) {
            return z;
        }
        (self * LogC::of(z)).exp()
    }
}

impl Mul for LogC {
    type Output = LogC;
    fn mul(self, o: LogC) -> LogC {
        LogC { log_mag: self.log_mag + o.log_mag, phase: self.phase + o.phase }
    }
}

impl Div for LogC {
    type Output = LogC;
    fn div(self, o: LogC) -> LogC {
        self * o.inv()
    }
}

impl Neg for LogC {
    type Output = LogC;
    fn neg(self) -> LogC {
        LogC { phase: self.phase + PI, ..self }
    }
}

impl fmt::Display for LogC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({:.6} {:+.6}i)", self.log_mag, self.phase)
    }
}

/// Distance from `z` to the nearest non-positive integer.
pub fn pole_distance(z: CNum) -> f64 {
    let k = z.re.round().min(0.0);
    (z - k).norm()
}

/// Distance from `z` to the nearest integer.
pub fn int_distance(z: CNum) -> f64 {
    (z - z.re.round()).norm()
}

// B_2k / (2k (2k-1)) for k = 1..15
const STIRLING: [f64; 15] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
    77683.0 / 5796.0,
    -236364091.0 / 1506960.0,
    657931.0 / 300.0,
    -3392780147.0 / 93960.0,
    1723168255201.0 / 2492028.0,
];

const STIRLING_RADIUS: f64 = 40.0;

fn stirling(z: CNum) -> CNum {
    let zinv = z.inv();
    let z2 = zinv * zinv;
    let mut corr = CNum::new(0.0, 0.0);
    let mut p = zinv;
    for c in STIRLING {
        let t = p * c;
        corr += t;
        if t.norm() < 1e-18 * corr.norm() {
            break;
        }
        p *= z2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + corr
}

/// `log Gamma(z)` as a `LogC`. Recursion up to `|z| >= 40`, Stirling
/// series there, reflection for `Re z < 1/2`.
pub fn lgamma(z: CNum) -> Result<LogC> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Precondition(format!("non-finite gamma argument {z}")));
    }
    if pole_distance(z) < POLE_EPS {
        return Err(Error::Pole(format!("{z}")));
    }
    Ok(LogC::from_log(lgamma_raw(z)))
}

fn lgamma_raw(z: CNum) -> CNum {
    if z.re < 0.5 {
        let s = log_sin_pi_raw(z);
        return LN_PI - s - lgamma_raw(1.0 - z);
    }
    let mut w = z;
    let mut shift = CNum::new(0.0, 0.0);
    let mut prod = CNum::new(1.0, 0.0);
    let mut k = 0;
    while w.norm() < STIRLING_RADIUS {
        prod *= w;
        w += 1.0;
        k += 1;
        if k % 16 == 0 {
            shift += prod.ln();
            prod = CNum::new(1.0, 0.0);
        }
    }
    shift += prod.ln();
    stirling(w) - shift
}

/// `log sin(pi z)`; requires `z` at least 0.05 from every integer.
pub fn log_sin_pi(z: CNum) -> Result<LogC> {
    if int_distance(z) < SIN_MARGIN {
        return Err(Error::NearInteger(format!("{z}")));
    }
    Ok(LogC::from_log(log_sin_pi_raw(z)))
}

/// `log sin(pi z)` without the margin check; only exact zeros fail.
pub fn log_sin_pi_unchecked(z: CNum) -> Result<LogC> {
    if int_distance(z) < POLE_EPS {
        return Err(Error::NearInteger(format!("{z}")));
    }
    Ok(LogC::from_log(log_sin_pi_raw(z)))
}

fn log_sin_pi_raw(z: CNum) -> CNum {
    let n = z.re.round();
    let r = CNum::new(z.re - n, z.im);
    // sin(pi (r + n)) = (-1)^n sin(pi r)
    let sign_phase = if (n as i64).rem_euclid(2) == 1 { PI } else { 0.0 };
    let i = CNum::i();
    let core = if r.im.abs() <= 5.0 {
        (r * PI).sin().ln()
    } else if r.im > 0.0 {
        // sin(pi r) = (i/2) e^{-i pi r} (1 - e^{2 i pi r})
        -i * PI * r + CNum::new(-LN_2, PI / 2.0) + (1.0 - (2.0 * PI * i * r).exp()).ln()
    } else {
        // sin(pi r) = (-i/2) e^{i pi r} (1 - e^{-2 i pi r})
        i * PI * r + CNum::new(-LN_2, -PI / 2.0) + (1.0 - (-2.0 * PI * i * r).exp()).ln()
    };
    core + CNum::new(0.0, sign_phase)
}

/// `(a)_n` by direct product.
pub fn pochhammer(a: CNum, n: u32) -> CNum {
    (0..n).fold(CNum::new(1.0, 0.0), |acc, k| acc * (a + k as f64))
}

/// `Gamma(a + y) / Gamma(a)` for complex `y`.
pub fn pochhammer_c(a: CNum, y: CNum) -> Result<CNum> {
    Ok(pochhammer_c_log(a, y)?.exp())
}

pub fn pochhammer_c_log(a: CNum, y: CNum) -> Result<LogC> {
    Ok(lgamma(a + y)? / lgamma(a)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesCtrl {
    pub rel_tol: f64,
    pub n_max: usize,
    pub tail_window: usize,
}

impl Default for SeriesCtrl {
    fn default() -> SeriesCtrl {
        SeriesCtrl { rel_tol: 1e-12, n_max: 1 << 20, tail_window: 64 }
    }
}

impl SeriesCtrl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.n_max < 2 * self.tail_window {
            return Err(Error::Precondition(format!("bad series control {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesResult {
    pub value: CNum,
    pub terms_used: usize,
    pub err_estimate: f64,
    pub converged: bool,
    /// Largest term magnitude seen; large values relative to `value`
    /// mean cancellation inside the series.
    pub max_term: f64,
}

/// Neumaier summation on both components.
#[derive(Clone, Copy, Default)]
struct Accum {
    s: CNum,
    c: CNum,
}

impl Accum {
    fn add(&mut self, x: CNum) {
        fn two(s: f64, c: &mut f64, x: f64) -> f64 {
            let t = s + x;
            if s.abs() >= x.abs() {
                *c += (s - t) + x;
            } else {
                *c += (x - t) + s;
            }
            t
        }
        self.s.re = two(self.s.re, &mut self.c.re, x.re);
        self.s.im = two(self.s.im, &mut self.c.im, x.im);
    }

    fn total(&self) -> CNum {
        self.s + self.c
    }
}

fn terminating_length(nums: &[CNum]) -> Option<usize> {
    nums.iter()
        .filter(|a| a.re <= POLE_EPS && pole_distance(**a) < POLE_EPS)
        .map(|a| (-a.re).round() as usize)
        .min()
}

/// Sum of `prod (a_i)_n / (n! prod (b_j)_n)` over `n >= 0`.
pub fn sum_pfq(nums: &[CNum], dens: &[CNum], ctrl: &SeriesCtrl) -> Result<SeriesResult> {
    ctrl.validate()?;
    if nums.len() != dens.len() + 1 {
        return Err(Error::Precondition(format!(
            "unit-argument series needs p = q+1, got p={}, q={}",
            nums.len(),
            dens.len()
        )));
    }
    if let Some(b) = dens.iter().find(|b| pole_distance(**b) < POLE_EPS) {
        return Err(Error::Pole(format!("denominator parameter {b}")));
    }
    let ratio = |n: usize| {
        let nf = n as f64;
        let mut num = CNum::new(1.0, 0.0);
        for a in nums {
            num *= a + nf;
        }
        let mut den = CNum::new(nf + 1.0, 0.0);
        for b in dens {
            den *= b + nf;
        }
        num / den
    };

    if let Some(m) = terminating_length(nums) {
        // (-m)_n vanishes for n > m; the last factor is made exact
        let mut acc = Accum::default();
        let mut t = CNum::new(1.0, 0.0);
        let mut max_term = 1.0f64;
        for n in 0..=m {
            acc.add(t);
            max_term = max_term.max(t.norm());
            if n < m {
                t *= ratio(n);
            }
        }
        return Ok(SeriesResult {
            value: acc.total(),
            terms_used: m + 1,
            err_estimate: 0.0,
            converged: true,
            max_term,
        });
    }

    let sa: CNum = nums.iter().sum();
    let sb: CNum = dens.iter().sum();
    let sigma = sb - sa;
    if sigma.re <= 0.0 {
        return Err(Error::Precondition(format!("series diverges: Re(sum b - sum a) = {}", sigma.re)));
    }
    // t_n ~ C n^(-sigma-1) (1 + c1/n + ...)
    let c1 = (nums.iter().map(|a| a * (a - 1.0)).sum::<CNum>()
        - dens.iter().map(|b| b * (b - 1.0)).sum::<CNum>())
        / 2.0;
    let tail = |t: CNum, n: usize| {
        let nf = n as f64;
        t * (nf / sigma - 0.5 - c1 / (sigma * (sigma + 1.0)))
    };

    let mut acc = Accum::default();
    let mut t = CNum::new(1.0, 0.0);
    let mut n = 0usize;
    let mut max_term = 1.0f64;
    acc.add(t);
    while n < ctrl.tail_window {
        t *= ratio(n);
        n += 1;
        acc.add(t);
        max_term = max_term.max(t.norm());
    }
    // tail-corrected partial sums err by ~ n^-(sigma+2); one Richardson
    // step per doubling removes that term
    let r = CNum::new(2.0, 0.0).powc(-(sigma + 2.0));
    let mut estimate = acc.total() + tail(t, n);
    let mut extrapolated: Option<CNum> = None;
    let mut best: Option<(CNum, f64)> = None;
    while 2 * n <= ctrl.n_max {
        let target = 2 * n;
        while n < target {
            t *= ratio(n);
            n += 1;
            acc.add(t);
            max_term = max_term.max(t.norm());
        }
        let refined = acc.total() + tail(t, n);
        let rich = (refined - r * estimate) / (1.0 - r);
        let mut cand = (refined, (refined - estimate).norm());
        if let Some(prev) = extrapolated {
            let e = (rich - prev).norm();
            if e < cand.1 {
                cand = (rich, e);
            }
        }
        estimate = refined;
        extrapolated = Some(rich);
        if !cand.0.re.is_finite() || !cand.0.im.is_finite() {
            return Err(Error::NotConverged(n));
        }
        if best.is_none_or(|b| cand.1 < b.1) {
            best = Some(cand);
        }
        if cand.1 <= ctrl.rel_tol * cand.0.norm() {
            break;
        }
    }
    let (value, err) = best.ok_or(Error::NotConverged(n))?;
    Ok(SeriesResult {
        value,
        terms_used: n + 1,
        err_estimate: err,
        converged: err <= ctrl.rel_tol * value.norm(),
        max_term,
    })
}

/// Collected arguments whose distance from singularities must be checked.
#[derive(Clone, Debug, Default)]
pub struct Margins {
    pub gamma: Vec<CNum>,
    pub sin: Vec<CNum>,
}

impl Margins {
    pub fn gamma(&mut self, z: CNum) -> &mut Self {
        self.gamma.push(z);
        self
    }

    pub fn sin(&mut self, z: CNum) -> &mut Self {
        self.sin.push(z);
        self
    }

    pub fn extend(&mut self, o: &Margins) {
        self.gamma.extend_from_slice(&o.gamma);
        self.sin.extend_from_slice(&o.sin);
    }

    pub fn min_gamma_distance(&self) -> f64 {
        self.gamma.iter().map(|z| pole_distance(*z)).fold(f64::INFINITY, f64::min)
    }

    pub fn min_sin_distance(&self) -> f64 {
        self.sin.iter().map(|z| int_distance(*z)).fold(f64::INFINITY, f64::min)
    }

    pub fn ok(&self) -> bool {
        self.check().is_ok()
    }

    pub fn check(&self) -> Result<()> {
        if let Some(z) = self.gamma.iter().find(|z| pole_distance(**z) < GAMMA_MARGIN) {
            return Err(Error::Pole(format!("{z} (margin {GAMMA_MARGIN})")));
        }
        if let Some(z) = self.sin.iter().find(|z| int_distance(**z) < SIN_MARGIN) {
            return Err(Error::NearInteger(format!("{z} (margin {SIN_MARGIN})")));
        }
        Ok(())
    }
}

/// Outcome of a J, L or M evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Eval {
    pub value: CNum,
    /// Absolute error estimate from the series truncation.
    pub err_estimate: f64,
    pub terms_used: usize,
    /// True when the two series terms cancel to more than nine digits.
    pub low_precision: bool,
}

fn ln_gamma_sum(args: &[CNum]) -> Result<LogC> {
    args.iter().try_fold(LogC::ONE, |acc, z| Ok(acc * lgamma(*z)?))
}

fn combine(parts: [(LogC, SeriesResult); 2], sign: f64) -> Result<Eval> {
    let [(l1, s1), (l2, s2)] = parts;
    for s in [&s1, &s2] {
        if !s.converged {
            return Err(Error::NotConverged(s.terms_used));
        }
    }
    let t1 = l1.times(s1.value);
    let t2 = l2.times(s2.value) * sign;
    let value = t1 + t2;
    let err = l1.exp().norm() * s1.err_estimate + l2.exp().norm() * s2.err_estimate;
    let scale = t1.norm().max(t2.norm());
    Ok(Eval {
        value,
        err_estimate: err,
        terms_used: s1.terms_used + s2.terms_used,
        low_precision: scale > 0.0 && value.norm() < 1e-9 * scale,
    })
}

fn check_saalschutz(x: &[CNum; 7]) -> Result<()> {
    let [a, b, c, d, e, f, g] = *x;
    let r = e + f + g - a - b - c - d - 1.0;
    if r.norm() > HYPERPLANE_TOL * (1.0 + x.iter().map(|z| z.norm()).fold(0.0, f64::max)) {
        return Err(Error::Precondition(format!("E+F+G-A-B-C-D-1 = {r}")));
    }
    Ok(())
}

/// `Gamma[A,B,C,D / E,F,G] * 4F3(A,B,C,D; E,F,G; 1)` as prefactor and series.
pub fn f43_star_parts(x: [CNum; 7], ctrl: &SeriesCtrl) -> Result<(LogC, SeriesResult)> {
    check_saalschutz(&x)?;
    let pre = ln_gamma_sum(&x[..4])? / ln_gamma_sum(&x[4..])?;
    let s = sum_pfq(&x[..4], &x[4..], ctrl)?;
    Ok((pre, s))
}

pub fn f43_star(x: [CNum; 7], ctrl: &SeriesCtrl) -> Result<SeriesResult> {
    let (pre, s) = f43_star_parts(x, ctrl)?;
    let scale = pre.exp().norm();
    Ok(SeriesResult { value: pre.times(s.value), err_estimate: s.err_estimate * scale, ..s })
}

pub fn j_margins(x: &[CNum; 7]) -> Margins {
    let [a, b, c, d, e, f, g] = *x;
    let mut m = Margins::default();
    m.sin(a);
    for z in [a, b, c, d, e, f, g, 1.0 + a - e, 1.0 + a - f, 1.0 + a - g, 1.0 + a - b, 1.0 + a - c, 1.0 + a - d] {
        m.gamma(z);
    }
    m
}

/// `J(A;B,C,D;E,F,G)` as the sum of its two complementary 4F3 terms.
pub fn j_value(x: &[CNum; 7], ctrl: &SeriesCtrl) -> Result<Eval> {
    check_saalschutz(x)?;
    j_margins(x).check()?;
    let [a, b, c, d, e, f, g] = *x;
    let s = log_sin_pi(a)?;
    let l1 = (s * lgamma(a)? * ln_gamma_sum(&[1.0 + a - e, 1.0 + a - f, 1.0 + a - g, e, f, g])?).inv();
    let s1 = sum_pfq(&[a, b, c, d], &[e, f, g], ctrl)?;
    let l2 = (s * ln_gamma_sum(&[a, b, c, d, 1.0 + a - b, 1.0 + a - c, 1.0 + a - d])?).inv();
    let s2 = sum_pfq(&[a, 1.0 + a - e, 1.0 + a - f, 1.0 + a - g], &[1.0 + a - b, 1.0 + a - c, 1.0 + a - d], ctrl)?;
    combine([(l1, s1), (l2, s2)], 1.0)
}

/// `sin(pi A) Gamma(A) J`.
pub fn k_value(x: &[CNum; 7], ctrl: &SeriesCtrl) -> Result<CNum> {
    let j = j_value(x, ctrl)?;
    Ok((log_sin_pi(x[0])? * lgamma(x[0])?).times(j.value))
}

pub fn l_margins(x: &[CNum; 7]) -> Margins {
    let [a, b, c, d, e, f, g] = *x;
    let mut m = Margins::default();
    m.sin(e);
    for z in [a, b, c, d, e, f, g, 1.0 - e + a, 1.0 - e + b, 1.0 - e + c, 1.0 - e + d, 2.0 - e, 1.0 + f - e, 1.0 + g - e] {
        m.gamma(z);
    }
    m
}

/// `L(A,B,C,D;E;F,G)` as the difference of its two supplementary 4F3 terms.
pub fn l_value(x: &[CNum; 7], ctrl: &SeriesCtrl) -> Result<Eval> {
    check_saalschutz(x)?;
    l_margins(x).check()?;
    let [a, b, c, d, e, f, g] = *x;
    let s = log_sin_pi(e)?;
    let u = |z: CNum| 1.0 - e + z;
    let l1 = (s * ln_gamma_sum(&[u(a), u(b), u(c), u(d), e, f, g])?).inv();
    let s1 = sum_pfq(&[a, b, c, d], &[e, f, g], ctrl)?;
    let l2 = (s * ln_gamma_sum(&[a, b, c, d, 2.0 - e, u(f), u(g)])?).inv();
    let s2 = sum_pfq(&[u(a), u(b), u(c), u(d)], &[2.0 - e, u(f), u(g)], ctrl)?;
    combine([(l1, s1), (l2, s2)], -1.0)
}

/// Parameters `(a; b,c,d,e,f)` of the very-well-poised 7F6 form of L.
pub fn l_7f6_params(x: &[CNum; 7]) -> [CNum; 6] {
    let [a, b, c, d, e, _f, g] = *x;
    [d + g - e, g - a, g - b, g - c, d, 1.0 + d - e]
}

/// Numerator and denominator lists of a very-well-poised series with
/// parameters `a; rest`.
pub fn vwp_lists(a: CNum, rest: &[CNum]) -> (Vec<CNum>, Vec<CNum>) {
    let mut nums = vec![a, 1.0 + a / 2.0];
    nums.extend_from_slice(rest);
    let mut dens = vec![a / 2.0];
    dens.extend(rest.iter().map(|x| 1.0 + a - x));
    (nums, dens)
}

/// True iff the lists are well-poised and the second numerator is `1 + a/2`.
pub fn is_very_well_poised(nums: &[CNum], dens: &[CNum], tol: f64) -> bool {
    if nums.len() != dens.len() + 1 || nums.len() < 2 {
        return false;
    }
    let a = nums[0];
    let well = dens.iter().zip(&nums[1..]).all(|(b, x)| (b + x - 1.0 - a).norm() <= tol);
    well && (nums[1] - 1.0 - a / 2.0).norm() <= tol
}

pub fn is_saalschutzian(nums: &[CNum], dens: &[CNum], tol: f64) -> bool {
    nums.len() == dens.len() + 1
        && (dens.iter().sum::<CNum>() - nums.iter().sum::<CNum>() - 1.0).norm() <= tol
}

pub fn l7f6_margins(x: &[CNum; 7]) -> Margins {
    let [a, b, c, d, e, f] = l_7f6_params(x);
    let mut m = Margins::default();
    m.gamma(1.0 + a).gamma(a / 2.0);
    for z in [b, c, d, e, f] {
        m.gamma(1.0 + a - z);
    }
    m.gamma(2.0 + 2.0 * a - b - c - d - e - f);
    m
}

/// L through its very-well-poised 7F6 representation; needs `Re(F-D) > 0`.
pub fn l_value_7f6(x: &[CNum; 7], ctrl: &SeriesCtrl) -> Result<Eval> {
    check_saalschutz(x)?;
    if (x[5] - x[3]).re <= 0.0 {
        return Err(Error::Precondition(format!("Re(F-D) = {} must be positive", (x[5] - x[3]).re)));
    }
    l7f6_margins(x).check()?;
    let [a, b, c, d, e, f] = l_7f6_params(x);
    let rest = [b, c, d, e, f];
    let mut den_args: Vec<CNum> = rest.iter().map(|z| 1.0 + a - z).collect();
    den_args.push(2.0 + 2.0 * a - b - c - d - e - f);
    let pre = lgamma(1.0 + a)? / (LogC::of_real(PI) * ln_gamma_sum(&den_args)?);
    let (nums, dens) = vwp_lists(a, &rest);
    let s = sum_pfq(&nums, &dens, ctrl)?;
    if !s.converged {
        return Err(Error::NotConverged(s.terms_used));
    }
    let scale = pre.exp().norm();
    Ok(Eval {
        value: pre.times(s.value),
        err_estimate: scale * s.err_estimate,
        terms_used: s.terms_used,
        low_precision: false,
    })
}

fn check_w(w: &[CNum; 8]) -> Result<()> {
    let r = w[1..].iter().sum::<CNum>() - 3.0 * w[0] - 2.0;
    if r.norm() > HYPERPLANE_TOL * (1.0 + w.iter().map(|z| z.norm()).fold(0.0, f64::max)) {
        return Err(Error::Precondition(format!("b+...+h-3a-2 = {r}")));
    }
    Ok(())
}

/// Complementary parameter list `(2b-a; b, b-a+(c..h))`.
pub fn m_complement(w: &[CNum; 8]) -> [CNum; 8] {
    let (a, b) = (w[0], w[1]);
    let mut out = [2.0 * b - a, b, CNum::default(), CNum::default(), CNum::default(), CNum::default(), CNum::default(), CNum::default()];
    for k in 2..8 {
        out[k] = b - a + w[k];
    }
    out
}

pub fn m_margins(w: &[CNum; 8]) -> Margins {
    let (a, b) = (w[0], w[1]);
    let mut m = Margins::default();
    m.sin(b - a);
    m.gamma(1.0 + a).gamma(a / 2.0);
    for x in &w[1..] {
        m.gamma(1.0 + a - x);
    }
    let wc = m_complement(w);
    m.gamma(1.0 + wc[0]).gamma(wc[0] / 2.0);
    for x in &wc[1..] {
        m.gamma(1.0 + wc[0] - x);
    }
    for k in 2..8 {
        m.gamma(w[k]).gamma(wc[k]);
    }
    m
}

/// `M(a;b;c,d,e,f,g,h)`: difference of two complementary very-well-poised
/// 9F8 series. `Gamma[b..h]` cancels between each V and the denominator,
/// so it is never evaluated.
pub fn m_value(w: &[CNum; 8], ctrl: &SeriesCtrl) -> Result<Eval> {
    check_w(w)?;
    m_margins(w).check()?;
    let a = w[0];
    let wc = m_complement(w);
    let ac = wc[0];
    let s = log_sin_pi(w[1] - a)?;
    let half_pi = LogC::of_real(PI / 2.0);
    // V(a; b..h) / Gamma[b..h] / Gamma[b-a+(c..h)]
    let den1: Vec<CNum> = w[1..].iter().map(|x| 1.0 + a - x).chain(wc[2..].iter().copied()).collect();
    let l1 = half_pi * lgamma(1.0 + a)? / (s * ln_gamma_sum(&den1)?);
    // V(2b-a; b, b-a+(c..h)) / Gamma[b, b-a+(c..h)] / Gamma[c..h]
    let den2: Vec<CNum> = wc[1..].iter().map(|x| 1.0 + ac - x).chain(w[2..].iter().copied()).collect();
    let l2 = half_pi * lgamma(1.0 + ac)? / (s * ln_gamma_sum(&den2)?);
    let (n1, d1) = vwp_lists(a, &w[1..]);
    let (n2, d2) = vwp_lists(ac, &wc[1..]);
    let s1 = sum_pfq(&n1, &d1, ctrl)?;
    let s2 = sum_pfq(&n2, &d2, ctrl)?;
    combine([(l1, s1), (l2, s2)], -1.0)
}

/// `(A..G)` from `(x0..x5)`.
pub fn twiddle_params(x: [CNum; 6]) -> [CNum; 7] {
    let [x0, x1, x2, x3, x4, x5] = x;
    let base = 0.5 + x0 + x1 + x2;
    [
        base + x3 + x4 + x5,
        base - x3 - x4 + x5,
        base + x3 - x4 - x5,
        base - x3 + x4 - x5,
        1.0 + 2.0 * x1 + 2.0 * x2,
        1.0 + 2.0 * x0 + 2.0 * x1,
        1.0 + 2.0 * x0 + 2.0 * x2,
    ]
}

/// Numeric point on the W hyperplane; `h` is derived.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointW([CNum; 8]);

impl PointW {
    pub fn new(free: [CNum; 7]) -> PointW {
        let [a, b, c, d, e, f, g] = free;
        PointW([a, b, c, d, e, f, g, 2.0 + 3.0 * a - b - c - d - e - f - g])
    }

    pub fn coords(&self) -> &[CNum; 8] {
        &self.0
    }

    /// Same point with `b` moved by `delta` and `h` re-derived.
    pub fn shift_b(&self, delta: CNum) -> PointW {
        let mut free: [CNum; 7] = self.0[..7].try_into().unwrap();
        free[1] += delta;
        PointW::new(free)
    }

    pub fn to_json(&self) -> serde_json::Value {
        point_json(&self.0[..7], &["a", "b", "c", "d", "e", "f", "g"])
    }

    pub fn from_json(v: &serde_json::Value) -> Result<PointW> {
        let free = read_point(v, &["a", "b", "c", "d", "e", "f", "g"])?;
        Ok(PointW::new(free.try_into().unwrap()))
    }
}

/// Numeric point on the V hyperplane; `G` is derived.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointV([CNum; 7]);

impl PointV {
    pub fn new(free: [CNum; 6]) -> PointV {
        let [a, b, c, d, e, f] = free;
        PointV([a, b, c, d, e, f, 1.0 + a + b + c + d - e - f])
    }

    pub fn coords(&self) -> &[CNum; 7] {
        &self.0
    }

    pub fn to_json(&self) -> serde_json::Value {
        point_json(&self.0[..6], &["A", "B", "C", "D", "E", "F"])
    }

    pub fn from_json(v: &serde_json::Value) -> Result<PointV> {
        let free = read_point(v, &["A", "B", "C", "D", "E", "F"])?;
        Ok(PointV::new(free.try_into().unwrap()))
    }
}

fn point_json(vals: &[CNum], keys: &[&str]) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = keys
        .iter()
        .zip(vals)
        .map(|(k, z)| (k.to_string(), serde_json::json!([z.re, z.im])))
        .collect();
    serde_json::Value::Object(map)
}

fn read_point(v: &serde_json::Value, keys: &[&str]) -> Result<Vec<CNum>> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("point must be a JSON object".into()))?;
    for k in obj.keys() {
        if !keys.contains(&k.as_str()) {
            return Err(Error::Parse(format!("unexpected key `{k}` in point (derived or unknown coordinate)")));
        }
    }
    keys.iter()
        .map(|k| {
            let pair = obj
                .get(*k)
                .and_then(|x| x.as_array())
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Parse(format!("key `{k}` must be a [re, im] pair")))?;
            let re = pair[0].as_f64().ok_or_else(|| Error::Parse(format!("`{k}` re is not a number")))?;
            let im = pair[1].as_f64().ok_or_else(|| Error::Parse(format!("`{k}` im is not a number")))?;
            Ok(CNum::new(re, im))
        })
        .collect()
}
