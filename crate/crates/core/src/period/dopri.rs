//! Dormand–Prince 5(4) with Hairer's 5th-order dense output, for autonomous
//! systems.

use super::PeriodError;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const MAX_STEPS: usize = 5_000_000;

/// One accepted step and its interpolant.
#[derive(Clone, Debug)]
pub struct Segment {
    pub t0: f64,
    pub h: f64,
    cont: [Vec<f64>; 5],
    /// State at `t0 + h`.
    pub y1: Vec<f64>,
    /// Derivative at `t0 + h`.
    pub f1: Vec<f64>,
}

impl Segment {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let [r1, r2, r3, r4, r5] = &self.cont;
        (0..r1.len())
            .map(|i| r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i]))))
            .collect()
    }
}

pub struct Stepper<'a, F: Fn(&[f64], &mut [f64])> {
    f: &'a F,
    rtol: f64,
    atol: f64,
    t: f64,
    y: Vec<f64>,
    k1: Vec<f64>,
    h: f64,
    steps: usize,
}

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

impl<'a, F: Fn(&[f64], &mut [f64])> Stepper<'a, F> {
    pub fn new(f: &'a F, y0: &[f64], rtol: f64, atol: f64, h_hint: f64) -> Result<Self, PeriodError> {
        let mut k1 = vec![0.0; y0.len()];
        f(y0, &mut k1);
        if !finite(&k1) {
            return Err(PeriodError::Pole { t: 0.0 });
        }
        let mut s = Stepper { f, rtol, atol, t: 0.0, y: y0.to_vec(), k1, h: 0.0, steps: 0 };
        s.h = s.initial_step(h_hint);
        Ok(s)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn derivative(&self) -> &[f64] {
        &self.k1
    }

    fn norm(&self, v: &[f64], y: &[f64]) -> f64 {
        let n = v.len().max(1) as f64;
        (v.iter()
            .zip(y)
            .map(|(e, yi)| {
                let sc = self.atol + self.rtol * yi.abs();
                (e / sc).powi(2)
            })
            .sum::<f64>()
            / n)
            .sqrt()
    }

    /// Hairer's starting-step heuristic.
    fn initial_step(&self, h_max: f64) -> f64 {
        let d0 = self.norm(&self.y, &self.y);
        let d1 = self.norm(&self.k1, &self.y);
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(h_max);
        let y1: Vec<f64> = self.y.iter().zip(&self.k1).map(|(y, k)| y + h0 * k).collect();
        let mut f1 = vec![0.0; y1.len()];
        (self.f)(&y1, &mut f1);
        if !finite(&f1) {
            return h0;
        }
        let diff: Vec<f64> = f1.iter().zip(&self.k1).map(|(a, b)| a - b).collect();
        let d2 = self.norm(&diff, &self.y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        (100.0 * h0).min(h1).min(h_max)
    }

    /// Advances one accepted step, never past `t_stop`.
    pub fn step(&mut self, t_stop: f64) -> Result<Segment, PeriodError> {
        let n = self.y.len();
        let f = self.f;
        let mut reject = false;
        loop {
            self.steps += 1;
            if self.steps > MAX_STEPS {
                return Err(PeriodError::StepBudget { t: self.t });
            }
            let remaining = t_stop - self.t;
            let h = self.h.min(remaining);
            if h <= 1e-14 * self.t.abs().max(1.0) {
                return Err(PeriodError::StepSizeUnderflow { t: self.t });
            }
            let y = &self.y;
            let k1 = &self.k1;
            let stage = |coeffs: &[(f64, &Vec<f64>)]| -> Vec<f64> {
                (0..n).map(|i| y[i] + h * coeffs.iter().map(|(c, k)| c * k[i]).sum::<f64>()).collect()
            };
            let eval = |x: &[f64]| {
                let mut out = vec![0.0; n];
                f(x, &mut out);
                out
            };
            let k1v = k1.clone();
            let k2 = eval(&stage(&[(A21, &k1v)]));
            let k3 = eval(&stage(&[(A31, &k1v), (A32, &k2)]));
            let k4 = eval(&stage(&[(A41, &k1v), (A42, &k2), (A43, &k3)]));
            let k5 = eval(&stage(&[(A51, &k1v), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = eval(&stage(&[(A61, &k1v), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
            let y1 = stage(&[(A71, &k1v), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = eval(&y1);
            let stages_ok = [&k2, &k3, &k4, &k5, &k6, &k7].iter().all(|k| finite(k)) && finite(&y1);
            if !stages_ok {
                self.h = h / 10.0;
                reject = true;
                if self.h <= 1e-14 * self.t.abs().max(1.0) {
                    return Err(PeriodError::Pole { t: self.t });
                }
                continue;
            }
            let err_vec: Vec<f64> = (0..n)
                .map(|i| h * (E1 * k1v[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]))
                .collect();
            let scale_ref: Vec<f64> = (0..n).map(|i| y[i].abs().max(y1[i].abs())).collect();
            let err = self.norm(&err_vec, &scale_ref);
            let fac = if err == 0.0 { FAC_MAX } else { SAFETY * err.powf(-0.2) };
            if err <= 1.0 {
                let fac_max = if reject { 1.0 } else { FAC_MAX };
                let ydiff: Vec<f64> = (0..n).map(|i| y1[i] - y[i]).collect();
                let bspl: Vec<f64> = (0..n).map(|i| h * k1v[i] - ydiff[i]).collect();
                let c4: Vec<f64> = (0..n).map(|i| ydiff[i] - h * k7[i] - bspl[i]).collect();
                let c5: Vec<f64> = (0..n)
                    .map(|i| h * (D1 * k1v[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]))
                    .collect();
                let seg = Segment {
                    t0: self.t,
                    h,
                    cont: [y.clone(), ydiff, bspl, c4, c5],
                    y1: y1.clone(),
                    f1: k7.clone(),
                };
                self.t = if h == remaining { t_stop } else { self.t + h };
                self.y = y1;
                self.k1 = k7;
                self.h = h * fac.clamp(FAC_MIN, fac_max);
                return Ok(seg);
            }
            reject = true;
            self.h = h * fac.clamp(FAC_MIN, 1.0);
        }
    }
}
