use crate::frames::FrameError;
use crate::scalar::Real;

/// Samples of a trigonometric polynomial of degree at most two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrigSamples<T> {
    /// `f(0), f(π/4), f(π/2)` of `A + B cos 2t + C sin 2t`.
    Quadratic([T; 3]),
    /// `f(−π/2), f(−π/4), f(0), f(π/4), f(π/2)` of
    /// `A + B cos 2t + C sin 2t + D cos t + E sin t`.
    Mixed([T; 5]),
}

impl<T: Real> TrigSamples<T> {
    pub fn quadratic(f: impl Fn(T) -> T) -> Self {
        let q = T::FRAC_PI_4();
        TrigSamples::Quadratic([f(T::zero()), f(q), f(q + q)])
    }

    pub fn mixed(f: impl Fn(T) -> T) -> Self {
        let q = T::FRAC_PI_4();
        TrigSamples::Mixed([f(-q - q), f(-q), f(T::zero()), f(q), f(q + q)])
    }

    fn max_abs(&self) -> T {
        let s: &[T] = match self {
            TrigSamples::Quadratic(s) => s,
            TrigSamples::Mixed(s) => s,
        };
        s.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigPoly<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub e: T,
}

impl<T: Real> TrigPoly<T> {
    pub fn fit(samples: &TrigSamples<T>) -> Self {
        let two = T::lit(2.0);
        match *samples {
            TrigSamples::Quadratic([f0, f1, f2]) => {
                let a = (f0 + f2) / two;
                TrigPoly { a, b: (f0 - f2) / two, c: f1 - a, d: T::zero(), e: T::zero() }
            }
            TrigSamples::Mixed([fm2, fm1, f0, f1, f2]) => {
                let r2 = T::SQRT_2();
                let e = (f2 - fm2) / two;
                let m = (f2 + fm2) / two;
                let n = (f1 + fm1) / two;
                let a = (n - (f0 + m) / r2) / (T::one() - r2);
                let b = a - m;
                let d = f0 + m - two * a;
                let c = (f1 - fm1) / two - e / r2;
                TrigPoly { a, b, c, d, e }
            }
        }
    }

    pub fn value(&self, t: T) -> T {
        let t2 = t + t;
        self.a + self.b * t2.cos() + self.c * t2.sin() + self.d * t.cos() + self.e * t.sin()
    }

    pub fn derivative(&self, t: T) -> T {
        let two = T::lit(2.0);
        let t2 = t + t;
        two * (self.c * t2.cos() - self.b * t2.sin()) + self.e * t.cos() - self.d * t.sin()
    }

    pub fn second_derivative(&self, t: T) -> T {
        let four = T::lit(4.0);
        let t2 = t + t;
        -four * (self.b * t2.cos() + self.c * t2.sin()) - self.d * t.cos() - self.e * t.sin()
    }

    fn coefficient_scale(&self) -> T {
        [self.b, self.c, self.d, self.e].iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Global maximizer in `(−π, π]`; among (numerically) tied maxima the one
    /// of smallest `|t|`, preferring `t > 0` on exact ties.
    pub fn argmax(&self) -> T {
        let pi = T::PI();
        let two = T::lit(2.0);
        if self.d == T::zero() && self.e == T::zero() {
            // period π: maximizers are t0 and t0 − π, t0 ∈ (−π/2, π/2]
            let t0 = self.c.atan2(self.b) / two;
            return if t0 <= -pi / two { t0 + pi } else { t0 };
        }
        const GRID: usize = 256;
        let h = two * pi / T::lit(GRID as f64);
        let grid: Vec<(T, T)> = (0..GRID)
            .map(|k| {
                let t = -pi + h * T::lit((k + 1) as f64);
                (t, self.value(t))
            })
            .collect();
        let mut candidates = Vec::new();
        for k in 0..GRID {
            let prev = grid[(k + GRID - 1) % GRID].1;
            let next = grid[(k + 1) % GRID].1;
            if grid[k].1 >= prev && grid[k].1 >= next {
                candidates.push(self.refine(grid[k].0, h));
            }
        }
        let tie = T::lit(1e-12) * self.coefficient_scale().max(self.a.abs()).max(T::one());
        let best = candidates.iter().map(|&t| self.value(t)).fold(T::neg_infinity(), T::max);
        candidates
            .into_iter()
            .filter(|&t| self.value(t) >= best - tie)
            .map(|t| wrap(t, pi))
            .fold(None, |acc: Option<T>, t| match acc {
                None => Some(t),
                Some(s) if t.abs() < s.abs() || (t.abs() == s.abs() && t > s) => Some(t),
                keep => keep,
            })
            .unwrap_or_else(T::zero)
    }

    fn refine(&self, center: T, h: T) -> T {
        // golden section narrows the bracket, Newton on f' finishes it
        let g = T::lit(0.618_033_988_749_894_9);
        let (mut lo, mut hi) = (center - h, center + h);
        for _ in 0..40 {
            let x1 = hi - g * (hi - lo);
            let x2 = lo + g * (hi - lo);
            if self.value(x1) < self.value(x2) {
                lo = x1;
            } else {
                hi = x2;
            }
        }
        let mut t = (lo + hi) / T::lit(2.0);
        for _ in 0..20 {
            let d2 = self.second_derivative(t);
            if d2 >= T::zero() {
                break;
            }
            let step = self.derivative(t) / d2;
            if !step.is_finite() || step.abs() > h {
                break;
            }
            let next = t - step;
            if self.value(next) < self.value(t) {
                break;
            }
            t = next;
            if step.abs() <= T::epsilon() * (T::one() + t.abs()) {
                break;
            }
        }
        t
    }
}

fn wrap<T: Real>(t: T, pi: T) -> T {
    let two_pi = pi + pi;
    let mut t = t;
    while t > pi {
        t = t - two_pi;
    }
    while t <= -pi {
        t = t + two_pi;
    }
    t
}

/// Fits the samples and returns the global maximizer. Fails with
/// `DegenerateFit` when every non-constant coefficient is below
/// `1e-14 · max(1, max|sample|)`.
pub fn trig_fit_extremum<T: Real>(samples: TrigSamples<T>) -> Result<T, FrameError> {
    let poly = TrigPoly::fit(&samples);
    let floor = T::lit(1e-14).max(T::epsilon() * T::lit(4.0)) * samples.max_abs().max(T::one());
    if poly.coefficient_scale() < floor {
        return Err(FrameError::DegenerateFit);
    }
    Ok(poly.argmax())
}
