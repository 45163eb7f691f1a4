//! Adaptive explicit Runge–Kutta integrator for complex systems `y' = f(t, y)`.
//!
//! The scheme is the eighth-order Dormand–Prince pair (DOP853) of Hairer,
//! Nørsett and Wanner, with its combined fifth/third-order error estimate.
//! The derivative at the end of an accepted step is reused as the first
//! stage of the next one.

#![allow(clippy::excessive_precision)]

use crate::{Error, Result, C64};

const STAGES: usize = 12;
const C: [f64; STAGES] = [
    0.0,
    0.526001519587677318785587544488e-01,
    0.789002279381515978178381316732e-01,
    0.118350341907227396726757197510,
    0.281649658092772603273242802490,
    0.333333333333333333333333333333,
    0.25,
    0.307692307692307692307692307692,
    0.651282051282051282051282051282,
    0.6,
    0.857142857142857142857142857142,
    1.0,
];
// lower-triangular stage matrix; row s holds a[s][0..s]
const A: [[f64; STAGES]; STAGES] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        5.26001519587677318785587544488e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        1.97250569845378994544595329183e-2,
        5.91751709536136983633785987549e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.95875854768068491816892993775e-2,
        0.0,
        8.87627564304205475450678981324e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.41365134159266685502369798665e-1,
        0.0,
        -8.84549479328286085344864962717e-1,
        9.24834003261792003115737966543e-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.7037037037037037037037037037e-2,
        0.0,
        0.0,
        1.70828608729473871279604482173e-1,
        1.25467687566822425016691814123e-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.7109375e-2,
        0.0,
        0.0,
        1.70252211019544039314978060272e-1,
        6.02165389804559606850219397283e-2,
        -1.7578125e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.70920001185047927108779319836e-2,
        0.0,
        0.0,
        1.70383925712239993810214054705e-1,
        1.07262030446373284651809199168e-1,
        -1.53194377486244017527936158236e-2,
        8.27378916381402288758473766002e-3,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        6.24110958716075717114429577812e-1,
        0.0,
        0.0,
        -3.36089262944694129406857109825,
        -8.68219346841726006818189891453e-1,
        2.75920996994467083049415600797e1,
        2.01540675504778934086186788979e1,
        -4.34898841810699588477366255144e1,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        4.77662536438264365890433908527e-1,
        0.0,
        0.0,
        -2.48811461997166764192642586468,
        -5.90290826836842996371446475743e-1,
        2.12300514481811942347288949897e1,
        1.52792336328824235832596922938e1,
        -3.32882109689848629194453265587e1,
        -2.03312017085086261358222928593e-2,
        0.0,
        0.0,
        0.0,
    ],
    [
        -9.3714243008598732571704021658e-1,
        0.0,
        0.0,
        5.18637242884406370830023853209,
        1.09143734899672957818500254654,
        -8.14978701074692612513997267357,
        -1.85200656599969598641566180701e1,
        2.27394870993505042818970056734e1,
        2.49360555267965238987089396762,
        -3.0467644718982195003823669022,
        0.0,
        0.0,
    ],
    [
        2.27331014751653820792359768449,
        0.0,
        0.0,
        -1.05344954667372501984066689879e1,
        -2.00087205822486249909675718444,
        -1.79589318631187989172765950534e1,
        2.79488845294199600508499808837e1,
        -2.85899827713502369474065508674,
        -8.87285693353062954433549289258,
        1.23605671757943030647266201528e1,
        6.43392746015763530355970484046e-1,
        0.0,
    ],
];
const B: [f64; STAGES] = [
    5.42937341165687622380535766363e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.45031289275240888144113950566,
    1.89151789931450038304281599044,
    -5.8012039600105847814672114227,
    3.1116436695781989440891606237e-1,
    -1.52160949662516078556178806805e-1,
    2.01365400804030348374776537501e-1,
    4.47106157277725905176885569043e-2,
];
// fifth-order error weights, last entry multiplies f(t + h, y_new)
const E5: [f64; STAGES + 1] = [
    0.1312004499419488073250102996e-1,
    0.0,
    0.0,
    0.0,
    0.0,
    -0.1225156446376204440720569753e+1,
    -0.4957589496572501915214079952,
    0.1664377182454986536961530415e+1,
    -0.3503288487499736816886487290,
    0.3341791187130174790297318841,
    0.8192320648511571246570742613e-1,
    -0.2235530786388629525884427845e-1,
    0.0,
];
// third-order error weights
const E3: [f64; STAGES + 1] = [
    5.42937341165687622380535766363e-2 - 0.244094488188976377952755905512,
    0.0,
    0.0,
    0.0,
    0.0,
    4.45031289275240888144113950566,
    1.89151789931450038304281599044,
    -5.8012039600105847814672114227,
    3.1116436695781989440891606237e-1 - 0.733846688281611857341361741547,
    -1.52160949662516078556178806805e-1,
    2.01365400804030348374776537501e-1,
    4.47106157277725905176885569043e-2 - 0.220588235294117647058823529412e-1,
    0.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;
const MAX_STEPS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerances {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        if !(rel > 0.0 && rel.is_finite() && abs > 0.0 && abs.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tolerances must be positive and finite, got rel = {rel}, abs = {abs}"
            )));
        }
        Ok(Self { rel, abs })
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 1e-12,
        }
    }
}

/// Step counters accumulated over one or more `integrate` calls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl std::ops::AddAssign for Stats {
    fn add_assign(&mut self, rhs: Self) {
        self.accepted += rhs.accepted;
        self.rejected += rhs.rejected;
        self.evaluations += rhs.evaluations;
    }
}

pub struct Dop853 {
    tol: Tolerances,
    // k[0..12] are the stages, k[12] the derivative at the candidate point
    k: Vec<Vec<C64>>,
    stage: Vec<C64>,
    y_new: Vec<C64>,
    last_step: Option<f64>,
}

impl Dop853 {
    pub fn new(dim: usize, tol: Tolerances) -> Self {
        let zero = || vec![C64::new(0.0, 0.0); dim];
        Self {
            tol,
            k: (0..=STAGES).map(|_| zero()).collect(),
            stage: zero(),
            y_new: zero(),
            last_step: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.stage.len()
    }

    /// Advances `y` from `t0` to `t1 > t0`. Successive calls reuse the last
    /// accepted step size as the initial guess.
    pub fn integrate<F>(&mut self, mut rhs: F, t0: f64, t1: f64, y: &mut [C64]) -> Result<Stats>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        assert_eq!(y.len(), self.dim(), "state dimension mismatch");
        let mut stats = Stats::default();
        if t1 <= t0 {
            return Ok(stats);
        }
        let span = t1 - t0;
        let min_step = 1e-14 * span.max(t0.abs());

        rhs(t0, y, &mut self.k[0]);
        stats.evaluations += 1;

        let mut h = match self.last_step {
            Some(h) => h,
            None => {
                let h = self.initial_step(&mut rhs, t0, y);
                stats.evaluations += 1;
                h
            }
        }
        .min(span);

        let mut t = t0;
        let mut rejected_last = false;
        while t < t1 {
            if stats.accepted + stats.rejected > MAX_STEPS {
                return Err(Error::IntegrationFailure {
                    t,
                    step: h,
                    k: None,
                });
            }
            let last = t + h >= t1 || (t1 - (t + h)) < min_step;
            let h_step = if last { t1 - t } else { h };

            let err = self.try_step(&mut rhs, t, h_step, y);
            stats.evaluations += STAGES;

            if err <= 1.0 {
                stats.accepted += 1;
                t = if last { t1 } else { t + h_step };
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, STAGES);
                let mut factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(ERROR_EXPONENT)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                if rejected_last {
                    factor = factor.min(1.0);
                }
                rejected_last = false;
                // a clipped final step says nothing about the next size
                if !(last && h_step < h) {
                    h = h_step * factor;
                }
            } else {
                stats.rejected += 1;
                rejected_last = true;
                h = h_step * (SAFETY * err.powf(ERROR_EXPONENT)).clamp(MIN_FACTOR, 1.0);
                if h < min_step {
                    return Err(Error::IntegrationFailure {
                        t,
                        step: h,
                        k: None,
                    });
                }
            }
        }
        self.last_step = Some(h);
        Ok(stats)
    }

    fn initial_step<F>(&mut self, rhs: &mut F, t0: f64, y: &[C64]) -> f64
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let d0 = self.scaled_norm(y, y);
        let d1 = self.scaled_norm(&self.k[0], y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        for (s, (yi, ki)) in self.stage.iter_mut().zip(y.iter().zip(&self.k[0])) {
            *s = yi + ki * h0;
        }
        rhs(t0 + h0, &self.stage, &mut self.k[1]);
        let diff: Vec<C64> = self.k[1]
            .iter()
            .zip(&self.k[0])
            .map(|(a, b)| a - b)
            .collect();
        let d2 = self.scaled_norm(&diff, y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 8.0)
        };
        (100.0 * h0).min(h1)
    }

    fn scaled_norm(&self, v: &[C64], y: &[C64]) -> f64 {
        let sum: f64 = v
            .iter()
            .zip(y)
            .map(|(vi, yi)| (vi.norm() / (self.tol.abs + self.tol.rel * yi.norm())).powi(2))
            .sum();
        (sum / v.len() as f64).sqrt()
    }

    /// One trial step from `(t, y)`; leaves the candidate in `y_new`, its
    /// derivative in `k[STAGES]`, and returns the scaled error norm.
    fn try_step<F>(&mut self, rhs: &mut F, t: f64, h: f64, y: &[C64]) -> f64
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = y.len();
        for s in 1..STAGES {
            let row = &A[s];
            for i in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for (j, &a) in row[..s].iter().enumerate() {
                    if a != 0.0 {
                        acc += self.k[j][i] * a;
                    }
                }
                self.stage[i] = y[i] + acc * h;
            }
            rhs(t + C[s] * h, &self.stage, &mut self.k[s]);
        }
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for (j, &b) in B.iter().enumerate() {
                if b != 0.0 {
                    acc += self.k[j][i] * b;
                }
            }
            self.y_new[i] = y[i] + acc * h;
        }
        let (head, tail) = self.k.split_at_mut(STAGES);
        rhs(t + h, &self.y_new, &mut tail[0]);

        let mut err5 = 0.0;
        let mut err3 = 0.0;
        for i in 0..n {
            let sc = self.tol.abs + self.tol.rel * y[i].norm().max(self.y_new[i].norm());
            let mut e5 = tail[0][i] * E5[STAGES];
            let mut e3 = C64::new(0.0, 0.0);
            for (j, kj) in head.iter().enumerate() {
                e5 += kj[i] * E5[j];
                e3 += kj[i] * E3[j];
            }
            err5 += (e5.norm() / sc).powi(2);
            err3 += (e3.norm() / sc).powi(2);
        }
        if err5 == 0.0 && err3 == 0.0 {
            return 0.0;
        }
        h.abs() * err5 / (err5 + 0.01 * err3).sqrt()
    }
}
