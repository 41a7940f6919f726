//! Fixed-step eighth-order Runge–Kutta integration of flat real systems.
//!
//! The tableau is the eighth-order solution of Dormand and Prince's
//! DOP853 pair as published by Hairer, Nørsett and Wanner (12 stages; the
//! embedded error estimators are not used). Complex states are passed in
//! interleaved `(re, im)` form.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

/// A first-order system `dy/dt = f(t, y)` over a flat real vector.
///
/// `rhs` may use interior scratch, but must be a deterministic function of
/// `(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]);
}

/// Closure adaptor for [`OdeSystem`].
pub struct FnSystem<F> {
    dim: usize,
    f: F,
}

impl<F: FnMut(f64, &[f64], &mut [f64])> FnSystem<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: FnMut(f64, &[f64], &mut [f64])> OdeSystem for FnSystem<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) {
        (self.f)(t, y, dy)
    }
}

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

/// Strictly lower-triangular stage matrix, row `i` holds `a_{i,0..i}`.
const A: [&[f64]; STAGES] = [
    &[],
    &[5.26001519587677318785587544488e-2],
    &[
        1.97250569845378994544595329183e-2,
        5.91751709536136983633785987549e-2,
    ],
    &[
        2.95875854768068491816892993775e-2,
        0.0,
        8.87627564304205475450678981324e-2,
    ],
    &[
        2.41365134159266685502369798665e-1,
        0.0,
        -8.84549479328286085344864962717e-1,
        9.24834003261792003115737966543e-1,
    ],
    &[
        3.7037037037037037037037037037e-2,
        0.0,
        0.0,
        1.70828608729473871279604482173e-1,
        1.25467687566822425016691814123e-1,
    ],
    &[
        3.7109375e-2,
        0.0,
        0.0,
        1.70252211019544039314978060272e-1,
        6.02165389804559606850219397283e-2,
        -1.7578125e-2,
    ],
    &[
        3.70920001185047927108779319836e-2,
        0.0,
        0.0,
        1.70383925712239993810214054705e-1,
        1.07262030446373284651809199168e-1,
        -1.53194377486244017527936158236e-2,
        8.27378916381402288758473766002e-3,
    ],
    &[
        6.24110958716075717114429577812e-1,
        0.0,
        0.0,
        -3.36089262944694129406857109825,
        -8.68219346841726006818189891453e-1,
        2.75920996994467083049415600797e1,
        2.01540675504778934086186788979e1,
        -4.34898841810699588477366255144e1,
    ],
    &[
        4.77662536438264365890433908527e-1,
        0.0,
        0.0,
        -2.48811461997166764192642586468,
        -5.90290826836842996371446475743e-1,
        2.12300514481811942347288949897e1,
        1.52792336328824235832596922938e1,
        -3.32882109689848629194453265587e1,
        -2.03312017085086261358222928593e-2,
    ],
    &[
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
    ],
    &[
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

/// Stage workspace for one integration; reusable across steps.
#[derive(Debug, Clone)]
pub struct Rk8 {
    k: Vec<Vec<f64>>,
    stage: Vec<f64>,
}

impl Rk8 {
    pub const ORDER: usize = 8;

    pub fn new(dim: usize) -> Self {
        Self {
            k: vec![vec![0.0; dim]; STAGES],
            stage: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.stage.len()
    }

    /// Advances `y` from `t` to `t + h` in place.
    pub fn step<S: OdeSystem + ?Sized>(
        &mut self,
        sys: &mut S,
        t: f64,
        y: &mut [f64],
        h: f64,
    ) -> Result<()> {
        if y.len() != self.dim() || sys.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: y.len().min(sys.dim()),
            });
        }
        for i in 0..STAGES {
            let (done, rest) = self.k.split_at_mut(i);
            let ki = &mut rest[0];
            if i == 0 {
                sys.rhs(t, y, ki);
                continue;
            }
            self.stage.copy_from_slice(y);
            for (kj, &a) in done.iter().zip(A[i]) {
                if a != 0.0 {
                    let ha = h * a;
                    for (s, d) in self.stage.iter_mut().zip(kj) {
                        *s += ha * d;
                    }
                }
            }
            sys.rhs(t + C[i] * h, &self.stage, ki);
        }
        for (kj, &b) in self.k.iter().zip(&B) {
            if b != 0.0 {
                let hb = h * b;
                for (v, d) in y.iter_mut().zip(kj) {
                    *v += hb * d;
                }
            }
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t });
        }
        Ok(())
    }
}

/// One step from `(t, y)`; returns `y(t + h)`.
pub fn rk8_step<S: OdeSystem + ?Sized>(sys: &mut S, t: f64, y: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(crate::error::invalid("h", "step must be positive"));
    }
    let mut out = y.to_vec();
    Rk8::new(y.len()).step(sys, t, &mut out, h)?;
    Ok(out)
}

/// Number of steps of size `h` needed to cover `span`; a remainder below
/// `1e-9·h` is absorbed as rounding.
pub fn step_count(span: f64, h: f64) -> usize {
    let ratio = span / h;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

/// Integrates from `t0` to `t_max` with fixed steps `h`, calling `observer`
/// after every step. The last step is shortened so the final time is
/// exactly `t_max`.
pub fn integrate<S, O>(
    sys: &mut S,
    t0: f64,
    y0: &[f64],
    t_max: f64,
    h: f64,
    mut observer: O,
) -> Result<Vec<f64>>
where
    S: OdeSystem + ?Sized,
    O: FnMut(f64, &[f64]) -> Result<()>,
{
    if !(h > 0.0) || !(t_max > t0) {
        return Err(crate::error::invalid("h", "need h > 0 and t_max > t0"));
    }
    let n = step_count(t_max - t0, h);
    let mut rk = Rk8::new(y0.len());
    let mut y = y0.to_vec();
    let mut t = t0;
    for i in 1..=n {
        let t_next = if i == n { t_max } else { t0 + i as f64 * h };
        rk.step(sys, t, &mut y, t_next - t)?;
        t = t_next;
        observer(t, &y)?;
    }
    Ok(y)
}
