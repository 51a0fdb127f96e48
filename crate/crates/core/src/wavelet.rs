//! Periodic orthonormal discrete wavelet transform (pyramid algorithm).
//!
//! Coefficients are stored with the `L^∞` normalization
//! `c_{j,k} = 2^j ∫ ψ(2^j t - k) f(t) dt`, so that `|c_{j,k}| ~ 2^{-hj}` near a
//! point of regularity `h`. The signal is read as samples `f(n 2^-J)` of a
//! 1-periodic function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest accepted signal length.
pub const MIN_SIGNAL_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterBank {
    pub name: String,
    pub lowpass: Vec<f64>,
    pub highpass: Vec<f64>,
    pub vanishing_moments: usize,
    /// Uniform Hölder regularity of the mother wavelet.
    pub regularity_estimate: f64,
}

impl FilterBank {
    /// Orthonormal Daubechies filter with `order` vanishing moments (2..=10).
    pub fn daubechies(order: usize) -> Result<Self> {
        let lowpass: &[f64] = match order {
            2 => &DB2,
            3 => &DB3,
            4 => &DB4,
            5 => &DB5,
            6 => &DB6,
            7 => &DB7,
            8 => &DB8,
            9 => &DB9,
            10 => &DB10,
            _ => {
                return Err(Error::domain(format!(
                    "Daubechies order {order} not in 2..=10"
                )))
            }
        };
        let lowpass = lowpass.to_vec();
        let l = lowpass.len();
        let highpass = (0..l)
            .map(|n| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                sign * lowpass[l - 1 - n]
            })
            .collect();
        Ok(FilterBank {
            name: format!("db{order}"),
            lowpass,
            highpass,
            vanishing_moments: order,
            regularity_estimate: DAUBECHIES_HOLDER[order - 2],
        })
    }

    /// Parses names of the form `db<order>`.
    pub fn from_name(name: &str) -> Result<Self> {
        let order = name
            .strip_prefix("db")
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| Error::domain(format!("unknown filter bank `{name}`")))?;
        Self::daubechies(order)
    }

    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }

    /// Whether the wavelet is smoother than `max(|alpha|, |h_max|)`, the
    /// condition under which finite-regularity wavelets recover the exponents
    /// of lacunary wavelet series.
    pub fn is_regular_enough(&self, alpha: f64, h_max: f64) -> bool {
        self.regularity_estimate > alpha.abs().max(h_max.abs())
    }

    // Circular shift that centres coefficient k on the dyadic interval λ(j, k).
    fn centring_shift(&self) -> i64 {
        (self.len() / 2) as i64 - 1
    }
}

impl Default for FilterBank {
    fn default() -> Self {
        FilterBank::daubechies(8).expect("db8 is tabulated")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `c_{j,k} = 2^j ∫ ψ(2^j t - k) f(t) dt`.
    #[default]
    LInfinity,
    /// `d_{j,k} = 2^{j/2} ∫ ψ(2^j t - k) f(t) dt`.
    L2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    /// Number of detail scales `J`; scales run over `0..J`, the signal has `2^J` samples.
    pub depth: u32,
    /// Scaling coefficient(s) at scale 0.
    pub approx: Vec<f64>,
    /// `detail[j]` holds the `2^j` coefficients of scale `j`.
    pub detail: Vec<Vec<f64>>,
    pub normalization: Normalization,
}

impl CoefficientField {
    /// All-zero field of the given depth.
    pub fn zeros(depth: u32) -> Result<Self> {
        if depth == 0 || depth > 30 {
            return Err(Error::domain(format!("depth {depth} not in 1..=30")));
        }
        Ok(CoefficientField {
            depth,
            approx: vec![0.0],
            detail: (0..depth).map(|j| vec![0.0; 1usize << j]).collect(),
            normalization: Normalization::LInfinity,
        })
    }

    /// Builds a field from per-scale detail blocks; `detail[j]` must have `2^j` entries.
    pub fn from_detail(approx: f64, detail: Vec<Vec<f64>>) -> Result<Self> {
        let field = CoefficientField {
            depth: detail.len() as u32,
            approx: vec![approx],
            detail,
            normalization: Normalization::LInfinity,
        };
        field.validate()?;
        Ok(field)
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 || self.detail.len() != self.depth as usize {
            return Err(Error::domain(format!(
                "field depth {} does not match {} detail scales",
                self.depth,
                self.detail.len()
            )));
        }
        if self.approx.len() != 1 {
            return Err(Error::domain(
                "field must carry exactly one scaling coefficient",
            ));
        }
        for (j, row) in self.detail.iter().enumerate() {
            if row.len() != 1usize << j {
                return Err(Error::domain(format!(
                    "scale {j} has {} coefficients, expected {}",
                    row.len(),
                    1usize << j
                )));
            }
            if row.iter().any(|c| !c.is_finite()) {
                return Err(Error::domain(format!(
                    "non-finite coefficient at scale {j}"
                )));
            }
        }
        if !self.approx[0].is_finite() {
            return Err(Error::domain("non-finite scaling coefficient"));
        }
        Ok(())
    }

    /// Finest available scale.
    pub fn finest_scale(&self) -> u32 {
        self.depth - 1
    }

    pub fn signal_len(&self) -> usize {
        1usize << self.depth
    }

    pub fn scale(&self, j: u32) -> &[f64] {
        &self.detail[j as usize]
    }

    /// Number of nonzero coefficients at each scale.
    pub fn nonzero_counts(&self) -> Vec<usize> {
        self.detail
            .iter()
            .map(|row| row.iter().filter(|c| **c != 0.0).count())
            .collect()
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.approx.iter_mut().for_each(|c| *c *= factor);
        out.detail
            .iter_mut()
            .flat_map(|row| row.iter_mut())
            .for_each(|c| *c *= factor);
        out
    }

    /// Same coefficients expressed in another normalization.
    pub fn with_normalization(&self, target: Normalization) -> Self {
        if target == self.normalization {
            return self.clone();
        }
        let mut out = self.clone();
        for (j, row) in out.detail.iter_mut().enumerate() {
            let factor = match target {
                Normalization::L2 => (-(j as f64) / 2.0).exp2(),
                Normalization::LInfinity => (j as f64 / 2.0).exp2(),
            };
            row.iter_mut().for_each(|c| *c *= factor);
        }
        out.normalization = target;
        out
    }
}

fn periodic(i: i64, m: usize) -> usize {
    i.rem_euclid(m as i64) as usize
}

fn analysis_step(bank: &FilterBank, a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = a.len();
    let half = m / 2;
    let shift = bank.centring_shift();
    let mut lo = vec![0.0; half];
    let mut hi = vec![0.0; half];
    for k in 0..half {
        let base = 2 * k as i64 - shift;
        let (mut sl, mut sh) = (0.0, 0.0);
        for (n, (h, g)) in bank.lowpass.iter().zip(&bank.highpass).enumerate() {
            let x = a[periodic(base + n as i64, m)];
            sl += h * x;
            sh += g * x;
        }
        lo[k] = sl;
        hi[k] = sh;
    }
    (lo, hi)
}

fn synthesis_step(bank: &FilterBank, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let m = 2 * lo.len();
    let shift = bank.centring_shift();
    let mut out = vec![0.0; m];
    for k in 0..lo.len() {
        let base = 2 * k as i64 - shift;
        for (n, (h, g)) in bank.lowpass.iter().zip(&bank.highpass).enumerate() {
            out[periodic(base + n as i64, m)] += h * lo[k] + g * hi[k];
        }
    }
    out
}

/// Full pyramid decomposition of a periodic signal of length `2^J`.
pub fn analyze(signal: &[f64], bank: &FilterBank) -> Result<CoefficientField> {
    let n = signal.len();
    if n < MIN_SIGNAL_LEN || !n.is_power_of_two() {
        return Err(Error::domain(format!(
            "signal length {n} is not a power of two >= {MIN_SIGNAL_LEN}"
        )));
    }
    if let Some(i) = signal.iter().position(|x| !x.is_finite()) {
        return Err(Error::domain(format!("non-finite sample at index {i}")));
    }
    let depth = n.trailing_zeros();
    let norm = (-(depth as f64) / 2.0).exp2();
    let mut approx: Vec<f64> = signal.iter().map(|x| x * norm).collect();
    let mut detail = vec![Vec::new(); depth as usize];
    for j in (0..depth).rev() {
        let (lo, hi) = analysis_step(bank, &approx);
        let factor = (j as f64 / 2.0).exp2();
        detail[j as usize] = hi.into_iter().map(|d| d * factor).collect();
        approx = lo;
    }
    Ok(CoefficientField {
        depth,
        approx,
        detail,
        normalization: Normalization::LInfinity,
    })
}

/// Inverse of [`analyze`].
pub fn synthesize(field: &CoefficientField, bank: &FilterBank) -> Result<Vec<f64>> {
    field.validate()?;
    let field = field.with_normalization(Normalization::L2);
    let mut approx = field.approx.clone();
    for row in &field.detail {
        approx = synthesis_step(bank, &approx, row);
    }
    let norm = (field.depth as f64 / 2.0).exp2();
    approx.iter_mut().for_each(|x| *x *= norm);
    Ok(approx)
}

/// Hölder regularity of the Daubechies wavelets of orders 2..=10.
const DAUBECHIES_HOLDER: [f64; 9] = [
    0.550, 1.088, 1.618, 1.969, 2.189, 2.460, 2.761, 3.074, 3.361,
];

#[allow(clippy::excessive_precision)]
const DB2: [f64; 4] = [
    0.48296291314453414337,
    0.83651630373780790558,
    0.22414386804201338103,
    -0.12940952255126038117,
];
#[allow(clippy::excessive_precision)]
const DB3: [f64; 6] = [
    0.33267055295008261600,
    0.80689150931109257649,
    0.45987750211849157010,
    -0.13501102001025458870,
    -0.085441273882026661693,
    0.035226291885709536603,
];
#[allow(clippy::excessive_precision)]
const DB4: [f64; 8] = [
    0.23037781330889650086,
    0.71484657055291564709,
    0.63088076792985890788,
    -0.027983769416859854211,
    -0.18703481171909308408,
    0.030841381835560763627,
    0.032883011666885199735,
    -0.010597401785069032105,
];
#[allow(clippy::excessive_precision)]
const DB5: [f64; 10] = [
    0.16010239797419291448,
    0.60382926979718967054,
    0.72430852843777292773,
    0.13842814590132073151,
    -0.24229488706638203186,
    -0.032244869584638374648,
    0.077571493840045713523,
    -0.0062414902127982742742,
    -0.012580751999081999469,
    0.0033357252854737712780,
];
#[allow(clippy::excessive_precision)]
const DB6: [f64; 12] = [
    0.11154074335010946362,
    0.49462389039845308568,
    0.75113390802109535068,
    0.31525035170919762909,
    -0.22626469396543982008,
    -0.12976686756726193556,
    0.097501605587323049102,
    0.027522865530305728626,
    -0.031582039317486029565,
    0.00055384220116149613925,
    0.0047772575109455106396,
    -0.0010773010853084795649,
];
#[allow(clippy::excessive_precision)]
const DB7: [f64; 14] = [
    0.077852054085009179020,
    0.39653931948191730654,
    0.72913209084623511992,
    0.46978228740519312247,
    -0.14390600392856497541,
    -0.22403618499387498264,
    0.071309219266830264751,
    0.080612609151083071913,
    -0.038029936935014413580,
    -0.016574541630666880654,
    0.012550998556099840613,
    0.00042957797292136652113,
    -0.0018016407040474909153,
    0.00035371379997452024845,
];
#[allow(clippy::excessive_precision)]
const DB8: [f64; 16] = [
    0.054415842243104009955,
    0.31287159091429997066,
    0.67563073629728980681,
    0.58535468365420671277,
    -0.015829105256349305667,
    -0.28401554296154692652,
    0.00047248457391328277036,
    0.12874742662047845886,
    -0.017369301001807546170,
    -0.044088253930794751507,
    0.013981027917398281649,
    0.0087460940474057767164,
    -0.0048703529934515743104,
    -0.00039174037337694704630,
    0.00067544940645056936637,
    -0.00011747678412476953373,
];
#[allow(clippy::excessive_precision)]
const DB9: [f64; 18] = [
    0.038077947363878346589,
    0.24383467461259035373,
    0.60482312369011111190,
    0.65728807805130053808,
    0.13319738582500757619,
    -0.29327378327917490881,
    -0.096840783222976460514,
    0.14854074933810638014,
    0.030725681479333379212,
    -0.067632829061329973676,
    0.00025094711483145195759,
    0.022361662123679097205,
    -0.0047232047577513972779,
    -0.0042815036824634298345,
    0.0018476468830562264766,
    0.00023038576352319596721,
    -0.00025196318894271013697,
    0.000039347320316271599481,
];
#[allow(clippy::excessive_precision)]
const DB10: [f64; 20] = [
    0.026670057900555553587,
    0.18817680007769148902,
    0.52720118893172558648,
    0.68845903945360356574,
    0.28117234366057746075,
    -0.24984642432731537942,
    -0.19594627437737704350,
    0.12736934033579326008,
    0.093057364603572351160,
    -0.071394147166397087145,
    -0.029457536821875812858,
    0.033212674059341001740,
    0.0036065535669561696554,
    -0.010733175483330575044,
    0.0013953517470529011658,
    0.0019924052951850561172,
    -0.00068585669495971162656,
    -0.00011646685512928545095,
    0.000093588670320069591334,
    -0.000013264202894521244812,
];
