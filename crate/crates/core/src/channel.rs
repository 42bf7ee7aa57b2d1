//! Flat fast fading channel: per-symbol i.i.d. fading coefficient plus
//! additive Gaussian noise, observed with perfect CSI. Also evaluates the
//! fading-modulus PDFs that back the quadrature oracles.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use statrs::function::gamma::ln_gamma;

use crate::codec::Flavor;
use crate::error::{Error, Result};
use crate::numeric::ln_bessel_i0;

/// Fading family with its distribution parameters. AWGN is the degenerate
/// unit-gain channel (h = 1 identically).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FadingFamily {
    Awgn,
    Rayleigh { omega: f64 },
    Nakagami { omega: f64, m: f64 },
    Rician { omega: f64, kfactor: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FadingModel {
    pub family: FadingFamily,
    pub flavor: Flavor,
}

impl FadingModel {
    pub fn awgn(flavor: Flavor) -> Self {
        FadingModel {
            family: FadingFamily::Awgn,
            flavor,
        }
    }

    pub fn rayleigh(omega: f64, flavor: Flavor) -> Result<Self> {
        check_omega(omega)?;
        Ok(FadingModel {
            family: FadingFamily::Rayleigh { omega },
            flavor,
        })
    }

    pub fn nakagami(omega: f64, m: f64, flavor: Flavor) -> Result<Self> {
        check_omega(omega)?;
        if !m.is_finite() || m < 0.5 {
            return Err(Error::InvalidModel(format!("Nakagami m = {m} must be >= 0.5")));
        }
        Ok(FadingModel {
            family: FadingFamily::Nakagami { omega, m },
            flavor,
        })
    }

    pub fn rician(omega: f64, kfactor: f64, flavor: Flavor) -> Result<Self> {
        check_omega(omega)?;
        if !kfactor.is_finite() || kfactor < 0.0 {
            return Err(Error::InvalidModel(format!("Rician K = {kfactor} must be >= 0")));
        }
        Ok(FadingModel {
            family: FadingFamily::Rician { omega, kfactor },
            flavor,
        })
    }

    /// Mean-square fading power E[H^2]; 1 for AWGN (h = 1 identically).
    pub fn omega(&self) -> f64 {
        match self.family {
            FadingFamily::Awgn => 1.0,
            FadingFamily::Rayleigh { omega }
            | FadingFamily::Nakagami { omega, .. }
            | FadingFamily::Rician { omega, .. } => omega,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            FadingFamily::Awgn => "awgn",
            FadingFamily::Rayleigh { .. } => "rayleigh",
            FadingFamily::Nakagami { .. } => "nakagami",
            FadingFamily::Rician { .. } => "rician",
        }
    }

    pub fn m(&self) -> Option<f64> {
        match self.family {
            FadingFamily::Nakagami { m, .. } => Some(m),
            _ => None,
        }
    }

    pub fn kfactor(&self) -> Option<f64> {
        match self.family {
            FadingFamily::Rician { kfactor, .. } => Some(kfactor),
            _ => None,
        }
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(Error::InvalidModel(format!("omega = {omega} must be > 0")));
    }
    Ok(())
}

/// Noise variance sigma^2 per complex symbol (per real symbol in the real
/// flavor).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    sigma2: f64,
}

impl NoiseSpec {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !sigma2.is_finite() || sigma2 <= 0.0 {
            return Err(Error::InvalidModel(format!("sigma^2 = {sigma2} must be > 0")));
        }
        Ok(NoiseSpec { sigma2 })
    }

    /// SNR convention: SNR = omega * E[|f(x)|^2] / sigma^2 = omega / sigma^2
    /// with the unit-energy constellation.
    pub fn from_snr_db(snr_db: f64, omega: f64) -> Result<Self> {
        NoiseSpec::new(omega / 10f64.powf(snr_db / 10.0))
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
}

/// One received symbol with its (perfectly known) fading coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelObservation {
    pub y: Complex64,
    pub h: Complex64,
}

/// Draws one fading coefficient.
///
/// Complex flavor: modulus per the family law, phase uniform on [0, 2pi).
/// Real flavor: modulus per the family law with a uniform +-1 sign, so
/// E[H^2] = omega and the bound's dependence on |H| is unchanged.
pub fn sample_fading<R: Rng + ?Sized>(model: &FadingModel, rng: &mut R) -> Complex64 {
    let modulus = match model.family {
        FadingFamily::Awgn => return Complex64::new(1.0, 0.0),
        FadingFamily::Rayleigh { omega } => {
            // Modulus of CN(0, omega): each part N(0, omega/2).
            let s = (omega / 2.0).sqrt();
            let re: f64 = s * rng.sample::<f64, _>(StandardNormal);
            let im: f64 = s * rng.sample::<f64, _>(StandardNormal);
            (re * re + im * im).sqrt()
        }
        FadingFamily::Nakagami { omega, m } => {
            // R^2 ~ Gamma(shape m, scale omega/m) gives E[R^2] = omega.
            Gamma::new(m, omega / m)
                .expect("validated shape/scale")
                .sample::<R>(rng)
                .sqrt()
        }
        FadingFamily::Rician { omega, kfactor } => {
            // LOS mean sqrt(K omega / (K+1)) plus scattered CN(0, omega/(K+1)).
            let los = (kfactor * omega / (kfactor + 1.0)).sqrt();
            let s = (omega / (2.0 * (kfactor + 1.0))).sqrt();
            let re: f64 = los + s * rng.sample::<f64, _>(StandardNormal);
            let im: f64 = s * rng.sample::<f64, _>(StandardNormal);
            (re * re + im * im).sqrt()
        }
    };
    match model.flavor {
        Flavor::Complex => {
            let phase = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            Complex64::from_polar(modulus, phase)
        }
        Flavor::Real => {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            Complex64::new(sign * modulus, 0.0)
        }
    }
}

/// y = h * x + n for each point, with independent per-symbol draws. Complex
/// noise splits sigma^2/2 into each of the real and imaginary parts; real
/// noise is N(0, sigma^2) on the real axis.
pub fn transmit<R: Rng + ?Sized>(
    points: &[Complex64],
    model: &FadingModel,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Vec<ChannelObservation> {
    let sigma2 = noise.sigma2();
    points
        .iter()
        .map(|&x| {
            let h = sample_fading(model, rng);
            let n = match model.flavor {
                Flavor::Complex => {
                    let s = (sigma2 / 2.0).sqrt();
                    Complex64::new(
                        s * rng.sample::<f64, _>(StandardNormal),
                        s * rng.sample::<f64, _>(StandardNormal),
                    )
                }
                Flavor::Real => Complex64::new(sigma2.sqrt() * rng.sample::<f64, _>(StandardNormal), 0.0),
            };
            ChannelObservation { y: h * x + n, h }
        })
        .collect()
}

/// Exact modulus PDF f_R(r) for the fading family. Errors for AWGN, which
/// has no modulus distribution.
pub fn fading_modulus_pdf(model: &FadingModel, r: f64) -> Result<f64> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Domain(format!("r = {r} must be >= 0")));
    }
    match model.family {
        FadingFamily::Awgn => Err(Error::NoModulusPdf),
        FadingFamily::Rayleigh { omega } => Ok(2.0 * r / omega * (-r * r / omega).exp()),
        FadingFamily::Nakagami { omega, m } => {
            if r == 0.0 {
                // r^(2m-1) with 2m-1 = 0 at m = 1/2; zero for m > 1/2.
                return Ok(if m == 0.5 {
                    2.0 * m.powf(m) / (ln_gamma(m).exp() * omega.powf(m))
                } else {
                    0.0
                });
            }
            let ln_pdf = (2.0f64).ln() + m * m.ln() + (2.0 * m - 1.0) * r.ln()
                - ln_gamma(m)
                - m * omega.ln()
                - m * r * r / omega;
            Ok(ln_pdf.exp())
        }
        FadingFamily::Rician { omega, kfactor } => {
            if r == 0.0 {
                return Ok(0.0);
            }
            let k1 = kfactor + 1.0;
            let ln_pdf = (2.0 * k1 * r / omega).ln() - kfactor - k1 * r * r / omega
                + ln_bessel_i0(2.0 * (kfactor * k1 / omega).sqrt() * r);
            Ok(ln_pdf.exp())
        }
    }
}
