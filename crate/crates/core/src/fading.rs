//! Time-correlated Rayleigh fading from a sum of sinusoids (Jakes model).
//!
//! Each link carries `N` oscillators with random arrival angle `α_n` and
//! phase `φ_n`:
//!
//! ```text
//! h(t) = (1/√N) Σ_n exp(j(2π·f_D·T_s·t·cos α_n + φ_n))
//! ```
//!
//! With uniform angles the autocorrelation is `J₀(2π f_D T_s τ)` and
//! `E|h|² = 1`. The amplitude `|h|` is the small-scale attenuation `A_SSF`.

use std::f64::consts::PI;

use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Oscillator {
    doppler_cos: f64,
    phase: f64,
}

/// Complex envelope sample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Envelope {
    pub re: f64,
    pub im: f64,
}

impl Envelope {
    pub fn amplitude(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn power(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// Fading processes of every transmitter→receiver link in one repetition.
#[derive(Debug, Clone)]
pub struct FadingState {
    links: usize,
    oscillators: Vec<Oscillator>,
    per_link: usize,
    doppler: f64,
    stage: u64,
}

impl FadingState {
    /// `pairs × pairs` independent links with `per_link` oscillators each.
    pub fn new<R: Rng + ?Sized>(pairs: usize, per_link: usize, doppler: f64, rng: &mut R) -> Self {
        let links = pairs * pairs;
        let oscillators = (0..links * per_link)
            .map(|_| Oscillator {
                doppler_cos: (2.0 * PI * rng.random::<f64>()).cos(),
                phase: 2.0 * PI * rng.random::<f64>(),
            })
            .collect();
        FadingState {
            links,
            oscillators,
            per_link,
            doppler,
            stage: 0,
        }
    }

    pub fn stage(&self) -> u64 {
        self.stage
    }

    pub fn doppler(&self) -> f64 {
        self.doppler
    }

    /// Envelope of link `link` at the current stage.
    pub fn envelope(&self, link: usize) -> Envelope {
        let norm = (self.per_link as f64).sqrt().recip();
        let omega = 2.0 * PI * self.doppler * self.stage as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for osc in &self.oscillators[link * self.per_link..(link + 1) * self.per_link] {
            let (s, c) = (omega * osc.doppler_cos + osc.phase).sin_cos();
            re += c;
            im += s;
        }
        Envelope {
            re: re * norm,
            im: im * norm,
        }
    }

    /// Advances one stage and returns the amplitude of every link, row-major
    /// as `[tx][rx]`.
    pub fn advance(&mut self) -> Vec<f64> {
        self.stage += 1;
        (0..self.links).map(|l| self.envelope(l).amplitude()).collect()
    }
}
