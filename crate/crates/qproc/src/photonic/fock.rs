//! Sparse Fock-space states and linear-optical primitives.

use super::PhotonicError;
use num_complex::Complex64;
use rand::Rng;
use std::collections::BTreeMap;

/// Drop amplitudes with |amp|^2 below this after interference; keeps exact
/// cancellations (e.g. Hong-Ou-Mandel) from leaving numerical dust behind.
const PRUNE_NORM_SQR: f64 = 1e-30;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// A pure state of `n_modes` optical modes, stored as a sparse map from
/// photon-occupation vectors to complex amplitudes.
///
/// The `ceiling` caps the *total* photon number a basis vector may carry;
/// phase shifters and beamsplitters conserve photon number, so the cap is
/// enforced only at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    n_modes: usize,
    ceiling: u32,
    amps: BTreeMap<Vec<u32>, Complex64>,
}

impl FockState {
    /// The vacuum on `n_modes` modes.
    pub fn vacuum(n_modes: usize, ceiling: u32) -> Result<FockState, PhotonicError> {
        FockState::from_occupation(&vec![0; n_modes], ceiling)
    }

    /// A single Fock basis vector `|occ>` with amplitude 1.
    pub fn from_occupation(occ: &[u32], ceiling: u32) -> Result<FockState, PhotonicError> {
        if occ.is_empty() {
            return Err(PhotonicError::Param(
                "a Fock state needs at least one mode".into(),
            ));
        }
        let total: u32 = occ.iter().sum();
        if total > ceiling {
            return Err(PhotonicError::CeilingExceeded { total, ceiling });
        }
        let mut amps = BTreeMap::new();
        amps.insert(occ.to_vec(), Complex64::ONE);
        Ok(FockState {
            n_modes: occ.len(),
            ceiling,
            amps,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn ceiling(&self) -> u32 {
        self.ceiling
    }

    /// Amplitude of one occupation vector (0 if absent).
    pub fn amplitude(&self, occ: &[u32]) -> Complex64 {
        self.amps.get(occ).copied().unwrap_or(Complex64::ZERO)
    }

    /// Iterates over the stored (occupation, amplitude) pairs in
    /// lexicographic occupation order.
    pub fn iter(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.amps.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn norm(&self) -> f64 {
        self.amps
            .values()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn renormalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            for a in self.amps.values_mut() {
                *a *= inv;
            }
        }
    }

    /// Born-rule probabilities over occupation vectors.
    pub fn probabilities(&self) -> BTreeMap<Vec<u32>, f64> {
        self.amps
            .iter()
            .map(|(k, a)| (k.clone(), a.norm_sqr()))
            .collect()
    }

    fn check_mode(&self, mode: usize) -> Result<(), PhotonicError> {
        if mode >= self.n_modes {
            Err(PhotonicError::ModeOutOfRange {
                mode,
                n_modes: self.n_modes,
            })
        } else {
            Ok(())
        }
    }

    /// Phase shifter `exp(i theta n_mode)`: multiplies each basis amplitude
    /// by `e^{i theta n}` where `n` is the occupation of `mode`.
    pub fn apply_phase(&mut self, mode: usize, theta: f64) -> Result<(), PhotonicError> {
        self.check_mode(mode)?;
        for (occ, amp) in self.amps.iter_mut() {
            let n = occ[mode] as f64;
            *amp *= Complex64::from_polar(1.0, theta * n);
        }
        Ok(())
    }

    /// Beamsplitter `B(theta, phi)` on modes `(m1, m2)`, acting on creation
    /// operators as
    ///
    /// ```text
    /// a1† -> cos(theta) a1† + e^{i phi}  sin(theta) a2†
    /// a2† -> cos(theta) a2† − e^{−i phi} sin(theta) a1†
    /// ```
    ///
    /// applied exactly per fixed-photon block via binomial expansion (no
    /// matrix exponential, no truncation error). Photon number is conserved.
    pub fn apply_beamsplitter(
        &mut self,
        m1: usize,
        m2: usize,
        theta: f64,
        phi: f64,
    ) -> Result<(), PhotonicError> {
        self.check_mode(m1)?;
        self.check_mode(m2)?;
        if m1 == m2 {
            return Err(PhotonicError::Param(
                "beamsplitter needs two distinct modes".into(),
            ));
        }
        let alpha = Complex64::new(theta.cos(), 0.0);
        let beta = Complex64::from_polar(theta.sin(), phi);
        let gamma = alpha;
        let delta = -Complex64::from_polar(theta.sin(), -phi);

        let mut out: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (occ, amp) in &self.amps {
            let n1 = occ[m1];
            let n2 = occ[m2];
            if n1 == 0 && n2 == 0 {
                *out.entry(occ.clone()).or_insert(Complex64::ZERO) += amp;
                continue;
            }
            let norm_in = (factorial(n1) * factorial(n2)).sqrt();
            // (α a1† + β a2†)^{n1} (δ a1† + γ a2†)^{n2} |0,0>
            for i in 0..=n1 {
                let term1 = binomial(n1, i) * alpha.powu(i) * beta.powu(n1 - i);
                for j in 0..=n2 {
                    let term2 = binomial(n2, j) * delta.powu(j) * gamma.powu(n2 - j);
                    let p = i + j;
                    let q = (n1 - i) + (n2 - j);
                    let coeff = (factorial(p) * factorial(q)).sqrt() / norm_in;
                    let mut key = occ.clone();
                    key[m1] = p;
                    key[m2] = q;
                    *out.entry(key).or_insert(Complex64::ZERO) += amp * term1 * term2 * coeff;
                }
            }
        }
        out.retain(|_, a| a.norm_sqr() > PRUNE_NORM_SQR);
        self.amps = out;
        Ok(())
    }

    /// Projective photon-number detection on one mode. Samples `n` by the
    /// Born rule, collapses the state onto that sector, and reports `n`
    /// plus a possible dark count (with probability `dark_prob` the detector
    /// reports one extra photon; the state is unaffected by the report).
    pub fn detect<R: Rng>(
        &mut self,
        mode: usize,
        dark_prob: f64,
        rng: &mut R,
    ) -> Result<u32, PhotonicError> {
        self.check_mode(mode)?;
        if !(0.0..=1.0).contains(&dark_prob) {
            return Err(PhotonicError::Param(format!(
                "dark_prob must lie in [0,1], got {dark_prob}"
            )));
        }
        let mut probs: BTreeMap<u32, f64> = BTreeMap::new();
        for (occ, amp) in &self.amps {
            *probs.entry(occ[mode]).or_insert(0.0) += amp.norm_sqr();
        }
        let total: f64 = probs.values().sum();
        let u: f64 = rng.random::<f64>() * total;
        let mut cum = 0.0;
        let mut outcome = *probs.keys().next_back().expect("state is nonempty");
        for (&n, &p) in &probs {
            cum += p;
            if u < cum {
                outcome = n;
                break;
            }
        }
        self.amps.retain(|occ, _| occ[mode] == outcome);
        self.renormalize();
        let dark = if dark_prob > 0.0 && rng.random::<f64>() < dark_prob {
            1
        } else {
            0
        };
        Ok(outcome + dark)
    }

    /// Photon loss on one mode with loss probability `r`: beamsplits the mode
    /// into a virtual environment mode with `sin^2(theta) = r` and
    /// immediately detects the environment (stochastic collapse). Returns the
    /// number of photons lost. Each photon is lost independently with
    /// probability `r`.
    pub fn apply_loss<R: Rng>(
        &mut self,
        mode: usize,
        r: f64,
        rng: &mut R,
    ) -> Result<u32, PhotonicError> {
        self.check_mode(mode)?;
        if !(0.0..=1.0).contains(&r) {
            return Err(PhotonicError::Param(format!(
                "loss probability must lie in [0,1], got {r}"
            )));
        }
        if r == 0.0 {
            return Ok(0);
        }
        // Append a virtual mode in the vacuum.
        let mut extended = FockState {
            n_modes: self.n_modes + 1,
            ceiling: self.ceiling,
            amps: self
                .amps
                .iter()
                .map(|(occ, &amp)| {
                    let mut key = occ.clone();
                    key.push(0);
                    (key, amp)
                })
                .collect(),
        };
        let theta = r.sqrt().asin();
        extended.apply_beamsplitter(mode, self.n_modes, theta, 0.0)?;
        let lost = extended.detect(self.n_modes, 0.0, rng)?;
        self.amps = extended
            .amps
            .into_iter()
            .map(|(mut occ, amp)| {
                occ.pop();
                (occ, amp)
            })
            .collect();
        Ok(lost)
    }
}
