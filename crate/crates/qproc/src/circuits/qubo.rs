//! QUBO problems in spin convention plus fixed-point encoders for linear
//! systems and ODE boundary-value problems.
//!
//! A [`QuboProblem`] stores the objective
//!
//! ```text
//! f(z) = sum_{i<j} s_ij z_i z_j + sum_i s_ii z_i + offset,   z_i in {+1,-1}
//! ```
//!
//! The `offset` carries the constants produced by encoders so that
//! [`QuboProblem::value_bits`] reproduces the original quadratic functional
//! *exactly* at the decoded point — the invariant the encoder tests enumerate.
//! Spin and bit pictures are linked by `z = 1 - 2q`, and bit `u` of a basis
//! index is `q_u` (so basis states of the sampler map directly to
//! assignments).

use super::CircuitsError;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Exhaustive-enumeration guard for [`QuboProblem::enumerate_optima`].
pub const MAX_ENUMERATION_VARS: usize = 24;

/// Fixed-point map from bit assignments back to real variables:
/// `x_i = center_i + scale * (-q_{i,0} + sum_{j=1}^{k-1} 2^{-j} q_{i,j})`,
/// a two's-complement-style window covering `center + scale*[-1, 1)` with
/// resolution `scale * 2^{1-k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryEncoding {
    pub n_vars: usize,
    /// Bits per variable.
    pub k: u32,
    pub centers: Vec<f64>,
    pub scale: f64,
}

impl BinaryEncoding {
    fn bit_weight(b: u32) -> f64 {
        if b == 0 {
            -1.0
        } else {
            (2.0f64).powi(-(b as i32))
        }
    }

    pub fn n_bits(&self) -> usize {
        self.n_vars * self.k as usize
    }

    /// Smallest representable step, `scale * 2^{1-k}`.
    pub fn resolution(&self) -> f64 {
        self.scale * (2.0f64).powi(1 - self.k as i32)
    }

    /// Decodes a bit assignment (length `n_vars * k`, variable-major) into
    /// the real vector it represents.
    pub fn decode(&self, bits: &[u8]) -> Result<Vec<f64>, CircuitsError> {
        if bits.len() != self.n_bits() {
            return Err(CircuitsError::Param(format!(
                "expected {} bits, got {}",
                self.n_bits(),
                bits.len()
            )));
        }
        Ok((0..self.n_vars)
            .map(|i| {
                let mut w = 0.0;
                for b in 0..self.k {
                    if bits[i * self.k as usize + b as usize] != 0 {
                        w += Self::bit_weight(b);
                    }
                }
                self.centers[i] + self.scale * w
            })
            .collect())
    }

    /// Decodes a basis index (bit `u` of the index is `q_u`).
    pub fn decode_index(&self, index: u64) -> Result<Vec<f64>, CircuitsError> {
        let bits: Vec<u8> = (0..self.n_bits()).map(|u| ((index >> u) & 1) as u8).collect();
        self.decode(&bits)
    }
}

/// A QUBO instance in spin convention; see the module docs for the exact
/// objective. Encoder-produced problems carry a [`BinaryEncoding`] decode
/// map.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    n: usize,
    /// Keys are `(i, j)` with `i <= j`; `i == j` entries are the linear terms.
    terms: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
    pub encoding: Option<BinaryEncoding>,
}

#[derive(Serialize, Deserialize)]
struct QuboJson {
    n: usize,
    terms: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "is_zero")]
    offset: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    encoding: Option<BinaryEncoding>,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl QuboProblem {
    pub fn new(n: usize) -> QuboProblem {
        QuboProblem {
            n,
            terms: BTreeMap::new(),
            offset: 0.0,
            encoding: None,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n
    }

    fn key(&self, i: usize, j: usize) -> Result<(usize, usize), CircuitsError> {
        if i >= self.n || j >= self.n {
            return Err(CircuitsError::Param(format!(
                "index ({i},{j}) out of range for {} variables",
                self.n
            )));
        }
        Ok((i.min(j), i.max(j)))
    }

    /// Sets coefficient `s_ij` (symmetric; `i == j` sets the linear term).
    pub fn set(&mut self, i: usize, j: usize, s: f64) -> Result<(), CircuitsError> {
        if !s.is_finite() {
            return Err(CircuitsError::Param(format!(
                "coefficient ({i},{j}) is not finite"
            )));
        }
        let key = self.key(i, j)?;
        if s == 0.0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, s);
        }
        Ok(())
    }

    /// Adds `delta` to coefficient `s_ij`.
    pub fn add(&mut self, i: usize, j: usize, delta: f64) -> Result<(), CircuitsError> {
        let key = self.key(i, j)?;
        let v = self.terms.entry(key).or_insert(0.0);
        *v += delta;
        if *v == 0.0 {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.key(i, j)
            .ok()
            .and_then(|k| self.terms.get(&k).copied())
            .unwrap_or(0.0)
    }

    /// Nonzero coefficients as `((i, j), s)` with `i <= j`, sorted.
    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    /// Objective at a spin assignment (`z_i` in `{+1, -1}`), offset included.
    pub fn value_spin(&self, z: &[i8]) -> Result<f64, CircuitsError> {
        if z.len() != self.n {
            return Err(CircuitsError::Param(format!(
                "expected {} spins, got {}",
                self.n,
                z.len()
            )));
        }
        let mut acc = self.offset;
        for (&(i, j), &s) in &self.terms {
            acc += if i == j {
                s * z[i] as f64
            } else {
                s * (z[i] as f64) * (z[j] as f64)
            };
        }
        Ok(acc)
    }

    /// Objective at a bit assignment via `z = 1 - 2q`.
    pub fn value_bits(&self, q: &[u8]) -> Result<f64, CircuitsError> {
        let z: Vec<i8> = q.iter().map(|&b| if b == 0 { 1 } else { -1 }).collect();
        self.value_spin(&z)
    }

    /// Objective at a basis index (bit `u` of the index is `q_u`).
    pub fn value_index(&self, index: u64) -> f64 {
        let z: Vec<i8> = (0..self.n)
            .map(|u| if (index >> u) & 1 == 0 { 1 } else { -1 })
            .collect();
        self.value_spin(&z).expect("length matches by construction")
    }

    /// Exhaustively enumerates all `2^n` assignments and returns the minimal
    /// objective value together with every basis index attaining it (ties
    /// within `1e-9 * (1 + |min|)`).
    pub fn enumerate_optima(&self) -> Result<(f64, Vec<u64>), CircuitsError> {
        if self.n > MAX_ENUMERATION_VARS {
            return Err(CircuitsError::TooManyVariables {
                n: self.n,
                max: MAX_ENUMERATION_VARS,
            });
        }
        let mut best = f64::INFINITY;
        let mut values = Vec::with_capacity(1usize << self.n);
        for idx in 0..(1u64 << self.n) {
            let v = self.value_index(idx);
            values.push(v);
            if v < best {
                best = v;
            }
        }
        let tol = 1e-9 * (1.0 + best.abs());
        let optima = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v <= best + tol)
            .map(|(i, _)| i as u64)
            .collect();
        Ok((best, optima))
    }

    /// Parses `{"n": int, "terms": [[i, j, s], ...], "offset"?: real,
    /// "encoding"?: {...}}`. Duplicate coefficient keys are rejected.
    pub fn from_json(text: &str) -> Result<QuboProblem, CircuitsError> {
        let parsed: QuboJson =
            serde_json::from_str(text).map_err(|e| CircuitsError::Json(e.to_string()))?;
        let mut q = QuboProblem::new(parsed.n);
        q.offset = parsed.offset;
        for (i, j, s) in parsed.terms {
            let key = q.key(i, j)?;
            if q.terms.contains_key(&key) {
                return Err(CircuitsError::Json(format!(
                    "duplicate coefficient for ({i},{j})"
                )));
            }
            if !s.is_finite() {
                return Err(CircuitsError::Json(format!(
                    "coefficient ({i},{j}) is not finite"
                )));
            }
            q.terms.insert(key, s);
        }
        if let Some(enc) = &parsed.encoding {
            if enc.n_bits() != parsed.n || enc.centers.len() != enc.n_vars {
                return Err(CircuitsError::Json(
                    "encoding shape does not match variable count".into(),
                ));
            }
        }
        q.encoding = parsed.encoding;
        Ok(q)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&QuboJson {
            n: self.n,
            terms: self.terms().map(|((i, j), s)| (i, j, s)).collect(),
            offset: self.offset,
            encoding: self.encoding.clone(),
        })
        .expect("QUBO serializes")
    }
}

/// Expands the quadratic functional `x^T Q x + c^T x + c0` (with `x` given by
/// `enc`) into a spin QUBO over `enc.n_bits()` binary variables. Exact
/// algebraic identity: `result.value_bits(q) == F(enc.decode(q))`.
fn quadratic_to_qubo(
    q_mat: &DMatrix<f64>,
    c: &[f64],
    c0: f64,
    enc: BinaryEncoding,
) -> Result<QuboProblem, CircuitsError> {
    let n = enc.n_vars;
    let k = enc.k as usize;
    debug_assert_eq!(q_mat.nrows(), n);
    debug_assert_eq!(c.len(), n);
    let n_bits = enc.n_bits();

    // Shift by the window: x = t + s*w with t = centers, s = scale.
    let t = DMatrix::from_column_slice(n, 1, &enc.centers);
    let qt = q_mat * &t;
    let c0p = (t.transpose() * &qt)[(0, 0)] + c.iter().zip(t.iter()).map(|(a, b)| a * b).sum::<f64>() + c0;
    let cp: Vec<f64> = (0..n)
        .map(|i| enc.scale * (2.0 * qt[(i, 0)] + c[i]))
        .collect();
    let s2 = enc.scale * enc.scale;

    // Binary quadratic over bits u = (i, b): upper triangle + linear + const.
    let weight = BinaryEncoding::bit_weight;
    let mut lin = vec![0.0f64; n_bits];
    let mut quad: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for i in 0..n {
        for b in 0..k {
            let u = i * k + b;
            lin[u] += cp[i] * weight(b as u32);
            for j in 0..n {
                let qij = s2 * q_mat[(i, j)];
                if qij == 0.0 {
                    continue;
                }
                for bp in 0..k {
                    let v = j * k + bp;
                    let coeff = qij * weight(b as u32) * weight(bp as u32);
                    match u.cmp(&v) {
                        std::cmp::Ordering::Equal => lin[u] += coeff, // q_u^2 = q_u
                        std::cmp::Ordering::Less => {
                            *quad.entry((u, v)).or_insert(0.0) += coeff
                        }
                        std::cmp::Ordering::Greater => {
                            *quad.entry((v, u)).or_insert(0.0) += coeff
                        }
                    }
                }
            }
        }
    }

    // Spin conversion q = (1 - z)/2.
    let mut out = QuboProblem::new(n_bits);
    let mut offset = c0p;
    for (&(u, v), &r) in &quad {
        out.add(u, v, r / 4.0)?;
        out.add(u, u, -r / 4.0)?;
        out.add(v, v, -r / 4.0)?;
        offset += r / 4.0;
    }
    for (u, &r) in lin.iter().enumerate() {
        out.add(u, u, -r / 2.0)?;
        offset += r / 2.0;
    }
    out.offset = offset;
    out.encoding = Some(enc);
    Ok(out)
}

/// Encodes `min_x |A x - b|^2` (expanded as `x^T A^T A x - 2 x^T A^T b +
/// b^T b`) as a spin QUBO with `k` bits per variable, window `[-1, 1)`.
/// The decode map is attached to the result.
pub fn qubo_from_linear_system(
    a: &DMatrix<f64>,
    b: &[f64],
    k: u32,
) -> Result<QuboProblem, CircuitsError> {
    if !a.is_square() {
        return Err(CircuitsError::Param(format!(
            "matrix must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    if b.len() != n {
        return Err(CircuitsError::Param(format!(
            "right-hand side has {} entries, expected {n}",
            b.len()
        )));
    }
    if k < 2 {
        return Err(CircuitsError::Param("need at least 2 bits per variable".into()));
    }
    let bv = DMatrix::from_column_slice(n, 1, b);
    let q = a.transpose() * a;
    let c_vec = a.transpose() * &bv * -2.0;
    let c: Vec<f64> = c_vec.iter().copied().collect();
    let c0 = b.iter().map(|x| x * x).sum();
    quadratic_to_qubo(
        &q,
        &c,
        c0,
        BinaryEncoding {
            n_vars: n,
            k,
            centers: vec![0.0; n],
            scale: 1.0,
        },
    )
}

/// A second-order linear ODE boundary-value problem on the unit interval:
///
/// ```text
/// f2(x) y'' + f1(x) y' + f0(x) y + g(x) = 0,   y(0) = y0, y(1) = y1
/// ```
///
/// discretized by central differences on `n_t` uniform grid points. The
/// QUBO objective is the sum of squared equation residuals over the
/// `n_t - 2` interior points, with each unknown `y_i` carried by `k` bits.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeProblem {
    /// Coefficient samples on the full grid (length `n_t` each).
    pub f2: Vec<f64>,
    pub f1: Vec<f64>,
    pub f0: Vec<f64>,
    pub g: Vec<f64>,
    pub n_t: usize,
    pub y0: f64,
    pub y1: f64,
    pub k: u32,
}

impl OdeProblem {
    pub fn new(
        f2: Vec<f64>,
        f1: Vec<f64>,
        f0: Vec<f64>,
        g: Vec<f64>,
        n_t: usize,
        y0: f64,
        y1: f64,
        k: u32,
    ) -> Result<OdeProblem, CircuitsError> {
        if n_t < 4 {
            return Err(CircuitsError::Param("need at least 4 grid points".into()));
        }
        if k < 2 {
            return Err(CircuitsError::Param("need at least 2 bits per variable".into()));
        }
        for (name, v) in [("f2", &f2), ("f1", &f1), ("f0", &f0), ("g", &g)] {
            if v.len() != n_t {
                return Err(CircuitsError::Param(format!(
                    "{name} has {} samples, expected {n_t}",
                    v.len()
                )));
            }
        }
        if f2[1..n_t - 1].iter().any(|&v| v == 0.0) {
            return Err(CircuitsError::Param(
                "f2 vanishes on an interior grid point".into(),
            ));
        }
        Ok(OdeProblem {
            f2,
            f1,
            f0,
            g,
            n_t,
            y0,
            y1,
            k,
        })
    }

    /// Number of unknown interior values.
    pub fn n_unknowns(&self) -> usize {
        self.n_t - 2
    }

    /// Default encoding window: unknowns in `[-1, 1)`.
    pub fn qubo(&self) -> Result<QuboProblem, CircuitsError> {
        self.qubo_windowed(&vec![0.0; self.n_unknowns()], 1.0)
    }

    /// Encoding window `center_i + scale*[-1, 1)` per unknown.
    pub fn qubo_windowed(
        &self,
        centers: &[f64],
        scale: f64,
    ) -> Result<QuboProblem, CircuitsError> {
        let m = self.n_unknowns();
        if centers.len() != m {
            return Err(CircuitsError::Param(format!(
                "expected {m} window centers, got {}",
                centers.len()
            )));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(CircuitsError::Param(format!(
                "scale must be positive and finite, got {scale}"
            )));
        }
        let h = 1.0 / (self.n_t - 1) as f64;
        // Residual at interior grid point i (unknown index p = i-1):
        //   R_p = sum_j M[p][j] u_j + d_p
        let mut mat = DMatrix::<f64>::zeros(m, m);
        let mut d = vec![0.0f64; m];
        for p in 0..m {
            let i = p + 1;
            let a2 = self.f2[i] / (h * h);
            let a1 = self.f1[i] / (2.0 * h);
            mat[(p, p)] = -2.0 * a2 + self.f0[i];
            d[p] = self.g[i];
            // y_{i+1}
            if p + 1 < m {
                mat[(p, p + 1)] += a2 + a1;
            } else {
                d[p] += (a2 + a1) * self.y1;
            }
            // y_{i-1}
            if p >= 1 {
                mat[(p, p - 1)] += a2 - a1;
            } else {
                d[p] += (a2 - a1) * self.y0;
            }
        }
        // sum_p R_p^2 = u^T (M^T M) u + 2 d^T M u + d^T d
        let q = mat.transpose() * &mat;
        let dv = DMatrix::from_column_slice(m, 1, &d);
        let c_vec = mat.transpose() * &dv * 2.0;
        let c: Vec<f64> = c_vec.iter().copied().collect();
        let c0 = d.iter().map(|x| x * x).sum();
        quadratic_to_qubo(
            &q,
            &c,
            c0,
            BinaryEncoding {
                n_vars: m,
                k: self.k,
                centers: centers.to_vec(),
                scale,
            },
        )
    }

    /// Re-encodes the problem with windows centered on a previous solution
    /// and the scale halved — each step doubles the effective resolution.
    pub fn refine(&self, prev: &[f64], prev_scale: f64) -> Result<QuboProblem, CircuitsError> {
        self.qubo_windowed(prev, prev_scale / 2.0)
    }
}

/// Convenience wrapper: build the ODE problem and encode it in one call.
#[allow(clippy::too_many_arguments)]
pub fn qubo_from_ode(
    f2: Vec<f64>,
    f1: Vec<f64>,
    f0: Vec<f64>,
    g: Vec<f64>,
    n_t: usize,
    y0: f64,
    y1: f64,
    k: u32,
) -> Result<QuboProblem, CircuitsError> {
    OdeProblem::new(f2, f1, f0, g, n_t, y0, y1, k)?.qubo()
}
