//! Recurrent cells (SimpleRNN, LSTM, GRU), bidirectional wrappers, and the
//! stacked sequence model with full backpropagation through time.
//!
//! Conventions shared by all cells:
//! - Activations are row vectors; a batch at one timestep is `(batch, features)`.
//! - A step computes `x·W + h_prev·U + b` with `W: (in, units)` and
//!   `U: (units, units)`; gated cells fuse their gates into single wide
//!   matrices (documented per cell) so a step is two GEMMs.
//! - Gate activations are always sigmoid; the configurable activation `g`
//!   applies to the cell's candidate/output path only (SimpleRNN output,
//!   LSTM candidate and cell-output transform, GRU candidate).
//! - The GRU update follows the convention `h = z ⊙ h_prev + (1−z) ⊙ h̃`
//!   (the update gate multiplies the *previous* state).
//! - Hidden (and LSTM cell) states start at zero for every window.

use crate::activation::{sigmoid, Activation};
use crate::dense::{DenseCache, DenseLayer};
use crate::dropout::{dropout_apply, dropout_backward};
use crate::error::NnError;
use crate::param::{Param, ParamVisitor};
use ndarray::{s, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------------------
// SimpleRNN
// ---------------------------------------------------------------------------

/// `h_t = g(x_t·W + h_{t−1}·U + b)`.
#[derive(Debug, Clone)]
pub struct SimpleRnnCell {
    pub w: Param,
    pub u: Param,
    pub b: Param,
    pub g: Activation,
}

#[derive(Debug, Clone)]
pub struct SimpleRnnCache {
    xs: Vec<Array2<f64>>,
    /// Pre-activations per step.
    zs: Vec<Array2<f64>>,
    /// Hidden states h_0 .. h_{L-1} where h_0 is the zero initial state.
    hs: Vec<Array2<f64>>,
}

impl SimpleRnnCell {
    pub fn new(prefix: &str, in_dim: usize, units: usize, g: Activation, rng: &mut impl Rng) -> Self {
        Self {
            w: Param::uniform(format!("{prefix}.w"), in_dim, units, in_dim, rng),
            u: Param::uniform(format!("{prefix}.u"), units, units, units, rng),
            b: Param::zeros(format!("{prefix}.b"), 1, units),
            g,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.w.value.nrows()
    }

    pub fn units(&self) -> usize {
        self.w.value.ncols()
    }

    pub fn seq_forward(
        &self,
        xs: &[Array2<f64>],
    ) -> Result<(Vec<Array2<f64>>, SimpleRnnCache), NnError> {
        let batch = xs[0].nrows();
        let mut h = Array2::zeros((batch, self.units()));
        let mut cache = SimpleRnnCache {
            xs: xs.to_vec(),
            zs: Vec::with_capacity(xs.len()),
            hs: vec![h.clone()],
        };
        let mut outputs = Vec::with_capacity(xs.len());
        for x in xs {
            let mut z = x.dot(&self.w.value);
            z += &h.dot(&self.u.value);
            z += &self.b.value;
            h = z.mapv(|v| self.g.apply(v));
            if !h.iter().all(|v| v.is_finite()) {
                return Err(NnError::non_finite("rnn_step"));
            }
            cache.zs.push(z);
            cache.hs.push(h.clone());
            outputs.push(h.clone());
        }
        Ok((outputs, cache))
    }

    /// BPTT over the cached sequence; accumulates parameter gradients and
    /// returns per-step input gradients.
    pub fn seq_backward(
        &mut self,
        cache: &SimpleRnnCache,
        upstream: &[Array2<f64>],
    ) -> Result<Vec<Array2<f64>>, NnError> {
        let steps = cache.zs.len();
        let batch = cache.xs[0].nrows();
        let mut dxs = vec![Array2::zeros((batch, self.in_dim())); steps];
        let mut carry: Array2<f64> = Array2::zeros((batch, self.units()));
        for t in (0..steps).rev() {
            let mut dh = upstream[t].clone();
            dh += &carry;
            // dz = dh ⊙ g'(z_t)
            let mut dz = dh;
            dz.zip_mut_with(&cache.zs[t], |d, &z| *d *= self.g.deriv(z));
            self.w.grad += &cache.xs[t].t().dot(&dz);
            self.u.grad += &cache.hs[t].t().dot(&dz);
            self.b.grad += &dz.sum_axis(Axis(0)).insert_axis(Axis(0));
            carry = dz.dot(&self.u.value.t());
            dxs[t] = dz.dot(&self.w.value.t());
        }
        Ok(dxs)
    }
}

impl ParamVisitor for SimpleRnnCell {
    fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
        f(&mut self.w);
        f(&mut self.u);
        f(&mut self.b);
    }
}

// ---------------------------------------------------------------------------
// LSTM
// ---------------------------------------------------------------------------

/// Gate order inside the fused LSTM matrices: forget, input, candidate, output.
/// Column block `k` of `W`/`U`/`b` (width `units`) belongs to gate `GATES[k]`.
pub const LSTM_GATES: [&str; 4] = ["f", "i", "c", "o"];

/// Fused LSTM cell. One step:
/// ```text
/// [z_f z_i z_c z_o] = x·W + h_prev·U + b          (batch, 4·units)
/// f = σ(z_f)   i = σ(z_i)   c̃ = g(z_c)   o = σ(z_o)
/// C = f ⊙ C_prev + i ⊙ c̃
/// h = o ⊙ g(C)
/// ```
/// The per-gate weight matrices of the classical formulation are the four
/// column blocks of `w`/`u`/`b` in [`LSTM_GATES`] order; the parameter count
/// is exactly `4·(units·in + units² + units)`.
#[derive(Debug, Clone)]
pub struct LstmCell {
    pub w: Param,
    pub u: Param,
    pub b: Param,
    pub g: Activation,
    units: usize,
}

#[derive(Debug, Clone)]
pub struct LstmStepCache {
    x: Array2<f64>,
    h_prev: Array2<f64>,
    c_prev: Array2<f64>,
    z: Array2<f64>,
    f: Array2<f64>,
    i: Array2<f64>,
    cand: Array2<f64>,
    o: Array2<f64>,
    c: Array2<f64>,
}

#[derive(Debug, Clone)]
pub struct LstmCache {
    steps: Vec<LstmStepCache>,
}

impl LstmCell {
    pub fn new(prefix: &str, in_dim: usize, units: usize, g: Activation, rng: &mut impl Rng) -> Self {
        Self {
            w: Param::uniform(format!("{prefix}.w"), in_dim, 4 * units, in_dim, rng),
            u: Param::uniform(format!("{prefix}.u"), units, 4 * units, units, rng),
            b: Param::zeros(format!("{prefix}.b"), 1, 4 * units),
            g,
            units,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.w.value.nrows()
    }

    pub fn units(&self) -> usize {
        self.units
    }

    pub fn seq_forward(
        &self,
        xs: &[Array2<f64>],
    ) -> Result<(Vec<Array2<f64>>, LstmCache), NnError> {
        let batch = xs[0].nrows();
        let u = self.units;
        let mut h: Array2<f64> = Array2::zeros((batch, u));
        let mut c: Array2<f64> = Array2::zeros((batch, u));
        let mut cache = LstmCache {
            steps: Vec::with_capacity(xs.len()),
        };
        let mut outputs = Vec::with_capacity(xs.len());
        for x in xs {
            let mut z = x.dot(&self.w.value);
            z += &h.dot(&self.u.value);
            z += &self.b.value;
            let f = z.slice(s![.., 0..u]).mapv(sigmoid);
            let i = z.slice(s![.., u..2 * u]).mapv(sigmoid);
            let cand = z.slice(s![.., 2 * u..3 * u]).mapv(|v| self.g.apply(v));
            let o = z.slice(s![.., 3 * u..4 * u]).mapv(sigmoid);
            let c_new = &f * &c + &i * &cand;
            let h_new = &o * &c_new.mapv(|v| self.g.apply(v));
            if !h_new.iter().all(|v| v.is_finite()) {
                return Err(NnError::non_finite("lstm_step"));
            }
            cache.steps.push(LstmStepCache {
                x: x.clone(),
                h_prev: h,
                c_prev: c,
                z,
                f,
                i,
                cand,
                o,
                c: c_new.clone(),
            });
            h = h_new.clone();
            c = c_new;
            outputs.push(h_new);
        }
        Ok((outputs, cache))
    }

    pub fn seq_backward(
        &mut self,
        cache: &LstmCache,
        upstream: &[Array2<f64>],
    ) -> Result<Vec<Array2<f64>>, NnError> {
        let steps = cache.steps.len();
        let batch = cache.steps[0].x.nrows();
        let u = self.units;
        let mut dxs = vec![Array2::zeros((batch, self.in_dim())); steps];
        let mut dh_carry: Array2<f64> = Array2::zeros((batch, u));
        let mut dc_carry: Array2<f64> = Array2::zeros((batch, u));
        for t in (0..steps).rev() {
            let st = &cache.steps[t];
            let mut dh = upstream[t].clone();
            dh += &dh_carry;
            let gc = st.c.mapv(|v| self.g.apply(v));
            let d_o = &dh * &gc;
            // dC = carry + dh ⊙ o ⊙ g'(C)
            let mut dc = dc_carry;
            let mut via_h = dh;
            via_h *= &st.o;
            via_h.zip_mut_with(&st.c, |d, &cv| *d *= self.g.deriv(cv));
            dc += &via_h;

            let df = &dc * &st.c_prev;
            let di = &dc * &st.cand;
            let dcand = &dc * &st.i;
            dc_carry = &dc * &st.f;

            // Pre-activation gradients, assembled into the fused layout.
            let mut dz = Array2::zeros((batch, 4 * u));
            {
                let mut block = dz.slice_mut(s![.., 0..u]);
                block.assign(&df);
                block.zip_mut_with(&st.f, |d, &s| *d *= s * (1.0 - s));
            }
            {
                let mut block = dz.slice_mut(s![.., u..2 * u]);
                block.assign(&di);
                block.zip_mut_with(&st.i, |d, &s| *d *= s * (1.0 - s));
            }
            {
                let mut block = dz.slice_mut(s![.., 2 * u..3 * u]);
                block.assign(&dcand);
                let zc = st.z.slice(s![.., 2 * u..3 * u]);
                block.zip_mut_with(&zc, |d, &z| *d *= self.g.deriv(z));
            }
            {
                let mut block = dz.slice_mut(s![.., 3 * u..4 * u]);
                block.assign(&d_o);
                block.zip_mut_with(&st.o, |d, &s| *d *= s * (1.0 - s));
            }

            self.w.grad += &st.x.t().dot(&dz);
            self.u.grad += &st.h_prev.t().dot(&dz);
            self.b.grad += &dz.sum_axis(Axis(0)).insert_axis(Axis(0));
            dh_carry = dz.dot(&self.u.value.t());
            dxs[t] = dz.dot(&self.w.value.t());
        }
        Ok(dxs)
    }
}

impl ParamVisitor for LstmCell {
    fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
        f(&mut self.w);
        f(&mut self.u);
        f(&mut self.b);
    }
}

// ---------------------------------------------------------------------------
// GRU
// ---------------------------------------------------------------------------

/// Gate order inside the fused GRU gate matrices: reset, update.
pub const GRU_GATES: [&str; 2] = ["r", "z"];

/// Fused GRU cell. One step:
/// ```text
/// [a_r a_z] = x·W_rz + h_prev·U_rz + b_rz         (batch, 2·units)
/// r = σ(a_r)   z = σ(a_z)
/// h̃ = g(x·W_h + (r ⊙ h_prev)·U_h + b_h)
/// h = z ⊙ h_prev + (1−z) ⊙ h̃
/// ```
/// The candidate path keeps its own `U_h` because the reset gate multiplies
/// `h_prev` *before* the recurrent product. Parameter count is exactly
/// `3·(units·in + units² + units)`.
#[derive(Debug, Clone)]
pub struct GruCell {
    pub w_rz: Param,
    pub u_rz: Param,
    pub b_rz: Param,
    pub w_h: Param,
    pub u_h: Param,
    pub b_h: Param,
    pub g: Activation,
    units: usize,
}

#[derive(Debug, Clone)]
pub struct GruStepCache {
    x: Array2<f64>,
    h_prev: Array2<f64>,
    r: Array2<f64>,
    z: Array2<f64>,
    a_h: Array2<f64>,
    cand: Array2<f64>,
    rh: Array2<f64>,
}

#[derive(Debug, Clone)]
pub struct GruCache {
    steps: Vec<GruStepCache>,
}

impl GruCell {
    pub fn new(prefix: &str, in_dim: usize, units: usize, g: Activation, rng: &mut impl Rng) -> Self {
        Self {
            w_rz: Param::uniform(format!("{prefix}.w_rz"), in_dim, 2 * units, in_dim, rng),
            u_rz: Param::uniform(format!("{prefix}.u_rz"), units, 2 * units, units, rng),
            b_rz: Param::zeros(format!("{prefix}.b_rz"), 1, 2 * units),
            w_h: Param::uniform(format!("{prefix}.w_h"), in_dim, units, in_dim, rng),
            u_h: Param::uniform(format!("{prefix}.u_h"), units, units, units, rng),
            b_h: Param::zeros(format!("{prefix}.b_h"), 1, units),
            g,
            units,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.w_h.value.nrows()
    }

    pub fn units(&self) -> usize {
        self.units
    }

    pub fn seq_forward(
        &self,
        xs: &[Array2<f64>],
    ) -> Result<(Vec<Array2<f64>>, GruCache), NnError> {
        let batch = xs[0].nrows();
        let u = self.units;
        let mut h: Array2<f64> = Array2::zeros((batch, u));
        let mut cache = GruCache {
            steps: Vec::with_capacity(xs.len()),
        };
        let mut outputs = Vec::with_capacity(xs.len());
        for x in xs {
            let mut a = x.dot(&self.w_rz.value);
            a += &h.dot(&self.u_rz.value);
            a += &self.b_rz.value;
            let r = a.slice(s![.., 0..u]).mapv(sigmoid);
            let z = a.slice(s![.., u..2 * u]).mapv(sigmoid);
            let rh = &r * &h;
            let mut a_h = x.dot(&self.w_h.value);
            a_h += &rh.dot(&self.u_h.value);
            a_h += &self.b_h.value;
            let cand = a_h.mapv(|v| self.g.apply(v));
            let h_new = &z * &h + &(1.0 - &z) * &cand;
            if !h_new.iter().all(|v| v.is_finite()) {
                return Err(NnError::non_finite("gru_step"));
            }
            cache.steps.push(GruStepCache {
                x: x.clone(),
                h_prev: h,
                r,
                z,
                a_h,
                cand,
                rh,
            });
            h = h_new.clone();
            outputs.push(h_new);
        }
        Ok((outputs, cache))
    }

    pub fn seq_backward(
        &mut self,
        cache: &GruCache,
        upstream: &[Array2<f64>],
    ) -> Result<Vec<Array2<f64>>, NnError> {
        let steps = cache.steps.len();
        let batch = cache.steps[0].x.nrows();
        let u = self.units;
        let mut dxs = vec![Array2::zeros((batch, self.in_dim())); steps];
        let mut carry: Array2<f64> = Array2::zeros((batch, u));
        for t in (0..steps).rev() {
            let st = &cache.steps[t];
            let mut dh = upstream[t].clone();
            dh += &carry;

            // h = z ⊙ h_prev + (1−z) ⊙ cand
            let dz_gate = &dh * &(&st.h_prev - &st.cand);
            let dcand = &dh * &(1.0 - &st.z);
            let mut dh_prev = &dh * &st.z;

            // Candidate path.
            let mut da_h = dcand;
            da_h.zip_mut_with(&st.a_h, |d, &a| *d *= self.g.deriv(a));
            self.w_h.grad += &st.x.t().dot(&da_h);
            self.u_h.grad += &st.rh.t().dot(&da_h);
            self.b_h.grad += &da_h.sum_axis(Axis(0)).insert_axis(Axis(0));
            let drh = da_h.dot(&self.u_h.value.t());
            let dr = &drh * &st.h_prev;
            dh_prev += &(&drh * &st.r);

            // Fused gate pre-activations.
            let mut da = Array2::zeros((batch, 2 * u));
            {
                let mut block = da.slice_mut(s![.., 0..u]);
                block.assign(&dr);
                block.zip_mut_with(&st.r, |d, &s| *d *= s * (1.0 - s));
            }
            {
                let mut block = da.slice_mut(s![.., u..2 * u]);
                block.assign(&dz_gate);
                block.zip_mut_with(&st.z, |d, &s| *d *= s * (1.0 - s));
            }
            self.w_rz.grad += &st.x.t().dot(&da);
            self.u_rz.grad += &st.h_prev.t().dot(&da);
            self.b_rz.grad += &da.sum_axis(Axis(0)).insert_axis(Axis(0));
            dh_prev += &da.dot(&self.u_rz.value.t());

            dxs[t] = da_h.dot(&self.w_h.value.t()) + da.dot(&self.w_rz.value.t());
            carry = dh_prev;
        }
        Ok(dxs)
    }
}

impl ParamVisitor for GruCell {
    fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
        f(&mut self.w_rz);
        f(&mut self.u_rz);
        f(&mut self.b_rz);
        f(&mut self.w_h);
        f(&mut self.u_h);
        f(&mut self.b_h);
    }
}

// ---------------------------------------------------------------------------
// Cell dispatch
// ---------------------------------------------------------------------------

/// Which recurrence a layer uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    Simple,
    Lstm,
    Gru,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Simple(SimpleRnnCell),
    Lstm(LstmCell),
    Gru(GruCell),
}

#[derive(Debug, Clone)]
pub enum CellCache {
    Simple(SimpleRnnCache),
    Lstm(LstmCache),
    Gru(GruCache),
}

impl Cell {
    pub fn new(
        kind: CellKind,
        prefix: &str,
        in_dim: usize,
        units: usize,
        g: Activation,
        rng: &mut impl Rng,
    ) -> Self {
        match kind {
            CellKind::Simple => Cell::Simple(SimpleRnnCell::new(prefix, in_dim, units, g, rng)),
            CellKind::Lstm => Cell::Lstm(LstmCell::new(prefix, in_dim, units, g, rng)),
            CellKind::Gru => Cell::Gru(GruCell::new(prefix, in_dim, units, g, rng)),
        }
    }

    pub fn units(&self) -> usize {
        match self {
            Cell::Simple(c) => c.units(),
            Cell::Lstm(c) => c.units(),
            Cell::Gru(c) => c.units(),
        }
    }

    pub fn seq_forward(
        &self,
        xs: &[Array2<f64>],
    ) -> Result<(Vec<Array2<f64>>, CellCache), NnError> {
        Ok(match self {
            Cell::Simple(c) => {
                let (o, k) = c.seq_forward(xs)?;
                (o, CellCache::Simple(k))
            }
            Cell::Lstm(c) => {
                let (o, k) = c.seq_forward(xs)?;
                (o, CellCache::Lstm(k))
            }
            Cell::Gru(c) => {
                let (o, k) = c.seq_forward(xs)?;
                (o, CellCache::Gru(k))
            }
        })
    }

    pub fn seq_backward(
        &mut self,
        cache: &CellCache,
        upstream: &[Array2<f64>],
    ) -> Result<Vec<Array2<f64>>, NnError> {
        match (self, cache) {
            (Cell::Simple(c), CellCache::Simple(k)) => c.seq_backward(k, upstream),
            (Cell::Lstm(c), CellCache::Lstm(k)) => c.seq_backward(k, upstream),
            (Cell::Gru(c), CellCache::Gru(k)) => c.seq_backward(k, upstream),
            _ => Err(NnError::BadConfig("cell/cache kind mismatch".into())),
        }
    }
}

impl ParamVisitor for Cell {
    fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
        match self {
            Cell::Simple(c) => c.visit_params(f),
            Cell::Lstm(c) => c.visit_params(f),
            Cell::Gru(c) => c.visit_params(f),
        }
    }
}

// ---------------------------------------------------------------------------
// Layers: unidirectional or bidirectional
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum RecurrentLayer {
    Uni(Cell),
    /// Forward cell plus backward cell over the reversed sequence; outputs are
    /// concatenated `[h_fwd_t ; h_bwd_t]`, doubling the feature dimension.
    Bi(Cell, Cell),
}

#[derive(Debug, Clone)]
pub enum LayerCache {
    Uni(CellCache),
    Bi(CellCache, CellCache),
}

impl RecurrentLayer {
    pub fn out_dim(&self) -> usize {
        match self {
            RecurrentLayer::Uni(c) => c.units(),
            RecurrentLayer::Bi(f, _) => 2 * f.units(),
        }
    }

    pub fn forward(
        &self,
        xs: &[Array2<f64>],
    ) -> Result<(Vec<Array2<f64>>, LayerCache), NnError> {
        match self {
            RecurrentLayer::Uni(cell) => {
                let (o, k) = cell.seq_forward(xs)?;
                Ok((o, LayerCache::Uni(k)))
            }
            RecurrentLayer::Bi(fwd, bwd) => {
                if fwd.units() != bwd.units() {
                    return Err(NnError::BadConfig(
                        "bidirectional halves must have equal unit counts".into(),
                    ));
                }
                let (fo, fk) = fwd.seq_forward(xs)?;
                let rev: Vec<Array2<f64>> = xs.iter().rev().cloned().collect();
                let (bo, bk) = bwd.seq_forward(&rev)?;
                let steps = xs.len();
                let mut outputs = Vec::with_capacity(steps);
                for t in 0..steps {
                    // Backward-direction state aligned to position t consumed
                    // x_{L-1} .. x_t, i.e. reversed-step index L-1-t.
                    let mut o = Array2::zeros((fo[t].nrows(), 2 * fwd.units()));
                    o.slice_mut(s![.., 0..fwd.units()]).assign(&fo[t]);
                    o.slice_mut(s![.., fwd.units()..]).assign(&bo[steps - 1 - t]);
                    outputs.push(o);
                }
                Ok((outputs, LayerCache::Bi(fk, bk)))
            }
        }
    }

    pub fn backward(
        &mut self,
        cache: &LayerCache,
        upstream: &[Array2<f64>],
    ) -> Result<Vec<Array2<f64>>, NnError> {
        match (self, cache) {
            (RecurrentLayer::Uni(cell), LayerCache::Uni(k)) => cell.seq_backward(k, upstream),
            (RecurrentLayer::Bi(fwd, bwd), LayerCache::Bi(fk, bk)) => {
                let steps = upstream.len();
                let units = fwd.units();
                let fwd_up: Vec<Array2<f64>> = upstream
                    .iter()
                    .map(|u| u.slice(s![.., 0..units]).to_owned())
                    .collect();
                // Upstream for the backward cell, in its own (reversed) time.
                let bwd_up: Vec<Array2<f64>> = (0..steps)
                    .map(|k| upstream[steps - 1 - k].slice(s![.., units..]).to_owned())
                    .collect();
                let dx_f = fwd.seq_backward(fk, &fwd_up)?;
                let dx_b = bwd.seq_backward(bk, &bwd_up)?;
                Ok((0..steps)
                    .map(|t| &dx_f[t] + &dx_b[steps - 1 - t])
                    .collect())
            }
            _ => Err(NnError::BadConfig("layer/cache kind mismatch".into())),
        }
    }
}

impl ParamVisitor for RecurrentLayer {
    fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
        match self {
            RecurrentLayer::Uni(c) => c.visit_params(f),
            RecurrentLayer::Bi(a, b) => {
                a.visit_params(f);
                b.visit_params(f);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Stacked sequence model with a time-distributed head
// ---------------------------------------------------------------------------

/// Stacked recurrent forecaster: `n_layers` recurrent layers (optionally
/// bidirectional) with inter-layer dropout, topped by one dense head applied
/// at every timestep. Training minimizes MSE over *all* step predictions
/// (each step predicts the next value); forecasting reads the final step.
#[derive(Debug, Clone)]
pub struct StackedRnn {
    pub cell_kind: CellKind,
    pub bidirectional: bool,
    pub layers: Vec<RecurrentLayer>,
    pub head: DenseLayer,
    pub units: usize,
    pub activation: Activation,
}

pub struct StackedCache {
    layer_caches: Vec<LayerCache>,
    dropout_masks: Vec<Vec<Option<Array2<f64>>>>,
    head_caches: Vec<DenseCache>,
    steps: usize,
}

impl StackedRnn {
    pub fn new(
        cell_kind: CellKind,
        bidirectional: bool,
        n_layers: usize,
        units: usize,
        activation: Activation,
        rng: &mut impl Rng,
    ) -> Result<Self, NnError> {
        if n_layers == 0 || units == 0 {
            return Err(NnError::BadConfig(
                "need at least one layer and one unit".into(),
            ));
        }
        let mut layers = Vec::with_capacity(n_layers);
        let mut in_dim = 1usize;
        for l in 0..n_layers {
            let layer = if bidirectional {
                let f = Cell::new(cell_kind, &format!("layer{l}.fwd"), in_dim, units, activation, rng);
                let b = Cell::new(cell_kind, &format!("layer{l}.bwd"), in_dim, units, activation, rng);
                RecurrentLayer::Bi(f, b)
            } else {
                RecurrentLayer::Uni(Cell::new(
                    cell_kind,
                    &format!("layer{l}"),
                    in_dim,
                    units,
                    activation,
                    rng,
                ))
            };
            in_dim = layer.out_dim();
            layers.push(layer);
        }
        let head = DenseLayer::new("head", in_dim, 1, Activation::Identity, rng);
        Ok(Self {
            cell_kind,
            bidirectional,
            layers,
            head,
            units,
            activation,
        })
    }

    /// Converts a batch of windows (each `window_len` scalars) into per-step
    /// `(batch, 1)` input matrices.
    fn steps_from_windows(windows: &[&[f64]]) -> Result<Vec<Array2<f64>>, NnError> {
        let len = windows[0].len();
        if len == 0 || windows.iter().any(|w| w.len() != len) {
            return Err(NnError::ShapeMismatch {
                op: "stacked_forward",
                expected: format!("uniform window length {len} > 0"),
                got: "ragged or empty windows".into(),
            });
        }
        Ok((0..len)
            .map(|t| {
                Array2::from_shape_fn((windows.len(), 1), |(w, _)| windows[w][t])
            })
            .collect())
    }

    /// Full forward pass; `rng`/`dropout_rate` drive inter-layer dropout when
    /// `training` — inference never drops. Returns `(batch, steps)` per-step
    /// predictions plus everything `backward` needs.
    pub fn forward(
        &self,
        windows: &[&[f64]],
        training: bool,
        dropout_rate: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Array2<f64>, StackedCache), NnError> {
        let mut seq = Self::steps_from_windows(windows)?;
        let steps = seq.len();
        let batch = windows.len();
        let mut layer_caches = Vec::with_capacity(self.layers.len());
        let mut dropout_masks = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let (mut out, cache) = layer.forward(&seq)?;
            layer_caches.push(cache);
            let mut masks = Vec::with_capacity(steps);
            for o in &mut out {
                masks.push(dropout_apply(o, dropout_rate, training, rng)?);
            }
            dropout_masks.push(masks);
            seq = out;
        }
        let mut preds = Array2::zeros((batch, steps));
        let mut head_caches = Vec::with_capacity(steps);
        for (t, o) in seq.iter().enumerate() {
            let (y, hc) = self.head.forward(o)?;
            preds.column_mut(t).assign(&y.column(0));
            head_caches.push(hc);
        }
        Ok((
            preds,
            StackedCache {
                layer_caches,
                dropout_masks,
                head_caches,
                steps,
            },
        ))
    }

    /// BPTT from `(batch, steps)` prediction gradients down to the inputs.
    /// Accumulates parameter gradients (callers zero them beforehand).
    pub fn backward(
        &mut self,
        cache: &StackedCache,
        dpreds: &Array2<f64>,
    ) -> Result<(), NnError> {
        let steps = cache.steps;
        let mut upstream: Vec<Array2<f64>> = Vec::with_capacity(steps);
        for t in 0..steps {
            let dy = dpreds.column(t).insert_axis(Axis(1)).to_owned();
            upstream.push(self.head.backward(&cache.head_caches[t], &dy)?);
        }
        for (l, layer) in self.layers.iter_mut().enumerate().rev() {
            for (t, u) in upstream.iter_mut().enumerate() {
                dropout_backward(u, &cache.dropout_masks[l][t]);
            }
            upstream = layer.backward(&cache.layer_caches[l], &upstream)?;
        }
        Ok(())
    }

    /// Next-value prediction from the final step, inference mode.
    pub fn predict_next(&self, window: &[f64]) -> Result<f64, NnError> {
        let mut rng = ChaCha8Rng::seed_from_u64(0); // unused: inference drops nothing
        let (preds, _) = self.forward(&[window], false, 0.0, &mut rng)?;
        Ok(preds[[0, preds.ncols() - 1]])
    }
}

impl ParamVisitor for StackedRnn {
    fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
        for layer in &mut self.layers {
            layer.visit_params(f);
        }
        self.head.visit_params(f);
    }
}
