//! Seasonal ARIMA fitted by conditional sum of squares.
//!
//! Model, stated on the differenced series z_t (after `sd` seasonal and `d`
//! regular differences), with c the optional drift:
//!
//!   (1 - sum phi_i B^i)(1 - sum PHI_j B^{js}) (z_t - c)
//!       = (1 + sum theta_i B^i)(1 + sum THETA_j B^{js}) eps_t
//!
//! The two polynomial products are expanded into dense lag-weight vectors so
//! the residual recursion is a flat loop:
//!
//!   eps_t = (z_t - c) - sum_k a_k (z_{t-k} - c) - sum_k m_k eps_{t-k}
//!
//! Pre-sample values (t - k < 0) of both the centered series and the
//! residuals are taken as zero, so every one of the n differenced
//! observations contributes a residual. That keeps the effective sample size
//! identical across candidate orders, which is what makes AIC values
//! comparable within a model grid.
//!
//! With sigma^2 profiled out (sigma^2 = SSE / n), the Gaussian log-likelihood
//! is -n/2 (ln(2 pi sigma^2) + 1) and AIC = -2 loglik + 2 (k + 1) where k
//! counts the estimated coefficients (the +1 is sigma^2).

use std::cmp::Ordering;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use flucast_core::{difference, integrate, DifferencePivots};

use crate::error::ClassicalError;
use crate::optim::{nelder_mead, NelderMeadOptions};

/// Model order (p, d, q)(P, D, Q)[s], plus whether a drift constant is
/// estimated on the differenced scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SarimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub sp: usize,
    pub sd: usize,
    pub sq: usize,
    pub s: usize,
    pub include_drift: bool,
}

impl SarimaOrder {
    /// Convenience constructor for (p, d, q)(P, D, Q)[s] without drift.
    pub fn new(
        p: usize,
        d: usize,
        q: usize,
        sp: usize,
        sd: usize,
        sq: usize,
        s: usize,
    ) -> Self {
        SarimaOrder {
            p,
            d,
            q,
            sp,
            sd,
            sq,
            s,
            include_drift: false,
        }
    }

    pub fn with_drift(mut self) -> Self {
        self.include_drift = true;
        self
    }

    /// Number of estimated coefficients (sigma^2 not included).
    pub fn n_params(&self) -> usize {
        self.p + self.q + self.sp + self.sq + usize::from(self.include_drift)
    }

    pub fn validate(&self) -> Result<(), ClassicalError> {
        if (self.sp > 0 || self.sd > 0 || self.sq > 0) && self.s < 2 {
            return Err(ClassicalError::BadOrder(format!(
                "seasonal terms require a period of at least 2, got s = {}",
                self.s
            )));
        }
        Ok(())
    }

    /// Display label, e.g. `SARIMA(0,1,3)(0,0,1)[12]` or
    /// `SARIMA(1,1,0)(0,1,1)[12]+drift`.
    pub fn label(&self) -> String {
        let mut out = format!(
            "SARIMA({},{},{})({},{},{})[{}]",
            self.p, self.d, self.q, self.sp, self.sd, self.sq, self.s
        );
        if self.include_drift {
            out.push_str("+drift");
        }
        out
    }
}

/// Coefficients matching a [`SarimaOrder`]: `ar.len() == p`, `ma.len() == q`,
/// `sar.len() == sp`, `sma.len() == sq`, and `drift` present exactly when the
/// order includes it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarimaCoefficients {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub sar: Vec<f64>,
    pub sma: Vec<f64>,
    pub drift: Option<f64>,
}

impl SarimaCoefficients {
    fn check_against(&self, order: &SarimaOrder) -> Result<(), ClassicalError> {
        let expected = order.n_params();
        let got = self.ar.len()
            + self.ma.len()
            + self.sar.len()
            + self.sma.len()
            + usize::from(self.drift.is_some());
        let shape_ok = self.ar.len() == order.p
            && self.ma.len() == order.q
            && self.sar.len() == order.sp
            && self.sma.len() == order.sq
            && self.drift.is_some() == order.include_drift;
        if !shape_ok {
            return Err(ClassicalError::BadCoefficientCount { expected, got });
        }
        Ok(())
    }
}

/// Expands (1 - sum phi_i B^i)(1 - sum PHI_j B^{js}) into dense weights a_k
/// (lag k = index + 1) for the form z_t = sum a_k z_{t-k} + ...; the cross
/// terms pick up a minus sign.
pub fn expand_ar_weights(ar: &[f64], sar: &[f64], s: usize) -> Vec<f64> {
    let mut w = vec![0.0; ar.len() + s * sar.len()];
    for (i, &phi) in ar.iter().enumerate() {
        w[i] += phi;
    }
    for (j, &sphi) in sar.iter().enumerate() {
        let js = (j + 1) * s;
        w[js - 1] += sphi;
        for (i, &phi) in ar.iter().enumerate() {
            w[js + i] -= phi * sphi;
        }
    }
    w
}

/// Expands (1 + sum theta_i B^i)(1 + sum THETA_j B^{js}) into dense weights
/// m_k; the cross terms keep a plus sign.
pub fn expand_ma_weights(ma: &[f64], sma: &[f64], s: usize) -> Vec<f64> {
    let mut w = vec![0.0; ma.len() + s * sma.len()];
    for (i, &theta) in ma.iter().enumerate() {
        w[i] += theta;
    }
    for (j, &stheta) in sma.iter().enumerate() {
        let js = (j + 1) * s;
        w[js - 1] += stheta;
        for (i, &theta) in ma.iter().enumerate() {
            w[js + i] += theta * stheta;
        }
    }
    w
}

/// Schur-Cohn test via the Levinson step-down: the polynomial
/// 1 - sum a_k B^k has all roots outside the unit circle iff every reflection
/// coefficient produced by stepping the order down has magnitude < 1.
pub fn ar_weights_stationary(weights: &[f64]) -> bool {
    let mut k = weights.len();
    while k > 0 && weights[k - 1] == 0.0 {
        k -= 1;
    }
    let mut phi = weights[..k].to_vec();
    while let Some(&r) = phi.last() {
        if !r.is_finite() || r.abs() >= 1.0 {
            return false;
        }
        let kk = phi.len();
        if kk == 1 {
            return true;
        }
        let denom = 1.0 - r * r;
        let prev: Vec<f64> = (0..kk - 1)
            .map(|i| (phi[i] + r * phi[kk - 2 - i]) / denom)
            .collect();
        phi = prev;
    }
    true
}

/// Invertibility of 1 + sum m_k B^k, which is stationarity of the negated
/// weights.
pub fn ma_weights_invertible(weights: &[f64]) -> bool {
    let negated: Vec<f64> = weights.iter().map(|&w| -w).collect();
    ar_weights_stationary(&negated)
}

/// Conditional-sum-of-squares evaluation at fixed coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CssFit {
    /// One residual per differenced observation.
    pub residuals: Vec<f64>,
    pub sse: f64,
    pub sigma2: f64,
    pub loglik: f64,
    pub aic: f64,
    /// Number of differenced observations contributing to the SSE.
    pub n_effective: usize,
}

/// Runs the residual recursion on an already-differenced series and returns
/// the profiled Gaussian likelihood quantities. Does not check stationarity
/// or invertibility; callers that optimize impose those as a barrier.
pub fn css_loglik(
    diffed: &[f64],
    order: &SarimaOrder,
    coeffs: &SarimaCoefficients,
) -> Result<CssFit, ClassicalError> {
    order.validate()?;
    coeffs.check_against(order)?;
    let n = diffed.len();
    if n == 0 {
        return Err(ClassicalError::NotEnoughData { needed: 1, got: 0 });
    }
    if diffed.iter().any(|v| !v.is_finite()) {
        return Err(ClassicalError::NonFinite);
    }

    let c = coeffs.drift.unwrap_or(0.0);
    let a = expand_ar_weights(&coeffs.ar, &coeffs.sar, order.s);
    let m = expand_ma_weights(&coeffs.ma, &coeffs.sma, order.s);

    let zc: Vec<f64> = diffed.iter().map(|z| z - c).collect();
    let mut eps = Vec::with_capacity(n);
    for t in 0..n {
        let mut pred = 0.0;
        for (k, &ak) in a.iter().enumerate() {
            let lag = k + 1;
            if t >= lag {
                pred += ak * zc[t - lag];
            }
        }
        for (k, &mk) in m.iter().enumerate() {
            let lag = k + 1;
            if t >= lag {
                pred += mk * eps[t - lag];
            }
        }
        eps.push(zc[t] - pred);
    }

    let sse: f64 = eps.iter().map(|e| e * e).sum();
    if !sse.is_finite() {
        return Err(ClassicalError::NonFinite);
    }
    let nf = n as f64;
    let sigma2 = sse / nf;
    // A perfect fit (SSE = 0) would send ln(sigma2) to -infinity; clamping
    // keeps the likelihood finite while still ranking the fit best.
    let loglik = -0.5 * nf * ((2.0 * std::f64::consts::PI * sigma2.max(f64::MIN_POSITIVE)).ln() + 1.0);
    let aic = -2.0 * loglik + 2.0 * (order.n_params() as f64 + 1.0);
    Ok(CssFit {
        residuals: eps,
        sse,
        sigma2,
        loglik,
        aic,
        n_effective: n,
    })
}

/// One estimated coefficient with its large-sample inference columns. The
/// inference fields are `None` when the numerical information matrix is
/// singular or not positive on that coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEstimate {
    pub name: String,
    pub value: f64,
    pub std_err: Option<f64>,
    pub z: Option<f64>,
    pub p_value: Option<f64>,
}

/// A fitted model: coefficient estimates, likelihood quantities, residuals on
/// the differenced scale, and enough state to forecast on the original scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarimaFit {
    pub order: SarimaOrder,
    pub coefficients: SarimaCoefficients,
    pub estimates: Vec<CoefficientEstimate>,
    pub sigma2: f64,
    pub loglik: f64,
    pub aic: f64,
    pub n_effective: usize,
    /// Residuals aligned with the differenced series.
    pub residuals: Vec<f64>,
    /// The differenced training series the model was fitted on.
    pub diffed: Vec<f64>,
    /// Leading values needed to undo the differencing when forecasting.
    pub pivots: DifferencePivots,
}

impl SarimaFit {
    /// Forecasts `horizon` steps ahead on the original (undifferenced) scale.
    ///
    /// The recursion is extended past the sample with future shocks set to
    /// zero, then the differencing is inverted.
    pub fn forecast(&self, horizon: usize) -> Vec<f64> {
        let c = self.coefficients.drift.unwrap_or(0.0);
        let a = expand_ar_weights(&self.coefficients.ar, &self.coefficients.sar, self.order.s);
        let m = expand_ma_weights(&self.coefficients.ma, &self.coefficients.sma, self.order.s);

        let n = self.diffed.len();
        let mut zc: Vec<f64> = self.diffed.iter().map(|z| z - c).collect();
        let mut eps = self.residuals.clone();
        let mut extended = self.diffed.clone();
        for t in n..n + horizon {
            let mut pred = 0.0;
            for (k, &ak) in a.iter().enumerate() {
                let lag = k + 1;
                if t >= lag {
                    pred += ak * zc[t - lag];
                }
            }
            for (k, &mk) in m.iter().enumerate() {
                let lag = k + 1;
                if t >= lag {
                    pred += mk * eps[t - lag];
                }
            }
            zc.push(pred);
            eps.push(0.0);
            extended.push(pred + c);
        }

        let rebuilt = integrate(&extended, &self.pivots);
        rebuilt[rebuilt.len() - horizon..].to_vec()
    }
}

fn unpack(order: &SarimaOrder, x: &[f64]) -> SarimaCoefficients {
    let (p, q, sp, sq) = (order.p, order.q, order.sp, order.sq);
    SarimaCoefficients {
        ar: x[..p].to_vec(),
        ma: x[p..p + q].to_vec(),
        sar: x[p + q..p + q + sp].to_vec(),
        sma: x[p + q + sp..p + q + sp + sq].to_vec(),
        drift: order.include_drift.then(|| x[p + q + sp + sq]),
    }
}

fn coefficient_names(order: &SarimaOrder) -> Vec<String> {
    let mut names = Vec::with_capacity(order.n_params());
    names.extend((1..=order.p).map(|i| format!("ar{i}")));
    names.extend((1..=order.q).map(|i| format!("ma{i}")));
    names.extend((1..=order.sp).map(|i| format!("sar{i}")));
    names.extend((1..=order.sq).map(|i| format!("sma{i}")));
    if order.include_drift {
        names.push("drift".to_string());
    }
    names
}

/// Fits a model on original-scale values: differences per the order, then
/// minimizes the conditional sum of squares with Nelder-Mead under a
/// stationarity/invertibility barrier, from a zero start plus five jittered
/// restarts (fixed jitter seed, so fits are deterministic). Standard errors
/// come from the numerically differentiated concentrated log-likelihood.
pub fn fit_sarima(values: &[f64], order: &SarimaOrder) -> Result<SarimaFit, ClassicalError> {
    order.validate()?;
    let (diffed, pivots) = difference(values, order.d, order.sd, order.s.max(2))?;
    let n_par = order.n_params();
    if diffed.len() < n_par + 2 {
        return Err(ClassicalError::NotEnoughData {
            needed: n_par + 2,
            got: diffed.len(),
        });
    }

    let objective_sse = |x: &[f64]| -> f64 {
        let coeffs = unpack(order, x);
        let a = expand_ar_weights(&coeffs.ar, &coeffs.sar, order.s);
        let m = expand_ma_weights(&coeffs.ma, &coeffs.sma, order.s);
        if !ar_weights_stationary(&a) || !ma_weights_invertible(&m) {
            return f64::INFINITY;
        }
        match css_loglik(&diffed, order, &coeffs) {
            Ok(fit) => fit.sse,
            Err(_) => f64::INFINITY,
        }
    };

    let x_hat: Vec<f64> = if n_par == 0 {
        Vec::new()
    } else {
        let mut base = vec![0.0; n_par];
        if order.include_drift {
            base[n_par - 1] = diffed.iter().sum::<f64>() / diffed.len() as f64;
        }
        let opts = NelderMeadOptions {
            max_iters: 4000,
            tol: 1e-10,
            init_step: 0.25,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0x53415249); // fixed: fits are deterministic
        let mut best: Option<(Vec<f64>, f64)> = None;
        for restart in 0..6 {
            let start: Vec<f64> = if restart == 0 {
                base.clone()
            } else {
                base.iter()
                    .enumerate()
                    .map(|(i, &b)| {
                        if order.include_drift && i == n_par - 1 {
                            b + rng.gen_range(-0.25..0.25) * (1.0 + b.abs())
                        } else {
                            b + rng.gen_range(-0.25..0.25)
                        }
                    })
                    .collect()
            };
            let mut f = |x: &[f64]| objective_sse(x);
            let r = nelder_mead(&mut f, &start, &opts);
            let better = match &best {
                None => r.fx.is_finite(),
                Some((_, fx)) => r.fx < *fx,
            };
            if better {
                best = Some((r.x, r.fx));
            }
        }
        best.ok_or(ClassicalError::OptimizerFailed)?.0
    };

    let coefficients = unpack(order, &x_hat);
    let css = css_loglik(&diffed, order, &coefficients)?;

    let names = coefficient_names(order);
    let std_errs = standard_errors(&objective_sse, &x_hat, diffed.len());
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let estimates: Vec<CoefficientEstimate> = names
        .into_iter()
        .enumerate()
        .map(|(i, name)| {
            let value = x_hat[i];
            let std_err = std_errs.as_ref().and_then(|se| se[i]);
            let z = std_err.map(|se| value / se);
            let p_value = z.map(|z| 2.0 * (1.0 - normal.cdf(z.abs())));
            CoefficientEstimate {
                name,
                value,
                std_err,
                z,
                p_value,
            }
        })
        .collect();

    Ok(SarimaFit {
        order: *order,
        coefficients,
        estimates,
        sigma2: css.sigma2,
        loglik: css.loglik,
        aic: css.aic,
        n_effective: css.n_effective,
        residuals: css.residuals,
        diffed,
        pivots,
    })
}

/// Standard errors from the inverse Hessian of the concentrated negative
/// log-likelihood f(x) = n/2 ln SSE(x), by central differences. Returns
/// `None` wholesale if any evaluation is infeasible or the Hessian is
/// singular; individual entries are `None` when the inverse diagonal is not
/// positive.
fn standard_errors(
    objective_sse: &dyn Fn(&[f64]) -> f64,
    x: &[f64],
    n: usize,
) -> Option<Vec<Option<f64>>> {
    let k = x.len();
    if k == 0 {
        return Some(Vec::new());
    }
    let nf = n as f64;
    let f = |x: &[f64]| -> f64 {
        let sse = objective_sse(x);
        0.5 * nf * sse.max(f64::MIN_POSITIVE).ln()
    };
    let h: Vec<f64> = x.iter().map(|xi| 1e-4 * xi.abs().max(1.0)).collect();
    let mut probe = x.to_vec();
    let mut eval = |shifts: &[(usize, f64)]| -> f64 {
        for &(i, dx) in shifts {
            probe[i] = x[i] + dx;
        }
        let v = f(&probe);
        for &(i, _) in shifts {
            probe[i] = x[i];
        }
        v
    };

    let f0 = eval(&[]);
    let mut hessian = vec![vec![0.0; k]; k];
    for i in 0..k {
        let fp = eval(&[(i, h[i])]);
        let fm = eval(&[(i, -h[i])]);
        hessian[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in (i + 1)..k {
            let fpp = eval(&[(i, h[i]), (j, h[j])]);
            let fpm = eval(&[(i, h[i]), (j, -h[j])]);
            let fmp = eval(&[(i, -h[i]), (j, h[j])]);
            let fmm = eval(&[(i, -h[i]), (j, -h[j])]);
            let hij = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hessian[i][j] = hij;
            hessian[j][i] = hij;
        }
    }
    if hessian
        .iter()
        .any(|row| row.iter().any(|v| !v.is_finite()))
    {
        return None;
    }

    let cov = invert_symmetric(&hessian)?;
    Some(
        (0..k)
            .map(|i| {
                let v = cov[i][i];
                (v.is_finite() && v > 0.0).then(|| v.sqrt())
            })
            .collect(),
    )
}

/// Gauss-Jordan inverse with partial pivoting; `None` on singular input.
fn invert_symmetric(mat: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let k = mat.len();
    let scale = mat
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let mut a: Vec<Vec<f64>> = mat.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    for col in 0..k {
        let pivot_row = (col..k)
            .max_by(|&r1, &r2| {
                a[r1][col]
                    .abs()
                    .partial_cmp(&a[r2][col].abs())
                    .unwrap_or(Ordering::Equal)
            })
            .unwrap();
        if a[pivot_row][col].abs() < 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let p = a[col][col];
        for j in 0..k {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for row in 0..k {
            if row == col {
                continue;
            }
            let factor = a[row][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..k {
                a[row][j] -= factor * a[col][j];
                inv[row][j] -= factor * inv[col][j];
            }
        }
    }
    Some(inv)
}

/// One grid-search row; rows are sorted by AIC ascending, then by parameter
/// count, then by label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchRow {
    pub order: SarimaOrder,
    pub label: String,
    pub aic: f64,
    pub loglik: f64,
    pub sigma2: f64,
    pub fit: SarimaFit,
}

/// Fits every candidate and returns the rows sorted best-first.
pub fn grid_search(
    values: &[f64],
    candidates: &[SarimaOrder],
) -> Result<Vec<GridSearchRow>, ClassicalError> {
    let mut rows = candidates
        .iter()
        .map(|order| {
            fit_sarima(values, order).map(|fit| GridSearchRow {
                order: *order,
                label: order.label(),
                aic: fit.aic,
                loglik: fit.loglik,
                sigma2: fit.sigma2,
                fit,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|x, y| {
        x.aic
            .partial_cmp(&y.aic)
            .unwrap_or(Ordering::Equal)
            .then_with(|| x.order.n_params().cmp(&y.order.n_params()))
            .then_with(|| x.label.cmp(&y.label))
    });
    Ok(rows)
}

/// Sample autocorrelations r_1 .. r_max about the sample mean, with the
/// full-sample variance in the denominator.
pub fn acf(values: &[f64], max_lag: usize) -> Result<Vec<f64>, ClassicalError> {
    let n = values.len();
    if n < 2 || max_lag >= n {
        return Err(ClassicalError::NotEnoughData {
            needed: max_lag + 1,
            got: n,
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ClassicalError::NonFinite);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let c0: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    if c0 <= 0.0 {
        return Err(ClassicalError::Core(flucast_core::CoreError::ConstantSeries));
    }
    Ok((1..=max_lag)
        .map(|k| {
            let ck: f64 = (k..n)
                .map(|t| (values[t] - mean) * (values[t - k] - mean))
                .sum::<f64>()
                / n as f64;
            ck / c0
        })
        .collect())
}

/// Partial autocorrelations phi_{kk} for k = 1 .. max_lag via the
/// Durbin-Levinson recursion on the sample ACF.
pub fn pacf(values: &[f64], max_lag: usize) -> Result<Vec<f64>, ClassicalError> {
    let r = acf(values, max_lag)?;
    let rho = |k: usize| -> f64 {
        if k == 0 {
            1.0
        } else {
            r[k - 1]
        }
    };
    let mut out = Vec::with_capacity(max_lag);
    let mut phi_prev: Vec<f64> = Vec::new(); // phi_{k-1, 1..k-1}
    for k in 1..=max_lag {
        let phi_kk = if k == 1 {
            rho(1)
        } else {
            let num = rho(k)
                - phi_prev
                    .iter()
                    .enumerate()
                    .map(|(j, &p)| p * rho(k - 1 - j))
                    .sum::<f64>();
            let den = 1.0
                - phi_prev
                    .iter()
                    .enumerate()
                    .map(|(j, &p)| p * rho(j + 1))
                    .sum::<f64>();
            if den.abs() < 1e-12 {
                return Err(ClassicalError::NonFinite);
            }
            num / den
        };
        let mut phi_new = Vec::with_capacity(k);
        for j in 0..k - 1 {
            phi_new.push(phi_prev[j] - phi_kk * phi_prev[k - 2 - j]);
        }
        phi_new.push(phi_kk);
        out.push(phi_kk);
        phi_prev = phi_new;
    }
    Ok(out)
}

/// Large-sample 95% white-noise band for sample autocorrelations.
pub fn acf_confidence_bound(n: usize) -> f64 {
    1.96 / (n as f64).sqrt()
}
