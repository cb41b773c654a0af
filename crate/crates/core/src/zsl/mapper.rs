use std::fmt::Write;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ZslError;

/// `‖X − WᵀZ‖²_F + λ‖WX − Z‖²_F` for `W: m×p`, `X: p×N`, `Z: m×N`.
pub fn sae_loss(w: &DMatrix<f64>, x: &DMatrix<f64>, z: &DMatrix<f64>, lambda: f64) -> f64 {
    (x - w.transpose() * z).norm_squared() + lambda * (w * x - z).norm_squared()
}

/// `∂/∂W` of [`sae_loss`]: `−2Z(X − WᵀZ)ᵀ + 2λ(WX − Z)Xᵀ`.
pub fn sae_gradient(
    w: &DMatrix<f64>,
    x: &DMatrix<f64>,
    z: &DMatrix<f64>,
    lambda: f64,
) -> DMatrix<f64> {
    -2.0 * z * (x - w.transpose() * z).transpose() + 2.0 * lambda * (w * x - z) * x.transpose()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaeConfig {
    pub lambda: f64,
    /// Stop once an iteration improves the loss by less than this fraction.
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SaeConfig {
    fn default() -> Self {
        SaeConfig { lambda: 0.5, tol: 1e-8, max_iters: 5000, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaeModel {
    /// Encoder, `m×p`.
    pub w: DMatrix<f64>,
    pub lambda: f64,
    pub train_loss: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeModel {
    pub w: DMatrix<f64>,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mapper {
    Sae(SaeModel),
    Ridge(RidgeModel),
}

impl Mapper {
    pub fn weights(&self) -> &DMatrix<f64> {
        match self {
            Mapper::Sae(m) => &m.w,
            Mapper::Ridge(m) => &m.w,
        }
    }
}

fn check_columns(x: &DMatrix<f64>, z: &DMatrix<f64>) -> Result<(), ZslError> {
    if x.ncols() != z.ncols() {
        return Err(ZslError::Dimension { expected: x.ncols(), found: z.ncols() });
    }
    if x.iter().chain(z.iter()).any(|v| !v.is_finite()) {
        return Err(ZslError::Divergence("training data contains non-finite values".into()));
    }
    Ok(())
}

/// Minimizes [`sae_loss`] from a small seeded random start.
///
/// The loss is a convex quadratic in `W`, so the descent directions are
/// conjugated (linear conjugate gradient on the stationarity condition
/// `ZZᵀW + λWXXᵀ = (1+λ)ZXᵀ`), with exact line search along each one.
pub fn train_sae(x: &DMatrix<f64>, z: &DMatrix<f64>, cfg: &SaeConfig) -> Result<SaeModel, ZslError> {
    check_columns(x, z)?;
    if !(cfg.lambda >= 0.0 && cfg.lambda.is_finite()) {
        return Err(ZslError::InvalidConfig("lambda must be a finite value >= 0".into()));
    }
    let (m, p) = (z.nrows(), x.nrows());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut w = DMatrix::from_fn(m, p, |_, _| {
        let v: f64 = StandardNormal.sample(&mut rng);
        0.01 * v
    });

    let zz = z * z.transpose();
    let xx = x * x.transpose();
    // H(D) is half the Hessian applied to D
    let hess = |d: &DMatrix<f64>| &zz * d + cfg.lambda * d * &xx;
    let mut r = -sae_gradient(&w, x, z, cfg.lambda) / 2.0;
    let mut d = r.clone();
    let mut rr = r.norm_squared();
    let mut loss = sae_loss(&w, x, z, cfg.lambda);
    let mut iterations = 0;

    while iterations < cfg.max_iters && rr > 0.0 {
        let hd = hess(&d);
        let curvature = d.dot(&hd);
        if curvature <= 0.0 {
            break;
        }
        let step = rr / curvature;
        w += step * &d;
        iterations += 1;
        let next = sae_loss(&w, x, z, cfg.lambda);
        if !next.is_finite() {
            return Err(ZslError::Divergence(format!("loss became non-finite at iteration {iterations}")));
        }
        let improvement = (loss - next) / loss.max(f64::MIN_POSITIVE);
        loss = next;
        if improvement < cfg.tol {
            break;
        }
        // recompute the residual exactly every m·p steps to shed rounding drift
        r = if iterations % (m * p).max(1) == 0 {
            -sae_gradient(&w, x, z, cfg.lambda) / 2.0
        } else {
            r - step * hd
        };
        let rr_next = r.norm_squared();
        d = &r + (rr_next / rr) * d;
        rr = rr_next;
    }
    Ok(SaeModel { w, lambda: cfg.lambda, train_loss: loss.max(0.0), iterations })
}

/// `W = ZXᵀ(XXᵀ + αI)⁻¹` by a Cholesky solve.
pub fn train_ridge(x: &DMatrix<f64>, z: &DMatrix<f64>, alpha: f64) -> Result<RidgeModel, ZslError> {
    check_columns(x, z)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(ZslError::InvalidConfig("ridge alpha must be positive".into()));
    }
    let p = x.nrows();
    let gram = x * x.transpose() + DMatrix::identity(p, p) * alpha;
    let chol = gram
        .cholesky()
        .ok_or_else(|| ZslError::Divergence("ridge system is not positive definite".into()))?;
    // (XXᵀ + αI) Wᵀ = X Zᵀ
    let w = chol.solve(&(x * z.transpose())).transpose();
    Ok(RidgeModel { w, alpha })
}

/// g(x) = W·x.
pub fn map_features(model: &Mapper, x: &[f64]) -> Result<Vec<f64>, ZslError> {
    let w = model.weights();
    if x.len() != w.ncols() {
        return Err(ZslError::Dimension { expected: w.ncols(), found: x.len() });
    }
    Ok((0..w.nrows()).map(|i| (0..w.ncols()).map(|j| w[(i, j)] * x[j]).sum()).collect())
}

/// Header line `sae m p lambda loss` or `ridge m p alpha`, then the `m` rows of
/// `W`, space-separated, 17 significant digits.
pub fn write_model(model: &Mapper) -> String {
    let w = model.weights();
    let mut out = match model {
        Mapper::Sae(s) => {
            format!("sae {} {} {:.16e} {:.16e}\n", w.nrows(), w.ncols(), s.lambda, s.train_loss)
        }
        Mapper::Ridge(r) => format!("ridge {} {} {:.16e}\n", w.nrows(), w.ncols(), r.alpha),
    };
    for i in 0..w.nrows() {
        let row: Vec<String> = (0..w.ncols()).map(|j| format!("{:.16e}", w[(i, j)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn read_model(text: &str) -> Result<Mapper, ZslError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| ZslError::format(1, "empty model file"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| ZslError::format(1, format!("bad number `{s}`")));
    let size = |s: &str| s.parse::<usize>().map_err(|_| ZslError::format(1, format!("bad size `{s}`")));
    let (m, p) = match head.get(1..3) {
        Some([m, p]) => (size(m)?, size(p)?),
        _ => return Err(ZslError::format(1, "expected `kind m p ...` header")),
    };
    let mut values = Vec::with_capacity(m * p);
    for (i, line) in lines {
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>().map_err(|_| ZslError::format(i + 1, format!("bad number `{s}`"))))
            .collect::<Result<_, _>>()?;
        if row.len() != p {
            return Err(ZslError::format(i + 1, format!("expected {p} values, found {}", row.len())));
        }
        values.extend(row);
    }
    if values.len() != m * p {
        return Err(ZslError::format(1, format!("expected {m} rows, found {}", values.len() / p.max(1))));
    }
    let w = DMatrix::from_row_slice(m, p, &values);
    match head.as_slice() {
        ["sae", _, _, lambda, loss] => Ok(Mapper::Sae(SaeModel {
            w,
            lambda: num(lambda)?,
            train_loss: num(loss)?,
            iterations: 0,
        })),
        ["ridge", _, _, alpha] => Ok(Mapper::Ridge(RidgeModel { w, alpha: num(alpha)? })),
        _ => Err(ZslError::format(1, format!("unknown model header `{header}`"))),
    }
}
