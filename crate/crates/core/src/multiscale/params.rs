use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Exact;

/// Constants of the multi-scale argument at scale length `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleParams<E> {
    pub r: usize,
    pub eps: E,
    pub c_in: E,
    pub c_out: E,
    pub lambda: E,
    pub alpha: E,
    /// Seed-free cylinder widening factor `(6+ε)(1+α)α²(c_out/c_in)·max{λ, 1/λ}`.
    pub beta: E,
    /// Pruning depth factor `⌈ε + 4·max{1,λ}·c_out²/c_in² + 1⌉`.
    pub eta: i64,
    pub flags: ScaleFlags,
}

/// Which of the side constraints on the constants hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleFlags {
    /// `c_in < 1 < c_out`.
    pub ordered: bool,
    /// `0 < ε < 1`.
    pub eps_in_unit: bool,
    /// `c_out > α·max{λ, 1/λ}`.
    pub outer_rate: bool,
    /// `ε < min{1/α, (2α·c_out·max{1,λ})^-2}`.
    pub eps_small: bool,
}

impl ScaleFlags {
    pub fn strict(&self) -> bool {
        self.ordered && self.eps_in_unit && self.outer_rate && self.eps_small
    }
}

fn lambda_spread<E: Exact>(lambda: &E) -> E {
    E::max_of(lambda.clone(), E::one() / lambda.clone())
}

pub fn beta<E: Exact>(eps: &E, c_in: &E, c_out: &E, lambda: &E, alpha: &E) -> E {
    let six = E::from_i64(6).expect("small integer");
    (six + eps.clone())
        * (E::one() + alpha.clone())
        * alpha.clone()
        * alpha.clone()
        * (c_out.clone() / c_in.clone())
        * lambda_spread(lambda)
}

pub fn eta<E: Exact>(eps: &E, c_in: &E, c_out: &E, lambda: &E) -> i64 {
    let four = E::from_i64(4).expect("small integer");
    let fast = E::max_of(E::one(), lambda.clone());
    let v = eps.clone()
        + four * fast * c_out.clone() * c_out.clone() / (c_in.clone() * c_in.clone())
        + E::one();
    v.ceil_to_i64()
}

/// Derives `β`, `η` and the constraint flags. Violated side constraints are
/// reported, not rejected; only non-positive inputs are errors.
pub fn derive_scale_params<E: Exact>(
    r: usize,
    eps: E,
    c_in: E,
    c_out: E,
    lambda: E,
    alpha: E,
) -> Result<ScaleParams<E>> {
    if r == 0 {
        return Err(Error::Parameter("scale length r must be positive".into()));
    }
    for (name, v) in [("c_in", &c_in), ("c_out", &c_out), ("lambda", &lambda)] {
        if !(*v > E::zero()) {
            return Err(Error::Parameter(format!(
                "{name} must be positive, got {v:?}"
            )));
        }
    }
    if eps < E::zero() {
        return Err(Error::Parameter(format!(
            "epsilon must be non-negative, got {eps:?}"
        )));
    }
    if alpha < E::one() {
        return Err(Error::Parameter(format!(
            "alpha must be at least 1, got {alpha:?}"
        )));
    }
    let beta = beta(&eps, &c_in, &c_out, &lambda, &alpha);
    let eta = eta(&eps, &c_in, &c_out, &lambda);
    let two = E::from_i64(2).expect("small integer");
    let k = two * alpha.clone() * c_out.clone() * E::max_of(E::one(), lambda.clone());
    let flags = ScaleFlags {
        ordered: c_in < E::one() && E::one() < c_out,
        eps_in_unit: eps > E::zero() && eps < E::one(),
        outer_rate: c_out > alpha.clone() * lambda_spread(&lambda),
        eps_small: eps < E::min_of(E::one() / alpha.clone(), E::one() / (k.clone() * k)),
    };
    Ok(ScaleParams {
        r,
        eps,
        c_in,
        c_out,
        lambda,
        alpha,
        beta,
        eta,
        flags,
    })
}

impl<E: Exact> ScaleParams<E> {
    /// Number of generations pruned above a bad cylinder at scale `j`:
    /// `⌈3α²ηj⌉`.
    pub fn prune_shift(&self, j: usize) -> usize {
        let three = E::from_i64(3).expect("small integer");
        let j = E::from_usize(j).expect("scale fits");
        let eta = E::from_i64(self.eta).expect("eta fits");
        let v = three * self.alpha.clone() * self.alpha.clone() * eta * j;
        v.ceil_to_i64().max(0) as usize
    }

    pub fn min_rate(&self) -> E {
        E::min_of(E::one(), self.lambda.clone())
    }

    pub fn max_rate(&self) -> E {
        E::max_of(E::one(), self.lambda.clone())
    }

    pub(crate) fn f(&self, v: &E) -> f64 {
        v.approx_f64()
    }
}
