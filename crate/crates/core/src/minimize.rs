//! Derivative-free scalar minimisation (Brent: golden section with
//! parabolic interpolation).

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BrentOptions {
    /// Stop when the bracketing interval is narrower than this.
    pub x_tol: f64,
    /// Stop when two successive interpolation steps each change the
    /// objective by less than `f_tol · |f|`.
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for BrentOptions {
    fn default() -> Self {
        BrentOptions {
            x_tol: 1e-10,
            f_tol: 1e-13,
            max_iter: 500,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub f: f64,
    pub iterations: usize,
}

const GOLDEN: f64 = 0.381_966_011_250_105_1; // (3 − √5)/2

/// Minimises a unimodal `f` on `[a, b]`.
///
/// Errors are propagated from `f`; a non-finite objective or exhausting
/// `max_iter` gives [`Error::Numeric`].
pub fn brent<F>(mut f: F, a: f64, b: f64, opts: &BrentOptions) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a < b) {
        return Err(Error::Numeric(format!("empty bracket [{a}, {b}]")));
    }
    let mut eval = |x: f64| -> Result<f64> {
        let y = f(x)?;
        if y.is_nan() {
            return Err(Error::Numeric(format!("objective is NaN at {x}")));
        }
        Ok(y)
    };

    let (mut lo, mut hi) = (a, b);
    let mut x = lo + GOLDEN * (hi - lo);
    let (mut w, mut v) = (x, x);
    let mut fx = eval(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    let mut stalled = 0;

    for iter in 1..=opts.max_iter {
        let mid = 0.5 * (lo + hi);
        let tol1 = opts.x_tol * 0.5 + f64::EPSILON * x.abs();
        let tol2 = 2.0 * tol1;
        if (hi - lo) <= opts.x_tol || (x - mid).abs() <= tol2 - 0.5 * (hi - lo) {
            return Ok(Minimum {
                x,
                f: fx,
                iterations: iter,
            });
        }

        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (lo - x) && p < q * (hi - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - lo < tol2 || hi - u < tol2 {
                    d = if mid >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= mid { lo - x } else { hi - x };
            d = GOLDEN * e;
        }

        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = eval(u)?;
        let flat = (fu - fx).abs() <= opts.f_tol * fx.abs();

        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }

        // two consecutive interpolation steps that cannot resolve the
        // objective count as converged
        if flat && !golden {
            stalled += 1;
            if stalled >= 2 {
                return Ok(Minimum {
                    x,
                    f: fx,
                    iterations: iter,
                });
            }
        } else {
            stalled = 0;
        }
    }
    Err(Error::Numeric(format!(
        "minimiser did not converge in {} iterations",
        opts.max_iter
    )))
}
