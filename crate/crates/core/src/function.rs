use crate::error::Result;
use crate::kernels::Point;

/// A real-valued function on points whose evaluation may fail, e.g. when
/// the point lies outside the function's domain.
pub trait RealFunction: Sync {
    fn eval(&self, x: &Point) -> Result<f64>;
}

impl<F> RealFunction for F
where
    F: Fn(&Point) -> f64 + Sync,
{
    fn eval(&self, x: &Point) -> Result<f64> {
        Ok(self(x))
    }
}

/// Evaluate `f` at every point, stopping at the first failure.
pub fn eval_all<F: RealFunction + ?Sized>(f: &F, pts: &[Point]) -> Result<Vec<f64>> {
    pts.iter().map(|x| f.eval(x)).collect()
}
