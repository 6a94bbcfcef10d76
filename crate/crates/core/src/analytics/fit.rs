use std::collections::BTreeMap;

use serde::Serialize;

use super::{AnalyticsError, Scalar};
use crate::timeseries::Sample;

/// Outside temperature paired with zone energy on a common interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignedSeries<T> {
    /// `(temperature, energy)` per bucket, in time order.
    pub pairs: Vec<(T, T)>,
    /// Start timestamp of each bucket, parallel to `pairs`.
    pub buckets: Vec<i64>,
    pub interval: i64,
}

impl<T: Scalar> AlignedSeries<T> {
    pub fn from_pairs(pairs: Vec<(T, T)>) -> Self {
        let buckets = (0..pairs.len() as i64).collect();
        AlignedSeries {
            pairs,
            buckets,
            interval: 1,
        }
    }

    pub fn count(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn temperatures(&self) -> impl Iterator<Item = T> + '_ {
        self.pairs.iter().map(|p| p.0)
    }
}

pub(crate) fn cast<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 converts to any float")
}

/// Buckets both streams by `floor(t / interval)`: mean temperature and summed
/// energy per bucket, keeping only buckets present in both.
pub fn align<T: Scalar>(temp: &[Sample], energy: &[Sample], interval: i64) -> Result<AlignedSeries<T>, AnalyticsError> {
    if interval <= 0 {
        return Err(AnalyticsError::InvalidInterval(interval));
    }
    let mut temps: BTreeMap<i64, (T, usize)> = BTreeMap::new();
    for s in temp {
        let e = temps.entry(s.timestamp.div_euclid(interval)).or_insert((T::zero(), 0));
        e.0 = e.0 + cast(s.value);
        e.1 += 1;
    }
    let mut energies: BTreeMap<i64, T> = BTreeMap::new();
    for s in energy {
        let e = energies.entry(s.timestamp.div_euclid(interval)).or_insert_with(T::zero);
        *e = *e + cast(s.value);
    }
    let mut out = AlignedSeries {
        pairs: Vec::new(),
        buckets: Vec::new(),
        interval,
    };
    for (bucket, (sum, n)) in temps {
        if let Some(&e) = energies.get(&bucket) {
            out.pairs.push((sum / cast(n as f64), e));
            out.buckets.push(bucket * interval);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaselineModel<T> {
    Linear {
        intercept: T,
        slope: T,
        /// Standard errors; absent with fewer than three points.
        intercept_se: Option<T>,
        slope_se: Option<T>,
    },
    /// `base_load + cooling_slope * max(0, t - breakpoint_temp)`.
    Changepoint {
        base_load: T,
        breakpoint_temp: T,
        cooling_slope: T,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaselineFit<T> {
    #[serde(flatten)]
    pub model: BaselineModel<T>,
    pub sse: T,
    pub r_squared: T,
    pub n: usize,
}

impl<T: Scalar> BaselineFit<T> {
    pub fn predict(&self, t: T) -> T {
        match self.model {
            BaselineModel::Linear { intercept, slope, .. } => intercept + slope * t,
            BaselineModel::Changepoint {
                base_load,
                breakpoint_temp,
                cooling_slope,
            } => base_load + cooling_slope * (t - breakpoint_temp).max(T::zero()),
        }
    }

    pub fn slope(&self) -> T {
        match self.model {
            BaselineModel::Linear { slope, .. } => slope,
            BaselineModel::Changepoint { cooling_slope, .. } => cooling_slope,
        }
    }
}

struct Ols<T> {
    intercept: T,
    slope: T,
    sse: T,
    sxx: T,
    mean_x: T,
}

/// Least squares of `y` on `x` using centered sums. With `sxx == 0` the slope
/// is zero and the intercept is the mean of `y`.
fn ols<T: Scalar>(xs: &[T], ys: &[T]) -> Ols<T> {
    let n: T = cast(xs.len() as f64);
    let mean_x = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let mean_y = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * (y - mean_y);
    }
    let slope = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    let intercept = mean_y - slope * mean_x;
    let sse = xs.iter().zip(ys).fold(T::zero(), |a, (&x, &y)| {
        let r = y - intercept - slope * x;
        a + r * r
    });
    Ols {
        intercept,
        slope,
        sse,
        sxx,
        mean_x,
    }
}

fn total_ss<T: Scalar>(ys: &[T]) -> T {
    let n: T = cast(ys.len() as f64);
    let mean = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    ys.iter().fold(T::zero(), |a, &y| a + (y - mean) * (y - mean))
}

/// `1 - sse/sst`, clamped to `[0, 1]`; 1 when the energy has no variance.
fn r_squared<T: Scalar>(sse: T, sst: T) -> T {
    if sst <= T::zero() {
        return T::one();
    }
    (T::one() - sse / sst).max(T::zero()).min(T::one())
}

fn split<T: Scalar>(s: &AlignedSeries<T>) -> (Vec<T>, Vec<T>) {
    s.pairs.iter().copied().unzip()
}

fn check_spread<T: Scalar>(xs: &[T], min_n: usize) -> Result<(), AnalyticsError> {
    if xs.len() < min_n {
        return Err(AnalyticsError::DegenerateInput(format!(
            "{} aligned points, at least {min_n} required",
            xs.len()
        )));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(AnalyticsError::DegenerateInput("non-finite temperature".into()));
    }
    let first = xs[0];
    if xs.iter().all(|&x| x == first) {
        return Err(AnalyticsError::DegenerateInput("temperature is constant".into()));
    }
    Ok(())
}

/// Ordinary least squares `energy = intercept + slope * temperature`.
pub fn fit_linear<T: Scalar>(s: &AlignedSeries<T>) -> Result<BaselineFit<T>, AnalyticsError> {
    let (xs, ys) = split(s);
    check_spread(&xs, 2)?;
    let fit = ols(&xs, &ys);
    let n = xs.len();
    let (intercept_se, slope_se) = if n > 2 {
        let sigma2 = fit.sse / cast((n - 2) as f64);
        let nt: T = cast(n as f64);
        let slope_se = (sigma2 / fit.sxx).sqrt();
        let intercept_se = (sigma2 * (T::one() / nt + fit.mean_x * fit.mean_x / fit.sxx)).sqrt();
        (Some(intercept_se), Some(slope_se))
    } else {
        (None, None)
    };
    Ok(BaselineFit {
        model: BaselineModel::Linear {
            intercept: fit.intercept,
            slope: fit.slope,
            intercept_se,
            slope_se,
        },
        sse: fit.sse,
        r_squared: r_squared(fit.sse, total_ss(&ys)),
        n,
    })
}

/// Upper bound on breakpoint candidates per fit.
pub const MAX_GRID_POINTS: usize = 1_000_000;

/// Breakpoint candidates `min t + k * step` up to `max t`.
pub fn breakpoint_grid<T: Scalar>(tmin: T, tmax: T, step: T) -> Result<Vec<T>, AnalyticsError> {
    if step <= T::zero() || !step.is_finite() {
        return Err(AnalyticsError::InvalidGrid);
    }
    let span = ((tmax - tmin) / step).to_f64().unwrap_or(f64::INFINITY);
    // Absorb rounding so a grid point landing on max t is kept.
    let steps = (span + 1e-9).floor();
    if !steps.is_finite() || steps >= MAX_GRID_POINTS as f64 {
        return Err(AnalyticsError::InvalidGrid);
    }
    Ok((0..=steps as usize).map(|k| tmin + step * cast(k as f64)).collect())
}

/// Three-parameter cooling change-point model, breakpoint searched on a grid
/// with the other two parameters solved by least squares. Ties go to the
/// lowest breakpoint.
pub fn fit_changepoint<T: Scalar>(s: &AlignedSeries<T>, grid: T) -> Result<BaselineFit<T>, AnalyticsError> {
    let (xs, ys) = split(s);
    check_spread(&xs, 4)?;
    let tmin = xs.iter().copied().fold(T::infinity(), T::min);
    let tmax = xs.iter().copied().fold(T::neg_infinity(), T::max);
    let sst = total_ss(&ys);
    let tol = T::epsilon() * cast(64.0) * sst;

    let mut best: Option<(T, Ols<T>)> = None;
    let mut hinge = vec![T::zero(); xs.len()];
    for bp in breakpoint_grid(tmin, tmax, grid)? {
        for (h, &x) in hinge.iter_mut().zip(&xs) {
            *h = (x - bp).max(T::zero());
        }
        let fit = ols(&hinge, &ys);
        let better = match &best {
            None => true,
            Some((_, b)) => fit.sse < b.sse - tol,
        };
        if better {
            best = Some((bp, fit));
        }
    }
    let (bp, fit) = best.expect("grid has at least one point");
    Ok(BaselineFit {
        model: BaselineModel::Changepoint {
            base_load: fit.intercept,
            breakpoint_temp: bp,
            cooling_slope: fit.slope,
        },
        sse: fit.sse,
        r_squared: r_squared(fit.sse, sst),
        n: xs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(points: &[(f64, f64)]) -> AlignedSeries<f64> {
        AlignedSeries::from_pairs(points.to_vec())
    }

    #[test]
    fn single_bucket() {
        let temp = [Sample::new("t", 0, 20.0), Sample::new("t", 30, 22.0)];
        let energy = [Sample::new("e", 10, 5.0)];
        let a: AlignedSeries<f64> = align(&temp, &energy, 60).unwrap();
        assert_eq!(a.pairs, vec![(21.0, 5.0)]);
        assert_eq!(a.buckets, vec![0]);
        let disjoint = [Sample::new("e", 600, 5.0)];
        assert!(align::<f64>(&temp, &disjoint, 60).unwrap().is_empty());
        assert_eq!(align::<f64>(&temp, &energy, 0), Err(AnalyticsError::InvalidInterval(0)));
    }

    #[test]
    fn exact_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 2.0 + 0.5 * i as f64)).collect();
        let f = fit_linear(&series(&pts)).unwrap();
        match f.model {
            BaselineModel::Linear { intercept, slope, .. } => {
                assert!((intercept - 2.0).abs() < 1e-9);
                assert!((slope - 0.5).abs() < 1e-9);
            }
            _ => unreachable!(),
        }
        assert!(f.sse < 1e-9);
        assert!((f.r_squared - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_energy() {
        let f = fit_linear(&series(&[(1.0, 4.0), (2.0, 4.0), (3.0, 4.0)])).unwrap();
        assert_eq!(f.slope(), 0.0);
        assert_eq!(f.sse, 0.0);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            fit_linear(&series(&[(1.0, 2.0)])),
            Err(AnalyticsError::DegenerateInput(_))
        ));
        assert!(matches!(
            fit_linear(&series(&[(1.0, 2.0), (1.0, 3.0)])),
            Err(AnalyticsError::DegenerateInput(_))
        ));
        assert!(matches!(
            fit_changepoint(&series(&[(1.0, 2.0), (2.0, 3.0), (3.0, 3.0)]), 0.5),
            Err(AnalyticsError::DegenerateInput(_))
        ));
        let ok = series(&[(1.0, 2.0), (2.0, 3.0), (3.0, 3.0), (4.0, 1.0)]);
        assert_eq!(fit_changepoint(&ok, 0.0), Err(AnalyticsError::InvalidGrid));
    }

    #[test]
    fn changepoint_recovery() {
        let pts: Vec<(f64, f64)> = (0..=40)
            .map(|i| {
                let t = 10.0 + 0.5 * i as f64;
                (t, 3.0 + 0.8 * (t - 18.0).max(0.0))
            })
            .collect();
        let f = fit_changepoint(&series(&pts), 0.5).unwrap();
        let BaselineModel::Changepoint {
            base_load,
            breakpoint_temp,
            cooling_slope,
        } = f.model
        else {
            panic!("expected a change-point model")
        };
        assert_eq!(breakpoint_temp, 18.0);
        assert!((base_load - 3.0).abs() < 1e-9);
        assert!((cooling_slope - 0.8).abs() < 1e-9);
        assert!(f.sse < 1e-9);
    }

    #[test]
    fn changepoint_nests_linear() {
        let pts: Vec<(f64, f64)> = (0..20)
            .map(|i| (i as f64 * 0.7, 1.0 + 0.3 * i as f64 + (i % 3) as f64 * 0.1))
            .collect();
        let s = series(&pts);
        let lin = fit_linear(&s).unwrap();
        let cp = fit_changepoint(&s, 0.25).unwrap();
        assert!(cp.sse <= lin.sse + 1e-9);
    }

    #[test]
    fn works_in_single_precision() {
        let pts: Vec<(f32, f32)> = (0..10).map(|i| (i as f32, 1.0 + 2.0 * i as f32)).collect();
        let f = fit_linear(&AlignedSeries::from_pairs(pts)).unwrap();
        assert!((f.slope() - 2.0).abs() < 1e-4);
    }

    #[test]
    fn grid_includes_endpoint() {
        let g = breakpoint_grid(10.0, 12.0, 0.5).unwrap();
        assert_eq!(g, vec![10.0, 10.5, 11.0, 11.5, 12.0]);
        let g = breakpoint_grid(0.0, 0.3, 0.1).unwrap();
        assert_eq!(g.len(), 4);
    }
}
