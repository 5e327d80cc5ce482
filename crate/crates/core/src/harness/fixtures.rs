use crate::bandlimited::SincExpansion;
use crate::error::{Error, Result};
use crate::numerics::{binomial, scaled_gaussian, Envelope, RealFunction};

/// A corpus function with its smoothness tags.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub f: RealFunction,
    /// Carries exact derivatives and is used in the smooth-only checks.
    pub smooth: bool,
    /// Exponential type, when `f` is entire of finite type.
    pub exp_type: Option<f64>,
}

pub const FIXTURE_NAMES: [&str; 6] = ["gaussian", "bump", "indicator", "sinc1", "sinc2", "exponential"];

fn sinc_fixture(name: &'static str, sigma: f64, first: i64) -> Fixture {
    let c: Vec<f64> = (0..=6).map(|i| binomial(6, i) / 64.0).collect();
    let g = SincExpansion::new(sigma, first, c).expect("valid fixture coefficients");
    Fixture {
        name,
        f: g.to_function(name, 3),
        smooth: true,
        exp_type: Some(sigma),
    }
}

impl Fixture {
    pub fn by_name(name: &str) -> Result<Fixture> {
        Ok(match name {
            "gaussian" => Fixture {
                name: "gaussian",
                f: scaled_gaussian(1.0, "gaussian"),
                smooth: true,
                exp_type: None,
            },
            "bump" => {
                let inside = |x: f64| x.abs() < 1.0;
                let d1 = RealFunction::new("bump'", Envelope::compact(-1.0, 1.0), move |x| {
                    if inside(x) {
                        -4.0 * x * (1.0 - x * x)
                    } else {
                        0.0
                    }
                })
                .with_breakpoints(vec![-1.0, 1.0]);
                let d2 = RealFunction::new("bump''", Envelope::compact(-1.0, 1.0), move |x| {
                    if inside(x) {
                        12.0 * x * x - 4.0
                    } else {
                        0.0
                    }
                })
                .with_breakpoints(vec![-1.0, 1.0]);
                let f = RealFunction::new("bump", Envelope::compact(-1.0, 1.0), move |x| {
                    if inside(x) {
                        (1.0 - x * x).powi(2)
                    } else {
                        0.0
                    }
                })
                .with_breakpoints(vec![-1.0, 1.0])
                .with_derivatives(vec![d1, d2]);
                Fixture {
                    name: "bump",
                    f,
                    smooth: true,
                    exp_type: None,
                }
            }
            "indicator" => Fixture {
                name: "indicator",
                f: RealFunction::new("indicator", Envelope::compact(0.0, 1.0), |x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 })
                    .with_breakpoints(vec![0.0, 1.0]),
                smooth: false,
                exp_type: None,
            },
            "sinc1" => sinc_fixture("sinc1", 1.0, -3),
            "sinc2" => sinc_fixture("sinc2", 2.0, -2),
            "exponential" => {
                let d1 = RealFunction::new("exponential'", Envelope::exponential(1.0, 1.0), |x: f64| -x.signum() * (-x.abs()).exp())
                    .with_breakpoints(vec![0.0]);
                Fixture {
                    name: "exponential",
                    f: RealFunction::new("exponential", Envelope::exponential(1.0, 1.0), |x: f64| (-x.abs()).exp())
                        .with_breakpoints(vec![0.0])
                        .with_derivatives(vec![d1]),
                    smooth: false,
                    exp_type: None,
                }
            }
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown fixture `{other}`; expected one of {}",
                    FIXTURE_NAMES.join(", ")
                )))
            }
        })
    }

    /// The six-function corpus in a fixed order.
    pub fn corpus() -> Vec<Fixture> {
        FIXTURE_NAMES.iter().map(|n| Fixture::by_name(n).unwrap()).collect()
    }
}
