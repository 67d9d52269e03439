//! Benchmark functions: nine invertible scalar maps used to validate learned
//! opposites against exact ones, and three 2-D optimization landscapes.

use core::f64::consts::{E, PI};
use core::fmt;
use core::str::FromStr;

// unused when std is linked somewhere in the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::opposition::{scheme_opposite, Bounds, OppositionScheme, RunningRange};

/// Identifier of an invertible scalar test function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestFunctionId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
    F9,
}

impl TestFunctionId {
    pub const ALL: [TestFunctionId; 9] = [
        Self::F1,
        Self::F2,
        Self::F3,
        Self::F4,
        Self::F5,
        Self::F6,
        Self::F7,
        Self::F8,
        Self::F9,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::F1 => "f1",
            Self::F2 => "f2",
            Self::F3 => "f3",
            Self::F4 => "f4",
            Self::F5 => "f5",
            Self::F6 => "f6",
            Self::F7 => "f7",
            Self::F8 => "f8",
            Self::F9 => "f9",
        }
    }

    pub fn formula(&self) -> &'static str {
        match self {
            Self::F1 => "(2x + 8)^3",
            Self::F2 => "ln(x + 3)",
            Self::F3 => "2x",
            Self::F4 => "x^2",
            Self::F5 => "sqrt(x)",
            Self::F6 => "x^(3/2)",
            Self::F7 => "x^3 + x^2 + 1",
            Self::F8 => "1/x",
            Self::F9 => "sqrt(x + 1) / 3",
        }
    }

    /// Default input domain, chosen so forward and inverse are single-valued.
    pub fn default_domain(&self) -> Bounds {
        let (lo, hi) = match self {
            Self::F1 => (0.0, 100.0),
            Self::F2 => (-2.9, 100.0),
            Self::F3 => (0.0, 500.0),
            Self::F4 => (0.0, 100.0),
            Self::F5 => (0.0, 1000.0),
            Self::F6 => (0.0, 100.0),
            Self::F7 => (0.0, 10.0),
            Self::F8 => (0.0, 100.0),
            Self::F9 => (-1.0, 1000.0),
        };
        Bounds::new(lo, hi).expect("default domains are valid")
    }

    /// Smallest admissible domain lower bound, and whether it is exclusive.
    fn lower_limit(&self) -> Option<(f64, bool)> {
        match self {
            Self::F1 | Self::F3 => None,
            Self::F2 => Some((-3.0, true)),
            Self::F4 | Self::F5 | Self::F6 | Self::F7 => Some((0.0, false)),
            Self::F8 => Some((0.0, false)),
            Self::F9 => Some((-1.0, false)),
        }
    }

    fn decreasing(&self) -> bool {
        matches!(self, Self::F8)
    }
}

impl fmt::Display for TestFunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An invertible test function restricted to a monotone domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    id: TestFunctionId,
    domain: Bounds,
}

/// The set of outputs reached from a domain; `hi` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Image {
    pub lo: f64,
    pub hi: f64,
}

impl Image {
    fn contains(&self, y: f64) -> bool {
        let slack = |v: f64| 1e-12 * v.abs().max(1.0);
        y >= self.lo - slack(self.lo) && y <= self.hi + slack(self.hi)
    }

    fn clamp(&self, y: f64) -> f64 {
        y.max(self.lo).min(self.hi)
    }
}

/// A ground-truth opposite; `flagged` marks values clamped into the image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrueOpposite {
    pub value: f64,
    pub flagged: bool,
}

impl TestFunction {
    pub fn new(id: TestFunctionId) -> Self {
        Self {
            id,
            domain: id.default_domain(),
        }
    }

    /// Restricts `id` to `domain`, rejecting domains where it is not monotone
    /// or not defined.
    pub fn with_domain(id: TestFunctionId, domain: Bounds) -> Result<Self> {
        if let Some((limit, exclusive)) = id.lower_limit() {
            let bad = if exclusive {
                domain.lo() <= limit
            } else {
                domain.lo() < limit
            };
            if bad {
                return Err(Error::Domain {
                    value: domain.lo(),
                    reason: "is below the lower limit where the function is invertible",
                });
            }
        }
        Ok(Self { id, domain })
    }

    pub fn id(&self) -> TestFunctionId {
        self.id
    }

    pub fn domain(&self) -> Bounds {
        self.domain
    }

    pub fn image(&self) -> Image {
        let lo = self.domain.lo();
        let hi = self.domain.hi();
        if self.id.decreasing() {
            let top = if lo == 0.0 { f64::INFINITY } else { forward(self.id, lo) };
            Image {
                lo: forward(self.id, hi),
                hi: top,
            }
        } else {
            Image {
                lo: forward(self.id, lo),
                hi: forward(self.id, hi),
            }
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !self.domain.contains(x) {
            return Err(Error::Domain {
                value: x,
                reason: "lies outside the function domain",
            });
        }
        match self.id {
            TestFunctionId::F8 if x == 0.0 => Err(Error::Pole(x)),
            TestFunctionId::F2 if x <= -3.0 => Err(Error::Domain {
                value: x,
                reason: "must exceed -3 for ln(x + 3)",
            }),
            id => Ok(forward(id, x)),
        }
    }

    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !y.is_finite() || !self.image().contains(y) {
            return Err(Error::Domain {
                value: y,
                reason: "lies outside the forward image of the domain",
            });
        }
        match self.id {
            TestFunctionId::F1 => Ok((y.cbrt() - 8.0) / 2.0),
            TestFunctionId::F2 => Ok(y.exp() - 3.0),
            TestFunctionId::F3 => Ok(y / 2.0),
            TestFunctionId::F4 => Ok(y.max(0.0).sqrt()),
            TestFunctionId::F5 => Ok(y * y),
            TestFunctionId::F6 => Ok(y.max(0.0).powf(2.0 / 3.0)),
            TestFunctionId::F7 => f7_inverse(y),
            TestFunctionId::F8 => Ok(1.0 / y),
            TestFunctionId::F9 => Ok(9.0 * y * y - 1.0),
        }
    }

    /// `f^-1(opp(f(x)))`, clamping the opposite output into the image when needed.
    pub fn true_opposite(&self, x: f64, scheme: OppositionScheme, y_range: &RunningRange) -> Result<TrueOpposite> {
        let y = self.eval(x)?;
        let opposite = scheme_opposite(y, scheme, y_range)?;
        let image = self.image();
        let (target, flagged) = if image.contains(opposite) {
            (opposite, false)
        } else {
            (image.clamp(opposite), true)
        };
        Ok(TrueOpposite {
            value: self.inverse(target)?,
            flagged,
        })
    }
}

fn forward(id: TestFunctionId, x: f64) -> f64 {
    match id {
        TestFunctionId::F1 => {
            let t = 2.0 * x + 8.0;
            t * t * t
        }
        TestFunctionId::F2 => (x + 3.0).ln(),
        TestFunctionId::F3 => 2.0 * x,
        TestFunctionId::F4 => x * x,
        TestFunctionId::F5 => x.sqrt(),
        TestFunctionId::F6 => x.powf(1.5),
        TestFunctionId::F7 => x * x * x + x * x + 1.0,
        TestFunctionId::F8 => 1.0 / x,
        TestFunctionId::F9 => (x + 1.0).sqrt() / 3.0,
    }
}

/// Real root of `x^3 + x^2 + 1 = y` on `x >= 0`.
///
/// For `y > 31/27` this is Cardano's closed form
///
/// ```text
/// u = (y/2 + sqrt((y/2 - 29/54)^2 - 1/729) - 29/54)^(1/3)
/// x = 1 / (9u) + u - 1/3
/// ```
///
/// with real cube roots. On `[1, 31/27]` the cubic has three real roots, the
/// radical is complex, and the largest root comes from the trigonometric form.
pub fn f7_inverse(y: f64) -> Result<f64> {
    let h = y / 2.0 - 29.0 / 54.0;
    let radicand = h * h - 1.0 / 729.0;
    let x = if h > 0.0 && radicand > 0.0 {
        let u = (y / 2.0 + radicand.sqrt() - 29.0 / 54.0).cbrt();
        1.0 / (9.0 * u) + u - 1.0 / 3.0
    } else {
        // depressed cubic t^3 - t/3 + q = 0 with x = t - 1/3, q = 29/27 - y
        let q = 29.0 / 27.0 - y;
        let arg = (-13.5 * q).clamp(-1.0, 1.0);
        2.0 / 3.0 * (arg.acos() / 3.0).cos() - 1.0 / 3.0
    };
    let residual = (x * x * x + x * x + 1.0 - y).abs();
    if !x.is_finite() || residual >= 1e-6 * y.abs().max(1.0) {
        return Err(Error::Inversion { y, residual });
    }
    Ok(x)
}

/// Identifier of a 2-D optimization landscape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptFunctionId {
    Ackley,
    Booth,
    Bukin4,
}

impl OptFunctionId {
    pub const ALL: [OptFunctionId; 3] = [Self::Ackley, Self::Booth, Self::Bukin4];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ackley => "ackley",
            Self::Booth => "booth",
            Self::Bukin4 => "bukin4",
        }
    }
}

impl fmt::Display for OptFunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptFunction {
    id: OptFunctionId,
    domain: [Bounds; 2],
}

impl OptFunction {
    pub fn new(id: OptFunctionId) -> Self {
        let b = |lo, hi| Bounds::new(lo, hi).expect("static domain");
        let domain = match id {
            OptFunctionId::Ackley => [b(-35.0, 35.0), b(-35.0, 35.0)],
            OptFunctionId::Booth => [b(-10.0, 10.0), b(-10.0, 10.0)],
            OptFunctionId::Bukin4 => [b(-15.0, -5.0), b(-3.0, 3.0)],
        };
        Self { id, domain }
    }

    pub fn id(&self) -> OptFunctionId {
        self.id
    }

    pub fn domain(&self) -> [Bounds; 2] {
        self.domain
    }

    pub fn contains(&self, x1: f64, x2: f64) -> bool {
        self.domain[0].contains(x1) && self.domain[1].contains(x2)
    }

    pub fn clamp(&self, x: [f64; 2]) -> [f64; 2] {
        [self.domain[0].clamp(x[0]), self.domain[1].clamp(x[1])]
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        match self.id {
            OptFunctionId::Ackley => {
                let radial = (0.5 * (x1 * x1 + x2 * x2)).sqrt();
                let cosines = 0.5 * ((2.0 * PI * x1).cos() + (2.0 * PI * x2).cos());
                20.0 * (1.0 - (-0.2 * radial).exp()) - cosines.exp() + E
            }
            OptFunctionId::Booth => {
                let a = x1 + 2.0 * x2 - 7.0;
                let b = 2.0 * x1 + x2 - 5.0;
                a * a + b * b
            }
            OptFunctionId::Bukin4 => {
                100.0 * (x2 - 0.01 * x1 * x1).abs().sqrt() + 0.01 * (x1 + 10.0).abs()
            }
        }
    }
}

/// Any benchmark addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionId {
    Test(TestFunctionId),
    Opt(OptFunctionId),
}

impl FunctionId {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Test(id) => id.as_str(),
            Self::Opt(id) => id.as_str(),
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim();
        for id in TestFunctionId::ALL {
            if lower.eq_ignore_ascii_case(id.as_str()) {
                return Ok(Self::Test(id));
            }
        }
        for id in OptFunctionId::ALL {
            if lower.eq_ignore_ascii_case(id.as_str()) {
                return Ok(Self::Opt(id));
            }
        }
        Err(Error::Config(alloc::format!(
            "unknown function '{s}', expected f1..f9, ackley, booth or bukin4"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(id: TestFunctionId) -> TestFunction {
        TestFunction::new(id)
    }

    /// Bisection for an increasing function on `[lo, hi]`.
    fn bisect(g: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn forward_examples() {
        assert_eq!(f(TestFunctionId::F1).eval(0.0).unwrap(), 512.0);
        assert_eq!(f(TestFunctionId::F3).eval(7.0).unwrap(), 14.0);
        assert_eq!(f(TestFunctionId::F7).eval(1.0).unwrap(), 3.0);
    }

    #[test]
    fn forward_errors() {
        assert_eq!(f(TestFunctionId::F8).eval(0.0), Err(Error::Pole(0.0)));
        let wide = TestFunction::with_domain(TestFunctionId::F2, Bounds::new(-3.0, 1.0).unwrap());
        assert!(wide.is_err());
        assert!(f(TestFunctionId::F4).eval(-1.0).is_err());
        assert!(TestFunction::with_domain(TestFunctionId::F4, Bounds::new(-1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert!(f(TestFunctionId::F1).inverse(512.0).unwrap().abs() < 1e-12);
        assert!((f(TestFunctionId::F8).inverse(0.25).unwrap() - 4.0).abs() < 1e-15);
        let x = f(TestFunctionId::F7).inverse(3.0).unwrap();
        let oracle = bisect(|x| x * x * x + x * x + 1.0, 3.0, 0.0, 10.0);
        assert!((oracle - 1.0).abs() < 1e-12);
        assert!((x - oracle).abs() < 1e-9);
    }

    #[test]
    fn f7_inverse_agrees_with_bisection_across_branches() {
        // includes the three-real-root band 1 < y < 31/27
        for y in [1.0, 1.0001, 1.05, 1.148, 31.0 / 27.0, 1.2, 2.0, 50.0, 1101.0] {
            let x = f7_inverse(y).unwrap();
            let oracle = bisect(|x| x * x * x + x * x + 1.0, y, 0.0, 10.0);
            assert!((x - oracle).abs() < 1e-7, "y={y}: {x} vs {oracle}");
        }
    }

    #[test]
    fn inverse_rejects_outside_image() {
        assert!(f(TestFunctionId::F5).inverse(-1.0).is_err());
        assert!(f(TestFunctionId::F1).inverse(1e12).is_err());
        assert!(f(TestFunctionId::F8).inverse(0.001).is_err());
    }

    #[test]
    fn true_opposite_examples() {
        let f3 = TestFunction::with_domain(TestFunctionId::F3, Bounds::new(0.0, 10.0).unwrap()).unwrap();
        let range = RunningRange::from_values([0.0, 20.0]).unwrap();
        let o = f3.true_opposite(3.0, OppositionScheme::T1, &range).unwrap();
        assert_eq!(o, TrueOpposite { value: 7.0, flagged: false });

        let f4 = TestFunction::with_domain(TestFunctionId::F4, Bounds::new(0.0, 10.0).unwrap()).unwrap();
        let range = RunningRange::from_values([0.0, 100.0]).unwrap();
        assert_eq!(f4.true_opposite(0.0, OppositionScheme::T1, &range).unwrap().value, 10.0);
        let o = f4.true_opposite(6.0, OppositionScheme::T1, &range).unwrap();
        let oracle = bisect(|x| x * x, 64.0, 0.0, 10.0);
        assert!((o.value - 8.0).abs() < 1e-12 && (o.value - oracle).abs() < 1e-9);
    }

    #[test]
    fn true_opposite_clamps_and_flags() {
        let f5 = TestFunction::with_domain(TestFunctionId::F5, Bounds::new(0.0, 100.0).unwrap()).unwrap();
        // range wider than the image: opp(0) = 20 > sqrt(100)
        let range = RunningRange::from_values([0.0, 20.0]).unwrap();
        let o = f5.true_opposite(0.0, OppositionScheme::T1, &range).unwrap();
        assert!(o.flagged);
        assert_eq!(o.value, 100.0);
    }

    #[test]
    fn opt_examples() {
        let booth = OptFunction::new(OptFunctionId::Booth);
        assert_eq!(booth.eval(1.0, 3.0), 0.0);
        let ackley = OptFunction::new(OptFunctionId::Ackley);
        assert!(ackley.eval(0.0, 0.0).abs() < 1e-12);
        // hand evaluation at (1, 0): 20(1 - e^{-0.2 sqrt(0.5)}) - e^{1} + e
        let expected = 20.0 * (1.0 - (-0.2 * 0.5f64.sqrt()).exp());
        assert!((ackley.eval(1.0, 0.0) - expected).abs() < 1e-12);
        let bukin = OptFunction::new(OptFunctionId::Bukin4);
        assert!(bukin.eval(-10.0, 1.0).abs() < 1e-12);
        // the often-quoted minimiser (-10, 0) is not a zero of this form
        assert!((bukin.eval(-10.0, 0.0) - 100.0).abs() < 1e-12);
    }

    #[test]
    fn registry_parses_names() {
        assert_eq!("f7".parse::<FunctionId>().unwrap(), FunctionId::Test(TestFunctionId::F7));
        assert_eq!("Bukin4".parse::<FunctionId>().unwrap(), FunctionId::Opt(OptFunctionId::Bukin4));
        assert!("f10".parse::<FunctionId>().is_err());
    }

    #[test]
    fn images_of_default_domains() {
        let img = f(TestFunctionId::F8).image();
        assert_eq!(img.lo, 0.01);
        assert!(img.hi.is_infinite());
        let img = f(TestFunctionId::F2).image();
        assert!((img.lo - 0.1f64.ln()).abs() < 1e-15);
    }
}
