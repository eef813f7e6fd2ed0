//! The (p, lambda)-plane regularity classifier and its region geometry.
//!
//! For a query (n, b, s, p, lambda) the classifier reads off the regularity
//! of `D^s u` from the position of (p, lambda) relative to the threshold
//! lines `lambda = (n+2b) - (2b-s) p`: Morrey below the line for s, BMO on
//! it (VMO when lambda = 0), Hoelder between consecutive lines, and a
//! redirect verdict beyond the window where the information is carried by a
//! different derivative order.
//!
//! Threshold detection is exact: queries built from rationals (integers,
//! finite decimals, fractions) are compared in exact arithmetic, while
//! float-valued queries within 1e-12 of a threshold return the Boundary
//! verdict rather than fabricating the measure-zero borderline cases.

use std::fmt;
use std::path::Path;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

type Rat = Ratio<i64>;

/// A scalar that is exactly rational when the input admits it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Exact(Rat),
    Approx(f64),
}

impl Scalar {
    pub fn from_int(v: i64) -> Self {
        Scalar::Exact(Rat::from_integer(v))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Scalar::Exact(Rat::new(num, den)))
    }

    /// Parse "3", "-2", "3/2", or a finite decimal "1.25" into an exact
    /// rational; anything else that parses as f64 becomes approximate.
    pub fn parse(s: &str) -> Result<Scalar> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        if let Some((num, den)) = s.split_once('/') {
            let n: i64 = num
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad numerator {num:?}: {e}")))?;
            let d: i64 = den
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad denominator {den:?}: {e}")))?;
            return Scalar::from_ratio(n, d);
        }
        if let Ok(i) = s.parse::<i64>() {
            return Ok(Scalar::from_int(i));
        }
        // finite decimal -> exact
        if let Some((int_part, frac_part)) = s.split_once('.') {
            if frac_part.len() <= 12
                && !frac_part.is_empty()
                && frac_part.chars().all(|c| c.is_ascii_digit())
                && (int_part.is_empty()
                    || int_part == "-"
                    || int_part.parse::<i64>().is_ok())
            {
                let negative = int_part.starts_with('-');
                let whole: i64 = if int_part.is_empty() || int_part == "-" {
                    0
                } else {
                    int_part.parse().unwrap()
                };
                let digits: i64 = frac_part
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad decimal {s:?}: {e}")))?;
                let den = 10i64.checked_pow(frac_part.len() as u32).ok_or_else(|| {
                    Error::Parse(format!("decimal {s:?} has too many digits"))
                })?;
                let frac = Rat::new(digits, den);
                let val = if negative {
                    Rat::from_integer(whole) - frac
                } else {
                    Rat::from_integer(whole) + frac
                };
                return Ok(Scalar::Exact(val));
            }
        }
        let v: f64 = s
            .parse()
            .map_err(|e| Error::Parse(format!("cannot parse number {s:?}: {e}")))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("non-finite number {s:?}")));
        }
        Ok(Scalar::Approx(v))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Scalar::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Scalar::Approx(v) => v,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    fn as_exact(self) -> Option<Rat> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Approx(v) => write!(f, "{v}"),
        }
    }
}

/// Relative position of a scalar against an exact rational threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Position {
    Below,
    /// Exactly equal (exact inputs only).
    Equal,
    /// Within the float equality band of the threshold.
    Near,
    Above,
}

const FLOAT_BAND: f64 = 1e-12;

fn position(v: Scalar, threshold: Rat) -> Position {
    match v {
        Scalar::Exact(r) => {
            if r == threshold {
                Position::Equal
            } else if r < threshold {
                Position::Below
            } else {
                Position::Above
            }
        }
        Scalar::Approx(x) => {
            let t = *threshold.numer() as f64 / *threshold.denom() as f64;
            if (x - t).abs() <= FLOAT_BAND * t.abs().max(1.0) {
                Position::Near
            } else if x < t {
                Position::Below
            } else {
                Position::Above
            }
        }
    }
}

/// Classifier input.
#[derive(Debug, Clone)]
pub struct RegularityQuery {
    pub n: usize,
    pub b: usize,
    /// Derivative order the verdict concerns, 0 <= s <= 2b-1.
    pub s: usize,
    pub p: Scalar,
    /// lambda = 0 selects the Lebesgue-case corollaries.
    pub lambda: Scalar,
}

impl RegularityQuery {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!(
                "classifier requires n >= 2, got {}",
                self.n
            )));
        }
        if self.b < 1 {
            return Err(Error::InvalidArgument("need b >= 1".into()));
        }
        if self.s > 2 * self.b - 1 {
            return Err(Error::InvalidArgument(format!(
                "need s in 0..=2b-1, got s={} with b={}",
                self.s, self.b
            )));
        }
        let p = self.p.to_f64();
        if !(p > 1.0) {
            return Err(Error::InvalidArgument(format!("need p > 1, got {p}")));
        }
        let lambda = self.lambda.to_f64();
        let cap = (self.n + 2 * self.b) as f64;
        if !(0.0..cap).contains(&lambda) {
            return Err(Error::InvalidArgument(format!(
                "need lambda in [0, n+2b) = [0, {cap}), got {lambda}"
            )));
        }
        Ok(())
    }
}

/// The verdict for `D^s u`.
#[derive(Debug, Clone, PartialEq)]
pub enum RegularityClass {
    /// `D^s u` lies in the Morrey space with the stated exponent
    /// `(2b-s) p + lambda`.
    Morrey { p: Scalar, exponent: Scalar },
    Bmo,
    /// BMO with vanishing oscillation (lambda = 0 threshold case).
    Vmo,
    Holder { sigma: Scalar },
    EssentiallyBounded,
    /// The query lies outside the window for this s: the verdict names the
    /// derivative order whose window contains p.
    Boundary {
        detail: String,
        suggested_s: Option<usize>,
    },
}

impl fmt::Display for RegularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularityClass::Morrey { p, exponent } => {
                write!(f, "Morrey(p={p}, exponent={exponent})")
            }
            RegularityClass::Bmo => write!(f, "BMO"),
            RegularityClass::Vmo => write!(f, "VMO"),
            RegularityClass::Holder { sigma } => write!(f, "Hoelder(sigma={sigma})"),
            RegularityClass::EssentiallyBounded => write!(f, "EssentiallyBounded"),
            RegularityClass::Boundary { detail, .. } => write!(f, "Boundary({detail})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub class: RegularityClass,
    /// s = 0, lambda = 0, p > (n+2b)/2b additionally gives u essentially
    /// bounded.
    pub also_essentially_bounded: bool,
}

fn tau(n: usize, b: usize, lambda: Scalar, s: usize) -> Option<Rat> {
    // (n + 2b - lambda) / (2b - s); None when the denominator is 0
    let den = 2 * b as i64 - s as i64;
    if den <= 0 {
        return None;
    }
    let lam = lambda.as_exact()?;
    Some((Rat::from_integer((n + 2 * b) as i64) - lam) / Rat::from_integer(den))
}

fn tau_f64(n: usize, b: usize, lambda: f64, s: usize) -> f64 {
    ((n + 2 * b) as f64 - lambda) / (2 * b - s) as f64
}

/// Classify `D^s u` for the query. Exact inputs get exact threshold
/// comparisons; float inputs within the equality band return Boundary.
pub fn classify(q: &RegularityQuery) -> Result<Classification> {
    q.validate()?;
    let n = q.n;
    let b = q.b;
    let s = q.s;
    let lambda_is_zero = match q.lambda {
        Scalar::Exact(r) => r.is_zero(),
        Scalar::Approx(v) => v == 0.0,
    };

    // workable exact lambda: float lambda handled through the band logic
    let exact_pair = match (q.p, q.lambda.as_exact()) {
        (Scalar::Exact(p), Some(lam)) => Some((p, lam)),
        _ => None,
    };

    let pos_at = |level: usize| -> Position {
        if let Some((p, _lam)) = exact_pair {
            let t = tau(n, b, q.lambda, level).expect("level < 2b");
            position(Scalar::Exact(p), t)
        } else {
            let t = tau_f64(n, b, q.lambda.to_f64(), level);
            // reuse the float band against a float threshold
            let x = q.p.to_f64();
            if (x - t).abs() <= FLOAT_BAND * t.abs().max(1.0) {
                Position::Near
            } else if x < t {
                Position::Below
            } else {
                Position::Above
            }
        }
    };

    let also_bounded = s == 0 && lambda_is_zero && {
        match pos_at(0) {
            Position::Above => true,
            _ => false,
        }
    };

    let class = match pos_at(s) {
        Position::Below => {
            // Morrey exponent (2b - s) p + lambda
            let exponent = match (q.p, q.lambda) {
                (Scalar::Exact(p), Scalar::Exact(lam)) => {
                    Scalar::Exact(Rat::from_integer((2 * b - s) as i64) * p + lam)
                }
                _ => Scalar::Approx((2 * b - s) as f64 * q.p.to_f64() + q.lambda.to_f64()),
            };
            RegularityClass::Morrey { p: q.p, exponent }
        }
        Position::Equal => {
            if lambda_is_zero {
                RegularityClass::Vmo
            } else {
                RegularityClass::Bmo
            }
        }
        Position::Near => RegularityClass::Boundary {
            detail: format!(
                "p is within the float equality band of the threshold (n+2b-lambda)/(2b-s) = {}; \
                 pass p and lambda as exact rationals to resolve the borderline case",
                tau_f64(n, b, q.lambda.to_f64(), s)
            ),
            suggested_s: None,
        },
        Position::Above => {
            // inside the Hoelder window for s, or beyond it
            let beyond = if s == 2 * b - 1 {
                // footnote window: (n+2b-lambda, +infinity)
                Position::Below
            } else {
                pos_at(s + 1)
            };
            match beyond {
                Position::Below => {
                    let sigma = match (q.p, q.lambda) {
                        (Scalar::Exact(p), Scalar::Exact(lam)) => Scalar::Exact(
                            Rat::from_integer((2 * b - s) as i64)
                                - (Rat::from_integer((n + 2 * b) as i64) - lam) / p,
                        ),
                        _ => Scalar::Approx(
                            (2 * b - s) as f64
                                - ((n + 2 * b) as f64 - q.lambda.to_f64()) / q.p.to_f64(),
                        ),
                    };
                    RegularityClass::Holder { sigma }
                }
                Position::Equal | Position::Near | Position::Above => {
                    // p >= tau_{s+1}: the verdict belongs to a different s
                    let suggested = window_for_p(n, b, q.p, q.lambda);
                    let detail = match suggested {
                        Some(s2) => format!(
                            "p >= (n+2b-lambda)/(2b-s-1); the Hoelder window containing p \
                             belongs to s={s2}; re-query with that derivative order"
                        ),
                        None => "p >= (n+2b-lambda)/(2b-s-1); p lies on a threshold line; \
                                 adjacent derivative orders carry the BMO information"
                            .to_string(),
                    };
                    RegularityClass::Boundary {
                        detail,
                        suggested_s: suggested,
                    }
                }
            }
        }
    };
    Ok(Classification {
        class,
        also_essentially_bounded: also_bounded,
    })
}

/// The derivative order s whose open Hoelder window (tau_s, tau_{s+1})
/// contains p, if any.
fn window_for_p(n: usize, b: usize, p: Scalar, lambda: Scalar) -> Option<usize> {
    for s in 0..=(2 * b - 1) {
        let lo = tau_f64(n, b, lambda.to_f64(), s);
        let hi = if s == 2 * b - 1 {
            f64::INFINITY
        } else {
            tau_f64(n, b, lambda.to_f64(), s + 1)
        };
        let x = p.to_f64();
        if x > lo && x < hi {
            // for exact inputs reject exact boundary coincidences
            if let (Some(pr), Some(t)) = (p.as_exact(), tau(n, b, lambda, s)) {
                if pr == t {
                    continue;
                }
            }
            return Some(s);
        }
    }
    None
}

/// Vertices of the figure for derivative order s: `B_s` on the p-axis, the
/// point `A_s` on the line p = 1, and the common apex on the lambda-axis.
#[derive(Debug, Clone)]
pub struct RegionVertices {
    pub b_s: (Rat, Rat),
    pub a_s: (Rat, Rat),
    pub apex: (Rat, Rat),
}

pub fn region_vertices(n: usize, b: usize, s: usize) -> Result<RegionVertices> {
    if n < 2 || b < 1 || s > 2 * b - 1 {
        return Err(Error::InvalidArgument(format!(
            "invalid (n, b, s) = ({n}, {b}, {s})"
        )));
    }
    let b_s = (
        Rat::new((n + 2 * b) as i64, (2 * b - s) as i64),
        Rat::zero(),
    );
    let a_s = (Rat::one(), Rat::from_integer((n + s) as i64));
    let apex = (Rat::zero(), Rat::from_integer((n + 2 * b) as i64));
    // collinearity of apex, A_s, B_s is exact by construction; assert it
    let det = (a_s.0 - apex.0) * (b_s.1 - apex.1) - (a_s.1 - apex.1) * (b_s.0 - apex.0);
    debug_assert!(det.is_zero(), "collinearity failed: det = {det}");
    if !det.is_zero() {
        return Err(Error::Numerical("vertex collinearity violated".into()));
    }
    Ok(RegionVertices { b_s, a_s, apex })
}

/// Cell of the semistrip partition cut by the threshold lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FigureRegion {
    /// Below the lowest line: the open right triangle B B_0 A_0
    /// (Morrey regime for every derivative order).
    Triangle,
    /// On the open segment A_s B_s.
    Segment { s: usize },
    /// Strictly between the lines for s and s+1 (tetragon
    /// B_s B_{s+1} A_{s+1} A_s).
    Tetragon { s: usize },
    /// Above the top line: the unbounded region for s = 2b-1.
    Unbounded,
}

/// Locate (p, lambda) in the figure partition. Requires p > 1 and
/// 0 < lambda < n + 2b.
pub fn region_membership(
    p: Scalar,
    lambda: Scalar,
    n: usize,
    b: usize,
) -> Result<FigureRegion> {
    if n < 2 || b < 1 {
        return Err(Error::InvalidArgument("need n >= 2, b >= 1".into()));
    }
    if !(p.to_f64() > 1.0) {
        return Err(Error::InvalidArgument("region membership needs p > 1".into()));
    }
    let lam = lambda.to_f64();
    if !(lam > 0.0 && lam < (n + 2 * b) as f64) {
        return Err(Error::InvalidArgument(
            "region membership needs 0 < lambda < n+2b".into(),
        ));
    }
    // relative position against line s: lambda - [(n+2b) - (2b-s) p]
    let line_pos = |s: usize| -> Position {
        match (p.as_exact(), lambda.as_exact()) {
            (Some(pr), Some(lr)) => {
                let d = lr - (Rat::from_integer((n + 2 * b) as i64)
                    - Rat::from_integer((2 * b - s) as i64) * pr);
                if d.is_zero() {
                    Position::Equal
                } else if d.is_positive() {
                    Position::Above
                } else {
                    Position::Below
                }
            }
            _ => {
                let d = lam - ((n + 2 * b) as f64 - (2 * b - s) as f64 * p.to_f64());
                if d.abs() <= FLOAT_BAND * ((n + 2 * b) as f64) {
                    Position::Near
                } else if d > 0.0 {
                    Position::Above
                } else {
                    Position::Below
                }
            }
        }
    };
    // scan lines bottom (s=0) to top (s=2b-1)
    for s in 0..=(2 * b - 1) {
        match line_pos(s) {
            Position::Below => {
                return Ok(if s == 0 {
                    FigureRegion::Triangle
                } else {
                    FigureRegion::Tetragon { s: s - 1 }
                });
            }
            Position::Equal | Position::Near => {
                return Ok(FigureRegion::Segment { s });
            }
            Position::Above => {}
        }
    }
    Ok(FigureRegion::Unbounded)
}

/// The Hoelder exponent as the geometric length |C A_s|, where C is the
/// intersection of {p = 1} with the line through (p, lambda) and the apex
/// (0, n+2b).
pub fn sigma_from_geometry(p: Scalar, lambda: Scalar, n: usize, b: usize, s: usize) -> f64 {
    let apex = (n + 2 * b) as f64;
    let c_lambda = apex - (apex - lambda.to_f64()) / p.to_f64();
    c_lambda - (n + s) as f64
}

/// Write the region diagram as an SVG file plus a CSV of labelled vertices
/// with their defining formulas.
pub fn emit_diagram(n: usize, b: usize, svg_path: &Path, csv_path: &Path) -> Result<()> {
    if n < 2 || b < 1 {
        return Err(Error::InvalidArgument("need n >= 2, b >= 1".into()));
    }
    let apex = (n + 2 * b) as f64;
    let p_max = ((n + 2 * b) as f64 / 1.0) * 1.15 + 1.0; // beyond B_{2b-1} = n+2b
    let width = 860.0;
    let height = 640.0;
    let ml = 70.0;
    let mb = 60.0;
    let mt = 30.0;
    let mr = 30.0;
    let sx = (width - ml - mr) / p_max;
    let sy = (height - mt - mb) / apex;
    let px = |p: f64| ml + p * sx;
    let py = |lam: f64| height - mb - lam * sy;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // shaded cells: triangle, tetragons, unbounded region
    let line_at = |s: usize, p: f64| apex - (2 * b - s) as f64 * p;
    let b_p = |s: usize| apex / (2 * b - s) as f64;
    let palette = [
        "#dbeafe", "#dcfce7", "#fef9c3", "#fde2e2", "#ede9fe", "#d1f5f0", "#fce7f3", "#e2e8f0",
    ];
    // triangle B B_0 A_0
    svg.push_str(&format!(
        "<polygon id=\"triangle\" points=\"{},{} {},{} {},{}\" fill=\"{}\" stroke=\"none\"/>\n",
        px(1.0),
        py(0.0),
        px(b_p(0)),
        py(0.0),
        px(1.0),
        py((n) as f64),
        palette[0]
    ));
    for s in 0..(2 * b - 1) {
        // tetragon R_s = B_s B_{s+1} A_{s+1} A_s
        svg.push_str(&format!(
            "<polygon id=\"R{s}\" points=\"{},{} {},{} {},{} {},{}\" fill=\"{}\" \
             stroke=\"none\"/>\n",
            px(b_p(s)),
            py(0.0),
            px(b_p(s + 1)),
            py(0.0),
            px(1.0),
            py((n + s + 1) as f64),
            px(1.0),
            py((n + s) as f64),
            palette[1 + s % 7]
        ));
    }
    // unbounded region above the top line, clipped to the viewport
    let s_top = 2 * b - 1;
    let lam_at_pmax = line_at(s_top, p_max).max(0.0);
    svg.push_str(&format!(
        "<polygon id=\"R{s_top}\" points=\"{},{} {},{} {},{} {},{}\" fill=\"{}\" \
         stroke=\"none\" fill-opacity=\"0.9\"/>\n",
        px(b_p(s_top)),
        py(0.0),
        px(p_max),
        py(lam_at_pmax),
        px(p_max),
        py(0.0),
        px(b_p(s_top)),
        py(0.0),
        palette[(1 + s_top) % 8]
    ));
    // correct unbounded wedge: between line s_top and the p-axis beyond B_top
    svg.push_str(&format!(
        "<polygon id=\"R{s_top}-wedge\" points=\"{},{} {},{} {},{} {},{}\" fill=\"{}\" \
         stroke=\"none\"/>\n",
        px(1.0),
        py((n + s_top) as f64),
        px(b_p(s_top)),
        py(0.0),
        px(p_max),
        py(0.0),
        px(p_max),
        py(apex * 0.98),
        palette[(1 + s_top) % 8]
    ));

    // axes
    svg.push_str(&format!(
        "<line id=\"axis-p\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" \
         stroke-width=\"1.5\"/>\n",
        px(0.0),
        py(0.0),
        px(p_max),
        py(0.0)
    ));
    svg.push_str(&format!(
        "<line id=\"axis-lambda\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" \
         stroke-width=\"1.5\"/>\n",
        px(0.0),
        py(0.0),
        px(0.0),
        py(apex * 1.02)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"15\">p</text>\n",
        px(p_max) - 12.0,
        py(0.0) + 26.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"15\">lambda</text>\n",
        px(0.0) - 58.0,
        py(apex) - 8.0
    ));

    let mut csv = String::from("label,p,lambda,provenance\n");
    csv.push_str(&format!(
        "apex,0,{},\"(0; n+2b), n={n} b={b}\"\n",
        n + 2 * b
    ));
    csv.push_str(&format!("B,1,0,\"(1; 0)\"\n"));

    // threshold segments A_s B_s and vertices
    for s in 0..=(2 * b - 1) {
        let v = region_vertices(n, b, s)?;
        let bp = rat_f64(v.b_s.0);
        let ap = rat_f64(v.a_s.1);
        svg.push_str(&format!(
            "<line id=\"segment-A{s}B{s}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" \
             stroke=\"#333\" stroke-width=\"1.2\" stroke-dasharray=\"5,3\"/>\n",
            px(1.0),
            py(ap),
            px(bp),
            py(0.0)
        ));
        svg.push_str(&format!(
            "<circle id=\"B{s}\" cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#b91c1c\"/>\n",
            px(bp),
            py(0.0)
        ));
        svg.push_str(&format!(
            "<circle id=\"A{s}\" cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#1d4ed8\"/>\n",
            px(1.0),
            py(ap)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"13\">B{s}</text>\n",
            px(bp) - 8.0,
            py(0.0) + 20.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"13\">A{s}</text>\n",
            px(1.0) - 28.0,
            py(ap) + 4.0
        ));
        csv.push_str(&format!(
            "B{s},{},0,\"((n+2b)/(2b-s); 0), s={s}\"\n",
            v.b_s.0
        ));
        csv.push_str(&format!(
            "A{s},1,{},\"(1; n+s), s={s}\"\n",
            v.a_s.1
        ));
        csv.push_str(&format!(
            "segment-A{s}B{s},,,\"open segment: BMO for D^{s}\"\n"
        ));
    }
    csv.push_str("triangle,,,\"open right triangle B B0 A0: Morrey regime\"\n");
    for s in 0..(2 * b - 1) {
        csv.push_str(&format!(
            "R{s},,,\"tetragon B{s} B{} A{} A{s}: Hoelder for D^{s}\"\n",
            s + 1,
            s + 1
        ));
    }
    csv.push_str(&format!(
        "R{},,,\"unbounded region above the top threshold line: Hoelder for D^{}\"\n",
        2 * b - 1,
        2 * b - 1
    ));

    svg.push_str("</svg>\n");
    std::fs::write(svg_path, svg)?;
    std::fs::write(csv_path, csv)?;
    Ok(())
}

fn rat_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// The verdict kind a figure cell implies for derivative order s (bridge
/// used to cross-check `classify` against `region_membership`).
pub fn class_kind_for_cell(cell: &FigureRegion, s: usize, max_s: usize) -> &'static str {
    // Threshold lines rise with s; a cell below the query's line means the
    // Morrey regime, the cell at the line itself BMO, one band up Hoelder,
    // anything higher is out of the window for this s.
    match cell {
        FigureRegion::Triangle => "morrey",
        FigureRegion::Segment { s: s2 } => {
            if *s2 == s {
                "bmo"
            } else if *s2 < s {
                "morrey"
            } else {
                "boundary"
            }
        }
        FigureRegion::Tetragon { s: s2 } => {
            if *s2 == s {
                "holder"
            } else if *s2 < s {
                "morrey"
            } else {
                "boundary"
            }
        }
        FigureRegion::Unbounded => {
            if s == max_s {
                "holder"
            } else {
                "boundary"
            }
        }
    }
}

pub fn class_kind(class: &RegularityClass) -> &'static str {
    match class {
        RegularityClass::Morrey { .. } => "morrey",
        RegularityClass::Bmo => "bmo",
        RegularityClass::Vmo => "vmo",
        RegularityClass::Holder { .. } => "holder",
        RegularityClass::EssentiallyBounded => "bounded",
        RegularityClass::Boundary { .. } => "boundary",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: usize, b: usize, s: usize, p: Scalar, lambda: Scalar) -> RegularityQuery {
        RegularityQuery { n, b, s, p, lambda }
    }

    #[test]
    fn scalar_parsing() {
        assert_eq!(Scalar::parse("2").unwrap(), Scalar::from_int(2));
        assert_eq!(
            Scalar::parse("3/2").unwrap(),
            Scalar::from_ratio(3, 2).unwrap()
        );
        assert_eq!(
            Scalar::parse("1.25").unwrap(),
            Scalar::from_ratio(5, 4).unwrap()
        );
        assert_eq!(
            Scalar::parse("-0.5").unwrap(),
            Scalar::from_ratio(-1, 2).unwrap()
        );
        assert!(Scalar::parse("1/0").is_err());
        assert!(Scalar::parse("abc").is_err());
        assert!(Scalar::parse("nan").is_err());
        assert!(matches!(Scalar::parse("1e-3").unwrap(), Scalar::Approx(_)));
    }

    #[test]
    fn holder_spot_value() {
        // n=2, b=1, s=0, lambda=1, p=2: tau_0 = 3/2 < 2 < tau_1 = 3
        // -> sigma = 2 - 3/2 = 1/2
        let c = classify(&q(2, 1, 0, Scalar::from_int(2), Scalar::from_int(1))).unwrap();
        match c.class {
            RegularityClass::Holder { sigma } => {
                assert_eq!(sigma, Scalar::from_ratio(1, 2).unwrap());
            }
            other => panic!("expected Hoelder, got {other}"),
        }
        assert!(!c.also_essentially_bounded);
    }

    #[test]
    fn bmo_and_vmo_thresholds() {
        // p = tau_s with lambda > 0 -> BMO
        let c = classify(&q(
            2,
            1,
            0,
            Scalar::from_ratio(3, 2).unwrap(),
            Scalar::from_int(1),
        ))
        .unwrap();
        assert_eq!(c.class, RegularityClass::Bmo);
        // n=2, b=1, s=1, lambda=0, p=4: tau_1 = 4 -> VMO
        let c = classify(&q(2, 1, 1, Scalar::from_int(4), Scalar::from_int(0))).unwrap();
        assert_eq!(c.class, RegularityClass::Vmo);
    }

    #[test]
    fn morrey_spot_value() {
        // n=2, b=1, s=0, lambda=1, p=1.2 < 3/2 -> exponent 2*1.2 + 1 = 3.4
        let c = classify(&q(
            2,
            1,
            0,
            Scalar::parse("1.2").unwrap(),
            Scalar::from_int(1),
        ))
        .unwrap();
        match c.class {
            RegularityClass::Morrey { exponent, .. } => {
                assert_eq!(exponent, Scalar::parse("3.4").unwrap());
            }
            other => panic!("expected Morrey, got {other}"),
        }
    }

    #[test]
    fn float_near_threshold_is_boundary() {
        // float p equal to the threshold must NOT produce BMO
        let c = classify(&q(2, 1, 1, Scalar::Approx(4.0), Scalar::from_int(0))).unwrap();
        assert!(matches!(c.class, RegularityClass::Boundary { .. }));
        // but a float clearly inside a window classifies normally
        let c = classify(&q(2, 1, 0, Scalar::Approx(2.0), Scalar::from_int(1))).unwrap();
        assert!(matches!(c.class, RegularityClass::Holder { .. }));
    }

    #[test]
    fn beyond_window_redirects() {
        // n=2, b=1, s=0, lambda=1: tau_1 = 3; p=5 > 3 -> boundary with
        // redirect to s=1 (whose window is (3, inf))
        let c = classify(&q(2, 1, 0, Scalar::from_int(5), Scalar::from_int(1))).unwrap();
        match c.class {
            RegularityClass::Boundary { suggested_s, .. } => {
                assert_eq!(suggested_s, Some(1));
            }
            other => panic!("expected Boundary, got {other}"),
        }
    }

    #[test]
    fn essentially_bounded_flag() {
        // s=0, lambda=0, p > (n+2b)/2b = 2
        let c = classify(&q(2, 1, 0, Scalar::from_int(3), Scalar::from_int(0))).unwrap();
        assert!(c.also_essentially_bounded);
        let c = classify(&q(2, 1, 0, Scalar::from_ratio(3, 2).unwrap(), Scalar::from_int(0)))
            .unwrap();
        assert!(!c.also_essentially_bounded);
    }

    #[test]
    fn vertices_and_collinearity() {
        let v = region_vertices(2, 1, 0).unwrap();
        assert_eq!(v.b_s.0, Rat::new(4, 2)); // B_0 = (2, 0)
        assert_eq!(v.a_s.1, Rat::from_integer(2)); // A_0 = (1, n+s) = (1, 2)
        assert_eq!(v.apex.1, Rat::from_integer(4));
        let v = region_vertices(2, 1, 1).unwrap();
        assert_eq!(v.b_s.0, Rat::from_integer(4)); // B_1 = (4, 0)
        assert_eq!(v.a_s.1, Rat::from_integer(3)); // A_1 = (1, 3)
        // line through apex (0,4) and B_1 (4,0) at p=1 gives lambda = 3
        let v = region_vertices(2, 2, 3).unwrap();
        assert_eq!(v.b_s.0, Rat::from_integer(6)); // (n+2b)/(2b-s) = 6/1
    }

    #[test]
    fn membership_cases() {
        // (2, 1) with n=2,b=1: between line 0 (lambda = 4-2p -> 0 at p=2)
        // and line 1 (lambda = 4-p -> 2): tetragon R_0
        let r = region_membership(Scalar::from_int(2), Scalar::from_int(1), 2, 1).unwrap();
        assert_eq!(r, FigureRegion::Tetragon { s: 0 });
        // on segment A_0 B_0: lambda = 4 - 2p, take p = 3/2, lambda = 1
        let r = region_membership(
            Scalar::from_ratio(3, 2).unwrap(),
            Scalar::from_int(1),
            2,
            1,
        )
        .unwrap();
        assert_eq!(r, FigureRegion::Segment { s: 0 });
        // (1.2, 1): below line 0 (4 - 2.4 = 1.6 > 1): triangle
        let r = region_membership(
            Scalar::parse("1.2").unwrap(),
            Scalar::from_int(1),
            2,
            1,
        )
        .unwrap();
        assert_eq!(r, FigureRegion::Triangle);
        // far field: unbounded region
        let r = region_membership(Scalar::from_int(40), Scalar::from_int(3), 2, 1).unwrap();
        assert_eq!(r, FigureRegion::Unbounded);
    }

    #[test]
    fn geometric_sigma_matches_formula() {
        // |C A_s| equals 2b - s - (n+2b-lambda)/p
        let n = 2;
        let b = 1;
        for (p, lam, s) in [(2.0, 1.0, 0usize), (5.0, 2.0, 1), (2.5, 0.5, 0)] {
            let geo = sigma_from_geometry(Scalar::Approx(p), Scalar::Approx(lam), n, b, s);
            let alg = (2 * b - s) as f64 - ((n + 2 * b) as f64 - lam) / p;
            assert!((geo - alg).abs() < 1e-12, "geo {geo} alg {alg}");
        }
        // worked example: (p, lambda) = (2, 1): C = (1, 5/2), A_0 = (1, 2)
        let geo = sigma_from_geometry(Scalar::from_int(2), Scalar::from_int(1), 2, 1, 0);
        assert!((geo - 0.5).abs() < 1e-14);
    }

    #[test]
    fn classify_and_membership_agree_on_random_rationals() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut checked = 0usize;
        for _ in 0..4000 {
            let n = rng.gen_range(2..=4usize);
            let b = rng.gen_range(1..=3usize);
            let s = rng.gen_range(0..2 * b);
            // random rationals with small denominators
            let p = Scalar::from_ratio(rng.gen_range(11..200), rng.gen_range(1..10)).unwrap();
            if p.to_f64() <= 1.0 {
                continue;
            }
            let cap = (n + 2 * b) as i64;
            let lam =
                Scalar::from_ratio(rng.gen_range(1..(8 * cap)), 8).unwrap();
            if lam.to_f64() >= cap as f64 || lam.to_f64() <= 0.0 {
                continue;
            }
            let cell = region_membership(p, lam, n, b).unwrap();
            let class = classify(&q(n, b, s, p, lam)).unwrap();
            let expect = class_kind_for_cell(&cell, s, 2 * b - 1);
            let got = class_kind(&class.class);
            assert_eq!(got, expect, "n={n} b={b} s={s} p={p} lam={lam} cell={cell:?}");
            checked += 1;
        }
        assert!(checked > 2000);
    }

    #[test]
    fn continuity_across_thresholds() {
        // as p -> tau_s from below, the Morrey exponent tends to n+2b; as p
        // -> tau_s from above, sigma -> 0
        let n = 2;
        let b = 1;
        let s = 0;
        let lam = 1.0;
        let tau = ((n + 2 * b) as f64 - lam) / (2 * b - s) as f64;
        let eps = 1e-9;
        let below = classify(&q(n, b, s, Scalar::Approx(tau - eps), Scalar::Approx(lam)))
            .unwrap();
        match below.class {
            RegularityClass::Morrey { exponent, .. } => {
                assert!((exponent.to_f64() - (n + 2 * b) as f64).abs() < 1e-8);
            }
            other => panic!("expected Morrey, got {other}"),
        }
        let above = classify(&q(n, b, s, Scalar::Approx(tau + eps), Scalar::Approx(lam)))
            .unwrap();
        match above.class {
            RegularityClass::Holder { sigma } => {
                assert!(sigma.to_f64() < 1e-8);
            }
            other => panic!("expected Hoelder, got {other}"),
        }
    }

    #[test]
    fn sigma_monotonicity() {
        // sigma strictly increasing in p and lambda, decreasing in s
        let sig = |p: f64, lam: f64, s: usize| 2.0 - s as f64 - (4.0 - lam) / p;
        assert!(sig(2.5, 1.0, 0) > sig(2.0, 1.0, 0));
        assert!(sig(2.0, 1.5, 0) > sig(2.0, 1.0, 0));
        assert!(sig(5.0, 1.0, 1) < sig(5.0, 1.0, 0));
    }

    #[test]
    fn diagram_emission() {
        let dir = tempfile::tempdir().unwrap();
        let svg = dir.path().join("fig.svg");
        let csv = dir.path().join("fig.csv");
        emit_diagram(2, 1, &svg, &csv).unwrap();
        let svg_text = std::fs::read_to_string(&svg).unwrap();
        assert!(svg_text.contains("id=\"B0\""));
        assert!(svg_text.contains("id=\"B1\""));
        assert!(svg_text.contains("id=\"axis-p\""));
        let csv_text = std::fs::read_to_string(&csv).unwrap();
        // B_0 = (2, 0) and B_1 = (4, 0) for n=2, b=1
        assert!(csv_text.contains("B0,2,0"));
        assert!(csv_text.contains("B1,4,0"));
        // b=2 has four threshold levels, B_3 = (6, 0)
        emit_diagram(2, 2, &svg, &csv).unwrap();
        let csv_text = std::fs::read_to_string(&csv).unwrap();
        assert!(csv_text.contains("B3,6,0"));
    }
}
