//! Canonical s-expression serialization of [`FuncExpr`], the CLI input format.
//!
//! Grammar (whitespace-separated, case-sensitive):
//!
//! ```text
//! expr    := (terms term+) | (sum expr+) | (scale RE IM expr)
//!          | (pullback-ball ball kernel expr)
//!          | (pullback-halfspace halfspace expr)
//!          | (splice region kernel side expr)
//!          | (restrict region in expr)
//!          | (separable expr expr)
//! term    := (term (center NUM+) (harmonic DIM L M) (coeff RE IM) profile)
//! profile := (powerlaw B P) | (exponential C) | (gaussian C)
//!          | (pieces (piece LO HI COEFF+)+)
//! ball    := (ball (center NUM+) RADIUS)
//! halfspace := (halfspace (normal NUM+) OFFSET)
//! region  := ball | halfspace
//! kernel  := (kernel DIM LAMBDA)
//! side    := inner | outer ; in := inside | outside
//! ```

use super::profile::{PolyPiece, RadialProfile};
use super::{FuncExpr, SpliceSide, Term};
use crate::error::{Error, Result};
use crate::geometry::{Ball, HalfSpace, KernelSpec, Point, Region};
use crate::specfun::HarmonicIndex;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
enum Sexpr {
    Atom(String),
    List(Vec<Sexpr>),
}

fn tokenize(input: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in input.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    if out.is_empty() {
        return Err(Error::Parse("empty input".into()));
    }
    Ok(out)
}

fn parse_sexpr(tokens: &[String], pos: &mut usize) -> Result<Sexpr> {
    if *pos >= tokens.len() {
        return Err(Error::Parse("unexpected end of input".into()));
    }
    let tok = &tokens[*pos];
    *pos += 1;
    if tok == "(" {
        let mut items = Vec::new();
        loop {
            if *pos >= tokens.len() {
                return Err(Error::Parse("unbalanced parentheses".into()));
            }
            if tokens[*pos] == ")" {
                *pos += 1;
                return Ok(Sexpr::List(items));
            }
            items.push(parse_sexpr(tokens, pos)?);
        }
    } else if tok == ")" {
        Err(Error::Parse("unexpected ')'".into()))
    } else {
        Ok(Sexpr::Atom(tok.clone()))
    }
}

impl Sexpr {
    fn as_list(&self) -> Result<&[Sexpr]> {
        match self {
            Sexpr::List(v) => Ok(v),
            Sexpr::Atom(a) => Err(Error::Parse(format!("expected a list, found atom '{a}'"))),
        }
    }

    fn as_f64(&self) -> Result<f64> {
        match self {
            Sexpr::Atom(a) => a
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("expected a number, found '{a}'"))),
            Sexpr::List(_) => Err(Error::Parse("expected a number, found a list".into())),
        }
    }

    fn as_usize(&self) -> Result<usize> {
        let v = self.as_f64()?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::Parse(format!("expected a non-negative integer, found {v}")));
        }
        Ok(v as usize)
    }

    fn head(&self) -> Result<&str> {
        let items = self.as_list()?;
        match items.first() {
            Some(Sexpr::Atom(a)) => Ok(a),
            _ => Err(Error::Parse("expected a tagged list".into())),
        }
    }
}

fn parse_numbers(items: &[Sexpr]) -> Result<Vec<f64>> {
    items.iter().map(|s| s.as_f64()).collect()
}

fn parse_tagged_numbers(sx: &Sexpr, tag: &str) -> Result<Vec<f64>> {
    let items = sx.as_list()?;
    if sx.head()? != tag {
        return Err(Error::Parse(format!("expected ({tag} ...), found ({} ...)", sx.head()?)));
    }
    parse_numbers(&items[1..])
}

fn parse_ball(sx: &Sexpr) -> Result<Ball> {
    let items = sx.as_list()?;
    if sx.head()? != "ball" || items.len() != 3 {
        return Err(Error::Parse("expected (ball (center ...) radius)".into()));
    }
    let center = Point(parse_tagged_numbers(&items[1], "center")?);
    Ball::new(center, items[2].as_f64()?)
}

fn parse_halfspace(sx: &Sexpr) -> Result<HalfSpace> {
    let items = sx.as_list()?;
    if sx.head()? != "halfspace" || items.len() != 3 {
        return Err(Error::Parse("expected (halfspace (normal ...) offset)".into()));
    }
    let normal = Point(parse_tagged_numbers(&items[1], "normal")?);
    HalfSpace::new(normal, items[2].as_f64()?)
}

fn parse_region(sx: &Sexpr) -> Result<Region> {
    match sx.head()? {
        "ball" => Ok(Region::Ball(parse_ball(sx)?)),
        "halfspace" => Ok(Region::HalfSpace(parse_halfspace(sx)?)),
        other => Err(Error::Parse(format!("expected a region, found ({other} ...)"))),
    }
}

fn parse_kernel(sx: &Sexpr) -> Result<KernelSpec> {
    let items = sx.as_list()?;
    if sx.head()? != "kernel" || items.len() != 3 {
        return Err(Error::Parse("expected (kernel dim lambda)".into()));
    }
    KernelSpec::new(items[1].as_usize()?, items[2].as_f64()?)
}

fn parse_profile(sx: &Sexpr) -> Result<RadialProfile> {
    let items = sx.as_list()?;
    let profile = match sx.head()? {
        "powerlaw" => {
            if items.len() != 3 {
                return Err(Error::Parse("expected (powerlaw b p)".into()));
            }
            RadialProfile::PowerLaw { b: items[1].as_f64()?, p: items[2].as_f64()? }
        }
        "exponential" => {
            if items.len() != 2 {
                return Err(Error::Parse("expected (exponential c)".into()));
            }
            RadialProfile::Exponential { c: items[1].as_f64()? }
        }
        "gaussian" => {
            if items.len() != 2 {
                return Err(Error::Parse("expected (gaussian c)".into()));
            }
            RadialProfile::Gaussian { c: items[1].as_f64()? }
        }
        "pieces" => {
            let mut pieces = Vec::new();
            for p in &items[1..] {
                let pi = p.as_list()?;
                if p.head()? != "piece" || pi.len() < 4 {
                    return Err(Error::Parse("expected (piece lo hi c0 c1 ...)".into()));
                }
                pieces.push(PolyPiece {
                    lo: pi[1].as_f64()?,
                    hi: pi[2].as_f64()?,
                    coeffs: parse_numbers(&pi[3..])?,
                });
            }
            RadialProfile::PiecewisePolynomial { pieces }
        }
        other => return Err(Error::Parse(format!("unknown profile ({other} ...)"))),
    };
    profile.validate()?;
    Ok(profile)
}

fn parse_term(sx: &Sexpr) -> Result<Term> {
    let items = sx.as_list()?;
    if sx.head()? != "term" || items.len() != 5 {
        return Err(Error::Parse(
            "expected (term (center ...) (harmonic dim l m) (coeff re im) profile)".into(),
        ));
    }
    let center = Point(parse_tagged_numbers(&items[1], "center")?);
    let h = items[2].as_list()?;
    if items[2].head()? != "harmonic" || h.len() != 4 {
        return Err(Error::Parse("expected (harmonic dim l m)".into()));
    }
    let harmonic = HarmonicIndex::new(
        h[1].as_usize()?,
        h[2].as_usize()?,
        h[3].as_f64()? as i32,
    )?;
    if harmonic.dim != center.dim() {
        return Err(Error::Parse("harmonic dimension does not match the center".into()));
    }
    let c = parse_tagged_numbers(&items[3], "coeff")?;
    if c.len() != 2 {
        return Err(Error::Parse("expected (coeff re im)".into()));
    }
    Ok(Term {
        center,
        harmonic,
        profile: parse_profile(&items[4])?,
        coeff: Complex64::new(c[0], c[1]),
    })
}

fn build_expr(sx: &Sexpr) -> Result<FuncExpr> {
    let items = sx.as_list()?;
    match sx.head()? {
        "terms" => {
            let terms = items[1..].iter().map(parse_term).collect::<Result<Vec<_>>>()?;
            if terms.is_empty() {
                return Err(Error::Parse("(terms ...) needs at least one term".into()));
            }
            Ok(FuncExpr::Terms(terms))
        }
        "sum" => {
            let parts = items[1..].iter().map(build_expr).collect::<Result<Vec<_>>>()?;
            if parts.is_empty() {
                return Err(Error::Parse("(sum ...) needs at least one part".into()));
            }
            Ok(FuncExpr::Sum(parts))
        }
        "scale" => {
            if items.len() != 4 {
                return Err(Error::Parse("expected (scale re im expr)".into()));
            }
            Ok(FuncExpr::Scaled(
                Complex64::new(items[1].as_f64()?, items[2].as_f64()?),
                Box::new(build_expr(&items[3])?),
            ))
        }
        "pullback-ball" => {
            if items.len() != 4 {
                return Err(Error::Parse("expected (pullback-ball ball kernel expr)".into()));
            }
            Ok(FuncExpr::BallPullback {
                ball: parse_ball(&items[1])?,
                spec: parse_kernel(&items[2])?,
                inner: Box::new(build_expr(&items[3])?),
            })
        }
        "pullback-halfspace" => {
            if items.len() != 3 {
                return Err(Error::Parse("expected (pullback-halfspace halfspace expr)".into()));
            }
            Ok(FuncExpr::HalfSpacePullback {
                hs: parse_halfspace(&items[1])?,
                inner: Box::new(build_expr(&items[2])?),
            })
        }
        "splice" => {
            if items.len() != 5 {
                return Err(Error::Parse("expected (splice region kernel side expr)".into()));
            }
            let side = match &items[3] {
                Sexpr::Atom(a) if a == "inner" => SpliceSide::Inner,
                Sexpr::Atom(a) if a == "outer" => SpliceSide::Outer,
                _ => return Err(Error::Parse("splice side must be inner or outer".into())),
            };
            Ok(FuncExpr::Splice {
                region: parse_region(&items[1])?,
                spec: parse_kernel(&items[2])?,
                side,
                inner: Box::new(build_expr(&items[4])?),
            })
        }
        "restrict" => {
            if items.len() != 4 {
                return Err(Error::Parse("expected (restrict region in expr)".into()));
            }
            let inside = match &items[2] {
                Sexpr::Atom(a) if a == "inside" => true,
                Sexpr::Atom(a) if a == "outside" => false,
                _ => return Err(Error::Parse("restriction side must be inside or outside".into())),
            };
            Ok(FuncExpr::Restrict {
                region: parse_region(&items[1])?,
                inside,
                inner: Box::new(build_expr(&items[3])?),
            })
        }
        "separable" => {
            if items.len() != 3 {
                return Err(Error::Parse("expected (separable u-expr w-expr)".into()));
            }
            Ok(FuncExpr::Separable2D {
                u: Box::new(build_expr(&items[1])?),
                w: Box::new(build_expr(&items[2])?),
            })
        }
        other => Err(Error::Parse(format!("unknown expression head '{other}'"))),
    }
}

/// Parse the canonical text form.
pub fn parse_expr(input: &str) -> Result<FuncExpr> {
    let tokens = tokenize(input)?;
    let mut pos = 0;
    let sx = parse_sexpr(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(Error::Parse("trailing input after expression".into()));
    }
    build_expr(&sx)
}

fn fmt_f64(v: f64) -> String {
    // shortest round-trip representation
    format!("{v:?}")
}

fn print_point(tag: &str, p: &Point) -> String {
    let coords: Vec<String> = p.0.iter().map(|c| fmt_f64(*c)).collect();
    format!("({tag} {})", coords.join(" "))
}

fn print_profile(p: &RadialProfile) -> String {
    match p {
        RadialProfile::PowerLaw { b, p } => format!("(powerlaw {} {})", fmt_f64(*b), fmt_f64(*p)),
        RadialProfile::Exponential { c } => format!("(exponential {})", fmt_f64(*c)),
        RadialProfile::Gaussian { c } => format!("(gaussian {})", fmt_f64(*c)),
        RadialProfile::PiecewisePolynomial { pieces } => {
            let body: Vec<String> = pieces
                .iter()
                .map(|pc| {
                    let cs: Vec<String> = pc.coeffs.iter().map(|c| fmt_f64(*c)).collect();
                    format!("(piece {} {} {})", fmt_f64(pc.lo), fmt_f64(pc.hi), cs.join(" "))
                })
                .collect();
            format!("(pieces {})", body.join(" "))
        }
    }
}

fn print_region(r: &Region) -> String {
    match r {
        Region::Ball(b) => {
            format!("(ball {} {})", print_point("center", &b.center), fmt_f64(b.radius))
        }
        Region::HalfSpace(h) => {
            format!("(halfspace {} {})", print_point("normal", &h.normal), fmt_f64(h.offset))
        }
    }
}

fn print_kernel(k: &KernelSpec) -> String {
    format!("(kernel {} {})", k.dim, fmt_f64(k.lambda))
}

/// Canonical printer; `parse_expr(print_expr(e))` reproduces `e`.
pub fn print_expr(e: &FuncExpr) -> String {
    match e {
        FuncExpr::Terms(terms) => {
            let body: Vec<String> = terms
                .iter()
                .map(|t| {
                    format!(
                        "(term {} (harmonic {} {} {}) (coeff {} {}) {})",
                        print_point("center", &t.center),
                        t.harmonic.dim,
                        t.harmonic.l,
                        t.harmonic.m,
                        fmt_f64(t.coeff.re),
                        fmt_f64(t.coeff.im),
                        print_profile(&t.profile)
                    )
                })
                .collect();
            format!("(terms {})", body.join(" "))
        }
        FuncExpr::Sum(parts) => {
            let body: Vec<String> = parts.iter().map(print_expr).collect();
            format!("(sum {})", body.join(" "))
        }
        FuncExpr::Scaled(c, inner) => {
            format!("(scale {} {} {})", fmt_f64(c.re), fmt_f64(c.im), print_expr(inner))
        }
        FuncExpr::BallPullback { ball, spec, inner } => format!(
            "(pullback-ball {} {} {})",
            print_region(&Region::Ball(ball.clone())),
            print_kernel(spec),
            print_expr(inner)
        ),
        FuncExpr::HalfSpacePullback { hs, inner } => format!(
            "(pullback-halfspace {} {})",
            print_region(&Region::HalfSpace(hs.clone())),
            print_expr(inner)
        ),
        FuncExpr::Splice { region, spec, side, inner } => format!(
            "(splice {} {} {} {})",
            print_region(region),
            print_kernel(spec),
            match side {
                SpliceSide::Inner => "inner",
                SpliceSide::Outer => "outer",
            },
            print_expr(inner)
        ),
        FuncExpr::Restrict { region, inside, inner } => format!(
            "(restrict {} {} {})",
            print_region(region),
            if *inside { "inside" } else { "outside" },
            print_expr(inner)
        ),
        FuncExpr::Separable2D { u, w } => {
            format!("(separable {} {})", print_expr(u), print_expr(w))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_roundtrip() {
        let src = "(sum (terms (term (center 0.0) (harmonic 1 0 0) (coeff 1.0 0.0) \
                   (powerlaw 1.0 1.0))) (scale 0.5 -0.25 (terms (term (center 2.0) \
                   (harmonic 1 1 0) (coeff -1.0 0.0) (pieces (piece 0.0 1.0 1.0 -0.5))))))";
        let e = parse_expr(src).unwrap();
        let printed = print_expr(&e);
        let e2 = parse_expr(&printed).unwrap();
        assert_eq!(printed, print_expr(&e2));
        // evaluation agrees
        let x = Point(vec![0.3]);
        let v1 = e.evaluate(&x).unwrap();
        let v2 = e2.evaluate(&x).unwrap();
        assert!((v1 - v2).norm() < 1e-15);
    }

    #[test]
    fn parse_wrappers() {
        let src = "(pullback-ball (ball (center 0.0 0.0) 1.0) (kernel 2 0.5) \
                   (terms (term (center 0.0 0.0) (harmonic 2 0 0) (coeff 1.0 0.0) \
                   (exponential 2.0))))";
        let e = parse_expr(src).unwrap();
        let printed = print_expr(&e);
        assert!(parse_expr(&printed).is_ok());

        let src = "(splice (halfspace (normal 1.0) 0.0) (kernel 1 0.5) inner \
                   (terms (term (center 1.0) (harmonic 1 0 0) (coeff 1.0 0.0) (gaussian 1.0))))";
        assert!(parse_expr(src).is_ok());
    }

    #[test]
    fn parse_errors() {
        assert!(parse_expr("").is_err());
        assert!(parse_expr("(unknown 1 2)").is_err());
        assert!(parse_expr("(terms (term (center 0) (harmonic 1 5 0) (coeff 1 0) (gaussian 1)))").is_err());
        assert!(parse_expr("(sum").is_err());
        assert!(parse_expr("(terms (term (center 0) (harmonic 1 0 0) (coeff 1 0) (powerlaw 1 2)) extra").is_err());
    }
}
