//! Printing with minimal parentheses; the output parses back to the same canonical form.

use std::fmt;

use super::{Atom, Expr, Monomial, RatFunc};

/// Joins signed terms as `a + b - c`.
pub(crate) fn join_terms(terms: impl IntoIterator<Item = String>) -> String {
    let mut out = String::new();
    for (k, t) in terms.into_iter().enumerate() {
        if k == 0 {
            out.push_str(&t);
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&t);
        }
    }
    out
}

/// Wraps `s` in parentheses unless it is a single product.
pub(crate) fn factor(s: String) -> String {
    if s.contains(' ') {
        format!("({s})")
    } else {
        s
    }
}

/// `c*rest`, writing `rest` or `-rest` for `c = 1, -1`.
pub(crate) fn scaled(c: &str, rest: &str) -> String {
    match c {
        "1" => rest.to_string(),
        "-1" => format!("-{rest}"),
        _ => format!("{}*{rest}", factor(c.to_string())),
    }
}

pub(super) fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if e.is_zero() {
        return f.write_str("0");
    }
    f.write_str(&join_terms(e.terms().map(|(m, c)| term(m, c))))
}

fn coefficient(c: &RatFunc) -> String {
    let s = c.to_string();
    if c.denom().is_one() {
        s
    } else {
        format!("({s})")
    }
}

fn term(m: &Monomial, c: &RatFunc) -> String {
    let c = coefficient(c);
    if m.is_one() {
        return c;
    }
    let factors: Vec<String> = m
        .factors()
        .map(|(a, e)| {
            let base = atom(a);
            match e.as_i64() {
                Some(1) => base,
                Some(n) if n > 1 => format!("{base}^{n}"),
                _ => {
                    let e = e.to_string();
                    if e.chars().all(|ch| ch.is_alphanumeric() || ch == '_') {
                        format!("{base}^{e}")
                    } else {
                        format!("{base}^({e})")
                    }
                }
            }
        })
        .collect();
    scaled(&c, &factors.join("*"))
}

fn atom(a: &Atom) -> String {
    match a {
        Atom::Var(v) => v.name().to_string(),
        Atom::Func(app) => {
            let mut s = app.name.clone();
            for (k, n) in app.derivs.iter().enumerate() {
                for _ in 0..*n {
                    s.push_str(&format!(";{}", k + 1));
                }
            }
            let args: Vec<String> = app.args.iter().map(|a| a.to_string()).collect();
            format!("{s}({})", args.join(", "))
        }
        Atom::Pow(b) => format!("({b})"),
    }
}
