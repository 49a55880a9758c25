//! Angle and unitary-expression parsing.
//!
//! Angles are decimal radians or rationals of π ("pi/4", "2pi/3", "-pi/2",
//! "3pi"), parsed so that lattice-membership tests hit exactly. Unitary
//! expressions are '*'-separated products of named factors, applied as
//! written: the leftmost factor is the leftmost matrix (acts last).

use anyhow::{anyhow, bail, Result};
use loxodrome_core::catalog;
use loxodrome_core::linalg::CMat;
use std::f64::consts::PI;

pub fn parse_angle(s: &str) -> Result<f64> {
    let s = s.trim();
    if s.is_empty() {
        bail!("empty angle");
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s),
    };
    if let Some(idx) = body.find("pi") {
        let (num, rest) = body.split_at(idx);
        let rest = &rest[2..];
        let k: f64 = if num.is_empty() {
            1.0
        } else {
            num.parse::<i64>()
                .map(|v| v as f64)
                .or_else(|_| num.parse::<f64>())
                .map_err(|_| anyhow!("bad multiple `{num}` in angle `{s}`"))?
        };
        let den: f64 = match rest.strip_prefix('/') {
            None if rest.is_empty() => 1.0,
            Some(d) => {
                let d: i64 = d
                    .parse()
                    .map_err(|_| anyhow!("bad divisor in angle `{s}`"))?;
                if d == 0 {
                    bail!("zero divisor in angle `{s}`");
                }
                d as f64
            }
            _ => bail!("malformed angle `{s}`"),
        };
        return Ok(sign * k * PI / den);
    }
    body.parse::<f64>()
        .map(|v| sign * v)
        .map_err(|_| anyhow!("malformed angle `{s}`"))
}

/// Products of Rz(x), Rx(x), H, S, T, X, Y, Z separated by '*'.
pub fn parse_unitary(s: &str) -> Result<CMat> {
    let mut product = CMat::identity(2);
    for factor in s.split('*') {
        let factor = factor.trim();
        let matrix = if let Some(arg) = factor.strip_prefix("Rx(").and_then(|r| r.strip_suffix(')'))
        {
            catalog::rx(parse_angle(arg)?)
        } else if let Some(arg) = factor.strip_prefix("Rz(").and_then(|r| r.strip_suffix(')')) {
            catalog::rz(parse_angle(arg)?)
        } else {
            match factor {
                "H" | "S" | "T" | "X" | "Y" | "Z" => {
                    catalog::gate(factor, &[])
                        .map_err(|e| anyhow!("{e}"))?
                        .matrix
                }
                _ => bail!("unknown factor `{factor}` in unitary expression"),
            }
        };
        product = product
            .mat_mul(&matrix)
            .map_err(|e| anyhow!("unitary factors must be single-qubit: {e}"))?;
    }
    Ok(product)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("3pi").unwrap(), 3.0 * PI);
        assert_eq!(parse_angle("1.25").unwrap(), 1.25);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("widdershins").is_err());
    }

    #[test]
    fn unitary_products() {
        let u = parse_unitary("Rz(0.3)*Rx(1.0)").unwrap();
        let expect = catalog::rz(0.3).mat_mul(&catalog::rx(1.0)).unwrap();
        assert!(u.max_diff(&expect) < 1e-15);
        let u = parse_unitary("H*H").unwrap();
        assert!(u.max_diff(&CMat::identity(2)) < 1e-15);
        assert!(parse_unitary("Q").is_err());
    }
}
