//! Instance files and small text formats shared by the CLI and the tests.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circle::{MorgensternForm, SystemParams};
use crate::error::{Error, Result};
use crate::ff::{Fq, FqElem, Poly};

/// A strong-approximation instance as stored on disk:
/// `{"q": 3, "nu": "2", "f": "t^4+1", "g": "t", "lambda": ["1","0","0","0"]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub q: u64,
    pub nu: String,
    pub f: String,
    pub g: String,
    pub lambda: [String; 4],
}

/// Parses a field element written as a constant polynomial (`"2"`, `"-1"`, `"u+1"`).
pub fn parse_elem(field: &std::sync::Arc<Fq>, s: &str) -> Result<FqElem> {
    let p = Poly::parse(field, s)?;
    if !p.is_constant() {
        return Err(Error::Invalid(format!("{s:?} is not a field element")));
    }
    Ok(p.coeff(0))
}

impl InstanceSpec {
    pub fn new(q: u64, nu: &str, f: &str, g: &str, lambda: [&str; 4]) -> InstanceSpec {
        InstanceSpec {
            q,
            nu: nu.into(),
            f: f.into(),
            g: g.into(),
            lambda: lambda.map(String::from),
        }
    }

    fn parts(&self) -> Result<(MorgensternForm, Poly, Poly, [Poly; 4])> {
        let field = Fq::new(self.q)?;
        let nu = parse_elem(&field, &self.nu)?;
        let form = MorgensternForm::new(&field, nu)?;
        let f = Poly::parse(&field, &self.f)?;
        let g = Poly::parse(&field, &self.g)?;
        let mut lambda = std::array::from_fn(|_| Poly::zero(&field));
        for (l, s) in lambda.iter_mut().zip(&self.lambda) {
            *l = Poly::parse(&field, s)?;
        }
        Ok((form, f, g, lambda))
    }

    /// Validated instance (closed-form hypotheses enforced).
    pub fn build(&self) -> Result<SystemParams> {
        let (form, f, g, lambda) = self.parts()?;
        SystemParams::new(form, f, g, lambda)
    }

    /// Instance with only the congruence condition enforced.
    pub fn build_relaxed(&self) -> Result<SystemParams> {
        let (form, f, g, lambda) = self.parts()?;
        SystemParams::new_relaxed(form, f, g, lambda)
    }

    pub fn from_params(p: &SystemParams) -> InstanceSpec {
        InstanceSpec {
            q: p.q() as u64,
            nu: p.field().format_elem(p.form.nu()),
            f: p.f.to_string(),
            g: p.g.to_string(),
            lambda: p.lambda.clone().map(|l| l.to_string()),
        }
    }

    pub fn load(path: &Path) -> Result<InstanceSpec> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Parses `"a,b,c,d"` into four polynomial strings.
pub fn split_lambda(s: &str) -> Result<[String; 4]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::Parse {
            column: 0,
            message: format!("expected 4 comma-separated entries, got {}", parts.len()),
        });
    }
    Ok(std::array::from_fn(|i| parts[i].to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trip() {
        let spec = InstanceSpec::new(3, "-1", "t^4+1", "t", ["1", "0", "0", "0"]);
        let p = spec.build().unwrap();
        let back = InstanceSpec::from_params(&p);
        assert_eq!(back.build().unwrap().f, p.f);
        let json = serde_json::to_string(&back).unwrap();
        let again: InstanceSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(again, back);
    }

    #[test]
    fn lambda_needs_four_entries() {
        assert_eq!(split_lambda("0, t,1,0").unwrap()[1], "t");
        assert!(split_lambda("0,0,0").is_err());
    }
}
