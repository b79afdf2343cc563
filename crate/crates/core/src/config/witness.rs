//! Plain-text witness files: `p^e; a; b1,c1,d1; b2,c2,d2` with element codes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{build_l, ConfigError, LineConfig, LinearForm};
use crate::gf::{parse_spec, Elem, Field};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub p: u32,
    pub e: u32,
    pub a: Elem,
    pub l1: LinearForm,
    pub l2: LinearForm,
}

impl Witness {
    pub fn field(&self) -> Result<Field, ConfigError> {
        Ok(Field::new(self.p, self.e)?)
    }

    pub fn config(&self) -> Result<LineConfig, ConfigError> {
        build_l(&self.field()?, self.l1, self.l2)
    }

    pub fn spec_string(&self) -> String {
        format!("{}^{}", self.p, self.e)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}; {}; {}; {}", self.p, self.e, self.a, self.l1, self.l2)
    }
}

impl FromStr for Witness {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: &str| ConfigError::BadWitness(format!("{m} in {s:?}"));
        let parts: Vec<&str> = s.trim().split(';').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(bad("expected four ';'-separated fields"));
        }
        let (p, e) = parse_spec(parts[0])?;
        let field = Field::new(p, e)?;
        let elem = |t: &str| -> Result<Elem, ConfigError> {
            let v: u32 = t.trim().parse().map_err(|_| bad("non-integer element code"))?;
            field.elem(v).ok_or_else(|| bad("element code out of range"))
        };
        let form = |t: &str| -> Result<LinearForm, ConfigError> {
            let c: Vec<&str> = t.split(',').collect();
            if c.len() != 3 {
                return Err(bad("linear form needs three coefficients"));
            }
            Ok(LinearForm::new(elem(c[0])?, elem(c[1])?, elem(c[2])?))
        };
        Ok(Witness { p, e, a: elem(parts[1])?, l1: form(parts[2])?, l2: form(parts[3])? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let w: Witness = "7^1; 3; 1,2,3; 4,5,1".parse().unwrap();
        assert_eq!(w.to_string(), "7^1; 3; 1,2,3; 4,5,1");
        assert!("7^1; 3; 1,2,3".parse::<Witness>().is_err());
        assert!("7^1; 9; 1,2,3; 4,5,1".parse::<Witness>().is_err());
    }
}
