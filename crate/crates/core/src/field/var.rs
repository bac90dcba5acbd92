use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Indeterminates of the workbench.
///
/// The declaration order is the global variable order: it fixes the
/// lexicographic term order used for canonical forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Q,
    Z,
    W,
    U,
    V,
    H,
    /// Equivariant parameter `u_i`, 1-based.
    Ui(u8),
    C,
    /// Cluster variable `X_i`, 1-based.
    X(u8),
    T,
}

impl Var {
    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Q => write!(f, "q"),
            Var::Z => write!(f, "z"),
            Var::W => write!(f, "w"),
            Var::U => write!(f, "u"),
            Var::V => write!(f, "v"),
            Var::H => write!(f, "h"),
            Var::Ui(i) => write!(f, "u{i}"),
            Var::C => write!(f, "c"),
            Var::X(i) => write!(f, "X{i}"),
            Var::T => write!(f, "t"),
        }
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::UnexpectedVariable(s.to_string());
        let indexed = |rest: &str| -> Result<u8, Error> {
            let rest = rest.strip_prefix('_').unwrap_or(rest);
            match rest.parse::<u8>() {
                Ok(i) if i >= 1 => Ok(i),
                _ => Err(bad()),
            }
        };
        Ok(match s {
            "q" => Var::Q,
            "z" => Var::Z,
            "w" => Var::W,
            "u" => Var::U,
            "v" => Var::V,
            "h" => Var::H,
            "c" => Var::C,
            "t" => Var::T,
            _ if s.starts_with('u') => Var::Ui(indexed(&s[1..])?),
            _ if s.starts_with('X') || s.starts_with('x') => Var::X(indexed(&s[1..])?),
            _ => return Err(bad()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_order() {
        let mut v = vec![Var::T, Var::X(2), Var::C, Var::Ui(1), Var::H, Var::Z, Var::Q, Var::X(1)];
        v.sort();
        assert_eq!(v, vec![Var::Q, Var::Z, Var::H, Var::Ui(1), Var::C, Var::X(1), Var::X(2), Var::T]);
    }

    #[test]
    fn names_round_trip() {
        for v in [Var::Q, Var::Ui(3), Var::X(12), Var::T, Var::H] {
            assert_eq!(v.name().parse::<Var>().unwrap(), v);
        }
        assert_eq!("u_2".parse::<Var>().unwrap(), Var::Ui(2));
        assert_eq!("X_1".parse::<Var>().unwrap(), Var::X(1));
        assert!("y".parse::<Var>().is_err());
        assert!("u0".parse::<Var>().is_err());
    }
}
