//! Term-symbol labels such as `4S1/2`, `3D5/2 mJ=+5/2` or `10F7/2`.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

const ORBITAL_LETTERS: [char; 7] = ['S', 'P', 'D', 'F', 'G', 'H', 'I'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelLabel {
    /// Principal quantum number.
    pub n: u32,
    /// Orbital angular momentum quantum number.
    pub l: u32,
    /// Twice the total angular momentum J.
    pub two_j: u32,
    /// Twice the magnetic quantum number m_J, if the label names a sublevel.
    pub two_mj: Option<i32>,
}

impl LevelLabel {
    pub fn new(n: u32, l: u32, two_j: u32) -> Self {
        Self { n, l, two_j, two_mj: None }
    }

    pub fn with_mj(mut self, two_mj: i32) -> Self {
        self.two_mj = Some(two_mj);
        self
    }

    /// Same level without the sublevel index.
    pub fn term(&self) -> LevelLabel {
        LevelLabel { two_mj: None, ..*self }
    }

    /// The (n, L) configuration shared by fine-structure partners.
    pub fn coarse(&self) -> (u32, u32) {
        (self.n, self.l)
    }

    pub fn degeneracy(&self) -> u32 {
        self.two_j + 1
    }

    pub fn orbital_letter(&self) -> char {
        ORBITAL_LETTERS[self.l as usize]
    }

    pub fn coarse_name(&self) -> String {
        format!("{}{}", self.n, self.orbital_letter())
    }
}

impl fmt::Display for LevelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}/2", self.n, self.orbital_letter(), self.two_j)?;
        if let Some(m) = self.two_mj {
            let sign = if m < 0 { '-' } else { '+' };
            write!(f, " mJ={}{}/2", sign, m.abs())?;
        }
        Ok(())
    }
}

fn bad(label: &str, why: &str) -> Error {
    Error::Parse { key: label.to_string(), message: format!("invalid level label: {why}") }
}

fn parse_half_integer(text: &str, label: &str) -> Result<i32, Error> {
    let (num, den) = text.split_once('/').ok_or_else(|| bad(label, "expected a half-integer like 5/2"))?;
    if den != "2" {
        return Err(bad(label, "half-integer denominator must be 2"));
    }
    let num: i32 = num.parse().map_err(|_| bad(label, "non-numeric angular momentum"))?;
    if num.rem_euclid(2) != 1 {
        return Err(bad(label, "angular momentum must be a half-odd-integer"));
    }
    Ok(num)
}

impl FromStr for LevelLabel {
    type Err = Error;

    fn from_str(label: &str) -> Result<Self, Error> {
        let mut parts = label.split_whitespace();
        let term = parts.next().ok_or_else(|| bad(label, "empty"))?;
        let digits: String = term.chars().take_while(|c| c.is_ascii_digit()).collect();
        let n: u32 = digits.parse().map_err(|_| bad(label, "missing principal quantum number"))?;
        let rest = &term[digits.len()..];
        let letter = rest.chars().next().ok_or_else(|| bad(label, "missing orbital letter"))?;
        let l = ORBITAL_LETTERS
            .iter()
            .position(|&c| c == letter.to_ascii_uppercase())
            .ok_or_else(|| bad(label, "unknown orbital letter"))? as u32;
        if l >= n {
            return Err(bad(label, "orbital quantum number must be below n"));
        }
        let two_j = parse_half_integer(&rest[letter.len_utf8()..], label)?;
        // J = L +/- 1/2 for a single valence electron
        if two_j < 1 || (two_j - 2 * l as i32).abs() != 1 {
            return Err(bad(label, "J must equal L +/- 1/2"));
        }
        let mut out = LevelLabel::new(n, l, two_j as u32);
        if let Some(mj) = parts.next() {
            let value = mj.strip_prefix("mJ=").ok_or_else(|| bad(label, "expected `mJ=` suffix"))?;
            let two_mj = parse_half_integer(value.trim_start_matches('+'), label)?;
            if two_mj.unsigned_abs() > out.two_j {
                return Err(bad(label, "|mJ| exceeds J"));
            }
            out.two_mj = Some(two_mj);
        }
        if parts.next().is_some() {
            return Err(bad(label, "trailing text"));
        }
        Ok(out)
    }
}
