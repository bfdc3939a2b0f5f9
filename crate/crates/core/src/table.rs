//! Classical lookup data and its text file format.
//!
//! ```text
//! # N b
//! 4 3
//! 5
//! 0x7
//! 0
//! 2
//! ```
//!
//! The first non-comment line holds `N b`; then exactly `N` values follow, one
//! per line, decimal or `0x`-prefixed hexadecimal, each below `2^b`.

use std::fmt::Write;

use crate::error::TableError;

/// Data `f: [0, N) -> [0, 2^b)`. Bit `j` of entry `x` is bit `j` of the output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LookupTable {
    bit_width: usize,
    entries: Vec<u64>,
}

impl LookupTable {
    pub fn new(bit_width: usize, entries: Vec<u64>) -> Result<Self, TableError> {
        if !(1..=64).contains(&bit_width) {
            return Err(TableError::Invalid(format!(
                "bit width must be in 1..=64, got {bit_width}"
            )));
        }
        if entries.is_empty() {
            return Err(TableError::Invalid(
                "table must have at least one entry".into(),
            ));
        }
        if let Some((x, v)) = entries
            .iter()
            .enumerate()
            .find(|(_, &v)| bit_width < 64 && v >> bit_width != 0)
        {
            return Err(TableError::Invalid(format!(
                "entry {x} = {v} does not fit in {bit_width} bits"
            )));
        }
        Ok(LookupTable { bit_width, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bit_width(&self) -> usize {
        self.bit_width
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    /// `f(x)`, or 0 past the end of the table.
    pub fn get(&self, x: u64) -> u64 {
        usize::try_from(x)
            .ok()
            .and_then(|i| self.entries.get(i))
            .copied()
            .unwrap_or(0)
    }

    pub fn bit(&self, x: u64, j: usize) -> bool {
        (self.get(x) >> j) & 1 == 1
    }

    /// The table restricted to output bits `[lo, lo + width)`.
    pub fn slice_bits(&self, lo: usize, width: usize) -> Result<LookupTable, TableError> {
        if width == 0 || lo + width > self.bit_width {
            return Err(TableError::Invalid(format!(
                "bit slice [{lo}, {}) outside 0..{}",
                lo + width,
                self.bit_width
            )));
        }
        let mask = low_mask(width);
        LookupTable::new(
            width,
            self.entries.iter().map(|v| (v >> lo) & mask).collect(),
        )
    }

    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (header_line, header) = lines.next().ok_or(TableError::Parse {
            line: 1,
            message: "missing `N b` header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse_err = |line, message: String| TableError::Parse { line, message };
        let [n, b] = fields[..] else {
            return Err(parse_err(
                header_line,
                format!("expected `N b`, got `{header}`"),
            ));
        };
        let n: usize = n
            .parse()
            .map_err(|_| parse_err(header_line, format!("invalid N `{n}`")))?;
        let b: usize = b
            .parse()
            .map_err(|_| parse_err(header_line, format!("invalid b `{b}`")))?;
        if n == 0 || !(1..=64).contains(&b) {
            return Err(parse_err(
                header_line,
                format!("need N >= 1 and 1 <= b <= 64, got N={n}, b={b}"),
            ));
        }

        let mut entries = Vec::with_capacity(n);
        let mut last_line = header_line;
        for (line, value) in lines {
            last_line = line;
            if entries.len() == n {
                return Err(parse_err(line, format!("more than N = {n} data lines")));
            }
            let parsed = match value
                .strip_prefix("0x")
                .or_else(|| value.strip_prefix("0X"))
            {
                Some(hex) => u64::from_str_radix(hex, 16),
                None => value.parse::<u64>(),
            }
            .map_err(|_| parse_err(line, format!("invalid value `{value}`")))?;
            if b < 64 && parsed >> b != 0 {
                return Err(parse_err(
                    line,
                    format!("value {parsed} does not fit in {b} bits"),
                ));
            }
            entries.push(parsed);
        }
        if entries.len() != n {
            return Err(parse_err(
                last_line,
                format!("expected {n} data lines, found {}", entries.len()),
            ));
        }
        LookupTable::new(b, entries).map_err(|e| parse_err(header_line, e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.entries.len(), self.bit_width);
        for v in &self.entries {
            writeln!(out, "{v}").unwrap();
        }
        out
    }
}

pub(crate) fn low_mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_hex_and_comments() {
        let t = LookupTable::parse("# demo\n4 3\n5\n0x7 # seven\n\n0\n2\n").unwrap();
        assert_eq!(t.entries(), &[5, 7, 0, 2]);
        assert_eq!(t.bit_width(), 3);
        assert_eq!(t.get(10), 0);
        assert!(t.bit(0, 2));
    }

    #[test]
    fn rejects_bad_files() {
        let cases = [
            ("", 1),
            ("4\n", 1),
            ("2 3\n1\n", 2),
            ("2 3\n1\n2\n3\n", 4),
            ("2 3\n1\n8\n", 3),
            ("2 3\n1\nzz\n", 3),
            ("0 3\n", 1),
        ];
        for (text, line) in cases {
            match LookupTable::parse(text) {
                Err(TableError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let t = LookupTable::new(5, vec![1, 31, 0, 17]).unwrap();
        assert_eq!(LookupTable::parse(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn slices_bits() {
        let t = LookupTable::new(5, vec![0b10110, 0b01011]).unwrap();
        assert_eq!(t.slice_bits(1, 2).unwrap().entries(), &[0b11, 0b01]);
        assert!(t.slice_bits(4, 2).is_err());
    }

    #[test]
    fn wide_entries() {
        assert!(LookupTable::new(64, vec![u64::MAX]).is_ok());
        assert!(LookupTable::new(65, vec![0]).is_err());
        assert!(LookupTable::new(3, vec![8]).is_err());
    }
}
