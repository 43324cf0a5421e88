//! Line-oriented textual tree format.
//!
//! d-ary vertex: `label[0:child|_, 1:child|_, ...]`, listing all `d` slots.
//! Plane vertex: `label(child child ...)`; a leaf prints as `label()`, and a
//! bare `label` is accepted as a leaf when parsing.
//!
//! Both directions use explicit stacks so deep trees do not exhaust the call stack.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};

use super::{DAryTree, IncreasingTree, PlaneTree};

impl fmt::Display for DAryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.d();
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        write!(f, "{}[", self.label(0))?;
        while let Some(top) = stack.last_mut() {
            let (v, s) = *top;
            if s == d {
                f.write_char(']')?;
                stack.pop();
                continue;
            }
            top.1 += 1;
            if s > 0 {
                f.write_str(", ")?;
            }
            match self.child(v, s) {
                Some(c) => {
                    write!(f, "{s}:{}[", self.label(c))?;
                    stack.push((c, 0));
                }
                None => write!(f, "{s}:_")?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        write!(f, "{}(", self.label(0))?;
        while let Some(top) = stack.last_mut() {
            let (v, i) = *top;
            let kids = self.child_list(v);
            if i == kids.len() {
                f.write_char(')')?;
                stack.pop();
                continue;
            }
            top.1 += 1;
            if i > 0 {
                f.write_char(' ')?;
            }
            let c = kids[i] as usize;
            write!(f, "{}(", self.label(c))?;
            stack.push((c, 0));
        }
        Ok(())
    }
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor { src: s.as_bytes(), pos: 0 }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", b as char)))
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse { offset: start, message: "number out of range".into() })
    }

    fn label(&mut self) -> Result<u32> {
        let start = self.pos;
        let n = self.number()?;
        match u32::try_from(n) {
            Ok(l) if l > 0 && l < u32::MAX => Ok(l),
            _ => Err(Error::Parse { offset: start, message: "labels must be positive 32-bit integers".into() }),
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.err("trailing input after the tree")),
        }
    }
}

impl FromStr for DAryTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s);
        let mut records: Vec<(u32, Option<usize>, usize)> = vec![(cur.label()?, None, 0)];
        cur.expect(b'[')?;
        let mut d: Option<usize> = None;
        // (record, next slot)
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        while let Some(&(rec, next)) = stack.last() {
            match cur.peek() {
                Some(b']') => {
                    cur.pos += 1;
                    match d {
                        None if next >= 2 => d = Some(next),
                        Some(d) if d == next => {}
                        _ => return Err(cur.err(format!("vertex lists {next} slots, expected every vertex to list d >= 2"))),
                    }
                    stack.pop();
                    continue;
                }
                Some(b',') if next > 0 => cur.pos += 1,
                _ if next > 0 => return Err(cur.err("expected `,` or `]`")),
                _ => {}
            }
            let slot = cur.number()? as usize;
            if slot != next {
                return Err(cur.err(format!("expected slot {next}, found {slot}")));
            }
            if d.is_some_and(|d| slot >= d) {
                return Err(cur.err("too many slots"));
            }
            cur.expect(b':')?;
            stack.last_mut().unwrap().1 += 1;
            if cur.peek() == Some(b'_') {
                cur.pos += 1;
                continue;
            }
            records.push((cur.label()?, Some(rec), slot));
            cur.expect(b'[')?;
            stack.push((records.len() - 1, 0));
        }
        cur.finish()?;
        DAryTree::from_records(d.expect("root closed"), &records)
    }
}

impl FromStr for PlaneTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s);
        let mut records: Vec<(u32, Option<usize>)> = vec![(cur.label()?, None)];
        let mut stack: Vec<usize> = Vec::new();
        if cur.peek() == Some(b'(') {
            cur.pos += 1;
            stack.push(0);
        }
        while let Some(&rec) = stack.last() {
            match cur.peek() {
                Some(b')') => {
                    cur.pos += 1;
                    stack.pop();
                }
                Some(b) if b.is_ascii_digit() => {
                    records.push((cur.label()?, Some(rec)));
                    if cur.peek() == Some(b'(') {
                        cur.pos += 1;
                        stack.push(records.len() - 1);
                    }
                }
                _ => return Err(cur.err("expected a child label or `)`")),
            }
        }
        cur.finish()?;
        PlaneTree::from_records(&records)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dary_format_is_exact() {
        let mut t = DAryTree::single(2).unwrap();
        t.attach(0, 0).unwrap();
        assert_eq!(t.to_string(), "1[0:2[0:_, 1:_], 1:_]");
        let single = DAryTree::single(3).unwrap();
        assert_eq!(single.to_string(), "1[0:_, 1:_, 2:_]");
    }

    #[test]
    fn plane_format_is_exact() {
        let mut t = PlaneTree::single();
        t.push_child(0, 0).unwrap();
        t.push_child(0, 1).unwrap();
        t.push_child(2, 0).unwrap();
        assert_eq!(t.to_string(), "1(2() 3(4()))");
    }

    #[test]
    fn parses_and_reprints() {
        for s in ["1[0:2[0:_, 1:3[0:_, 1:_]], 1:4[0:_, 1:_]]", "1[0:_, 1:_]", "1[0:_, 1:2[0:_, 1:_, 2:_], 2:_]"] {
            let t: DAryTree = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        for s in ["1()", "1(2() 3(4()) 5())", "1(3(4()) 2())"] {
            let t: PlaneTree = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        let leafy: PlaneTree = "1(2 3)".parse().unwrap();
        assert_eq!(leafy.to_string(), "1(2() 3())");
    }

    #[test]
    fn arbitrary_increasing_labels_are_kept() {
        let t: PlaneTree = "10(30() 20(40()))".parse().unwrap();
        assert_eq!(t.to_string(), "10(30() 20(40()))");
        assert!(!t.has_standard_labels());
    }

    #[test]
    fn rejects_malformed_input() {
        for s in [
            "",
            "1[0:_]",
            "1[0:_, 2:_]",
            "1[0:_, 1:_] x",
            "2[0:1[0:_, 1:_], 1:_]",
            "1[0:2[0:_, 1:_, 2:_], 1:_]",
            "1[0:2[0:_, 1:_], 1:2[0:_, 1:_]]",
            "0[0:_, 1:_]",
        ] {
            assert!(s.parse::<DAryTree>().is_err(), "{s}");
        }
        for s in ["", "1(", "1(2()", "2(1())", "1(2() 2())", "1)"] {
            assert!(s.parse::<PlaneTree>().is_err(), "{s}");
        }
    }

    #[test]
    fn deep_paths_do_not_recurse() {
        let mut t = PlaneTree::single();
        for v in 0..200_000 {
            t.push_child(v, 0).unwrap();
        }
        let s = t.to_string();
        let back: PlaneTree = s.parse().unwrap();
        assert_eq!(back, t);
    }
}
