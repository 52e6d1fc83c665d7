//! FCIDUMP reader and writer.
//!
//! Header: `&FCI NORB=n,NELEC=n,MS2=n, ... &END` (or `/`), possibly spread
//! over several lines. Body: `value i j k l` with 1-based indices; all four
//! zero is the core energy, `k = l = 0` a one-body integral, otherwise the
//! chemists' two-body integral `(ij|kl)`. `ORBSYM` and `ISYM` are accepted
//! and ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::FermionicHamiltonian;
use crate::{Error, Result};

const DUPLICATE_TOL: f64 = 1e-10;

struct Header {
    norb: usize,
    nelec: usize,
    ms2: i64,
}

fn parse_header(text: &str, first_line: usize) -> Result<Header> {
    let mut body = text.replace("&FCI", " ").replace("&fci", " ");
    while body.contains("= ") || body.contains(" =") {
        body = body.replace("= ", "=").replace(" =", "=");
    }
    let mut norb = None;
    let mut nelec = None;
    let mut ms2 = 0i64;
    for tok in body
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        // continuation values of list-valued keys (ORBSYM) have no '='
        let Some((key, value)) = tok.split_once('=') else {
            continue;
        };
        let value = value.trim();
        let parse_err = |msg: String| Error::Parse {
            line: first_line,
            msg,
        };
        match key.trim().to_ascii_uppercase().as_str() {
            "NORB" => {
                norb = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| parse_err(format!("bad NORB value '{value}'")))?,
                )
            }
            "NELEC" => {
                nelec = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| parse_err(format!("bad NELEC value '{value}'")))?,
                )
            }
            "MS2" => {
                ms2 = value
                    .parse::<i64>()
                    .map_err(|_| parse_err(format!("bad MS2 value '{value}'")))?
            }
            _ => {}
        }
    }
    let norb = norb.ok_or_else(|| Error::Parse {
        line: first_line,
        msg: "header missing NORB".into(),
    })?;
    let nelec = nelec.ok_or_else(|| Error::Parse {
        line: first_line,
        msg: "header missing NELEC".into(),
    })?;
    Ok(Header { norb, nelec, ms2 })
}

fn parse_value(tok: &str) -> Option<f64> {
    // Fortran writers sometimes use D exponents
    tok.replace(['D', 'd'], "E").parse().ok()
}

/// Accumulates integrals, filling symmetry images and rejecting conflicts.
struct Filler {
    n: usize,
    h1: Vec<Option<f64>>,
    h2: Vec<Option<f64>>,
    e_core: Option<f64>,
}

impl Filler {
    fn new(n: usize) -> Self {
        Self {
            n,
            h1: vec![None; n * n],
            h2: vec![None; n * n * n * n],
            e_core: None,
        }
    }

    fn put(slot: &mut Option<f64>, value: f64, line: usize, what: &str) -> Result<()> {
        match slot {
            Some(old) if (*old - value).abs() > DUPLICATE_TOL => Err(Error::Consistency(format!(
                "line {line}: {what} = {value} conflicts with earlier value {old}"
            ))),
            _ => {
                *slot = Some(value);
                Ok(())
            }
        }
    }

    fn core(&mut self, v: f64, line: usize) -> Result<()> {
        Self::put(&mut self.e_core, v, line, "core energy")
    }

    fn one_body(&mut self, p: usize, q: usize, v: f64, line: usize) -> Result<()> {
        let n = self.n;
        let what = format!("h({},{})", p + 1, q + 1);
        Self::put(&mut self.h1[p * n + q], v, line, &what)?;
        Self::put(&mut self.h1[q * n + p], v, line, &what)
    }

    fn two_body(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64, line: usize) -> Result<()> {
        let n = self.n;
        let what = format!("({}{}|{}{})", p + 1, q + 1, r + 1, s + 1);
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            Self::put(&mut self.h2[((a * n + b) * n + c) * n + d], v, line, &what)?;
        }
        Ok(())
    }
}

/// Parses FCIDUMP text.
pub fn parse_fcidump(text: &str) -> Result<FermionicHamiltonian> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let mut header = String::new();
    let mut header_line = 0;
    let mut closed = false;
    for (no, line) in lines.by_ref() {
        if header.is_empty() {
            if line.trim().is_empty() {
                continue;
            }
            if !line.trim_start().to_ascii_uppercase().starts_with("&FCI") {
                return Err(Error::Parse {
                    line: no,
                    msg: "expected '&FCI' header".into(),
                });
            }
            header_line = no;
        }
        let upper = line.to_ascii_uppercase();
        if let Some(pos) = upper.find("&END") {
            header.push_str(&line[..pos]);
            closed = true;
            break;
        }
        if line.trim() == "/" || line.trim_end().ends_with('/') {
            header.push_str(line.trim_end().trim_end_matches('/'));
            closed = true;
            break;
        }
        header.push_str(line);
        header.push(' ');
    }
    if !closed {
        return Err(Error::Parse {
            line: header_line.max(1),
            msg: "header not terminated by &END or '/'".into(),
        });
    }
    let hdr = parse_header(&header, header_line)?;
    let n = hdr.norb;
    let ms2_abs = hdr.ms2.unsigned_abs() as usize;
    if ms2_abs > hdr.nelec || !(hdr.nelec + ms2_abs).is_multiple_of(2) {
        return Err(Error::Parse {
            line: header_line,
            msg: format!("NELEC={} incompatible with MS2={}", hdr.nelec, hdr.ms2),
        });
    }
    let high = (hdr.nelec + ms2_abs) / 2;
    let low = hdr.nelec - high;
    let (n_alpha, n_beta) = if hdr.ms2 >= 0 { (high, low) } else { (low, high) };

    let mut fill = Filler::new(n);
    for (no, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(Error::Parse {
                line: no,
                msg: format!("expected 'value i j k l', found {} fields", toks.len()),
            });
        }
        let value = parse_value(toks[0]).ok_or_else(|| Error::Parse {
            line: no,
            msg: format!("bad integral value '{}'", toks[0]),
        })?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            let i: i64 = tok.parse().map_err(|_| Error::Parse {
                line: no,
                msg: format!("bad index '{tok}'"),
            })?;
            if i < 0 || i as usize > n {
                return Err(Error::Index {
                    line: no,
                    index: i.max(0) as usize,
                    norb: n,
                });
            }
            *slot = i as usize;
        }
        match idx {
            [0, 0, 0, 0] => fill.core(value, no)?,
            // orbital energies; not part of the Hamiltonian
            [_, 0, 0, 0] => {}
            [i, j, 0, 0] if i > 0 && j > 0 => fill.one_body(i - 1, j - 1, value, no)?,
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                fill.two_body(i - 1, j - 1, k - 1, l - 1, value, no)?
            }
            [i, j, k, l] => {
                let bad = [i, j, k, l].into_iter().find(|&x| x == 0).unwrap_or(0);
                return Err(Error::Index {
                    line: no,
                    index: bad,
                    norb: n,
                });
            }
        }
    }

    FermionicHamiltonian::new(
        n,
        n_alpha,
        n_beta,
        fill.e_core.unwrap_or(0.0),
        fill.h1.into_iter().map(|v| v.unwrap_or(0.0)).collect(),
        fill.h2.into_iter().map(|v| v.unwrap_or(0.0)).collect(),
    )
}

pub fn read_fcidump(path: impl AsRef<Path>) -> Result<FermionicHamiltonian> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_fcidump(&text).map_err(|e| e.context(path.display().to_string()))
}

/// Writes the unique integrals (i>=j, k>=l, ij>=kl) in shortest
/// round-trip float form.
pub fn write_fcidump(h: &FermionicHamiltonian) -> String {
    let n = h.n_spatial();
    let ms2 = h.n_alpha() as i64 - h.n_beta() as i64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "&FCI NORB={},NELEC={},MS2={},\n&END",
        n,
        h.n_electrons(),
        ms2
    );
    let pair = |a: usize, b: usize| a * (a + 1) / 2 + b;
    for i in 0..n {
        for j in 0..=i {
            for k in 0..n {
                for l in 0..=k {
                    if pair(i, j) < pair(k, l) {
                        continue;
                    }
                    let v = h.h2(i, j, k, l);
                    if v != 0.0 {
                        let _ = writeln!(out, "{:e} {} {} {} {}", v, i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = h.h1(i, j);
            if v != 0.0 {
                let _ = writeln!(out, "{:e} {} {} 0 0", v, i + 1, j + 1);
            }
        }
    }
    let _ = writeln!(out, "{:e} 0 0 0 0", h.e_core());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "&FCI NORB=1,NELEC=2,MS2=0\n&END\n0.5 1 1 1 1\n-1.0 1 1 0 0\n0.7 0 0 0 0\n";

    #[test]
    fn one_orbital() {
        let h = parse_fcidump(TINY).unwrap();
        assert_eq!(h.n_spatial(), 1);
        assert_eq!(h.n_alpha(), 1);
        assert_eq!(h.n_beta(), 1);
        assert_eq!(h.h2(0, 0, 0, 0), 0.5);
        assert_eq!(h.h1(0, 0), -1.0);
        assert_eq!(h.e_core(), 0.7);
    }

    #[test]
    fn duplicate_entry_is_idempotent() {
        let dup = format!("{TINY}0.5 1 1 1 1\n");
        assert_eq!(parse_fcidump(&dup).unwrap(), parse_fcidump(TINY).unwrap());
    }

    #[test]
    fn conflicting_duplicate() {
        let text = "&FCI NORB=2,NELEC=2,MS2=0 &END\n0.3 2 1 1 1\n0.4 1 2 1 1\n";
        assert!(matches!(parse_fcidump(text), Err(Error::Consistency(_))));
    }

    #[test]
    fn index_out_of_range() {
        let text = "&FCI NORB=1,NELEC=2,MS2=0\n&END\n0.5 1 2 1 1\n";
        match parse_fcidump(text) {
            Err(Error::Index { line, index, norb }) => {
                assert_eq!((line, index, norb), (3, 2, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_header_names_line() {
        let text = "\nNORB=1\n0.5 1 1 1 1\n";
        assert!(matches!(parse_fcidump(text), Err(Error::Parse { line: 2, .. })));
        let unterminated = "&FCI NORB=1,NELEC=2,MS2=0\n0.5 1 1 1 1\n";
        assert!(matches!(parse_fcidump(unterminated), Err(Error::Parse { .. })));
        let missing = "&FCI NELEC=2 &END\n";
        assert!(matches!(parse_fcidump(missing), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn bad_record() {
        let text = "&FCI NORB=1,NELEC=2,MS2=0 /\n0.5 1 1 1\n";
        assert!(matches!(parse_fcidump(text), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn multiline_header_with_orbsym_and_slash() {
        let text = " &FCI NORB=   2,NELEC=2,MS2=0,\n  ORBSYM=1,1,\n  ISYM=1,\n /\n 0.25 2 2 1 1\n 1.0D-1 1 2 0 0\n";
        let h = parse_fcidump(text).unwrap();
        assert_eq!(h.n_spatial(), 2);
        assert_eq!(h.h2(0, 0, 1, 1), 0.25);
        assert_eq!(h.h2(1, 1, 0, 0), 0.25);
        assert!((h.h1(1, 0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn ms2_sets_spin_counts() {
        let text = "&FCI NORB=3,NELEC=3,MS2=1 &END\n";
        let h = parse_fcidump(text).unwrap();
        assert_eq!((h.n_alpha(), h.n_beta()), (2, 1));
        let bad = "&FCI NORB=3,NELEC=3,MS2=0 &END\n";
        assert!(parse_fcidump(bad).is_err());
    }

    #[test]
    fn write_then_parse() {
        let h = parse_fcidump(TINY).unwrap();
        let again = parse_fcidump(&write_fcidump(&h)).unwrap();
        assert_eq!(h, again);
    }
}
