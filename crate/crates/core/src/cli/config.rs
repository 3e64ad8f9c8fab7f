//! Text format for custom algebras and quasitriangular pairs.
//!
//! One directive per line; `#` starts a comment. Indices are zero-based.
//!
//! ```text
//! dim 3
//! label 0 h
//! label 1 e
//! label 2 f
//! bracket 0 1 1 2        # [u0, u1] = 2 u1; [u1, u0] is filled in
//! bracket 0 2 2 -2
//! bracket 1 2 0 1
//! gram 0 0 2             # symmetric entries are filled in
//! gram 1 2 1
//! cartan 0               # u0 lies in the Cartan subalgebra
//! root 1 2 1             # e_α = u1, e_−α = u2, simple-root expansion (1)
//! rmatrix fm             # cartan | es | fm | levi
//! ```
//!
//! Complex values take an optional imaginary part as a further number.
//! `levi i j …` lists the simple roots generating the Levi subalgebra for
//! `rmatrix levi`. `rl a b re [im]` and `omega a b re [im]` give a custom
//! quasitriangular pair on the whole algebra, used by `rmatrix fm` in place
//! of the standard one.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::liealg::{LieAlgebra, RootDatum, RootPair};
use crate::linalg::DenseMatrix;
use crate::tensor::Tensor2;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RKind {
    Cartan,
    Es,
    Fm,
    Levi,
}

#[derive(Debug, Clone)]
pub struct CustomConfig {
    pub algebra: LieAlgebra<C64>,
    pub roots: Option<RootDatum<C64>>,
    pub kind: RKind,
    pub levi: Vec<usize>,
    pub pair: Option<(Tensor2<C64>, Tensor2<C64>)>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

struct Line<'a> {
    no: usize,
    words: Vec<&'a str>,
}

impl Line<'_> {
    fn index(&self, pos: usize, dim: Option<usize>) -> Result<usize> {
        let w = self
            .words
            .get(pos)
            .ok_or_else(|| err(self.no, "missing index"))?;
        let v: usize = w
            .parse()
            .map_err(|_| err(self.no, format!("`{w}` is not an index")))?;
        if let Some(d) = dim {
            if v >= d {
                return Err(err(
                    self.no,
                    format!("index {v} out of range for dimension {d}"),
                ));
            }
        }
        Ok(v)
    }

    fn value(&self, pos: usize) -> Result<C64> {
        let num = |p: usize| -> Result<f64> {
            let w = self.words[p];
            w.parse()
                .map_err(|_| err(self.no, format!("`{w}` is not a number")))
        };
        match self.words.len() - pos {
            1 => Ok(C64::new(num(pos)?, 0.0)),
            2 => Ok(C64::new(num(pos)?, num(pos + 1)?)),
            _ => Err(err(
                self.no,
                "expected a real part and an optional imaginary part",
            )),
        }
    }
}

pub fn parse_config(text: &str) -> Result<CustomConfig> {
    let lines: Vec<Line> = text
        .lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let words: Vec<&str> = body.split_whitespace().collect();
            (!words.is_empty()).then_some(Line { no: i + 1, words })
        })
        .collect();

    let mut dim = None;
    for l in &lines {
        if l.words[0] == "dim" {
            if dim.is_some() {
                return Err(err(l.no, "`dim` given twice"));
            }
            let d = l.index(1, None)?;
            if d == 0 {
                return Err(err(l.no, "dimension must be positive"));
            }
            dim = Some(d);
        }
    }
    let d = dim.ok_or_else(|| err(0, "missing `dim` line"))?;

    let mut labels: Vec<String> = (0..d).map(|i| format!("u{i}")).collect();
    let mut structure = vec![C64::new(0.0, 0.0); d * d * d];
    let mut set_c: HashMap<(usize, usize, usize), C64> = HashMap::new();
    let mut gram = DenseMatrix::<C64>::zeros(d, d);
    let mut cartan = Vec::new();
    let mut roots: Vec<(usize, usize, Vec<i64>, usize)> = Vec::new();
    let mut kind = None;
    let mut levi = Vec::new();
    let mut rl = None::<Tensor2<C64>>;
    let mut omega = None::<Tensor2<C64>>;

    for l in &lines {
        match l.words[0] {
            "dim" => {}
            "label" => {
                let i = l.index(1, Some(d))?;
                let name = l.words.get(2).ok_or_else(|| err(l.no, "missing label"))?;
                labels[i] = name.to_string();
            }
            "bracket" => {
                let (i, j, k) = (
                    l.index(1, Some(d))?,
                    l.index(2, Some(d))?,
                    l.index(3, Some(d))?,
                );
                let v = l.value(4)?;
                if i == j && v != C64::new(0.0, 0.0) {
                    return Err(err(l.no, "the bracket of an element with itself vanishes"));
                }
                if let Some(prev) = set_c.get(&(j, i, k)) {
                    if *prev != -v {
                        return Err(err(l.no, "conflicts with the antisymmetric entry"));
                    }
                }
                set_c.insert((i, j, k), v);
                structure[(i * d + j) * d + k] = v;
                structure[(j * d + i) * d + k] = -v;
            }
            "gram" => {
                let (i, j) = (l.index(1, Some(d))?, l.index(2, Some(d))?);
                let v = l.value(3)?;
                gram.set(i, j, v);
                gram.set(j, i, v);
            }
            "cartan" => cartan.push(l.index(1, Some(d))?),
            "root" => {
                let (p, n) = (l.index(1, Some(d))?, l.index(2, Some(d))?);
                let coeffs = l.words[3..]
                    .iter()
                    .map(|w| {
                        w.parse::<i64>()
                            .map_err(|_| err(l.no, format!("`{w}` is not an integer")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                roots.push((p, n, coeffs, l.no));
            }
            "rmatrix" => {
                kind = Some(match l.words.get(1).copied() {
                    Some("cartan") => RKind::Cartan,
                    Some("es") => RKind::Es,
                    Some("fm") => RKind::Fm,
                    Some("levi") => RKind::Levi,
                    other => return Err(err(l.no, format!("unknown r-matrix kind {other:?}"))),
                })
            }
            "levi" => {
                for pos in 1..l.words.len() {
                    levi.push(l.index(pos, None)?);
                }
            }
            "rl" | "omega" => {
                let (a, b) = (l.index(1, Some(d))?, l.index(2, Some(d))?);
                let v = l.value(3)?;
                let t = if l.words[0] == "rl" {
                    &mut rl
                } else {
                    &mut omega
                };
                t.get_or_insert_with(|| Tensor2::zeros(d)).set(a, b, v);
            }
            other => return Err(err(l.no, format!("unknown directive `{other}`"))),
        }
    }

    let algebra =
        LieAlgebra::new(labels, structure, gram).map_err(|e| err(0, format!("algebra: {e}")))?;
    let roots = if cartan.is_empty() && roots.is_empty() {
        None
    } else {
        let n_simple = roots.iter().map(|r| r.2.len()).max().unwrap_or(0);
        let mut simple = vec![None; n_simple];
        let mut pairs = Vec::new();
        for (idx, (p, n, coeffs, no)) in roots.iter().enumerate() {
            if coeffs.len() != n_simple {
                return Err(err(
                    *no,
                    format!("expected {n_simple} simple-root coefficients"),
                ));
            }
            if coeffs.iter().filter(|&&c| c == 1).count() == 1
                && coeffs.iter().all(|&c| c == 0 || c == 1)
            {
                let s = coeffs.iter().position(|&c| c == 1).expect("one entry");
                simple[s] = Some(idx);
            }
            pairs.push(RootPair {
                label: format!("a{idx}"),
                e_pos: algebra.basis_vector(*p),
                e_neg: algebra.basis_vector(*n),
                simple_coeffs: coeffs.clone(),
            });
        }
        let simple = simple
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| err(0, format!("no root line for simple root {i}"))))
            .collect::<Result<Vec<_>>>()?;
        let cartan = cartan.iter().map(|&i| algebra.basis_vector(i)).collect();
        Some(
            RootDatum::new(&algebra, cartan, pairs, simple)
                .map_err(|e| err(0, format!("roots: {e}")))?,
        )
    };
    let pair = match (rl, omega) {
        (Some(r), Some(o)) => Some((r, o)),
        (None, None) => None,
        _ => return Err(err(0, "`rl` and `omega` must be given together")),
    };
    let kind = kind.ok_or_else(|| err(0, "missing `rmatrix` line"))?;
    if matches!(kind, RKind::Cartan | RKind::Levi) && roots.is_none() {
        return Err(err(0, "this r-matrix kind needs `cartan` and `root` lines"));
    }
    if kind == RKind::Fm && roots.is_none() && pair.is_none() {
        return Err(err(0, "`rmatrix fm` needs roots or an `rl`/`omega` pair"));
    }
    Ok(CustomConfig {
        algebra,
        roots,
        kind,
        levi,
        pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SL2: &str = "\
dim 3
label 0 h
label 1 e
label 2 f
bracket 0 1 1 2
bracket 0 2 2 -2
bracket 1 2 0 1
gram 0 0 2
gram 1 2 1
cartan 0
root 1 2 1
rmatrix cartan
";

    #[test]
    fn parses_sl2() {
        let cfg = parse_config(SL2).unwrap();
        assert_eq!(cfg.algebra.dim(), 3);
        assert_eq!(cfg.algebra.labels()[1], "e");
        assert_eq!(cfg.kind, RKind::Cartan);
        let rd = cfg.roots.unwrap();
        assert_eq!(rd.simple, vec![0]);
        let (g, _) = crate::liealg::build_sl::<C64>(2).unwrap();
        assert_eq!(cfg.algebra.fingerprint(), g.fingerprint());
    }

    #[test]
    fn reports_line_numbers() {
        let bad = SL2.replace("gram 1 2 1", "gram 1 9 1");
        match parse_config(&bad).unwrap_err() {
            Error::Config { line, .. } => assert_eq!(line, 9),
            e => panic!("unexpected {e}"),
        }
        let bad = SL2.replace("bracket 1 2 0 1", "bracket 1 2 0 3");
        assert!(parse_config(&bad).is_err());
        assert!(parse_config("label 0 x").is_err());
        let bad = SL2.replace("rmatrix cartan", "rmatrix spiral");
        assert!(matches!(
            parse_config(&bad),
            Err(Error::Config { line: 12, .. })
        ));
    }
}
