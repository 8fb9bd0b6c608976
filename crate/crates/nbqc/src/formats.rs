//! Text formats: protograph base matrices, alist, nb-alist and the
//! shift/label base-matrix pair.

use std::fmt::Write as _;

use nbqc_core::codec::SparseGfMatrix;
use nbqc_core::gf2m::{FieldDesc, GfElem};
use nbqc_core::protograph::Protograph;
use nbqc_core::qclift::QcCode;

use crate::Error;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-comment lines with their 1-based line numbers. `#` starts a comment.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T, Error> {
    tok.parse().map_err(|_| parse_err(line, format!("bad number `{tok}`")))
}

/// Reads a protograph: one row of edge multiplicities per line, separated by
/// whitespace or commas.
pub fn parse_protograph(text: &str) -> Result<Protograph, Error> {
    let mut rows = Vec::new();
    for (line, l) in content_lines(text) {
        let row = l
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| parse_num::<u32>(t, line))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(Protograph::from_base_matrix(&rows)?)
}

pub fn write_protograph(p: &Protograph) -> String {
    let mut out = String::new();
    for row in p.base_matrix() {
        let cells: Vec<String> = row.iter().map(u32::to_string).collect();
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
    out
}

/// Per-node adjacency with values, both directions.
struct Adjacency {
    cols: Vec<Vec<(usize, GfElem)>>,
    rows: Vec<Vec<(usize, GfElem)>>,
}

fn adjacency(h: &SparseGfMatrix) -> Adjacency {
    Adjacency { cols: h.columns(), rows: h.rows().map(<[_]>::to_vec).collect() }
}

fn write_lists(out: &mut String, lists: &[Vec<(usize, GfElem)>], width: usize, value: Option<&dyn Fn(GfElem) -> u32>) {
    for list in lists {
        let mut cells: Vec<String> = Vec::with_capacity(width);
        for &(i, v) in list {
            match value {
                Some(f) => cells.push(format!("{} {}", i + 1, f(v))),
                None => cells.push((i + 1).to_string()),
            }
        }
        for _ in list.len()..width {
            cells.push(if value.is_some() { "0 0".into() } else { "0".into() });
        }
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
}

fn write_alist_generic(h: &SparseGfMatrix, value: Option<&dyn Fn(GfElem) -> u32>, header_q: Option<u32>) -> String {
    let adj = adjacency(h);
    let max_col = adj.cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = adj.rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    match header_q {
        Some(q) => writeln!(out, "{} {} {}", h.n_cols(), h.n_rows(), q).unwrap(),
        None => writeln!(out, "{} {}", h.n_cols(), h.n_rows()).unwrap(),
    }
    writeln!(out, "{max_col} {max_row}").unwrap();
    let degs = |l: &[Vec<(usize, GfElem)>]| l.iter().map(|x| x.len().to_string()).collect::<Vec<_>>().join(" ");
    writeln!(out, "{}", degs(&adj.cols)).unwrap();
    writeln!(out, "{}", degs(&adj.rows)).unwrap();
    write_lists(&mut out, &adj.cols, max_col, value);
    write_lists(&mut out, &adj.rows, max_row, value);
    out
}

/// Binary alist of the support of `h` (columns = variables), 1-based,
/// zero-padded to the maximum degrees.
pub fn write_alist(h: &SparseGfMatrix) -> String {
    write_alist_generic(h, None, None)
}

/// Like alist, with `q` in the header and every index followed by the
/// entry's alpha-exponent plus one; padding is `0 0`.
pub fn write_nb_alist(h: &SparseGfMatrix) -> String {
    let f = h.field().clone();
    let value = move |v: GfElem| f.log_alpha(v).expect("stored entries are nonzero") + 1;
    write_alist_generic(h, Some(&value), Some(h.field().q()))
}

struct Tokens<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    at: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Tokens { lines: content_lines(text).map(|(n, l)| (n, l.split_whitespace().collect())).collect(), at: 0 }
    }

    fn line(&mut self) -> Result<(usize, Vec<&'a str>), Error> {
        let l = self.lines.get(self.at).cloned().ok_or_else(|| parse_err(0, "unexpected end of file"))?;
        self.at += 1;
        Ok(l)
    }

    fn numbers(&mut self, expect: Option<usize>) -> Result<(usize, Vec<u64>), Error> {
        let (n, toks) = self.line()?;
        let nums = toks.iter().map(|t| parse_num(t, n)).collect::<Result<Vec<u64>, _>>()?;
        if let Some(e) = expect {
            if nums.len() != e {
                return Err(parse_err(n, format!("expected {e} numbers, found {}", nums.len())));
            }
        }
        Ok((n, nums))
    }
}

fn read_alist_generic(text: &str, nb: bool) -> Result<SparseGfMatrix, Error> {
    let mut t = Tokens::new(text);
    let (line, head) = t.numbers(Some(if nb { 3 } else { 2 }))?;
    let (n, m) = (head[0] as usize, head[1] as usize);
    let field = if nb {
        FieldDesc::with_size(head[2] as u32).map_err(|e| parse_err(line, e.to_string()))?
    } else {
        FieldDesc::new(1, None)?
    };
    let (_, maxes) = t.numbers(Some(2))?;
    let (_, col_deg) = t.numbers(Some(n))?;
    let (_, row_deg) = t.numbers(Some(m))?;
    if col_deg.iter().any(|&d| d > maxes[0]) || row_deg.iter().any(|&d| d > maxes[1]) {
        return Err(parse_err(line, "a node degree exceeds the stated maximum"));
    }
    let per = if nb { 2 } else { 1 };
    let mut entries = Vec::new();
    for (c, &deg) in col_deg.iter().enumerate() {
        let (ln, nums) = t.numbers(Some(maxes[0] as usize * per))?;
        for k in 0..deg as usize {
            let r = nums[k * per] as usize;
            if r == 0 || r > m {
                return Err(parse_err(ln, format!("row index {r} out of range")));
            }
            let v = if nb {
                let e = nums[k * per + 1];
                if e == 0 || e >= field.q() as u64 {
                    return Err(parse_err(ln, format!("value {e} out of range")));
                }
                field.pow_alpha(e as i64 - 1)
            } else {
                GfElem::ONE
            };
            entries.push((r - 1, c, v));
        }
    }
    let h = SparseGfMatrix::from_entries(m, n, field, entries)?;
    // Row lists must describe the same matrix.
    for (r, &deg) in row_deg.iter().enumerate() {
        let (ln, nums) = t.numbers(Some(maxes[1] as usize * per))?;
        let listed: Vec<(usize, u64)> =
            (0..deg as usize).map(|k| (nums[k * per] as usize, if nb { nums[k * per + 1] } else { 1 })).collect();
        let actual: Vec<(usize, u64)> = h
            .row(r)
            .iter()
            .map(|&(c, v)| (c + 1, if nb { h.field().log_alpha(v).unwrap() as u64 + 1 } else { 1 }))
            .collect();
        let mut sorted = listed.clone();
        sorted.sort_unstable();
        if sorted != actual {
            return Err(parse_err(ln, format!("row {} disagrees with the column lists", r + 1)));
        }
    }
    Ok(h)
}

pub fn read_alist(text: &str) -> Result<SparseGfMatrix, Error> {
    read_alist_generic(text, false)
}

pub fn read_nb_alist(text: &str) -> Result<SparseGfMatrix, Error> {
    read_alist_generic(text, true)
}

/// Shift and label matrices of a QC code.
///
/// ```text
/// <checks> <vars> <Z> <q> <lambda>
/// <shift matrix: one row per line, -1 for no edge, a,b for parallel edges>
///
/// <label matrix, same layout; omitted for unlabelled codes>
/// ```
pub fn write_base_matrix(code: &QcCode) -> String {
    let p = code.proto();
    let mut out = String::new();
    writeln!(out, "{} {} {} {} {}", p.n_checks(), p.n_vars(), code.z(), code.field().q(), code.lambda()).unwrap();
    let block = |out: &mut String, values: &[u32]| {
        for c in 0..p.n_checks() {
            let mut cells = vec![Vec::new(); p.n_vars()];
            for &e in p.check_edges(c) {
                cells[p.edge(e).var].push(values[e].to_string());
            }
            let row: Vec<String> =
                cells.into_iter().map(|v| if v.is_empty() { "-1".into() } else { v.join(",") }).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
    };
    block(&mut out, code.shifts());
    if let Some(labels) = code.labels() {
        writeln!(out).unwrap();
        block(&mut out, labels);
    }
    out
}

/// Reads [`write_base_matrix`] output; the field uses its default
/// primitive polynomial.
pub fn read_base_matrix(text: &str) -> Result<QcCode, Error> {
    let mut t = Tokens::new(text);
    let (line, head) = t.numbers(Some(5))?;
    let (m, n) = (head[0] as usize, head[1] as usize);
    let field = FieldDesc::with_size(head[3] as u32).map_err(|e| parse_err(line, e.to_string()))?;
    let read_block = |t: &mut Tokens| -> Result<Vec<Vec<Vec<u32>>>, Error> {
        let mut rows = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, toks) = t.line()?;
            if toks.len() != n {
                return Err(parse_err(ln, format!("expected {n} cells, found {}", toks.len())));
            }
            let cells = toks
                .iter()
                .map(|tok| {
                    if *tok == "-1" {
                        Ok(Vec::new())
                    } else {
                        tok.split(',').map(|x| parse_num::<u32>(x, ln)).collect()
                    }
                })
                .collect::<Result<Vec<Vec<u32>>, Error>>()?;
            rows.push(cells);
        }
        Ok(rows)
    };
    let shifts = read_block(&mut t)?;
    let labels = if t.at < t.lines.len() { Some(read_block(&mut t)?) } else { None };
    let base: Vec<Vec<u32>> = shifts.iter().map(|r| r.iter().map(|c| c.len() as u32).collect()).collect();
    let proto = Protograph::from_base_matrix(&base)?;
    // Edge ids are row-major with parallel edges adjacent, matching cell order.
    let flatten = |b: &[Vec<Vec<u32>>]| -> Result<Vec<u32>, Error> {
        let mut out = Vec::with_capacity(proto.n_edges());
        for (r, row) in b.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if cell.len() as u32 != base[r][c] {
                    return Err(parse_err(0, format!("label cell ({r},{c}) does not match the shift cell")));
                }
                out.extend(cell);
            }
        }
        Ok(out)
    };
    let s = flatten(&shifts)?;
    let l = labels.as_deref().map(flatten).transpose()?;
    Ok(QcCode::new(proto, head[2] as u32, s, l, head[4] as u32, field)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_code() -> QcCode {
        let p = Protograph::from_base_matrix(&[[1u32, 2, 1, 1], [1, 0, 1, 1]]).unwrap();
        let f = FieldDesc::new(4, None).unwrap();
        QcCode::new(p, 3, vec![0, 1, 2, 0, 1, 2, 1, 0], Some(vec![3, 0, 14, 7, 11, 1, 2, 9]), 5, f).unwrap()
    }

    #[test]
    fn protograph_text() {
        let p = parse_protograph("# demo\n1 2 1\n1,1,1 # tail\n").unwrap();
        assert_eq!(p.base_matrix(), vec![vec![1, 2, 1], vec![1, 1, 1]]);
        assert_eq!(parse_protograph(&write_protograph(&p)).unwrap(), p);
        assert!(matches!(parse_protograph("1 x"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn alist_fixture() {
        // Rows: c0 = {v0, v1, v2}, c1 = {v1, v3}.
        let f = FieldDesc::new(1, None).unwrap();
        let h = SparseGfMatrix::from_entries(
            2,
            4,
            f,
            [(0, 0, GfElem::ONE), (0, 1, GfElem::ONE), (0, 2, GfElem::ONE), (1, 1, GfElem::ONE), (1, 3, GfElem::ONE)],
        )
        .unwrap();
        let expected = "4 2\n2 3\n1 2 1 1\n3 2\n1 0\n1 2\n1 0\n2 0\n1 2 3\n2 4 0\n";
        assert_eq!(write_alist(&h), expected);
        assert_eq!(read_alist(expected).unwrap(), h);
    }

    #[test]
    fn nb_alist_roundtrip() {
        let h = toy_code().expand().unwrap();
        let text = write_nb_alist(&h);
        assert!(text.starts_with("12 6 16\n"));
        assert_eq!(read_nb_alist(&text).unwrap(), h);
    }

    #[test]
    fn alist_rejects_inconsistent_rows() {
        let bad = "2 1\n1 2\n1 1\n2\n1\n1\n1 1\n";
        assert!(read_alist(bad).is_err());
    }

    #[test]
    fn base_matrix_roundtrip() {
        let code = toy_code();
        let text = write_base_matrix(&code);
        assert!(text.starts_with("2 4 3 16 5\n0 1,2 0 1\n2 -1 1 0\n"));
        let back = read_base_matrix(&text).unwrap();
        assert_eq!(back, code);
        assert_eq!(back.expand().unwrap(), code.expand().unwrap());
        let unlabelled = code.without_labels();
        assert_eq!(read_base_matrix(&write_base_matrix(&unlabelled)).unwrap(), unlabelled);
    }
}
