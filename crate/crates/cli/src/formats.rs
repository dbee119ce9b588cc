//! File formats: text matrices and kernels, binary Wigner grids (`WGF1`).

use std::path::Path;

use num_complex::Complex;
use statecert::{GridSpec, Kernel, Matrix, WignerGrid};

use crate::error::{CliError, Result};

/// Splits a line into entry tokens, keeping `(a, b)` together even when it
/// contains spaces. Returns `(1-based column, token)` pairs.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if bytes[i] == b'(' {
            while i < bytes.len() && bytes[i] != b')' {
                i += 1;
            }
            i = (i + 1).min(bytes.len());
        } else {
            while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
                i += 1;
            }
        }
        out.push((start + 1, &line[start..i]));
    }
    out
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` or `(a,b)`.
pub fn parse_complex(tok: &str) -> std::result::Result<Complex<f64>, String> {
    let num = |s: &str| -> std::result::Result<f64, String> {
        s.trim().parse::<f64>().map_err(|_| format!("bad number {s:?} in entry {tok:?}"))
    };
    let z = if let Some(inner) = tok.strip_prefix('(') {
        let inner = inner.strip_suffix(')').ok_or_else(|| format!("unclosed parenthesis in {tok:?}"))?;
        let (re, im) = inner.split_once(',').ok_or_else(|| format!("expected (re,im), got {tok:?}"))?;
        Complex::new(num(re)?, num(im)?)
    } else if let Some(body) = tok.strip_suffix('i') {
        // split at the last sign that is not a leading sign or an exponent sign
        let b = body.as_bytes();
        let split = (1..b.len())
            .rev()
            .find(|&k| (b[k] == b'+' || b[k] == b'-') && !matches!(b[k - 1], b'e' | b'E'));
        let imag = |s: &str| match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            s => num(s),
        };
        match split {
            Some(k) => Complex::new(num(&body[..k])?, imag(&body[k..])?),
            None => Complex::new(0.0, imag(body)?),
        }
    } else {
        Complex::new(num(tok)?, 0.0)
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("non-finite entry {tok:?}"))
    }
}

fn format_complex(z: Complex<f64>) -> String {
    format!("({:?},{:?})", z.re, z.im)
}

/// Meaningful lines (1-based number, content) with blanks and `#` comments removed.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim_end()))
        .filter(|(_, l)| !l.trim().is_empty())
}

fn parse_rows<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
    n: usize,
    header_line: usize,
) -> Result<Vec<Complex<f64>>> {
    let mut values = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (line, content) in lines {
        rows += 1;
        if rows > n {
            return Err(CliError::parse(line, 1, format!("more than {n} rows")));
        }
        let toks = tokens(content);
        if toks.len() != n {
            return Err(CliError::parse(
                line,
                toks.get(n).map_or(1, |t| t.0),
                format!("row {rows}: expected {n} entries, got {}", toks.len()),
            ));
        }
        for (col, tok) in toks {
            values.push(parse_complex(tok).map_err(|msg| CliError::parse(line, col, msg))?);
        }
    }
    if rows != n {
        return Err(CliError::parse(header_line, 1, format!("expected {n} rows, got {rows}")));
    }
    Ok(values)
}

fn parse_dim(tok: Option<&str>, line: usize) -> Result<usize> {
    match tok.map(str::parse::<usize>) {
        Some(Ok(n)) if n > 0 => Ok(n),
        _ => Err(CliError::parse(line, 1, "expected a positive dimension")),
    }
}

/// Text matrix: `dim N`, then N rows of N complex entries.
pub fn parse_matrix_str(text: &str) -> Result<Matrix<f64>> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| CliError::parse(1, 1, "empty file"))?;
    let mut head = header.split_whitespace();
    if head.next() != Some("dim") {
        return Err(CliError::parse(line, 1, "header must be `dim N`"));
    }
    let n = parse_dim(head.next(), line)?;
    if head.next().is_some() {
        return Err(CliError::parse(line, 1, "header must be `dim N`"));
    }
    let values = parse_rows(lines, n, line)?;
    Ok(Matrix::new(n, values)?)
}

pub fn write_matrix_string(m: &Matrix<f64>) -> String {
    let n = m.dim();
    let mut out = format!("dim {n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format_complex(m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Text kernel: `kernel N x_min x_max`, then N rows of N complex samples
/// `A(x_i, x_j)` on the uniform grid including both endpoints.
pub fn parse_kernel_str(text: &str) -> Result<Kernel<f64>> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| CliError::parse(1, 1, "empty file"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 4 || head[0] != "kernel" {
        return Err(CliError::parse(line, 1, "header must be `kernel N x_min x_max`"));
    }
    let n = parse_dim(Some(head[1]), line)?;
    let bound = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| CliError::parse(line, 1, format!("bad range bound {s:?}")))
    };
    let (x_min, x_max) = (bound(head[2])?, bound(head[3])?);
    let values = parse_rows(lines, n, line)?;
    Ok(Kernel::new(x_min, x_max, n, values)?)
}

pub fn write_kernel_string(k: &Kernel<f64>) -> String {
    let n = k.n_points();
    let mut out = format!("kernel {n} {:?} {:?}\n", k.x_min(), k.x_max());
    for row in k.values().chunks(n) {
        let row: Vec<String> = row.iter().map(|&z| format_complex(z)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub const WGF_MAGIC: &[u8; 4] = b"WGF1";
pub const WGF_HEADER_BYTES: usize = 4 + 5 * 8 + 2 * 4;

/// `WGF1`, little-endian: q_min, q_max, p_min, p_max, hbar (f64), n_q, n_p
/// (u32), then `n_q·n_p` f64 values with `q` as the slow index.
pub fn parse_wigner_bytes(bytes: &[u8]) -> Result<WignerGrid> {
    if bytes.len() < 4 {
        return Err(CliError::Truncated {
            expected: WGF_HEADER_BYTES,
            actual: bytes.len(),
        });
    }
    if &bytes[..4] != WGF_MAGIC {
        if &bytes[..3] == b"WGF" {
            return Err(CliError::UnsupportedVersion(String::from_utf8_lossy(&bytes[..4]).into_owned()));
        }
        return Err(CliError::BadMagic);
    }
    if bytes.len() < WGF_HEADER_BYTES {
        return Err(CliError::Truncated {
            expected: WGF_HEADER_BYTES,
            actual: bytes.len(),
        });
    }
    let f = |k: usize| f64::from_le_bytes(bytes[4 + 8 * k..12 + 8 * k].try_into().expect("8 bytes"));
    let u = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().expect("4 bytes")) as usize;
    let spec = GridSpec {
        q_min: f(0),
        q_max: f(1),
        p_min: f(2),
        p_max: f(3),
        hbar: f(4),
        n_q: u(44),
        n_p: u(48),
    };
    let expected = WGF_HEADER_BYTES + 8 * spec.n_q * spec.n_p;
    if bytes.len() != expected {
        return Err(CliError::Truncated {
            expected,
            actual: bytes.len(),
        });
    }
    let values: Vec<f64> = bytes[WGF_HEADER_BYTES..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(CliError::NonFiniteSample(k));
    }
    Ok(WignerGrid::new(spec, values)?)
}

pub fn write_wigner_bytes(w: &WignerGrid) -> Vec<u8> {
    let s = w.spec();
    let mut out = Vec::with_capacity(WGF_HEADER_BYTES + 8 * w.values().len());
    out.extend_from_slice(WGF_MAGIC);
    for v in [s.q_min, s.q_max, s.p_min, s.p_max, s.hbar] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for n in [s.n_q, s.n_p] {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    for v in w.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn parse_matrix_file(path: &Path) -> Result<Matrix<f64>> {
    parse_matrix_str(&read_text(path)?).map_err(|e| e.in_file(path))
}

pub fn parse_kernel_file(path: &Path) -> Result<Kernel<f64>> {
    parse_kernel_str(&read_text(path)?).map_err(|e| e.in_file(path))
}

pub fn parse_wigner_file(path: &Path) -> Result<WignerGrid> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_wigner_bytes(&bytes).map_err(|e| e.in_file(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_tokens() {
        let c = |s| parse_complex(s).unwrap();
        assert_eq!(c("0.5"), Complex::new(0.5, 0.0));
        assert_eq!(c("1+2i"), Complex::new(1.0, 2.0));
        assert_eq!(c("-1-2.5i"), Complex::new(-1.0, -2.5));
        assert_eq!(c("1e-3+2E+2i"), Complex::new(1e-3, 200.0));
        assert_eq!(c("-i"), Complex::new(0.0, -1.0));
        assert_eq!(c("3i"), Complex::new(0.0, 3.0));
        assert_eq!(c("(0.25,-1)"), Complex::new(0.25, -1.0));
        assert_eq!(c("( 0.25 , -1 )"), Complex::new(0.25, -1.0));
        assert!(parse_complex("nan").is_err());
        assert!(parse_complex("inf+1i").is_err());
        assert!(parse_complex("(1,2").is_err());
        assert!(parse_complex("1+xi").is_err());
    }

    #[test]
    fn tokens_keep_parenthesised_pairs() {
        let t: Vec<&str> = tokens("(1, 2)  3-4i (5,6)").into_iter().map(|x| x.1).collect();
        assert_eq!(t, vec!["(1, 2)", "3-4i", "(5,6)"]);
    }

    #[test]
    fn maximally_mixed_file() {
        let m = parse_matrix_str("# two levels\ndim 2\n0.5 0\n0 0.5\n").unwrap();
        assert_eq!(m, Matrix::from_real_diag(&[0.5, 0.5]));
    }

    #[test]
    fn row_errors_name_the_line() {
        let e = parse_matrix_str("dim 2\n0.5 0 1\n0 0.5\n").unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 2, .. }), "{e}");
        assert!(e.to_string().contains("row 1"));
        let e = parse_matrix_str("dim 2\n0.5 0\n0 nan\n").unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 3, col: 3, .. }), "{e}");
        assert!(parse_matrix_str("dims 2\n").is_err());
        assert!(parse_matrix_str("dim 2\n1 0\n").is_err());
    }

    #[test]
    fn wigner_header_errors() {
        assert!(matches!(parse_wigner_bytes(b"WGF2xxxx"), Err(CliError::UnsupportedVersion(_))));
        assert!(matches!(parse_wigner_bytes(b"ABCDxxxx"), Err(CliError::BadMagic)));
        assert!(matches!(
            parse_wigner_bytes(b"WGF1"),
            Err(CliError::Truncated { expected: 52, actual: 4 })
        ));
    }

    #[test]
    fn wigner_round_trip_and_non_finite() {
        let spec = GridSpec::square(4.0, 8, 1.0);
        let w = WignerGrid::from_fn(spec, |q, p| q - 2.0 * p).unwrap();
        let mut bytes = write_wigner_bytes(&w);
        assert_eq!(parse_wigner_bytes(&bytes).unwrap(), w);
        let n = bytes.len();
        bytes[n - 8..].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(parse_wigner_bytes(&bytes), Err(CliError::NonFiniteSample(63))));
        assert!(matches!(
            parse_wigner_bytes(&bytes[..n - 1]),
            Err(CliError::Truncated { expected, actual }) if expected == n && actual == n - 1
        ));
    }

    #[test]
    fn kernel_round_trip() {
        let k = Kernel::from_fn(-1.0, 1.0, 5, |x, y| Complex::new(x * y, x - y)).unwrap();
        let back = parse_kernel_str(&write_kernel_string(&k)).unwrap();
        assert_eq!(back, k);
        assert!(parse_kernel_str("kernel 2 1 0\n1 0\n0 1\n").is_err());
    }
}
