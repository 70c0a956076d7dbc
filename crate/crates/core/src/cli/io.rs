//! Text and image formats: labelled CSV datasets, PGM images, one-value-per-line
//! signals, and parameter lists.

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_f64(token: &str, line: usize) -> Result<f64> {
    let t = token.trim();
    let v: f64 = t.parse().map_err(|_| parse_error(line, format!("not a number: {t:?}")))?;
    if !v.is_finite() {
        return Err(parse_error(line, format!("non-finite value {t:?}")));
    }
    Ok(v)
}

/// Samples as rows with the label in the last column. Blank lines are
/// skipped; every other line must hold the same number (at least two) of
/// numeric fields.
pub fn parse_csv_dataset(text: &str) -> Result<(Matrix, Vec<f64>)> {
    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut width = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields = raw.split(',').map(|t| parse_f64(t, line)).collect::<Result<Vec<f64>>>()?;
        if fields.len() < 2 {
            return Err(parse_error(line, "need at least one feature and a label"));
        }
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(parse_error(line, format!("expected {w} fields, found {}", fields.len())))
            }
            _ => {}
        }
        let (label, features) = fields.split_last().expect("len >= 2");
        data.extend_from_slice(features);
        labels.push(*label);
    }
    let w = width.ok_or_else(|| parse_error(0, "dataset is empty"))?;
    Ok((Matrix::new(labels.len(), w - 1, data)?, labels))
}

pub fn load_csv_dataset(path: &Path) -> Result<(Matrix, Vec<f64>)> {
    parse_csv_dataset(&std::fs::read_to_string(path)?)
}

/// One value per line; blank lines and lines starting with `#` are skipped.
pub fn parse_signal(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push(parse_f64(t, i + 1)?);
    }
    if out.is_empty() {
        return Err(parse_error(0, "signal is empty"));
    }
    Ok(out)
}

pub fn load_signal(path: &Path) -> Result<Vec<f64>> {
    parse_signal(&std::fs::read_to_string(path)?)
}

/// One entry of a `--lambda-list`: a literal value, or a multiple of the
/// experiment's `lambda_max` written `max` or `<factor>max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaToken {
    Value(f64),
    Max(f64),
}

/// Comma-separated nonnegative values and `max` tokens.
pub fn parse_lambda_list(text: &str) -> Result<Vec<LambdaToken>> {
    let mut out = Vec::new();
    for token in text.split(',') {
        let t = token.trim();
        let parsed = if let Some(factor) = t.strip_suffix("max") {
            let f = if factor.is_empty() { 1.0 } else { parse_f64(factor, 1)? };
            if !(f > 0.0) {
                return Err(parse_error(1, format!("max factor must be positive: {t:?}")));
            }
            LambdaToken::Max(f)
        } else {
            let v = parse_f64(t, 1)?;
            if v < 0.0 {
                return Err(parse_error(1, format!("lambda must be nonnegative: {t:?}")));
            }
            LambdaToken::Value(v)
        };
        out.push(parsed);
    }
    Ok(out)
}

/// Comma-separated list of positive reals.
pub fn parse_positive_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            let v = parse_f64(t, 1)?;
            if v > 0.0 {
                Ok(v)
            } else {
                Err(parse_error(1, format!("expected a positive value, got {v}")))
            }
        })
        .collect()
}

/// Comma-separated list of sparsity levels.
pub fn parse_level_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| parse_error(1, format!("not a level: {:?}", t.trim()))))
        .collect()
}

/// Grayscale image, row-major, with integer levels in `0..=maxval`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub pixels: Vec<f64>,
}

impl GrayImage {
    /// Rounds and clamps `values` to `0..=255`.
    pub fn from_values(width: usize, height: usize, values: &[f64]) -> Result<Self> {
        if width * height != values.len() || width == 0 || height == 0 {
            return Err(Error::InvalidShape(format!("{width}x{height} image from {} values", values.len())));
        }
        let pixels = values.iter().map(|v| v.round().clamp(0.0, 255.0)).collect();
        Ok(GrayImage { width, height, maxval: 255, pixels })
    }
}

/// Cursor over PGM header tokens, which are separated by whitespace and may
/// be interleaved with `#` comments running to the end of the line.
struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn line(&self) -> usize {
        1 + self.bytes[..self.pos].iter().filter(|&&b| b == b'\n').count()
    }

    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Result<&'a [u8]> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(parse_error(self.line(), "unexpected end of PGM data"));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self) -> Result<usize> {
        let t = self.token()?;
        // line numbers are counted only on failure, keeping long ASCII rasters linear
        std::str::from_utf8(t)
            .ok()
            .filter(|s| s.len() <= 9 && s.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_error(self.line(), format!("bad PGM integer {:?}", String::from_utf8_lossy(t))))
    }
}

/// Decodes binary (`P5`) or ASCII (`P2`) PGM with `maxval <= 255`.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut h = Header { bytes, pos: 0 };
    let magic = h.token()?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        _ => return Err(parse_error(1, "not a P2/P5 PGM file")),
    };
    let width = h.number()?;
    let height = h.number()?;
    let maxval = h.number()?;
    if width == 0 || height == 0 {
        return Err(parse_error(h.line(), "image has no pixels"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(parse_error(h.line(), format!("maxval {maxval} outside 1..=255")));
    }
    let count = width.checked_mul(height).ok_or_else(|| parse_error(h.line(), "image too large"))?;
    let mut pixels = Vec::with_capacity(count.min(1 << 24));
    if binary {
        // exactly one whitespace byte separates the header from the raster
        if h.pos >= bytes.len() || !bytes[h.pos].is_ascii_whitespace() {
            return Err(parse_error(h.line(), "missing separator before raster"));
        }
        let raster = &bytes[h.pos + 1..];
        if raster.len() < count {
            return Err(parse_error(h.line(), format!("raster has {} of {count} bytes", raster.len())));
        }
        for &b in &raster[..count] {
            if b as usize > maxval {
                return Err(parse_error(h.line(), format!("pixel {b} exceeds maxval {maxval}")));
            }
            pixels.push(b as f64);
        }
    } else {
        for _ in 0..count {
            let v = h.number()?;
            if v > maxval {
                return Err(parse_error(h.line(), format!("pixel {v} exceeds maxval {maxval}")));
            }
            pixels.push(v as f64);
        }
    }
    Ok(GrayImage { width, height, maxval: maxval as u16, pixels })
}

pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    decode_pgm(&std::fs::read(path)?)
}

/// Encodes as `P5` (binary) or `P2` (ASCII). Pixels must be integers in
/// `0..=maxval`.
pub fn encode_pgm(image: &GrayImage, binary: bool) -> Result<Vec<u8>> {
    if image.pixels.len() != image.width * image.height {
        return Err(Error::InvalidShape(format!(
            "{}x{} image with {} pixels",
            image.width,
            image.height,
            image.pixels.len()
        )));
    }
    if let Some(index) = image.pixels.iter().position(|&p| p.fract() != 0.0 || p < 0.0 || p > image.maxval as f64) {
        return Err(Error::InvalidArgument(format!("pixel {index} is not a level in 0..={}", image.maxval)));
    }
    let magic = if binary { "P5" } else { "P2" };
    let mut out = format!("{magic}\n{} {}\n{}\n", image.width, image.height, image.maxval).into_bytes();
    if binary {
        out.extend(image.pixels.iter().map(|&p| p as u8));
    } else {
        for row in image.pixels.chunks(image.width) {
            let line: Vec<String> = row.iter().map(|&p| (p as u8).to_string()).collect();
            out.extend_from_slice(line.join(" ").as_bytes());
            out.push(b'\n');
        }
    }
    Ok(out)
}

pub fn write_pgm(path: &Path, image: &GrayImage, binary: bool) -> Result<()> {
    std::fs::write(path, encode_pgm(image, binary)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_examples() {
        let (x, y) = parse_csv_dataset("1,2,1\n3,4,-1\n\n5,6,1\n").unwrap();
        assert_eq!((x.nrows(), x.ncols()), (3, 2));
        assert_eq!(x.row(1), &[3.0, 4.0]);
        assert_eq!(y, vec![1.0, -1.0, 1.0]);
        let err = parse_csv_dataset("a,b,label\n1,2,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err:?}");
        assert!(matches!(parse_csv_dataset("1,2,1\n1,2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_csv_dataset("").is_err());
        assert!(parse_csv_dataset("1\n").is_err());
        assert!(parse_csv_dataset("1,inf\n").is_err());
    }

    #[test]
    fn signal_examples() {
        assert_eq!(parse_signal("# header\n1.5\n\n-2\n").unwrap(), vec![1.5, -2.0]);
        assert!(matches!(parse_signal("1\nx\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_signal("\n").is_err());
    }

    #[test]
    fn lambda_list_examples() {
        assert_eq!(
            parse_lambda_list("0.1, 2,max,0.5max").unwrap(),
            vec![LambdaToken::Value(0.1), LambdaToken::Value(2.0), LambdaToken::Max(1.0), LambdaToken::Max(0.5)]
        );
        assert!(parse_lambda_list("-1").is_err());
        assert!(parse_lambda_list("0max").is_err());
        assert!(parse_lambda_list("1,,2").is_err());
        assert_eq!(parse_level_list("0,2, 10").unwrap(), vec![0, 2, 10]);
        assert!(parse_level_list("-1").is_err());
        assert!(parse_positive_list("1e-3,0").is_err());
    }

    #[test]
    fn pgm_round_trip() {
        let img = GrayImage { width: 3, height: 2, maxval: 255, pixels: vec![0.0, 17.0, 255.0, 128.0, 1.0, 9.0] };
        for binary in [true, false] {
            let bytes = encode_pgm(&img, binary).unwrap();
            let back = decode_pgm(&bytes).unwrap();
            assert_eq!(back, img);
            assert_eq!(encode_pgm(&back, binary).unwrap(), bytes);
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.pgm");
        write_pgm(&path, &img, true).unwrap();
        assert_eq!(read_pgm(&path).unwrap(), img);
    }

    #[test]
    fn pgm_header_comments_and_errors() {
        let img = decode_pgm(b"P2 # comment\n2 1\n# another\n255\n3 4\n").unwrap();
        assert_eq!(img.pixels, vec![3.0, 4.0]);
        assert!(decode_pgm(b"P6\n1 1\n255\n\0").is_err());
        assert!(decode_pgm(b"P5\n2 2\n255\n\x01\x02").is_err());
        assert!(decode_pgm(b"P2\n1 1\n65535\n3\n").is_err());
        assert!(decode_pgm(b"P2\n1 1\n10\n11\n").is_err());
        assert!(decode_pgm(b"P2\n0 1\n10\n").is_err());
        assert!(decode_pgm(b"").is_err());
        let bad = GrayImage { width: 1, height: 1, maxval: 255, pixels: vec![0.5] };
        assert!(encode_pgm(&bad, true).is_err());
    }
}
