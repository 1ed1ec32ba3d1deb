//! Text formats for step functions, spectra, weights and modulus profiles.
//!
//! Every format is a `#` header line followed by one record per line.
//! Numbers are written with 17 significant digits so files round-trip
//! exactly and reruns are byte-identical.

use crate::dyadic::{Resolution, StepFunction};
use crate::error::{Error, Result};
use crate::metrics::ModulusProfile;
use crate::transform::Spectrum;

/// 17 significant digits, exponent form.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn header_fields(line: &str) -> Result<Vec<(&str, &str)>> {
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse(format!("missing '#' header, found '{line}'")))?;
    body.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field '{tok}'")))
        })
        .collect()
}

fn parse_resolution(value: &str) -> Result<Resolution> {
    let m = value
        .parse::<u32>()
        .map_err(|_| Error::Parse(format!("bad resolution '{value}'")))?;
    Resolution::new(m)
}

fn parse_number(s: &str, line_no: usize) -> Result<f64> {
    let v = s
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line_no}: bad number '{}'", s.trim())))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse(format!("line {line_no}: non-finite value")))
    }
}

/// Header plus data lines; a single trailing newline is allowed.
fn split_body(text: &str) -> Result<(&str, Vec<&str>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty input".into()))?;
    Ok((header, lines.collect()))
}

fn parse_column(lines: &[&str], expected: usize) -> Result<Vec<f64>> {
    if lines.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: lines.len(),
        });
    }
    lines
        .iter()
        .enumerate()
        .map(|(i, l)| parse_number(l, i + 2))
        .collect()
}

fn write_column(header: String, values: &[f64]) -> String {
    let mut out = String::with_capacity(header.len() + 25 * values.len());
    out.push_str(&header);
    out.push('\n');
    for &v in values {
        out.push_str(&format_value(v));
        out.push('\n');
    }
    out
}

pub fn write_step_function(f: &StepFunction) -> String {
    write_column(format!("# resolution={}", f.resolution()), f.values())
}

pub fn parse_step_function(text: &str) -> Result<StepFunction> {
    let (header, lines) = split_body(text)?;
    let fields = header_fields(header)?;
    let resolution = match fields.as_slice() {
        [("resolution", m)] => parse_resolution(m)?,
        _ => {
            return Err(Error::Parse(format!(
                "expected '# resolution=M', found '{header}'"
            )))
        }
    };
    let values = parse_column(&lines, resolution.size())?;
    StepFunction::new(resolution, values)
}

pub fn write_spectrum(s: &Spectrum) -> String {
    write_column(
        format!("# resolution={} kind=spectrum", s.resolution()),
        s.coefficients(),
    )
}

pub fn parse_spectrum(text: &str) -> Result<Spectrum> {
    let (header, lines) = split_body(text)?;
    let fields = header_fields(header)?;
    let resolution = match fields.as_slice() {
        [("resolution", m), ("kind", "spectrum")] => parse_resolution(m)?,
        _ => {
            return Err(Error::Parse(format!(
                "expected '# resolution=M kind=spectrum', found '{header}'"
            )))
        }
    };
    let values = parse_column(&lines, resolution.size())?;
    Spectrum::new(resolution, values)
}

pub fn write_weights(q: &[f64]) -> String {
    write_column("# weights".to_string(), q)
}

/// One `q_k` per line after a `# weights` header. Sign checks are left to
/// the weight sequence constructor.
pub fn parse_weights(text: &str) -> Result<Vec<f64>> {
    let (header, lines) = split_body(text)?;
    if header.trim() != "# weights" {
        return Err(Error::Parse(format!(
            "expected '# weights', found '{header}'"
        )));
    }
    lines
        .iter()
        .enumerate()
        .map(|(i, l)| parse_number(l, i + 2))
        .collect()
}

pub fn write_modulus_profile(profile: &ModulusProfile) -> String {
    let mut out = format!("# p={} resolution={}\n", profile.p, profile.resolution);
    for (k, &w) in profile.values.iter().enumerate() {
        out.push_str(&format!("{k},{}\n", format_value(w)));
    }
    out
}

pub fn parse_modulus_profile(text: &str) -> Result<ModulusProfile> {
    let (header, lines) = split_body(text)?;
    let fields = header_fields(header)?;
    let (p, resolution) = match fields.as_slice() {
        [("p", p), ("resolution", m)] => {
            let p = p
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad exponent '{p}'")))?;
            (p, parse_resolution(m)?)
        }
        _ => {
            return Err(Error::Parse(format!(
                "expected '# p=<p> resolution=M', found '{header}'"
            )))
        }
    };
    let expected = resolution.bits() as usize + 1;
    if lines.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: lines.len(),
        });
    }
    let mut values = Vec::with_capacity(expected);
    for (i, line) in lines.iter().enumerate() {
        let (k, w) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected 'k,omega'", i + 2)))?;
        if k.trim().parse::<usize>().ok() != Some(i) {
            return Err(Error::Parse(format!("line {}: expected k = {i}", i + 2)));
        }
        values.push(parse_number(w, i + 2)?);
    }
    Ok(ModulusProfile {
        p,
        resolution,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{lip_generator, modulus_profile, LipVariant};
    use crate::transform::analyze;
    use proptest::prelude::*;

    fn res(m: u32) -> Resolution {
        Resolution::new(m).unwrap()
    }

    #[test]
    fn step_function_format() {
        let f = StepFunction::new(res(1), vec![1.0, -0.5]).unwrap();
        let text = write_step_function(&f);
        assert_eq!(
            text,
            "# resolution=1\n1.0000000000000000e0\n-5.0000000000000000e-1\n"
        );
        assert_eq!(parse_step_function(&text).unwrap(), f);
    }

    #[test]
    fn strict_line_count() {
        assert!(matches!(
            parse_step_function("# resolution=2\n1\n2\n3\n"),
            Err(Error::LengthMismatch {
                expected: 4,
                found: 3
            })
        ));
        assert!(matches!(
            parse_step_function("# resolution=1\n1\n2\n3\n"),
            Err(Error::LengthMismatch {
                expected: 2,
                found: 3
            })
        ));
        assert!(parse_step_function("# resolution=1\n1\n\n").is_err());
        assert!(parse_step_function("resolution=1\n1\n2\n").is_err());
        assert!(parse_step_function("# resolution=0\n1\n").is_err());
        assert!(parse_step_function("# resolution=1\n1\nnan\n").is_err());
        assert!(parse_step_function("").is_err());
    }

    #[test]
    fn spectrum_format() {
        let f = lip_generator(0.5, res(4), LipVariant::Random, 1).unwrap();
        let s = analyze(&f);
        let text = write_spectrum(&s);
        assert!(text.starts_with("# resolution=4 kind=spectrum\n"));
        assert_eq!(parse_spectrum(&text).unwrap(), s);
        assert!(parse_spectrum(&write_step_function(&f)).is_err());
    }

    #[test]
    fn weights_format() {
        let q = vec![1.0, 2.5, 0.0];
        assert_eq!(parse_weights(&write_weights(&q)).unwrap(), q);
        assert!(parse_weights("# resolution=1\n1\n").is_err());
        assert!(parse_weights("# weights\n1\nx\n").is_err());
    }

    #[test]
    fn modulus_profile_format() {
        let f = lip_generator(1.0, res(5), LipVariant::Lacunary, 0).unwrap();
        let prof = modulus_profile(&f, 2.0).unwrap();
        let text = write_modulus_profile(&prof);
        assert!(text.starts_with("# p=2 resolution=5\n0,"));
        assert_eq!(parse_modulus_profile(&text).unwrap(), prof);
        assert!(parse_modulus_profile("# p=2 resolution=1\n0,1\n").is_err());
        assert!(parse_modulus_profile("# p=2 resolution=1\n0,1\n2,0\n").is_err());
    }

    proptest! {
        #[test]
        fn step_function_text_round_trips(m in 1u32..6, seed in any::<u64>()) {
            let f = lip_generator(0.3, res(m), LipVariant::Random, seed)
                .unwrap()
                .map(|v| v * (seed % 1000) as f64 / 7.0);
            let text = write_step_function(&f);
            prop_assert_eq!(parse_step_function(&text).unwrap(), f);
        }
    }
}
