//! Lossless text encoding for `f64`: C99-style hexadecimal float literals.
//!
//! Model files must round-trip bit-exactly through JSON. Hexadecimal
//! literals spell out the mantissa bits directly — `0x1.999999999999ap-4`
//! *is* the stored representation of `0.1` — so encode/decode is exact by
//! construction, with no dependence on decimal shortest-round-trip printing.

/// Render a float as a hex literal (`%a` style): `[-]0x1.<frac>p<exp>` for
/// normals, `[-]0x0.<frac>p-1022` for subnormals, `[-]0x0p+0` for zeros.
/// Trailing zero digits of the fraction are trimmed. Infinities encode as
/// `inf`/`-inf` and NaN as `nan` (payload bits are not preserved; fitted
/// models never contain non-finite parameters).
pub fn encode_f64(x: f64) -> String {
    let sign = if x.is_sign_negative() { "-" } else { "" };
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return format!("{sign}inf");
    }
    let bits = x.abs().to_bits();
    let exp_bits = (bits >> 52) as i64;
    let mantissa = bits & 0x000F_FFFF_FFFF_FFFF;
    if exp_bits == 0 && mantissa == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_bits == 0 {
        ('0', -1022)
    } else {
        ('1', exp_bits - 1023)
    };
    let mut frac = format!("{mantissa:013x}");
    while frac.ends_with('0') {
        frac.pop();
    }
    if frac.is_empty() {
        format!("{sign}0x{lead}p{exp:+}")
    } else {
        format!("{sign}0x{lead}.{frac}p{exp:+}")
    }
}

/// Parse a hex float literal back to `f64`. Accepts anything [`encode_f64`]
/// emits plus the obvious variations: upper-case digits/markers, a leading
/// `+`, no `.` fraction, and an unsigned exponent.
pub fn decode_f64(text: &str) -> Result<f64, String> {
    let bad = |why: &str| format!("'{text}': {why}");
    let t = text.trim();
    let (sign, rest) = match t.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    let lower = rest.to_ascii_lowercase();
    match lower.as_str() {
        "inf" | "infinity" => return Ok(sign * f64::INFINITY),
        "nan" => return Ok(f64::NAN),
        _ => {}
    }
    let body = lower
        .strip_prefix("0x")
        .ok_or_else(|| bad("expected a hexadecimal float literal like 0x1.8p+1"))?;
    let (digits, exp_text) = body
        .split_once('p')
        .ok_or_else(|| bad("missing binary exponent (p...)"))?;
    let exp: i64 = exp_text
        .parse()
        .map_err(|_| bad("unreadable binary exponent"))?;
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad("no mantissa digits"));
    }
    let mut mantissa: u128 = 0;
    for ch in int_part.chars().chain(frac_part.chars()) {
        let digit = ch
            .to_digit(16)
            .ok_or_else(|| bad("invalid hexadecimal digit"))? as u128;
        mantissa = mantissa
            .checked_mul(16)
            .and_then(|m| m.checked_add(digit))
            .ok_or_else(|| bad("mantissa has too many digits"))?;
    }
    // value = mantissa * 2^(exp - 4 * |frac|). The mantissa of anything we
    // emit fits in 53 bits, so the f64 conversion below is exact; longer
    // foreign inputs round to nearest like strtod. ldexp saturates cleanly
    // to 0/inf on exponent excursions.
    let shift = exp - 4 * frac_part.len() as i64;
    let shift = shift.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
    Ok(sign * libm::ldexp(mantissa as f64, shift))
}

pub fn encode_slice<'a>(values: impl IntoIterator<Item = &'a f64>) -> Vec<String> {
    values.into_iter().map(|&v| encode_f64(v)).collect()
}

/// Decode a list, reporting the failing entry's position under `what`.
pub fn decode_slice(texts: &[String], what: &str) -> Result<Vec<f64>, String> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| decode_f64(t).map_err(|e| format!("{what}[{i}]: {e}")))
        .collect()
}
