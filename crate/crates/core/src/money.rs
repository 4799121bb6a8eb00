//! Money amounts are carried as integer cents end to end.

use thiserror::Error;

/// An amount in US cents.
pub type Cents = i64;

/// Largest amount `parse_money` accepts, in cents ($100 trillion).
pub const MAX_CENTS: Cents = 10_000_000_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoneyError {
    #[error("unparseable money value {0:?}")]
    Unparseable(String),
    #[error("negative money value {0:?}")]
    Negative(String),
}

/// Parses a dollar amount such as `"$22,700.00"`, `"30000"` or `" 12.5 "` into cents.
///
/// A leading `$`, thousands separators and surrounding whitespace are ignored. At most two
/// fractional digits are accepted.
pub fn parse_money(raw: &str) -> Result<Cents, MoneyError> {
    let unparseable = || MoneyError::Unparseable(raw.to_string());
    let mut s = raw.trim();
    let mut negative = false;
    if let Some(rest) = s.strip_prefix('-') {
        negative = true;
        s = rest.trim_start();
    }
    if let Some(rest) = s.strip_prefix('$') {
        s = rest.trim_start();
    }
    if !negative {
        if let Some(rest) = s.strip_prefix('-') {
            negative = true;
            s = rest.trim_start();
        }
    }

    let (whole, frac) = match s.split_once('.') {
        Some((w, f)) => (w, Some(f)),
        None => (s, None),
    };
    if whole.is_empty() && frac.map_or(true, str::is_empty) {
        return Err(unparseable());
    }
    if whole.starts_with(',') || whole.ends_with(',') || whole.contains(",,") {
        return Err(unparseable());
    }

    let mut dollars: i64 = 0;
    for b in whole.bytes() {
        match b {
            b',' => {}
            b'0'..=b'9' => {
                dollars = dollars
                    .checked_mul(10)
                    .and_then(|d| d.checked_add(i64::from(b - b'0')))
                    .ok_or_else(unparseable)?;
            }
            _ => return Err(unparseable()),
        }
    }

    let cents_part = match frac {
        None => 0,
        Some(f) if f.is_empty() || f.len() > 2 || !f.bytes().all(|b| b.is_ascii_digit()) => {
            return Err(unparseable())
        }
        Some(f) => {
            let v: i64 = f.parse().map_err(|_| unparseable())?;
            if f.len() == 1 {
                v * 10
            } else {
                v
            }
        }
    };

    let cents = dollars
        .checked_mul(100)
        .and_then(|d| d.checked_add(cents_part))
        .filter(|c| *c <= MAX_CENTS)
        .ok_or_else(unparseable)?;
    if negative && cents != 0 {
        return Err(MoneyError::Negative(raw.to_string()));
    }
    Ok(cents)
}

/// Formats cents as a plain dollar string with exactly two decimals, e.g. `2270000` → `"22700.00"`.
pub fn format_money(cents: Cents) -> String {
    let sign = if cents < 0 { "-" } else { "" };
    let abs = cents.unsigned_abs();
    format!("{sign}{}.{:02}", abs / 100, abs % 100)
}

/// Rounds the exact ratio `numerator / denominator` to the nearest integer, halves away from zero.
pub(crate) fn round_ratio(numerator: i128, denominator: i128) -> i128 {
    debug_assert!(denominator > 0);
    let q = numerator.div_euclid(denominator);
    let r = numerator.rem_euclid(denominator);
    // q + r/d with 0 <= r < d
    match (2 * r).cmp(&denominator) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            if numerator >= 0 {
                q + 1
            } else {
                q
            }
        }
    }
}
