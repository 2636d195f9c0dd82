//! Integer lists on the command line: `7`, `3,5,9`, `3:99` or `3:99:4`.

use clonemacro::{Error, Result};

/// Parses a list or inclusive range; `default_step` applies to `a:b`.
pub fn parse_list(spec: &str, default_step: usize) -> Result<Vec<usize>> {
    let bad = |what: &str| Error::Domain(format!("cannot parse '{spec}' as an integer list: {what}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad(s));
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let (start, end, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, default_step),
            [a, b, s] => (num(a)?, num(b)?, num(s)?),
            _ => return Err(bad("expected start:end or start:end:step")),
        };
        if step == 0 || end < start {
            return Err(bad("empty range"));
        }
        Ok((start..=end).step_by(step).collect())
    } else {
        spec.split(',').map(num).collect()
    }
}

/// Like [`parse_list`] with step 2, and every entry must be odd.
pub fn parse_odd_list(spec: &str) -> Result<Vec<usize>> {
    let v = parse_list(spec, 2)?;
    if let Some(n) = v.iter().find(|&&n| n % 2 == 0) {
        return Err(Error::UnsupportedInput(format!(
            "N = {n}: only odd register sizes are supported (the cloner output is defined for odd N)"
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_list("7", 1).unwrap(), vec![7]);
        assert_eq!(parse_list("3, 5,9", 1).unwrap(), vec![3, 5, 9]);
        assert_eq!(parse_list("1:4", 1).unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_list("3:11:4", 1).unwrap(), vec![3, 7, 11]);
        assert_eq!(parse_odd_list("3:9").unwrap(), vec![3, 5, 7, 9]);
    }

    #[test]
    fn rejects() {
        assert!(parse_list("5:3", 1).is_err());
        assert!(parse_list("a", 1).is_err());
        assert!(parse_list("1:2:0", 1).is_err());
        assert!(matches!(parse_odd_list("4"), Err(Error::UnsupportedInput(_))));
    }
}
