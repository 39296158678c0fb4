use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Formats `x` with 17 significant digits (like C's `%.17g`), enough for a
/// bit-exact round trip through `str::parse::<f64>`.
pub fn sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.16e}")
    }
}

/// Writes `contents` to a temp file beside `path` and renames it into place,
/// so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats() {
        assert_eq!(sig17(0.8), "0.80000000000000004");
        assert_eq!(sig17(0.0), "0");
        assert_eq!(sig17(1.0), "1");
        assert_eq!(sig17(0.25), "0.25");
        assert_eq!(sig17(1e-9), "1.0000000000000001e-9");
    }

    proptest! {
        #[test]
        fn round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            prop_assert_eq!(sig17(x).parse::<f64>().unwrap(), x);
        }
    }
}
