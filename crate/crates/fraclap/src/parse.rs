//! Flag-value grammars: domains as interval lists, numeric grids as
//! `lo:hi:step` ranges or comma-separated lists.

use fraclap_core::geometry::Domain;

/// Parses a 1D domain given as semicolon-separated open intervals, each
/// written `a,b` — e.g. `"-1,1"` or `"-1,-0.2;0.2,1"`.
pub fn parse_domain(text: &str) -> Result<Domain, String> {
    let mut intervals = Vec::new();
    for piece in text.split(';') {
        let piece = piece.trim();
        let (a, b) = piece
            .split_once(',')
            .ok_or_else(|| format!("interval `{piece}` is not of the form a,b"))?;
        let a: f64 = a
            .trim()
            .parse()
            .map_err(|_| format!("bad interval endpoint `{a}`"))?;
        let b: f64 = b
            .trim()
            .parse()
            .map_err(|_| format!("bad interval endpoint `{b}`"))?;
        intervals.push((a, b));
    }
    Domain::interval_union(&intervals).map_err(|e| e.to_string())
}

/// Parses either a `lo:hi:step` range (inclusive of both ends up to a
/// relative slack of 1e-9 on the last step) or a comma-separated list.
pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range `{text}` is not of the form lo:hi:step"));
        }
        let lo: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| format!("bad range bound `{}`", parts[0]))?;
        let hi: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| format!("bad range bound `{}`", parts[1]))?;
        let step: f64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("bad range step `{}`", parts[2]))?;
        if !step.is_finite() || step <= 0.0 {
            return Err(format!("range step must be positive, got {step}"));
        }
        if hi < lo {
            return Err(format!("empty range: {lo} > {hi}"));
        }
        let mut out = Vec::new();
        let mut k = 0u64;
        loop {
            let v = lo + k as f64 * step;
            if v > hi + 1e-9 * step.max(hi.abs()) {
                break;
            }
            // snap accumulated round-off to 12 significant digits so grids
            // like 0.1:1.9:0.1 contain 0.3, not 0.30000000000000004
            let snapped: f64 = format!("{v:.12e}").parse().expect("formatted float");
            out.push(snapped);
            k += 1;
        }
        Ok(out)
    } else {
        text.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("bad number `{p}`"))
            })
            .collect()
    }
}

/// Resolves the worker-thread cap: `--threads` flag first, then the
/// `FRACLAP_THREADS` environment variable, else 1.
pub fn effective_threads(flag: Option<usize>) -> Result<usize, String> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var("FRACLAP_THREADS") {
            Ok(text) => text
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("FRACLAP_THREADS=`{text}` is not a count"))?,
            Err(_) => 1,
        },
    };
    if n == 0 {
        return Err(String::from("thread count must be at least 1"));
    }
    Ok(n)
}
