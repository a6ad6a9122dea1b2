//! Bisection over a sorted candidate list.

/// Outcome of one probe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probe {
    pub index: usize,
    pub value: f64,
    pub feasible: bool,
}

/// Finds the smallest feasible index by bisection, keeping `hi` feasible.
/// The top candidate is probed first; if it fails there is no answer.
/// Returns the last feasible index, its payload and every probe made.
pub fn bisect<T, F>(values: &[f64], probe: F) -> (Option<(usize, T)>, Vec<Probe>)
where
    F: FnMut(usize, f64) -> Option<T>,
{
    bisect_by(values.len(), |i| values[i], probe)
}

/// As `bisect`, over `len` sorted candidates produced on demand.
pub fn bisect_by<T, V, F>(len: usize, mut value: V, mut probe: F) -> (Option<(usize, T)>, Vec<Probe>)
where
    V: FnMut(usize) -> f64,
    F: FnMut(usize, f64) -> Option<T>,
{
    let mut log = Vec::new();
    if len == 0 {
        return (None, log);
    }
    let mut hi = len - 1;
    let top = value(hi);
    let mut best = match probe(hi, top) {
        Some(t) => t,
        None => {
            log.push(Probe { index: hi, value: top, feasible: false });
            return (None, log);
        }
    };
    log.push(Probe { index: hi, value: top, feasible: true });
    // `lo` is one below the lowest index not yet ruled out.
    let mut lo: isize = -1;
    while hi as isize - lo > 1 {
        let mid = ((lo + hi as isize) / 2) as usize;
        let v = value(mid);
        match probe(mid, v) {
            Some(t) => {
                log.push(Probe { index: mid, value: v, feasible: true });
                hi = mid;
                best = t;
            }
            None => {
                log.push(Probe { index: mid, value: v, feasible: false });
                lo = mid as isize;
            }
        }
    }
    (Some((hi, best)), log)
}

/// Probes where a smaller radius succeeded after a larger one failed.
pub fn monotonicity_violations(log: &[Probe]) -> usize {
    let mut v = 0;
    for a in log {
        for b in log {
            if a.feasible && !b.feasible && b.value > a.value {
                v += 1;
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_threshold() {
        let vals: Vec<f64> = (0..20).map(f64::from).collect();
        let (r, log) = bisect(&vals, |_, v| (v >= 7.0).then_some(v));
        assert_eq!(r, Some((7, 7.0)));
        assert!(log.len() <= 7);
        assert_eq!(monotonicity_violations(&log), 0);
    }

    #[test]
    fn infeasible_top() {
        let (r, _) = bisect(&[1.0, 2.0], |_, _| None::<()>);
        assert!(r.is_none());
    }
}
