//! Exhaustive normaliser search over `GSp_4(F_5)`.

use std::sync::atomic::{AtomicUsize, Ordering};

use hvcheck_core::monodromy::{
    generators, normalizer_sweep, sp4_generators, GroupClosure, MatF5, MonodromyError, NormalizerTally, GSP4_ORDER,
    SP4_ORDER,
};
use rayon::prelude::*;

const BLOCK: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepReport {
    pub sp4_order: usize,
    pub tally: NormalizerTally,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.sp4_order == SP4_ORDER
            && self.tally.checked as usize == GSP4_ORDER
            && self.tally.outside_parabolic.is_empty()
    }
}

/// Every element of `Sp_4(F_5)`, by closure of its generators.
pub fn sp4_elements() -> Result<Vec<MatF5>, MonodromyError> {
    let sp4 = GroupClosure::generate(&sp4_generators(), GroupClosure::DEFAULT_CAP)?;
    Ok(sp4.iter().collect())
}

/// Tests every `g` in `GSp_4(F_5)` for normalising the monodromy group.
/// `progress` receives the number of `Sp_4` elements processed so far.
pub fn exhaustive(threads: usize, progress: Option<&(dyn Fn(usize) + Sync)>) -> Result<SweepReport, MonodromyError> {
    let group = GroupClosure::generate(&generators(1)?, GroupClosure::DEFAULT_CAP)?;
    let sp4 = sp4_elements()?;
    let done = AtomicUsize::new(0);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().expect("thread pool");
    let tally = pool.install(|| {
        sp4.par_chunks(BLOCK)
            .map(|block| {
                let t = normalizer_sweep(&group, block.iter().copied());
                let n = done.fetch_add(block.len(), Ordering::Relaxed) + block.len();
                if let Some(f) = progress {
                    f(n);
                }
                t
            })
            .reduce(NormalizerTally::default, NormalizerTally::merge)
    });
    Ok(SweepReport { sp4_order: sp4.len(), tally })
}
