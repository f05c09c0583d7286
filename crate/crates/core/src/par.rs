//! Data-parallel helpers with a sequential fallback.
//!
//! Reductions split the input into fixed-size chunks, fold each chunk in
//! order, then merge the chunk results in order. The chunking does not depend
//! on the thread count, so parallel and sequential builds agree bit for bit.

use crate::Result;

/// Number of items folded together before a merge.
pub(crate) const CHUNK: usize = 4;

#[cfg(feature = "parallel")]
pub(crate) fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync + Send,
{
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

/// Chunked fold/merge. `fold` receives the item's index in `items`.
pub(crate) fn reduce<T, A, I, F, M>(items: &[T], init: I, fold: F, merge: M) -> Result<A>
where
    T: Sync,
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, usize, &T) -> Result<()> + Sync + Send,
    M: Fn(&mut A, A),
{
    let chunks: Vec<&[T]> = items.chunks(CHUNK).collect();
    let partials = map(&chunks, |ci, chunk| -> Result<A> {
        let mut acc = init();
        for (j, item) in chunk.iter().enumerate() {
            fold(&mut acc, ci * CHUNK + j, item)?;
        }
        Ok(acc)
    });
    let mut out = init();
    for p in partials {
        merge(&mut out, p?);
    }
    Ok(out)
}
