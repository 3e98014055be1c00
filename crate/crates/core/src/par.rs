//! Data-parallel helpers. With the `parallel` feature (default) these
//! fan work out over rayon; without it they run sequentially. Every
//! computation in this crate is exact, so results are independent of the
//! schedule and outputs are collected in index order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map over an index range, in parallel when available.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Map over a slice, in parallel when available.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// True when a parallel backend is compiled in.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let out = map_indexed(100, |i| i * i);
        assert_eq!(out[7], 49);
        assert_eq!(out.len(), 100);
        let doubled = map_slice(&out, |x| x + 1);
        assert_eq!(doubled[3], 10);
    }
}
