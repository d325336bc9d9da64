//! Deterministic trial parallelism. Each trial is a pure function of its
//! index, workers steal indices from a shared counter, and results are
//! merged back in index order, so the output is bitwise identical at every
//! thread count. On error the lowest failing index wins.

use std::sync::atomic::{AtomicUsize, Ordering};

pub fn map_trials<T, E, F>(trials: usize, threads: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync,
{
    if trials == 0 {
        return Ok(Vec::new());
    }
    let threads = threads.clamp(1, trials);
    if threads == 1 {
        return (0..trials).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let chunks: Vec<Vec<(usize, Result<T, E>)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                scope.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= trials {
                            break;
                        }
                        local.push((i, f(i)));
                    }
                    local
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut slots: Vec<Option<Result<T, E>>> = Vec::with_capacity(trials);
    slots.resize_with(trials, || None);
    for chunk in chunks {
        for (i, r) in chunk {
            slots[i] = Some(r);
        }
    }
    slots
        .into_iter()
        .map(|s| s.expect("every index claimed"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_values_are_thread_count_independent() {
        let f = |i: usize| -> Result<u64, ()> { Ok((i as u64).wrapping_mul(0x9e3779b97f4a7c15)) };
        let serial = map_trials(1000, 1, f).unwrap();
        for threads in [2, 3, 8] {
            assert_eq!(map_trials(1000, threads, f).unwrap(), serial);
        }
    }

    #[test]
    fn first_error_by_index_wins() {
        let f = |i: usize| -> Result<usize, usize> {
            if i % 7 == 3 {
                Err(i)
            } else {
                Ok(i)
            }
        };
        for threads in [1, 4] {
            assert_eq!(map_trials(100, threads, f).unwrap_err(), 3);
        }
    }
}
