//! Tiny fixed-size worker pool over scoped threads.

use std::sync::Mutex;

/// Apply `work` to every item with at most `jobs` items in flight,
/// returning results in input order.
pub fn map_bounded<T, R, F>(items: Vec<T>, jobs: usize, work: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let jobs = jobs.max(1).min(items.len().max(1));
    let cursor = Mutex::new(0usize);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let index = {
                    let mut next = cursor.lock().unwrap();
                    let index = *next;
                    *next += 1;
                    index
                };
                let Some(item) = items.get(index) else { break };
                let result = work(item);
                *slots[index].lock().unwrap() = Some(result);
            });
        }
    });

    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .unwrap()
                .expect("worker filled every slot")
        })
        .collect()
}
