use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::EngineError;

/// A scheduled event. Ordering key is `(fire_time, sequence_no)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Event<T> {
    pub fire_time: f64,
    pub sequence_no: u64,
    pub data: T,
}

struct Node<T>(Event<T>);

impl<T> PartialEq for Node<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T> Eq for Node<T> {}

impl<T> PartialOrd for Node<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Node<T> {
    // BinaryHeap is a max-heap, so the comparison is reversed.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .fire_time
            .total_cmp(&self.0.fire_time)
            .then_with(|| other.0.sequence_no.cmp(&self.0.sequence_no))
    }
}

/// Future event list with FIFO tie-break on equal fire times.
pub struct EventQueue<T> {
    heap: BinaryHeap<Node<T>>,
    next_seq: u64,
}

impl<T> Default for EventQueue<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> EventQueue<T> {
    pub fn new() -> Self {
        Self {
            heap: BinaryHeap::new(),
            next_seq: 0,
        }
    }

    /// Enqueues `data` at `at`. `now` is the current clock; scheduling in the
    /// past is rejected.
    pub fn schedule(&mut self, now: f64, at: f64, data: T) -> Result<u64, EngineError> {
        if !at.is_finite() {
            return Err(EngineError::NonFiniteTime(at));
        }
        if at < now {
            return Err(EngineError::PastEvent { at, now });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Node(Event {
            fire_time: at,
            sequence_no: seq,
            data,
        }));
        Ok(seq)
    }

    /// Inserts an event carrying a caller-chosen sequence number. Used when
    /// replaying or when building queues by hand in tests.
    pub fn insert_raw(&mut self, event: Event<T>) {
        self.next_seq = self.next_seq.max(event.sequence_no + 1);
        self.heap.push(Node(event));
    }

    pub fn peek_time(&self) -> Option<f64> {
        self.heap.peek().map(|n| n.0.fire_time)
    }

    pub fn pop(&mut self) -> Option<Event<T>> {
        self.heap.pop().map(|n| n.0)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
