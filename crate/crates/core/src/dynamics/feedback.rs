use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

/// Gradient queried at iteration `origin`, delivered at iteration `arrival`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackMessage {
    pub origin: u64,
    pub gradient: Vec<f64>,
    pub arrival: u64,
}

impl FeedbackMessage {
    pub fn new(origin: u64, gradient: Vec<f64>, arrival: u64) -> Self {
        assert!(arrival >= origin, "feedback cannot arrive before it is generated");
        FeedbackMessage {
            origin,
            gradient,
            arrival,
        }
    }
}

struct Pending(FeedbackMessage);

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.0.arrival, self.0.origin).cmp(&(other.0.arrival, other.0.origin))
    }
}

/// Undelivered feedback, one min-heap per player keyed by arrival.
pub struct MessageStore {
    queues: Vec<BinaryHeap<Reverse<Pending>>>,
}

impl MessageStore {
    pub fn new(players: usize) -> Self {
        MessageStore {
            queues: (0..players).map(|_| BinaryHeap::new()).collect(),
        }
    }

    pub fn push(&mut self, player: usize, message: FeedbackMessage) {
        self.queues[player].push(Reverse(Pending(message)));
    }

    /// Removes and returns the messages for `player` arriving in
    /// `(k - 1, k]`, in ascending origin order.
    ///
    /// Arrivals are integral, so as long as every earlier iteration was
    /// drained this is exactly the set with `arrival == k`.
    pub fn deliver(&mut self, player: usize, k: u64) -> Vec<FeedbackMessage> {
        let queue = &mut self.queues[player];
        let mut out = Vec::new();
        while queue.peek().is_some_and(|m| m.0 .0.arrival <= k) {
            let Reverse(Pending(m)) = queue.pop().expect("peeked");
            debug_assert_eq!(m.arrival, k, "message left undelivered past its arrival");
            out.push(m);
        }
        out
    }

    pub fn pending(&self, player: usize) -> usize {
        self.queues[player].len()
    }
}
