use std::sync::atomic::{AtomicU8, AtomicUsize, Ordering};

/// What the engine is doing while labels are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Phase {
    Fitting = 0,
    Querying = 1,
    Scoring = 2,
}

/// Gatekeeper for ground-truth labels. Every read is counted, and reads of
/// test labels outside the scoring phase are tallied separately so a run can
/// prove it never peeked.
#[derive(Debug)]
pub struct LabelOracle {
    labels: Vec<f64>,
    is_test: Vec<bool>,
    phase: AtomicU8,
    reads: AtomicUsize,
    test_reads_outside_scoring: AtomicUsize,
    test_reads_while_querying: AtomicUsize,
}

impl LabelOracle {
    pub fn new(labels: Vec<f64>, test: &[usize]) -> Self {
        let mut is_test = vec![false; labels.len()];
        for &t in test {
            is_test[t] = true;
        }
        Self {
            labels,
            is_test,
            phase: AtomicU8::new(Phase::Fitting as u8),
            reads: AtomicUsize::new(0),
            test_reads_outside_scoring: AtomicUsize::new(0),
            test_reads_while_querying: AtomicUsize::new(0),
        }
    }

    pub fn set_phase(&self, p: Phase) {
        self.phase.store(p as u8, Ordering::SeqCst);
    }

    pub fn phase(&self) -> Phase {
        match self.phase.load(Ordering::SeqCst) {
            1 => Phase::Querying,
            2 => Phase::Scoring,
            _ => Phase::Fitting,
        }
    }

    pub fn label(&self, id: usize) -> f64 {
        self.reads.fetch_add(1, Ordering::Relaxed);
        if self.is_test[id] {
            match self.phase() {
                Phase::Scoring => {}
                Phase::Querying => {
                    self.test_reads_while_querying.fetch_add(1, Ordering::Relaxed);
                    self.test_reads_outside_scoring.fetch_add(1, Ordering::Relaxed);
                }
                Phase::Fitting => {
                    self.test_reads_outside_scoring.fetch_add(1, Ordering::Relaxed);
                }
            }
        }
        self.labels[id]
    }

    pub fn labels(&self, ids: &[usize]) -> Vec<f64> {
        ids.iter().map(|&i| self.label(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn total_reads(&self) -> usize {
        self.reads.load(Ordering::Relaxed)
    }

    pub fn test_reads_while_querying(&self) -> usize {
        self.test_reads_while_querying.load(Ordering::Relaxed)
    }

    pub fn test_reads_outside_scoring(&self) -> usize {
        self.test_reads_outside_scoring.load(Ordering::Relaxed)
    }
}
