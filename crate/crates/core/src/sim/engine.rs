//! Event loops for the two channel modes.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use std::collections::VecDeque;

use super::tracker::AoiTracker;
use super::{AoiSimParams, ChannelMode};
use crate::model::{Discipline, Scheduler};
use crate::rng::{stream, Purpose, SimRng};

fn exp(rng: &mut SimRng, rate: f64) -> f64 {
    let e: f64 = Exp1.sample(rng);
    e / rate
}

fn erlang(rng: &mut SimRng, stages: usize, rate: f64) -> f64 {
    (0..stages).map(|_| exp(rng, rate)).sum()
}

/// Waiting packets (generation times) at every point.
enum Buffers {
    Fifo(Vec<VecDeque<f64>>),
    Freshest(Vec<Option<f64>>),
}

impl Buffers {
    fn new(discipline: Discipline, points: usize) -> Self {
        match discipline {
            Discipline::Fcfs => Buffers::Fifo(vec![VecDeque::new(); points]),
            Discipline::Lcfs => Buffers::Freshest(vec![None; points]),
        }
    }

    /// Stores a new packet; returns the number waiting afterwards.
    fn arrive(&mut self, point: usize, t: f64) -> u32 {
        match self {
            Buffers::Fifo(q) => {
                q[point].push_back(t);
                q[point].len() as u32
            }
            Buffers::Freshest(slot) => {
                slot[point] = Some(t);
                1
            }
        }
    }

    /// Head-of-line packet under FCFS, the freshest one under LCFS.
    fn take(&mut self, point: usize) -> Option<(f64, u32)> {
        match self {
            Buffers::Fifo(q) => q[point].pop_front().map(|g| (g, q[point].len() as u32)),
            Buffers::Freshest(slot) => slot[point].take().map(|g| (g, 0)),
        }
    }
}

pub(super) fn run(p: &AoiSimParams, seed: u64, replication: u32, tracker: &mut AoiTracker) {
    match p.mode {
        ChannelMode::ChannelLevel => channel_level(p, seed, replication, tracker),
        ChannelMode::Decoupled => {
            for i in 0..p.points {
                match p.scheduler {
                    Scheduler::UniformRandom => decoupled_exponential(p, seed, replication, i, tracker),
                    Scheduler::RoundRobin => decoupled_erlang(p, seed, replication, i, tracker),
                }
            }
        }
    }
}

/// One shared channel: epochs of exponential(mu) length back to back; each
/// epoch end grants one point (uniform pick or cyclic token), which delivers
/// its selected packet at that instant if it has one.
fn channel_level(p: &AoiSimParams, seed: u64, replication: u32, tracker: &mut AoiTracker) {
    let m = p.points;
    let horizon = p.horizon;
    let mut arrivals = stream(seed, replication, 0, Purpose::Arrivals);
    let mut channel = stream(seed, replication, 0, Purpose::Channel);
    let total_rate = p.lambda_t * m as f64;
    let mut buffers = Buffers::new(p.discipline, m);
    let mut next_arrival = exp(&mut arrivals, total_rate);
    let mut next_epoch = exp(&mut channel, p.mu);
    let mut token = 0usize;
    loop {
        if next_arrival <= next_epoch {
            let t = next_arrival;
            if t > horizon {
                break;
            }
            let i = if m == 1 { 0 } else { arrivals.random_range(0..m) };
            let len = buffers.arrive(i, t);
            tracker.set_queue(i, t, len);
            next_arrival = t + exp(&mut arrivals, total_rate);
        } else {
            let t = next_epoch;
            if t > horizon {
                break;
            }
            let i = match p.scheduler {
                Scheduler::UniformRandom => channel.random_range(0..m),
                Scheduler::RoundRobin => {
                    let i = token;
                    token = (token + 1) % m;
                    i
                }
            };
            if let Some((g, len)) = buffers.take(i) {
                tracker.deliver(i, t, g);
                tracker.set_queue(i, t, len);
            }
            next_epoch = t + exp(&mut channel, p.mu);
        }
    }
}

/// A point on its own with exponential(mu0) service. By memorylessness the
/// service opportunities form a Poisson(mu0) process independent of the queue.
fn decoupled_exponential(p: &AoiSimParams, seed: u64, replication: u32, i: usize, tracker: &mut AoiTracker) {
    let idx = i as u32;
    let mut arrivals = stream(seed, replication, idx, Purpose::Arrivals);
    let mut service = stream(seed, replication, idx, Purpose::Service);
    let mu0 = p.mu / p.points as f64;
    let mut buffers = Buffers::new(p.discipline, 1);
    let mut next_arrival = exp(&mut arrivals, p.lambda_t);
    let mut next_service = exp(&mut service, mu0);
    loop {
        if next_arrival <= next_service {
            let t = next_arrival;
            if t > p.horizon {
                break;
            }
            let len = buffers.arrive(0, t);
            tracker.set_queue(i, t, len);
            next_arrival = t + exp(&mut arrivals, p.lambda_t);
        } else {
            let t = next_service;
            if t > p.horizon {
                break;
            }
            if let Some((g, len)) = buffers.take(0) {
                tracker.deliver(i, t, g);
                tracker.set_queue(i, t, len);
            }
            next_service = t + exp(&mut service, mu0);
        }
    }
}

/// A point on its own with Erlang(M, mu) service starting when a packet
/// enters an idle server; service is non-preemptive.
fn decoupled_erlang(p: &AoiSimParams, seed: u64, replication: u32, i: usize, tracker: &mut AoiTracker) {
    let idx = i as u32;
    let mut arrivals = stream(seed, replication, idx, Purpose::Arrivals);
    let mut service = stream(seed, replication, idx, Purpose::Service);
    let stages = p.points;
    let mut in_service: Option<f64> = None;
    let mut completion = f64::INFINITY;
    let mut buffers = Buffers::new(p.discipline, 1);
    let mut waiting = 0u32;
    let mut next_arrival = exp(&mut arrivals, p.lambda_t);
    loop {
        if next_arrival <= completion {
            let t = next_arrival;
            if t > p.horizon {
                break;
            }
            if in_service.is_none() {
                in_service = Some(t);
                completion = t + erlang(&mut service, stages, p.mu);
            } else {
                waiting = buffers.arrive(0, t);
            }
            tracker.set_queue(i, t, waiting + 1);
            next_arrival = t + exp(&mut arrivals, p.lambda_t);
        } else {
            let t = completion;
            if t > p.horizon {
                break;
            }
            if let Some(g) = in_service.take() {
                tracker.deliver(i, t, g);
            }
            match buffers.take(0) {
                Some((g, len)) => {
                    waiting = len;
                    in_service = Some(g);
                    completion = t + erlang(&mut service, stages, p.mu);
                }
                None => {
                    waiting = 0;
                    completion = f64::INFINITY;
                }
            }
            tracker.set_queue(i, t, waiting + u32::from(in_service.is_some()));
        }
    }
}
