use serde::Serialize;

/// One tooth of an AoI sawtooth: the age grows from `start_age` with slope 1
/// for `duration`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start: f64,
    pub start_age: f64,
    pub duration: f64,
}

/// Per-point AoI bookkeeping with exact integration over the observation
/// window `[warmup, horizon]`.
#[derive(Debug, Clone)]
pub struct AoiTracker {
    window: (f64, f64),
    s_values: Vec<f64>,
    generation: Vec<f64>,
    integrated_to: Vec<f64>,
    age_integral: Vec<f64>,
    lst_integral: Vec<f64>,
    deliveries: Vec<u64>,
    queue_len: Vec<u32>,
    queue_since: Vec<f64>,
    queue_integral: Vec<f64>,
    paths: Option<Vec<Vec<Segment>>>,
}

fn ramp_lst(s: f64, age0: f64, tau: f64) -> f64 {
    if s == 0.0 {
        tau
    } else {
        (-s * age0).exp() * -(-s * tau).exp_m1() / s
    }
}

impl AoiTracker {
    /// All ages start at 0 at time 0 with empty queues.
    pub fn new(points: usize, window: (f64, f64), s_values: &[f64], record_paths: bool) -> Self {
        Self {
            window,
            s_values: s_values.to_vec(),
            generation: vec![0.0; points],
            integrated_to: vec![0.0; points],
            age_integral: vec![0.0; points],
            lst_integral: vec![0.0; points * s_values.len()],
            deliveries: vec![0; points],
            queue_len: vec![0; points],
            queue_since: vec![0.0; points],
            queue_integral: vec![0.0; points],
            paths: record_paths.then(|| vec![Vec::new(); points]),
        }
    }

    fn clip(&self, t0: f64, t1: f64) -> Option<(f64, f64)> {
        let lo = t0.max(self.window.0);
        let hi = t1.min(self.window.1);
        (hi > lo).then_some((lo, hi))
    }

    fn advance(&mut self, point: usize, t: f64) {
        let t0 = self.integrated_to[point];
        let u = self.generation[point];
        if let Some(paths) = &mut self.paths {
            if t > t0 {
                paths[point].push(Segment {
                    start: t0,
                    start_age: t0 - u,
                    duration: t - t0,
                });
            }
        }
        if let Some((lo, hi)) = self.clip(t0, t) {
            let age0 = lo - u;
            let tau = hi - lo;
            self.age_integral[point] += tau * (age0 + 0.5 * tau);
            let k = self.s_values.len();
            for (j, &s) in self.s_values.iter().enumerate() {
                self.lst_integral[point * k + j] += ramp_lst(s, age0, tau);
            }
        }
        self.integrated_to[point] = t;
    }

    /// Records delivery at time `t` of a packet generated at `generated`.
    pub fn deliver(&mut self, point: usize, t: f64, generated: f64) {
        debug_assert!(generated > self.generation[point] && generated <= t);
        self.advance(point, t);
        self.generation[point] = generated;
        if t >= self.window.0 && t <= self.window.1 {
            self.deliveries[point] += 1;
        }
    }

    pub fn set_queue(&mut self, point: usize, t: f64, len: u32) {
        if let Some((lo, hi)) = self.clip(self.queue_since[point], t) {
            self.queue_integral[point] += f64::from(self.queue_len[point]) * (hi - lo);
        }
        self.queue_since[point] = t;
        self.queue_len[point] = len;
    }

    /// Closes every path at the horizon and returns per-point statistics.
    pub fn finish(mut self) -> (Vec<PointAoiStats>, Option<Vec<Vec<Segment>>>) {
        let end = self.window.1;
        let span = end - self.window.0;
        let k = self.s_values.len();
        let mut stats = Vec::with_capacity(self.generation.len());
        for i in 0..self.generation.len() {
            self.advance(i, end);
            self.set_queue(i, end, self.queue_len[i]);
            stats.push(PointAoiStats {
                mean_age: self.age_integral[i] / span,
                lst: self.lst_integral[i * k..(i + 1) * k].iter().map(|v| v / span).collect(),
                deliveries: self.deliveries[i],
                mean_queue: self.queue_integral[i] / span,
            });
        }
        (stats, self.paths)
    }
}

/// Time averages of one point over the observation window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointAoiStats {
    pub mean_age: f64,
    /// `(1/T)∫e^{-sΔ(t)}dt` for each configured `s`.
    pub lst: Vec<f64>,
    pub deliveries: u64,
    /// Time-averaged number of packets in the system.
    pub mean_queue: f64,
}
