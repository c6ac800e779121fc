//! Deterministic future-event-list scheduler.
//!
//! A run is single threaded. Events fire in ascending `(fire_time,
//! sequence_no)` order, sequence numbers being handed out at insertion time,
//! so two events scheduled for the same instant fire in the order they were
//! scheduled. Periodic activations first fire one full interval after t=0.

mod queue;
mod rng;
mod trace;

pub use queue::{Event, EventQueue};
pub use rng::RandomStreams;
pub use trace::{payload_digest, read_trace, write_trace, TraceRecord};

use std::fmt::Debug;

use crate::error::EngineError;

/// Data carried by events. `target` and `kind` end up in the exported trace.
pub trait EventData: Debug {
    fn target(&self) -> String;
    fn kind(&self) -> &'static str;
}

#[derive(Debug, Clone)]
struct Periodic<T> {
    data: T,
    interval: f64,
}

#[derive(Debug, Clone)]
struct Entry<T> {
    data: T,
    /// Index into `Engine::periodics` and the activation counter.
    periodic: Option<(usize, u64)>,
}

/// Simulation clock in hours.
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct SimClock {
    now: f64,
}

impl SimClock {
    pub fn now(&self) -> f64 {
        self.now
    }
}

pub struct Engine<T> {
    clock: SimClock,
    queue: EventQueue<Entry<T>>,
    periodics: Vec<Periodic<T>>,
    trace: Vec<TraceRecord>,
}

impl<T: EventData + Clone> Default for Engine<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: EventData + Clone> Engine<T> {
    pub fn new() -> Self {
        Self {
            clock: SimClock::default(),
            queue: EventQueue::new(),
            periodics: Vec::new(),
            trace: Vec::new(),
        }
    }

    pub fn now(&self) -> f64 {
        self.clock.now
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    /// Schedules a one-shot event. Returns its sequence number.
    pub fn schedule(&mut self, at: f64, data: T) -> Result<u64, EngineError> {
        self.queue.schedule(
            self.clock.now,
            at,
            Entry {
                data,
                periodic: None,
            },
        )
    }

    /// Schedules `data` at `now + delay`.
    pub fn schedule_in(&mut self, delay: f64, data: T) -> Result<u64, EngineError> {
        self.schedule(self.clock.now + delay, data)
    }

    /// Registers a process activation that fires at `interval`, `2·interval`, ...
    pub fn register_periodic(&mut self, data: T, interval: f64) -> Result<(), EngineError> {
        if !(interval > 0.0) || !interval.is_finite() {
            return Err(EngineError::NonPositiveInterval(interval));
        }
        let idx = self.periodics.len();
        self.periodics.push(Periodic {
            data: data.clone(),
            interval,
        });
        self.queue.schedule(
            self.clock.now,
            interval,
            Entry {
                data,
                periodic: Some((idx, 1)),
            },
        )?;
        Ok(())
    }

    /// Removes and returns the next event, moving the clock to its fire time.
    /// `None` means the simulation is exhausted.
    pub fn advance(&mut self) -> Option<(f64, Event<T>)> {
        let ev = self.queue.pop()?;
        self.fire(ev)
    }

    fn fire(&mut self, ev: Event<Entry<T>>) -> Option<(f64, Event<T>)> {
        debug_assert!(ev.fire_time >= self.clock.now);
        self.clock.now = ev.fire_time;
        if let Some((idx, k)) = ev.data.periodic {
            let p = &self.periodics[idx];
            let next = p.interval * (k + 1) as f64;
            let entry = Entry {
                data: p.data.clone(),
                periodic: Some((idx, k + 1)),
            };
            self.queue
                .schedule(self.clock.now, next, entry)
                .expect("periodic activation is always in the future");
        }
        self.trace.push(TraceRecord {
            fire_time: ev.fire_time,
            sequence_no: ev.sequence_no,
            target: ev.data.data.target(),
            kind: ev.data.data.kind().to_string(),
            payload: payload_digest(&ev.data.data),
        });
        Some((
            ev.fire_time,
            Event {
                fire_time: ev.fire_time,
                sequence_no: ev.sequence_no,
                data: ev.data.data,
            },
        ))
    }

    /// Fires every event with `fire_time <= t_end`, handing each to `handler`.
    /// Returns the slice of the trace produced by this call. The clock ends at
    /// `t_end` when the queue still holds later events.
    pub fn run_until<E, F>(&mut self, t_end: f64, mut handler: F) -> Result<&[TraceRecord], E>
    where
        F: FnMut(&mut Self, Event<T>) -> Result<(), E>,
        E: From<EngineError>,
    {
        if t_end < self.clock.now || t_end.is_nan() {
            return Err(EngineError::PastEvent {
                at: t_end,
                now: self.clock.now,
            }
            .into());
        }
        let start = self.trace.len();
        while let Some(t) = self.queue.peek_time() {
            if t > t_end {
                break;
            }
            let ev = self.queue.pop().expect("peeked");
            let (_, ev) = self.fire(ev).expect("event present");
            handler(self, ev)?;
        }
        Ok(&self.trace[start..])
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    pub fn into_trace(self) -> Vec<TraceRecord> {
        self.trace
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Clone, PartialEq)]
    struct Tick(&'static str);

    impl EventData for Tick {
        fn target(&self) -> String {
            "t".into()
        }
        fn kind(&self) -> &'static str {
            self.0
        }
    }

    fn run(engine: &mut Engine<Tick>, t_end: f64) -> Vec<TraceRecord> {
        engine
            .run_until::<EngineError, _>(t_end, |_, _| Ok(()))
            .unwrap()
            .to_vec()
    }

    #[test]
    fn advance_extracts_minimum() {
        let mut e = Engine::new();
        e.schedule(4.0, Tick("Y")).unwrap();
        e.schedule(1.0, Tick("X")).unwrap();
        let (t, ev) = e.advance().unwrap();
        assert_eq!((t, ev.data), (1.0, Tick("X")));
        assert_eq!(e.now(), 1.0);
    }

    #[test]
    fn empty_engine_is_exhausted() {
        let mut e: Engine<Tick> = Engine::new();
        assert!(e.advance().is_none());
    }

    #[test]
    fn periodic_two_hours_over_two_days() {
        let mut e = Engine::new();
        e.register_periodic(Tick("deliver"), 2.0).unwrap();
        let trace = run(&mut e, 48.0);
        let times: Vec<f64> = trace.iter().map(|r| r.fire_time).collect();
        let expected: Vec<f64> = (1..=24).map(|k| 2.0 * k as f64).collect();
        assert_eq!(times, expected);
    }

    #[test]
    fn periodic_four_hours_over_two_days() {
        let mut e = Engine::new();
        e.register_periodic(Tick("source"), 4.0).unwrap();
        let trace = run(&mut e, 48.0);
        assert_eq!(trace.len(), 12);
        assert_eq!(trace.last().unwrap().fire_time, 48.0);
    }

    #[test]
    fn zero_interval_rejected() {
        let mut e = Engine::new();
        assert!(matches!(
            e.register_periodic(Tick("x"), 0.0),
            Err(EngineError::NonPositiveInterval(_))
        ));
        assert!(e.register_periodic(Tick("x"), -1.0).is_err());
    }

    #[test]
    fn zero_horizon_without_t0_events() {
        let mut e = Engine::new();
        e.register_periodic(Tick("x"), 2.5).unwrap();
        assert!(run(&mut e, 0.0).is_empty());
    }

    #[test]
    fn handler_can_schedule_same_instant() {
        let mut e = Engine::new();
        e.schedule(1.0, Tick("a")).unwrap();
        e.schedule(1.0, Tick("b")).unwrap();
        let trace = e
            .run_until::<EngineError, _>(5.0, |eng, ev| {
                if ev.data.0 == "a" {
                    eng.schedule(eng.now(), Tick("c"))?;
                }
                Ok(())
            })
            .unwrap();
        let kinds: Vec<&str> = trace.iter().map(|r| r.kind.as_str()).collect();
        assert_eq!(kinds, ["a", "b", "c"]);
    }

    #[test]
    fn handler_scheduling_in_past_fails() {
        let mut e = Engine::new();
        e.schedule(3.0, Tick("a")).unwrap();
        let res = e.run_until::<EngineError, _>(5.0, |eng, _| {
            eng.schedule(1.0, Tick("late"))?;
            Ok(())
        });
        assert!(matches!(res, Err(EngineError::PastEvent { .. })));
    }
}
