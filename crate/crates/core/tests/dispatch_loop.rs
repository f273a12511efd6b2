mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::random_dispatch_state;
use delivery_dispatch::data::HaversineProvider;
use delivery_dispatch::dispatch::{
    build_task, decide, ingest_events, DispatchState, DispatchedVehicle, FailReason, LoopConfig, Order, TickEvents,
};
use delivery_dispatch::routing::Vehicle;
use delivery_dispatch::solver::{solve, solve_exact, ExactSolver, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn counted(max_attempts: u32) -> LoopConfig {
    LoopConfig { max_attempts: Some(max_attempts), enforce_wall_clock: false, ..Default::default() }
}

/// Smallest multiple of δ (below `cap` steps) at which `solved` holds.
fn threshold(state: &DispatchState, cap: u32, solved: impl Fn(&delivery_dispatch::routing::VrptwTask) -> bool) -> Option<u32> {
    let p = HaversineProvider::default();
    (0..cap).find(|&m| solved(&build_task(state, &p, 120 * m as i64).unwrap()))
}

#[test]
fn exact_solver_stops_at_the_feasibility_threshold() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut relaxed = 0;
    for _ in 0..150 {
        let (k, v) = (rng.random_range(1..=7), rng.random_range(1..=3));
        let s = random_dispatch_state(&mut rng, k, v, (-900, 1500));
        let m = threshold(&s, 40, |t| solve_exact(t).unwrap().is_solved());
        match (m, decide(&s, &HaversineProvider::default(), &ExactSolver, &counted(40))) {
            (Some(m), Ok(d)) => {
                assert_eq!((d.applied_delay, d.attempts), (120 * m as i64, m + 1));
                relaxed += usize::from(m > 0);
            }
            (None, Err(e)) => assert_eq!((e.reason, e.attempts), (FailReason::AttemptsExhausted, 40)),
            (m, r) => panic!("threshold {m:?} but decide gave {r:?}"),
        }
    }
    assert!(relaxed > 20, "{relaxed}");
}

#[test]
fn heuristic_stops_at_its_own_threshold() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for seed in 0..100 {
        let (k, v) = (rng.random_range(1..=25), rng.random_range(1..=5));
        let s = random_dispatch_state(&mut rng, k, v, (-900, 1800));
        let cfg = SolverConfig { rng_seed: seed, time_budget: Duration::from_secs(3600), max_evaluations: Some(2000), ..Default::default() };
        let m = threshold(&s, 30, |t| solve(t, &cfg).is_solved());
        match (m, decide(&s, &HaversineProvider::default(), &cfg, &counted(30))) {
            (Some(m), Ok(d)) => assert_eq!(d.applied_delay, 120 * m as i64),
            (None, Err(e)) => assert_eq!(e.reason, FailReason::AttemptsExhausted),
            (m, r) => panic!("threshold {m:?} but decide gave {r:?}"),
        }
    }
}

#[test]
fn relaxation_is_uniform_and_in_steps_of_delta() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..100 {
        let s = random_dispatch_state(&mut rng, 12, 2, (-600, 1200));
        let Ok(d) = decide(&s, &HaversineProvider::default(), &SolverConfig::default(), &counted(50)) else { continue };
        assert_eq!(d.applied_delay % 120, 0);
        for c in &d.task.customers {
            let o = &s.active_customers[&c.id];
            assert_eq!((c.window_open, c.window_close), (0, o.deadline - s.clock + d.applied_delay));
        }
    }
}

#[test]
fn wall_clock_budget_holds_on_infeasible_episodes() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    // one order further away than the return horizon: no delay helps
    let mut s = random_dispatch_state(&mut rng, 60, 2, (0, 1800));
    s.active_customers.get_mut("o000").unwrap().location.lat += 20.0;
    let cfg = LoopConfig { loop_budget: Duration::from_millis(300), ..Default::default() };
    let t = Instant::now();
    let e = decide(&s, &HaversineProvider::default(), &SolverConfig::default(), &cfg).unwrap_err();
    assert!(t.elapsed() <= Duration::from_millis(350), "{:?}", t.elapsed());
    assert!(matches!(e.reason, FailReason::BudgetExhausted));
}

/// Random event scripts replayed through `ingest_events` and through plain
/// set operations.
#[test]
fn ingest_matches_set_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..50 {
        let mut state = DispatchState::new(delivery_dispatch::data::Location::new(0.0, 0.0), 0);
        let (mut c, mut v): (BTreeSet<String>, BTreeSet<String>) = Default::default();
        let mut away: BTreeSet<String> = (0..4).map(|i| format!("v{i}")).collect();
        let (mut next_order, mut gone) = (0, 0);
        for tick in 1..=10 {
            let mut ev = TickEvents { clock: tick * 60, ..Default::default() };
            for _ in 0..rng.random_range(0..4) {
                let id = format!("o{next_order}");
                next_order += 1;
                ev.new_orders.push(Order {
                    id,
                    placed_at: 0,
                    ready_at: 0,
                    deadline: 3600,
                    location: delivery_dispatch::data::Location::new(0.0, 0.01),
                    demand: 1,
                });
            }
            for id in v.clone() {
                if rng.random_bool(0.3) {
                    let take: Vec<String> = c.iter().filter(|_| rng.random_bool(0.5)).cloned().collect();
                    ev.dispatched.push(DispatchedVehicle { vehicle_id: id, orders: take });
                }
            }
            for id in away.clone() {
                if rng.random_bool(0.4) {
                    ev.returned.push(Vehicle::unlimited(id));
                }
            }
            // at most one vehicle takes any given order
            let mut taken = BTreeSet::new();
            for d in &mut ev.dispatched {
                d.orders.retain(|o| taken.insert(o.clone()));
            }
            state = ingest_events(&state, &ev).unwrap();
            for d in &ev.dispatched {
                v.remove(&d.vehicle_id);
                away.insert(d.vehicle_id.clone());
                for o in &d.orders {
                    c.remove(o);
                    gone += 1;
                }
            }
            for r in &ev.returned {
                away.remove(&r.id);
                v.insert(r.id.clone());
            }
            c.extend(ev.new_orders.iter().map(|o| o.id.clone()));
            assert_eq!(state.active_customers.keys().cloned().collect::<BTreeSet<_>>(), c);
            assert_eq!(state.available_vehicles.keys().cloned().collect::<BTreeSet<_>>(), v);
            assert_eq!(c.len() + gone, next_order);
            assert_eq!(state.clock, tick * 60);
        }
    }
}
