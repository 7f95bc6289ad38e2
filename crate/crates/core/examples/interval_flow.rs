//! Continuous symmetrization of a finite union of intervals: collision
//! times, merging, and the centred limit.
//!
//! `cargo run --release --example interval_flow`

use steiner_lab::interval::{flow_set, next_merge_time, Interval, IntervalSet};

fn show(label: &str, set: &IntervalSet) {
    let parts: Vec<String> = set.intervals().iter().map(|iv| format!("({:+.6}, {:+.6})", iv.a, iv.b)).collect();
    println!("{label:>12}: {}  measure {:.6}", parts.join(" "), set.measure());
}

fn main() -> steiner_lab::Result<()> {
    let set = IntervalSet::new(vec![Interval::new(-6.0, -5.0)?, Interval::new(-3.0, -1.0)?, Interval::new(1.0, 3.0)?, Interval::new(4.0, 4.5)?])?;
    show("t = 0", &set);

    // step from one merge to the next
    let (mut current, mut elapsed) = (set.clone(), 0.0);
    while let Some(ev) = next_merge_time(&current) {
        if !ev.time.is_finite() {
            break;
        }
        elapsed += ev.time;
        current = flow_set(&current, ev.time);
        println!("merge of intervals {} and {} at t = {elapsed:.9}", ev.left_index, ev.right_index);
        show(&format!("t = {elapsed:.3}"), &current);
    }

    // the flow is a semigroup, so one long step lands in the same place
    show("one step", &flow_set(&set, elapsed));
    show("t = inf", &flow_set(&set, f64::INFINITY));
    Ok(())
}
