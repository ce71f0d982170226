use approx::assert_relative_eq;
use proptest::prelude::*;
use std::convert::Infallible;
use std::f64::consts::PI;
use tovds::integrate::{integrate_adaptive, Direction, EventSpec, Status, StepControl};

fn ctrl() -> StepControl {
    StepControl::default().with_tolerances(1e-11, 1e-13)
}

#[test]
fn oscillator_dense_output_and_crossings() {
    let events = [EventSpec::new("crossing", |_, y: &[f64; 2]| y[0]).direction(Direction::Any)];
    let sol = integrate_adaptive(
        |_, y: &[f64; 2]| Ok::<_, Infallible>([y[1], -y[0]]),
        [0.0, 1.0],
        (0.0, 10.0 * PI + 0.5),
        &ctrl(),
        &events,
    )
    .unwrap();
    assert_eq!(sol.status(), Status::Completed);
    for i in 0..=1000 {
        let x = 10.0 * PI * i as f64 / 1000.0;
        let y = sol.eval(x).unwrap();
        assert!((y[0] - x.sin()).abs() < 1e-8, "x = {x}");
    }
    let xs: Vec<f64> = sol.events().iter().map(|e| e.x).collect();
    assert_eq!(xs.len(), 10);
    for (k, x) in xs.iter().enumerate() {
        assert_relative_eq!(*x, (k + 1) as f64 * PI, max_relative = 1e-10);
    }
}

#[test]
fn falling_events_skip_rising_crossings() {
    let events = [EventSpec::new("down", |_, y: &[f64; 2]| y[0]).direction(Direction::Falling)];
    let sol = integrate_adaptive(
        |_, y: &[f64; 2]| Ok::<_, Infallible>([y[1], -y[0]]),
        [0.0, 1.0],
        (0.0, 4.0 * PI + 0.5),
        &ctrl(),
        &events,
    )
    .unwrap();
    let xs: Vec<f64> = sol.events().iter().map(|e| e.x).collect();
    assert_eq!(xs.len(), 2);
    assert_relative_eq!(xs[0], PI, max_relative = 1e-10);
    assert_relative_eq!(xs[1], 3.0 * PI, max_relative = 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exponential_decay_is_accurate(k in 0.1f64..20.0, span in 0.5f64..3.0) {
        let sol = integrate_adaptive(
            |_, y: &[f64; 1]| Ok::<_, Infallible>([-k * y[0]]),
            [1.0],
            (0.0, span),
            &ctrl(),
            &[],
        )
        .unwrap();
        let exact = (-k * span).exp();
        prop_assert!((sol.y_end()[0] - exact).abs() <= 1e-8 * exact + 1e-12);
    }

    #[test]
    fn terminal_event_stops_at_root(t0 in 0.2f64..5.0) {
        // y = x, event at y = t0
        let events = [EventSpec::new("hit", move |_, y: &[f64; 1]| y[0] - t0).terminal(true)];
        let sol = integrate_adaptive(|_, _: &[f64; 1]| Ok::<_, Infallible>([1.0]), [0.0], (0.0, 10.0), &ctrl(), &events)
            .unwrap();
        prop_assert_eq!(sol.status(), Status::Terminated { event: 0 });
        prop_assert!((sol.x_end() - t0).abs() < 1e-12);
    }
}
