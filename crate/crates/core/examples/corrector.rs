//! One-shot correction of a legacy classifier: one whitened linear
//! discriminant per error sample, no retraining.
//!
//!     cargo run --example corrector

use sepkit::corrector::{audit_corrector, corrected_decision, CorrectedModel, CorrectorBuilder, FnModel, LegacyModel};
use sepkit::geometry::{sample_ball, sample_ball_trial, Point};

fn main() -> sepkit::Result<()> {
    let n = 100;
    // a legacy rule: the sign of the first coordinate
    let legacy = FnModel(|x: &[f64]| if x[0] >= 0.0 { 1 } else { -1 });

    let correct = sample_ball(n, 10_000, 1)?;
    let builder = CorrectorBuilder::new(&correct, true)?;

    // pretend this point was misclassified and should be labelled 7
    let error = Point::new(sample_ball_trial(n, 1, 1, 99)?.point(0).to_vec())?;
    let (corrector, cost) = builder.build_with_cost(&error, 7)?;
    println!("build cost: {cost:?}");
    println!("legacy label {} -> corrected {}", legacy.decide(error.coords()), corrected_decision(&legacy, &corrector, error.coords())?);

    let held_out = sample_ball_trial(n, 10_000, 1, 1)?;
    let audit = audit_corrector(&corrector, &held_out, &error)?;
    println!("audit: {audit:?}");

    let changed = held_out
        .points()
        .filter(|x| corrected_decision(&legacy, &corrector, x).unwrap() != legacy.decide(x))
        .count();
    println!("labels changed on held-out correct points: {changed}");

    // a second correction stacks on top of the first
    let model = CorrectedModel::new(legacy, corrector);
    let second_error = Point::new(sample_ball_trial(n, 1, 1, 100)?.point(0).to_vec())?;
    let second = builder.build(&second_error, -7)?;
    let stacked = CorrectedModel::new(model, second);
    println!(
        "stacked: first error -> {}, second error -> {}",
        stacked.decide(error.coords()),
        stacked.decide(second_error.coords())
    );

    let json = stacked.corrector.to_json()?;
    println!("serialized corrector: {} bytes", json.len());
    Ok(())
}
