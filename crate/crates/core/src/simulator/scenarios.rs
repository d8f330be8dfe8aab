//! Named five-individual scenes in a 40 x 40 cm arena at 60 fps, each
//! mirroring one behavioral condition: stimulus-following (fast rotation),
//! free schooling (no stimulus response), a switch from stimulus-driven to
//! internally coordinated motion, a single strong leader, and heterogeneous
//! stimulus responsiveness.

use std::f64::consts::TAU;

use crate::estimate::WeightMatrix;
use crate::geometry::{Sense, StimulusField, Vec2};

use super::{Arena, Regime, ScenarioSpec};

/// Angular speeds of the rotating pattern, degrees per frame.
pub const SLOW_DEG_PER_FRAME: f64 = 0.286;
pub const MEDIUM_DEG_PER_FRAME: f64 = 0.572;
pub const FAST_DEG_PER_FRAME: f64 = 1.144;

pub const BUILTIN_NAMES: [&str; 6] = [
    "stim-follow",
    "free-school",
    "decouple",
    "leader",
    "hetero-stim",
    "homo-stim",
];

const N: usize = 5;
/// 35 s at 60 fps.
const FRAMES: usize = 2100;
const ARENA_SIDE: f64 = 40.0;
const LEADER: usize = 1;

fn field(speed: f64) -> StimulusField {
    StimulusField::Rotating {
        center: Vec2::new(ARENA_SIDE / 2.0, ARENA_SIDE / 2.0),
        angular_speed_deg_per_frame: speed,
        sense: Sense::Clockwise,
    }
}

/// Preferred directions spread evenly so the autonomous drives cancel out
/// and the group centroid does not drift into a wall.
fn spread_dirs() -> Vec<Vec2> {
    (0..N)
        .map(|i| Vec2::new(1.0, 0.0).rotated(0.3 + TAU * i as f64 / N as f64))
        .collect()
}

/// An irregular ring around the rotation center.
fn initial_positions() -> Vec<Vec2> {
    let center = Vec2::new(ARENA_SIDE / 2.0, ARENA_SIDE / 2.0);
    (0..N)
        .map(|i| {
            let radius = 1.0 + 0.3 * i as f64;
            center + Vec2::new(radius, 0.0).rotated(0.7 + 1.3 * i as f64)
        })
        .collect()
}

fn regime(
    start: usize,
    end: usize,
    attraction: impl Fn(usize, usize) -> f64,
    autonomy: &[f64],
    stim: &[f64],
) -> Regime {
    let mut weights = WeightMatrix::zeros(N);
    for i in 0..N {
        for j in 0..N {
            weights.set(i, j, if i == j { autonomy[i] } else { attraction(i, j) });
        }
    }
    Regime {
        start,
        end,
        weights,
        stim_weights: stim.to_vec(),
        preferred_dirs: spread_dirs()
            .into_iter()
            .zip(autonomy)
            .map(|(d, &w)| if w > 0.0 { d } else { Vec2::ZERO })
            .collect(),
    }
}

fn scene(name: &str, speed: f64, seed: u64, schedule: Vec<Regime>) -> ScenarioSpec {
    ScenarioSpec {
        name: name.to_owned(),
        num_individuals: N,
        num_frames: FRAMES,
        frame_period: 1.0 / 60.0,
        length_unit: "cm".to_owned(),
        initial_positions: initial_positions(),
        schedule,
        stimulus: field(speed),
        noise_sigma: 0.01,
        lag_frames: 3,
        window_len: 30,
        seed,
        arena: Arena::square(ARENA_SIDE),
    }
}

/// All built-in scenes, in [`BUILTIN_NAMES`] order.
pub fn builtin_scenarios() -> Vec<ScenarioSpec> {
    BUILTIN_NAMES
        .iter()
        .map(|name| builtin_scenario(name).expect("every listed name is defined"))
        .collect()
}

pub fn builtin_scenario(name: &str) -> Option<ScenarioSpec> {
    let uniform = |w: f64| move |_: usize, _: usize| w;
    let spec = match name {
        "stim-follow" => scene(
            name,
            FAST_DEG_PER_FRAME,
            101,
            vec![regime(0, FRAMES, uniform(0.05), &[0.06; N], &[0.1; N])],
        ),
        // The stimulus column stays in the model; the group simply ignores it.
        "free-school" => scene(
            name,
            SLOW_DEG_PER_FRAME,
            102,
            vec![regime(0, FRAMES, uniform(0.1), &[0.12; N], &[0.0; N])],
        ),
        "decouple" => {
            let half = FRAMES / 2;
            scene(
                name,
                FAST_DEG_PER_FRAME,
                103,
                vec![
                    regime(0, half, uniform(0.08), &[0.04; N], &[0.1; N]),
                    regime(half, FRAMES, uniform(0.08), &[0.12; N], &[0.01; N]),
                ],
            )
        }
        // Followers are pulled hard toward the leader and lightly toward the
        // next follower in a ring; the leader is held near the group by a
        // weak pull toward everyone.
        "leader" => {
            let followers: Vec<usize> = (0..N).filter(|&i| i != LEADER).collect();
            let attraction = |i: usize, j: usize| {
                if i == LEADER {
                    0.03
                } else if j == LEADER {
                    0.2
                } else {
                    let pos = followers.iter().position(|&f| f == i).unwrap();
                    if followers[(pos + 1) % followers.len()] == j {
                        0.05
                    } else {
                        0.0
                    }
                }
            };
            let stim: Vec<f64> = (0..N).map(|i| if i == LEADER { 0.15 } else { 0.0 }).collect();
            scene(
                name,
                FAST_DEG_PER_FRAME,
                104,
                vec![regime(0, FRAMES, attraction, &[0.05; N], &stim)],
            )
        }
        // Stimulus shares 0.4 : 0.3 : 0.2 : 0.1 : 0.
        "hetero-stim" => {
            let stim: Vec<f64> = [0.4, 0.3, 0.2, 0.1, 0.0].iter().map(|s| 0.25 * s).collect();
            scene(
                name,
                MEDIUM_DEG_PER_FRAME,
                105,
                vec![regime(0, FRAMES, uniform(0.08), &[0.06; N], &stim)],
            )
        }
        // Same total stimulus weight as hetero-stim, spread evenly.
        "homo-stim" => scene(
            name,
            MEDIUM_DEG_PER_FRAME,
            106,
            vec![regime(0, FRAMES, uniform(0.08), &[0.06; N], &[0.05; N])],
        ),
        _ => return None,
    };
    Some(spec)
}
