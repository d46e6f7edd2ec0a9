//! Distance/mask → navigation action → 4-bit command code.

use std::fmt;

use serde::Serialize;

use crate::obstacle::ObstacleMask;

/// Beyond this distance the chair goes straight.
pub const GO_STRAIGHT_ABOVE_MM: f64 = 750.0;
/// At or below this distance the chair stops.
pub const STOP_AT_OR_BELOW_MM: f64 = 600.0;
/// Lowest row considered when locating the nearest obstacle in a column.
pub const SIDE_BIAS_LAST_ROW: usize = 210;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Action {
    GoStraight,
    TurnLeft,
    TurnRight,
    Stop,
}

impl Action {
    pub fn name(self) -> &'static str {
        match self {
            Action::GoStraight => "GoStraight",
            Action::TurnLeft => "TurnLeft",
            Action::TurnRight => "TurnRight",
            Action::Stop => "Stop",
        }
    }

    pub fn code(self) -> CommandCode {
        CommandCode(match self {
            Action::GoStraight => 1,
            Action::TurnRight => 4,
            Action::TurnLeft => 8,
            Action::Stop => 0,
        })
    }

    pub fn is_turn(self) -> bool {
        matches!(self, Action::TurnLeft | Action::TurnRight)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Output-port value: one LED per direction, all off for stop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct CommandCode(u8);

impl CommandCode {
    pub const STOP: CommandCode = CommandCode(0);
    pub const FRONT: CommandCode = CommandCode(1);
    pub const BACK: CommandCode = CommandCode(2);
    pub const RIGHT: CommandCode = CommandCode(4);
    pub const LEFT: CommandCode = CommandCode(8);

    pub fn value(self) -> u8 {
        self.0
    }
}

impl fmt::Display for CommandCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Code for a recognized vocabulary word; `None` for words outside the vocabulary.
/// "reverse" has no dedicated output line and maps to stop.
pub fn word_code(word: &str) -> Option<CommandCode> {
    Some(match word {
        "front" => CommandCode::FRONT,
        "back" => CommandCode::BACK,
        "right" => CommandCode::RIGHT,
        "left" => CommandCode::LEFT,
        "stop" | "reverse" => CommandCode::STOP,
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NavDecision {
    pub action: Action,
    pub distance_mm: f64,
    /// Mean nearest-obstacle row over the left and right thirds.
    pub side_means: (f64, f64),
}

impl NavDecision {
    pub fn code(&self) -> CommandCode {
        self.action.code()
    }
}

/// `(left_mean, right_mean)` of the per-column lowest obstacle row (≤ 210,
/// 0 when the column is clear) over the outer thirds; the middle third is
/// ignored. Both thirds are `ceil(w / 3)` wide so mirroring swaps them exactly.
pub fn side_means(mask: &ObstacleMask) -> (f64, f64) {
    let (w, h) = (mask.width(), mask.height());
    let last = SIDE_BIAS_LAST_ROW.min(h.saturating_sub(1));
    let lowest = |col: usize| -> f64 {
        (0..=last).rev().find(|&r| mask.get(r, col)).unwrap_or(0) as f64
    };
    let third = w.div_ceil(3);
    let mean = |cols: std::ops::Range<usize>| -> f64 {
        let n = cols.len();
        if n == 0 {
            0.0
        } else {
            cols.map(lowest).sum::<f64>() / n as f64
        }
    };
    (mean(0..third.min(w)), mean(w.saturating_sub(third)..w))
}

/// Safer side to turn toward: the third whose obstacles sit higher in the
/// image (further away). Exact ties go right.
pub fn side_bias(mask: &ObstacleMask) -> Side {
    let (l, r) = side_means(mask);
    if l < r {
        Side::Left
    } else {
        Side::Right
    }
}

pub fn decide(distance_mm: f64, mask: &ObstacleMask) -> NavDecision {
    let side_means = side_means(mask);
    let action = if distance_mm > GO_STRAIGHT_ABOVE_MM {
        Action::GoStraight
    } else if distance_mm > STOP_AT_OR_BELOW_MM {
        if side_means.0 < side_means.1 {
            Action::TurnLeft
        } else {
            Action::TurnRight
        }
    } else {
        Action::Stop
    };
    NavDecision {
        action,
        distance_mm,
        side_means,
    }
}
