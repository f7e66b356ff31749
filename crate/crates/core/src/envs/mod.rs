//! Environments: the two-step coordination game and grid soccer.

pub mod coordination;
pub mod soccer;

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use soccer::{OpponentKind, SoccerConfig};

/// Named scenarios selectable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    Coordination,
    Soccer(OpponentKind),
    SoccerTwoOnTwo,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::Coordination,
        Scenario::Soccer(OpponentKind::Random),
        Scenario::Soccer(OpponentKind::Greedy),
        Scenario::Soccer(OpponentKind::Defensive),
        Scenario::SoccerTwoOnTwo,
    ];

    pub fn is_soccer(self) -> bool {
        !matches!(self, Scenario::Coordination)
    }

    /// Soccer configuration, `None` for the coordination game.
    pub fn soccer_config(self, pass_enabled: bool) -> Option<SoccerConfig> {
        let cfg = match self {
            Scenario::Coordination => return None,
            Scenario::Soccer(kind) => SoccerConfig::one_on_two(kind),
            Scenario::SoccerTwoOnTwo => SoccerConfig::two_on_two(),
        };
        Some(if pass_enabled {
            cfg
        } else {
            cfg.without_pass()
        })
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Coordination => f.write_str("coordination"),
            Scenario::Soccer(kind) => write!(f, "soccer-{}", kind.name()),
            Scenario::SoccerTwoOnTwo => f.write_str("soccer-2v2"),
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.to_string() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))
    }
}
