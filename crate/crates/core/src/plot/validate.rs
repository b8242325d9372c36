//! Rule-based repair of parsed order lists.
//!
//! Rules, applied per character in order:
//!
//! * an unsupported motion type keeps only the walk to its object;
//! * other unparseable items are removed;
//! * objects missing from the catalog become `Locomotion(None)`;
//! * HHI commands beyond the other character's HHI count become
//!   `Locomotion(None)` placeholders.
//!
//! Every changed or removed item yields one warning carrying its input index.

use std::fmt;

use super::command::{Command, CommandScript, InvalidReason, Order};
use super::scene::SceneCatalog;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Character {
    A,
    B,
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Character::A => "A",
            Character::B => "B",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub character: Character,
    /// Position of the affected item in the input list.
    pub index: usize,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "orders {} item {}: {}",
            self.character, self.index, self.message
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Revision {
    pub script: CommandScript,
    pub warnings: Vec<Warning>,
}

fn repair_one(order: &Order, catalog: &SceneCatalog) -> Result<(Command, Option<String>), String> {
    let unknown =
        |o: &str| format!("object `{o}` is not in the scene; walking to a random point instead");
    match order {
        Order::Invalid {
            reason: InvalidReason::UnsupportedMotionType { object, motion },
            ..
        } => {
            if catalog.has_object(object) {
                Ok((
                    Command::Locomotion(Some(object.clone())),
                    Some(format!(
                        "motion type `{motion}` is not supported; dropped it"
                    )),
                ))
            } else {
                Ok((
                    Command::Locomotion(None),
                    Some(format!(
                        "motion type `{motion}` is not supported and {}",
                        unknown(object)
                    )),
                ))
            }
        }
        Order::Invalid { raw, reason } => {
            Err(format!("removed unusable item `{raw}` ({reason:?})"))
        }
        Order::Valid(Command::Locomotion(Some(o))) if !catalog.has_object(o) => {
            Ok((Command::Locomotion(None), Some(unknown(o))))
        }
        Order::Valid(Command::SceneInteraction { object, .. }) if !catalog.has_object(object) => {
            Ok((Command::Locomotion(None), Some(unknown(object))))
        }
        Order::Valid(c) => Ok((c.clone(), None)),
    }
}

fn repair_list(
    orders: &[Order],
    who: Character,
    catalog: &SceneCatalog,
    warnings: &mut Vec<Warning>,
) -> Vec<(usize, Command)> {
    let mut out = Vec::with_capacity(orders.len());
    for (index, o) in orders.iter().enumerate() {
        match repair_one(o, catalog) {
            Ok((cmd, note)) => {
                if let Some(message) = note {
                    warnings.push(Warning {
                        character: who,
                        index,
                        message,
                    });
                }
                out.push((index, cmd));
            }
            Err(message) => warnings.push(Warning {
                character: who,
                index,
                message,
            }),
        }
    }
    out
}

fn cap_hhi(
    list: &mut [(usize, Command)],
    keep: usize,
    who: Character,
    warnings: &mut Vec<Warning>,
) {
    let mut seen = 0;
    for (index, cmd) in list.iter_mut() {
        if cmd.is_hhi() {
            seen += 1;
            if seen > keep {
                warnings.push(Warning {
                    character: who,
                    index: *index,
                    message: format!("unmatched `{cmd}` replaced by a walk to a random point"),
                });
                *cmd = Command::Locomotion(None);
            }
        }
    }
}

pub fn validate_and_revise(script: &CommandScript, catalog: &SceneCatalog) -> Revision {
    let mut warnings = Vec::new();
    let mut a = repair_list(&script.a, Character::A, catalog, &mut warnings);
    let mut b = repair_list(&script.b, Character::B, catalog, &mut warnings);
    let count = |v: &[(usize, Command)]| v.iter().filter(|(_, c)| c.is_hhi()).count();
    let keep = count(&a).min(count(&b));
    cap_hhi(&mut a, keep, Character::A, &mut warnings);
    cap_hhi(&mut b, keep, Character::B, &mut warnings);
    warnings.sort_by_key(|w| (w.character == Character::B, w.index));
    Revision {
        script: CommandScript::from_commands(
            a.into_iter().map(|(_, c)| c).collect(),
            b.into_iter().map(|(_, c)| c).collect(),
        ),
        warnings,
    }
}
