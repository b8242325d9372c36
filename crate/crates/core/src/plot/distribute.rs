//! Per-module command queues and their inverse.

use super::command::{Command, CommandScript, MotionType};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Queued<T> {
    /// Position in the character's original list.
    pub seq: usize,
    pub item: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CharacterQueues {
    pub locomotion: Vec<Queued<Option<String>>>,
    pub interaction: Vec<Queued<(String, MotionType)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HhiEntry {
    /// Description as written for A and for B.
    pub texts: [String; 2],
    pub seq: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommandQueues {
    pub a: CharacterQueues,
    pub b: CharacterQueues,
    pub hhi: Vec<HhiEntry>,
}

fn split(cmds: &[Command]) -> (CharacterQueues, Vec<(usize, String)>) {
    let mut q = CharacterQueues::default();
    let mut hhi = Vec::new();
    for (seq, c) in cmds.iter().enumerate() {
        match c {
            Command::Locomotion(t) => q.locomotion.push(Queued {
                seq,
                item: t.clone(),
            }),
            Command::SceneInteraction { object, motion } => q.interaction.push(Queued {
                seq,
                item: (object.clone(), *motion),
            }),
            Command::Hhi(t) => hhi.push((seq, t.clone())),
        }
    }
    (q, hhi)
}

pub fn distribute(script: &CommandScript) -> Result<CommandQueues> {
    if !script.is_valid() {
        return Err(Error::InvalidScript(
            "script still contains invalid items".into(),
        ));
    }
    let (a, b) = script.commands();
    let (qa, ha) = split(&a);
    let (qb, hb) = split(&b);
    if ha.len() != hb.len() {
        return Err(Error::HhiCountMismatch {
            a: ha.len(),
            b: hb.len(),
        });
    }
    let hhi = ha
        .into_iter()
        .zip(hb)
        .map(|((sa, ta), (sb, tb))| HhiEntry {
            texts: [ta, tb],
            seq: [sa, sb],
        })
        .collect();
    Ok(CommandQueues { a: qa, b: qb, hhi })
}

fn rebuild(q: &CharacterQueues, hhi: impl Iterator<Item = (usize, String)>) -> Vec<Command> {
    let mut all: Vec<(usize, Command)> = q
        .locomotion
        .iter()
        .map(|e| (e.seq, Command::Locomotion(e.item.clone())))
        .chain(q.interaction.iter().map(|e| {
            (
                e.seq,
                Command::SceneInteraction {
                    object: e.item.0.clone(),
                    motion: e.item.1,
                },
            )
        }))
        .chain(hhi.map(|(s, t)| (s, Command::Hhi(t))))
        .collect();
    all.sort_by_key(|(s, _)| *s);
    all.into_iter().map(|(_, c)| c).collect()
}

/// Interleaves the queues back by sequence number.
pub fn merge(q: &CommandQueues) -> CommandScript {
    let a = rebuild(&q.a, q.hhi.iter().map(|h| (h.seq[0], h.texts[0].clone())));
    let b = rebuild(&q.b, q.hhi.iter().map(|h| (h.seq[1], h.texts[1].clone())));
    CommandScript::from_commands(a, b)
}
