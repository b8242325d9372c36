//! Parser for bracketed order lists.
//!
//! ```text
//! Orders A: [None, sofa, [chair, sit], HHI: Two persons hug with each other]
//! Orders B: [bed, lie, HHI: Two persons hug with each other]
//! ```
//!
//! Each list sits on one line; other lines are ignored. Labels `A`/`1` and
//! `B`/`2` are accepted, case-insensitively. An item is `None`, an object
//! name, a nested `[object, motion]` pair, or `HHI: text` where the text runs
//! to the next `,` or `]`. A motion word directly after an object item binds
//! to it, so `chair, sit` equals `[chair, sit]`. Items that cannot be
//! interpreted are kept as [`Order::Invalid`].

use super::command::{Command, CommandScript, InvalidReason, MotionType, Order};
use crate::error::{Error, Result};

/// Words treated as motion types when they follow an object, whether or not
/// they are supported.
pub const MOTION_WORDS: &[&str] = &[
    "sit", "lie", "stand", "lay", "sleep", "kneel", "lean", "squat", "climb", "jump",
];

fn is_motion_word(s: &str) -> bool {
    MOTION_WORDS
        .iter()
        .any(|w| w.eq_ignore_ascii_case(s.trim()))
}

enum Item {
    Plain { text: String },
    Pair { raw: String, parts: Vec<String> },
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Grammar {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    /// Text up to (not including) the next `,` or `]`.
    fn until_delim(&mut self) -> Result<String> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            match c {
                ',' | ']' => break,
                '[' => return Err(self.err("unexpected `[`")),
                _ => self.pos += 1,
            }
        }
        if self.peek().is_none() {
            return Err(self.err("unclosed `[`"));
        }
        Ok(self.chars[start..self.pos]
            .iter()
            .collect::<String>()
            .trim()
            .to_string())
    }

    fn items(&mut self) -> Result<Vec<Item>> {
        self.expect('[')?;
        self.skip_ws();
        let mut out = Vec::new();
        if self.peek() == Some(']') {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            self.skip_ws();
            if self.peek() == Some('[') {
                let start = self.pos;
                self.pos += 1;
                let mut parts = Vec::new();
                loop {
                    parts.push(self.until_delim()?);
                    let c = self.peek();
                    self.pos += 1;
                    if c == Some(']') {
                        break;
                    }
                }
                let raw = self.chars[start..self.pos].iter().collect();
                out.push(Item::Pair { raw, parts });
                self.skip_ws();
                if !matches!(self.peek(), Some(',') | Some(']')) {
                    return Err(self.err("expected `,` or `]` after nested list"));
                }
            } else {
                out.push(Item::Plain {
                    text: self.until_delim()?,
                });
            }
            let c = self.peek();
            self.pos += 1;
            if c == Some(']') {
                return Ok(out);
            }
        }
    }
}

fn plain(text: &str) -> Order {
    if text.is_empty() {
        return Order::Invalid {
            raw: String::new(),
            reason: InvalidReason::Empty,
        };
    }
    if let Some((head, rest)) = text.split_once(':') {
        if head.trim().eq_ignore_ascii_case("hhi") {
            let body = rest.trim();
            return if body.is_empty() {
                Order::Invalid {
                    raw: text.to_string(),
                    reason: InvalidReason::EmptyHhi,
                }
            } else {
                Order::Valid(Command::Hhi(body.to_string()))
            };
        }
    }
    if text.eq_ignore_ascii_case("none") {
        return Order::Valid(Command::Locomotion(None));
    }
    if is_motion_word(text) {
        return Order::Invalid {
            raw: text.to_string(),
            reason: InvalidReason::OrphanMotionType,
        };
    }
    Order::Valid(Command::Locomotion(Some(text.to_string())))
}

fn interaction(object: &str, motion: &str, raw: String) -> Order {
    match MotionType::parse(motion) {
        Some(m) => Order::Valid(Command::SceneInteraction {
            object: object.to_string(),
            motion: m,
        }),
        None => Order::Invalid {
            raw,
            reason: InvalidReason::UnsupportedMotionType {
                object: object.to_string(),
                motion: motion.to_string(),
            },
        },
    }
}

fn to_orders(items: Vec<Item>) -> Vec<Order> {
    let mut out: Vec<Order> = Vec::with_capacity(items.len());
    for item in items {
        match item {
            Item::Pair { raw, parts } => {
                let valid_pair = parts.len() == 2
                    && !parts[0].is_empty()
                    && !parts[0].eq_ignore_ascii_case("none")
                    && is_motion_word(&parts[1]);
                out.push(if valid_pair {
                    interaction(&parts[0], &parts[1], raw)
                } else {
                    Order::Invalid {
                        raw,
                        reason: InvalidReason::Malformed,
                    }
                });
            }
            Item::Plain { text } => {
                if is_motion_word(&text) {
                    if let Some(Order::Valid(Command::Locomotion(Some(obj)))) = out.last() {
                        let obj = obj.clone();
                        out.pop();
                        out.push(interaction(&obj, &text, format!("{obj}, {text}")));
                        continue;
                    }
                }
                out.push(plain(&text));
            }
        }
    }
    out
}

pub fn parse_orders_line(line: &str, line_no: usize) -> Result<(char, Vec<Order>)> {
    let mut cur = Cursor {
        chars: line.chars().collect(),
        pos: 0,
        line: line_no,
    };
    cur.skip_ws();
    let head: String = cur.chars[cur.pos..].iter().take(6).collect();
    if !head.eq_ignore_ascii_case("orders") {
        return Err(cur.err("expected `Orders`"));
    }
    cur.pos += 6;
    cur.skip_ws();
    let label = match cur.peek().map(|c| c.to_ascii_uppercase()) {
        Some('A') | Some('1') => 'A',
        Some('B') | Some('2') => 'B',
        _ => return Err(cur.err("expected character label A or B")),
    };
    cur.pos += 1;
    cur.expect(':')?;
    let items = cur.items()?;
    cur.skip_ws();
    if cur.peek().is_some() {
        return Err(cur.err("unexpected text after the order list"));
    }
    Ok((label, to_orders(items)))
}

fn is_orders_line(l: &str) -> bool {
    let t = l.trim_start();
    t.get(..6).is_some_and(|h| h.eq_ignore_ascii_case("orders")) && t.contains(':')
}

pub fn parse_commands(raw: &str) -> Result<CommandScript> {
    let mut a = None;
    let mut b = None;
    for (i, l) in raw.lines().enumerate() {
        if !is_orders_line(l) {
            continue;
        }
        let (label, orders) = parse_orders_line(l, i + 1)?;
        let slot = if label == 'A' { &mut a } else { &mut b };
        if slot.is_some() {
            return Err(Error::Grammar {
                line: i + 1,
                column: 1,
                message: format!("duplicate orders for character {label}"),
            });
        }
        *slot = Some(orders);
    }
    match (a, b) {
        (Some(a), Some(b)) => Ok(CommandScript { a, b }),
        (a, _) => Err(Error::Grammar {
            line: raw.lines().count().max(1),
            column: 1,
            message: format!(
                "missing orders for character {}",
                if a.is_none() { 'A' } else { 'B' }
            ),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(list: &str) -> Vec<Order> {
        parse_orders_line(&format!("Orders A: {list}"), 1)
            .unwrap()
            .1
    }

    fn loco(o: Option<&str>) -> Order {
        Order::Valid(Command::Locomotion(o.map(str::to_string)))
    }

    #[test]
    fn basic_list() {
        assert_eq!(
            one("[None, sofa, HHI: Two persons hug with each other]"),
            vec![
                loco(None),
                loco(Some("sofa")),
                Order::Valid(Command::Hhi("Two persons hug with each other".into()))
            ]
        );
        assert!(one("[]").is_empty());
        assert!(one("[ ]").is_empty());
    }

    #[test]
    fn scene_interactions() {
        let sit = Order::Valid(Command::SceneInteraction {
            object: "chair".into(),
            motion: MotionType::Sit,
        });
        assert_eq!(one("[[chair, sit]]"), vec![sit.clone()]);
        assert_eq!(one("[chair, sit]"), vec![sit.clone()]);
        assert_eq!(
            one("[None, [Chair, Sit]]")[1],
            Order::Valid(Command::SceneInteraction {
                object: "Chair".into(),
                motion: MotionType::Sit,
            })
        );
    }

    #[test]
    fn invalid_items_are_kept() {
        let o = one("[sit, , HHI:, [bed, kneel], bed, kneel, [a, b, c]]");
        let reasons: Vec<_> = o
            .iter()
            .map(|x| match x {
                Order::Invalid { reason, .. } => Some(reason.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(reasons[0], Some(InvalidReason::OrphanMotionType));
        assert_eq!(reasons[1], Some(InvalidReason::Empty));
        assert_eq!(reasons[2], Some(InvalidReason::EmptyHhi));
        assert!(matches!(
            reasons[3],
            Some(InvalidReason::UnsupportedMotionType { .. })
        ));
        assert!(matches!(
            reasons[4],
            Some(InvalidReason::UnsupportedMotionType { .. })
        ));
        assert_eq!(reasons[5], Some(InvalidReason::Malformed));
        assert_eq!(o.len(), 6);
    }

    #[test]
    fn grammar_errors_have_positions() {
        let e = parse_orders_line("Orders A: [None, sofa", 3).unwrap_err();
        assert!(matches!(e, Error::Grammar { line: 3, .. }));
        let e = parse_orders_line("Orders A: None, sofa]", 1).unwrap_err();
        assert!(matches!(e, Error::Grammar { column: 11, .. }), "{e:?}");
        assert!(parse_orders_line("Orders A: [[a, [b]]]", 1).is_err());
        assert!(parse_orders_line("Orders C: []", 1).is_err());
        assert!(parse_orders_line("Orders A: [] trailing", 1).is_err());
    }

    #[test]
    fn script_needs_both_characters() {
        let s = parse_commands("Here you go:\nOrders A: [None]\nOrders B: [HHI: wave]\nThanks")
            .unwrap();
        assert_eq!(s.a, vec![loco(None)]);
        assert_eq!(s.b.len(), 1);
        assert!(parse_commands("Orders A: []").is_err());
        assert!(parse_commands("Orders A: []\nOrders A: []\nOrders B: []").is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = "Orders A: [None, sofa, [chair, sit], HHI: hug]\nOrders B: [bed, HHI: hug]\n";
        let s = parse_commands(text).unwrap();
        assert_eq!(s.to_text(), text);
        assert_eq!(parse_commands(&s.to_text()).unwrap(), s);
    }
}
