use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MotionType {
    Sit,
    Lie,
}

impl MotionType {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sit" => Some(Self::Sit),
            "lie" => Some(Self::Lie),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Sit => "sit",
            Self::Lie => "lie",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Command {
    /// Walk to a random walkable point (`None`) or next to an object.
    Locomotion(Option<String>),
    SceneInteraction {
        object: String,
        motion: MotionType,
    },
    Hhi(String),
}

impl Command {
    pub fn is_hhi(&self) -> bool {
        matches!(self, Command::Hhi(_))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Locomotion(None) => f.write_str("None"),
            Command::Locomotion(Some(o)) => f.write_str(o),
            Command::SceneInteraction { object, motion } => {
                write!(f, "[{object}, {}]", motion.as_str())
            }
            Command::Hhi(text) => write!(f, "HHI: {text}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvalidReason {
    Empty,
    EmptyHhi,
    /// A motion-type word with no object before it.
    OrphanMotionType,
    UnsupportedMotionType {
        object: String,
        motion: String,
    },
    Malformed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Order {
    Valid(Command),
    Invalid { raw: String, reason: InvalidReason },
}

impl Order {
    pub fn command(&self) -> Option<&Command> {
        match self {
            Order::Valid(c) => Some(c),
            Order::Invalid { .. } => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Valid(c) => c.fmt(f),
            Order::Invalid { raw, .. } => f.write_str(raw),
        }
    }
}

/// Orders for the two characters, A first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommandScript {
    pub a: Vec<Order>,
    pub b: Vec<Order>,
}

impl CommandScript {
    pub fn from_commands(a: Vec<Command>, b: Vec<Command>) -> Self {
        Self {
            a: a.into_iter().map(Order::Valid).collect(),
            b: b.into_iter().map(Order::Valid).collect(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.a.iter().chain(&self.b).all(|o| o.command().is_some())
    }

    /// Valid commands per character, skipping invalid entries.
    pub fn commands(&self) -> (Vec<Command>, Vec<Command>) {
        let valid = |v: &[Order]| v.iter().filter_map(|o| o.command().cloned()).collect();
        (valid(&self.a), valid(&self.b))
    }

    /// Serializes back to the two-line `Orders X: [...]` form.
    pub fn to_text(&self) -> String {
        let line = |v: &[Order]| {
            v.iter()
                .map(|o| o.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!(
            "Orders A: [{}]\nOrders B: [{}]\n",
            line(&self.a),
            line(&self.b)
        )
    }
}
