use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Line {
    pub key: String,
    pub value: String,
}

/// Outcome of one command. `holds` is the mathematical verdict, absent for
/// purely descriptive commands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub lines: Vec<Line>,
    pub holds: Option<bool>,
}

impl Report {
    pub fn new(words: &[String]) -> Self {
        Self { command: words.join(" "), lines: Vec::new(), holds: None }
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.lines.push(Line { key: key.to_string(), value: value.to_string() });
    }

    pub fn text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        for l in &self.lines {
            out.push_str(&format!("{}: {}\n", l.key, l.value));
        }
        if let Some(h) = self.holds {
            out.push_str(&format!("holds: {h}\n"));
        }
        out
    }

    pub fn json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
