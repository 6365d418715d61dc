use serde_json::{json, Value};

/// JSON-lines progress records on stderr, about twenty per run.
pub struct Progress {
    command: &'static str,
    total: usize,
    every: usize,
}

impl Progress {
    pub fn new(command: &'static str, total: usize) -> Self {
        Self {
            command,
            total,
            every: (total / 20).max(1),
        }
    }

    pub fn tick(&self, done: usize) {
        if done.is_multiple_of(self.every) || done == self.total {
            emit(json!({
                "event": "progress",
                "command": self.command,
                "done": done,
                "total": self.total,
            }));
        }
    }
}

pub fn warn(command: &str, message: impl Into<String>, detail: Value) {
    emit(json!({
        "event": "warning",
        "command": command,
        "message": message.into(),
        "detail": detail,
    }));
}

fn emit(record: Value) {
    eprintln!("{record}");
}
