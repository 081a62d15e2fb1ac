use std::fmt::Display;

use tempcoal::semantics::EvalOptions;

/// Human mode prints `key: value`; record mode prints `key=value`, one pair
/// per line, with multi-line values split into repeated keys.
pub struct Out {
    pub records: bool,
}

impl Out {
    pub fn kv(&self, key: &str, value: impl Display) {
        let value = value.to_string();
        if value.is_empty() {
            self.line(key, "");
        }
        for line in value.lines() {
            self.line(key, line);
        }
    }

    fn line(&self, key: &str, value: &str) {
        if self.records {
            println!("{key}={value}");
        } else {
            println!("{key}: {value}");
        }
    }

    /// Free text shown only to humans.
    pub fn note(&self, text: impl Display) {
        if !self.records {
            println!("{text}");
        }
    }

    pub fn bounds(&self, o: &EvalOptions) {
        self.kv("stem_bound", o.stem_bound);
        self.kv("loop_bound", o.loop_bound);
        self.kv("memory", o.memory);
        self.kv("seed", o.seed);
    }

    pub fn qualifiers(&self, q: &[String]) {
        self.kv("exact", q.is_empty());
        self.kv("qualifiers", q.join("; "));
    }
}
