use std::collections::BTreeMap;
use std::fmt;

/// Sectioned key-value text; keys are sorted within a section.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    sections: Vec<(String, BTreeMap<String, String>)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn section(&mut self, name: &str) -> &mut BTreeMap<String, String> {
        if let Some(k) = self.sections.iter().position(|(n, _)| n == name) {
            return &mut self.sections[k].1;
        }
        self.sections.push((name.to_string(), BTreeMap::new()));
        &mut self.sections.last_mut().expect("just pushed").1
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl fmt::Display) {
        self.section(section).insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.iter().find(|(n, _)| n == section)?.1.get(key).map(String::as_str)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (name, entries)) in self.sections.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            writeln!(f, "[{name}]")?;
            for (key, value) in entries {
                writeln!(f, "{key}: {value}")?;
            }
        }
        Ok(())
    }
}
