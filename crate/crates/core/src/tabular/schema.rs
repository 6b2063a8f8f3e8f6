use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnKind {
    Numeric,
    Categorical { categories: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn numeric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Numeric,
        }
    }

    pub fn categorical<S: Into<String>>(name: impl Into<String>, categories: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Categorical {
                categories: categories.into_iter().map(Into::into).collect(),
            },
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, ColumnKind::Numeric)
    }

    pub fn categories(&self) -> Option<&[String]> {
        match &self.kind {
            ColumnKind::Categorical { categories } => Some(categories),
            ColumnKind::Numeric => None,
        }
    }
}

/// Ordered feature columns plus an optional numeric target column.
///
/// The target never enters the autoencoder; it is carried alongside the
/// features for downstream prediction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    columns: Vec<Column>,
    target: Option<String>,
}

impl Schema {
    pub fn new(columns: Vec<Column>, target: Option<String>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for c in &columns {
            if c.name.is_empty() {
                return Err(Error::InvalidSchema("empty column name".into()));
            }
            if !names.insert(c.name.as_str()) {
                return Err(Error::InvalidSchema(format!("duplicate column `{}`", c.name)));
            }
            if let Some(cats) = c.categories() {
                if cats.len() < 2 {
                    return Err(Error::InvalidSchema(format!(
                        "categorical column `{}` needs at least 2 categories",
                        c.name
                    )));
                }
                let distinct: BTreeSet<&str> = cats.iter().map(String::as_str).collect();
                if distinct.len() != cats.len() {
                    return Err(Error::InvalidSchema(format!(
                        "categorical column `{}` lists a category twice",
                        c.name
                    )));
                }
            }
        }
        if let Some(t) = &target {
            if names.contains(t.as_str()) {
                return Err(Error::InvalidSchema(format!("target `{t}` is also a feature column")));
            }
        }
        Ok(Self { columns, target })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn target(&self) -> Option<&str> {
        self.target.as_deref()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn numeric_count(&self) -> usize {
        self.columns.iter().filter(|c| c.is_numeric()).count()
    }

    pub fn categorical_count(&self) -> usize {
        self.columns.len() - self.numeric_count()
    }

    /// Total number of categories over all categorical columns.
    pub fn category_total(&self) -> usize {
        self.columns.iter().filter_map(Column::categories).map(<[String]>::len).sum()
    }

    /// Same schema with the target dropped.
    pub fn features_only(&self) -> Schema {
        Schema {
            columns: self.columns.clone(),
            target: None,
        }
    }

    pub fn with_target(&self, target: Option<String>) -> Result<Schema> {
        Schema::new(self.columns.clone(), target)
    }

    /// File header: feature names in order, then the target.
    pub fn header(&self) -> Vec<&str> {
        let mut h: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        if let Some(t) = &self.target {
            h.push(t);
        }
        h
    }

    /// Sidecar text, one line per column: `name,kind[,cat1|cat2|...]` with
    /// kind one of `numeric`, `categorical`, `target`.
    pub fn to_sidecar(&self) -> String {
        let mut out = String::new();
        for c in &self.columns {
            match &c.kind {
                ColumnKind::Numeric => out.push_str(&format!("{},numeric\n", c.name)),
                ColumnKind::Categorical { categories } => {
                    out.push_str(&format!("{},categorical,{}\n", c.name, categories.join("|")))
                }
            }
        }
        if let Some(t) = &self.target {
            out.push_str(&format!("{t},target\n"));
        }
        out
    }

    pub fn from_sidecar(text: &str) -> Result<Schema> {
        let mut columns = Vec::new();
        let mut target = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(3, ',');
            let name = parts.next().unwrap_or("").trim().to_string();
            let kind = parts.next().map(str::trim).unwrap_or("");
            let rest = parts.next();
            match (kind, rest) {
                ("numeric", None) => columns.push(Column::numeric(name)),
                ("categorical", Some(cats)) => {
                    columns.push(Column::categorical(name, cats.split('|').map(str::trim)))
                }
                ("target", None) => {
                    if target.replace(name).is_some() {
                        return Err(Error::InvalidSchema("more than one target line".into()));
                    }
                }
                _ => {
                    return Err(Error::Parse(format!(
                        "schema line {}: expected `name,numeric`, `name,categorical,a|b|..` or `name,target`",
                        lineno + 1
                    )))
                }
            }
        }
        Schema::new(columns, target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_duplicates_and_singletons() {
        let dup = Schema::new(vec![Column::numeric("a"), Column::numeric("a")], None);
        assert!(matches!(dup, Err(Error::InvalidSchema(_))));
        let single = Schema::new(vec![Column::categorical("b", ["x"])], None);
        assert!(single.is_err());
        let repeated = Schema::new(vec![Column::categorical("b", ["x", "x"])], None);
        assert!(repeated.is_err());
        let clash = Schema::new(vec![Column::numeric("y")], Some("y".into()));
        assert!(clash.is_err());
    }

    #[test]
    fn sidecar_round_trip() {
        let s = Schema::new(
            vec![Column::numeric("a"), Column::categorical("b", ["x", "y", "z"])],
            Some("y".into()),
        )
        .unwrap();
        let text = s.to_sidecar();
        assert_eq!(text, "a,numeric\nb,categorical,x|y|z\ny,target\n");
        assert_eq!(Schema::from_sidecar(&text).unwrap(), s);
        assert!(Schema::from_sidecar("a,weird\n").is_err());
    }

    #[test]
    fn counts() {
        let s = Schema::new(
            vec![
                Column::numeric("a"),
                Column::categorical("b", ["x", "y"]),
                Column::categorical("c", ["u", "v", "w"]),
            ],
            None,
        )
        .unwrap();
        assert_eq!(s.numeric_count(), 1);
        assert_eq!(s.categorical_count(), 2);
        assert_eq!(s.category_total(), 5);
    }
}
