use crate::error::Result;
use crate::value::Value;

/// A trajectory: one header and `horizon + 1` rows of already-formatted cells.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: impl IntoIterator<Item = impl Into<String>>) -> Table {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }
}

/// Integers exactly, everything else as the shortest round-tripping `f64`.
pub fn num(v: &Value) -> String {
    match v.as_integer() {
        Some(n) => n.to_string(),
        None => format!("{}", v.to_f64()),
    }
}

pub fn opt_num(v: Option<&Value>) -> String {
    v.map(num).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(num(&Value::int(-12)), "-12");
        assert_eq!(num(&Value::ratio(3, 2)), "1.5");
        assert_eq!(opt_num(None), "");
        let mut t = Table::new(["t", "m"]);
        t.push(vec!["0".into(), "1".into()]);
        assert_eq!(String::from_utf8(t.to_csv().unwrap()).unwrap(), "t,m\n0,1\n");
    }
}
