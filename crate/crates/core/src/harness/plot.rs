use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Columns plotted as wealth curves: `m`, `g`, `N`, `M`, `S`, `w<i>` and `n_<j>`.
fn is_wealth_column(name: &str) -> bool {
    matches!(name, "m" | "g" | "N" | "M" | "S")
        || name.strip_prefix("n_").is_some_and(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit()))
        || name.strip_prefix('w').is_some_and(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit()))
}

/// A gnuplot script drawing every wealth column of `csv_text` against `t`.
pub fn plot_script(csv_text: &str, data_file: &str) -> Result<String> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let header: Vec<String> = if csv_text.trim().is_empty() {
        Vec::new()
    } else {
        rdr.headers()?.iter().map(str::to_string).collect()
    };
    let t = header
        .iter()
        .position(|h| h == "t")
        .ok_or_else(|| Error::MissingColumns("t".into()))?;
    let series: Vec<(usize, &str)> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| is_wealth_column(h))
        .map(|(i, h)| (i, h.as_str()))
        .collect();
    if series.is_empty() {
        return Err(Error::MissingColumns("no wealth column (m, g, N, M, S, w<i>, n_<j>)".into()));
    }
    let image = Path::new(data_file).with_extension("png");
    let mut s = String::new();
    writeln!(s, "# Wealth curves from {data_file}").unwrap();
    writeln!(s, "set datafile separator \",\"").unwrap();
    writeln!(s, "set terminal pngcairo size 1200,700").unwrap();
    writeln!(s, "set output \"{}\"", image.display()).unwrap();
    writeln!(s, "set xlabel \"t\"").unwrap();
    writeln!(s, "set ylabel \"wealth\"").unwrap();
    writeln!(s, "set key outside right noenhanced").unwrap();
    let lines: Vec<String> = series
        .iter()
        .map(|(i, name)| {
            let style = if *name == "g" { "lines dashtype 2" } else { "lines" };
            format!("\"{data_file}\" skip 1 using {}:{} with {style} title \"{name}(t)\"", t + 1, i + 1)
        })
        .collect();
    writeln!(s, "plot {}", lines.join(", \\\n     ")).unwrap();
    Ok(s)
}

/// Writes `<csv>.gp` next to the trajectory and returns its path.
pub fn emit_plot_script(csv_path: &Path) -> Result<PathBuf> {
    let text = std::fs::read_to_string(csv_path)?;
    let name = csv_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let script = plot_script(&text, &name)?;
    let out = csv_path.with_extension("gp");
    std::fs::write(&out, script)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_csv_has_one_line_per_wealth_column() {
        let s = plot_script("t,outcome,m,k,case,acting_index,S_k,n_1,n_2\n0,H,64,1,II,2,1,10,10\n", "run.csv").unwrap();
        assert_eq!(s.matches("with lines").count(), 3);
        assert!(s.contains("using 1:3") && s.contains("using 1:8") && s.contains("using 1:9"));
        assert!(!s.contains("S_k(t)"));
    }

    #[test]
    fn well_ordered_csv_includes_g() {
        let s = plot_script("t,outcome,m,m_inc,g,p,mu,case,acting_index,n_1\n", "w.csv").unwrap();
        assert!(s.contains("title \"g(t)\""));
        assert!(s.contains("title \"m(t)\""));
    }

    #[test]
    fn empty_csv_is_missing_columns() {
        assert!(matches!(plot_script("", "x.csv"), Err(Error::MissingColumns(_))));
        assert!(matches!(plot_script("t,outcome\n", "x.csv"), Err(Error::MissingColumns(_))));
    }
}
