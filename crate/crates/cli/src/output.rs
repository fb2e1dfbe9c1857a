use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use landau_core::Error;
use serde::Serialize;

pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_csv<T: Serialize>(out: Box<dyn Write>, rows: &[T]) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(mut out: Box<dyn Write>, value: &T) -> Result<(), Error> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| {
        if e.is_io() {
            Error::Io(e.into())
        } else {
            Error::Validation(format!("json: {e}"))
        }
    })?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Gnuplot script plotting columns `y_cols` of `data` against column 1.
pub fn write_gnuplot(
    script: &Path,
    data: &Path,
    xlabel: &str,
    ylabel: &str,
    y_cols: &[(usize, &str)],
) -> Result<(), Error> {
    let mut f = BufWriter::new(File::create(script)?);
    writeln!(f, "set datafile separator ','")?;
    writeln!(f, "set key autotitle columnhead")?;
    writeln!(f, "set xlabel '{xlabel}'")?;
    writeln!(f, "set ylabel '{ylabel}'")?;
    let data = data.display().to_string().replace('\'', "''");
    let series: Vec<String> = y_cols
        .iter()
        .enumerate()
        .map(|(i, (col, title))| {
            let file = if i == 0 {
                format!("'{data}'")
            } else {
                "''".to_string()
            };
            format!("{file} using 1:{col} with lines title '{title}'")
        })
        .collect();
    writeln!(f, "plot {}", series.join(", \\\n     "))?;
    f.flush()?;
    Ok(())
}
