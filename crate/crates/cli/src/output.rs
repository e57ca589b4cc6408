use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::args::Command;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `printf("%.17g")`: 17 significant digits, trailing zeros dropped.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..17).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The embedded run description: the subcommand and its arguments.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig<'a> {
    pub version: &'static str,
    #[serde(flatten)]
    pub command: &'a Command,
}

impl<'a> ExperimentConfig<'a> {
    pub fn new(command: &'a Command) -> Self {
        ExperimentConfig {
            version: VERSION,
            command,
        }
    }

    pub fn json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

pub struct Csv {
    header: &'static str,
    rows: Vec<(String, String)>,
}

impl Csv {
    pub fn new(header: &'static str) -> Self {
        Csv {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, key: impl ToString, value: f64) {
        self.rows.push((key.to_string(), g17(value)));
    }

    pub fn render(&self, config: &ExperimentConfig) -> String {
        let mut s = String::new();
        writeln!(s, "# arf {VERSION}").unwrap();
        writeln!(s, "# config: {}", config.json()).unwrap();
        writeln!(s, "{}", self.header).unwrap();
        for (k, v) in &self.rows {
            writeln!(s, "{k},{v}").unwrap();
        }
        s
    }
}

/// Path of the JSON sidecar that accompanies a CSV file.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

pub struct Sink<'a> {
    pub config: ExperimentConfig<'a>,
    pub out: Option<PathBuf>,
    pub plot: bool,
}

impl Sink<'_> {
    fn write(&self, path: &Path, body: &str) -> io::Result<()> {
        fs::write(path, body)
    }

    fn with_config(&self, payload: impl Serialize) -> serde_json::Value {
        json!({
            "version": VERSION,
            "config": self.config.command,
            "result": payload,
        })
    }

    /// A scalar result: printed on stdout, and written as JSON with `--out`.
    pub fn scalar(&self, value: String, record: impl Serialize) -> io::Result<()> {
        println!("{value}");
        if let Some(out) = &self.out {
            let v = self.with_config(record);
            self.write(out, &(pretty(&v) + "\n"))?;
        }
        Ok(())
    }

    /// A JSON record: printed, or written with `--out`.
    pub fn record(&self, record: impl Serialize) -> io::Result<()> {
        let v = self.with_config(record);
        let text = pretty(&v) + "\n";
        match &self.out {
            Some(out) => self.write(out, &text),
            None => io::stdout().write_all(text.as_bytes()),
        }
    }

    /// A CSV table plus an optional JSON sidecar.
    pub fn table(&self, csv: &Csv, sidecar: Option<serde_json::Value>) -> io::Result<()> {
        let text = csv.render(&self.config);
        let Some(out) = &self.out else {
            io::stdout().write_all(text.as_bytes())?;
            if let Some(extra) = sidecar {
                eprintln!("{}", pretty(&extra));
            }
            return Ok(());
        };
        self.write(out, &text)?;
        if let Some(extra) = sidecar {
            let v = self.with_config(extra);
            self.write(&sidecar_path(out), &(pretty(&v) + "\n"))?;
        }
        if self.plot {
            self.write(&out.with_extension("gp"), &plot_script(out, csv.header))?;
        }
        Ok(())
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json serializes")
}

fn plot_script(csv: &Path, header: &str) -> String {
    let name = csv.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
    let png = csv.with_extension("png");
    let png = png.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
    let (x, y) = header.split_once(',').unwrap_or(("n", "value"));
    let log = if x == "n" { "set logscale xy\n" } else { "" };
    format!(
        "set datafile separator ','\n\
         set datafile commentschars '#'\n\
         set terminal pngcairo size 900,600\n\
         set output '{png}'\n\
         set xlabel '{x}'\n\
         set ylabel '{y}'\n\
         {log}\
         plot '{name}' using 1:2 skip 1 with linespoints title '{y}'\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(g17(0.75), "0.75");
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(-2.5e-7), "-2.4999999999999999e-07");
        assert_eq!(g17(6.02e23), "6.02e+23");
        assert_eq!(g17(1e16), "10000000000000000");
        assert_eq!(g17(1e17), "1e+17");
        assert_eq!(g17(0.0001), "0.0001");
        assert_eq!(g17(0.0), "0");
        assert_eq!(g17(f64::NAN), "nan");
    }

    #[test]
    fn g17_round_trips() {
        for x in [std::f64::consts::PI, 1e-300, 123456.789, -0.607927101854026] {
            assert_eq!(g17(x).parse::<f64>().unwrap(), x);
        }
    }
}
