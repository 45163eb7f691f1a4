#![allow(dead_code)]

use std::process::{Command, Output};

pub fn cdising(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdising"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub struct Csv {
    pub manifest: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn parse(text: &str) -> Csv {
        let mut lines = text.split('\n').filter(|l| !l.is_empty());
        let mut manifest = Vec::new();
        let header = loop {
            let line = lines.next().expect("header row");
            if line.starts_with('#') {
                manifest.push(line.to_string());
            } else {
                break line.split(',').map(str::to_string).collect();
            }
        };
        let rows = lines
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        Csv {
            manifest,
            header,
            rows,
        }
    }

    pub fn column(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name}"))
    }

    pub fn floats(&self, name: &str) -> Vec<f64> {
        let c = self.column(name);
        self.rows.iter().map(|r| r[c].parse().unwrap()).collect()
    }

    /// Everything after the manifest.
    pub fn body(text: &str) -> String {
        text.lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

pub fn run_csv(args: &[&str]) -> (Csv, i32) {
    let out = cdising(args);
    let text = String::from_utf8(out.stdout).unwrap();
    (Csv::parse(&text), out.status.code().unwrap_or(-1))
}
