//! Library side of the `zbnoise` command-line tool: configuration, presets,
//! subcommands and plot-script emission.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod presets;

use std::io::Write;

use anyhow::Result;

use config::{RunConfig, StateSpec};

/// The five table-producing subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Lambda,
    Kraus,
    Fidelity,
    Oracle,
    Dynamics,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Lambda => "lambda",
            Command::Kraus => "kraus",
            Command::Fidelity => "fidelity",
            Command::Oracle => "oracle",
            Command::Dynamics => "dynamics",
        }
    }
}

/// Runs `command`, writing its table to `out`. The divisibility table of
/// `dynamics` goes to `div_out`. Returns whether all internal checks passed.
pub fn run(command: Command, cfg: &RunConfig, out: &mut dyn Write, div_out: &mut dyn Write) -> Result<bool> {
    match command {
        Command::Lambda => commands::cmd_lambda(cfg, out),
        Command::Kraus => commands::cmd_kraus(cfg, out),
        Command::Fidelity => commands::cmd_fidelity(cfg, out),
        Command::Oracle => commands::cmd_oracle(cfg, out),
        Command::Dynamics => commands::cmd_dynamics(cfg, out, div_out),
    }
}

fn series_names(cfg: &RunConfig) -> Vec<String> {
    match &cfg.state {
        StateSpec::Bloch(_) => vec!["bloch".into()],
        StateSpec::Amplitudes(_) => vec!["pure".into()],
        StateSpec::M(ms) => ms.iter().map(|m| format!("m={m}")).collect(),
    }
}

/// A gnuplot script plotting the CSV at `csv_path`.
pub fn gnuplot_script(command: Command, cfg: &RunConfig, csv_path: &str) -> String {
    let quoted = format!("'{}'", csv_path.replace('\'', "''"));
    let mut s = String::new();
    s.push_str("set datafile separator comma\n");
    s.push_str("set datafile commentschars '#'\n");
    s.push_str("set xlabel 't'\n");
    s.push_str("set key outside right\n");
    let plot = match command {
        Command::Lambda => {
            s.push_str("set ylabel 'Lambda_i(t)'\n");
            (2..=4)
                .zip(["x", "y", "z"])
                .map(|(c, n)| format!("{quoted} skip 2 using 1:{c} with lines title 'Lambda_{n}'"))
                .collect::<Vec<_>>()
        }
        Command::Kraus => {
            s.push_str("set ylabel 'k_i'\n");
            (2..=5)
                .map(|c| format!("{quoted} skip 2 using 1:{c} with lines title 'k{}'", c - 2))
                .collect()
        }
        Command::Fidelity => {
            s.push_str("set ylabel 'F'\n");
            series_names(cfg)
                .iter()
                .map(|n| format!("{quoted} skip 2 using 2:(strcol(1) eq '{n}' ? $3 : NaN) with lines title '{n}'"))
                .collect()
        }
        Command::Oracle => {
            s.push_str("set ylabel 'deviation'\n");
            vec![
                format!("{quoted} skip 2 using 2:5 with points title 'worst |delta|'"),
                format!("{quoted} skip 2 using 2:6 with lines title 'bound'"),
            ]
        }
        Command::Dynamics => {
            s.push_str("set ylabel 'a_z(t)'\n");
            ["exact-lambda", "lindblad", "memory-kernel"]
                .iter()
                .map(|m| format!("{quoted} skip 2 using 2:(strcol(1) eq '{m}' ? $13 : NaN) with lines title '{m}'"))
                .collect()
        }
    };
    s.push_str("plot ");
    s.push_str(&plot.join(", \\\n     "));
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnuplot_references_csv() {
        let cfg = presets::preset("fig2").unwrap();
        let script = gnuplot_script(Command::Fidelity, &cfg, "out.csv");
        assert!(script.contains("'out.csv'"));
        assert!(script.contains("m=0.4"));
        assert_eq!(script.matches("with lines").count(), 5);
    }
}
