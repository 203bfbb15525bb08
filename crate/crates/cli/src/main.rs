mod args;
mod commands;
mod report;

use std::io::Write as _;
use std::process::ExitCode;

use clap::Parser;
use omega_kleisli::kernel::TheoryError;
use omega_kleisli::prob::ProbError;
use omega_kleisli::tree::TreeError;

use args::{Cli, Command};
use commands::Common;

const EXIT_REJECT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn is_budget(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(
            c.downcast_ref::<ProbError>(),
            Some(ProbError::IterationBudgetExceeded { .. })
        ) || matches!(
            c.downcast_ref::<TheoryError>(),
            Some(TheoryError::NoFixpoint { .. } | TheoryError::Budget(_))
        ) || matches!(
            c.downcast_ref::<TreeError>(),
            Some(TreeError::Budget { .. } | TreeError::Theory(TheoryError::NoFixpoint { .. } | TheoryError::Budget(_)))
        )
    })
}

fn run(cli: &Cli) -> anyhow::Result<report::Report> {
    let common = Common {
        seed: cli.seed,
        jobs: cli.jobs as usize,
    };
    match &cli.command {
        Command::Behaviour(a) => commands::behaviour(a),
        Command::OmegaBehaviour(a) => commands::omega_behaviour(a),
        Command::EvalRational(a) => commands::eval_rational_cmd(a),
        Command::KleeneRoundtrip(a) => commands::kleene_roundtrip(a, &common),
        Command::OmegaKleeneRoundtrip(a) => commands::omega_kleene_roundtrip(a, &common),
        Command::TreeMember(a) => commands::tree_member(a),
        Command::TreeBehaviour(a) => commands::tree_behaviour(a),
        Command::BuchiTreeMember(a) => commands::buchi_tree(a),
        Command::ProbQuery(a) => commands::prob_query(a, &common),
        Command::Laws(a) => commands::laws(a, &common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(report.render(cli.format).as_bytes());
            if report.rejected {
                ExitCode::from(EXIT_REJECT)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_budget(&e) { EXIT_BUDGET } else { EXIT_USAGE })
        }
    }
}
