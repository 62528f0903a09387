use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let env = std::env::var(octobench::SEED_ENV).ok();
    let code = octobench::run_cli(std::env::args_os(), env.as_deref(), &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
