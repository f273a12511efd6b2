use std::process::ExitCode;

fn main() -> ExitCode {
    match delivery_dispatch::tsb::cli::main_with(std::env::args_os()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
