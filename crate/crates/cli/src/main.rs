use std::io::Write;

fn main() {
    let (out, err, code) = ddeuc_cli::main_with_args(std::env::args_os());
    // a closed pipe downstream is not an error of ours
    let _ = std::io::stdout().write_all(out.as_bytes());
    let _ = std::io::stdout().flush();
    let _ = std::io::stderr().write_all(err.as_bytes());
    std::process::exit(code);
}
