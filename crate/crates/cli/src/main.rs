fn main() {
    let outcome = rrgraph_cli::run(std::env::args_os());
    std::process::exit(outcome.code);
}
