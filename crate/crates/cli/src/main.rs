fn main() {
    let out = eqsketch_cli::run(std::env::args_os());
    if out.code == eqsketch_cli::EXIT_OK || out.code == eqsketch_cli::EXIT_REJECTED {
        print!("{}", out.output);
    } else {
        eprint!("{}", out.output);
    }
    std::process::exit(out.code);
}
