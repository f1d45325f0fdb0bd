fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(pplab::cli::main_with_args(&argv));
}
