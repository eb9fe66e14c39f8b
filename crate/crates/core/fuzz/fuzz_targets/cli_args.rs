#![no_main]

use clap::Parser;
use krein_string::cli::Cli;
use libfuzzer_sys::fuzz_target;

// NUL-separated argument vectors; exercises flag parsing including the `--N` list
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let args = std::iter::once("krein-string").chain(text.split('\0'));
    let _ = Cli::try_parse_from(args);
});
