// Copyright 2026 The ftprep Authors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(ftprep::cli::main_with_args(std::env::args_os()));
}
