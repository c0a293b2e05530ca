// SPDX-FileCopyrightText: 2026 kacgap contributors
// SPDX-License-Identifier: Apache-2.0
#include "kacgap_cli.hpp"

int main(int argc, char** argv) { return kacgap::cli::run(argc, argv); }
