// SPDX-License-Identifier: Apache-2.0
#include "toolagent/cli.hpp"

int main(int argc, char** argv) { return toolagent::run_cli(argc, argv); }
