// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace toolagent {

/// Entry point of the `agent` executable. Returns 0 on success, 1 on a
/// domain error (bad input data), 2 on a usage error.
int run_cli(int argc, const char* const* argv);

} // namespace toolagent
