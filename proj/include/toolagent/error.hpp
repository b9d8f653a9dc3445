// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace toolagent {

enum class Errc {
    malformed_document,
    invariant_violation,
    invalid_schema,
    invalid_config,
    duplicate_id,
    empty_input,
    empty_index,
    script_exhausted,
    context_overflow,
    transport,
    malformed_action,
    id_mismatch,
    battle_state,
    not_found,
    io,
};

[[nodiscard]] std::string_view errc_name(Errc code) noexcept;

/// Domain error carrying a machine-readable code and, where it applies, the
/// location of the offending input (JSON path, message index, file name).
class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message, std::string where = {});

    [[nodiscard]] Errc code() const noexcept { return code_; }
    [[nodiscard]] const std::string& where() const noexcept { return where_; }

private:
    Errc code_;
    std::string where_;
};

} // namespace toolagent
