// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace toolagent {

/// Byte range of one token inside the source text.
struct TokenSpan {
    std::size_t offset = 0;
    std::size_t length = 0;

    [[nodiscard]] std::size_t end() const noexcept { return offset + length; }
    bool operator==(const TokenSpan&) const = default;
};

// Token rule: runs of non-whitespace are one token, except that every CJK
// code point (ideographs, kana, hangul, CJK and fullwidth punctuation) is a
// token of its own. Invalid UTF-8 bytes are treated as ordinary word bytes.

[[nodiscard]] std::vector<TokenSpan> token_spans(std::string_view text);
[[nodiscard]] std::vector<std::string> tokenize(std::string_view text);
[[nodiscard]] std::size_t count_tokens(std::string_view text);

[[nodiscard]] bool is_cjk(char32_t cp) noexcept;
[[nodiscard]] bool contains_cjk(std::string_view text);

} // namespace toolagent
