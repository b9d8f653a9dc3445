// SPDX-License-Identifier: Apache-2.0
#include "toolagent/tokenizer.hpp"

namespace toolagent {

namespace {

struct Decoded {
    char32_t cp;
    std::size_t length;
    bool valid;
};

Decoded decode_utf8(std::string_view text, std::size_t pos) {
    const auto lead = static_cast<unsigned char>(text[pos]);
    if (lead < 0x80) return {lead, 1, true};

    std::size_t length = 0;
    char32_t cp = 0;
    if ((lead & 0xE0) == 0xC0) {
        length = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        length = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        length = 4;
        cp = lead & 0x07;
    } else {
        return {lead, 1, false};
    }
    if (pos + length > text.size()) return {lead, 1, false};
    for (std::size_t i = 1; i < length; ++i) {
        const auto c = static_cast<unsigned char>(text[pos + i]);
        if ((c & 0xC0) != 0x80) return {lead, 1, false};
        cp = (cp << 6) | (c & 0x3F);
    }
    return {cp, length, true};
}

bool is_space(char32_t cp) noexcept {
    switch (cp) {
        case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000: case 0xFEFF:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200B;
    }
}

} // namespace

bool is_cjk(char32_t cp) noexcept {
    return (cp >= 0x4E00 && cp <= 0x9FFF)      // unified ideographs
        || (cp >= 0x3400 && cp <= 0x4DBF)      // extension A
        || (cp >= 0x20000 && cp <= 0x2FA1F)    // extensions B.. and compatibility supplement
        || (cp >= 0xF900 && cp <= 0xFAFF)      // compatibility ideographs
        || (cp >= 0x3000 && cp <= 0x303F)      // CJK symbols and punctuation
        || (cp >= 0x3040 && cp <= 0x30FF)      // hiragana, katakana
        || (cp >= 0x31F0 && cp <= 0x31FF)
        || (cp >= 0xAC00 && cp <= 0xD7AF)      // hangul syllables
        || (cp >= 0xFF00 && cp <= 0xFFEF);     // halfwidth and fullwidth forms
}

std::vector<TokenSpan> token_spans(std::string_view text) {
    std::vector<TokenSpan> spans;
    std::size_t pos = 0;
    bool in_word = false;
    std::size_t word_start = 0;

    auto close_word = [&](std::size_t end) {
        if (in_word) spans.push_back({word_start, end - word_start});
        in_word = false;
    };

    while (pos < text.size()) {
        const auto d = decode_utf8(text, pos);
        if (d.valid && is_space(d.cp)) {
            close_word(pos);
        } else if (d.valid && is_cjk(d.cp)) {
            close_word(pos);
            spans.push_back({pos, d.length});
        } else if (!in_word) {
            in_word = true;
            word_start = pos;
        }
        pos += d.length;
    }
    close_word(pos);
    return spans;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    for (const auto& span : token_spans(text)) {
        tokens.emplace_back(text.substr(span.offset, span.length));
    }
    return tokens;
}

std::size_t count_tokens(std::string_view text) {
    return token_spans(text).size();
}

bool contains_cjk(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto d = decode_utf8(text, pos);
        if (d.valid && is_cjk(d.cp)) return true;
        pos += d.length;
    }
    return false;
}

} // namespace toolagent
