// SPDX-License-Identifier: Apache-2.0
#include "toolagent/embedding.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>

#include "toolagent/error.hpp"
#include "toolagent/tokenizer.hpp"

namespace toolagent {

namespace {

std::uint64_t fnv1a_lower(std::string_view token) noexcept {
    std::uint64_t h = 14695981039346656037ULL;
    for (char c : token) {
        auto b = static_cast<unsigned char>(c);
        if (b >= 'A' && b <= 'Z') b = static_cast<unsigned char>(b - 'A' + 'a');
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

bool is_ascii_punct(char c) noexcept {
    const auto b = static_cast<unsigned char>(c);
    return b < 0x80 && std::ispunct(b) != 0;
}

// "Image." and "image" should land in the same bucket.
std::string_view strip_punct(std::string_view token) noexcept {
    auto first = token.begin();
    auto last = token.end();
    while (first != last && is_ascii_punct(*first)) ++first;
    while (last != first && is_ascii_punct(*(last - 1))) --last;
    return first == last ? token : std::string_view(first, last);
}

} // namespace

Vector local_embed(std::string_view text, std::size_t dimension) {
    if (dimension < 8) throw Error(Errc::invalid_config, "embedding dimension must be at least 8");
    Vector v(dimension, 0.0);
    for (const auto& span : token_spans(text)) {
        v[fnv1a_lower(strip_punct(text.substr(span.offset, span.length))) % dimension] += 1.0;
    }
    const double norm = l2_norm(v);
    if (norm > 0.0) {
        for (auto& x : v) x /= norm;
    }
    return v;
}

LocalEmbedder::LocalEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ < 8) throw Error(Errc::invalid_config, "embedding dimension must be at least 8");
}

Vector LocalEmbedder::embed(std::string_view text) const {
    return local_embed(text, dimension_);
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double sum = 0.0;
    const auto n = a.size() < b.size() ? a.size() : b.size();
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

double l2_norm(std::span<const double> v) noexcept {
    return std::sqrt(dot(v, v));
}

std::shared_ptr<const Embedder> default_embedder() {
    static const auto instance = std::make_shared<const LocalEmbedder>();
    return instance;
}

} // namespace toolagent
