// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace toolagent {

using Vector = std::vector<double>;

class Embedder {
public:
    virtual ~Embedder() = default;
    [[nodiscard]] virtual std::size_t dimension() const noexcept = 0;
    /// Returns a vector of exactly dimension() entries.
    [[nodiscard]] virtual Vector embed(std::string_view text) const = 0;
};

/// Hashed bag-of-words projection: each token (ASCII-lowercased) adds one to
/// bucket fnv1a(token) % dimension, then the vector is L2-normalized. Text
/// with no tokens maps to the zero vector.
[[nodiscard]] Vector local_embed(std::string_view text, std::size_t dimension);

class LocalEmbedder final : public Embedder {
public:
    static constexpr std::size_t default_dimension = 512;

    explicit LocalEmbedder(std::size_t dimension = default_dimension);

    [[nodiscard]] std::size_t dimension() const noexcept override { return dimension_; }
    [[nodiscard]] Vector embed(std::string_view text) const override;

private:
    std::size_t dimension_;
};

[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b) noexcept;
[[nodiscard]] double l2_norm(std::span<const double> v) noexcept;

[[nodiscard]] std::shared_ptr<const Embedder> default_embedder();

} // namespace toolagent
