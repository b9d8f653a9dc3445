// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toolagent/core.hpp"

namespace toolagent {

// ---------------------------------------------------------------------------
// Per-request metrics
// ---------------------------------------------------------------------------

/// 1 iff the API names are byte-for-byte equal.
[[nodiscard]] int action_em(const ApiRequest& gold, const ApiRequest& pred) noexcept;

struct ArgMatchCounts {
    std::size_t half = 0;        // right argument name, wrong value
    std::size_t full = 0;        // right name and value
    std::size_t gold_count = 0;  // |A|
    std::size_t pred_count = 0;  // |A*|

    ArgMatchCounts& operator+=(const ArgMatchCounts& other) noexcept;
    bool operator==(const ArgMatchCounts&) const = default;
};

/// Values match after trimming surrounding whitespace; when both sides read
/// as finite numbers they are compared numerically ("1024" == "1024.0").
[[nodiscard]] bool argument_values_equal(std::string_view gold, std::string_view pred);

[[nodiscard]] ArgMatchCounts count_argument_matches(const ApiRequest& gold, const ApiRequest& pred);

/// R = (0.5*HM + FM)/|A|, P = (0.5*HM + FM)/|A*|, F1 = 2RP/(R+P).
/// Both sides empty scores 1; an empty side otherwise, or R = P = 0, scores 0.
[[nodiscard]] double argument_f1(const ArgMatchCounts& counts) noexcept;
[[nodiscard]] double argument_f1(const ApiRequest& gold, const ApiRequest& pred);

// ---------------------------------------------------------------------------
// ROUGE-L
// ---------------------------------------------------------------------------

/// Length of the longest common subsequence. Bit-parallel when the shorter
/// side has at most 64 symbols, a two-row dynamic program otherwise.
[[nodiscard]] std::size_t lcs_length(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

/// F-measure (beta = 1) from an LCS length and the two sequence lengths; 0 when
/// either side is empty.
[[nodiscard]] double rouge_l_from_lcs(std::size_t lcs, std::size_t ref_len, std::size_t hyp_len) noexcept;

[[nodiscard]] double rouge_l_ids(std::span<const std::uint32_t> reference, std::span<const std::uint32_t> hypothesis);
[[nodiscard]] double rouge_l_tokens(std::span<const std::string> reference, std::span<const std::string> hypothesis);
/// Tokenizes both sides with the shared token rule.
[[nodiscard]] double rouge_l(std::string_view reference, std::string_view hypothesis);

// ---------------------------------------------------------------------------
// Test-set evaluation
// ---------------------------------------------------------------------------

enum class F1Averaging { macro, micro };

struct EvalOptions {
    F1Averaging f1_averaging = F1Averaging::macro;
};

struct ConversationScore {
    std::string id;
    std::size_t requests = 0;        // gold assistant turns carrying a request
    std::size_t action_hits = 0;
    double f1_sum = 0.0;
    ArgMatchCounts pooled;           // for micro averaging
    std::size_t texts = 0;           // gold plain-text assistant turns
    double rouge_sum = 0.0;
    std::size_t missing_turns = 0;   // gold assistant turns with no predicted counterpart
    std::size_t extra_pred_requests = 0;
};

struct EvalReport {
    double action_em = 0.0;    // percentages in [0, 100]
    double argument_f1 = 0.0;
    double rouge_l = 0.0;
    std::size_t conversations = 0;
    std::size_t requests = 0;
    std::size_t texts = 0;
    F1Averaging f1_averaging = F1Averaging::macro;
    std::vector<ConversationScore> per_conversation;  // sorted by id
};

/// Scores one predicted conversation against its gold counterpart. Assistant
/// turns are paired by position among assistant turns.
[[nodiscard]] ConversationScore score_conversation(const Conversation& gold, const Conversation& pred);

/// Predictions are matched to gold conversations by id; a gold id without a
/// prediction, an unknown prediction id, or a duplicate id throws
/// Error{id_mismatch}. Aggregates are unweighted means times 100.
[[nodiscard]] EvalReport evaluate(const std::vector<Conversation>& test_set,
                                  const std::vector<Conversation>& predictions,
                                  const EvalOptions& options = {});

[[nodiscard]] Json to_json(const EvalReport& report);

} // namespace toolagent
