// SPDX-License-Identifier: Apache-2.0
#include "toolagent/eval.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <map>
#include <unordered_map>

#include "toolagent/tokenizer.hpp"

namespace toolagent {

int action_em(const ApiRequest& gold, const ApiRequest& pred) noexcept {
    return gold.api_name == pred.api_name ? 1 : 0;
}

ArgMatchCounts& ArgMatchCounts::operator+=(const ArgMatchCounts& other) noexcept {
    half += other.half;
    full += other.full;
    gold_count += other.gold_count;
    pred_count += other.pred_count;
    return *this;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(first, last - first + 1);
}

bool read_number(std::string_view s, double& out) {
    if (s.empty()) return false;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

} // namespace

bool argument_values_equal(std::string_view gold, std::string_view pred) {
    gold = trim(gold);
    pred = trim(pred);
    double g = 0.0;
    double p = 0.0;
    if (read_number(gold, g) && read_number(pred, p)) return g == p;
    return gold == pred;
}

ArgMatchCounts count_argument_matches(const ApiRequest& gold, const ApiRequest& pred) {
    ArgMatchCounts counts;
    counts.gold_count = gold.arguments.size();
    counts.pred_count = pred.arguments.size();
    for (const auto& [name, value] : gold.arguments) {
        auto it = pred.arguments.find(name);
        if (it == pred.arguments.end()) continue;
        if (argument_values_equal(value, it->second)) {
            ++counts.full;
        } else {
            ++counts.half;
        }
    }
    return counts;
}

double argument_f1(const ArgMatchCounts& counts) noexcept {
    if (counts.gold_count == 0 && counts.pred_count == 0) return 1.0;
    if (counts.gold_count == 0 || counts.pred_count == 0) return 0.0;
    const double matched = 0.5 * static_cast<double>(counts.half) + static_cast<double>(counts.full);
    const double recall = matched / static_cast<double>(counts.gold_count);
    const double precision = matched / static_cast<double>(counts.pred_count);
    if (recall + precision == 0.0) return 0.0;
    return 2.0 * (recall * precision) / (recall + precision);
}

double argument_f1(const ApiRequest& gold, const ApiRequest& pred) {
    return argument_f1(count_argument_matches(gold, pred));
}

namespace {

// `peq` has one zeroed slot per symbol id up to the largest id in `shorter`.
std::size_t lcs_bit_parallel(std::span<const std::uint32_t> shorter, std::span<const std::uint32_t> longer,
                             std::uint32_t max_id, std::uint64_t* peq) {
    // Match masks: bit i of peq[c] is set when shorter[i] == c.
    const auto m = shorter.size();
    for (std::size_t i = 0; i < m; ++i) peq[shorter[i]] |= std::uint64_t{1} << i;

    std::uint64_t v = ~std::uint64_t{0};
    for (auto c : longer) {
        if (c > max_id) continue;
        const auto u = v & peq[c];
        v = (v + u) | (v - u);
    }
    const auto mask = m == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
    return m - static_cast<std::size_t>(std::popcount(v & mask));
}

std::size_t lcs_bit_parallel(std::span<const std::uint32_t> shorter, std::span<const std::uint32_t> longer) {
    std::uint32_t max_id = 0;
    for (auto s : shorter) max_id = std::max(max_id, s);
    if (max_id < 64) {
        std::array<std::uint64_t, 64> small;
        std::fill_n(small.begin(), max_id + 1, 0);
        return lcs_bit_parallel(shorter, longer, max_id, small.data());
    }
    std::vector<std::uint64_t> large(static_cast<std::size_t>(max_id) + 1, 0);
    return lcs_bit_parallel(shorter, longer, max_id, large.data());
}

std::size_t lcs_dynamic(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

} // namespace

std::size_t lcs_length(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    if (a.empty() || b.empty()) return 0;
    const auto& shorter = a.size() <= b.size() ? a : b;
    const auto& longer = a.size() <= b.size() ? b : a;
    if (shorter.size() <= 64) return lcs_bit_parallel(shorter, longer);
    return lcs_dynamic(a, b);
}

double rouge_l_from_lcs(std::size_t lcs, std::size_t ref_len, std::size_t hyp_len) noexcept {
    if (ref_len == 0 || hyp_len == 0 || lcs == 0) return 0.0;
    const double recall = static_cast<double>(lcs) / static_cast<double>(ref_len);
    const double precision = static_cast<double>(lcs) / static_cast<double>(hyp_len);
    return 2.0 * recall * precision / (recall + precision);
}

double rouge_l_ids(std::span<const std::uint32_t> reference, std::span<const std::uint32_t> hypothesis) {
    return rouge_l_from_lcs(lcs_length(reference, hypothesis), reference.size(), hypothesis.size());
}

double rouge_l_tokens(std::span<const std::string> reference, std::span<const std::string> hypothesis) {
    std::unordered_map<std::string_view, std::uint32_t> vocab;
    auto intern = [&vocab](std::span<const std::string> tokens) {
        std::vector<std::uint32_t> ids;
        ids.reserve(tokens.size());
        for (const auto& t : tokens) {
            auto [it, _] = vocab.try_emplace(t, static_cast<std::uint32_t>(vocab.size()));
            ids.push_back(it->second);
        }
        return ids;
    };
    const auto ref = intern(reference);
    const auto hyp = intern(hypothesis);
    return rouge_l_ids(ref, hyp);
}

double rouge_l(std::string_view reference, std::string_view hypothesis) {
    const auto ref = tokenize(reference);
    const auto hyp = tokenize(hypothesis);
    return rouge_l_tokens(ref, hyp);
}

ConversationScore score_conversation(const Conversation& gold, const Conversation& pred) {
    ConversationScore score;
    score.id = gold.id;

    std::vector<const Message*> pred_turns;
    for (const auto& m : pred.messages) {
        if (m.role == Role::assistant) pred_turns.push_back(&m);
    }

    std::size_t position = 0;
    for (const auto& g : gold.messages) {
        if (g.role != Role::assistant) continue;
        const Message* p = position < pred_turns.size() ? pred_turns[position] : nullptr;
        ++position;
        if (p == nullptr) ++score.missing_turns;

        if (g.request) {
            ++score.requests;
            if (p != nullptr && p->request) {
                score.action_hits += static_cast<std::size_t>(action_em(*g.request, *p->request));
                const auto counts = count_argument_matches(*g.request, *p->request);
                score.f1_sum += argument_f1(counts);
                score.pooled += counts;
            } else {
                score.pooled.gold_count += g.request->arguments.size();
            }
        } else {
            ++score.texts;
            if (p != nullptr) score.rouge_sum += rouge_l(g.content, p->content);
            if (p != nullptr && p->request) ++score.extra_pred_requests;
        }
    }
    for (std::size_t i = position; i < pred_turns.size(); ++i) {
        if (pred_turns[i]->request) ++score.extra_pred_requests;
    }
    return score;
}

EvalReport evaluate(const std::vector<Conversation>& test_set, const std::vector<Conversation>& predictions,
                    const EvalOptions& options) {
    std::map<std::string_view, const Conversation*> by_id;
    for (const auto& p : predictions) {
        if (!by_id.emplace(p.id, &p).second) {
            throw Error(Errc::id_mismatch, "duplicate prediction id", p.id);
        }
    }

    EvalReport report;
    report.f1_averaging = options.f1_averaging;
    std::map<std::string_view, bool> seen;
    for (const auto& g : test_set) {
        if (!seen.emplace(g.id, true).second) throw Error(Errc::id_mismatch, "duplicate gold id", g.id);
        auto it = by_id.find(g.id);
        if (it == by_id.end()) throw Error(Errc::id_mismatch, "no prediction for gold conversation", g.id);
        report.per_conversation.push_back(score_conversation(g, *it->second));
    }
    for (const auto& [id, _] : by_id) {
        if (!seen.contains(id)) throw Error(Errc::id_mismatch, "prediction has no gold conversation", std::string(id));
    }

    // Aggregate in id order so the result does not depend on input order.
    std::sort(report.per_conversation.begin(), report.per_conversation.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });

    std::size_t hits = 0;
    double f1_sum = 0.0;
    double rouge_sum = 0.0;
    ArgMatchCounts pooled;
    for (const auto& s : report.per_conversation) {
        report.requests += s.requests;
        report.texts += s.texts;
        hits += s.action_hits;
        f1_sum += s.f1_sum;
        rouge_sum += s.rouge_sum;
        pooled += s.pooled;
    }
    report.conversations = report.per_conversation.size();
    if (report.requests > 0) {
        const auto n = static_cast<double>(report.requests);
        report.action_em = 100.0 * static_cast<double>(hits) / n;
        report.argument_f1 = options.f1_averaging == F1Averaging::micro ? 100.0 * argument_f1(pooled)
                                                                         : 100.0 * f1_sum / n;
    }
    if (report.texts > 0) report.rouge_l = 100.0 * rouge_sum / static_cast<double>(report.texts);
    return report;
}

Json to_json(const EvalReport& report) {
    Json per = Json::array();
    for (const auto& s : report.per_conversation) {
        per.push_back(Json{{"id", s.id},
                           {"requests", s.requests},
                           {"action_hits", s.action_hits},
                           {"argument_f1_sum", s.f1_sum},
                           {"texts", s.texts},
                           {"rouge_l_sum", s.rouge_sum},
                           {"missing_turns", s.missing_turns},
                           {"extra_pred_requests", s.extra_pred_requests}});
    }
    return Json{{"action_em", report.action_em},
                {"argument_f1", report.argument_f1},
                {"rouge_l", report.rouge_l},
                {"f1_averaging", report.f1_averaging == F1Averaging::micro ? "micro" : "macro"},
                {"conversations", report.conversations},
                {"requests", report.requests},
                {"texts", report.texts},
                {"per_conversation", std::move(per)}};
}

} // namespace toolagent
