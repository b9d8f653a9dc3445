// SPDX-License-Identifier: Apache-2.0
#include "toolagent/memory.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>

#include "toolagent/io.hpp"
#include "toolagent/tokenizer.hpp"

namespace toolagent {

namespace fs = std::filesystem;

std::vector<std::pair<std::size_t, std::size_t>>
chunk_ranges(std::size_t token_count, const ChunkingOptions& options) {
    if (options.chunk_size == 0 || options.overlap >= options.chunk_size) {
        throw Error(Errc::invalid_config, "chunking requires chunk_size > overlap");
    }
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    if (token_count == 0) return ranges;
    if (token_count <= options.chunk_size) {
        ranges.emplace_back(0, token_count);
        return ranges;
    }
    const auto stride = options.chunk_size - options.overlap;
    for (std::size_t start = 0; start < token_count; start += stride) {
        ranges.emplace_back(start, std::min(start + options.chunk_size, token_count));
    }
    return ranges;
}

KnowledgeStore::KnowledgeStore(std::shared_ptr<const Embedder> embedder, ChunkingOptions options)
    : embedder_(std::move(embedder)), options_(options) {
    if (!embedder_) throw Error(Errc::invalid_config, "knowledge store needs an embedder");
    (void)chunk_ranges(0, options_);
}

void KnowledgeStore::ingest(const std::string& doc_id, std::string_view text) {
    {
        std::shared_lock lock(mutex_);
        if (doc_ids_.contains(doc_id)) throw Error(Errc::duplicate_id, "document already ingested", doc_id);
    }
    const auto spans = token_spans(text);
    if (spans.empty()) throw Error(Errc::empty_input, "document has no text", doc_id);

    std::vector<Chunk> chunks;
    std::vector<Vector> vectors;
    for (const auto& [first, last] : chunk_ranges(spans.size(), options_)) {
        const auto begin = spans[first].offset;
        const auto end = spans[last - 1].end();
        Chunk chunk{doc_id, chunks.size(), std::string(text.substr(begin, end - begin))};
        vectors.push_back(embedder_->embed(chunk.text));
        chunks.push_back(std::move(chunk));
    }

    std::unique_lock lock(mutex_);
    if (!doc_ids_.insert(doc_id).second) throw Error(Errc::duplicate_id, "document already ingested", doc_id);
    std::move(chunks.begin(), chunks.end(), std::back_inserter(chunks_));
    std::move(vectors.begin(), vectors.end(), std::back_inserter(vectors_));
}

void KnowledgeStore::ingest_directory(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw Error(Errc::io, "not a directory", dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) ingest(file.filename().string(), read_file(file));
}

std::vector<KnowledgeHit> KnowledgeStore::search(std::string_view query, std::size_t k) const {
    if (k == 0) throw Error(Errc::invalid_config, "k must be positive");
    const auto q = embedder_->embed(query);

    std::shared_lock lock(mutex_);
    if (chunks_.empty()) throw Error(Errc::empty_index, "knowledge store is empty");
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(chunks_.size());
    for (std::size_t i = 0; i < chunks_.size(); ++i) scored.emplace_back(dot(q, vectors_[i]), i);

    const auto keep = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                      [this](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first > b.first;
                          const auto& ca = chunks_[a.second];
                          const auto& cb = chunks_[b.second];
                          if (ca.doc_id != cb.doc_id) return ca.doc_id < cb.doc_id;
                          return ca.index < cb.index;
                      });
    std::vector<KnowledgeHit> hits;
    hits.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) hits.push_back({chunks_[scored[i].second], scored[i].first});
    return hits;
}

std::vector<std::string> KnowledgeStore::retrieve(std::string_view query, std::size_t k) const {
    std::vector<std::string> texts;
    for (auto& hit : search(query, k)) texts.push_back(std::move(hit.chunk.text));
    return texts;
}

std::size_t KnowledgeStore::chunk_count() const {
    std::shared_lock lock(mutex_);
    return chunks_.size();
}

std::vector<Chunk> KnowledgeStore::chunks() const {
    std::shared_lock lock(mutex_);
    return chunks_;
}

std::string render_tool_line(const ToolSchema& schema) {
    Json params = Json::array();
    for (const auto& p : schema.parameters) params.push_back(to_json(p));
    return dump_compact(Json{{"name", schema.name},
                             {"description", schema.description},
                             {"parameters", std::move(params)}});
}

std::string render_history_line(const Message& message) {
    return std::string(to_string(message.role)) + ": " + message.content;
}

namespace {

// One renderable section: its header (may be empty) and items with their
// token costs. Sections are joined by blank lines, items by newlines, so the
// token count of the whole prompt is the sum of the parts.
struct Section {
    std::string_view header;
    std::vector<std::string> items;
    std::vector<std::size_t> costs;
    std::size_t first = 0;  // items before `first` have been dropped
    std::size_t last = 0;   // items at or after `last` have been dropped

    void add(std::string item) {
        costs.push_back(count_tokens(item));
        items.push_back(std::move(item));
        last = items.size();
    }
    [[nodiscard]] std::size_t kept() const { return last - first; }
    [[nodiscard]] std::size_t cost() const {
        if (kept() == 0) return 0;
        auto sum = std::accumulate(costs.begin() + static_cast<std::ptrdiff_t>(first),
                                   costs.begin() + static_cast<std::ptrdiff_t>(last), std::size_t{0});
        return sum + count_tokens(header);
    }
    void render(std::string& out, std::string_view separator) const {
        if (kept() == 0) return;
        if (!out.empty()) out += "\n\n";
        if (!header.empty()) {
            out += header;
            out += '\n';
        }
        for (std::size_t i = first; i < last; ++i) {
            if (i != first) out += separator;
            out += items[i];
        }
    }
};

} // namespace

AssembledPrompt assemble_prompt(const PromptBundle& bundle, std::size_t budget, const PromptPolicy& policy) {
    if (count_tokens(bundle.current_query) == 0) {
        throw Error(Errc::empty_input, "current query is empty");
    }
    const auto fixed = count_tokens(bundle.system_prompt) + count_tokens(bundle.current_query);
    if (fixed > budget) {
        throw Error(Errc::context_overflow, "system prompt and query need " + std::to_string(fixed) +
                                                " tokens, budget is " + std::to_string(budget));
    }

    Section schemas{tools_header, {}, {}};
    for (const auto& s : bundle.api_schemas) schemas.add(render_tool_line(s));
    Section knowledge{knowledge_header, {}, {}};
    for (const auto& k : bundle.knowledge) knowledge.add(k);
    Section few_shot{examples_header, {}, {}};
    for (const auto& f : bundle.few_shot) few_shot.add(f);
    Section history{history_header, {}, {}};
    for (const auto& m : bundle.history) history.add(render_history_line(m));

    auto total = [&] { return fixed + schemas.cost() + knowledge.cost() + few_shot.cost() + history.cost(); };

    for (auto section : policy.drop_order) {
        if (total() <= budget) break;
        Section* target = nullptr;
        bool drop_front = false;
        switch (section) {
            case PromptSection::few_shot: target = &few_shot; break;
            case PromptSection::history: target = &history; drop_front = true; break;
            case PromptSection::knowledge: target = &knowledge; break;
            case PromptSection::api_schemas: target = &schemas; break;
            case PromptSection::system:
            case PromptSection::current_query:
                throw Error(Errc::invalid_config, "system prompt and query cannot be dropped");
        }
        while (target->kept() > 0 && total() > budget) {
            if (drop_front) {
                ++target->first;
            } else {
                --target->last;
            }
        }
    }
    if (total() > budget) {
        throw Error(Errc::context_overflow, "prompt does not fit the budget under the configured drop policy");
    }

    AssembledPrompt out;
    if (!bundle.system_prompt.empty()) out.text = bundle.system_prompt;
    schemas.render(out.text, "\n");
    knowledge.render(out.text, "\n");
    few_shot.render(out.text, "\n\n");
    history.render(out.text, "\n");
    if (!out.text.empty()) out.text += "\n\n";
    out.text += bundle.current_query;

    out.tokens = total();
    out.schemas_kept = schemas.kept();
    out.knowledge_kept = knowledge.kept();
    out.few_shot_kept = few_shot.kept();
    out.history_kept = history.kept();
    return out;
}

std::string build_prompt(const PromptBundle& bundle, std::size_t budget, const PromptPolicy& policy) {
    return assemble_prompt(bundle, budget, policy).text;
}

} // namespace toolagent
