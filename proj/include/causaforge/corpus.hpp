#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace causaforge::corpus {

struct DocumentRecord {
    std::string doc_id;  // e.g. "PMC8451848"
    std::string title;
    std::string abstract;
    std::string journal;
    int year = 0;
    std::string body_text;  // may be empty for abstract-only records

    bool operator==(const DocumentRecord&) const = default;
};

// Keywords are matched case-insensitively as substrings of title, abstract
// and journal. When `journal_required_term` is set the journal must also
// contain it. An empty keyword list disables the keyword test.
struct FilterCriteria {
    std::vector<std::string> keywords;
    std::optional<std::string> journal_required_term;

    void validate() const;
};

struct TextChunk {
    std::string doc_id;
    std::size_t index = 0;
    std::string text;
    std::size_t token_estimate = 0;

    bool operator==(const TextChunk&) const = default;
};

inline constexpr std::size_t kDefaultMaxTokens = 4000;

// ceil(utf8 bytes / 4)
std::size_t estimate_tokens(std::string_view text);

std::vector<DocumentRecord> filter_documents(const std::vector<DocumentRecord>& docs, const FilterCriteria& criteria);

// True for a line that is only a reference-section heading, e.g.
// "References", "7. REFERENCES", "## Bibliography:".
bool is_reference_heading(std::string_view line);

// Cuts the text at the start of the last standalone reference heading line.
std::string strip_references(std::string_view text);

// Greedy segmentation: paragraphs, then sentences, then code points. The
// chunks concatenate back to `text` byte for byte.
std::vector<TextChunk> chunk_text(std::string_view text, std::size_t max_tokens = kDefaultMaxTokens,
                                  std::string_view doc_id = {});

// JSON Lines corpus, one DocumentRecord per line. Unknown keys are ignored.
std::vector<DocumentRecord> read_corpus(const std::filesystem::path& path);

std::string chunks_to_jsonl(const std::vector<TextChunk>& chunks);
std::vector<TextChunk> read_chunks(const std::filesystem::path& path);

}  // namespace causaforge::corpus
