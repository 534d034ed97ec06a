#include "causaforge/corpus.hpp"

#include <json.hpp>
#include <regex>
#include <unordered_set>

#include "causaforge/errors.hpp"
#include "causaforge/io.hpp"
#include "causaforge/text.hpp"

namespace causaforge::corpus {

using nlohmann::json;

void FilterCriteria::validate() const {
    const bool has_keyword = std::any_of(keywords.begin(), keywords.end(), [](const auto& k) { return !k.empty(); });
    const bool has_journal = journal_required_term && !journal_required_term->empty();
    if (!has_keyword && !has_journal) throw InvalidArgument("filter criteria need a keyword or a journal term");
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::vector<DocumentRecord> filter_documents(const std::vector<DocumentRecord>& docs, const FilterCriteria& criteria) {
    criteria.validate();
    std::vector<std::string> keywords;
    for (const auto& k : criteria.keywords)
        if (!k.empty()) keywords.push_back(text::to_lower(k));
    std::optional<std::string> journal_term;
    if (criteria.journal_required_term && !criteria.journal_required_term->empty())
        journal_term = text::to_lower(*criteria.journal_required_term);

    std::vector<DocumentRecord> kept;
    for (const auto& doc : docs) {
        const std::string title = text::to_lower(doc.title);
        const std::string abstract = text::to_lower(doc.abstract);
        const std::string journal = text::to_lower(doc.journal);
        if (!keywords.empty()) {
            const bool hit = std::any_of(keywords.begin(), keywords.end(), [&](const std::string& k) {
                return title.find(k) != std::string::npos || abstract.find(k) != std::string::npos ||
                       journal.find(k) != std::string::npos;
            });
            if (!hit) continue;
        }
        if (journal_term && journal.find(*journal_term) == std::string::npos) continue;
        kept.push_back(doc);
    }
    return kept;
}

bool is_reference_heading(std::string_view line) {
    // Optional markdown hashes, optional numbering ("7.", "VII)", "7.1"),
    // the heading word, optional trailing ':' or '.'.
    static const std::regex kHeading(
        R"(^[ \t]*(#{1,6}[ \t]*)?((\d+(\.\d+)*|[ivxlc]+)[.):]?[ \t]+)?(references?|bibliography)[ \t]*[:.]?[ \t]*$)",
        std::regex::icase | std::regex::optimize);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.size() > 64) return false;
    return std::regex_match(line.begin(), line.end(), kHeading);
}

std::string strip_references(std::string_view text) {
    std::optional<std::size_t> cut;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        if (is_reference_heading(text.substr(start, end - start))) cut = start;
        if (end == text.size()) break;
        start = end + 1;
    }
    return std::string(cut ? text.substr(0, *cut) : text);
}

namespace {

// Splits after every run of separators matched by `is_boundary`, so that the
// pieces concatenate back to the input.
std::vector<std::string_view> split_paragraphs(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '\n' && i + 1 < text.size() && text[i + 1] == '\n') {
            std::size_t j = i;
            while (j < text.size() && (text[j] == '\n' || text[j] == '\r')) ++j;
            out.push_back(text.substr(begin, j - begin));
            begin = j;
            i = j;
        } else {
            ++i;
        }
    }
    if (begin < text.size()) out.push_back(text.substr(begin));
    return out;
}

std::vector<std::string_view> split_sentences(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    for (std::size_t i = 0; i + 1 < text.size(); ++i) {
        const char c = text[i];
        if ((c == '.' || c == '?' || c == '!') && text[i + 1] == ' ') {
            out.push_back(text.substr(begin, i + 2 - begin));
            begin = i + 2;
            ++i;
        }
    }
    if (begin < text.size()) out.push_back(text.substr(begin));
    return out;
}

void split_chars(std::string_view text, std::size_t max_bytes, std::vector<std::string_view>& atoms) {
    while (!text.empty()) {
        std::size_t n = text::utf8_safe_prefix(text, max_bytes);
        if (n == 0) n = std::min(max_bytes, text.size());  // malformed UTF-8: cut raw
        atoms.push_back(text.substr(0, n));
        text.remove_prefix(n);
    }
}

}  // namespace

std::vector<TextChunk> chunk_text(std::string_view text, std::size_t max_tokens, std::string_view doc_id) {
    if (max_tokens < 1) throw InvalidArgument("max_tokens must be >= 1");
    const std::size_t max_bytes = max_tokens * 4;

    std::vector<std::string_view> atoms;
    for (std::string_view para : split_paragraphs(text)) {
        if (para.size() <= max_bytes) {
            atoms.push_back(para);
            continue;
        }
        for (std::string_view sentence : split_sentences(para)) {
            if (sentence.size() <= max_bytes)
                atoms.push_back(sentence);
            else
                split_chars(sentence, max_bytes, atoms);
        }
    }

    std::vector<TextChunk> chunks;
    std::size_t chunk_begin = 0;
    std::size_t chunk_len = 0;
    const auto flush = [&] {
        if (chunk_len == 0) return;
        TextChunk c;
        c.doc_id = std::string(doc_id);
        c.index = chunks.size();
        c.text = std::string(text.substr(chunk_begin, chunk_len));
        c.token_estimate = estimate_tokens(c.text);
        chunks.push_back(std::move(c));
        chunk_begin += chunk_len;
        chunk_len = 0;
    };
    // Atoms are contiguous views into `text`, in order.
    for (std::string_view atom : atoms) {
        if (chunk_len + atom.size() > max_bytes) flush();
        chunk_len += atom.size();
    }
    flush();
    return chunks;
}

std::vector<DocumentRecord> read_corpus(const std::filesystem::path& path) {
    const auto lines = io::read_lines(path);
    std::vector<DocumentRecord> docs;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (text::trim(lines[i]).empty()) continue;
        const std::size_t line_no = i + 1;
        json j;
        try {
            j = json::parse(lines[i]);
        } catch (const json::exception& e) {
            throw CorruptRecord(line_no, e.what());
        }
        if (!j.is_object()) throw CorruptRecord(line_no, "expected a JSON object");
        DocumentRecord doc;
        try {
            doc.doc_id = j.at("doc_id").get<std::string>();
            doc.title = j.value("title", "");
            doc.abstract = j.value("abstract", "");
            doc.journal = j.value("journal", "");
            doc.year = j.at("year").get<int>();
            if (j.contains("body_text") && !j["body_text"].is_null()) doc.body_text = j["body_text"].get<std::string>();
        } catch (const json::exception& e) {
            throw CorruptRecord(line_no, e.what());
        }
        if (doc.doc_id.empty()) throw CorruptRecord(line_no, "empty doc_id");
        if (doc.year < 1800 || doc.year > 2100) throw CorruptRecord(line_no, "year out of range");
        if (!seen.insert(doc.doc_id).second) throw CorruptRecord(line_no, "duplicate doc_id " + doc.doc_id);
        docs.push_back(std::move(doc));
    }
    return docs;
}

std::string chunks_to_jsonl(const std::vector<TextChunk>& chunks) {
    std::string out;
    for (const auto& c : chunks) {
        json j = {{"doc_id", c.doc_id}, {"index", c.index}, {"text", c.text}, {"token_estimate", c.token_estimate}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<TextChunk> read_chunks(const std::filesystem::path& path) {
    const auto lines = io::read_lines(path);
    std::vector<TextChunk> chunks;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        try {
            const json j = json::parse(lines[i]);
            TextChunk c;
            c.doc_id = j.at("doc_id").get<std::string>();
            c.index = j.at("index").get<std::size_t>();
            c.text = j.at("text").get<std::string>();
            c.token_estimate = j.at("token_estimate").get<std::size_t>();
            chunks.push_back(std::move(c));
        } catch (const json::exception& e) {
            throw CorruptRecord(i + 1, e.what());
        }
    }
    return chunks;
}

}  // namespace causaforge::corpus
