#include "causaforge/extraction.hpp"

#include <json.hpp>

#include "causaforge/errors.hpp"
#include "causaforge/io.hpp"
#include "causaforge/text.hpp"

namespace causaforge {

std::string_view to_string(Relationship r) { return r == Relationship::causality ? "causality" : "correlation"; }

std::string_view to_string(Polarity p) {
    switch (p) {
        case Polarity::positive: return "positive";
        case Polarity::negative: return "negative";
        case Polarity::none: break;
    }
    return "none";
}

std::optional<Relationship> parse_relationship(std::string_view s) {
    const std::string v = text::to_lower(text::trim(s));
    if (v == "causality" || v == "causal") return Relationship::causality;
    if (v == "correlation" || v == "correlational") return Relationship::correlation;
    return std::nullopt;
}

std::optional<Polarity> parse_polarity(std::string_view s) {
    const std::string v = text::to_lower(text::trim(s));
    if (v == "positive") return Polarity::positive;
    if (v == "negative") return Polarity::negative;
    if (v.empty() || v == "none" || v == "null" || v == "n/a") return Polarity::none;
    return std::nullopt;
}

}  // namespace causaforge

namespace causaforge::extraction {

using nlohmann::json;

std::string_view to_string(RejectReason r) {
    switch (r) {
        case RejectReason::empty_concept: return "empty_concept";
        case RejectReason::self_loop: return "self_loop";
        case RejectReason::bad_enum: break;
    }
    return "bad_enum";
}

std::variant<Validated, Rejection> normalize_and_validate(const RawAssertion& raw, std::string_view source_doc,
                                                          std::size_t chunk_index) {
    Validated out;
    CausalAssertion& a = out.assertion;
    a.cause = text::normalize_concept(raw.cause);
    a.effect = text::normalize_concept(raw.effect);
    if (a.cause.empty() || a.effect.empty())
        return Rejection{RejectReason::empty_concept, "'" + raw.cause + "' -> '" + raw.effect + "'"};
    if (a.cause == a.effect) return Rejection{RejectReason::self_loop, a.cause};

    const auto rel = parse_relationship(raw.relationship);
    if (!rel) return Rejection{RejectReason::bad_enum, "relationship '" + raw.relationship + "'"};
    a.relationship = *rel;

    Polarity pol = Polarity::none;
    if (raw.polarity) {
        const auto parsed = parse_polarity(*raw.polarity);
        if (!parsed) return Rejection{RejectReason::bad_enum, "polarity '" + *raw.polarity + "'"};
        pol = *parsed;
    }
    if (a.relationship == Relationship::correlation && pol != Polarity::none) {
        out.warnings.push_back("correlation " + a.cause + " -- " + a.effect + " had polarity " +
                               std::string(causaforge::to_string(pol)) + "; coerced to none");
        pol = Polarity::none;
    }
    a.polarity = pol;
    a.source_doc = std::string(source_doc);
    a.chunk_index = chunk_index;
    a.cause_label = text::trim(raw.cause);
    a.effect_label = text::trim(raw.effect);
    return out;
}

const std::string_view kExtractionDirective =
    "From the “text” below, extract the key causal and correlational relationships described directly "
    "in the given text by analyzing reasoning and evidence within the text. Exclude any relationships that are "
    "attributed to or cited from other research studies.\n"
    "\n"
    "Format the relationships in JSON format with the following fields:\n"
    "\n"
    "'concept_pair': A list representation of the cause and effect concepts in the relationship, in [cause, "
    "effect] order.\n"
    "\n"
    "'relationship': 'causality' or 'correlation' indicating the type of relationship.\n"
    "\n"
    "'positive/negative': If the extracted relationship is causality, indicate whether it's a positive or "
    "negative causality relationship. If it's a correlation relationship, reply as None.\n";

std::string build_extraction_prompt(const corpus::TextChunk& chunk) {
    if (chunk.text.empty()) throw InvalidArgument("cannot build a prompt for an empty chunk");
    std::string prompt(kExtractionDirective);
    prompt += "\nStart each object with the document identifier \"";
    prompt += chunk.doc_id;
    prompt += "\".\n\ntext (document ";
    prompt += chunk.doc_id;
    prompt += ", part ";
    prompt += std::to_string(chunk.index);
    prompt += "):\n";
    prompt += chunk.text;
    return prompt;
}

namespace {

// Loose JSON-ish value model for model output.
struct LooseValue {
    enum class Kind { string, bare, list, object } kind = Kind::bare;
    std::string text;
    std::vector<LooseValue> items;
    std::vector<std::pair<std::optional<std::string>, LooseValue>> members;
};

class LooseParser {
public:
    explicit LooseParser(std::string_view src) : src_(src) {}

    std::optional<LooseValue> object_at(std::size_t pos, std::size_t& end) {
        pos_ = pos;
        depth_ = 0;
        auto v = parse_object();
        end = pos_;
        return v;
    }

private:
    static constexpr int kMaxDepth = 64;

    bool at_end() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }

    // A quote closes a string only when followed by structure; this keeps
    // apostrophes inside single-quoted text ("it's") intact.
    bool closes_here(std::size_t i) const {
        std::size_t j = i + 1;
        while (j < src_.size() && (src_[j] == ' ' || src_[j] == '\t')) ++j;
        return j >= src_.size() || src_[j] == ',' || src_[j] == ':' || src_[j] == ']' || src_[j] == '}' ||
               src_[j] == '\n' || src_[j] == '\r';
    }

    std::optional<std::string> parse_string() {
        const char q = peek();
        const std::size_t start = pos_;
        for (std::size_t i = start + 1; i < src_.size(); ++i) {
            if (src_[i] == '\\') {
                ++i;
                continue;
            }
            if (src_[i] == q && closes_here(i)) {
                pos_ = i + 1;
                std::string_view body = src_.substr(start + 1, i - start - 1);
                if (q == '"') {
                    try {
                        return json::parse(src_.substr(start, i - start + 1)).get<std::string>();
                    } catch (const json::exception&) {
                    }
                }
                return std::string(body);
            }
        }
        return std::nullopt;
    }

    std::string parse_bare(std::string_view stops) {
        const std::size_t start = pos_;
        while (!at_end() && stops.find(peek()) == std::string_view::npos && peek() != '\n') ++pos_;
        return text::trim(src_.substr(start, pos_ - start));
    }

    std::optional<LooseValue> parse_value(std::string_view stops) {
        skip_ws();
        if (at_end()) return std::nullopt;
        const char c = peek();
        if (c == '{') return parse_object();
        if (c == '[') return parse_list();
        LooseValue v;
        if (c == '"' || c == '\'') {
            auto s = parse_string();
            if (!s) return std::nullopt;
            v.kind = LooseValue::Kind::string;
            v.text = std::move(*s);
            return v;
        }
        v.kind = LooseValue::Kind::bare;
        v.text = parse_bare(stops);
        if (v.text.empty()) return std::nullopt;
        return v;
    }

    std::optional<LooseValue> parse_list() {
        if (++depth_ > kMaxDepth) return std::nullopt;
        ++pos_;  // '['
        LooseValue v;
        v.kind = LooseValue::Kind::list;
        for (;;) {
            skip_ws();
            if (at_end()) return std::nullopt;
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            if (peek() == ']') {
                ++pos_;
                break;
            }
            auto item = parse_value(",]");
            if (!item) return std::nullopt;
            v.items.push_back(std::move(*item));
        }
        --depth_;
        return v;
    }

    std::optional<LooseValue> parse_object() {
        if (at_end() || peek() != '{' || ++depth_ > kMaxDepth) return std::nullopt;
        ++pos_;
        LooseValue v;
        v.kind = LooseValue::Kind::object;
        for (;;) {
            skip_ws();
            if (at_end()) return std::nullopt;
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            if (peek() == '}') {
                ++pos_;
                break;
            }
            std::optional<std::string> head;
            bool head_is_string = false;
            if (peek() == '"' || peek() == '\'') {
                head = parse_string();
                head_is_string = true;
            } else if (peek() == '{' || peek() == '[') {
                auto nested = parse_value(",}");
                if (!nested) return std::nullopt;
                v.members.emplace_back(std::nullopt, std::move(*nested));
                continue;
            } else {
                head = parse_bare(":,}");
            }
            if (!head) return std::nullopt;
            skip_ws();
            if (!at_end() && peek() == ':') {
                ++pos_;
                auto value = parse_value(",}");
                if (!value) return std::nullopt;
                v.members.emplace_back(std::move(head), std::move(*value));
            } else {
                if (head->empty() && !head_is_string) return std::nullopt;
                LooseValue bare;
                bare.kind = head_is_string ? LooseValue::Kind::string : LooseValue::Kind::bare;
                bare.text = std::move(*head);
                v.members.emplace_back(std::nullopt, std::move(bare));
            }
            skip_ws();
            if (at_end()) return std::nullopt;
            if (peek() != ',' && peek() != '}') return std::nullopt;
        }
        --depth_;
        return v;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

std::string canonical_key(std::string_view key) {
    std::string k = text::to_lower(text::trim(key));
    for (char& c : k)
        if (c == ' ' || c == '-') c = '_';
    return k;
}

bool is_null_word(const LooseValue& v) {
    if (v.kind != LooseValue::Kind::bare) return false;
    const std::string t = text::to_lower(v.text);
    return t == "null" || t == "none";
}

bool has_nested_object(const LooseValue& obj) {
    for (const auto& [key, value] : obj.members) {
        if (value.kind == LooseValue::Kind::object) return true;
        if (value.kind == LooseValue::Kind::list)
            for (const auto& item : value.items)
                if (item.kind == LooseValue::Kind::object) return true;
    }
    return false;
}

struct ScanState {
    std::vector<RawAssertion> found;
    std::size_t records = 0;
    std::size_t skipped = 0;
};

void collect(const LooseValue& v, ScanState& st) {
    if (v.kind == LooseValue::Kind::list) {
        for (const auto& item : v.items) collect(item, st);
        return;
    }
    if (v.kind != LooseValue::Kind::object) return;

    const LooseValue* pair = nullptr;
    const LooseValue* relationship = nullptr;
    const LooseValue* polarity = nullptr;
    for (const auto& [key, value] : v.members) {
        if (!key) continue;
        const std::string k = canonical_key(*key);
        if (k == "concept_pair" || k == "conceptpair")
            pair = &value;
        else if (k == "relationship" || k == "relation")
            relationship = &value;
        else if (k == "positive/negative" || k == "polarity" || k == "positive_negative" || k == "positive_or_negative")
            polarity = &value;
    }
    if (!pair && has_nested_object(v)) {
        for (const auto& [key, value] : v.members) collect(value, st);
        return;
    }

    ++st.records;
    const bool pair_ok = pair && pair->kind == LooseValue::Kind::list && pair->items.size() == 2 &&
                         pair->items[0].kind != LooseValue::Kind::list &&
                         pair->items[0].kind != LooseValue::Kind::object &&
                         pair->items[1].kind != LooseValue::Kind::list &&
                         pair->items[1].kind != LooseValue::Kind::object;
    const bool rel_ok = relationship && (relationship->kind == LooseValue::Kind::string ||
                                         relationship->kind == LooseValue::Kind::bare);
    if (!pair_ok || !rel_ok) {
        ++st.skipped;
        return;
    }
    RawAssertion raw;
    raw.cause = pair->items[0].text;
    raw.effect = pair->items[1].text;
    raw.relationship = relationship->text;
    if (polarity && !is_null_word(*polarity) && polarity->kind != LooseValue::Kind::list &&
        polarity->kind != LooseValue::Kind::object)
        raw.polarity = polarity->text;
    st.found.push_back(std::move(raw));
}

}  // namespace

std::vector<RawAssertion> scan_raw_assertions(std::string_view raw_text, std::size_t* objects_found,
                                              std::size_t* skipped) {
    ScanState st;
    LooseParser parser(raw_text);
    std::size_t i = 0;
    while ((i = raw_text.find('{', i)) != std::string_view::npos) {
        std::size_t end = i;
        if (auto obj = parser.object_at(i, end)) {
            collect(*obj, st);
            i = end;
        } else {
            ++i;
        }
    }
    if (objects_found) *objects_found = st.records;
    if (skipped) *skipped = st.skipped;
    return std::move(st.found);
}

ParseOutcome parse_response(std::string_view raw_text, std::string_view source_doc, std::size_t chunk_index) {
    ParseOutcome out;
    const auto raws = scan_raw_assertions(raw_text, &out.objects_found, &out.skipped);
    if (out.objects_found == 0 && !text::trim(raw_text).empty())
        throw ParseFailure("no JSON objects recovered from response for " + std::string(source_doc) + " part " +
                           std::to_string(chunk_index));
    for (const auto& raw : raws) {
        auto result = normalize_and_validate(raw, source_doc, chunk_index);
        if (auto* ok = std::get_if<Validated>(&result)) {
            out.warnings.insert(out.warnings.end(), ok->warnings.begin(), ok->warnings.end());
            out.assertions.push_back(std::move(ok->assertion));
        } else {
            out.rejections.push_back(std::get<Rejection>(std::move(result)));
        }
    }
    return out;
}

std::string serialize_assertions(const std::vector<CausalAssertion>& assertions) {
    json arr = json::array();
    for (const auto& a : assertions) {
        json obj;
        obj["concept_pair"] = {a.cause_label.empty() ? a.cause : a.cause_label,
                               a.effect_label.empty() ? a.effect : a.effect_label};
        obj["relationship"] = std::string(to_string(a.relationship));
        obj["positive/negative"] = a.polarity == Polarity::none ? "None" : std::string(to_string(a.polarity));
        arr.push_back(std::move(obj));
    }
    return arr.dump(2);
}

std::string build_verification_prompt(const CausalAssertion& a, const corpus::TextChunk& chunk) {
    std::string prompt = "Check one relationship extracted from the “text” below.\n\n";
    prompt += "Cause: " + (a.cause_label.empty() ? a.cause : a.cause_label) + "\n";
    prompt += "Effect: " + (a.effect_label.empty() ? a.effect : a.effect_label) + "\n";
    prompt += "Relationship: " + std::string(to_string(a.relationship));
    if (a.polarity != Polarity::none) prompt += " (" + std::string(to_string(a.polarity)) + ")";
    prompt +=
        "\n\nIs this relationship stated directly in the text, and is the direction correct? Answer with one "
        "word: yes if it holds as stated, flip if it holds with cause and effect exchanged, no otherwise.\n\n";
    prompt += "text (document " + chunk.doc_id + ", part " + std::to_string(chunk.index) + "):\n";
    prompt += chunk.text;
    return prompt;
}

std::optional<Verdict> parse_verdict(std::string_view response) {
    const std::string lower = text::to_lower(response);
    std::size_t i = 0;
    while (i < lower.size()) {
        while (i < lower.size() && !std::isalpha(static_cast<unsigned char>(lower[i]))) ++i;
        std::size_t j = i;
        while (j < lower.size() && std::isalpha(static_cast<unsigned char>(lower[j]))) ++j;
        const std::string_view word(lower.data() + i, j - i);
        if (word == "yes") return Verdict::yes;
        if (word == "no") return Verdict::no;
        if (word == "flip") return Verdict::flip;
        i = j;
    }
    return std::nullopt;
}

std::optional<CausalAssertion> apply_verdict(const CausalAssertion& a, Verdict v) {
    switch (v) {
        case Verdict::yes: return a;
        case Verdict::no: return std::nullopt;
        case Verdict::flip: {
            CausalAssertion f = a;
            std::swap(f.cause, f.effect);
            std::swap(f.cause_label, f.effect_label);
            return f;
        }
    }
    return std::nullopt;
}

std::string assertions_to_jsonl(const std::vector<CausalAssertion>& assertions) {
    std::string out;
    for (const auto& a : assertions) {
        json j = {{"cause", a.cause},
                  {"effect", a.effect},
                  {"relationship", std::string(to_string(a.relationship))},
                  {"polarity", std::string(to_string(a.polarity))},
                  {"source_doc", a.source_doc},
                  {"chunk_index", a.chunk_index},
                  {"cause_label", a.cause_label},
                  {"effect_label", a.effect_label}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<CausalAssertion> read_assertions(const std::filesystem::path& path) {
    const auto lines = io::read_lines(path);
    std::vector<CausalAssertion> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        try {
            const json j = json::parse(lines[i]);
            CausalAssertion a;
            a.cause = j.at("cause").get<std::string>();
            a.effect = j.at("effect").get<std::string>();
            const auto rel = parse_relationship(j.at("relationship").get<std::string>());
            const auto pol = parse_polarity(j.at("polarity").get<std::string>());
            if (!rel || !pol) throw CorruptRecord(i + 1, "bad relationship or polarity");
            a.relationship = *rel;
            a.polarity = *pol;
            a.source_doc = j.at("source_doc").get<std::string>();
            a.chunk_index = j.at("chunk_index").get<std::size_t>();
            a.cause_label = j.value("cause_label", a.cause);
            a.effect_label = j.value("effect_label", a.effect);
            if (a.cause.empty() || a.effect.empty() || a.cause == a.effect)
                throw CorruptRecord(i + 1, "assertion violates concept invariants");
            out.push_back(std::move(a));
        } catch (const json::exception& e) {
            throw CorruptRecord(i + 1, e.what());
        }
    }
    return out;
}

}  // namespace causaforge::extraction
