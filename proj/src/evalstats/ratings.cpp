#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "causaforge/errors.hpp"
#include "causaforge/evalstats.hpp"
#include "causaforge/io.hpp"
#include "causaforge/text.hpp"

namespace causaforge::evalstats {

std::string_view to_string(Dimension d) { return d == Dimension::novelty ? "novelty" : "usefulness"; }

std::string_view to_string(AggregateMode m) {
    switch (m) {
        case AggregateMode::mean: return "mean";
        case AggregateMode::median: return "median";
        case AggregateMode::max: break;
    }
    return "max";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(text::trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(text::trim(cur));
    return fields;
}

std::optional<Dimension> parse_dimension(const std::string& s) {
    const std::string v = text::to_lower(s);
    if (v == "novelty") return Dimension::novelty;
    if (v == "usefulness" || v == "utility") return Dimension::usefulness;
    return std::nullopt;
}

}  // namespace

void RatingMatrix::validate() const {
    if (hypotheses.empty() || reviewers.empty()) throw InvalidArgument("rating matrix is empty");
    for (const auto d : kDimensions) {
        const auto& rows = cells[static_cast<std::size_t>(d)];
        if (rows.size() != hypotheses.size()) throw InvariantViolation("rating matrix row count mismatch");
        for (const auto& row : rows)
            if (row.size() != reviewers.size()) throw InvariantViolation("rating matrix column count mismatch");
    }
    std::map<std::string, std::size_t> per_group;
    for (const auto& h : hypotheses) {
        if (std::find(groups.begin(), groups.end(), h.group) == groups.end())
            throw InvariantViolation("undeclared group '" + h.group + "'");
        ++per_group[h.group];
    }
    for (const auto& [g, n] : per_group)
        if (n < 2) throw InvariantViolation("group '" + g + "' has fewer than 2 hypotheses");
}

RatingMatrix parse_ratings_csv(const std::string& csv, const std::vector<std::string>& declared_groups) {
    std::istringstream in(csv);
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::array<std::size_t, 5>> columns;

    RatingMatrix m;
    m.groups = declared_groups;
    std::map<std::string, std::size_t> hyp_index;
    std::map<std::string, std::size_t> rev_index;
    struct Cell {
        std::size_t h, r;
        Dimension d;
        double v;
    };
    std::vector<Cell> raw;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (!columns) {
            static const std::array<std::string, 5> kNames{"hypothesis_id", "group", "reviewer", "dimension", "rating"};
            std::array<std::size_t, 5> idx{};
            for (std::size_t k = 0; k < kNames.size(); ++k) {
                auto it = std::find(fields.begin(), fields.end(), kNames[k]);
                if (it == fields.end()) throw CorruptRecord(line_no, "missing column " + kNames[k]);
                idx[k] = static_cast<std::size_t>(it - fields.begin());
            }
            columns = idx;
            continue;
        }
        const auto& c = *columns;
        if (fields.size() <= *std::max_element(c.begin(), c.end())) throw CorruptRecord(line_no, "too few fields");
        const std::string& hid = fields[c[0]];
        const std::string& group = fields[c[1]];
        const std::string& reviewer = fields[c[2]];
        const auto dim = parse_dimension(fields[c[3]]);
        if (hid.empty() || reviewer.empty()) throw CorruptRecord(line_no, "empty id");
        if (!dim) throw CorruptRecord(line_no, "unknown dimension '" + fields[c[3]] + "'");
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(fields[c[4]], &used);
            if (used != fields[c[4]].size() || !std::isfinite(value)) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw CorruptRecord(line_no, "bad rating '" + fields[c[4]] + "'");
        }
        auto [hit, new_h] = hyp_index.emplace(hid, m.hypotheses.size());
        if (new_h)
            m.hypotheses.push_back({hid, group});
        else if (m.hypotheses[hit->second].group != group)
            throw CorruptRecord(line_no, "hypothesis " + hid + " listed under two groups");
        auto [rit, new_r] = rev_index.emplace(reviewer, m.reviewers.size());
        if (new_r) m.reviewers.push_back(reviewer);
        raw.push_back({hit->second, rit->second, *dim, value});
    }
    if (!columns) throw CorruptRecord(1, "missing header");

    const double kMissing = std::nan("");
    for (auto& rows : m.cells) rows.assign(m.hypotheses.size(), std::vector<double>(m.reviewers.size(), kMissing));
    for (const auto& cell : raw) {
        double& slot = m.cells[static_cast<std::size_t>(cell.d)][cell.h][cell.r];
        if (!std::isnan(slot))
            throw InvariantViolation("duplicate rating for " + m.hypotheses[cell.h].hypothesis_id + " by " +
                                     m.reviewers[cell.r]);
        slot = cell.v;
    }
    for (const auto d : kDimensions)
        for (std::size_t h = 0; h < m.hypotheses.size(); ++h)
            for (std::size_t r = 0; r < m.reviewers.size(); ++r)
                if (std::isnan(m.at(d, h, r)))
                    throw InvariantViolation("missing " + std::string(to_string(d)) + " rating for " +
                                             m.hypotheses[h].hypothesis_id + " by " + m.reviewers[r]);
    m.validate();
    return m;
}

RatingMatrix load_ratings(const std::filesystem::path& path, const std::vector<std::string>& declared_groups) {
    return parse_ratings_csv(io::read_file(path), declared_groups);
}

RatingMatrix standardize_ratings(const RatingMatrix& m) {
    RatingMatrix z = m;
    const std::size_t n = m.hypotheses.size();
    if (n < 2) throw InsufficientData("standardization needs at least two hypotheses");
    for (const auto d : kDimensions) {
        for (std::size_t r = 0; r < m.reviewers.size(); ++r) {
            double mean = 0.0;
            for (std::size_t h = 0; h < n; ++h) mean += m.at(d, h, r);
            mean /= static_cast<double>(n);
            double ss = 0.0;
            for (std::size_t h = 0; h < n; ++h) ss += (m.at(d, h, r) - mean) * (m.at(d, h, r) - mean);
            const double sd = std::sqrt(ss / static_cast<double>(n - 1));
            if (!(sd > 0.0))
                throw ZeroVariance("reviewer " + m.reviewers[r] + " gave constant " + std::string(to_string(d)) +
                                   " ratings");
            for (std::size_t h = 0; h < n; ++h)
                z.cells[static_cast<std::size_t>(d)][h][r] = (m.at(d, h, r) - mean) / sd;
        }
    }
    return z;
}

std::vector<double> aggregate_scores(const RatingMatrix& m, Dimension d, AggregateMode mode) {
    if (m.reviewers.empty()) throw InsufficientData("no reviewers");
    std::vector<double> out;
    out.reserve(m.hypotheses.size());
    std::vector<double> row;
    for (std::size_t h = 0; h < m.hypotheses.size(); ++h) {
        row = m.cells[static_cast<std::size_t>(d)][h];
        switch (mode) {
            case AggregateMode::mean: {
                double s = 0.0;
                for (double v : row) s += v;
                out.push_back(s / static_cast<double>(row.size()));
                break;
            }
            case AggregateMode::median: {
                std::sort(row.begin(), row.end());
                const std::size_t k = row.size();
                out.push_back(k % 2 ? row[k / 2] : (row[k / 2 - 1] + row[k / 2]) / 2.0);
                break;
            }
            case AggregateMode::max:
                out.push_back(*std::max_element(row.begin(), row.end()));
                break;
        }
    }
    return out;
}

std::vector<Group> group_scores(const RatingMatrix& m, const std::vector<double>& scores) {
    if (scores.size() != m.hypotheses.size()) throw LengthMismatch("one score per hypothesis expected");
    std::vector<Group> out;
    for (const auto& label : m.groups) {
        Group g{label, {}};
        for (std::size_t h = 0; h < m.hypotheses.size(); ++h)
            if (m.hypotheses[h].group == label) g.values.push_back(scores[h]);
        if (!g.values.empty()) out.push_back(std::move(g));
    }
    return out;
}

}  // namespace causaforge::evalstats
