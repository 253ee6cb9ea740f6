#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "nswstv/election.hpp"
#include "nswstv/randomness.hpp"
#include "nswstv/simulation_report.hpp"
#include "nswstv/transcript.hpp"

namespace nswstv {

/// Malformed or inconsistent input file. Carries every problem found.
class InputError : public std::runtime_error
{
  public:
    explicit InputError(std::vector<std::string> problems)
        : std::runtime_error(join(problems)), problems_(std::move(problems))
    {
    }
    explicit InputError(std::string problem) : InputError(std::vector<std::string>{std::move(problem)}) {}

    const std::vector<std::string>& problems() const { return problems_; }

  private:
    static std::string join(const std::vector<std::string>& problems)
    {
        std::string out;
        for (const auto& p : problems) {
            if (!out.empty()) out += '\n';
            out += p;
        }
        return out;
    }

    std::vector<std::string> problems_;
};

struct CandidateManifest
{
    std::vector<CandidateId> candidates;
    std::int64_t seats = 0;
    /// When set, the first CSV column of the ballot file is the paper id.
    bool ballot_id_column = false;

    bool operator==(const CandidateManifest&) const = default;
};

/// {"seats": 2, "candidates": ["A", "B", {"id": "C", "name": "Carol"}], "ballot_id_column": false}
inline CandidateManifest parse_candidate_manifest(std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("manifest: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw InputError("manifest: top level must be a JSON object");

    std::vector<std::string> problems;
    CandidateManifest m;
    if (!j.contains("seats"))
        problems.emplace_back("manifest: missing field \"seats\"");
    else if (!j["seats"].is_number_integer())
        problems.emplace_back("manifest: \"seats\" must be an integer");
    else
        m.seats = j["seats"].get<std::int64_t>();

    if (!j.contains("candidates")) {
        problems.emplace_back("manifest: missing field \"candidates\"");
    } else if (!j["candidates"].is_array()) {
        problems.emplace_back("manifest: \"candidates\" must be an array");
    } else {
        std::unordered_set<std::string> seen;
        for (const auto& entry : j["candidates"]) {
            CandidateId c;
            if (entry.is_string()) {
                c.id = entry.get<std::string>();
                c.display_name = c.id;
            } else if (entry.is_object() && entry.contains("id") && entry["id"].is_string()) {
                c.id = entry["id"].get<std::string>();
                c.display_name = entry.contains("name") && entry["name"].is_string() ? entry["name"].get<std::string>() : c.id;
            } else {
                problems.emplace_back("manifest: candidate entries must be strings or {\"id\", \"name\"} objects");
                continue;
            }
            if (c.id.empty()) {
                problems.emplace_back("manifest: empty candidate id");
                continue;
            }
            if (!seen.insert(c.id).second) problems.push_back("manifest: duplicate candidate id " + c.id);
            m.candidates.push_back(std::move(c));
        }
    }
    if (j.contains("ballot_id_column")) {
        if (!j["ballot_id_column"].is_boolean())
            problems.emplace_back("manifest: \"ballot_id_column\" must be a boolean");
        else
            m.ballot_id_column = j["ballot_id_column"].get<bool>();
    }
    if (!problems.empty()) throw InputError(std::move(problems));
    return m;
}

inline std::string write_candidate_manifest(const CandidateManifest& m)
{
    nlohmann::ordered_json j;
    j["seats"] = m.seats;
    auto& list = j["candidates"] = nlohmann::ordered_json::array();
    for (const auto& c : m.candidates) {
        if (c.display_name == c.id)
            list.push_back(c.id);
        else
            list.push_back({{"id", c.id}, {"name", c.display_name}});
    }
    if (m.ballot_id_column) j["ballot_id_column"] = true;
    return j.dump(2) + "\n";
}

namespace detail {

/// Splits one CSV record. Double-quoted cells may contain commas and "" escapes.
inline std::vector<std::string> split_csv_row(std::string_view line)
{
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cell += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell += ch;
        }
    }
    cells.push_back(std::move(cell));
    auto trim = [](std::string& s) {
        const auto first = s.find_first_not_of(" \t");
        const auto last = s.find_last_not_of(" \t");
        s = first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
    };
    for (auto& c : cells) trim(c);
    return cells;
}

inline std::vector<std::string_view> split_lines(std::string_view text)
{
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

}  // namespace detail

/// One paper per row, candidate ids in preference order; trailing empty cells
/// are allowed. Row i is paper id "i" unless the id column is enabled.
inline std::vector<BallotPaper> parse_ballot_file(std::string_view text, const std::vector<CandidateId>& candidates,
                                                  bool id_column = false)
{
    std::unordered_map<std::string, CandidateIndex> index_of;
    for (std::size_t i = 0; i < candidates.size(); ++i) index_of.emplace(candidates[i].id, static_cast<CandidateIndex>(i));

    const auto lines = detail::split_lines(text);
    if (lines.empty()) throw InputError("ballots: no ballots");

    constexpr std::size_t kMaxReported = 25;
    std::vector<std::string> problems;
    std::size_t problem_count = 0;
    auto report = [&](std::size_t row, const std::string& what) {
        if (++problem_count <= kMaxReported) problems.push_back("ballots: " + what + ", row " + std::to_string(row));
    };

    std::vector<BallotPaper> papers;
    papers.reserve(lines.size());
    std::unordered_set<std::string> ids;
    for (std::size_t r = 0; r < lines.size(); ++r) {
        const std::size_t row = r + 1;
        auto cells = detail::split_csv_row(lines[r]);
        while (!cells.empty() && cells.back().empty()) cells.pop_back();

        BallotPaper paper;
        std::size_t first = 0;
        if (id_column) {
            if (cells.empty() || cells.front().empty()) {
                report(row, "missing paper id");
                continue;
            }
            paper.paper_id = cells.front();
            first = 1;
        } else {
            paper.paper_id = std::to_string(row);
        }
        if (!ids.insert(paper.paper_id).second) report(row, "duplicate paper id " + paper.paper_id);
        if (cells.size() <= first) {
            report(row, "empty row");
            continue;
        }

        std::vector<bool> used(candidates.size(), false);
        bool clean = true;
        for (std::size_t i = first; i < cells.size(); ++i) {
            const auto& id = cells[i];
            if (id.empty()) {
                report(row, "empty preference between filled cells");
                clean = false;
                break;
            }
            auto it = index_of.find(id);
            if (it == index_of.end()) {
                report(row, "unknown candidate id " + id);
                clean = false;
                continue;
            }
            if (used[it->second]) {
                report(row, "duplicate preference " + id);
                clean = false;
                continue;
            }
            used[it->second] = true;
            paper.preferences.push_back(it->second);
        }
        if (clean) papers.push_back(std::move(paper));
    }
    if (problem_count > kMaxReported)
        problems.push_back("ballots: " + std::to_string(problem_count - kMaxReported) + " further problems not shown");
    if (!problems.empty()) throw InputError(std::move(problems));
    return papers;
}

inline std::string write_ballot_file(const Election& election)
{
    std::string out;
    for (const auto& paper : election.ballots()) {
        for (std::size_t i = 0; i < paper.preferences.size(); ++i) {
            if (i) out += ',';
            out += election.candidates()[paper.preferences[i]].id;
        }
        out += '\n';
    }
    return out;
}

/// Parses both files and runs full validation; structural violations become an InputError.
inline Election load_election(std::string_view manifest_text, std::string_view ballots_text)
{
    const auto manifest = parse_candidate_manifest(manifest_text);
    const auto papers = parse_ballot_file(ballots_text, manifest.candidates, manifest.ballot_id_column);
    RawElection raw;
    raw.candidates = manifest.candidates;
    raw.seats = manifest.seats;
    raw.ballots.reserve(papers.size());
    for (const auto& p : papers) {
        RawBallot b{p.paper_id, {}};
        b.preferences.reserve(p.preferences.size());
        for (auto c : p.preferences) b.preferences.push_back(manifest.candidates[c].id);
        raw.ballots.push_back(std::move(b));
    }
    auto validated = validate_election(raw);
    if (!validated) {
        std::vector<std::string> problems;
        for (const auto& v : validated.errors()) problems.push_back("election: " + v.where + ": " + v.message);
        throw InputError(std::move(problems));
    }
    return std::move(validated).value();
}

namespace detail {

inline std::string votes(std::int64_t whole, int places) { return FixedDecimal::from_integer(whole, places).to_string(); }

inline nlohmann::ordered_json candidate_or_null(const Election& e, const std::optional<CandidateIndex>& c)
{
    return c ? nlohmann::ordered_json(e.candidates()[*c].id) : nlohmann::ordered_json(nullptr);
}

}  // namespace detail

/// Canonical JSON form of a transcript: fixed field order, vote figures as
/// exact decimal strings, so equal transcripts always serialize to equal bytes.
inline std::string write_transcript(const Transcript& t, const Election& e)
{
    using nlohmann::ordered_json;
    const int places = t.rules.rounding_decimal_places;
    auto id = [&](CandidateIndex c) { return e.candidates()[c].id; };

    ordered_json j;
    j["format"] = "nswstv-transcript-v1";
    j["seed"] = t.seed_id;
    j["rules"] = {{"last_parcel", std::string(to_cli_name(t.rules.last_parcel_rule))},
                  {"rounding_decimal_places", t.rules.rounding_decimal_places}};
    j["ballots"] = t.ballots;
    j["seats"] = t.seats;
    j["quota"] = t.quota.value;
    auto& cands = j["candidates"] = ordered_json::array();
    for (const auto& c : e.candidates()) cands.push_back({{"id", c.id}, {"name", c.display_name}});

    auto& counts = j["counts"] = ordered_json::array();
    for (const auto& r : t.counts) {
        ordered_json cj;
        cj["count"] = r.number;
        ordered_json action;
        action["kind"] = std::string(to_string(r.action.kind));
        action["source"] = detail::candidate_or_null(e, r.action.source);
        if (r.action.kind == TransferKind::SurplusDistribution) {
            action["surplus"] = detail::votes(r.action.surplus, places);
            action["transfer_value"] = r.action.transfer_value.to_string();
            action["papers_distributed"] = r.action.papers_distributed;
            action["parcel_counts"] = r.action.parcel_counts;
            action["retained_votes"] = detail::votes(r.action.retained, places);
        }
        action["exhausted_papers"] = r.action.exhausted_papers;
        cj["action"] = std::move(action);

        auto& transfers = cj["transfers"] = ordered_json::array();
        for (const auto& tr : r.action.transfers)
            transfers.push_back({{"candidate", id(tr.recipient)},
                                 {"papers", tr.papers},
                                 {"entitlement", tr.entitlement.to_string()},
                                 {"votes", detail::votes(tr.moved, places)}});

        auto& elected = cj["elected"] = ordered_json::array();
        for (const auto& ev : r.elected) elected.push_back({{"candidate", id(ev.candidate)}, {"quota_reached", ev.reached_quota}});
        cj["excluded"] = detail::candidate_or_null(e, r.excluded);

        auto& draws = cj["draws"] = ordered_json::array();
        for (const auto& d : r.draws) {
            ordered_json tied = ordered_json::array();
            for (auto c : d.tied) tied.push_back(id(c));
            draws.push_back({{"purpose", std::string(to_string(d.purpose))},
                             {"stream_position", d.stream_position},
                             {"values_consumed", d.values_consumed},
                             {"bound", d.bound},
                             {"outcome", d.outcome},
                             {"candidates", std::move(tied)},
                             {"chosen", id(d.chosen)}});
        }
        auto& samples = cj["samples"] = ordered_json::array();
        for (const auto& s : r.samples) {
            ordered_json papers = ordered_json::array();
            for (auto p : s.selected) papers.push_back(e.ballots()[p].paper_id);
            samples.push_back({{"candidate", id(s.recipient)},
                               {"group_size", s.group_size},
                               {"selected", s.selected.size()},
                               {"stream_position", s.stream_position},
                               {"values_consumed", s.values_consumed},
                               {"papers", std::move(papers)}});
        }

        auto& tallies = cj["tallies"] = ordered_json::array();
        for (CandidateIndex c = 0; c < r.after.tallies.size(); ++c)
            tallies.push_back({{"candidate", id(c)},
                               {"votes", detail::votes(r.after.tallies[c], places)},
                               {"status", std::string(to_string(r.after.statuses[c]))}});
        cj["exhausted_total"] = detail::votes(r.after.exhausted, places);
        cj["rounding_loss"] = detail::votes(r.after.rounding_loss, places);
        counts.push_back(std::move(cj));
    }
    auto& order = j["elected"] = ordered_json::array();
    for (auto c : t.elected_order) order.push_back(id(c));
    return j.dump(2) + "\n";
}

namespace detail {

inline std::string fixed6(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

inline nlohmann::ordered_json count_summary(const CountRecord& r, const std::vector<std::string>& ids)
{
    nlohmann::ordered_json j;
    j["kind"] = std::string(to_string(r.action.kind));
    j["source"] = r.action.source ? nlohmann::ordered_json(ids[*r.action.source]) : nlohmann::ordered_json(nullptr);
    if (r.action.kind == TransferKind::SurplusDistribution) {
        j["papers_distributed"] = r.action.papers_distributed;
        j["parcel_counts"] = r.action.parcel_counts;
        j["transfer_value"] = r.action.transfer_value.to_string();
    }
    auto& transfers = j["transfers"] = nlohmann::ordered_json::array();
    for (const auto& t : r.action.transfers)
        transfers.push_back({{"candidate", ids[t.recipient]}, {"papers", t.papers}, {"moved", t.moved}});
    return j;
}

}  // namespace detail

/// CSV with header candidate,trials_elected,probability,mean_final_tally;
/// rows by probability descending, then candidate id.
inline std::string write_probability_report(const SimulationReport& report)
{
    std::vector<CandidateIndex> order(report.candidate_ids.size());
    for (CandidateIndex c = 0; c < order.size(); ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](CandidateIndex a, CandidateIndex b) {
        if (report.elected_count[a] != report.elected_count[b]) return report.elected_count[a] > report.elected_count[b];
        return report.candidate_ids[a] < report.candidate_ids[b];
    });
    std::string out = "candidate,trials_elected,probability,mean_final_tally\n";
    for (auto c : order) {
        const auto& id = report.candidate_ids[c];
        const bool needs_quotes = id.find_first_of(",\"\n") != std::string::npos;
        std::string cell = id;
        if (needs_quotes) {
            cell = "\"";
            for (char ch : id) cell += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            cell += '"';
        }
        out += cell + "," + std::to_string(report.elected_count[c]) + "," + detail::fixed6(report.probability(c)) + "," +
               detail::fixed6(report.mean_final_tally(c)) + "\n";
    }
    return out;
}

inline std::string write_variant_comparison(const VariantComparison& cmp)
{
    using nlohmann::ordered_json;
    const auto& ids = cmp.a.candidate_ids;
    ordered_json j;
    j["format"] = "nswstv-comparison-v1";
    j["trials"] = cmp.a.trials;
    j["seed"] = ceremony_to_json(cmp.a.ceremony);
    auto rules = [](const RuleConfig& r) {
        return ordered_json{{"last_parcel", std::string(to_cli_name(r.last_parcel_rule))},
                            {"rounding_decimal_places", r.rounding_decimal_places}};
    };
    j["rules_a"] = rules(cmp.a.rules);
    j["rules_b"] = rules(cmp.b.rules);
    auto& rows = j["candidates"] = ordered_json::array();
    for (CandidateIndex c = 0; c < ids.size(); ++c)
        rows.push_back({{"candidate", ids[c]},
                        {"probability_a", detail::fixed6(cmp.a.probability(c))},
                        {"probability_b", detail::fixed6(cmp.b.probability(c))},
                        {"delta", detail::fixed6(cmp.delta[c])},
                        {"paired_standard_error", detail::fixed6(cmp.paired_standard_error[c])}});
    if (cmp.first_divergence) {
        ordered_json d;
        d["count"] = *cmp.first_divergence;
        d["a"] = cmp.divergent_count_a ? detail::count_summary(*cmp.divergent_count_a, ids) : ordered_json(nullptr);
        d["b"] = cmp.divergent_count_b ? detail::count_summary(*cmp.divergent_count_b, ids) : ordered_json(nullptr);
        j["first_divergence"] = std::move(d);
    } else {
        j["first_divergence"] = nullptr;
    }
    return j.dump(2) + "\n";
}

}  // namespace nswstv
