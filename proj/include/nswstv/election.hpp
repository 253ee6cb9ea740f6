#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "nswstv/decimal.hpp"

namespace nswstv {

/// Position of a candidate in the election's declared candidate order.
using CandidateIndex = std::uint32_t;
/// Position of a ballot paper in the election's paper list (file order).
using PaperIndex = std::uint32_t;

struct CandidateId
{
    std::string id;
    std::string display_name;

    bool operator==(const CandidateId&) const = default;
};

struct BallotPaper
{
    std::string paper_id;
    std::vector<CandidateIndex> preferences;

    bool operator==(const BallotPaper&) const = default;
};

struct Quota
{
    std::int64_t value = 0;

    bool operator==(const Quota&) const = default;
};

/// Droop quota: floor(v / (s + 1)) + 1.
inline Quota compute_droop_quota(std::int64_t ballots, std::int64_t seats)
{
    if (ballots <= 0) throw std::invalid_argument("quota: the election has no ballots");
    if (seats <= 0) throw std::invalid_argument("quota: seat count must be positive");
    return Quota{ballots / (seats + 1) + 1};
}

enum class LastParcelRule {
    /// Only the transfer(s) that lifted the candidate to quota (2008 software behaviour).
    ExclusionTriggeredOnly,
    /// Also sweeps in the surplus transfers since the previous election/exclusion (2012 behaviour).
    PriorTransferBlock,
};

inline constexpr std::string_view to_cli_name(LastParcelRule rule)
{
    return rule == LastParcelRule::ExclusionTriggeredOnly ? "clause-1.4.14.1" : "pseudocode-1.4.14.2";
}

inline std::optional<LastParcelRule> last_parcel_rule_from_cli_name(std::string_view name)
{
    if (name == "clause-1.4.14.1") return LastParcelRule::ExclusionTriggeredOnly;
    if (name == "pseudocode-1.4.14.2") return LastParcelRule::PriorTransferBlock;
    return std::nullopt;
}

/// Variant switches. The tie-break chain (countback, then random draw) and the
/// surplus order (largest first) are fixed and therefore not represented here.
struct RuleConfig
{
    LastParcelRule last_parcel_rule = LastParcelRule::ExclusionTriggeredOnly;
    int rounding_decimal_places = 8;

    bool operator==(const RuleConfig&) const = default;
};

inline void check_rule_config(const RuleConfig& rules)
{
    if (rules.rounding_decimal_places < 0 || rules.rounding_decimal_places > kMaxDecimalPlaces)
        throw std::invalid_argument("rounding_decimal_places must lie in [0, " + std::to_string(kMaxDecimalPlaces) + "]");
}

/// A structurally valid contest. Only validate_election constructs one, so every
/// instance satisfies the invariants (unique ids, 1 <= seats < candidates, clean papers).
class Election
{
  public:
    const std::vector<CandidateId>& candidates() const { return candidates_; }
    const std::vector<BallotPaper>& ballots() const { return ballots_; }
    std::int64_t seats() const { return seats_; }
    std::size_t candidate_count() const { return candidates_.size(); }
    std::int64_t ballot_count() const { return static_cast<std::int64_t>(ballots_.size()); }
    Quota quota() const { return compute_droop_quota(ballot_count(), seats_); }

    std::optional<CandidateIndex> find_candidate(std::string_view id) const
    {
        for (std::size_t i = 0; i < candidates_.size(); ++i)
            if (candidates_[i].id == id) return static_cast<CandidateIndex>(i);
        return std::nullopt;
    }

    bool operator==(const Election&) const = default;

  private:
    friend struct ElectionBuilder;

    std::vector<CandidateId> candidates_;
    std::int64_t seats_ = 0;
    std::vector<BallotPaper> ballots_;
};

struct RawBallot
{
    std::string paper_id;
    std::vector<std::string> preferences;
};

/// Unchecked election description, as read from files or built by hand.
struct RawElection
{
    std::vector<CandidateId> candidates;
    std::int64_t seats = 0;
    std::vector<RawBallot> ballots;
};

struct Violation
{
    /// Offending paper id, or the field name for election-level problems.
    std::string where;
    std::string message;
};

template <class T>
class Validated
{
  public:
    Validated(T value) : state_(std::move(value)) {}
    Validated(std::vector<Violation> errors) : state_(std::move(errors)) {}

    bool ok() const { return std::holds_alternative<T>(state_); }
    explicit operator bool() const { return ok(); }

    const T& value() const&
    {
        if (!ok()) throw std::logic_error("Validated::value() on a failed validation: " + summary());
        return std::get<T>(state_);
    }
    T&& value() &&
    {
        if (!ok()) throw std::logic_error("Validated::value() on a failed validation: " + summary());
        return std::get<T>(std::move(state_));
    }
    const std::vector<Violation>& errors() const
    {
        static const std::vector<Violation> none;
        return ok() ? none : std::get<std::vector<Violation>>(state_);
    }

    std::string summary() const
    {
        std::string out;
        for (const auto& e : errors()) {
            if (!out.empty()) out += "; ";
            out += e.where + ": " + e.message;
        }
        return out;
    }

  private:
    std::variant<T, std::vector<Violation>> state_;
};

struct ElectionBuilder
{
    static Election make(std::vector<CandidateId> candidates, std::int64_t seats, std::vector<BallotPaper> ballots)
    {
        Election e;
        e.candidates_ = std::move(candidates);
        e.seats_ = seats;
        e.ballots_ = std::move(ballots);
        return e;
    }
};

/// Checks every structural rule and reports all violations, not just the first.
inline Validated<Election> validate_election(const RawElection& raw)
{
    std::vector<Violation> errors;

    std::unordered_map<std::string, CandidateIndex> index_of;
    for (std::size_t i = 0; i < raw.candidates.size(); ++i) {
        const auto& c = raw.candidates[i];
        if (c.id.empty()) {
            errors.push_back({"candidates", "empty candidate id at position " + std::to_string(i + 1)});
            continue;
        }
        if (!index_of.emplace(c.id, static_cast<CandidateIndex>(i)).second)
            errors.push_back({"candidates", "duplicate candidate id " + c.id});
    }

    const auto n_candidates = static_cast<std::int64_t>(raw.candidates.size());
    if (raw.seats < 1)
        errors.push_back({"seats", "seat count must be at least 1, got " + std::to_string(raw.seats)});
    else if (raw.seats >= n_candidates)
        errors.push_back({"seats", "seat count " + std::to_string(raw.seats) + " must be less than the number of candidates (" +
                                       std::to_string(n_candidates) + ")"});

    if (raw.ballots.empty()) errors.push_back({"ballots", "no ballots"});

    std::vector<BallotPaper> papers;
    papers.reserve(raw.ballots.size());
    std::unordered_set<std::string> paper_ids;
    for (const auto& b : raw.ballots) {
        if (!paper_ids.insert(b.paper_id).second) errors.push_back({b.paper_id, "duplicate paper id"});
        if (b.preferences.empty()) {
            errors.push_back({b.paper_id, "empty ballot paper"});
            continue;
        }
        BallotPaper paper{b.paper_id, {}};
        paper.preferences.reserve(b.preferences.size());
        std::unordered_set<CandidateIndex> seen;
        bool clean = true;
        for (const auto& pref : b.preferences) {
            auto it = index_of.find(pref);
            if (it == index_of.end()) {
                errors.push_back({b.paper_id, "unknown candidate " + pref + " on paper"});
                clean = false;
                continue;
            }
            if (!seen.insert(it->second).second) {
                errors.push_back({b.paper_id, "duplicate preference " + pref + " on paper"});
                clean = false;
                continue;
            }
            paper.preferences.push_back(it->second);
        }
        if (clean) papers.push_back(std::move(paper));
    }

    if (!errors.empty()) return errors;
    return ElectionBuilder::make(raw.candidates, raw.seats, std::move(papers));
}

/// Inverse of validate_election for an already-valid contest.
inline RawElection to_raw(const Election& election)
{
    RawElection raw;
    raw.candidates = election.candidates();
    raw.seats = election.seats();
    raw.ballots.reserve(election.ballots().size());
    for (const auto& paper : election.ballots()) {
        RawBallot b{paper.paper_id, {}};
        for (auto c : paper.preferences) b.preferences.push_back(election.candidates()[c].id);
        raw.ballots.push_back(std::move(b));
    }
    return raw;
}

}  // namespace nswstv
