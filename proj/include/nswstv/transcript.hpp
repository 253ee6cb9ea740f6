#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nswstv/decimal.hpp"
#include "nswstv/election.hpp"

namespace nswstv {

enum class CandidateStatus { Continuing, Elected, Excluded };

enum class TransferKind { FirstPreferences, SurplusDistribution, Exclusion };

inline constexpr std::string_view to_string(CandidateStatus s)
{
    switch (s) {
        case CandidateStatus::Continuing: return "continuing";
        case CandidateStatus::Elected: return "elected";
        case CandidateStatus::Excluded: return "excluded";
    }
    return "?";
}

inline constexpr std::string_view to_string(TransferKind k)
{
    switch (k) {
        case TransferKind::FirstPreferences: return "first-preferences";
        case TransferKind::SurplusDistribution: return "surplus-distribution";
        case TransferKind::Exclusion: return "exclusion";
    }
    return "?";
}

/// Papers one candidate received in a single transfer event.
struct Parcel
{
    int received_at_count = 0;
    std::optional<CandidateIndex> source;  // empty for first preferences
    TransferKind transfer_kind = TransferKind::FirstPreferences;
    std::vector<PaperIndex> papers;

    bool operator==(const Parcel&) const = default;
};

/// What happened at one count, as needed by the last-parcel search.
struct CountEvent
{
    int count = 0;
    TransferKind kind = TransferKind::FirstPreferences;
    std::optional<CandidateIndex> source;
    std::vector<CandidateIndex> elected;
    std::optional<CandidateIndex> excluded;

    bool has_election_or_exclusion() const { return !elected.empty() || excluded.has_value(); }
    bool operator==(const CountEvent&) const = default;
};

enum class DrawPurpose { ExclusionTie, RoundingTie, ElectionOrderTie };

inline constexpr std::string_view to_string(DrawPurpose p)
{
    switch (p) {
        case DrawPurpose::ExclusionTie: return "exclusion-tie";
        case DrawPurpose::RoundingTie: return "rounding-tie";
        case DrawPurpose::ElectionOrderTie: return "election-order-tie";
    }
    return "?";
}

/// A tie resolved by lot. `stream_position` and `values_consumed` locate the raw
/// stream values used, so a third party can replay the draw.
struct DrawRecord
{
    DrawPurpose purpose = DrawPurpose::ExclusionTie;
    std::vector<CandidateIndex> tied;
    std::uint64_t stream_position = 0;
    std::uint64_t values_consumed = 0;
    std::uint64_t bound = 0;
    std::uint64_t outcome = 0;
    CandidateIndex chosen = 0;

    bool operator==(const DrawRecord&) const = default;
};

/// Random selection of which physical papers realise one recipient's allocation.
struct SampleRecord
{
    CandidateIndex recipient = 0;
    std::uint32_t group_size = 0;
    std::uint64_t stream_position = 0;
    std::uint64_t values_consumed = 0;
    std::vector<PaperIndex> selected;

    bool operator==(const SampleRecord&) const = default;
};

struct RecipientTransfer
{
    CandidateIndex recipient = 0;
    std::int64_t papers = 0;  // papers in the considered parcel heading to this recipient
    FixedDecimal entitlement;  // papers x transfer value
    std::int64_t moved = 0;  // papers actually transferred

    bool operator==(const RecipientTransfer&) const = default;
};

struct CountAction
{
    TransferKind kind = TransferKind::FirstPreferences;
    std::optional<CandidateIndex> source;
    std::vector<RecipientTransfer> transfers;
    std::int64_t exhausted_papers = 0;  // papers with no continuing preference in this transfer

    // Surplus distributions only.
    std::int64_t surplus = 0;
    FixedDecimal transfer_value;
    std::int64_t papers_distributed = 0;  // size of the last parcel
    std::vector<int> parcel_counts;  // counts whose parcels formed the last parcel
    std::int64_t retained = 0;  // surplus votes left with the elected candidate

    bool operator==(const CountAction&) const = default;
};

struct ElectionEvent
{
    CandidateIndex candidate = 0;
    bool reached_quota = true;

    bool operator==(const ElectionEvent&) const = default;
};

struct TallyState
{
    std::vector<std::int64_t> tallies;
    std::vector<CandidateStatus> statuses;
    std::int64_t exhausted = 0;
    std::int64_t rounding_loss = 0;

    std::int64_t total() const
    {
        std::int64_t sum = exhausted + rounding_loss;
        for (auto t : tallies) sum += t;
        return sum;
    }
    bool operator==(const TallyState&) const = default;
};

struct CountRecord
{
    int number = 0;
    CountAction action;
    std::vector<ElectionEvent> elected;
    std::optional<CandidateIndex> excluded;
    std::vector<DrawRecord> draws;
    std::vector<SampleRecord> samples;
    TallyState after;

    bool operator==(const CountRecord&) const = default;
};

struct Transcript
{
    RuleConfig rules;
    std::string seed_id;
    Quota quota;
    std::int64_t ballots = 0;
    std::int64_t seats = 0;
    std::vector<CountRecord> counts;
    std::vector<CandidateIndex> elected_order;

    const TallyState& final_state() const { return counts.back().after; }
    bool operator==(const Transcript&) const = default;
};

/// First count (1-based) at which two transcripts differ, if any.
inline std::optional<int> first_divergence(const Transcript& a, const Transcript& b)
{
    const std::size_t shared = std::min(a.counts.size(), b.counts.size());
    for (std::size_t i = 0; i < shared; ++i)
        if (!(a.counts[i] == b.counts[i])) return a.counts[i].number;
    if (a.counts.size() != b.counts.size()) return static_cast<int>(shared) + 1;
    return std::nullopt;
}

}  // namespace nswstv
