#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nswstv/decimal.hpp"
#include "nswstv/election.hpp"
#include "nswstv/randomness.hpp"
#include "nswstv/tiebreak.hpp"
#include "nswstv/transcript.hpp"

namespace nswstv {

struct RecipientGroup
{
    CandidateIndex recipient = 0;
    std::vector<PaperIndex> papers;  // ascending paper index
};

/// Papers split by next continuing preference. Groups are ordered by candidate index.
struct ParcelGrouping
{
    std::vector<RecipientGroup> groups;
    std::vector<PaperIndex> exhausted;

    std::int64_t continuing_papers() const
    {
        std::int64_t n = 0;
        for (const auto& g : groups) n += static_cast<std::int64_t>(g.papers.size());
        return n;
    }
};

/// First continuing candidate on the paper. Statuses only ever leave Continuing,
/// so scanning from the top is equivalent to scanning from the current holder.
inline std::optional<CandidateIndex> next_continuing(const BallotPaper& paper, std::span<const CandidateStatus> statuses)
{
    for (auto c : paper.preferences)
        if (statuses[c] == CandidateStatus::Continuing) return c;
    return std::nullopt;
}

inline ParcelGrouping group_by_next_continuing(const Election& election, std::span<const PaperIndex> papers,
                                               std::span<const CandidateStatus> statuses)
{
    std::map<CandidateIndex, std::vector<PaperIndex>> by_recipient;
    ParcelGrouping out;
    for (auto p : papers) {
        if (auto next = next_continuing(election.ballots()[p], statuses))
            by_recipient[*next].push_back(p);
        else
            out.exhausted.push_back(p);
    }
    for (auto& [recipient, group] : by_recipient) {
        std::sort(group.begin(), group.end());
        out.groups.push_back({recipient, std::move(group)});
    }
    std::sort(out.exhausted.begin(), out.exhausted.end());
    return out;
}

struct Entitlement
{
    CandidateIndex recipient = 0;
    FixedDecimal raw;
};

/// Rounds raw entitlements to integers summing to `target_total`.
///
/// Exactly target_total - sum(floor) entitlements are rounded up, largest
/// fractional part first. Ties go to the larger integer part, then to the
/// higher tally on countback, then by lot.
template <RandomStream S>
std::vector<std::int64_t> apply_rounding(std::span<const Entitlement> raw, std::int64_t target_total, const TallyHistory& history,
                                         S& stream, std::vector<DrawRecord>* log = nullptr)
{
    std::int64_t floors = 0;
    std::int64_t ceils = 0;
    for (const auto& e : raw) {
        floors += e.raw.floor();
        ceils += e.raw.ceil();
    }
    if (target_total < floors || target_total > ceils)
        throw std::logic_error("apply_rounding: target " + std::to_string(target_total) + " outside [" + std::to_string(floors) +
                               ", " + std::to_string(ceils) + "]");

    std::vector<std::int64_t> result;
    result.reserve(raw.size());
    for (const auto& e : raw) result.push_back(e.raw.floor());
    std::int64_t round_ups = target_total - floors;
    if (round_ups == 0) return result;

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < raw.size(); ++i)
        if (!raw[i].raw.is_integer()) order.push_back(i);
    auto key_greater = [&](std::size_t a, std::size_t b) {
        const auto fa = raw[a].raw.fractional_part(), fb = raw[b].raw.fractional_part();
        if (fa != fb) return fa > fb;
        return raw[a].raw.integer_part() > raw[b].raw.integer_part();
    };
    auto key_equal = [&](std::size_t a, std::size_t b) { return !key_greater(a, b) && !key_greater(b, a); };
    std::stable_sort(order.begin(), order.end(), key_greater);

    std::size_t pos = 0;
    while (round_ups > 0) {
        std::size_t end = pos + 1;
        while (end < order.size() && key_equal(order[pos], order[end])) ++end;
        const auto class_size = static_cast<std::int64_t>(end - pos);
        if (class_size <= round_ups) {
            for (std::size_t i = pos; i < end; ++i) ++result[order[i]];
            round_ups -= class_size;
        } else {
            std::vector<CandidateIndex> pool;
            for (std::size_t i = pos; i < end; ++i) pool.push_back(raw[order[i]].recipient);
            while (round_ups > 0) {
                const CandidateIndex pick =
                    break_tie(std::span<const CandidateIndex>(pool), history, CountbackDirection::Highest, stream,
                              DrawPurpose::RoundingTie, log);
                for (std::size_t i = pos; i < end; ++i)
                    if (raw[order[i]].recipient == pick) ++result[order[i]];
                std::erase(pool, pick);
                --round_ups;
            }
        }
        pos = end;
    }
    return result;
}

struct SurplusPlan
{
    FixedDecimal transfer_value;
    std::vector<Entitlement> entitlements;  // parallel to grouping.groups
    std::vector<std::int64_t> allocations;  // parallel to grouping.groups
    std::int64_t target_total = 0;
    /// Surplus votes that stay with the elected candidate (all-exhausted parcel, cap, or precision).
    std::int64_t retained = 0;
};

/// Transfer value = min(1, surplus / continuing papers), truncated to `places`
/// digits. Each group's entitlement is its size times the transfer value, and
/// apply_rounding turns those into whole papers totalling the surplus.
template <RandomStream S>
SurplusPlan plan_surplus_distribution(const ParcelGrouping& grouping, std::int64_t surplus, int places,
                                      const TallyHistory& history, S& stream, std::vector<DrawRecord>* log = nullptr)
{
    if (surplus <= 0) throw std::invalid_argument("plan_surplus_distribution: surplus must be positive");
    SurplusPlan plan;
    const std::int64_t continuing = grouping.continuing_papers();
    if (continuing == 0) {
        plan.transfer_value = FixedDecimal(0, places);
        plan.retained = surplus;
        return plan;
    }

    plan.transfer_value = surplus >= continuing ? FixedDecimal::from_integer(1, places)
                                                : FixedDecimal::from_ratio(surplus, continuing, places);
    std::int64_t floors = 0;
    std::int64_t ceils = 0;
    for (const auto& g : grouping.groups) {
        const auto raw = plan.transfer_value.times(static_cast<std::int64_t>(g.papers.size()));
        plan.entitlements.push_back({g.recipient, raw});
        floors += raw.floor();
        ceils += raw.ceil();
    }
    plan.target_total = std::clamp(std::min(surplus, continuing), floors, ceils);
    plan.allocations = apply_rounding(std::span<const Entitlement>(plan.entitlements), plan.target_total, history, stream, log);
    plan.retained = surplus - plan.target_total;
    return plan;
}

struct PaperSelection
{
    std::vector<PaperIndex> selected;  // ascending
    std::uint64_t stream_position = 0;
    std::uint64_t values_consumed = 0;
};

/// Uniform random n-subset by partial Fisher-Yates over the group (ascending
/// paper order), one next_below per selected paper. Taking none or all of the
/// group involves no choice and consumes nothing.
template <RandomStream S>
PaperSelection select_papers_for_transfer(std::span<const PaperIndex> group, std::size_t n, S& stream)
{
    if (n > group.size()) throw std::invalid_argument("select_papers_for_transfer: n exceeds group size");
    PaperSelection out;
    out.stream_position = stream.position();
    std::vector<PaperIndex> pool(group.begin(), group.end());
    std::sort(pool.begin(), pool.end());
    if (n == pool.size()) {
        out.selected = std::move(pool);
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = i + static_cast<std::size_t>(stream.next_below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(n);
    std::sort(pool.begin(), pool.end());
    out.selected = std::move(pool);
    out.values_consumed = stream.position() - out.stream_position;
    return out;
}

}  // namespace nswstv
