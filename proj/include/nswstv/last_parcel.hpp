#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nswstv/election.hpp"
#include "nswstv/transcript.hpp"

namespace nswstv {

struct LastParcel
{
    std::vector<PaperIndex> papers;
    /// Counts whose parcels were taken, ascending.
    std::vector<int> counts;
};

namespace detail {

inline const CountEvent& event_at(std::span<const CountEvent> events, int count)
{
    auto it = std::find_if(events.begin(), events.end(), [count](const CountEvent& e) { return e.count == count; });
    if (it == events.end()) throw std::out_of_range("last parcel: no event recorded for count " + std::to_string(count));
    return *it;
}

inline std::optional<int> election_count_of(std::span<const CountEvent> events, CandidateIndex candidate)
{
    for (const auto& e : events)
        if (std::find(e.elected.begin(), e.elected.end(), candidate) != e.elected.end()) return e.count;
    return std::nullopt;
}

}  // namespace detail

/// Papers available when distributing the surplus of a candidate elected at
/// `elected_at`.
///
/// ExclusionTriggeredOnly takes the transfer received at `elected_at`. When that
/// transfer was the surplus of a candidate elected together with others, the
/// immediately preceding surplus transfers of those co-elected candidates are
/// part of the same multi-candidate transfer and are included too.
///
/// PriorTransferBlock additionally walks back from `elected_at - 1` over
/// consecutive surplus-distribution counts, stopping at the first count in which
/// anyone was elected or excluded.
///
/// A candidate elected on first preferences passes on all their papers.
inline LastParcel compute_last_parcel(std::span<const Parcel> history, int elected_at, LastParcelRule rule,
                                      std::span<const CountEvent> events)
{
    std::vector<int> counts{elected_at};

    if (elected_at > 1) {
        if (rule == LastParcelRule::ExclusionTriggeredOnly) {
            const auto& trigger = detail::event_at(events, elected_at);
            if (trigger.kind == TransferKind::SurplusDistribution && trigger.source) {
                const auto source_elected = detail::election_count_of(events, *trigger.source);
                if (source_elected) {
                    const auto& co_elected = detail::event_at(events, *source_elected).elected;
                    if (co_elected.size() > 1) {
                        for (int k = elected_at - 1; k > *source_elected; --k) {
                            const auto& e = detail::event_at(events, k);
                            if (e.kind != TransferKind::SurplusDistribution || !e.source ||
                                std::find(co_elected.begin(), co_elected.end(), *e.source) == co_elected.end())
                                break;
                            counts.push_back(k);
                        }
                    }
                }
            }
        } else {
            for (int k = elected_at - 1; k >= 1; --k) {
                const auto& e = detail::event_at(events, k);
                if (e.has_election_or_exclusion() || e.kind != TransferKind::SurplusDistribution) break;
                counts.push_back(k);
            }
        }
    }

    std::sort(counts.begin(), counts.end());
    LastParcel out;
    out.counts = counts;
    for (const auto& parcel : history) {
        const bool take = elected_at == 1 ||
                          std::binary_search(counts.begin(), counts.end(), parcel.received_at_count);
        if (take) out.papers.insert(out.papers.end(), parcel.papers.begin(), parcel.papers.end());
    }
    return out;
}

}  // namespace nswstv
