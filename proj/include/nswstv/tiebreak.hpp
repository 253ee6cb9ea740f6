#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nswstv/election.hpp"
#include "nswstv/randomness.hpp"
#include "nswstv/transcript.hpp"

namespace nswstv {

/// Per-count tallies: history[c][i] is candidate i's tally at the end of count c + 1.
using TallyHistory = std::vector<std::vector<std::int64_t>>;

enum class CountbackDirection { Lowest, Highest };

struct CountbackResult
{
    std::optional<CandidateIndex> winner;
    /// Members still tied after the walk; the caller draws among these when unresolved.
    std::vector<CandidateIndex> survivors;
};

/// Walks the history from the most recent count backwards, keeping only the
/// members at the extreme (lowest or highest) tally of each count, until one
/// remains. This is the "one candidate is weaker than the others" reading: a
/// count where only some of the tied set differ still narrows the set.
inline CountbackResult countback(std::span<const CandidateIndex> tied, std::span<const std::vector<std::int64_t>> history,
                                 CountbackDirection direction)
{
    std::vector<CandidateIndex> set(tied.begin(), tied.end());
    std::sort(set.begin(), set.end());
    for (auto it = history.rbegin(); it != history.rend() && set.size() > 1; ++it) {
        const auto& tallies = *it;
        std::int64_t extreme = tallies[set.front()];
        for (auto c : set)
            extreme = direction == CountbackDirection::Lowest ? std::min(extreme, tallies[c]) : std::max(extreme, tallies[c]);
        std::erase_if(set, [&](CandidateIndex c) { return tallies[c] != extreme; });
    }
    CountbackResult result;
    if (set.size() == 1) result.winner = set.front();
    result.survivors = std::move(set);
    return result;
}

/// Lowest-tally countback among a tied set; nullopt means "unresolved, draw by lot".
inline std::optional<CandidateIndex> countback_tiebreak(std::span<const CandidateIndex> tied,
                                                        std::span<const std::vector<std::int64_t>> history)
{
    if (tied.size() < 2) throw std::invalid_argument("countback_tiebreak: needs at least two tied candidates");
    return countback(tied, history, CountbackDirection::Lowest).winner;
}

/// Uniform choice from `among` (sorted by candidate index first), logged for replay.
template <RandomStream S>
CandidateIndex draw_lot(std::span<const CandidateIndex> among, S& stream, DrawPurpose purpose, std::vector<DrawRecord>* log)
{
    std::vector<CandidateIndex> sorted(among.begin(), among.end());
    std::sort(sorted.begin(), sorted.end());
    DrawRecord record;
    record.purpose = purpose;
    record.tied = sorted;
    record.stream_position = stream.position();
    record.bound = sorted.size();
    record.outcome = stream.next_below(sorted.size());
    record.values_consumed = stream.position() - record.stream_position;
    record.chosen = sorted[record.outcome];
    if (log) log->push_back(record);
    return record.chosen;
}

/// Countback first, lot second.
template <RandomStream S>
CandidateIndex break_tie(std::span<const CandidateIndex> tied, const TallyHistory& history, CountbackDirection direction,
                         S& stream, DrawPurpose purpose, std::vector<DrawRecord>* log)
{
    auto cb = countback(tied, history, direction);
    if (cb.winner) return *cb.winner;
    return draw_lot(std::span<const CandidateIndex>(cb.survivors), stream, purpose, log);
}

/// Candidate to exclude: the lowest current tally, ties by countback, then by lot.
template <RandomStream S>
CandidateIndex select_exclusion(std::span<const CandidateIndex> continuing, std::span<const std::int64_t> tallies,
                                const TallyHistory& history, S& stream, std::vector<DrawRecord>* log = nullptr)
{
    if (continuing.empty()) throw std::invalid_argument("select_exclusion: no continuing candidates");
    std::int64_t lowest = tallies[continuing.front()];
    for (auto c : continuing) lowest = std::min(lowest, tallies[c]);
    std::vector<CandidateIndex> tied;
    for (auto c : continuing)
        if (tallies[c] == lowest) tied.push_back(c);
    if (tied.size() == 1) return tied.front();
    return break_tie(std::span<const CandidateIndex>(tied), history, CountbackDirection::Lowest, stream,
                     DrawPurpose::ExclusionTie, log);
}

/// Orders candidates by descending tally; equal tallies go by highest countback, then lot.
template <RandomStream S>
std::vector<CandidateIndex> order_by_tally(std::vector<CandidateIndex> pool, std::span<const std::int64_t> tallies,
                                           const TallyHistory& history, S& stream, DrawPurpose purpose,
                                           std::vector<DrawRecord>* log)
{
    std::vector<CandidateIndex> ordered;
    ordered.reserve(pool.size());
    while (!pool.empty()) {
        std::int64_t top = tallies[pool.front()];
        for (auto c : pool) top = std::max(top, tallies[c]);
        std::vector<CandidateIndex> tied;
        for (auto c : pool)
            if (tallies[c] == top) tied.push_back(c);
        const CandidateIndex next =
            tied.size() == 1 ? tied.front()
                             : break_tie(std::span<const CandidateIndex>(tied), history, CountbackDirection::Highest, stream,
                                         purpose, log);
        ordered.push_back(next);
        std::erase(pool, next);
    }
    return ordered;
}

}  // namespace nswstv
