#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nswstv/election.hpp"
#include "nswstv/last_parcel.hpp"
#include "nswstv/randomness.hpp"
#include "nswstv/surplus.hpp"
#include "nswstv/tiebreak.hpp"
#include "nswstv/transcript.hpp"

namespace nswstv {

/// Thrown when a count breaks one of its own bookkeeping invariants.
class InvariantViolation : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

struct ExclusionTransfer
{
    std::vector<RecipientGroup> to_recipients;
    std::vector<PaperIndex> exhausted;
};

/// Every paper of an excluded candidate moves, at full value, to its next
/// continuing preference; papers with none exhaust.
inline ExclusionTransfer distribute_exclusion(const Election& election, std::span<const PaperIndex> papers,
                                              std::span<const CandidateStatus> statuses)
{
    auto grouping = group_by_next_continuing(election, papers, statuses);
    return {std::move(grouping.groups), std::move(grouping.exhausted)};
}

namespace detail {

inline constexpr std::int32_t kExhaustedHolder = -1;

template <RandomStream S>
class CountRun
{
  public:
    CountRun(const Election& election, const RuleConfig& rules, S& stream)
        : election_(election),
          rules_(rules),
          stream_(stream),
          quota_(election.quota()),
          statuses_(election.candidate_count(), CandidateStatus::Continuing),
          tallies_(election.candidate_count(), 0),
          parcels_(election.candidate_count()),
          elected_at_(election.candidate_count(), 0),
          holder_(election.ballots().size(), kExhaustedHolder)
    {
        check_rule_config(rules_);
    }

    Transcript run(std::string seed_id)
    {
        transcript_.rules = rules_;
        transcript_.seed_id = std::move(seed_id);
        transcript_.quota = quota_;
        transcript_.ballots = election_.ballot_count();
        transcript_.seats = election_.seats();

        distribute_first_preferences();
        while (!finished_) {
            if (!pending_.empty())
                distribute_next_surplus();
            else
                exclude_lowest();
        }
        return std::move(transcript_);
    }

  private:
    std::int64_t seats_left() const { return election_.seats() - static_cast<std::int64_t>(transcript_.elected_order.size()); }

    std::vector<CandidateIndex> continuing() const
    {
        std::vector<CandidateIndex> out;
        for (CandidateIndex c = 0; c < statuses_.size(); ++c)
            if (statuses_[c] == CandidateStatus::Continuing) out.push_back(c);
        return out;
    }

    CountRecord& begin_count(TransferKind kind, std::optional<CandidateIndex> source)
    {
        auto& record = transcript_.counts.emplace_back();
        record.number = static_cast<int>(transcript_.counts.size());
        record.action.kind = kind;
        record.action.source = source;
        events_.push_back(CountEvent{record.number, kind, source, {}, std::nullopt});
        return record;
    }

    void move_papers(std::span<const PaperIndex> papers, CandidateIndex to, int count, std::optional<CandidateIndex> from,
                     TransferKind kind)
    {
        if (papers.empty()) return;
        for (auto p : papers) holder_[p] = static_cast<std::int32_t>(to);
        tallies_[to] += static_cast<std::int64_t>(papers.size());
        if (from) tallies_[*from] -= static_cast<std::int64_t>(papers.size());
        parcels_[to].push_back(Parcel{count, from, kind, {papers.begin(), papers.end()}});
    }

    void distribute_first_preferences()
    {
        auto& record = begin_count(TransferKind::FirstPreferences, std::nullopt);
        std::vector<std::vector<PaperIndex>> by_candidate(election_.candidate_count());
        for (PaperIndex p = 0; p < election_.ballots().size(); ++p)
            by_candidate[election_.ballots()[p].preferences.front()].push_back(p);
        for (CandidateIndex c = 0; c < by_candidate.size(); ++c) {
            const auto n = static_cast<std::int64_t>(by_candidate[c].size());
            if (n == 0) continue;
            move_papers(by_candidate[c], c, 1, std::nullopt, TransferKind::FirstPreferences);
            record.action.transfers.push_back({c, n, FixedDecimal::from_integer(n, rules_.rounding_decimal_places), n});
        }
        close_count();
    }

    void distribute_next_surplus()
    {
        // Largest surplus first; pending_ is in order of election, so the
        // earlier-elected candidate wins an equal-surplus comparison.
        auto it = std::max_element(pending_.begin(), pending_.end(), [&](CandidateIndex a, CandidateIndex b) {
            return tallies_[a] - quota_.value < tallies_[b] - quota_.value;
        });
        const CandidateIndex source = *it;
        pending_.erase(it);

        auto& record = begin_count(TransferKind::SurplusDistribution, source);
        const int count = record.number;
        const std::int64_t surplus = tallies_[source] - quota_.value;
        const auto last = compute_last_parcel(parcels_[source], elected_at_[source], rules_.last_parcel_rule, events_);
        const auto grouping = group_by_next_continuing(election_, last.papers, statuses_);
        const auto plan =
            plan_surplus_distribution(grouping, surplus, rules_.rounding_decimal_places, history_, stream_, &record.draws);

        record.action.surplus = surplus;
        record.action.transfer_value = plan.transfer_value;
        record.action.papers_distributed = static_cast<std::int64_t>(last.papers.size());
        record.action.parcel_counts = last.counts;
        record.action.exhausted_papers = static_cast<std::int64_t>(grouping.exhausted.size());
        record.action.retained = plan.retained;

        for (std::size_t g = 0; g < grouping.groups.size(); ++g) {
            const auto& group = grouping.groups[g];
            const std::int64_t n = plan.allocations[g];
            record.action.transfers.push_back(
                {group.recipient, static_cast<std::int64_t>(group.papers.size()), plan.entitlements[g].raw, n});
            if (n == 0) continue;
            auto selection = select_papers_for_transfer(std::span<const PaperIndex>(group.papers), static_cast<std::size_t>(n), stream_);
            move_papers(selection.selected, group.recipient, count, source, TransferKind::SurplusDistribution);
            record.samples.push_back(SampleRecord{group.recipient, static_cast<std::uint32_t>(group.papers.size()),
                                                  selection.stream_position, selection.values_consumed,
                                                  std::move(selection.selected)});
        }
        close_count();
    }

    void exclude_lowest()
    {
        const auto candidates = continuing();
        std::vector<DrawRecord> draws;
        const CandidateIndex excluded = select_exclusion(std::span<const CandidateIndex>(candidates),
                                                         std::span<const std::int64_t>(tallies_), history_, stream_, &draws);
        auto& record = begin_count(TransferKind::Exclusion, excluded);
        record.draws = std::move(draws);
        record.excluded = excluded;
        events_.back().excluded = excluded;
        statuses_[excluded] = CandidateStatus::Excluded;

        std::vector<PaperIndex> papers;
        for (const auto& parcel : parcels_[excluded])
            for (auto p : parcel.papers)
                if (holder_[p] == static_cast<std::int32_t>(excluded)) papers.push_back(p);
        std::sort(papers.begin(), papers.end());

        const auto transfer = distribute_exclusion(election_, papers, statuses_);
        for (const auto& group : transfer.to_recipients) {
            const auto n = static_cast<std::int64_t>(group.papers.size());
            move_papers(group.papers, group.recipient, record.number, excluded, TransferKind::Exclusion);
            record.action.transfers.push_back({group.recipient, n, FixedDecimal::from_integer(n, rules_.rounding_decimal_places), n});
        }
        for (auto p : transfer.exhausted) holder_[p] = kExhaustedHolder;
        const auto exhausted = static_cast<std::int64_t>(transfer.exhausted.size());
        tallies_[excluded] -= exhausted;
        exhausted_ += exhausted;
        record.action.exhausted_papers = exhausted;
        close_count();
    }

    void elect(std::span<const CandidateIndex> ordered, bool reached_quota, CountRecord& record)
    {
        for (auto c : ordered) {
            statuses_[c] = CandidateStatus::Elected;
            elected_at_[c] = record.number;
            transcript_.elected_order.push_back(c);
            record.elected.push_back({c, reached_quota});
            events_.back().elected.push_back(c);
            if (reached_quota && tallies_[c] > quota_.value) pending_.push_back(c);
        }
    }

    void close_count()
    {
        auto& record = transcript_.counts.back();
        history_.push_back(tallies_);

        std::vector<CandidateIndex> reached;
        for (CandidateIndex c = 0; c < statuses_.size(); ++c)
            if (statuses_[c] == CandidateStatus::Continuing && tallies_[c] >= quota_.value) reached.push_back(c);
        if (static_cast<std::int64_t>(reached.size()) > seats_left())
            throw InvariantViolation("count " + std::to_string(record.number) + ": more candidates reached quota than seats remain");
        if (!reached.empty()) {
            const auto ordered = order_by_tally(std::move(reached), std::span<const std::int64_t>(tallies_), history_, stream_,
                                                DrawPurpose::ElectionOrderTie, &record.draws);
            elect(ordered, true, record);
        }

        if (seats_left() == 0) {
            finished_ = true;
        } else {
            auto remaining = continuing();
            if (static_cast<std::int64_t>(remaining.size()) <= seats_left()) {
                const auto ordered = order_by_tally(std::move(remaining), std::span<const std::int64_t>(tallies_), history_,
                                                    stream_, DrawPurpose::ElectionOrderTie, &record.draws);
                elect(ordered, false, record);
                finished_ = true;
            }
        }

        record.after = TallyState{tallies_, statuses_, exhausted_, 0};
        verify(record);
    }

    void verify(const CountRecord& record) const
    {
        const auto where = "count " + std::to_string(record.number) + ": ";
        if (record.after.total() != election_.ballot_count())
            throw InvariantViolation(where + "conservation broken, tallies + exhausted = " + std::to_string(record.after.total()) +
                                     " but " + std::to_string(election_.ballot_count()) + " ballots were cast");
        std::vector<std::int64_t> held(tallies_.size(), 0);
        std::int64_t exhausted = 0;
        for (auto h : holder_) {
            if (h == kExhaustedHolder)
                ++exhausted;
            else
                ++held[static_cast<std::size_t>(h)];
        }
        if (held != tallies_ || exhausted != exhausted_) throw InvariantViolation(where + "paper provenance disagrees with tallies");
        if (finished_ && static_cast<std::int64_t>(transcript_.elected_order.size()) != election_.seats())
            throw InvariantViolation(where + "count finished with the wrong number of elected candidates");
    }

    const Election& election_;
    RuleConfig rules_;
    S& stream_;
    Quota quota_;

    std::vector<CandidateStatus> statuses_;
    std::vector<std::int64_t> tallies_;
    std::vector<std::vector<Parcel>> parcels_;
    std::vector<int> elected_at_;
    std::vector<std::int32_t> holder_;
    std::int64_t exhausted_ = 0;

    std::vector<CandidateIndex> pending_;
    std::vector<CountEvent> events_;
    TallyHistory history_;
    Transcript transcript_;
    bool finished_ = false;
};

}  // namespace detail

/// Runs one complete count. All randomness comes from `stream`, so the same
/// election, rules and stream state always produce the same transcript.
template <RandomStream S>
Transcript run_count(const Election& election, const RuleConfig& rules, S& stream, std::string seed_id = {})
{
    return detail::CountRun<S>(election, rules, stream).run(std::move(seed_id));
}

}  // namespace nswstv
