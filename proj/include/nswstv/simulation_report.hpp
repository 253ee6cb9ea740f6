#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nswstv/election.hpp"
#include "nswstv/randomness.hpp"
#include "nswstv/transcript.hpp"

namespace nswstv {

/// Aggregate of N seeded trials. All fields are integer counts, so merging
/// partial reports is associative and commutative.
struct SimulationReport
{
    std::uint64_t trials = 0;
    std::int64_t seats = 0;
    std::vector<std::string> candidate_ids;
    std::vector<std::int64_t> elected_count;
    std::vector<std::int64_t> final_tally_sum;
    /// position_count[c][k]: trials in which candidate c was the (k+1)-th elected.
    std::vector<std::vector<std::int64_t>> position_count;
    SeedCeremonyRecord ceremony;
    RuleConfig rules;

    static SimulationReport empty_for(const Election& election, const RuleConfig& rules, const SeedCeremonyRecord& ceremony)
    {
        SimulationReport r;
        r.seats = election.seats();
        for (const auto& c : election.candidates()) r.candidate_ids.push_back(c.id);
        const auto n = election.candidate_count();
        r.elected_count.assign(n, 0);
        r.final_tally_sum.assign(n, 0);
        r.position_count.assign(n, std::vector<std::int64_t>(static_cast<std::size_t>(election.seats()), 0));
        r.ceremony = ceremony;
        r.rules = rules;
        return r;
    }

    void add(const Transcript& t)
    {
        ++trials;
        const auto& final_state = t.final_state();
        for (std::size_t c = 0; c < final_tally_sum.size(); ++c) final_tally_sum[c] += final_state.tallies[c];
        for (std::size_t k = 0; k < t.elected_order.size(); ++k) {
            ++elected_count[t.elected_order[k]];
            ++position_count[t.elected_order[k]][k];
        }
    }

    void merge(const SimulationReport& other)
    {
        trials += other.trials;
        for (std::size_t c = 0; c < elected_count.size(); ++c) {
            elected_count[c] += other.elected_count[c];
            final_tally_sum[c] += other.final_tally_sum[c];
            for (std::size_t k = 0; k < position_count[c].size(); ++k) position_count[c][k] += other.position_count[c][k];
        }
    }

    double probability(CandidateIndex c) const
    {
        return trials == 0 ? 0.0 : static_cast<double>(elected_count[c]) / static_cast<double>(trials);
    }
    double standard_error(CandidateIndex c) const
    {
        if (trials == 0) return 0.0;
        const double p = probability(c);
        return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    }
    double mean_final_tally(CandidateIndex c) const
    {
        return trials == 0 ? 0.0 : static_cast<double>(final_tally_sum[c]) / static_cast<double>(trials);
    }

    bool operator==(const SimulationReport&) const = default;
};

/// Two rule variants run on common random numbers (trial i uses the same
/// substream under both rules).
struct VariantComparison
{
    SimulationReport a;
    SimulationReport b;
    std::vector<double> delta;  // P_a - P_b per candidate
    std::vector<double> paired_standard_error;
    std::optional<int> first_divergence;  // from the paired trial-0 transcripts
    std::optional<CountRecord> divergent_count_a;
    std::optional<CountRecord> divergent_count_b;
};

}  // namespace nswstv
