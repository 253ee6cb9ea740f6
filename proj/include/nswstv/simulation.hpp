#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "nswstv/count_engine.hpp"
#include "nswstv/election.hpp"
#include "nswstv/randomness.hpp"
#include "nswstv/simulation_report.hpp"

namespace nswstv {

inline constexpr std::uint64_t kDefaultTrials = 10'000;

namespace detail {

inline unsigned worker_count(std::uint64_t tasks, unsigned requested)
{
    unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(tasks, 1)));
}

/// Runs body(i) for i in [0, tasks) on a small pool, each worker owning one Acc.
/// Returns the per-worker accumulators; the caller merges them.
template <class Acc, class MakeAcc, class Body>
std::vector<Acc> parallel_accumulate(std::uint64_t tasks, unsigned threads, MakeAcc make_acc, Body body)
{
    const unsigned workers = worker_count(tasks, threads);
    std::vector<Acc> accs;
    accs.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) accs.push_back(make_acc());

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&](Acc& acc) {
        try {
            for (std::uint64_t i = next++; i < tasks; i = next++) body(i, acc);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = tasks;
        }
    };
    if (workers == 1) {
        work(accs.front());
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, std::ref(accs[w]));
    }
    if (failure) std::rethrow_exception(failure);
    return accs;
}

}  // namespace detail

/// Runs N counts; trial i draws from fork_substream(seed, "trial-i"). The
/// result does not depend on the number of threads or their scheduling.
inline SimulationReport run_trials(const Election& election, const RuleConfig& rules, const SeedCeremonyRecord& ceremony,
                                   std::uint64_t trials, unsigned threads = 0)
{
    if (trials == 0) throw std::invalid_argument("run_trials: at least one trial is required");
    check_rule_config(rules);
    const auto seed = ceremony.derived_seed;
    auto parts = detail::parallel_accumulate<SimulationReport>(
        trials, threads, [&] { return SimulationReport::empty_for(election, rules, ceremony); },
        [&](std::uint64_t i, SimulationReport& acc) {
            auto stream = fork_substream(seed, trial_label(i));
            acc.add(run_count(election, rules, stream));
        });
    auto report = SimulationReport::empty_for(election, rules, ceremony);
    for (const auto& part : parts) report.merge(part);
    return report;
}

using Rational = boost::multiprecision::cpp_rational;

class BranchBudgetExceeded : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Stream that walks every outcome of every draw, depth first. Each call to
/// next_below beyond the current script opens a new branch point at choice 0;
/// advance() moves to the next unexplored path like an odometer.
class EnumeratingStream
{
  public:
    std::uint64_t next_below(std::uint64_t n)
    {
        if (n == 0) throw std::invalid_argument("next_below: n must be positive");
        if (depth_ < script_.size()) {
            if (script_[depth_].bound != n) throw std::logic_error("enumeration: count is not deterministic given its draws");
        } else {
            script_.push_back({0, n});
        }
        return script_[depth_++].choice;
    }

    std::uint64_t position() const { return depth_; }

    /// Product of branch factors along the path just taken.
    boost::multiprecision::cpp_int path_branching() const
    {
        boost::multiprecision::cpp_int product = 1;
        for (std::size_t i = 0; i < depth_; ++i) product *= script_[i].bound;
        return product;
    }

    bool advance()
    {
        script_.resize(depth_);
        depth_ = 0;
        while (!script_.empty() && script_.back().choice + 1 == script_.back().bound) script_.pop_back();
        if (script_.empty()) return false;
        ++script_.back().choice;
        return true;
    }

  private:
    struct Branch
    {
        std::uint64_t choice;
        std::uint64_t bound;
    };
    std::vector<Branch> script_;
    std::size_t depth_ = 0;
};

static_assert(RandomStream<EnumeratingStream>);

struct ExactProbabilities
{
    std::vector<Rational> probability;  // per candidate
    std::uint64_t paths = 0;
};

inline constexpr std::uint64_t kDefaultBranchBudget = 1'000'000;

/// Exact election probabilities by enumerating every outcome of every random
/// draw, each path weighted by the product of 1/n over its draws. Refuses
/// elections whose paths exceed `budget` (per-path branching or path count).
inline ExactProbabilities exact_probabilities(const Election& election, const RuleConfig& rules,
                                              std::uint64_t budget = kDefaultBranchBudget)
{
    ExactProbabilities out;
    out.probability.assign(election.candidate_count(), Rational(0));
    EnumeratingStream stream;
    do {
        const auto transcript = run_count(election, rules, stream);
        const auto branching = stream.path_branching();
        if (branching > budget || ++out.paths > budget)
            throw BranchBudgetExceeded("exact_probabilities: more than " + std::to_string(budget) +
                                       " random paths; use Monte Carlo instead");
        const Rational weight(boost::multiprecision::cpp_int(1), branching);
        for (auto c : transcript.elected_order) out.probability[c] += weight;
    } while (stream.advance());
    return out;
}

/// Paired comparison of two rule sets on common random numbers.
inline VariantComparison compare_variants(const Election& election, const RuleConfig& rules_a, const RuleConfig& rules_b,
                                          const SeedCeremonyRecord& ceremony, std::uint64_t trials, unsigned threads = 0)
{
    if (trials == 0) throw std::invalid_argument("compare_variants: at least one trial is required");
    check_rule_config(rules_a);
    check_rule_config(rules_b);
    const auto n = election.candidate_count();
    const auto seed = ceremony.derived_seed;

    struct Acc
    {
        SimulationReport a, b;
        std::vector<std::int64_t> discordant;  // trials where exactly one variant elects the candidate
    };
    auto parts = detail::parallel_accumulate<Acc>(
        trials, threads,
        [&] {
            return Acc{SimulationReport::empty_for(election, rules_a, ceremony),
                       SimulationReport::empty_for(election, rules_b, ceremony), std::vector<std::int64_t>(n, 0)};
        },
        [&](std::uint64_t i, Acc& acc) {
            auto stream_a = fork_substream(seed, trial_label(i));
            auto stream_b = fork_substream(seed, trial_label(i));
            const auto ta = run_count(election, rules_a, stream_a);
            const auto tb = run_count(election, rules_b, stream_b);
            acc.a.add(ta);
            acc.b.add(tb);
            std::vector<int> in_a(n, 0), in_b(n, 0);
            for (auto c : ta.elected_order) in_a[c] = 1;
            for (auto c : tb.elected_order) in_b[c] = 1;
            for (std::size_t c = 0; c < n; ++c) acc.discordant[c] += in_a[c] != in_b[c];
        });

    VariantComparison out;
    out.a = SimulationReport::empty_for(election, rules_a, ceremony);
    out.b = SimulationReport::empty_for(election, rules_b, ceremony);
    std::vector<std::int64_t> discordant(n, 0);
    for (const auto& part : parts) {
        out.a.merge(part.a);
        out.b.merge(part.b);
        for (std::size_t c = 0; c < n; ++c) discordant[c] += part.discordant[c];
    }

    // Per trial d = 1[a elects] - 1[b elects] in {-1, 0, 1}, so sum(d^2) is the discordant count.
    const auto N = static_cast<double>(trials);
    for (CandidateIndex c = 0; c < n; ++c) {
        const double mean = (static_cast<double>(out.a.elected_count[c]) - static_cast<double>(out.b.elected_count[c])) / N;
        out.delta.push_back(mean);
        double se = 0.0;
        if (trials > 1) {
            const double variance = (static_cast<double>(discordant[c]) - N * mean * mean) / (N - 1.0);
            se = std::sqrt(std::max(0.0, variance) / N);
        }
        out.paired_standard_error.push_back(se);
    }

    auto stream_a = fork_substream(seed, trial_label(0));
    auto stream_b = fork_substream(seed, trial_label(0));
    const auto ta = run_count(election, rules_a, stream_a);
    const auto tb = run_count(election, rules_b, stream_b);
    out.first_divergence = first_divergence(ta, tb);
    if (out.first_divergence) {
        const auto idx = static_cast<std::size_t>(*out.first_divergence - 1);
        if (idx < ta.counts.size()) out.divergent_count_a = ta.counts[idx];
        if (idx < tb.counts.size()) out.divergent_count_b = tb.counts[idx];
    }
    return out;
}

}  // namespace nswstv
