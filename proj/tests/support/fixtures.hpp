#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nswstv/election.hpp"

namespace fixtures {

struct BallotSpec
{
    int copies;
    std::vector<std::string> preferences;
};

inline nswstv::RawElection make_raw(const std::vector<std::string>& ids, std::int64_t seats, const std::vector<BallotSpec>& specs)
{
    nswstv::RawElection raw;
    for (const auto& id : ids) raw.candidates.push_back({id, id});
    raw.seats = seats;
    int next = 1;
    for (const auto& s : specs)
        for (int i = 0; i < s.copies; ++i) raw.ballots.push_back({"p" + std::to_string(next++), s.preferences});
    return raw;
}

inline nswstv::Election make(const std::vector<std::string>& ids, std::int64_t seats, const std::vector<BallotSpec>& specs)
{
    return nswstv::validate_election(make_raw(ids, seats, specs)).value();
}

/// 16 candidates, 6 seats, 4021 papers, quota 575.
///
/// Minor candidates x1..x6 go out at counts 2-7 and x7 at count 8, electing
/// N, T and C. Their surpluses (counts 9-11) send 79, 0 and 4 papers to R.
/// Excluding H at count 12 gives R 99 more papers and elects R and U. R's
/// surplus at count 13 is where the last-parcel rules part ways: 99 papers
/// under the exclusion-only reading, 182 under the prior-block reading. The
/// sampled papers then decide whether B or M takes the last seat.
inline nswstv::Election griffith()
{
    std::vector<std::string> ids{"N", "T", "C", "R", "U", "H", "B", "M", "W", "x1", "x2", "x3", "x4", "x5", "x6", "x7"};
    std::vector<BallotSpec> specs{
        {574, {"N"}},
        {574, {"T"}},
        {574, {"C"}},
        {424, {"R"}},
        {564, {"U"}},
        {40, {"H", "R"}},
        {30, {"H", "R", "W", "B"}},
        {29, {"H", "R", "W", "M"}},
        {20, {"H", "U"}},
        {51, {"H"}},
        {300, {"B"}},
        {306, {"M"}},
        {165, {"W"}},
        {10, {"x1"}},
        {20, {"x2"}},
        {30, {"x3"}},
        {40, {"x4"}},
        {50, {"x5"}},
        {60, {"x6"}},
        {79, {"x7", "N", "R", "B"}},
        {21, {"x7", "N"}},
        {50, {"x7", "T", "W"}},
        {4, {"x7", "C", "R", "B"}},
        {6, {"x7", "C"}},
    };
    return make(ids, 6, specs);
}

/// 17 candidates, 4 seats, 1923 papers, quota 385.
///
/// Excluding x11 at count 12 elects E and K. Their surpluses (counts 13 and
/// 14) pass 0 and 7 papers to G; excluding R at count 15 passes 110 and
/// elects G, whose surplus at count 16 is drawn from 110 or 117 papers.
inline nswstv::Election gwydir()
{
    std::vector<std::string> ids{"E", "K", "G", "R", "P", "S", "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "x10", "x11"};
    std::vector<BallotSpec> specs{
        {384, {"E"}},
        {384, {"K"}},
        {325, {"G"}},
        {50, {"R", "G"}},
        {30, {"R", "G", "P"}},
        {30, {"R", "G", "S"}},
        {20, {"R"}},
        {200, {"P"}},
        {230, {"S"}},
        {30, {"x11", "E", "P"}},
        {7, {"x11", "K", "G", "S"}},
        {13, {"x11", "K"}},
    };
    for (int i = 1; i <= 10; ++i) specs.push_back({4 * i, {"x" + std::to_string(i)}});
    return make(ids, 4, specs);
}

/// One seat. At count 4 X, Y and Z tie on 13; at count 2 X had 10 against 11
/// for the others, so countback excludes X without a lot.
inline nswstv::Election hawkesbury()
{
    return make({"X", "Y", "Z", "L1", "L2", "W"}, 1,
                {{10, {"X"}},
                 {10, {"Y"}},
                 {11, {"Z"}},
                 {1, {"L1", "Y"}},
                 {3, {"L2", "X"}},
                 {2, {"L2", "Y"}},
                 {2, {"L2", "Z"}},
                 {20, {"W"}}});
}

/// A is elected on first preferences and a surplus of 27 goes out from 135
/// continuing papers at transfer value 0.2.
inline nswstv::Election bland()
{
    return make({"A", "B", "C", "D", "E", "F", "G", "H"}, 2,
                {{48, {"A", "B"}},
                 {38, {"A", "C"}},
                 {28, {"A", "D"}},
                 {18, {"A", "E"}},
                 {1, {"A", "F"}},
                 {1, {"A", "G"}},
                 {1, {"A", "H"}},
                 {49, {"A"}},
                 {60, {"B"}},
                 {55, {"C"}},
                 {50, {"D"}},
                 {45, {"E"}},
                 {30, {"F"}},
                 {25, {"G"}},
                 {20, {"H"}}});
}

/// Nothing random can happen: A holds a majority.
inline nswstv::Election landslide()
{
    return make({"A", "B", "C"}, 1, {{12, {"A"}}, {4, {"B", "A"}}, {3, {"C"}}});
}

// Tiny elections with genuine random branch points and hand-derived answers.

/// Two candidates level at every count; a lot decides.
inline nswstv::Election symmetric_pair() { return make({"A", "B"}, 1, {{2, {"A"}}, {2, {"B"}}}); }

/// A's surplus of 1 at transfer value 1/3 gives B, C and D equal raw
/// entitlements; a rounding lot picks who gets the paper. Each wins 1/3.
inline nswstv::Election rounding_third()
{
    return make({"A", "B", "C", "D"}, 2, {{1, {"A", "B"}}, {1, {"A", "C"}}, {1, {"A", "D"}}, {1, {"A"}}, {1, {"B"}}, {1, {"C"}}, {1, {"D"}}});
}

/// Three of six papers go to B; how many carry C next decides C against D.
/// P(D) = C(4,1)C(2,2)/C(6,3) = 1/5.
inline nswstv::Election sampling_hypergeometric()
{
    return make({"A", "B", "C", "D"}, 2, {{4, {"A", "B", "C"}}, {2, {"A", "B", "D"}}, {3, {"A"}}, {4, {"C"}}, {4, {"D"}}});
}

/// A surplus of 1 sampled from three papers with distinct continuations; the
/// sampled paper carries its continuation to victory. Each of C, D, E wins 1/3.
inline nswstv::Election sampling_three_way()
{
    return make({"A", "B", "C", "D", "E"}, 2,
                {{1, {"A", "B", "C"}}, {1, {"A", "B", "D"}}, {1, {"A", "B", "E"}}, {4, {"A"}}, {3, {"C"}}, {3, {"D"}}, {3, {"E"}}});
}

/// A lot between A and B at count 2 decides whether C or D ends lower on
/// countback at the final exclusion. Each of C and D wins 1/2.
inline nswstv::Election exclusion_lot_chain()
{
    return make({"A", "B", "C", "D"}, 1, {{3, {"A", "C"}}, {3, {"B", "D"}}, {4, {"C"}}, {4, {"D"}}});
}

/// Surplus rounding, paper sampling and a countback that narrows a three-way
/// tie to a two-way lot. B and C win 1/2 each, D never.
inline nswstv::Election mixed_countback_lot()
{
    return make({"A", "B", "C", "D"}, 2, {{3, {"A", "B", "C"}}, {3, {"A", "C", "B"}}, {2, {"A"}}, {2, {"B"}}, {2, {"C"}}, {3, {"D"}}});
}

struct TinyCase
{
    const char* name;
    nswstv::Election (*build)();
};

inline const std::vector<TinyCase>& tiny_cases()
{
    static const std::vector<TinyCase> cases{
        {"symmetric_pair", symmetric_pair},
        {"rounding_third", rounding_third},
        {"sampling_hypergeometric", sampling_hypergeometric},
        {"sampling_three_way", sampling_three_way},
        {"exclusion_lot_chain", exclusion_lot_chain},
        {"mixed_countback_lot", mixed_countback_lot},
    };
    return cases;
}

/// Synthetic contest for throughput: `candidates` candidates with skewed
/// popularity, ballots of random length, generated from a fixed seed.
inline nswstv::Election synthetic(int candidates, int ballots, int seats, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<std::string> ids;
    std::vector<double> weight;
    for (int c = 0; c < candidates; ++c) {
        ids.push_back("c" + std::to_string(c + 1));
        weight.push_back(1.0 / (1.0 + c));
    }
    std::vector<BallotSpec> specs;
    std::uniform_int_distribution<int> length(1, candidates);
    for (int b = 0; b < ballots; ++b) {
        std::vector<double> w = weight;
        std::vector<std::string> prefs;
        const int n = length(rng);
        for (int k = 0; k < n; ++k) {
            std::discrete_distribution<int> pick(w.begin(), w.end());
            const int c = pick(rng);
            prefs.push_back(ids[static_cast<std::size_t>(c)]);
            w[static_cast<std::size_t>(c)] = 0.0;
        }
        specs.push_back({1, std::move(prefs)});
    }
    return make(ids, seats, specs);
}

}  // namespace fixtures
