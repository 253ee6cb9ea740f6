#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nswstv/nswstv.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

struct RunSpec
{
    std::string manifest_path;
    std::string ballots_path;
    std::string last_parcel = std::string(nswstv::to_cli_name(nswstv::LastParcelRule::ExclusionTriggeredOnly));
    int decimals = 8;
    std::string seed_text;
    std::string seed_file;
    std::uint64_t trials = nswstv::kDefaultTrials;
    unsigned threads = 0;
    std::string out = "-";
    std::string variant_a = std::string(nswstv::to_cli_name(nswstv::LastParcelRule::ExclusionTriggeredOnly));
    std::string variant_b = std::string(nswstv::to_cli_name(nswstv::LastParcelRule::PriorTransferBlock));
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw nswstv::InputError("cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_output(const std::string& path, const std::string& content)
{
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw nswstv::InputError("cannot write " + path);
    out << content;
    if (!out) throw nswstv::InputError("failed writing " + path);
}

/// Progress messages go to stdout unless stdout carries the main output.
std::ostream& info(const RunSpec& spec) { return spec.out == "-" ? std::cerr : std::cout; }

nswstv::Election load(const RunSpec& spec)
{
    return nswstv::load_election(read_file(spec.manifest_path), read_file(spec.ballots_path));
}

nswstv::RuleConfig rules_for(const std::string& last_parcel, int decimals)
{
    const auto rule = nswstv::last_parcel_rule_from_cli_name(last_parcel);
    if (!rule) throw nswstv::InputError("unknown --last-parcel value " + last_parcel);
    nswstv::RuleConfig rules{*rule, decimals};
    try {
        nswstv::check_rule_config(rules);
    } catch (const std::invalid_argument& e) {
        throw nswstv::InputError(e.what());
    }
    return rules;
}

nswstv::SeedCeremonyRecord ceremony(const RunSpec& spec)
{
    const bool text = !spec.seed_text.empty();
    const bool file = !spec.seed_file.empty();
    if (text == file) throw nswstv::InputError("give exactly one of --seed-text or --seed-file");
    try {
        return text ? nswstv::derive_seed(spec.seed_text) : nswstv::ceremony_from_json(read_file(spec.seed_file));
    } catch (const std::invalid_argument& e) {
        throw nswstv::InputError(e.what());
    }
}

std::string elected_line(const nswstv::Transcript& t, const nswstv::Election& e)
{
    std::string out;
    for (std::size_t k = 0; k < t.elected_order.size(); ++k) {
        if (k) out += ' ';
        out += e.candidates()[t.elected_order[k]].id;
    }
    return out;
}

int cmd_count(const RunSpec& spec)
{
    const auto election = load(spec);
    const auto rules = rules_for(spec.last_parcel, spec.decimals);
    const auto record = ceremony(spec);
    nswstv::PrngStream stream(record.derived_seed);
    const auto transcript = nswstv::run_count(election, rules, stream, nswstv::to_hex(record.derived_seed));
    write_output(spec.out, nswstv::write_transcript(transcript, election));
    info(spec) << "elected: " << elected_line(transcript, election) << "\n";
    return kExitOk;
}

int cmd_simulate(const RunSpec& spec)
{
    if (spec.trials < 1) throw nswstv::InputError("--trials must be at least 1");
    const auto election = load(spec);
    const auto rules = rules_for(spec.last_parcel, spec.decimals);
    const auto record = ceremony(spec);
    const auto report = nswstv::run_trials(election, rules, record, spec.trials, spec.threads);
    write_output(spec.out, nswstv::write_probability_report(report));

    auto& os = info(spec);
    os << "seed ceremony: " << nswstv::ceremony_to_json(record).dump() << "\n";
    os << "trials: " << report.trials << ", last parcel: " << nswstv::to_cli_name(rules.last_parcel_rule)
       << ", decimals: " << rules.rounding_decimal_places << "\n";
    for (nswstv::CandidateIndex c = 0; c < election.candidate_count(); ++c) {
        char line[160];
        std::snprintf(line, sizeof line, "  %-20s %.6f +/- %.6f\n", report.candidate_ids[c].c_str(), report.probability(c),
                      report.standard_error(c));
        os << line;
    }
    return kExitOk;
}

int cmd_compare(const RunSpec& spec)
{
    if (spec.trials < 1) throw nswstv::InputError("--trials must be at least 1");
    const auto election = load(spec);
    const auto rules_a = rules_for(spec.variant_a, spec.decimals);
    const auto rules_b = rules_for(spec.variant_b, spec.decimals);
    const auto record = ceremony(spec);
    const auto cmp = nswstv::compare_variants(election, rules_a, rules_b, record, spec.trials, spec.threads);
    write_output(spec.out, nswstv::write_variant_comparison(cmp));

    auto& os = info(spec);
    os << "seed ceremony: " << nswstv::ceremony_to_json(record).dump() << "\n";
    os << "a: " << spec.variant_a << "  b: " << spec.variant_b << "  trials: " << spec.trials << "\n";
    for (nswstv::CandidateIndex c = 0; c < election.candidate_count(); ++c) {
        char line[200];
        std::snprintf(line, sizeof line, "  %-20s a %.6f  b %.6f  delta %+.6f +/- %.6f\n", cmp.a.candidate_ids[c].c_str(),
                      cmp.a.probability(c), cmp.b.probability(c), cmp.delta[c], cmp.paired_standard_error[c]);
        os << line;
    }
    if (cmp.first_divergence) {
        os << "first divergence at count " << *cmp.first_divergence;
        if (cmp.divergent_count_a && cmp.divergent_count_b)
            os << ": papers distributed " << cmp.divergent_count_a->action.papers_distributed << " (a) vs "
               << cmp.divergent_count_b->action.papers_distributed << " (b)";
        os << "\n";
    } else {
        os << "no divergence in trial 0\n";
    }
    return kExitOk;
}

int cmd_seed(const RunSpec& spec)
{
    if (spec.seed_text.empty()) throw nswstv::InputError("seed: entropy text must not be empty");
    const auto record = nswstv::derive_seed(spec.seed_text);
    const auto json = nswstv::ceremony_to_json(record).dump(2) + "\n";
    if (spec.out == "-") {
        std::cout << json;
    } else {
        write_output(spec.out, json);
    }
    std::cout << nswstv::to_hex(record.derived_seed) << "\n";
    return kExitOk;
}

void add_election_options(CLI::App* cmd, RunSpec& spec)
{
    cmd->add_option("--manifest", spec.manifest_path, "Candidate manifest (JSON)")->required();
    cmd->add_option("--ballots", spec.ballots_path, "Ballot papers (CSV, one paper per row)")->required();
    cmd->add_option("--decimals", spec.decimals, "Decimal places for transfer values")->capture_default_str();
    auto* text = cmd->add_option("--seed-text", spec.seed_text, "Public entropy text for the seed ceremony");
    auto* file = cmd->add_option("--seed-file", spec.seed_file, "Seed ceremony record (JSON)");
    text->excludes(file);
    cmd->add_option("--out", spec.out, "Output path, - for stdout")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Randomized STV counting, simulation and rule-variant comparison"};
    app.require_subcommand(1);
    RunSpec spec;

    auto* count = app.add_subcommand("count", "Run one seeded count and write its transcript");
    add_election_options(count, spec);
    count->add_option("--last-parcel", spec.last_parcel, "clause-1.4.14.1 or pseudocode-1.4.14.2")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Estimate election probabilities over seeded trials");
    add_election_options(simulate, spec);
    simulate->add_option("--last-parcel", spec.last_parcel, "clause-1.4.14.1 or pseudocode-1.4.14.2")->capture_default_str();
    simulate->add_option("--trials", spec.trials, "Number of trials")->capture_default_str();
    simulate->add_option("--threads", spec.threads, "Worker threads, 0 for all cores");

    auto* compare = app.add_subcommand("compare", "Compare two last-parcel rules on common random numbers");
    add_election_options(compare, spec);
    compare->add_option("--variant-a", spec.variant_a, "Last-parcel rule for variant a")->capture_default_str();
    compare->add_option("--variant-b", spec.variant_b, "Last-parcel rule for variant b")->capture_default_str();
    compare->add_option("--trials", spec.trials, "Number of paired trials")->capture_default_str();
    compare->add_option("--threads", spec.threads, "Worker threads, 0 for all cores");

    auto* seed = app.add_subcommand("seed", "Record a seed ceremony from public entropy");
    seed->add_option("--seed-text,entropy", spec.seed_text, "Public entropy text, e.g. dice rolls")->required();
    seed->add_option("--out", spec.out, "Ceremony record path, - for stdout")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*count) return cmd_count(spec);
        if (*simulate) return cmd_simulate(spec);
        if (*compare) return cmd_compare(spec);
        if (*seed) return cmd_seed(spec);
    } catch (const nswstv::InputError& e) {
        for (const auto& p : e.problems()) std::cerr << "error: " << p << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const nswstv::InvariantViolation& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
