#pragma once

#include <openssl/sha.h>

#include <array>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace nswstv {

using Seed = std::array<std::uint8_t, 32>;

inline constexpr std::string_view kStreamAlgorithm = "sha256-ctr-v1";

inline Seed sha256(std::span<const std::uint8_t> bytes)
{
    Seed digest{};
    ::SHA256(bytes.data(), bytes.size(), digest.data());
    return digest;
}

inline Seed sha256(std::string_view text)
{
    return sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline std::string to_hex(std::span<const std::uint8_t> bytes)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out += digits[b >> 4];
        out += digits[b & 0xF];
    }
    return out;
}

inline Seed seed_from_hex(std::string_view hex)
{
    if (hex.size() != 64) throw std::invalid_argument("seed hex must be 64 characters");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::invalid_argument(std::string("invalid hex digit '") + c + "'");
    };
    Seed seed{};
    for (std::size_t i = 0; i < seed.size(); ++i)
        seed[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return seed;
}

/// Anything the count engine can draw from. The exact-enumeration oracle
/// supplies its own implementation, so the engine is written against this.
template <class S>
concept RandomStream = requires(S s, std::uint64_t n) {
    { s.next_below(n) } -> std::convertible_to<std::uint64_t>;
    { s.position() } -> std::convertible_to<std::uint64_t>;
};

/// value_i = first 8 bytes (big-endian) of SHA-256(seed || BE64(i)).
class PrngStream
{
  public:
    explicit PrngStream(const Seed& seed, std::uint64_t position = 0) : position_(position)
    {
        std::memcpy(block_.data(), seed.data(), seed.size());
    }

    Seed seed() const
    {
        Seed s{};
        std::memcpy(s.data(), block_.data(), s.size());
        return s;
    }

    /// Number of raw 64-bit values consumed so far.
    std::uint64_t position() const { return position_; }

    std::uint64_t value_at(std::uint64_t index) const
    {
        auto block = block_;
        for (int i = 0; i < 8; ++i) block[32 + i] = static_cast<std::uint8_t>(index >> (56 - 8 * i));
        std::array<std::uint8_t, 32> digest{};
        ::SHA256(block.data(), block.size(), digest.data());
        std::uint64_t value = 0;
        for (int i = 0; i < 8; ++i) value = value << 8 | digest[i];
        return value;
    }

    std::uint64_t next_u64() { return value_at(position_++); }

    /// Unbiased integer in [0, n) by rejection: values >= floor(2^64/n)*n are redrawn.
    std::uint64_t next_below(std::uint64_t n)
    {
        if (n == 0) throw std::invalid_argument("next_below: n must be positive");
        const std::uint64_t excess = (0 - n) % n;  // 2^64 mod n
        const std::uint64_t last_accepted = std::numeric_limits<std::uint64_t>::max() - excess;
        for (;;) {
            const std::uint64_t x = next_u64();
            if (x <= last_accepted) return x % n;
        }
    }

  private:
    std::array<std::uint8_t, 40> block_{};
    std::uint64_t position_ = 0;
};

static_assert(RandomStream<PrngStream>);

struct SeedCeremonyRecord
{
    std::string entropy_input;
    Seed derived_seed{};
    std::string algorithm{kStreamAlgorithm};

    bool operator==(const SeedCeremonyRecord&) const = default;
};

inline SeedCeremonyRecord derive_seed(std::string_view entropy_input)
{
    if (entropy_input.empty()) throw std::invalid_argument("seed ceremony: entropy input must not be empty");
    return SeedCeremonyRecord{std::string(entropy_input), sha256(entropy_input), std::string(kStreamAlgorithm)};
}

/// Independent, replayable stream for a labelled task: seed' = SHA-256(seed || label).
inline PrngStream fork_substream(const Seed& seed, std::string_view label)
{
    std::string material(reinterpret_cast<const char*>(seed.data()), seed.size());
    material += label;
    return PrngStream(sha256(material));
}

inline std::string trial_label(std::uint64_t trial) { return "trial-" + std::to_string(trial); }

inline nlohmann::ordered_json ceremony_to_json(const SeedCeremonyRecord& record)
{
    nlohmann::ordered_json j;
    j["entropy_input"] = record.entropy_input;
    j["derived_seed_hex"] = to_hex(record.derived_seed);
    j["algorithm"] = record.algorithm;
    return j;
}

/// Parses and re-verifies a ceremony record: the stored seed must be the hash of the stored entropy.
inline SeedCeremonyRecord ceremony_from_json(std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("ceremony record: malformed JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("entropy_input") || !j.contains("derived_seed_hex") || !j.contains("algorithm"))
        throw std::invalid_argument("ceremony record: requires entropy_input, derived_seed_hex and algorithm");
    if (!j["entropy_input"].is_string() || !j["derived_seed_hex"].is_string() || !j["algorithm"].is_string())
        throw std::invalid_argument("ceremony record: fields must be strings");
    if (j["algorithm"].get<std::string>() != kStreamAlgorithm)
        throw std::invalid_argument("ceremony record: unsupported algorithm " + j["algorithm"].get<std::string>());
    auto record = derive_seed(j["entropy_input"].get<std::string>());
    if (record.derived_seed != seed_from_hex(j["derived_seed_hex"].get<std::string>()))
        throw std::invalid_argument("ceremony record: derived_seed_hex does not match SHA-256 of entropy_input");
    return record;
}

}  // namespace nswstv
