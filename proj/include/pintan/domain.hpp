#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pintan/rng.hpp"

namespace pintan {

/// Logical simulation time. One tick is roughly one user-visible action.
using Tick = std::int64_t;

/// Thrown when a value violates a construction-time invariant.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Digit-string lengths used by a bank. The defaults are pairwise distinct
/// so a keystroke stream can be split into ID, PIN and TAN by length alone.
struct CredentialFormat {
    std::size_t id_length = 8;
    std::size_t pin_length = 5;
    std::size_t tan_length = 6;
    std::size_t ben_length = 6;

    bool operator==(const CredentialFormat&) const = default;
};

bool is_digit_string(std::string_view s);
bool is_digit_string(std::string_view s, std::size_t length);
std::string random_digits(Rng& rng, std::size_t length);

enum class TanStatus { Fresh, Used, Invalidated };
enum class TanAcceptance { NextOnly, AnyUnused };
enum class TanInvalidation { UsedOnly, UsedAndPredecessors };
enum class TanRejectReason { AlreadyUsed, Invalidated, NotNext, Unknown };

std::string_view to_string(TanStatus s);
std::string_view to_string(TanAcceptance a);
std::string_view to_string(TanInvalidation i);
std::string_view to_string(TanRejectReason r);

struct TanEntry {
    std::string value;
    std::size_t index = 0; // 1-based
    std::string ben;
    TanStatus status = TanStatus::Fresh;

    bool operator==(const TanEntry&) const = default;
};

struct TanPolicy {
    TanAcceptance acceptance = TanAcceptance::AnyUnused;
    TanInvalidation invalidation = TanInvalidation::UsedAndPredecessors;

    bool operator==(const TanPolicy&) const = default;
};

struct TanAccepted {
    std::size_t index = 0;
    std::string ben;

    bool operator==(const TanAccepted&) const = default;
};

struct TanRejected {
    TanRejectReason reason = TanRejectReason::Unknown;

    bool operator==(const TanRejected&) const = default;
};

using ConsumeResult = std::variant<TanAccepted, TanRejected>;

/// Ordered TAN list with paired BENs. Values are unique; statuses only move
/// Fresh -> Used or Fresh -> Invalidated.
class TanList {
public:
    TanList() = default;
    explicit TanList(std::vector<TanEntry> entries);

    static TanList from_values(std::vector<std::string> values, std::vector<std::string> bens);
    /// Uniformly random unique TANs with pre-assigned BENs.
    static TanList generate(std::size_t count, const CredentialFormat& format, Rng& rng);

    std::span<const TanEntry> entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t fresh_count() const;

    const TanEntry* find(std::string_view value) const;
    const TanEntry& at(std::size_t index) const;
    /// Lowest-index Fresh entry, if any.
    std::optional<std::size_t> next_fresh() const;

    ConsumeResult consume(std::string_view presented, TanPolicy policy);

    bool operator==(const TanList&) const = default;

private:
    std::vector<TanEntry> entries_;
};

/// Transition function over a TAN list; the list is left unchanged on rejection.
ConsumeResult consume_tan(TanList& list, std::string_view presented, TanPolicy policy);

enum class PinChangeResult { Ok, WrongOld, BadFormat, Reused };
std::string_view to_string(PinChangeResult r);

class Credentials {
public:
    Credentials(std::string id, std::string pin, TanList tans, CredentialFormat format = {});

    static Credentials generate(std::string id, const CredentialFormat& format, std::size_t tan_count, Rng& rng);

    const std::string& id() const { return id_; }
    const std::string& pin() const { return pin_; }
    const CredentialFormat& format() const { return format_; }
    const TanList& tans() const { return tans_; }
    TanList& tans() { return tans_; }
    std::span<const std::string> retired_pins() const { return retired_pins_; }

    bool authenticates(std::string_view pin) const { return pin == pin_; }

    PinChangeResult change_pin(std::string_view old_pin, std::string_view new_pin);

private:
    std::string id_;
    std::string pin_;
    TanList tans_;
    CredentialFormat format_;
    std::vector<std::string> retired_pins_;
};

inline PinChangeResult change_pin(Credentials& cred, std::string_view old_pin, std::string_view new_pin)
{
    return cred.change_pin(old_pin, new_pin);
}

} // namespace pintan
